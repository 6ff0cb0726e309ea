//! Polynomial expression syntax.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" unary) | power)*      adjacent factors multiply
//! unary    := ("-" | "+") unary | power
//! power    := primary ("^" exponent)?
//! exponent := INTEGER ("^" exponent)?             right associative
//! primary  := NUMBER | IDENT | "(" expr ")"
//! NUMBER   := digits | digits "/" digits
//! ```
//!
//! An identifier that is not a declared variable is split into a run of
//! declared variables when possible, so `4bp^3` reads as `4*b*p^3` in the
//! ring `[b, p]`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{MultiPoly, Rational};

const MAX_EXPONENT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Identifier,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprToken {
    pub kind: TokenKind,
    pub lexeme: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at byte {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("exponent at byte {position} must be a nonnegative integer literal")]
    BadExponent { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownVariable { position, .. }
            | ParseError::BadExponent { position } => *position,
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<ExprToken>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(ExprToken {
                kind,
                lexeme: c.to_string(),
                position: start,
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'/' {
                i += 1;
                let den_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == den_start {
                    return Err(syntax(den_start, "expected denominator digits after `/`"));
                }
            }
            out.push(ExprToken {
                kind: TokenKind::Number,
                lexeme: text[start..i].to_string(),
                position: start,
            });
            continue;
        }
        if is_ident_start(c) {
            while i < bytes.len() && is_ident_continue(bytes[i] as char) {
                i += 1;
            }
            out.push(ExprToken {
                kind: TokenKind::Identifier,
                lexeme: text[start..i].to_string(),
                position: start,
            });
            continue;
        }
        let ch = text[i..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    Ok(out)
}

fn parse_number(tok: &ExprToken) -> Result<Rational, ParseError> {
    let (num, den) = match tok.lexeme.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok.lexeme.as_str(), "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| syntax(tok.position, "malformed number"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| syntax(tok.position, "malformed number"))?;
    if den.is_zero() {
        return Err(syntax(tok.position, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

struct Parser<'a> {
    tokens: Vec<ExprToken>,
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&ExprToken> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<ExprToken> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                TokenKind::Number | TokenKind::Identifier | TokenKind::LParen => {
                    acc = &acc * &self.power()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek().map(|t| t.kind) {
            Some(TokenKind::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(TokenKind::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, ParseError> {
        // in `xy^3` the exponent binds to `y` only
        let word = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier && MultiPoly::var_named(self.vars, &t.lexeme).is_none() => {
                split_into_vars(&t.lexeme, self.vars)
            }
            _ => None,
        };
        let (head, base) = match word {
            Some(mut parts) if parts.len() > 1 => {
                self.bump();
                let last = parts.pop().unwrap();
                let head = parts.iter().fold(MultiPoly::one(self.vars), |acc, &i| {
                    &acc * &MultiPoly::var(self.vars, i)
                });
                (head, MultiPoly::var(self.vars, last))
            }
            _ => (MultiPoly::one(self.vars), self.primary()?),
        };
        if self.peek().map(|t| t.kind) == Some(TokenKind::Caret) {
            self.bump();
            let e = self.exponent()?;
            return Ok(&head * &base.pow(e));
        }
        Ok(&head * &base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let position = self.here();
        let tok = match self.bump() {
            Some(t) if t.kind == TokenKind::Number && !t.lexeme.contains('/') => t,
            _ => return Err(ParseError::BadExponent { position }),
        };
        let base: u64 = tok
            .lexeme
            .parse()
            .map_err(|_| syntax(position, "exponent too large"))?;
        let value = if self.peek().map(|t| t.kind) == Some(TokenKind::Caret) {
            self.bump();
            let e = self.exponent()?;
            let mut v: u64 = 1;
            for _ in 0..e {
                v = v.saturating_mul(base);
                if v > MAX_EXPONENT {
                    break;
                }
            }
            v
        } else {
            base
        };
        if value > MAX_EXPONENT {
            return Err(syntax(position, "exponent too large"));
        }
        Ok(value as u32)
    }

    fn primary(&mut self) -> Result<MultiPoly, ParseError> {
        let position = self.here();
        let tok = self
            .bump()
            .ok_or_else(|| syntax(position, "unexpected end of input"))?;
        match tok.kind {
            TokenKind::Number => Ok(MultiPoly::constant(self.vars, parse_number(&tok)?)),
            TokenKind::Identifier => self.identifier(&tok),
            TokenKind::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(t) if t.kind == TokenKind::RParen => Ok(inner),
                    Some(t) => Err(syntax(t.position, "expected `)`")),
                    None => Err(syntax(self.end, "unclosed `(`")),
                }
            }
            _ => Err(syntax(tok.position, format!("unexpected `{}`", tok.lexeme))),
        }
    }

    fn identifier(&self, tok: &ExprToken) -> Result<MultiPoly, ParseError> {
        if let Some(p) = MultiPoly::var_named(self.vars, &tok.lexeme) {
            return Ok(p);
        }
        match split_into_vars(&tok.lexeme, self.vars) {
            Some(parts) => Ok(parts
                .iter()
                .fold(MultiPoly::one(self.vars), |acc, &i| {
                    &acc * &MultiPoly::var(self.vars, i)
                })),
            None => Err(ParseError::UnknownVariable {
                name: tok.lexeme.clone(),
                position: tok.position,
            }),
        }
    }
}

/// Segment `word` into declared variable names, preferring longer names.
fn split_into_vars(word: &str, vars: &[String]) -> Option<Vec<usize>> {
    let n = word.len();
    // best[i] = segmentation of word[i..]
    let mut best: Vec<Option<Vec<usize>>> = vec![None; n + 1];
    best[n] = Some(Vec::new());
    for i in (0..n).rev() {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(vars[k].len()));
        for k in order {
            let v = &vars[k];
            if !v.is_empty() && word[i..].starts_with(v.as_str()) {
                if let Some(rest) = &best[i + v.len()] {
                    let mut seg = vec![k];
                    seg.extend(rest);
                    best[i] = Some(seg);
                    break;
                }
            }
        }
    }
    best.swap_remove(0)
}

/// Parse `text` as a polynomial in `variables`.
pub fn parse_polynomial(text: &str, variables: &[String]) -> Result<MultiPoly, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        vars: variables,
        end: text.len(),
    };
    let out = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(syntax(t.position, format!("unexpected `{}`", t.lexeme)));
    }
    Ok(out)
}

fn juxtaposable(vars: &[String]) -> bool {
    vars.iter()
        .all(|v| v.len() == 1 && v.chars().all(|c| c.is_ascii_alphabetic()))
}

fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Deterministic rendering: terms in decreasing graded-lex order, `4bp^3 + 27`
/// style when every variable is a single letter, `*` between factors
/// otherwise.
pub fn format_polynomial(f: &MultiPoly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let glue = if juxtaposable(f.vars()) { "" } else { "*" };
    let mut out = String::new();
    for (k, (m, c)) in f.terms().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(f.vars()[i].clone()),
                _ => factors.push(format!("{}^{}", f.vars()[i], e)),
            }
        }
        let coeff = format_rational(&abs);
        if factors.is_empty() {
            out.push_str(&coeff);
        } else {
            if !abs.is_one() {
                out.push_str(&coeff);
                out.push_str(glue);
            }
            out.push_str(&factors.join(glue));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, vars};

    #[test]
    fn discriminant_numerator() {
        let v = vars(&["a", "b"]);
        let p = parse_polynomial("4a^3+27b^2", &v).unwrap();
        let expected = MultiPoly::from_terms(&v, vec![(vec![3, 0], int(4)), (vec![0, 2], int(27))]);
        assert_eq!(p, expected);
        assert_eq!(format_polynomial(&p), "4a^3 + 27b^2");
    }

    #[test]
    fn zero_and_hand_expansion() {
        let v = vars(&["a", "b"]);
        assert!(parse_polynomial("0", &v).unwrap().is_zero());
        let v = vars(&["q", "u"]);
        let p = parse_polynomial("(4u+27q)q - 4qu", &v).unwrap();
        assert_eq!(p, MultiPoly::from_terms(&v, vec![(vec![2, 0], int(27))]));
    }

    #[test]
    fn precedence_and_associativity() {
        let v = vars(&["x"]);
        // caret binds tighter than unary minus
        assert_eq!(
            parse_polynomial("-x^2", &v).unwrap(),
            -MultiPoly::var(&v, 0).pow(2)
        );
        // right-associative exponent tower 2^3^2 = 2^9
        assert_eq!(
            parse_polynomial("x^2^3", &v).unwrap(),
            MultiPoly::var(&v, 0).pow(8)
        );
        assert_eq!(parse_polynomial("2^3^2", &v).unwrap(), MultiPoly::from_int(&v, 512));
        assert_eq!(parse_polynomial("1/3x - x/1", &v).err().map(|e| e.position()), Some(8));
    }

    #[test]
    fn errors_carry_positions() {
        let v = vars(&["a", "b"]);
        assert_eq!(
            parse_polynomial("a + c", &v),
            Err(ParseError::UnknownVariable {
                name: "c".into(),
                position: 4
            })
        );
        assert_eq!(
            parse_polynomial("a^b", &v),
            Err(ParseError::BadExponent { position: 2 })
        );
        assert_eq!(parse_polynomial("a^1/2", &v), Err(ParseError::BadExponent { position: 2 }));
        assert!(matches!(parse_polynomial("(a+b", &v), Err(ParseError::Syntax { position: 4, .. })));
        assert!(matches!(parse_polynomial("a $ b", &v), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse_polynomial("  ", &v), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn multi_letter_variables_use_stars() {
        let v = vars(&["t1", "q"]);
        let p = parse_polynomial("3t1^2 q - 1/2", &v).unwrap();
        assert_eq!(format_polynomial(&p), "3*t1^2*q - 1/2");
        assert_eq!(parse_polynomial(&format_polynomial(&p), &v).unwrap(), p);
    }

    #[test]
    fn token_positions_increase() {
        let toks = tokenize("4bp^3 + 27/4").unwrap();
        assert!(toks.windows(2).all(|w| w[0].position < w[1].position));
        assert_eq!(toks.last().unwrap().lexeme, "27/4");
    }
}
