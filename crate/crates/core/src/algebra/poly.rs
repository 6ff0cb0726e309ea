//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Rational};

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographic with the first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in an ordered list of named variables.
///
/// Terms are kept in a `BTreeMap` keyed by graded-lex monomials, zero
/// coefficients are never stored, so two polynomials over the same variable
/// list are equal iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        MultiPoly {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn from_int(vars: &[String], c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(c)))
    }

    /// The `i`-th variable as a polynomial.
    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn var_named(vars: &[String], name: &str) -> Option<Self> {
        vars.iter().position(|v| v == name).map(|i| Self::var(vars, i))
    }

    pub fn monomial(vars: &[String], exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn from_terms<I>(vars: &[String], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// True for zero and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in decreasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Lowest total degree among the terms, i.e. the multiplicity at the origin.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    /// Indices of the variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.involves(i)).collect()
    }

    /// Is this polynomial exactly a single variable, possibly scaled and shifted?
    /// Returns the variable index for `c*x + d` with `c != 0`.
    pub fn as_affine_coordinate(&self) -> Option<usize> {
        let support = self.support();
        if support.len() != 1 || self.total_degree() != Some(1) {
            return None;
        }
        Some(support[0])
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert_eq!(
            self.vars, other.vars,
            "polynomials live in different variable lists"
        );
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Division by a single divisor under the graded-lex order. The remainder
    /// is zero iff `g` divides `self`.
    pub fn div_rem(&self, g: &MultiPoly) -> Result<(MultiPoly, MultiPoly), AlgebraError> {
        self.check_vars(g);
        let (lm, lc) = match g.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(AlgebraError::DivisionByZero),
        };
        let mut q = MultiPoly::zero(&self.vars);
        let mut r = MultiPoly::zero(&self.vars);
        let mut p = self.clone();
        while let Some((m, c)) = p.leading_term() {
            let (m, c) = (m.clone(), c.clone());
            if lm.divides(&m) {
                let qm = m.div(&lm);
                let qc = &c / &lc;
                p = &p - &g.mul_term(&qm, &qc);
                q.add_term(qm, qc);
            } else {
                p.terms.remove(&m);
                r.add_term(m, c);
            }
        }
        Ok((q, r))
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide.
    pub fn exact_div(&self, g: &MultiPoly) -> Option<MultiPoly> {
        match self.div_rem(g) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn divides(&self, f: &MultiPoly) -> bool {
        f.exact_div(self).is_some()
    }

    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut d = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut n = m.clone();
                n.0[i] -= 1;
                d.add_term(n, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        d
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "point dimension");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute a value for one variable, keeping the variable list.
    pub fn eval_var(&self, i: usize, value: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut n = m.clone();
            n.0[i] = 0;
            let v = if e == 0 {
                c.clone()
            } else {
                c * num_traits::pow::pow(value.clone(), e as usize)
            };
            out.add_term(n, v);
        }
        out
    }

    /// Replace every variable by the polynomial at the same position of
    /// `images`; all images must share one variable list.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars(), "one image per variable");
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => return self.clone(),
        };
        let mut cache: Vec<Vec<MultiPoly>> = vec![Vec::new(); images.len()];
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                if powers.is_empty() {
                    powers.push(MultiPoly::one(&target));
                }
                while powers.len() <= e as usize {
                    let next = &powers[powers.len() - 1] * &images[i];
                    powers.push(next);
                }
                t = &t * &powers[e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Substitute by variable name. Every variable of `self` must be assigned.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<String, MultiPoly>,
    ) -> Result<MultiPoly, AlgebraError> {
        let mut images = Vec::with_capacity(self.nvars());
        for v in &self.vars {
            match assignment.get(v) {
                Some(p) => images.push(p.clone()),
                None => return Err(AlgebraError::MissingAssignment(v.clone())),
            }
        }
        if let Some(first) = images.first() {
            if images.iter().any(|p| p.vars != first.vars) {
                return Err(AlgebraError::VariableMismatch);
            }
        } else {
            return Ok(self.clone());
        }
        Ok(self.compose(&images))
    }

    /// Re-express in a different variable list, matching variables by name.
    /// Fails when a variable that occurs in `self` is missing from `vars`.
    pub fn embed(&self, vars: &[String]) -> Result<MultiPoly, AlgebraError> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.vars.iter().enumerate() {
            match vars.iter().position(|w| w == v) {
                Some(j) => map.push(Some(j)),
                None if !self.involves(i) => map.push(None),
                None => return Err(AlgebraError::MissingAssignment(v.clone())),
            }
        }
        let mut out = MultiPoly::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Coefficients with respect to variable `i`: `self = sum c_k * x_i^k`.
    /// Each `c_k` lives in the same variable list and does not involve `x_i`.
    pub fn coefficients_in(&self, i: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![MultiPoly::zero(&self.vars); d + 1];
        if self.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            let k = m.0[i] as usize;
            let mut n = m.clone();
            n.0[i] = 0;
            out[k].add_term(n, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(vars: &[String], i: usize, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = k as u32;
            out = &out + &c.mul_term(&Monomial(e), &Rational::one());
        }
        out
    }

    /// Dense coefficient vector when only variable `i` occurs.
    pub fn to_univariate(&self, i: usize) -> Option<Vec<Rational>> {
        if self.terms.keys().any(|m| {
            m.0.iter()
                .enumerate()
                .any(|(j, &e)| j != i && e > 0)
        }) {
            return None;
        }
        let d = self.degree_in(i) as usize;
        let mut out = vec![Rational::zero(); d + 1];
        for (m, c) in &self.terms {
            out[m.0[i] as usize] = c.clone();
        }
        Some(out)
    }

    pub fn from_univariate(vars: &[String], i: usize, coeffs: &[Rational]) -> MultiPoly {
        let mut out = MultiPoly::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = k as u32;
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Integer scaling factor turning all coefficients into coprime integers
    /// with a positive leading coefficient. Zero maps to zero.
    pub fn primitive(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            num = num.gcd(&(c.numer() * (&den / c.denom())));
        }
        let mut factor = Rational::new(den, num);
        if self.leading_coefficient().is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Monic normalization: leading coefficient one.
    pub fn monic(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading_coefficient()))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -(&self)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::format_polynomial(self))
    }
}
