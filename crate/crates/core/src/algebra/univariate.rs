//! Dense univariate helpers over the rationals: Euclidean gcd, square-free
//! parts and exact rational root isolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Coefficients in increasing degree; the zero polynomial is the empty vector.
pub type UniPoly = Vec<Rational>;

pub fn trim(mut p: UniPoly) -> UniPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn derivative(p: &[Rational]) -> UniPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
            .collect(),
    )
}

pub fn div_rem(a: &[Rational], b: &[Rational]) -> (UniPoly, UniPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lb = b[db].clone();
    let mut r = trim(a.to_vec());
    let mut q = vec![Rational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lb;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            r[shift + i] -= &c * bc;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(p: UniPoly) -> UniPoly {
    match p.last() {
        Some(l) => {
            let l = l.clone();
            p.into_iter().map(|c| c / &l).collect()
        }
        None => p,
    }
}

pub fn gcd(a: &[Rational], b: &[Rational]) -> UniPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// Product of the distinct irreducible factors, monic.
pub fn squarefree_part(p: &[Rational]) -> UniPoly {
    let p = trim(p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return monic(p);
    }
    let g = gcd(&p, &derivative(&p));
    monic(div_rem(&p, &g).0)
}

/// Number of sign changes of a Sturm sequence at `x`, zeros skipped.
fn sign_changes(seq: &[UniPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in seq {
        let v = eval(s, x);
        let sg = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if sg != 0 {
            if last != 0 && sg != last {
                count += 1;
            }
            last = sg;
        }
    }
    count
}

fn sturm_sequence(p: &[Rational]) -> Vec<UniPoly> {
    let mut seq = vec![p.to_vec(), derivative(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let (_, r) = div_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

/// All rational roots of a nonzero polynomial, sorted and without repetition.
///
/// The square-free part is scaled to a monic integer polynomial in `y = lc*x`,
/// whose rational roots are integers; those are isolated with Sturm counts on
/// integer-endpoint intervals and tested exactly.
pub fn rational_roots(p: &[Rational]) -> Vec<Rational> {
    let sf = squarefree_part(p);
    let n = match degree(&sf) {
        Some(n) if n >= 1 => n,
        _ => return Vec::new(),
    };
    // integer coefficients
    let mut den = BigInt::one();
    for c in &sf {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = sf.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let lead = ints[n].clone();
    // g(y) = lead^(n-1) * f(y / lead), monic with integer coefficients
    let mut g = Vec::with_capacity(n + 1);
    let mut pw = BigInt::one();
    for i in (0..=n).rev() {
        if i == n {
            g.push(BigInt::one());
        } else {
            g.push(&ints[i] * &pw);
            pw *= &lead;
        }
    }
    g.reverse();
    let g: UniPoly = g.into_iter().map(Rational::from_integer).collect();
    let bound = g
        .iter()
        .take(n)
        .map(|c| c.abs().ceil().to_integer())
        .max()
        .unwrap_or_else(BigInt::zero)
        + BigInt::one();
    let seq = sturm_sequence(&g);
    let mut roots = Vec::new();
    isolate_integer_roots(&g, &seq, -&bound - BigInt::one(), bound, &mut roots);
    let lead = Rational::from_integer(lead);
    let mut out: Vec<Rational> = roots.into_iter().map(|y| Rational::from_integer(y) / &lead).collect();
    out.sort();
    out.dedup();
    out
}

// Integer roots of `g` in the half-open interval (lo, hi].
fn isolate_integer_roots(
    g: &[Rational],
    seq: &[UniPoly],
    lo: BigInt,
    hi: BigInt,
    out: &mut Vec<BigInt>,
) {
    let lo_r = Rational::from_integer(lo.clone());
    let hi_r = Rational::from_integer(hi.clone());
    let count = sign_changes(seq, &lo_r).saturating_sub(sign_changes(seq, &hi_r));
    if count == 0 {
        return;
    }
    let width = &hi - &lo;
    if width <= BigInt::from(8) {
        let mut k = &lo + BigInt::one();
        while k <= hi {
            if eval(g, &Rational::from_integer(k.clone())).is_zero() {
                out.push(k.clone());
            }
            k += BigInt::one();
        }
        return;
    }
    let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
    isolate_integer_roots(g, seq, lo, mid.clone(), out);
    isolate_integer_roots(g, seq, mid, hi, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly(cs: &[i64]) -> UniPoly {
        cs.iter().map(|&c| q(c, 1)).collect()
    }

    #[test]
    fn roots_of_product_of_linear_factors() {
        // (2x - 1)(x + 3)(x - 5)^2 = expanded by hand
        // (2x-1)(x+3) = 2x^2 + 5x - 3 ; (x-5)^2 = x^2 - 10x + 25
        let a = poly(&[-3, 5, 2]);
        let b = poly(&[25, -10, 1]);
        let mut p = vec![Rational::zero(); 5];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        assert_eq!(rational_roots(&p), vec![q(-3, 1), q(1, 2), q(5, 1)]);
    }

    #[test]
    fn irrational_roots_are_not_reported() {
        assert!(rational_roots(&poly(&[-2, 0, 1])).is_empty());
        assert!(rational_roots(&poly(&[1, 0, 1])).is_empty());
    }

    #[test]
    fn root_at_zero_and_large_root() {
        // x * (x - 1000003)
        assert_eq!(
            rational_roots(&poly(&[0, -1000003, 1])),
            vec![q(0, 1), q(1000003, 1)]
        );
    }

    #[test]
    fn squarefree_and_gcd() {
        let p = poly(&[0, 0, 1]); // x^2
        assert_eq!(squarefree_part(&p), poly(&[0, 1]));
        assert_eq!(gcd(&poly(&[-1, 0, 1]), &poly(&[1, 1])), poly(&[1, 1]));
    }
}
