//! Rational common zeros of two bivariate polynomials.

use super::univariate;
use super::{gcd, resultant_in, squarefree_part, AlgebraError, MultiPoly, Rational};

/// A rational point of the plane, in the variable order of its chart.
pub type Point = [Rational; 2];

/// Rational common zeros found by elimination. `complete` is false when some
/// eliminant factor has roots that are not rational, so common zeros with
/// irrational coordinates may exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonZeros {
    pub points: Vec<Point>,
    pub complete: bool,
}

impl CommonZeros {
    pub fn empty() -> Self {
        CommonZeros {
            points: Vec::new(),
            complete: true,
        }
    }
}

/// All rational common zeros of `f` and `g` (both in exactly two variables).
///
/// The second variable is eliminated with a resultant (or the first input is
/// used directly when it does not involve it); each rational root of the
/// eliminant is substituted back and the univariate gcd is solved.
pub fn rational_common_zeros(f: &MultiPoly, g: &MultiPoly) -> Result<CommonZeros, AlgebraError> {
    assert_eq!(f.nvars(), 2, "rational_common_zeros expects bivariate input");
    if f.is_zero() || g.is_zero() {
        return Err(AlgebraError::NotZeroDimensional);
    }
    if f.is_constant() || g.is_constant() {
        return Ok(CommonZeros::empty());
    }
    if !gcd(f, g)?.is_constant() {
        return Err(AlgebraError::NotZeroDimensional);
    }
    // same zeros, smaller eliminant
    let f = &squarefree_part(f)?;
    let g = &squarefree_part(g)?;
    let eliminant = match (f.degree_in(1) > 0, g.degree_in(1) > 0) {
        (true, true) => resultant_in(f, g, 1)?,
        (false, _) => f.clone(),
        (true, false) => g.clone(),
    };
    let eliminant = eliminant
        .to_univariate(0)
        .ok_or(AlgebraError::InternalInvariant("eliminant is not univariate"))?;
    if univariate::degree(&eliminant).is_none() {
        return Err(AlgebraError::NotZeroDimensional);
    }
    let xs = univariate::rational_roots(&eliminant);
    let mut complete = univariate::degree(&univariate::squarefree_part(&eliminant)) == Some(xs.len())
        || (xs.is_empty() && univariate::degree(&eliminant) == Some(0));
    let mut points = Vec::new();
    for x0 in xs {
        let fx = f.eval_var(0, &x0).to_univariate(1).expect("bivariate");
        let gx = g.eval_var(0, &x0).to_univariate(1).expect("bivariate");
        let fx = univariate::trim(fx);
        let gx = univariate::trim(gx);
        let h = match (fx.is_empty(), gx.is_empty()) {
            (true, true) => return Err(AlgebraError::NotZeroDimensional),
            (true, false) => gx,
            (false, true) => fx,
            (false, false) => univariate::gcd(&fx, &gx),
        };
        if univariate::degree(&h).unwrap_or(0) == 0 {
            continue;
        }
        let ys = univariate::rational_roots(&h);
        if univariate::degree(&univariate::squarefree_part(&h)) != Some(ys.len()) {
            complete = false;
        }
        for y0 in ys {
            points.push([x0.clone(), y0]);
        }
    }
    points.sort();
    Ok(CommonZeros { points, complete })
}

/// Rational common zeros of `f` and `g` on the line where the first
/// coordinate vanishes. The two may not share a component.
pub fn rational_common_zeros_on_axis(f: &MultiPoly, g: &MultiPoly) -> Result<CommonZeros, AlgebraError> {
    let zero = Rational::from_integer(0.into());
    let restrict = |p: &MultiPoly| univariate::trim(p.eval_var(0, &zero).to_univariate(1).expect("bivariate"));
    let (f0, g0) = (restrict(f), restrict(g));
    let h = match (f0.is_empty(), g0.is_empty()) {
        (true, true) => return Err(AlgebraError::NotZeroDimensional),
        (true, false) => g0,
        (false, true) => f0,
        (false, false) => univariate::gcd(&f0, &g0),
    };
    if univariate::degree(&h).unwrap_or(0) == 0 {
        return Ok(CommonZeros::empty());
    }
    let ys = univariate::rational_roots(&h);
    let complete = univariate::degree(&univariate::squarefree_part(&h)) == Some(ys.len());
    let points = ys.into_iter().map(|y| [zero.clone(), y]).collect();
    Ok(CommonZeros { points, complete })
}
