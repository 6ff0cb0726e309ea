//! Sylvester resultants by fraction-free (Bareiss) elimination.

use super::{AlgebraError, MultiPoly};

/// Sylvester matrix of `f` and `g` with respect to variable `v`; entries are
/// polynomials not involving `v`.
pub fn sylvester_matrix(f: &MultiPoly, g: &MultiPoly, v: usize) -> Vec<Vec<MultiPoly>> {
    let vars = f.vars();
    let m = f.degree_in(v) as usize;
    let n = g.degree_in(v) as usize;
    let size = m + n;
    let fc = f.coefficients_in(v);
    let gc = g.coefficients_in(v);
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![MultiPoly::zero(vars); size];
        for (k, c) in fc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![MultiPoly::zero(vars); size];
        for (k, c) in gc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Bareiss fraction-free elimination; every intermediate
/// division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<MultiPoly>>) -> Result<MultiPoly, AlgebraError> {
    let n = m.len();
    let vars = match m.first().and_then(|r| r.first()) {
        Some(p) => p.vars().to_vec(),
        None => return Err(AlgebraError::DegenerateResultant),
    };
    let mut negate = false;
    let mut prev = MultiPoly::one(&vars);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(MultiPoly::zero(&vars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .exact_div(&prev)
                    .ok_or(AlgebraError::InternalInvariant("inexact Bareiss step"))?;
            }
            m[i][k] = MultiPoly::zero(&vars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Resultant of `f` and `g` eliminating the variable named `var`.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    let v = f
        .var_index(var)
        .ok_or_else(|| AlgebraError::MissingAssignment(var.to_string()))?;
    resultant_in(f, g, v)
}

pub fn resultant_in(f: &MultiPoly, g: &MultiPoly, v: usize) -> Result<MultiPoly, AlgebraError> {
    if f.is_zero() || g.is_zero() || f.degree_in(v) == 0 || g.degree_in(v) == 0 {
        return Err(AlgebraError::DegenerateResultant);
    }
    bareiss_determinant(sylvester_matrix(f, g, v))
}
