//! Multivariate gcd by primitive-part recursion, square-free parts and
//! vanishing orders.

use super::{AlgebraError, MultiPoly};

/// Greatest common divisor, normalized to primitive integer form with a
/// positive leading coefficient. `gcd(f, 0)` is the normalized `f`.
pub fn gcd(f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    if f.is_zero() && g.is_zero() {
        return Err(AlgebraError::UndefinedGcd);
    }
    if f.is_zero() {
        return Ok(g.primitive());
    }
    if g.is_zero() {
        return Ok(f.primitive());
    }
    let active: Vec<usize> = (0..f.nvars()).collect();
    Ok(gcd_rec(f, g, &active).primitive())
}

/// Gcd together with the cofactors `f / gcd` and `g / gcd`.
pub fn gcd_with_cofactors(
    f: &MultiPoly,
    g: &MultiPoly,
) -> Result<(MultiPoly, MultiPoly, MultiPoly), AlgebraError> {
    let d = gcd(f, g)?;
    let cf = f.exact_div(&d).ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
    let cg = g.exact_div(&d).ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
    Ok((d, cf, cg))
}

fn gcd_rec(f: &MultiPoly, g: &MultiPoly, active: &[usize]) -> MultiPoly {
    let vars = f.vars();
    let Some((&v, rest)) = active.split_last() else {
        return MultiPoly::one(vars);
    };
    if !f.involves(v) && !g.involves(v) {
        return gcd_rec(f, g, rest);
    }
    let (cf, pf) = content_and_primitive(f, v, rest);
    let (cg, pg) = content_and_primitive(g, v, rest);
    let c = gcd_rec(&cf, &cg, rest);
    let (pf, pg) = (pf.primitive(), pg.primitive());
    let (mut a, mut b) = if pf.degree_in(v) >= pg.degree_in(v) {
        (pf, pg)
    } else {
        (pg, pf)
    };
    loop {
        if b.degree_in(v) == 0 {
            // primitive of degree zero in v is a unit
            return c;
        }
        let r = pseudo_remainder(&a, &b, v);
        if r.is_zero() {
            return &c * &b;
        }
        let (_, r) = content_and_primitive(&r, v, rest);
        a = b;
        // strip the integer content too, or coefficients grow exponentially
        b = r.primitive();
    }
}

/// Content with respect to `v` (a polynomial in `rest`) and the primitive part.
fn content_and_primitive(f: &MultiPoly, v: usize, rest: &[usize]) -> (MultiPoly, MultiPoly) {
    let mut content: Option<MultiPoly> = None;
    for c in f.coefficients_in(v).into_iter().filter(|c| !c.is_zero()) {
        content = Some(match content {
            None => c.primitive(),
            Some(acc) if acc.is_constant() => acc,
            Some(acc) => gcd_rec(&acc, &c, rest).primitive(),
        });
    }
    let content = content.unwrap_or_else(|| MultiPoly::one(f.vars()));
    let content = if content.is_constant() {
        MultiPoly::one(f.vars())
    } else {
        content
    };
    let prim = f
        .exact_div(&content)
        .expect("content divides its polynomial");
    (content, prim)
}

/// Pseudo-remainder of `a` by `b` with respect to variable `v`.
pub fn pseudo_remainder(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let vars = a.vars();
    let db = b.degree_in(v);
    let lb = b.coefficients_in(v).pop().expect("nonzero divisor");
    let x = MultiPoly::var(vars, v);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v).pop().expect("nonzero remainder");
        r = &(&lb * &r) - &(&(&lr * &x.pow(dr - db)) * b);
    }
    r
}

/// `f / gcd(f, df/dx_1, ..., df/dx_n)`, normalized to primitive form.
pub fn squarefree_part(f: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::UndefinedGcd);
    }
    if f.is_constant() {
        return Ok(MultiPoly::one(f.vars()));
    }
    let mut g = f.clone();
    for i in f.support() {
        g = gcd(&g, &f.derivative(i))?;
        if g.is_constant() {
            break;
        }
    }
    let q = f
        .exact_div(&g)
        .ok_or(AlgebraError::InternalInvariant("square-free gcd does not divide"))?;
    Ok(q.primitive())
}

/// Largest `k` with `g^k | f`.
pub fn vanishing_order(f: &MultiPoly, g: &MultiPoly) -> Result<u32, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::InfiniteOrder);
    }
    if g.is_constant() {
        return Err(AlgebraError::InvalidDivisor);
    }
    let mut k = 0;
    let mut cur = f.clone();
    while let Some(q) = cur.exact_div(g) {
        cur = q;
        k += 1;
    }
    Ok(k)
}

/// Strip every factor shared with `g` from `f`, returning what remains.
pub fn strip_common_factors(f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    let mut cur = f.clone();
    loop {
        let d = gcd(&cur, g)?;
        if d.is_constant() {
            return Ok(cur);
        }
        cur = cur
            .exact_div(&d)
            .ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
    }
}
