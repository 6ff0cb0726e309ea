//! Vanishing orders of the weighted sections along boundary divisors, minimal
//! root indices and the rescaled sections on root charts.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{squarefree_part, vanishing_order, AlgebraError, MultiPoly};
use crate::blowup::{Atlas, ChartId, DivisorRecord};

#[derive(Debug, Clone, Error)]
pub enum RootError {
    #[error("divisor {0} is absent from every chart")]
    NoChartAvailable(String),
    #[error("orders of {divisor} disagree: {first:?} in {a}, {second:?} in {b}")]
    ChartDisagreement {
        divisor: String,
        a: String,
        first: Vec<u32>,
        b: String,
        second: Vec<u32>,
    },
    #[error("section {0} is identically zero")]
    ZeroSection(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The weighted projective target `P(w1, ..., wk)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedTarget {
    pub weights: Vec<u32>,
}

impl WeightedTarget {
    pub fn new(weights: Vec<u32>) -> Self {
        assert!(weights.len() >= 2 && weights.iter().all(|&w| w > 0));
        WeightedTarget { weights }
    }

    pub fn generic_stabilizer(&self) -> u32 {
        self.weights.iter().fold(0, |g, &w| g.gcd(&w))
    }

    /// Order of the stabilizer of a point whose nonzero coordinates are `nonzero`.
    pub fn stabilizer_order(&self, nonzero: &[usize]) -> u32 {
        nonzero.iter().fold(0, |g, &i| g.gcd(&self.weights[i]))
    }

    /// For two weights: the stabilizer orders at `[1:0]` and `[0:1]`.
    pub fn coordinate_stabilizers(&self) -> Vec<u32> {
        self.weights.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootIndexResult {
    pub divisor: String,
    pub orders: Vec<u32>,
    pub argmin_set: Vec<usize>,
    pub r: u32,
    pub m: u32,
    pub residual_orders: Vec<u32>,
}

/// Least `r` such that `min_i r*alpha_i/w_i` is an integer, with the twist
/// `m` equal to that minimum.
pub fn minimal_root_index(divisor: &str, orders: &[u32], weights: &[u32]) -> RootIndexResult {
    assert_eq!(orders.len(), weights.len());
    assert!(weights.len() >= 2 && weights.iter().all(|&w| w > 0));
    // compare alpha_i/w_i by cross multiplication
    let mut argmin = vec![0usize];
    for i in 1..orders.len() {
        let j = argmin[0];
        let lhs = orders[i] as u64 * weights[j] as u64;
        let rhs = orders[j] as u64 * weights[i] as u64;
        if lhs < rhs {
            argmin = vec![i];
        } else if lhs == rhs {
            argmin.push(i);
        }
    }
    let r = argmin
        .iter()
        .map(|&j| weights[j] / weights[j].gcd(&orders[j]))
        .min()
        .expect("nonempty argmin");
    let j = argmin[0];
    let m = r * orders[j] / weights[j];
    let residual_orders = orders
        .iter()
        .zip(weights)
        .map(|(&a, &w)| r * a - w * m)
        .collect();
    RootIndexResult {
        divisor: divisor.to_string(),
        orders: orders.to_vec(),
        argmin_set: argmin,
        r,
        m,
        residual_orders,
    }
}

/// Orders of the root-coordinate `sections` along `divisor`, per leaf chart.
pub fn section_orders_per_chart(
    atlas: &Atlas,
    sections: &[MultiPoly],
    divisor: &DivisorRecord,
) -> Result<Vec<(ChartId, Vec<u32>)>, RootError> {
    if let Some(i) = sections.iter().position(|s| s.is_zero()) {
        return Err(RootError::ZeroSection(i));
    }
    let mut out = Vec::new();
    for chart in divisor.leaf_charts(atlas) {
        let c = atlas.chart(chart);
        let eq = squarefree_part(divisor.eq_in(chart).expect("leaf chart"))?;
        let orders = sections
            .iter()
            .map(|s| vanishing_order(&c.pull_from_root(s), &eq))
            .collect::<Result<Vec<_>, _>>()?;
        out.push((chart, orders));
    }
    Ok(out)
}

/// Orders along `divisor`, checked to agree in every leaf chart it meets.
pub fn section_orders(
    atlas: &Atlas,
    sections: &[MultiPoly],
    divisor: &DivisorRecord,
) -> Result<Vec<u32>, RootError> {
    let per = section_orders_per_chart(atlas, sections, divisor)?;
    let Some((c0, first)) = per.first().cloned() else {
        return Err(RootError::NoChartAvailable(divisor.label()));
    };
    for (c, o) in &per[1..] {
        if *o != first {
            return Err(RootError::ChartDisagreement {
                divisor: divisor.label(),
                a: atlas.chart(c0).name(),
                first,
                b: atlas.chart(*c).name(),
                second: o.clone(),
            });
        }
    }
    Ok(first)
}

/// Sections rescaled by `t^(w_i m)` on the root chart `t^r = eq`.
///
/// The sections live in `R[t]/(t^r - eq)` where `R` is the chart ring; the
/// cofactor of `eq^alpha_i` is kept as a polynomial in the chart variables.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledSections {
    pub divisor: String,
    pub chart: ChartId,
    pub root_var: String,
    pub r: u32,
    pub base_eq: MultiPoly,
    /// Polynomials in the chart variables followed by `root_var`.
    pub sections: Vec<MultiPoly>,
    /// Set when `base_eq` is not a coordinate of the chart.
    pub presentation_form: bool,
    pub unit_indices: Vec<usize>,
}

impl RescaledSections {
    /// The relation `t^r - eq` in the extended ring.
    pub fn relation(&self) -> MultiPoly {
        let vars = self.sections[0].vars();
        let t = MultiPoly::var(vars, vars.len() - 1);
        let eq = self.base_eq.embed(vars).expect("chart variables embed");
        &t.pow(self.r) - &eq
    }

    /// Human-readable form with `t` replaced by fractional powers of the base
    /// equation, e.g. `b^(1/3)*p`.
    pub fn display(&self, i: usize) -> String {
        fractional_display(&self.sections[i], &self.base_eq, self.r)
    }
}

fn root_var_name(chart_vars: &[String]) -> String {
    let mut name = "t".to_string();
    while chart_vars.contains(&name) {
        name.push('_');
    }
    name
}

/// Rescale the chart pullbacks of `sections` along `divisor`'s equation in
/// `chart` using a precomputed result.
pub fn rescaled_sections(
    atlas: &Atlas,
    chart: ChartId,
    sections: &[MultiPoly],
    divisor: &DivisorRecord,
    result: &RootIndexResult,
    weights: &[u32],
) -> Result<RescaledSections, RootError> {
    let c = atlas.chart(chart);
    let eq = squarefree_part(
        divisor
            .eq_in(chart)
            .ok_or_else(|| RootError::NoChartAvailable(divisor.label()))?,
    )?;
    let t_name = root_var_name(&c.vars);
    let mut ext = c.vars.clone();
    ext.push(t_name.clone());
    let t = MultiPoly::var(&ext, 2);
    let mut out = Vec::new();
    let mut units = Vec::new();
    for (i, s) in sections.iter().enumerate() {
        let pulled = c.pull_from_root(s);
        let alpha = result.orders[i];
        let cofactor = pulled
            .exact_div(&eq.pow(alpha))
            .ok_or(AlgebraError::InternalInvariant("order does not divide"))?;
        let residual = result.r * alpha - weights[i] * result.m;
        debug_assert_eq!(residual, result.residual_orders[i]);
        if residual == 0 {
            units.push(i);
        }
        let lifted = &t.pow(residual) * &cofactor.embed(&ext)?;
        out.push(lifted);
    }
    Ok(RescaledSections {
        divisor: divisor.label(),
        chart,
        root_var: t_name,
        r: result.r,
        presentation_form: eq.as_affine_coordinate().is_none(),
        base_eq: eq,
        sections: out,
        unit_indices: units,
    })
}

/// Replace `t^e` by `(eq)^(e/r)` in the printed form of `s`.
fn fractional_display(s: &MultiPoly, eq: &MultiPoly, r: u32) -> String {
    let n = s.nvars();
    let base_vars = &s.vars()[..n - 1];
    let eq_text = {
        let e = eq.to_string();
        if eq.num_terms() == 1 && eq.as_affine_coordinate().is_some() {
            e
        } else {
            format!("({e})")
        }
    };
    let mut parts = Vec::new();
    for (mono, coeff) in s.terms() {
        let e = mono.0[n - 1];
        let rest = MultiPoly::monomial(base_vars, mono.0[..n - 1].to_vec(), coeff.clone());
        let root = if e == 0 {
            None
        } else {
            let g = e.gcd(&r);
            Some(if r / g == 1 {
                if e / g == 1 {
                    eq_text.clone()
                } else {
                    format!("{eq_text}^{}", e / g)
                }
            } else {
                format!("{eq_text}^({}/{})", e / g, r / g)
            })
        };
        let text = match root {
            None => rest.to_string(),
            Some(rt) if rest.is_one() => rt,
            Some(rt) => format!("{rt}*{rest}"),
        };
        parts.push(text);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consistency {
    Consistent,
    Inconsistent(Box<RootIndexResult>, Box<RootIndexResult>),
}

/// Two computations of the root data of one divisor must agree.
pub fn crossing_consistency(a: &RootIndexResult, b: &RootIndexResult) -> Consistency {
    if a.r == b.r && a.m == b.m && a.residual_orders == b.residual_orders {
        Consistency::Consistent
    } else {
        Consistency::Inconsistent(Box::new(a.clone()), Box::new(b.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Least r admitting m with every r*a_i - w_i*m >= 0 and one equal to 0.
    fn brute(orders: &[u32], weights: &[u32]) -> (u32, u32) {
        for r in 1..=weights.iter().product::<u32>() {
            let mmax = orders.iter().map(|a| r * a).max().unwrap();
            for m in 0..=mmax {
                let res: Vec<i64> = orders
                    .iter()
                    .zip(weights)
                    .map(|(&a, &w)| (r * a) as i64 - (w * m) as i64)
                    .collect();
                if res.iter().all(|&x| x >= 0) && res.contains(&0) {
                    return (r, m);
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn elliptic_examples() {
        let r = minimal_root_index("E1", &[1, 1], &[4, 6]);
        assert_eq!((r.r, r.m, r.residual_orders.clone()), (6, 1, vec![2, 0]));
        let r = minimal_root_index("E2", &[1, 2], &[4, 6]);
        assert_eq!((r.r, r.m), (4, 1));
        let r = minimal_root_index("E3", &[2, 3], &[4, 6]);
        assert_eq!((r.r, r.m, r.residual_orders.clone()), (2, 1, vec![0, 0]));
        assert_eq!(r.argmin_set, vec![0, 1]);
        let r = minimal_root_index("C", &[0, 7], &[4, 6]);
        assert_eq!((r.r, r.m), (1, 0));
    }

    #[test]
    fn closed_form_matches_small_brute_force() {
        for a in 0..8 {
            for b in 0..8 {
                for w1 in 1..7 {
                    for w2 in 1..7 {
                        let r = minimal_root_index("D", &[a, b], &[w1, w2]);
                        assert_eq!((r.r, r.m), brute(&[a, b], &[w1, w2]), "{a} {b} {w1} {w2}");
                    }
                }
            }
        }
    }

    #[test]
    fn consistency() {
        let a = minimal_root_index("E3", &[2, 3], &[4, 6]);
        assert_eq!(crossing_consistency(&a, &a), Consistency::Consistent);
        let b = minimal_root_index("E3", &[1, 1], &[4, 6]);
        assert!(matches!(crossing_consistency(&a, &b), Consistency::Inconsistent(..)));
    }

    #[test]
    fn generic_stabilizer() {
        assert_eq!(WeightedTarget::new(vec![4, 6]).generic_stabilizer(), 2);
        assert_eq!(WeightedTarget::new(vec![4, 6]).stabilizer_order(&[1]), 6);
    }
}
