//! Chart atlases of iterated point blow-ups of the affine plane, and the
//! total/strict transform bookkeeping of tracked divisors.
//!
//! Blowing up chart `(X, Y)` at `(c1, c2)` with a fresh pair of names
//! `(n1, n2)` produces two children:
//!
//! * the X-kept chart `(X, n2)` with `X ↦ c1 + X`, `Y ↦ c2 + X·n2`,
//! * the Y-kept chart `(Y, n1)` with `X ↦ c1 + Y·n1`, `Y ↦ c2 + Y`.
//!
//! In both children the exceptional curve is the first coordinate. Children
//! are appended to the end of the leaf list, so the leaf order is the order of
//! creation. A blown-up center that is also visible in another leaf chart is
//! recorded there as a puncture.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{vanishing_order, AlgebraError, MultiPoly, Point, Rational};

pub type ChartId = usize;

const NAME_PAIRS: [(&str, &str); 3] = [("p", "q"), ("u", "v"), ("r", "s")];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowUpError {
    #[error("unknown chart {0}")]
    UnknownChart(String),
    #[error("chart {0} was already blown up")]
    AlreadyBlownUp(String),
    #[error("point is not in chart {0}")]
    PointNotInChart(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("transition mismatch between charts {0} and {1}")]
    TransitionMismatch(String, String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug)]
pub struct ChartLink {
    pub parent: ChartId,
    /// Images of the parent's two coordinates in this chart's coordinates.
    pub substitution: [MultiPoly; 2],
    /// 0 for the X-kept child, 1 for the Y-kept child.
    pub kept: usize,
    pub blowup: usize,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub id: ChartId,
    pub vars: Vec<String>,
    pub link: Option<ChartLink>,
    /// Images of the root coordinates in this chart's coordinates.
    pub to_root: [MultiPoly; 2],
    pub children: Option<[ChartId; 2]>,
    pub blown_at: Option<Point>,
    pub punctures: Vec<Point>,
}

impl Chart {
    pub fn name(&self) -> String {
        format!("({})", self.vars.join(","))
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Pull a polynomial in the parent's coordinates back to this chart.
    pub fn pull_from_parent(&self, f: &MultiPoly) -> Option<MultiPoly> {
        self.link.as_ref().map(|l| f.compose(&l.substitution))
    }

    /// Strict transform of a parent-chart polynomial together with the order
    /// of its pullback along the exceptional coordinate.
    pub fn strict_from_parent(&self, f: &MultiPoly) -> Option<(MultiPoly, u32)> {
        let total = self.pull_from_parent(f)?;
        let k = total.terms().map(|(m, _)| m.0[0]).min()?;
        let strict = MultiPoly::from_terms(
            &self.vars,
            total.terms().map(|(m, c)| {
                let mut e = m.0.clone();
                e[0] -= k;
                (e, c.clone())
            }),
        );
        Some((strict, k))
    }

    pub fn pull_from_root(&self, f: &MultiPoly) -> MultiPoly {
        f.compose(&self.to_root)
    }

    /// The exceptional coordinate of the blow-up that created this chart.
    pub fn exceptional_coordinate(&self) -> MultiPoly {
        MultiPoly::var(&self.vars, 0)
    }
}

#[derive(Clone, Debug)]
pub struct BlowUpRecord {
    pub chart: ChartId,
    pub center: Point,
    pub exceptional: String,
    pub children: [ChartId; 2],
}

/// Tree of charts with the blow-up history.
#[derive(Clone, Debug)]
pub struct Atlas {
    charts: Vec<Chart>,
    leaves: Vec<ChartId>,
    history: Vec<BlowUpRecord>,
    next_pair: usize,
}

impl Atlas {
    /// The affine plane with coordinates `vars` as a single root chart.
    pub fn new(vars: &[String]) -> Self {
        assert_eq!(vars.len(), 2, "the base is the affine plane");
        let to_root = [MultiPoly::var(vars, 0), MultiPoly::var(vars, 1)];
        Atlas {
            charts: vec![Chart {
                id: 0,
                vars: vars.to_vec(),
                link: None,
                to_root,
                children: None,
                blown_at: None,
                punctures: Vec::new(),
            }],
            leaves: vec![0],
            history: Vec::new(),
            next_pair: 0,
        }
    }

    pub fn root(&self) -> &Chart {
        &self.charts[0]
    }

    pub fn chart(&self, id: ChartId) -> &Chart {
        &self.charts[id]
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart_by_name(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name() == name)
    }

    /// Current covering charts, oldest first.
    pub fn leaves(&self) -> &[ChartId] {
        &self.leaves
    }

    pub fn history(&self) -> &[BlowUpRecord] {
        &self.history
    }

    fn used_names(&self) -> Vec<&str> {
        self.charts
            .iter()
            .flat_map(|c| c.vars.iter().map(String::as_str))
            .collect()
    }

    fn fresh_pair(&mut self) -> (String, String) {
        loop {
            let k = self.next_pair;
            self.next_pair += 1;
            let (a, b) = NAME_PAIRS[k % NAME_PAIRS.len()];
            let round = k / NAME_PAIRS.len();
            let (a, b) = if round == 0 {
                (a.to_string(), b.to_string())
            } else {
                (format!("{a}{round}"), format!("{b}{round}"))
            };
            let used = self.used_names();
            if !used.contains(&a.as_str()) && !used.contains(&b.as_str()) {
                return (a, b);
            }
        }
    }

    /// Blow up leaf `chart` at the rational point `center`; returns the index
    /// of the new history record.
    pub fn blow_up(
        &mut self,
        chart: ChartId,
        center: &Point,
        exceptional: &str,
    ) -> Result<usize, BlowUpError> {
        let parent = self
            .charts
            .get(chart)
            .ok_or_else(|| BlowUpError::UnknownChart(chart.to_string()))?
            .clone();
        if !parent.is_leaf() {
            return Err(BlowUpError::AlreadyBlownUp(parent.name()));
        }
        if parent.punctures.contains(center) {
            return Err(BlowUpError::PointNotInChart(parent.name()));
        }
        // other leaves that see the same point get punctured
        let elsewhere: Vec<(ChartId, Point)> = self
            .locate(chart, center)
            .into_iter()
            .filter(|(c, _)| *c != chart)
            .collect();

        let (n1, n2) = self.fresh_pair();
        let (x, y) = (parent.vars[0].clone(), parent.vars[1].clone());
        let [c1, c2] = center.clone();
        let blowup = self.history.len();

        let xk_vars = vec![x.clone(), n2];
        let xk = {
            let xv = MultiPoly::var(&xk_vars, 0);
            let nv = MultiPoly::var(&xk_vars, 1);
            [
                &MultiPoly::constant(&xk_vars, c1.clone()) + &xv,
                &MultiPoly::constant(&xk_vars, c2.clone()) + &(&xv * &nv),
            ]
        };
        let yk_vars = vec![y.clone(), n1];
        let yk = {
            let yv = MultiPoly::var(&yk_vars, 0);
            let nv = MultiPoly::var(&yk_vars, 1);
            [
                &MultiPoly::constant(&yk_vars, c1.clone()) + &(&yv * &nv),
                &MultiPoly::constant(&yk_vars, c2.clone()) + &yv,
            ]
        };

        let mut ids = [0; 2];
        for (kept, (vars, subst)) in [(xk_vars, xk), (yk_vars, yk)].into_iter().enumerate() {
            let id = self.charts.len();
            let to_root = [
                parent.to_root[0].compose(&subst),
                parent.to_root[1].compose(&subst),
            ];
            let punctures = parent
                .punctures
                .iter()
                .filter_map(|p| lift_point(p, center, kept, None))
                .collect();
            self.charts.push(Chart {
                id,
                vars,
                link: Some(ChartLink {
                    parent: chart,
                    substitution: subst,
                    kept,
                    blowup,
                }),
                to_root,
                children: None,
                blown_at: None,
                punctures,
            });
            ids[kept] = id;
        }
        let p = &mut self.charts[chart];
        p.children = Some(ids);
        p.blown_at = Some(center.clone());
        self.leaves.retain(|&l| l != chart);
        self.leaves.extend(ids);
        for (c, pt) in elsewhere {
            if !self.charts[c].punctures.contains(&pt) {
                self.charts[c].punctures.push(pt);
            }
        }
        self.history.push(BlowUpRecord {
            chart,
            center: center.clone(),
            exceptional: exceptional.to_string(),
            children: ids,
        });
        Ok(blowup)
    }

    /// Every leaf chart containing the point `point` of chart `chart`,
    /// with the point's coordinates there.
    pub fn locate(&self, chart: ChartId, point: &Point) -> Vec<(ChartId, Point)> {
        let mut directions: HashMap<ChartId, [Rational; 2]> = HashMap::new();
        let mut cur = chart;
        let mut pt = point.clone();
        while let Some(link) = &self.charts[cur].link {
            if pt[0].is_zero() {
                let dir = if link.kept == 0 {
                    [Rational::one(), pt[1].clone()]
                } else {
                    [pt[1].clone(), Rational::one()]
                };
                directions.insert(link.parent, dir);
            }
            pt = [
                link.substitution[0].eval(&pt),
                link.substitution[1].eval(&pt),
            ];
            cur = link.parent;
        }
        let mut out = Vec::new();
        self.descend(cur, pt, &directions, &mut out);
        out.sort_by_key(|(c, _)| self.leaves.iter().position(|l| l == c));
        out
    }

    fn descend(
        &self,
        node: ChartId,
        pt: Point,
        directions: &HashMap<ChartId, [Rational; 2]>,
        out: &mut Vec<(ChartId, Point)>,
    ) {
        let c = &self.charts[node];
        let (Some(children), Some(center)) = (c.children, c.blown_at.as_ref()) else {
            if !c.punctures.contains(&pt) {
                out.push((node, pt));
            }
            return;
        };
        for (kept, &child) in children.iter().enumerate() {
            if let Some(q) = lift_point(&pt, center, kept, directions.get(&node)) {
                self.descend(child, q, directions, out);
            }
        }
    }

    /// The first leaf (in leaf order) containing the point, with coordinates.
    pub fn owner(&self, chart: ChartId, point: &Point) -> Option<(ChartId, Point)> {
        self.locate(chart, point).into_iter().next()
    }

    /// Is `point` of leaf `chart` a genuine point of the current surface
    /// (not a puncture)?
    pub fn contains(&self, chart: ChartId, point: &Point) -> bool {
        self.charts[chart].is_leaf() && !self.charts[chart].punctures.contains(point)
    }
}

/// Coordinates of `pt` (parent coordinates) in the child `kept` of a blow-up
/// at `center`; `direction` resolves points on the exceptional curve.
pub fn lift_point(
    pt: &Point,
    center: &Point,
    kept: usize,
    direction: Option<&[Rational; 2]>,
) -> Option<Point> {
    let dx = &pt[0] - &center[0];
    let dy = &pt[1] - &center[1];
    let (main, other) = if kept == 0 { (dx, dy) } else { (dy, dx) };
    if main.is_zero() && other.is_zero() {
        let dir = direction?;
        let (dm, do_) = if kept == 0 {
            (&dir[0], &dir[1])
        } else {
            (&dir[1], &dir[0])
        };
        if dm.is_zero() {
            return None;
        }
        return Some([Rational::zero(), do_ / dm]);
    }
    if main.is_zero() {
        return None;
    }
    let slope = &other / &main;
    Some([main, slope])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DivisorKind {
    /// Zero locus of a coarse section or a fixed component supplied by the job.
    User,
    Exceptional,
}

/// A tracked divisor: its defining section in every chart it meets (retired
/// charts included) and the multiplicity of each exceptional in its total
/// transform.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorRecord {
    pub base: String,
    pub primes: usize,
    pub kind: DivisorKind,
    pub local_eq: BTreeMap<ChartId, MultiPoly>,
    /// (history index, multiplicity of that blow-up's exceptional)
    pub multiplicities: Vec<(usize, u32)>,
}

impl DivisorRecord {
    pub fn user(base: &str, root_eq: MultiPoly) -> Self {
        let mut local_eq = BTreeMap::new();
        if !root_eq.is_constant() {
            local_eq.insert(0, root_eq);
        }
        DivisorRecord {
            base: base.to_string(),
            primes: 0,
            kind: DivisorKind::User,
            local_eq,
            multiplicities: Vec::new(),
        }
    }

    /// The exceptional divisor of history record `blowup`.
    pub fn exceptional(atlas: &Atlas, blowup: usize) -> Self {
        let rec = &atlas.history()[blowup];
        let local_eq = rec
            .children
            .iter()
            .map(|&c| (c, atlas.chart(c).exceptional_coordinate()))
            .collect();
        DivisorRecord {
            base: rec.exceptional.clone(),
            primes: 0,
            kind: DivisorKind::Exceptional,
            local_eq,
            multiplicities: Vec::new(),
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.base, "'".repeat(self.primes))
    }

    pub fn eq_in(&self, chart: ChartId) -> Option<&MultiPoly> {
        self.local_eq.get(&chart)
    }

    /// Leaf charts of `atlas` the divisor meets.
    pub fn leaf_charts<'a>(&'a self, atlas: &'a Atlas) -> impl Iterator<Item = ChartId> + 'a {
        atlas
            .leaves()
            .iter()
            .copied()
            .filter(|c| self.local_eq.contains_key(c))
    }

    pub fn multiplicity_at(&self, blowup: usize) -> Option<u32> {
        self.multiplicities
            .iter()
            .find(|(b, _)| *b == blowup)
            .map(|(_, m)| *m)
    }
}

/// Apply history record `blowup` of `atlas` to `d`: pull back its equation
/// from the blown-up chart to both children, split off the exceptional
/// factor and keep the exact quotient as the strict transform.
pub fn transform_divisor(
    atlas: &Atlas,
    d: &DivisorRecord,
    blowup: usize,
) -> Result<DivisorRecord, BlowUpError> {
    let rec = &atlas.history()[blowup];
    let mut out = d.clone();
    out.primes += 1;
    let Some(f) = d.local_eq.get(&rec.chart) else {
        out.multiplicities.push((blowup, 0));
        return Ok(out);
    };
    let mut mult = None;
    for &child in &rec.children {
        let ch = atlas.chart(child);
        let total = ch
            .pull_from_parent(f)
            .ok_or_else(|| BlowUpError::InternalInvariantViolation("child without parent".into()))?;
        if total.is_zero() {
            return Err(BlowUpError::InternalInvariantViolation(format!(
                "pullback of {} vanishes identically in {}",
                d.label(),
                ch.name()
            )));
        }
        let e = ch.exceptional_coordinate();
        let k = vanishing_order(&total, &e)?;
        let strict = total
            .exact_div(&e.pow(k))
            .ok_or_else(|| BlowUpError::InternalInvariantViolation("inexact strict transform".into()))?;
        match mult {
            None => mult = Some(k),
            Some(m) if m != k => {
                return Err(BlowUpError::InternalInvariantViolation(format!(
                    "{} has multiplicities {m} and {k} in the two charts",
                    d.label()
                )))
            }
            _ => {}
        }
        if !strict.is_constant() {
            out.local_eq.insert(child, strict);
        }
    }
    out.multiplicities.push((blowup, mult.unwrap_or(0)));
    Ok(out)
}

/// Check `total = strict * exceptional^multiplicity` for one blow-up in both
/// children; returns the failing chart, if any.
pub fn verify_transform(
    atlas: &Atlas,
    d: &DivisorRecord,
    blowup: usize,
) -> Result<(), BlowUpError> {
    let rec = &atlas.history()[blowup];
    let Some(f) = d.local_eq.get(&rec.chart) else {
        return Ok(());
    };
    let k = d.multiplicity_at(blowup).unwrap_or(0);
    for &child in &rec.children {
        let ch = atlas.chart(child);
        let total = ch.pull_from_parent(f).expect("child chart");
        let e = ch.exceptional_coordinate().pow(k);
        let strict = match d.local_eq.get(&child) {
            Some(s) => s.clone(),
            None => match total.exact_div(&e) {
                // absent: only a nonzero constant may remain
                Some(q) if q.is_constant() && !q.is_zero() => q,
                _ => {
                    return Err(BlowUpError::InternalInvariantViolation(format!(
                        "{} should be absent from {}",
                        d.label(),
                        ch.name()
                    )))
                }
            },
        };
        let rebuilt = &strict * &e;
        if rebuilt != total {
            return Err(BlowUpError::InternalInvariantViolation(format!(
                "total transform of {} differs in {}",
                d.label(),
                ch.name()
            )));
        }
    }
    Ok(())
}

/// Comparison of a divisor's equations on the overlap of two sibling charts:
/// on the overlap `eq_Y = unit_coefficient * n^unit_exponent * eq_X`, where `n`
/// is the new coordinate of the X-kept chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionReport {
    pub blowup: usize,
    pub charts: (String, String),
    pub unit_coefficient: Rational,
    pub unit_exponent: i64,
    pub unit_variable: String,
}

/// Verify that the equations of `d` in every pair of sibling charts agree up
/// to a monomial unit on their overlap.
pub fn check_transitions(
    atlas: &Atlas,
    d: &DivisorRecord,
) -> Result<Vec<TransitionReport>, BlowUpError> {
    let mut out = Vec::new();
    for (idx, rec) in atlas.history().iter().enumerate() {
        let [xk, yk] = rec.children;
        let (Some(f), Some(g)) = (d.local_eq.get(&xk), d.local_eq.get(&yk)) else {
            continue;
        };
        let xc = atlas.chart(xk);
        let yc = atlas.chart(yk);
        let mismatch = || BlowUpError::TransitionMismatch(xc.name(), yc.name());
        // y = x*n2 and n1 = 1/n2, cleared by n2^N with N = deg_{n1} g
        let big_n = g.degree_in(1);
        let x = MultiPoly::var(&xc.vars, 0);
        let n2 = MultiPoly::var(&xc.vars, 1);
        let mut cleared = MultiPoly::zero(&xc.vars);
        for (m, c) in g.terms() {
            let (i, j) = (m.0[0], m.0[1]);
            let term = &(&(&x * &n2).pow(i) * &n2.pow(big_n - j)).scale(c);
            cleared = &cleared + term;
        }
        let (unit, sign) = if let Some(q) = cleared.exact_div(f) {
            (q, 1i64)
        } else if let Some(q) = f.exact_div(&cleared) {
            (q, -1i64)
        } else {
            return Err(mismatch());
        };
        if unit.num_terms() != 1 || unit.involves(0) {
            return Err(mismatch());
        }
        let (m, c) = unit.leading_term().expect("nonzero unit");
        let (c, e) = if sign == 1 {
            (c.clone(), m.0[1] as i64)
        } else {
            (Rational::one() / c, -(m.0[1] as i64))
        };
        out.push(TransitionReport {
            blowup: idx,
            charts: (xc.name(), yc.name()),
            unit_coefficient: c,
            unit_exponent: e - big_n as i64,
            unit_variable: xc.vars[1].clone(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, vars};
    use crate::parser::parse_polynomial;

    fn origin() -> Point {
        [int(0), int(0)]
    }

    fn poly(s: &str, chart: &Chart) -> MultiPoly {
        parse_polynomial(s, &chart.vars).unwrap()
    }

    #[test]
    fn first_blow_up_charts() {
        let mut atlas = Atlas::new(&vars(&["a", "b"]));
        atlas.blow_up(0, &origin(), "E1").unwrap();
        let names: Vec<String> = atlas.leaves().iter().map(|&c| atlas.chart(c).name()).collect();
        assert_eq!(names, vec!["(a,q)", "(b,p)"]);
        let aq = atlas.chart_by_name("(a,q)").unwrap();
        assert_eq!(aq.to_root[1], poly("aq", aq));
        let bp = atlas.chart_by_name("(b,p)").unwrap();
        assert_eq!(bp.to_root[0], poly("bp", bp));
        let e1 = DivisorRecord::exceptional(&atlas, 0);
        assert_eq!(e1.eq_in(aq.id).unwrap(), &poly("a", aq));
        assert_eq!(e1.eq_in(bp.id).unwrap(), &poly("b", bp));
    }

    #[test]
    fn divisor_away_from_center_is_untouched() {
        let v = vars(&["a", "b"]);
        let mut atlas = Atlas::new(&v);
        let d = DivisorRecord::user("L", parse_polynomial("a - 1", &v).unwrap());
        atlas.blow_up(0, &origin(), "E1").unwrap();
        let t = transform_divisor(&atlas, &d, 0).unwrap();
        assert_eq!(t.multiplicity_at(0), Some(0));
        let aq = atlas.chart_by_name("(a,q)").unwrap();
        assert_eq!(t.eq_in(aq.id).unwrap(), &poly("a - 1", aq));
        verify_transform(&atlas, &t, 0).unwrap();
    }

    #[test]
    fn locate_sees_overlaps_and_punctures() {
        let v = vars(&["a", "b"]);
        let mut atlas = Atlas::new(&v);
        atlas.blow_up(0, &origin(), "E1").unwrap();
        let aq = atlas.chart_by_name("(a,q)").unwrap().id;
        let bp = atlas.chart_by_name("(b,p)").unwrap().id;
        // (a,q) = (2, 3) is (a,b) = (2, 6), i.e. (b,p) = (6, 1/3)
        let found = atlas.locate(aq, &[int(2), int(3)]);
        assert_eq!(
            found,
            vec![(aq, [int(2), int(3)]), (bp, [int(6), crate::algebra::ratio(1, 3)])]
        );
        // on the exceptional curve, slope 2
        let found = atlas.locate(aq, &[int(0), int(2)]);
        assert_eq!(found.len(), 2);
        assert_eq!(found[1], (bp, [int(0), crate::algebra::ratio(1, 2)]));
        // blow up that point in (a,q): (b,p) gets a puncture
        atlas.blow_up(aq, &[int(0), int(2)], "E2").unwrap();
        assert_eq!(atlas.chart(bp).punctures, vec![[int(0), crate::algebra::ratio(1, 2)]]);
        // the punctured point was replaced by a whole exceptional curve
        assert!(atlas.locate(bp, &[int(0), crate::algebra::ratio(1, 2)]).is_empty());
        assert!(!atlas.contains(bp, &[int(0), crate::algebra::ratio(1, 2)]));
    }

    #[test]
    fn duplicate_blow_up_is_rejected() {
        let mut atlas = Atlas::new(&vars(&["a", "b"]));
        atlas.blow_up(0, &origin(), "E1").unwrap();
        assert!(matches!(
            atlas.blow_up(0, &origin(), "E2"),
            Err(BlowUpError::AlreadyBlownUp(_))
        ));
        assert!(matches!(
            atlas.blow_up(17, &origin(), "E2"),
            Err(BlowUpError::UnknownChart(_))
        ));
    }

    #[test]
    fn translated_center() {
        let v = vars(&["x", "y"]);
        let mut atlas = Atlas::new(&v);
        let d = DivisorRecord::user("D", parse_polynomial("y - x^2 + 2x - 1 - 3", &v).unwrap());
        // the parabola y = (x-1)^2 + 3 passes through (1, 3) with tangent slope 0
        atlas.blow_up(0, &[int(1), int(3)], "E1").unwrap();
        let t = transform_divisor(&atlas, &d, 0).unwrap();
        assert_eq!(t.multiplicity_at(0), Some(1));
        let xq = atlas.chart_by_name("(x,q)").unwrap();
        assert_eq!(t.eq_in(xq.id).unwrap(), &poly("q - x", xq));
        verify_transform(&atlas, &t, 0).unwrap();
    }
}
