//! Simple normal crossings certification and the embedded-resolution loop.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    gcd, rational_common_zeros, rational_common_zeros_on_axis, squarefree_part, univariate,
    AlgebraError, CommonZeros, MultiPoly, Point, Rational,
};
use crate::blowup::{lift_point, transform_divisor, Atlas, BlowUpError, ChartId, DivisorRecord};

pub const DEFAULT_MAX_STEPS: usize = 32;

#[derive(Debug, Clone, Error)]
pub enum SncError {
    #[error("no SNC configuration within {steps} blow-ups")]
    ResolutionBudgetExceeded { steps: usize, last: Box<SncReport> },
    #[error("the configuration may fail to be SNC only at non-rational points")]
    NonRationalCenter { last: Box<SncReport> },
    #[error(transparent)]
    BlowUp(#[from] BlowUpError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub fn format_point(p: &Point) -> String {
    format!("({}, {})", fmt_q(&p[0]), fmt_q(&p[1]))
}

fn fmt_q(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: String,
    pub point: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub label: String,
    pub smooth: bool,
    pub singular_points: Vec<ChartPoint>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingPoint {
    pub chart: String,
    pub point: String,
    pub transverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub labels: (String, String),
    pub points: Vec<CrossingPoint>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriplePoint {
    pub chart: String,
    pub point: String,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reasons")]
pub enum SncVerdict {
    #[serde(rename = "SNC")]
    Snc,
    #[serde(rename = "NotSNC")]
    NotSnc(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SncReport {
    pub components: Vec<ComponentReport>,
    pub crossings: Vec<CrossingReport>,
    pub triple_points: Vec<TriplePoint>,
    pub verdict: SncVerdict,
}

impl SncReport {
    pub fn is_snc(&self) -> bool {
        self.verdict == SncVerdict::Snc
    }
}

/// A point where the configuration fails to be SNC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub chart: ChartId,
    pub point: Point,
    pub reason: String,
}

/// A transverse intersection of two boundary components, as found by [`is_snc`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub chart: ChartId,
    pub point: Point,
    /// Indices into the divisor list.
    pub divisors: (usize, usize),
}

/// Everything [`is_snc`] computes, with chart ids kept for further use.
#[derive(Clone, Debug)]
pub struct SncAnalysis {
    pub report: SncReport,
    pub witnesses: Vec<Witness>,
    pub crossings: Vec<Crossing>,
}

/// Rational singular points of the reduced curve `f = 0`.
pub fn singular_points(f: &MultiPoly) -> Result<CommonZeros, AlgebraError> {
    if f.is_constant() {
        return Ok(CommonZeros::empty());
    }
    let fx = f.derivative(0);
    let fy = f.derivative(1);
    if fx.is_zero() || fy.is_zero() {
        // a square-free polynomial in one variable defines parallel smooth lines
        return Ok(CommonZeros::empty());
    }
    let g = gcd(f, &fx)?;
    if g.is_constant() {
        let mut z = rational_common_zeros(f, &fx)?;
        z.points.retain(|p| fy.eval(p) == Rational::from_integer(0.into()));
        return Ok(z);
    }
    // g collects the factors of f not involving x; on them the gradient of
    // f = g*h is g'(y)*h*dy, so the singular points there are g = h = 0.
    let h = f
        .exact_div(&g)
        .ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
    let mut out = singular_points(&h)?;
    if !h.is_constant() {
        let meet = rational_common_zeros(&g, &h)?;
        out.points.extend(meet.points);
        out.complete &= meet.complete;
    }
    out.points.sort();
    out.points.dedup();
    Ok(out)
}

fn jacobian_det(f: &MultiPoly, g: &MultiPoly, p: &Point) -> Rational {
    f.derivative(0).eval(p) * g.derivative(1).eval(p) - f.derivative(1).eval(p) * g.derivative(0).eval(p)
}

/// Is the root-coordinate image of `point` inside one of the excluded loci?
pub fn is_excluded(atlas: &Atlas, chart: ChartId, point: &Point, exclude: &[MultiPoly]) -> bool {
    if exclude.is_empty() {
        return false;
    }
    let c = atlas.chart(chart);
    let root = [c.to_root[0].eval(point), c.to_root[1].eval(point)];
    exclude.iter().any(|g| g.eval(&root) == Rational::from_integer(0.into()))
}

/// Keep the points that belong to `chart`, lie outside the excluded loci and
/// are not seen by an older chart.
fn owned_points(atlas: &Atlas, chart: ChartId, pts: Vec<Point>, exclude: &[MultiPoly]) -> Vec<Point> {
    pts.into_iter()
        .filter(|p| atlas.contains(chart, p))
        .filter(|p| !is_excluded(atlas, chart, p, exclude))
        .filter(|p| atlas.owner(chart, p).map(|(c, _)| c) == Some(chart))
        .collect()
}

/// Singular points and pairwise meets per chart, kept across calls. A blown
/// up chart's data is its parent's, lifted off the center, plus whatever lies
/// on the new exceptional line; only the root chart needs elimination.
#[derive(Clone, Debug, Default)]
pub struct SncCache {
    reduced: BTreeMap<(usize, ChartId), MultiPoly>,
    singular: BTreeMap<(usize, ChartId), CommonZeros>,
    /// `None` when the two share a component.
    meets: BTreeMap<(usize, usize, ChartId), Option<CommonZeros>>,
}

impl SncCache {
    /// Reduced equation of divisor `k`; in a child chart the strict transform
    /// of the parent's reduced equation is already square-free.
    pub fn reduced(
        &mut self,
        atlas: &Atlas,
        divisors: &[DivisorRecord],
        k: usize,
        chart: ChartId,
    ) -> Result<MultiPoly, AlgebraError> {
        if let Some(f) = self.reduced.get(&(k, chart)) {
            return Ok(f.clone());
        }
        let eq = divisors[k]
            .eq_in(chart)
            .ok_or(AlgebraError::InternalInvariant("divisor not present in chart"))?;
        let c = atlas.chart(chart);
        let f = match c.link.as_ref().map(|l| l.parent) {
            Some(parent) if divisors[k].eq_in(parent).is_some() => {
                let up = self.reduced(atlas, divisors, k, parent)?;
                let (strict, _) = c
                    .strict_from_parent(&up)
                    .ok_or(AlgebraError::InternalInvariant("reduced equation vanishes after pullback"))?;
                strict.primitive()
            }
            _ => squarefree_part(eq)?,
        };
        self.reduced.insert((k, chart), f.clone());
        Ok(f)
    }

    /// Parent chart, blow-up center and kept index of a child chart.
    fn parent_of(atlas: &Atlas, chart: ChartId) -> Option<(ChartId, Point, usize)> {
        let link = atlas.chart(chart).link.as_ref()?;
        let center = atlas.chart(link.parent).blown_at.clone()?;
        Some((link.parent, center, link.kept))
    }

    fn lift(parent: &CommonZeros, center: &Point, kept: usize, mut on_axis: CommonZeros) -> CommonZeros {
        on_axis
            .points
            .extend(parent.points.iter().filter_map(|p| lift_point(p, center, kept, None)));
        on_axis.points.sort();
        on_axis.complete &= parent.complete;
        on_axis
    }

    pub fn singular(
        &mut self,
        atlas: &Atlas,
        divisors: &[DivisorRecord],
        k: usize,
        chart: ChartId,
    ) -> Result<CommonZeros, AlgebraError> {
        if let Some(z) = self.singular.get(&(k, chart)) {
            return Ok(z.clone());
        }
        let f = self.reduced(atlas, divisors, k, chart)?;
        let z = match Self::parent_of(atlas, chart) {
            Some((parent, center, kept)) if divisors[k].eq_in(parent).is_some() => {
                let up = self.singular(atlas, divisors, k, parent)?;
                let axis = match axis_common_zeros(&[&f, &f.derivative(0), &f.derivative(1)]) {
                    Some(z) => z,
                    None => singular_axis_fallback(&f)?,
                };
                Self::lift(&up, &center, kept, axis)
            }
            _ => singular_points(&f)?,
        };
        self.singular.insert((k, chart), z.clone());
        Ok(z)
    }

    pub fn meet(
        &mut self,
        atlas: &Atlas,
        divisors: &[DivisorRecord],
        i: usize,
        j: usize,
        chart: ChartId,
    ) -> Result<Option<CommonZeros>, AlgebraError> {
        if let Some(z) = self.meets.get(&(i, j, chart)) {
            return Ok(z.clone());
        }
        let f = self.reduced(atlas, divisors, i, chart)?;
        let g = self.reduced(atlas, divisors, j, chart)?;
        let on_axis = |f: &MultiPoly, g: &MultiPoly| match rational_common_zeros_on_axis(f, g) {
            Ok(z) => Ok(Some(z)),
            Err(AlgebraError::NotZeroDimensional) => Ok(None),
            Err(e) => Err(e),
        };
        let z = match Self::parent_of(atlas, chart) {
            Some((parent, center, kept))
                if divisors[i].eq_in(parent).is_some() && divisors[j].eq_in(parent).is_some() =>
            {
                match self.meet(atlas, divisors, i, j, parent)? {
                    None => None,
                    Some(up) => on_axis(&f, &g)?.map(|axis| Self::lift(&up, &center, kept, axis)),
                }
            }
            // one of them is the exceptional line of this chart
            Some(_) => on_axis(&f, &g)?,
            None => match rational_common_zeros(&f, &g) {
                Ok(z) => Some(z),
                Err(AlgebraError::NotZeroDimensional) => None,
                Err(e) => return Err(e),
            },
        };
        self.meets.insert((i, j, chart), z.clone());
        Ok(z)
    }
}

/// Rational common zeros of `polys` on the line where the first coordinate
/// vanishes; `None` if all of them vanish along it.
fn axis_common_zeros(polys: &[&MultiPoly]) -> Option<CommonZeros> {
    let zero = Rational::zero();
    let mut h: Option<Vec<Rational>> = None;
    for p in polys {
        let r = univariate::trim(p.eval_var(0, &zero).to_univariate(1)?);
        if r.is_empty() {
            continue;
        }
        h = Some(match h {
            None => r,
            Some(acc) => univariate::gcd(&acc, &r),
        });
    }
    let h = h?;
    if univariate::degree(&h).unwrap_or(0) == 0 {
        return Some(CommonZeros::empty());
    }
    let ys = univariate::rational_roots(&h);
    let complete = univariate::degree(&univariate::squarefree_part(&h)) == Some(ys.len());
    Some(CommonZeros {
        points: ys.into_iter().map(|y| [zero.clone(), y]).collect(),
        complete,
    })
}

/// Singular points of `f` on the first axis when `f` vanishes along it.
fn singular_axis_fallback(f: &MultiPoly) -> Result<CommonZeros, AlgebraError> {
    let mut z = singular_points(f)?;
    z.points.retain(|p| p[0].is_zero());
    Ok(z)
}

/// Certify (or refute) that the divisors form an SNC configuration on the
/// current surface minus the excluded loci (given in root coordinates).
pub fn is_snc(
    atlas: &Atlas,
    divisors: &[DivisorRecord],
    exclude: &[MultiPoly],
) -> Result<SncAnalysis, AlgebraError> {
    is_snc_cached(atlas, divisors, exclude, &mut SncCache::default())
}

/// [`is_snc`] reusing data from earlier calls on the same (growing) atlas.
pub fn is_snc_cached(
    atlas: &Atlas,
    divisors: &[DivisorRecord],
    exclude: &[MultiPoly],
    cache: &mut SncCache,
) -> Result<SncAnalysis, AlgebraError> {
    let mut reasons = Vec::new();
    let mut witnesses = Vec::new();
    let mut crossings_found = Vec::new();
    let mut components: Vec<ComponentReport> = divisors
        .iter()
        .map(|d| ComponentReport {
            label: d.label(),
            smooth: true,
            singular_points: Vec::new(),
            complete: true,
        })
        .collect();
    let mut crossings: Vec<CrossingReport> = Vec::new();
    for i in 0..divisors.len() {
        for j in i + 1..divisors.len() {
            crossings.push(CrossingReport {
                labels: (divisors[i].label(), divisors[j].label()),
                points: Vec::new(),
                complete: true,
            });
        }
    }
    let pair_index = |i: usize, j: usize| {
        let n = divisors.len();
        i * n - i * (i + 1) / 2 + (j - i - 1)
    };
    let mut triple_points = Vec::new();

    for &chart in atlas.leaves() {
        let name = atlas.chart(chart).name();
        let mut reduced: Vec<(usize, MultiPoly)> = Vec::new();
        for (k, d) in divisors.iter().enumerate() {
            if d.eq_in(chart).is_some() {
                reduced.push((k, cache.reduced(atlas, divisors, k, chart)?));
            }
        }
        for (k, _) in &reduced {
            let sing = cache.singular(atlas, divisors, *k, chart)?;
            if !sing.complete {
                components[*k].complete = false;
            }
            for p in owned_points(atlas, chart, sing.points, exclude) {
                components[*k].smooth = false;
                components[*k].singular_points.push(ChartPoint {
                    chart: name.clone(),
                    point: format_point(&p),
                });
                witnesses.push(Witness {
                    chart,
                    point: p,
                    reason: format!("{} is singular", divisors[*k].label()),
                });
            }
        }
        let mut on: Vec<(Point, Vec<usize>)> = Vec::new();
        for a in 0..reduced.len() {
            for b in a + 1..reduced.len() {
                let (i, f) = &reduced[a];
                let (j, g) = &reduced[b];
                let idx = pair_index(*i, *j);
                let zeros = match cache.meet(atlas, divisors, *i, *j, chart)? {
                    Some(z) => z,
                    None => {
                        reasons.push(format!(
                            "{} and {} share a component in {}",
                            divisors[*i].label(),
                            divisors[*j].label(),
                            name
                        ));
                        crossings[idx].complete = false;
                        continue;
                    }
                };
                if !zeros.complete {
                    crossings[idx].complete = false;
                }
                for p in owned_points(atlas, chart, zeros.points, exclude) {
                    let transverse = jacobian_det(f, g, &p) != Rational::from_integer(0.into());
                    crossings[idx].points.push(CrossingPoint {
                        chart: name.clone(),
                        point: format_point(&p),
                        transverse,
                    });
                    if transverse {
                        crossings_found.push(Crossing {
                            chart,
                            point: p.clone(),
                            divisors: (*i, *j),
                        });
                    } else {
                        witnesses.push(Witness {
                            chart,
                            point: p.clone(),
                            reason: format!(
                                "{} and {} meet non-transversally",
                                divisors[*i].label(),
                                divisors[*j].label()
                            ),
                        });
                    }
                    match on.iter_mut().find(|(q, _)| *q == p) {
                        Some((_, ks)) => {
                            for k in [*i, *j] {
                                if !ks.contains(&k) {
                                    ks.push(k);
                                }
                            }
                        }
                        None => on.push((p, vec![*i, *j])),
                    }
                }
            }
        }
        for (p, mut ks) in on {
            if ks.len() >= 3 {
                ks.sort();
                triple_points.push(TriplePoint {
                    chart: name.clone(),
                    point: format_point(&p),
                    labels: ks.iter().map(|&k| divisors[k].label()).collect(),
                });
                witnesses.push(Witness {
                    chart,
                    point: p,
                    reason: "three or more components meet".into(),
                });
            }
        }
    }

    for c in &components {
        if !c.smooth {
            reasons.push(format!("{} is singular", c.label));
        }
    }
    for c in &crossings {
        for p in c.points.iter().filter(|p| !p.transverse) {
            reasons.push(format!(
                "{} and {} are tangent at {} in {}",
                c.labels.0, c.labels.1, p.point, p.chart
            ));
        }
    }
    if !triple_points.is_empty() {
        reasons.push(format!("{} triple point(s)", triple_points.len()));
    }
    if components.iter().any(|c| !c.complete) || crossings.iter().any(|c| !c.complete) {
        reasons.push("possible non-rational singular/intersection point".into());
    }
    let verdict = if reasons.is_empty() {
        SncVerdict::Snc
    } else {
        SncVerdict::NotSnc(reasons)
    };
    Ok(SncAnalysis {
        report: SncReport {
            components,
            crossings,
            triple_points,
            verdict,
        },
        witnesses,
        crossings: crossings_found,
    })
}

/// Blow up `chart` at `point`, transform every divisor and append the new
/// exceptional divisor. Exceptionals are labelled `E1, E2, ...` by history.
pub fn blow_up_and_transform(
    atlas: &mut Atlas,
    divisors: &mut Vec<DivisorRecord>,
    chart: ChartId,
    point: &Point,
) -> Result<usize, BlowUpError> {
    let label = format!("E{}", atlas.history().len() + 1);
    let idx = atlas.blow_up(chart, point, &label)?;
    for d in divisors.iter_mut() {
        *d = transform_divisor(atlas, d, idx)?;
    }
    divisors.push(DivisorRecord::exceptional(atlas, idx));
    Ok(idx)
}

/// A center chosen by a resolution loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Center {
    pub blowup: usize,
    pub chart: ChartId,
    pub point: Point,
    pub reason: String,
}

pub struct SncResolution {
    pub centers: Vec<Center>,
    pub analysis: SncAnalysis,
}

/// Pick the witness in the oldest chart, lexicographically smallest point.
fn choose_witness<'a>(atlas: &Atlas, witnesses: &'a [Witness]) -> Option<&'a Witness> {
    witnesses.iter().min_by(|a, b| {
        let pa = atlas.leaves().iter().position(|&c| c == a.chart);
        let pb = atlas.leaves().iter().position(|&c| c == b.chart);
        pa.cmp(&pb).then_with(|| a.point.cmp(&b.point))
    })
}

/// Blow up witness points until the configuration is SNC.
pub fn resolve_to_snc(
    atlas: &mut Atlas,
    divisors: &mut Vec<DivisorRecord>,
    max_steps: usize,
    exclude: &[MultiPoly],
) -> Result<SncResolution, SncError> {
    let mut centers = Vec::new();
    let mut cache = SncCache::default();
    loop {
        let analysis = is_snc_cached(atlas, divisors, exclude, &mut cache)?;
        if analysis.report.is_snc() {
            return Ok(SncResolution { centers, analysis });
        }
        let Some(w) = choose_witness(atlas, &analysis.witnesses).cloned() else {
            return Err(SncError::NonRationalCenter {
                last: Box::new(analysis.report),
            });
        };
        if centers.len() >= max_steps {
            return Err(SncError::ResolutionBudgetExceeded {
                steps: max_steps,
                last: Box::new(analysis.report),
            });
        }
        let blowup = blow_up_and_transform(atlas, divisors, w.chart, &w.point)?;
        centers.push(Center {
            blowup,
            chart: w.chart,
            point: w.point,
            reason: w.reason,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, vars};
    use crate::parser::parse_polynomial;

    #[test]
    fn cusp_has_one_singular_point() {
        let v = vars(&["a", "b"]);
        let f = parse_polynomial("4a^3+27b^2", &v).unwrap();
        let s = singular_points(&f).unwrap();
        assert_eq!(s.points, vec![[int(0), int(0)]]);
        assert!(s.complete);
        // plug-in oracle: gradient and f vanish there
        for p in &s.points {
            assert_eq!(f.eval(p), int(0));
            assert_eq!(f.derivative(0).eval(p), int(0));
            assert_eq!(f.derivative(1).eval(p), int(0));
        }
    }

    #[test]
    fn smooth_line_and_reducible_curves() {
        let v = vars(&["q", "s"]);
        assert!(singular_points(&parse_polynomial("4s+27", &v).unwrap()).unwrap().points.is_empty());
        let v = vars(&["b", "p"]);
        let c1 = parse_polynomial("4bp^3+27", &v).unwrap();
        assert!(singular_points(&c1).unwrap().points.is_empty());
        // b*(4bp^3+27): the two components do not meet, so no singular point
        let prod = &parse_polynomial("b", &v).unwrap() * &c1;
        assert!(singular_points(&prod).unwrap().points.is_empty());
        // p*(b - p): components meet at the origin
        let node = parse_polynomial("p(b - p)", &v).unwrap();
        assert_eq!(singular_points(&node).unwrap().points, vec![[int(0), int(0)]]);
        // y-only factor times something: (p - 1)(b - p)
        let mixed = parse_polynomial("(p - 1)(b - p)", &v).unwrap();
        assert_eq!(singular_points(&mixed).unwrap().points, vec![[int(1), int(1)]]);
    }

    #[test]
    fn axes_are_snc_and_cusp_is_not() {
        let v = vars(&["x", "y"]);
        let atlas = Atlas::new(&v);
        let ds = vec![
            DivisorRecord::user("X", parse_polynomial("x", &v).unwrap()),
            DivisorRecord::user("Y", parse_polynomial("y", &v).unwrap()),
        ];
        let a = is_snc(&atlas, &ds, &[]).unwrap();
        assert!(a.report.is_snc());
        assert_eq!(a.report.crossings[0].points.len(), 1);
        assert!(a.report.crossings[0].points[0].transverse);

        let cusp = vec![DivisorRecord::user("C", parse_polynomial("4x^3+27y^2", &v).unwrap())];
        let a = is_snc(&atlas, &cusp, &[]).unwrap();
        assert!(!a.report.is_snc());
        assert_eq!(a.report.components[0].singular_points[0].point, "(0, 0)");
    }

    #[test]
    fn cusp_resolves_within_three_blow_ups() {
        let v = vars(&["a", "b"]);
        let mut atlas = Atlas::new(&v);
        let mut ds = vec![DivisorRecord::user("C", parse_polynomial("4a^3+27b^2", &v).unwrap())];
        let res = resolve_to_snc(&mut atlas, &mut ds, DEFAULT_MAX_STEPS, &[]).unwrap();
        assert!(res.centers.len() <= 3, "{} blow-ups", res.centers.len());
        assert!(is_snc(&atlas, &ds, &[]).unwrap().report.is_snc());
    }

    #[test]
    fn budget_is_enforced() {
        let v = vars(&["a", "b"]);
        let mut atlas = Atlas::new(&v);
        let mut ds = vec![DivisorRecord::user("C", parse_polynomial("a^2 - b^5", &v).unwrap())];
        let err = resolve_to_snc(&mut atlas, &mut ds, 1, &[]).err().unwrap();
        assert!(matches!(err, SncError::ResolutionBudgetExceeded { steps: 1, .. }));
    }

    #[test]
    fn tangency_is_a_witness() {
        let v = vars(&["x", "y"]);
        let atlas = Atlas::new(&v);
        let ds = vec![
            DivisorRecord::user("L", parse_polynomial("y", &v).unwrap()),
            DivisorRecord::user("P", parse_polynomial("y - x^2", &v).unwrap()),
        ];
        let a = is_snc(&atlas, &ds, &[]).unwrap();
        assert!(!a.report.is_snc());
        assert_eq!(a.witnesses[0].point, [int(0), int(0)]);
        // excluding the tangency point makes the rest SNC
        let ex = vec![parse_polynomial("x", &v).unwrap()];
        assert!(is_snc(&atlas, &ds, &ex).unwrap().report.is_snc());
    }

    #[test]
    fn incomplete_search_is_not_snc() {
        let v = vars(&["x", "y"]);
        let atlas = Atlas::new(&v);
        let ds = vec![
            DivisorRecord::user("A", parse_polynomial("x^2 - 2", &v).unwrap()),
            DivisorRecord::user("B", parse_polynomial("y", &v).unwrap()),
        ];
        let a = is_snc(&atlas, &ds, &[]).unwrap();
        assert!(!a.report.is_snc());
        assert!(a.witnesses.is_empty());
    }
}
