//! From a job to a report: base-locus resolution of the coarse map, SNC
//! resolution of the boundary, root indices, lifts and stabilizer verdicts.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{
    gcd, rational_common_zeros, rational_common_zeros_on_axis, squarefree_part, strip_common_factors, vanishing_order, AlgebraError, CommonZeros, MultiPoly,
    Point, Rational,
};
use crate::blowup::{check_transitions, lift_point, verify_transform, Atlas, BlowUpError, DivisorRecord};
use crate::job::{JobError, JobSpec};
use crate::report::*;
use crate::root_index::{
    crossing_consistency, minimal_root_index, rescaled_sections, section_orders_per_chart,
    Consistency, RootError, RootIndexResult, WeightedTarget,
};
use crate::snc::{
    blow_up_and_transform, format_point, is_excluded, resolve_to_snc, SncCache, SncError,
};
use crate::stack::{
    kernel_and_verdict, regularity_check, relative_coarse_presentation, root_presentation,
    stabilizer_map, Regularity, StackError,
};

/// Random points per chart for the unit certificate.
const CERTIFICATE_POINTS: usize = 20;
const CERTIFICATE_SEED: u64 = 0x5eed_1111;

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: String,
    pub kind: ErrorKind,
    pub code: String,
    pub message: String,
    pub partial: Box<ResolutionReport>,
}

impl PipelineError {
    pub fn is_internal(&self) -> bool {
        self.kind == ErrorKind::Internal
    }
}

/// An error before it is attached to a partial report.
#[derive(Debug)]
struct Failure {
    kind: ErrorKind,
    code: &'static str,
    message: String,
}

impl Failure {
    fn explicit(code: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind: ErrorKind::Explicit,
            code,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            kind: ErrorKind::Internal,
            code: "InternalInvariantViolation",
            message: message.into(),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::internal(e.to_string())
    }
}

impl From<BlowUpError> for Failure {
    fn from(e: BlowUpError) -> Self {
        Failure::internal(e.to_string())
    }
}

impl From<RootError> for Failure {
    fn from(e: RootError) -> Self {
        Failure::internal(e.to_string())
    }
}

impl From<StackError> for Failure {
    fn from(e: StackError) -> Self {
        Failure::internal(e.to_string())
    }
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        Failure::explicit("InvalidJob", e.to_string())
    }
}

impl From<SncError> for Failure {
    fn from(e: SncError) -> Self {
        match e {
            SncError::ResolutionBudgetExceeded { .. } => Failure::explicit("ResolutionBudgetExceeded", e.to_string()),
            SncError::NonRationalCenter { .. } => Failure::explicit("NonRationalCenter", e.to_string()),
            other => Failure::internal(other.to_string()),
        }
    }
}

/// Where a blow-up center came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    BaseLocus,
    Snc,
}

#[derive(Clone, Debug)]
pub struct CenterRecord {
    pub blowup: usize,
    pub stage: Stage,
    pub reason: String,
}

/// Square-free pieces with the vanishing orders of both sections.
type Pieces = Vec<(MultiPoly, [u32; 2])>;

/// Mutable state of one run.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub job: JobSpec,
    pub sections: Vec<MultiPoly>,
    pub coarse: [MultiPoly; 2],
    pub fixed: Option<MultiPoly>,
    pub exclude: Vec<MultiPoly>,
    pub atlas: Atlas,
    pub divisors: Vec<DivisorRecord>,
    pub centers: Vec<CenterRecord>,
    /// Rational zeros of the mobile pair per chart; charts never change.
    base_zeros: BTreeMap<usize, CommonZeros>,
    pieces: RefCell<BTreeMap<usize, Pieces>>,
}

impl Resolution {
    /// Set up the coarse pair and the tracked divisors in the root chart.
    pub fn new(job: &JobSpec) -> Result<Self, JobError> {
        job.validate()?;
        let vars = job.variables.clone();
        let sections = job.parsed_sections()?;
        let exclude = job.parsed_exclude()?;
        let l = job.weights[0].lcm(&job.weights[1]);
        let powers = [
            sections[0].pow(l / job.weights[0]),
            sections[1].pow(l / job.weights[1]),
        ];
        let m = job.coarse_change;
        let coarse = [0, 1].map(|i| {
            &powers[0].scale(&Rational::from_integer(m[i][0].into()))
                + &powers[1].scale(&Rational::from_integer(m[i][1].into()))
        });
        let fixed = gcd(&sections[0], &sections[1]).expect("sections are nonzero");
        let fixed = (!fixed.is_constant()).then_some(fixed);
        let mut named: Vec<(String, MultiPoly)> = Vec::new();
        for (i, c) in coarse.iter().enumerate() {
            let eq = match &fixed {
                Some(f) => strip_common_factors(c, f).expect("nonzero"),
                None => c.clone(),
            };
            if !eq.is_constant() {
                named.push((job.coarse_labels[i].clone(), eq));
            }
        }
        if let Some(f) = &fixed {
            named.push(("F".into(), f.clone()));
        }
        let mut divisors = Vec::new();
        for (label, eq) in named {
            let parts = uniform_parts(&eq, &sections).expect("nonzero equations");
            if parts.len() == 1 {
                divisors.push(DivisorRecord::user(&label, eq));
            } else {
                for (k, part) in parts.into_iter().enumerate() {
                    divisors.push(DivisorRecord::user(&format!("{label}_{}", k + 1), part));
                }
            }
        }
        // divisors lying inside the excluded locus are not part of the boundary
        if !exclude.is_empty() {
            let excl = exclude
                .iter()
                .fold(MultiPoly::one(&vars), |acc, g| &acc * g);
            divisors.retain(|d| {
                let eq = d.eq_in(0).expect("root equation");
                !strip_common_factors(eq, &excl).expect("nonzero").is_constant()
            });
        }
        Ok(Resolution {
            job: job.clone(),
            sections,
            coarse,
            fixed,
            exclude,
            atlas: Atlas::new(&vars),
            divisors,
            centers: Vec::new(),
            base_zeros: BTreeMap::new(),
            pieces: RefCell::new(BTreeMap::new()),
        })
    }

    /// Pieces of the zero locus of the pulled-back sections in `chart`, each
    /// square-free with constant vanishing orders of both sections.
    ///
    /// A section is a constant times the product of its pieces raised to their
    /// orders, so a child chart gets the strict transforms of the parent's
    /// pieces plus the exceptional line, whose orders add up from the parent.
    fn section_pieces(&self, chart: usize) -> Result<Pieces, AlgebraError> {
        if let Some(p) = self.pieces.borrow().get(&chart) {
            return Ok(p.clone());
        }
        let c = self.atlas.chart(chart);
        let pieces = match &c.link {
            Some(link) => {
                let mut out = Vec::new();
                let mut on_exceptional = [0, 0];
                for (p, o) in self.section_pieces(link.parent)? {
                    let (strict, k) = c
                        .strict_from_parent(&p)
                        .ok_or(AlgebraError::InternalInvariant("piece vanishes after pullback"))?;
                    on_exceptional[0] += k * o[0];
                    on_exceptional[1] += k * o[1];
                    if !strict.is_constant() {
                        out.push((strict.primitive(), o));
                    }
                }
                if on_exceptional != [0, 0] {
                    out.push((c.exceptional_coordinate(), on_exceptional));
                }
                out
            }
            None => {
                let s = [c.pull_from_root(&self.sections[0]), c.pull_from_root(&self.sections[1])];
                let r0 = squarefree_part(&s[0])?;
                let r1 = squarefree_part(&s[1])?;
                let shared = gcd(&r0, &r1)?;
                let rad = &r0 * &r1.exact_div(&shared).ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
                uniform_pieces(&rad, &s)?
                    .into_iter()
                    .map(|p| Ok::<_, AlgebraError>((p.clone(), [vanishing_order(&s[0], &p)?, vanishing_order(&s[1], &p)?])))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        self.pieces.borrow_mut().insert(chart, pieces.clone());
        Ok(pieces)
    }

    fn exponents(&self) -> [u32; 2] {
        let w = &self.job.weights;
        let l = w[0].lcm(&w[1]);
        [l / w[0], l / w[1]]
    }

    /// The coarse pair with its common factor divided out, in `chart`.
    pub fn mobile_pair(&self, chart: usize) -> Result<[MultiPoly; 2], AlgebraError> {
        let c = self.atlas.chart(chart);
        let e = self.exponents();
        let fixed = self
            .section_pieces(chart)?
            .iter()
            .fold(MultiPoly::one(&c.vars), |acc, (p, o)| &acc * &p.pow((e[0] * o[0]).min(e[1] * o[1])));
        let [a, b] = self.coarse.clone().map(|f| c.pull_from_root(&f));
        let a = a.exact_div(&fixed).ok_or(AlgebraError::InternalInvariant("fixed part does not divide"))?;
        let b = b.exact_div(&fixed).ok_or(AlgebraError::InternalInvariant("fixed part does not divide"))?;
        Ok([a, b])
    }

    /// Rational points where both entries of the mobile pair vanish. Only the
    /// reduced loci are needed: the pieces where one section dominates.
    ///
    /// Off the newest exceptional curve a child chart sees the parent's base
    /// points, so only the exceptional line needs solving there.
    fn find_base_zeros(&self, chart: usize) -> Result<CommonZeros, AlgebraError> {
        let c = self.atlas.chart(chart);
        let e = self.exponents();
        let mut m = [MultiPoly::one(&c.vars), MultiPoly::one(&c.vars)];
        for (p, o) in self.section_pieces(chart)? {
            match (e[0] * o[0]).cmp(&(e[1] * o[1])) {
                std::cmp::Ordering::Greater => m[0] = &m[0] * &p,
                std::cmp::Ordering::Less => m[1] = &m[1] * &p,
                std::cmp::Ordering::Equal => {}
            }
        }
        let inherited = c.link.as_ref().and_then(|l| {
            let center = self.atlas.chart(l.parent).blown_at.as_ref()?;
            Some((self.base_zeros.get(&l.parent)?, center, l.kept))
        });
        let Some((parent, center, kept)) = inherited else {
            return rational_common_zeros(&m[0], &m[1]);
        };
        if m[0].is_constant() || m[1].is_constant() {
            return Ok(CommonZeros::empty());
        }
        let mut zeros = rational_common_zeros_on_axis(&m[0], &m[1])?;
        zeros.complete &= parent.complete;
        zeros
            .points
            .extend(parent.points.iter().filter_map(|p| lift_point(p, center, kept, None)));
        zeros.points.sort();
        zeros.points.dedup();
        Ok(zeros)
    }

    /// Next base point: oldest leaf, lexicographically smallest point.
    fn next_base_point(&mut self) -> Result<Option<(usize, Point)>, Failure> {
        for &chart in self.atlas.leaves() {
            if !self.base_zeros.contains_key(&chart) {
                let z = self.find_base_zeros(chart)?;
                self.base_zeros.insert(chart, z);
            }
            let zeros = self.base_zeros[&chart].clone();
            if !zeros.complete {
                return Err(Failure::explicit(
                    "NonRationalBasePoint",
                    format!("base locus in {} has non-rational points", self.atlas.chart(chart).name()),
                ));
            }
            let found = zeros
                .points
                .into_iter()
                .filter(|p| self.atlas.contains(chart, p))
                .filter(|p| !is_excluded(&self.atlas, chart, p, &self.exclude))
                .find(|p| self.atlas.owner(chart, p).map(|(c, _)| c) == Some(chart));
            if let Some(p) = found {
                return Ok(Some((chart, p)));
            }
        }
        Ok(None)
    }

    fn resolve_base_locus(&mut self) -> Result<(), Failure> {
        while let Some((chart, point)) = self.next_base_point()? {
            if self.atlas.history().len() >= self.job.max_steps {
                return Err(Failure::explicit(
                    "ResolutionBudgetExceeded",
                    format!("base locus not resolved within {} blow-ups", self.job.max_steps),
                ));
            }
            let blowup = blow_up_and_transform(&mut self.atlas, &mut self.divisors, chart, &point)?;
            self.centers.push(CenterRecord {
                blowup,
                stage: Stage::BaseLocus,
                reason: "base point of the coarse pair".into(),
            });
        }
        Ok(())
    }

    fn resolve_snc(&mut self) -> Result<crate::snc::SncAnalysis, Failure> {
        let budget = self.job.max_steps.saturating_sub(self.atlas.history().len());
        let res = resolve_to_snc(&mut self.atlas, &mut self.divisors, budget, &self.exclude)?;
        for c in res.centers {
            self.centers.push(CenterRecord {
                blowup: c.blowup,
                stage: Stage::Snc,
                reason: c.reason,
            });
        }
        Ok(res.analysis)
    }

    /// Transform identities for every divisor and blow-up; returns the count.
    pub fn verify_transforms(&self) -> Result<usize, BlowUpError> {
        let mut n = 0;
        for d in &self.divisors {
            for b in 0..self.atlas.history().len() {
                if d.eq_in(self.atlas.history()[b].chart).is_some() {
                    verify_transform(&self.atlas, d, b)?;
                    n += 1;
                }
            }
        }
        Ok(n)
    }

    fn boundary(&self) -> Vec<usize> {
        (0..self.divisors.len())
            .filter(|&i| self.divisors[i].leaf_charts(&self.atlas).next().is_some())
            .collect()
    }

    /// Label of `d` as it was after `step` blow-ups.
    fn label_at(&self, d: &DivisorRecord, step: usize) -> Option<String> {
        let total = self.atlas.history().len();
        let created = total - d.primes;
        (step >= created).then(|| format!("{}{}", d.base, "'".repeat(step - created)))
    }

    fn chart_created(&self, id: usize) -> usize {
        self.atlas.chart(id).link.as_ref().map_or(0, |l| l.blowup + 1)
    }

    fn chart_retired(&self, id: usize) -> Option<usize> {
        self.atlas
            .history()
            .iter()
            .position(|r| r.chart == id)
            .map(|b| b + 1)
    }

    fn step_table(&self, step: usize) -> StepTable {
        let columns: Vec<(usize, String)> = self
            .divisors
            .iter()
            .enumerate()
            .filter_map(|(i, d)| self.label_at(d, step).map(|l| (i, l)))
            .collect();
        let rows = self
            .atlas
            .charts()
            .iter()
            .filter(|c| self.chart_created(c.id) <= step && self.chart_retired(c.id).is_none_or(|r| r > step))
            .map(|c| TableRow {
                chart: c.name(),
                cells: columns
                    .iter()
                    .map(|(i, _)| self.divisors[*i].eq_in(c.id).map(|e| e.to_string()))
                    .collect(),
            })
            .collect();
        StepTable {
            step,
            columns: columns.into_iter().map(|(_, l)| l).collect(),
            rows,
        }
    }

    fn fill_atlas(&self, report: &mut ResolutionReport) {
        let pair = |p: &[MultiPoly; 2]| [p[0].to_string(), p[1].to_string()];
        report.atlas = self
            .atlas
            .charts()
            .iter()
            .map(|c| ChartInfo {
                name: c.name(),
                vars: [c.vars[0].clone(), c.vars[1].clone()],
                parent: c.link.as_ref().map(|l| self.atlas.chart(l.parent).name()),
                blowup: c.link.as_ref().map(|l| l.blowup + 1),
                substitution: c.link.as_ref().map(|l| pair(&l.substitution)),
                to_root: pair(&c.to_root),
                leaf: c.is_leaf(),
                punctures: c.punctures.iter().map(format_point).collect(),
            })
            .collect();
        report.centers = self
            .centers
            .iter()
            .map(|c| {
                let rec = &self.atlas.history()[c.blowup];
                let ch = self.atlas.chart(rec.chart);
                let root = [ch.to_root[0].eval(&rec.center), ch.to_root[1].eval(&rec.center)];
                CenterInfo {
                    step: c.blowup + 1,
                    stage: match c.stage {
                        Stage::BaseLocus => "base_locus".into(),
                        Stage::Snc => "snc".into(),
                    },
                    chart: ch.name(),
                    point: format_point(&rec.center),
                    root_point: format_point(&root),
                    exceptional: rec.exceptional.clone(),
                    children: rec.children.map(|k| self.atlas.chart(k).name()),
                    reason: c.reason.clone(),
                }
            })
            .collect();
        report.blowup_count = self.atlas.history().len();
        report.tables = (0..=self.atlas.history().len()).map(|k| self.step_table(k)).collect();
        report.multiplicities = self
            .divisors
            .iter()
            .flat_map(|d| {
                d.multiplicities.iter().filter_map(move |&(b, m)| {
                    self.label_at(d, b).map(|l| MultiplicityInfo {
                        step: b + 1,
                        divisor: l,
                        multiplicity: m,
                    })
                })
            })
            .collect();
        report.multiplicities.sort_by_key(|m| m.step);
        report.mobile_pairs = self
            .atlas
            .leaves()
            .iter()
            .filter_map(|&c| {
                self.mobile_pair(c).ok().map(|p| MobileRow {
                    chart: self.atlas.chart(c).name(),
                    pair: pair(&p),
                })
            })
            .collect();
    }

    /// Is some rescaled section a unit at `point` of `chart`?
    fn unit_at(
        &self,
        chart: usize,
        point: &Point,
        results: &[(usize, RootIndexResult)],
        reduced: &BTreeMap<(usize, usize), MultiPoly>,
    ) -> Result<bool, Failure> {
        let c = self.atlas.chart(chart);
        let through: Vec<(&MultiPoly, &RootIndexResult)> = results
            .iter()
            .filter_map(|(i, r)| {
                let eq = reduced.get(&(*i, chart))?;
                eq.eval(point).is_zero().then_some((eq, r))
            })
            .collect();
        for (k, s) in self.sections.iter().enumerate() {
            let mut cof = c.pull_from_root(s);
            let mut residual_zero = true;
            for (eq, r) in &through {
                cof = cof
                    .exact_div(&eq.pow(r.orders[k]))
                    .ok_or(AlgebraError::InternalInvariant("order does not divide"))?;
                residual_zero &= r.residual_orders[k] == 0;
            }
            if residual_zero && !cof.eval(point).is_zero() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn fill_roots(&self, report: &mut ResolutionReport, analysis: &crate::snc::SncAnalysis) -> Result<(), Failure> {
        let weights = &self.job.weights;
        let target = WeightedTarget::new(weights.clone());
        report.pullbacks = self
            .atlas
            .leaves()
            .iter()
            .map(|&c| PullbackRow {
                chart: self.atlas.chart(c).name(),
                sections: self
                    .sections
                    .iter()
                    .map(|s| self.atlas.chart(c).pull_from_root(s).to_string())
                    .collect(),
            })
            .collect();

        let mut results: Vec<(usize, RootIndexResult)> = Vec::new();
        for i in self.boundary() {
            let d = &self.divisors[i];
            let per = section_orders_per_chart(&self.atlas, &self.sections, d)?;
            let label = d.label();
            let per_results: Vec<RootIndexResult> = per
                .iter()
                .map(|(_, o)| minimal_root_index(&label, o, weights))
                .collect();
            let first = per_results[0].clone();
            let consistent = per_results
                .iter()
                .all(|r| crossing_consistency(&first, r) == Consistency::Consistent);
            if !consistent {
                return Err(Failure::internal(format!("root data of {label} differ between charts")));
            }
            report.root_indices.push(RootIndexEntry {
                result: first.clone(),
                per_chart: per
                    .iter()
                    .map(|(c, o)| ChartOrders {
                        chart: self.atlas.chart(*c).name(),
                        orders: o.clone(),
                    })
                    .collect(),
                consistent,
            });
            for chart in d.leaf_charts(&self.atlas) {
                let rs = rescaled_sections(&self.atlas, chart, &self.sections, d, &first, weights)?;
                report.rescaled.push(RescaledInfo {
                    divisor: label.clone(),
                    chart: self.atlas.chart(chart).name(),
                    root_var: rs.root_var.clone(),
                    index: rs.r,
                    relation: rs.relation().to_string(),
                    sections: rs.sections.iter().map(|s| s.to_string()).collect(),
                    display: (0..rs.sections.len()).map(|k| rs.display(k)).collect(),
                    presentation_form: rs.presentation_form,
                    unit_sections: rs.unit_indices.clone(),
                });
            }
            results.push((i, first));
        }

        let result_of = |i: usize| results.iter().find(|(j, _)| *j == i).map(|(_, r)| r);
        let mut all_representable = true;
        for cr in &analysis.crossings {
            let (i, j) = cr.divisors;
            let (Some(ri), Some(rj)) = (result_of(i), result_of(j)) else {
                return Err(Failure::internal("crossing of a divisor without root data"));
            };
            let (di, dj) = (&self.divisors[i], &self.divisors[j]);
            let mut info = CrossingInfo {
                chart: self.atlas.chart(cr.chart).name(),
                point: format_point(&cr.point),
                divisors: [di.label(), dj.label()],
                indices: [ri.r, rj.r],
                presentation: None,
                stabilizer: None,
                kernel: None,
                representable: true,
                relative_coarse: None,
            };
            if ri.r > 1 || rj.r > 1 {
                let p = root_presentation(&self.atlas, cr.chart, &cr.point, &[(di, ri.r), (dj, rj.r)])?;
                let (regular, basis) = match regularity_check(&p) {
                    Regularity::Regular(b) => (true, b),
                    Regularity::NotRegular(w) => {
                        return Err(Failure::internal(format!("root chart not regular: {w}")))
                    }
                };
                info.presentation = Some(PresentationInfo {
                    root_vars: p.root_vars(),
                    base_equations: p.adjoined.iter().map(|a| a.base_eq.to_string()).collect(),
                    group: p.group(),
                    relations: p.relations().iter().map(|r| r.to_string()).collect(),
                    regular,
                    cotangent_basis: basis,
                    tame: true,
                });
                let chart = self.atlas.chart(cr.chart);
                let pulled: Vec<MultiPoly> = self.sections.iter().map(|s| chart.pull_from_root(s)).collect();
                let st = stabilizer_map(&p, &pulled, &[ri, rj], &target)?;
                let k = kernel_and_verdict(&st.hom)?;
                info.stabilizer = Some(StabilizerInfo {
                    source: st.hom.source.clone(),
                    target: st.hom.target,
                    exponents: st.hom.exponents.clone(),
                    tau: st.tau.to_string(),
                    rescaled: st.rescaled.iter().map(|s| s.to_string()).collect(),
                    unit_sections: st.unit_sections.clone(),
                });
                info.representable = k.representable;
                if !k.representable {
                    let inv = relative_coarse_presentation(&p, &k.generators, None)?;
                    info.relative_coarse = Some(CoarseSpaceInfo {
                        generators: inv
                            .generators
                            .iter()
                            .map(|(n, m)| GeneratorInfo {
                                name: n.clone(),
                                monomial: m.to_string(),
                                degree: m.total_degree().unwrap_or(0),
                            })
                            .collect(),
                        relations: inv.relations.iter().map(|r| r.to_string()).collect(),
                        identifications: inv
                            .identifications
                            .iter()
                            .map(|(eq, w)| format!("{eq} = {w}"))
                            .collect(),
                        degree_bound: inv.degree_bound,
                    });
                }
                info.kernel = Some(KernelInfo {
                    generators: k.generators,
                    invariant_factors: k.invariant_factors,
                    order: k.order,
                    image_order: k.image_order,
                });
            }
            all_representable &= info.representable;
            report.crossings.push(info);
        }
        report.representable = Some(all_representable);

        // unit certificate at crossings and random points
        let mut reduced = BTreeMap::new();
        let mut cache = SncCache::default();
        for (i, _) in &results {
            for &chart in self.atlas.leaves() {
                if self.divisors[*i].eq_in(chart).is_some() {
                    reduced.insert((*i, chart), cache.reduced(&self.atlas, &self.divisors, *i, chart)?);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(CERTIFICATE_SEED);
        let mut crossing_points = 0;
        let mut random_points = 0;
        for cr in &analysis.crossings {
            if !self.unit_at(cr.chart, &cr.point, &results, &reduced)? {
                return Err(Failure::internal(format!(
                    "no unit section at {} in {}",
                    format_point(&cr.point),
                    self.atlas.chart(cr.chart).name()
                )));
            }
            crossing_points += 1;
        }
        for &chart in self.atlas.leaves() {
            for _ in 0..CERTIFICATE_POINTS {
                let mut coord = || Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=5).into());
                let p: Point = [coord(), coord()];
                if !self.atlas.contains(chart, &p) || is_excluded(&self.atlas, chart, &p, &self.exclude) {
                    continue;
                }
                if !self.unit_at(chart, &p, &results, &reduced)? {
                    return Err(Failure::internal(format!(
                        "no unit section at {} in {}",
                        format_point(&p),
                        self.atlas.chart(chart).name()
                    )));
                }
                random_points += 1;
            }
        }
        report.unit_certificate = Some(UnitCertificate {
            crossing_points,
            random_points,
            ok: true,
        });
        Ok(())
    }
}

/// Largest divisor of `f` whose factors all divide `support`.
fn supported_part(f: &MultiPoly, support: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    let mut part = MultiPoly::one(f.vars());
    let mut rest = f.clone();
    loop {
        let g = gcd(&rest, support)?;
        if g.is_constant() {
            return Ok(part);
        }
        part = &part * &g;
        rest = rest.exact_div(&g).ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
    }
}

/// Split the square-free `rad` into coprime pieces along which every
/// section has a single vanishing order, without factoring.
fn uniform_pieces(rad: &MultiPoly, sections: &[MultiPoly]) -> Result<Vec<MultiPoly>, AlgebraError> {
    let mut pieces = vec![rad.clone()];
    for s in sections {
        let mut next = Vec::new();
        for piece in pieces {
            // peel off components of order 0, 1, 2, ... in s
            let mut rest = piece;
            let mut cur = s.clone();
            while !rest.is_constant() {
                let hit = gcd(&rest, &cur)?;
                let exact = rest.exact_div(&hit).ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
                if !exact.is_constant() {
                    next.push(exact);
                }
                cur = cur.exact_div(&hit).ok_or(AlgebraError::InternalInvariant("gcd does not divide"))?;
                rest = hit;
            }
        }
        pieces = next;
    }
    Ok(pieces)
}

/// Split `eq` into coprime parts along which every section has a single
/// vanishing order. A reducible curve whose components carry different
/// orders gets one part per order pattern.
fn uniform_parts(eq: &MultiPoly, sections: &[MultiPoly]) -> Result<Vec<MultiPoly>, AlgebraError> {
    let pieces = uniform_pieces(&squarefree_part(eq)?, sections)?;
    let mut parts = pieces
        .iter()
        .map(|p| supported_part(eq, p))
        .collect::<Result<Vec<_>, _>>()?;
    parts.sort_by_key(|p| p.to_string());
    Ok(parts)
}

fn start_report(job: &JobSpec) -> ResolutionReport {
    let mut report = ResolutionReport::empty();
    report.job = Some(job.clone());
    if job.weights.len() == 2 && !job.weights.contains(&0) {
        let t = WeightedTarget::new(job.weights.clone());
        report.target = Some(TargetInfo {
            weights: t.weights.clone(),
            generic_stabilizer: t.generic_stabilizer(),
            coordinate_stabilizers: t.coordinate_stabilizers(),
        });
    }
    report
}

fn fail(mut report: ResolutionReport, stage: &str, f: Failure) -> PipelineError {
    report.status = Status::Error;
    report.error = Some(ErrorInfo {
        stage: stage.into(),
        kind: f.kind,
        code: f.code.into(),
        message: f.message.clone(),
    });
    PipelineError {
        stage: stage.into(),
        kind: f.kind,
        code: f.code.into(),
        message: f.message,
        partial: Box::new(report),
    }
}

/// Blow up base points of the coarse pair until none is left.
pub fn resolve_coarse_base_locus(job: &JobSpec) -> Result<Resolution, PipelineError> {
    let mut res = Resolution::new(job).map_err(|e| fail(start_report(job), "job", e.into()))?;
    if let Err(f) = res.resolve_base_locus() {
        let mut report = start_report(job);
        res.fill_atlas(&mut report);
        return Err(fail(report, "base_locus", f));
    }
    Ok(res)
}

/// The whole pipeline.
pub fn run_job(job: &JobSpec) -> Result<ResolutionReport, PipelineError> {
    let mut report = start_report(job);
    let mut res = match Resolution::new(job) {
        Ok(r) => r,
        Err(e) => return Err(fail(report, "job", e.into())),
    };
    let l = job.weights[0].lcm(&job.weights[1]);
    report.coarse = Some(CoarseInfo {
        change: job.coarse_change,
        lcm: l,
        pair: [res.coarse[0].to_string(), res.coarse[1].to_string()],
        labels: job.coarse_labels.clone(),
        fixed_divisor: res.fixed.as_ref().map(|f| f.to_string()),
    });

    macro_rules! stage {
        ($name:expr, $e:expr) => {
            match $e {
                Ok(v) => v,
                Err(f) => {
                    res.fill_atlas(&mut report);
                    return Err(fail(report, $name, Failure::from(f)));
                }
            }
        };
    }

    stage!("base_locus", res.resolve_base_locus());
    let analysis = stage!("snc", res.resolve_snc());
    report.snc = Some(analysis.report.clone());
    report.transform_checks = stage!("transforms", res.verify_transforms());
    let mut transitions = 0;
    for d in &res.divisors {
        transitions += stage!("transitions", check_transitions(&res.atlas, d)).len();
    }
    report.transition_checks = transitions;
    res.fill_atlas(&mut report);
    stage!("roots", res.fill_roots(&mut report, &analysis));
    report.status = Status::Resolved;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_point_free_job_needs_no_blow_up() {
        let job = JobSpec::new(["a", "b"], ["1", "b"], [4, 6]).unwrap();
        let r = run_job(&job).unwrap();
        assert_eq!(r.blowup_count, 0);
        assert!(r.root_indices.iter().all(|e| e.result.r == 1));
        assert!(r.crossings.iter().all(|c| c.presentation.is_none()));
    }

    #[test]
    fn linear_pair_needs_one_blow_up() {
        let job = JobSpec::new(["a", "b"], ["a", "b"], [1, 1]).unwrap();
        let res = resolve_coarse_base_locus(&job).unwrap();
        assert_eq!(res.atlas.history().len(), 1);
        let pairs: Vec<[String; 2]> = res
            .atlas
            .leaves()
            .iter()
            .map(|&c| {
                let p = res.mobile_pair(c).unwrap();
                [p[0].to_string(), p[1].to_string()]
            })
            .collect();
        assert_eq!(pairs, vec![["1".to_string(), "q".to_string()], ["p".to_string(), "1".to_string()]]);
    }

    #[test]
    fn irrational_base_points_are_reported() {
        let job = JobSpec::new(["a", "b"], ["a^2 - 2", "b"], [1, 1]).unwrap();
        let e = run_job(&job).unwrap_err();
        assert_eq!(e.code, "NonRationalBasePoint");
        assert!(!e.is_internal());
    }

    #[test]
    fn budget_is_explicit() {
        let mut job = JobSpec::new(["a", "b"], ["a", "b"], [4, 6]).unwrap();
        job.max_steps = 2;
        let e = run_job(&job).unwrap_err();
        assert_eq!(e.code, "ResolutionBudgetExceeded");
        assert_eq!(e.partial.blowup_count, 2);
    }

    #[test]
    fn fixed_component_is_tracked() {
        let job = JobSpec::new(["a", "b"], ["a(b - 1)", "b(b - 1)"], [1, 1]).unwrap();
        let r = run_job(&job).unwrap();
        assert_eq!(r.coarse.as_ref().unwrap().fixed_divisor.as_deref(), Some("b - 1"));
        assert_eq!(r.blowup_count, 1);
    }

    #[test]
    fn components_with_different_orders_are_split() {
        let v = vec!["x".to_string(), "y".to_string()];
        let p = |s: &str| crate::parser::parse_polynomial(s, &v).unwrap();
        let parts = uniform_parts(&p("x^2(5x + 2)(y - 1)"), &[p("x^2(5x + 2)"), p("y")]).unwrap();
        let shown: Vec<String> = parts.iter().map(|q| q.to_string()).collect();
        assert_eq!(shown, ["5x + 2", "x^2", "y - 1"]);
        let one = uniform_parts(&p("x(x - 1)"), &[p("x(x - 1)"), p("1")]).unwrap();
        assert_eq!(one.len(), 1);
    }
}
