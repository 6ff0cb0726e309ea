//! Local quotient presentations of root stacks, stabilizer homomorphisms at
//! crossing points and relative coarse spaces.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, MultiPoly, Point, Rational};
use crate::blowup::{Atlas, ChartId, DivisorRecord};
use crate::root_index::{RootIndexResult, WeightedTarget};

#[derive(Debug, Clone, Error)]
pub enum StackError {
    #[error("equation of {0} is not part of a coordinate system at the point")]
    NeedsSncFirst(String),
    #[error("a root presentation adjoins one or two roots, got {0}")]
    BadArity(usize),
    #[error("no rescaled section is a unit at the point")]
    NotAtStackyPoint,
    #[error("homomorphism is not well defined")]
    InvalidHom,
    #[error("stabilizer cross-check failed for generator {generator} on section {section}")]
    CrossCheckFailed { generator: usize, section: usize },
    #[error("invariant generation needs degree {needed}, bound is {bound}")]
    BoundExceeded {
        needed: u32,
        bound: u32,
        partial: Box<InvariantPresentation>,
    },
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn zero() -> Rational {
    Rational::zero()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Adjoined {
    pub divisor: String,
    pub root_var: String,
    pub index: u32,
    /// In the chart variables.
    pub base_eq: MultiPoly,
}

/// `R[t_1, ...]/(t_i^{r_i} - x_i)` with `mu_{r_1} x ...` scaling `t_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootChartPresentation {
    pub chart: ChartId,
    pub chart_name: String,
    pub point: Point,
    pub base_vars: Vec<String>,
    pub adjoined: Vec<Adjoined>,
}

impl RootChartPresentation {
    pub fn group(&self) -> Vec<u32> {
        self.adjoined.iter().map(|a| a.index).collect()
    }

    /// Chart variables followed by the root variables.
    pub fn ring_vars(&self) -> Vec<String> {
        let mut v = self.base_vars.clone();
        v.extend(self.adjoined.iter().map(|a| a.root_var.clone()));
        v
    }

    pub fn root_vars(&self) -> Vec<String> {
        self.adjoined.iter().map(|a| a.root_var.clone()).collect()
    }

    pub fn relations(&self) -> Vec<MultiPoly> {
        let vars = self.ring_vars();
        let nb = self.base_vars.len();
        self.adjoined
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let t = MultiPoly::var(&vars, nb + i);
                &t.pow(a.index) - &a.base_eq.embed(&vars).expect("chart vars embed")
            })
            .collect()
    }
}

const ROOT_NAMES: [&str; 2] = ["z", "w"];

/// Presentation at `point` of `chart` for one or two divisors with their indices.
pub fn root_presentation(
    atlas: &Atlas,
    chart: ChartId,
    point: &Point,
    divisors: &[(&DivisorRecord, u32)],
) -> Result<RootChartPresentation, StackError> {
    if divisors.is_empty() || divisors.len() > 2 {
        return Err(StackError::BadArity(divisors.len()));
    }
    let c = atlas.chart(chart);
    let mut adjoined = Vec::new();
    for (i, (d, r)) in divisors.iter().enumerate() {
        let eq = d
            .eq_in(chart)
            .map(crate::algebra::squarefree_part)
            .transpose()?
            .ok_or_else(|| StackError::NeedsSncFirst(d.label()))?;
        let grad = [eq.derivative(0).eval(point), eq.derivative(1).eval(point)];
        if !eq.eval(point).is_zero() || grad.iter().all(Zero::is_zero) {
            return Err(StackError::NeedsSncFirst(d.label()));
        }
        let mut name = ROOT_NAMES[i].to_string();
        while c.vars.contains(&name) {
            name.push('_');
        }
        adjoined.push(Adjoined {
            divisor: d.label(),
            root_var: name,
            index: *r,
            base_eq: eq,
        });
    }
    Ok(RootChartPresentation {
        chart,
        chart_name: c.name(),
        point: point.clone(),
        base_vars: c.vars.clone(),
        adjoined,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    /// Root variables spanning the cotangent space at the stacky origin.
    Regular(Vec<String>),
    NotRegular(String),
}

/// The root chart is regular at the point iff the base equations have
/// independent differentials there.
pub fn regularity_check(p: &RootChartPresentation) -> Regularity {
    let grads: Vec<[Rational; 2]> = p
        .adjoined
        .iter()
        .map(|a| {
            [
                a.base_eq.derivative(0).eval(&p.point),
                a.base_eq.derivative(1).eval(&p.point),
            ]
        })
        .collect();
    for (a, g) in p.adjoined.iter().zip(&grads) {
        if !a.base_eq.eval(&p.point).is_zero() {
            return Regularity::NotRegular(format!("{} does not vanish at the point", a.divisor));
        }
        if g.iter().all(Zero::is_zero) {
            return Regularity::NotRegular(format!("{} is singular at the point", a.divisor));
        }
    }
    if grads.len() == 2 {
        let det = &grads[0][0] * &grads[1][1] - &grads[0][1] * &grads[1][0];
        if det.is_zero() {
            return Regularity::NotRegular(format!(
                "differentials of {} and {} are dependent",
                p.adjoined[0].divisor, p.adjoined[1].divisor
            ));
        }
    }
    Regularity::Regular(p.root_vars())
}

/// `prod mu_{d_i} -> mu_e`, generator `i` going to the `c_i`-th power of the
/// target generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicHom {
    pub source: Vec<u32>,
    pub target: u32,
    pub exponents: Vec<u32>,
}

impl CyclicHom {
    pub fn is_well_defined(&self) -> bool {
        self.target > 0
            && self.source.len() == self.exponents.len()
            && self.source.iter().all(|&d| d > 0)
            && self
                .source
                .iter()
                .zip(&self.exponents)
                .all(|(&d, &c)| c < self.target && (c as u64 * d as u64).is_multiple_of(self.target as u64))
    }

    pub fn image_order(&self) -> u32 {
        let g = self.exponents.iter().fold(self.target, |g, &c| g.gcd(&c));
        self.target / g
    }

    pub fn source_order(&self) -> u64 {
        self.source.iter().map(|&d| d as u64).product()
    }

    pub fn apply(&self, x: &[u32]) -> u32 {
        let s: u64 = x
            .iter()
            .zip(&self.exponents)
            .map(|(&a, &c)| a as u64 * c as u64)
            .sum();
        (s % self.target as u64) as u32
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerData {
    pub hom: CyclicHom,
    /// `prod t_i^{m_i}` in the ring variables.
    pub tau: MultiPoly,
    pub rescaled: Vec<MultiPoly>,
    pub unit_sections: Vec<usize>,
}

/// Fractional part in `[0, 1)`.
fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// The stabilizer homomorphism at the presentation's origin.
///
/// Generator `i` scales `t_i` by `zeta_{r_i}`, hence `tau` by the character
/// `chi = zeta_{r_i}^{m_i}`, which is the image. The residual coordinates then
/// satisfy `g . s'_k = chi(g)^{-w_k} s'_k`.
pub fn stabilizer_map(
    p: &RootChartPresentation,
    sections: &[MultiPoly],
    results: &[&RootIndexResult],
    target: &WeightedTarget,
) -> Result<StabilizerData, StackError> {
    let vars = p.ring_vars();
    let nb = p.base_vars.len();
    let weights = &target.weights;
    let mut rescaled = Vec::new();
    let mut units = Vec::new();
    let mut residuals = Vec::new();
    for (k, s) in sections.iter().enumerate() {
        let mut cof = s.clone();
        let mut res = Vec::new();
        let mut mono = MultiPoly::one(&vars);
        for (i, (a, r)) in p.adjoined.iter().zip(results).enumerate() {
            let alpha = r.orders[k];
            cof = cof
                .exact_div(&a.base_eq.pow(alpha))
                .ok_or(AlgebraError::InternalInvariant("order does not divide"))?;
            let e = r.r * alpha - weights[k] * r.m;
            mono = &mono * &MultiPoly::var(&vars, nb + i).pow(e);
            res.push(e);
        }
        if res.iter().all(|&e| e == 0) && !cof.eval(&p.point).is_zero() {
            units.push(k);
        }
        rescaled.push(&mono * &cof.embed(&vars)?);
        residuals.push(res);
    }
    if units.is_empty() {
        return Err(StackError::NotAtStackyPoint);
    }
    let e = target.stabilizer_order(&units);
    let mut exponents = Vec::new();
    let mut tau = MultiPoly::one(&vars);
    for (i, r) in results.iter().enumerate() {
        if !(r.m as u64 * e as u64).is_multiple_of(r.r as u64) {
            return Err(StackError::InternalInvariant(format!(
                "character of generator {i} is not in mu_{e}"
            )));
        }
        exponents.push(((r.m as u64 * e as u64 / r.r as u64) % e as u64) as u32);
        tau = &tau * &MultiPoly::var(&vars, nb + i).pow(r.m);
    }
    let hom = CyclicHom {
        source: p.group(),
        target: e,
        exponents,
    };
    for (i, r) in results.iter().enumerate() {
        for (k, res) in residuals.iter().enumerate() {
            let acting = frac(&Rational::new(res[i].into(), r.r.into()));
            let via_hom = frac(&Rational::new(
                (-(weights[k] as i64) * hom.exponents[i] as i64).into(),
                e.into(),
            ));
            if acting != via_hom {
                return Err(StackError::CrossCheckFailed {
                    generator: i,
                    section: k,
                });
            }
        }
    }
    Ok(StabilizerData {
        hom,
        tau,
        rescaled,
        unit_sections: units,
    })
}

/// Smith normal form `U * M * V = S` of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub s: Vec<Vec<i64>>,
    pub u: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn smith_normal_form(m: &[Vec<i64>]) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut s: Vec<Vec<i64>> = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let row_op = |a: &mut Vec<Vec<i64>>, dst: usize, src: usize, f: i64| {
        let src_row = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(src_row) {
            *x -= f * y;
        }
    };
    let col_op = |a: &mut Vec<Vec<i64>>, dst: usize, src: usize, f: i64| {
        for row in a.iter_mut() {
            row[dst] -= f * row[src];
        }
    };
    let swap_cols = |a: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    };
    for k in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry in the remaining block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if s[i][j] != 0 && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { s, u, v };
            };
            s.swap(k, pi);
            u.swap(k, pi);
            swap_cols(&mut s, k, pj);
            swap_cols(&mut v, k, pj);
            let p = s[k][k];
            let mut clean = true;
            for i in k + 1..rows {
                let f = s[i][k] / p;
                row_op(&mut s, i, k, f);
                row_op(&mut u, i, k, f);
                clean &= s[i][k] == 0;
            }
            for j in k + 1..cols {
                let f = s[k][j] / p;
                col_op(&mut s, j, k, f);
                col_op(&mut v, j, k, f);
                clean &= s[k][j] == 0;
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| s[i][j] % p != 0);
            match bad {
                Some((i, _)) => {
                    row_op(&mut s, k, i, -1);
                    row_op(&mut u, k, i, -1);
                }
                None => break,
            }
        }
        if s[k][k] < 0 {
            for x in s[k].iter_mut() {
                *x = -*x;
            }
            for x in u[k].iter_mut() {
                *x = -*x;
            }
        }
    }
    Smith { s, u, v }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Inverse of a square integer matrix over the rationals.
fn rational_inverse(a: &[Vec<i64>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|&x| Rational::from_integer(x.into())).collect();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn to_integer_matrix(m: Vec<Vec<Rational>>) -> Option<Vec<Vec<i64>>> {
    m.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelData {
    /// Exponent tuples, reduced modulo the source orders.
    pub generators: Vec<Vec<u32>>,
    pub invariant_factors: Vec<u32>,
    pub order: u64,
    pub image_order: u32,
    pub representable: bool,
}

/// Kernel of `h` by Smith normal form; the lift is representable at the point
/// iff the kernel is trivial.
pub fn kernel_and_verdict(h: &CyclicHom) -> Result<KernelData, StackError> {
    if !h.is_well_defined() {
        return Err(StackError::InvalidHom);
    }
    let n = h.source.len();
    let e = h.target as i64;
    if n == 0 {
        return Ok(KernelData {
            generators: vec![],
            invariant_factors: vec![],
            order: 1,
            image_order: 1,
            representable: true,
        });
    }
    // lattice L = {a : c.a = 0 mod e} as the projection of ker [c | e]
    let mut row: Vec<i64> = h.exponents.iter().map(|&c| c as i64).collect();
    row.push(e);
    let sm = smith_normal_form(&[row]);
    let basis: Vec<Vec<i64>> = (0..n)
        .map(|i| (1..=n).map(|j| sm.v[i][j]).collect())
        .collect();
    // D = B X
    let binv = rational_inverse(&basis).ok_or_else(|| StackError::InternalInvariant("kernel lattice is degenerate".into()))?;
    let d: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { h.source[i] as i64 } else { 0 }).collect())
        .collect();
    let binv_d: Vec<Vec<Rational>> = binv
        .iter()
        .map(|r| {
            (0..n)
                .map(|j| r.iter().zip(&d).map(|(x, drow)| x * Rational::from_integer(drow[j].into())).sum())
                .collect()
        })
        .collect();
    let x = to_integer_matrix(binv_d)
        .ok_or_else(|| StackError::InternalInvariant("source relations outside the kernel lattice".into()))?;
    let sx = smith_normal_form(&x);
    let uinv = to_integer_matrix(
        rational_inverse(&sx.u).ok_or_else(|| StackError::InternalInvariant("singular transform".into()))?,
    )
    .ok_or_else(|| StackError::InternalInvariant("non-unimodular transform".into()))?;
    let new_basis = mat_mul(&basis, &uinv);
    let mut generators = Vec::new();
    let mut factors = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        let f = sx.s[k][k];
        if f > 1 {
            factors.push(f as u32);
            let g: Vec<u32> = (0..n)
                .map(|i| new_basis[i][k].rem_euclid(h.source[i] as i64) as u32)
                .collect();
            generators.push(g);
        }
    }
    let order: u64 = factors.iter().map(|&f| f as u64).product();
    let image_order = h.image_order();
    if order * image_order as u64 != h.source_order() {
        return Err(StackError::InternalInvariant("kernel and image orders do not multiply to the source order".into()));
    }
    Ok(KernelData {
        generators,
        invariant_factors: factors,
        order,
        image_order,
        representable: order == 1,
    })
}

/// Every kernel element, by enumeration of the source group.
pub fn kernel_brute_force(h: &CyclicHom) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; h.source.len()];
    loop {
        if h.apply(&cur) == 0 {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                return out;
            }
            cur[i] += 1;
            if cur[i] < h.source[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Subgroup generated by `gens` inside `prod Z/d_i`.
pub fn generated_subgroup(gens: &[Vec<u32>], orders: &[u32]) -> BTreeSet<Vec<u32>> {
    let mut seen = BTreeSet::new();
    let start = vec![0u32; orders.len()];
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<u32> = x
                .iter()
                .zip(g)
                .zip(orders)
                .map(|((a, b), d)| (a + b) % d)
                .collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Invariants of a finite diagonal action on the root variables.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPresentation {
    pub root_vars: Vec<String>,
    /// Named generators as monomials in the root variables.
    pub generators: Vec<(String, MultiPoly)>,
    /// Binomials in the generator names.
    pub relations: Vec<MultiPoly>,
    /// Base equation text and its expression in the generators.
    pub identifications: Vec<(String, MultiPoly)>,
    pub degree_bound: u32,
}

impl InvariantPresentation {
    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn generator_degrees(&self) -> Vec<u32> {
        self.generators
            .iter()
            .map(|(_, m)| m.total_degree().unwrap_or(0))
            .collect()
    }

    /// Every relation and identification vanishes under the monomial substitution.
    pub fn verify(&self, p: &RootChartPresentation) -> bool {
        let images: Vec<MultiPoly> = self.generators.iter().map(|(_, m)| m.clone()).collect();
        let rels_ok = self.relations.iter().all(|r| r.compose(&images).is_zero());
        let ids_ok = p.adjoined.iter().zip(&self.identifications).all(|(a, (_, word))| {
            let t = MultiPoly::var(&self.root_vars, p.adjoined.iter().position(|b| b == a).unwrap());
            word.compose(&images) == t.pow(a.index)
        });
        rels_ok && ids_ok
    }
}

fn generator_name(i: usize) -> String {
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPRSTUVWXYZ";
    if i < LETTERS.len() {
        (LETTERS[i] as char).to_string()
    } else {
        format!("G{i}")
    }
}

fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All ways to write `target` as a product of the generator exponent vectors.
fn words(gens: &[Vec<u32>], target: &[u32]) -> Vec<Vec<u32>> {
    fn rec(gens: &[Vec<u32>], i: usize, rest: Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == gens.len() {
            if rest.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let g = &gens[i];
        let max = g
            .iter()
            .zip(&rest)
            .filter(|(gi, _)| **gi > 0)
            .map(|(gi, ri)| ri / gi)
            .min()
            .unwrap_or(0);
        for k in (0..=max).rev() {
            let r: Vec<u32> = rest.iter().zip(g).map(|(x, y)| x - k * y).collect();
            cur.push(k);
            rec(gens, i + 1, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(gens, 0, target.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Coarse space of the root chart relative to the kernel: invariant
/// monomials of the kernel action, a Hilbert basis, binomial relations and
/// the base coordinates written in the generators.
pub fn relative_coarse_presentation(
    p: &RootChartPresentation,
    kernel: &[Vec<u32>],
    bound: Option<u32>,
) -> Result<InvariantPresentation, StackError> {
    let orders = p.group();
    let n = orders.len();
    let l = orders.iter().fold(1u32, |a, &b| a.lcm(&b));
    let bound = bound.unwrap_or(2 * l);
    // kernel element g scales t_i by exp(2 pi i g_i / r_i) = zeta_l^{g_i l / r_i}
    let chars: Vec<Vec<u32>> = kernel
        .iter()
        .map(|g| g.iter().zip(&orders).map(|(&gi, &r)| gi * (l / r) % l).collect())
        .collect();
    let invariant = |b: &[u32]| {
        chars
            .iter()
            .all(|c| c.iter().zip(b).map(|(x, y)| (*x as u64) * (*y as u64)).sum::<u64>() % l as u64 == 0)
    };
    let axis_orders: Vec<u32> = (0..n)
        .map(|i| {
            (1..=l)
                .find(|&k| {
                    let mut b = vec![0; n];
                    b[i] = k;
                    invariant(&b)
                })
                .expect("t_i^l is invariant")
        })
        .collect();
    let needed: u32 = axis_orders.iter().sum();

    let root_vars = p.root_vars();
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut invariants_by_degree: Vec<BTreeSet<Vec<u32>>> = Vec::new();
    for d in 0..=bound {
        let mut layer = BTreeSet::new();
        for b in monomials_of_degree(n, d) {
            if !invariant(&b) {
                continue;
            }
            if d > 0 && !basis.iter().any(|h| h != &b && h.iter().zip(&b).all(|(x, y)| x <= y)) {
                basis.push(b.clone());
            }
            layer.insert(b);
        }
        invariants_by_degree.push(layer);
    }
    basis.sort_by(|a, b| b.cmp(a));
    let names: Vec<String> = (0..basis.len()).map(generator_name).collect();
    let gen_polys: Vec<(String, MultiPoly)> = basis
        .iter()
        .zip(&names)
        .map(|(b, name)| (name.clone(), MultiPoly::monomial(&root_vars, b.clone(), Rational::one())))
        .collect();

    // binomial relations: connect every fiber of the word map with moves
    let mut moves: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for layer in &invariants_by_degree {
        for target in layer {
            let ws = words(&basis, target);
            if ws.len() < 2 {
                continue;
            }
            let mut comp: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
            let mut reps: Vec<Vec<u32>> = Vec::new();
            for w in &ws {
                if comp.contains_key(w) {
                    continue;
                }
                let id = reps.len();
                reps.push(w.clone());
                let mut queue = VecDeque::from([w.clone()]);
                comp.insert(w.clone(), id);
                while let Some(x) = queue.pop_front() {
                    for (u, v) in &moves {
                        for (from, to) in [(u, v), (v, u)] {
                            if from.iter().zip(&x).all(|(a, b)| a <= b) {
                                let y: Vec<u32> = x
                                    .iter()
                                    .zip(from)
                                    .zip(to)
                                    .map(|((a, f), t)| a - f + t)
                                    .collect();
                                if !comp.contains_key(&y) {
                                    comp.insert(y.clone(), id);
                                    queue.push_back(y);
                                }
                            }
                        }
                    }
                }
            }
            for rep in &reps[1..] {
                moves.push((reps[0].clone(), rep.clone()));
            }
        }
    }
    let relations: Vec<MultiPoly> = moves
        .iter()
        .map(|(a, b)| {
            let r = &MultiPoly::monomial(&names, a.clone(), Rational::one())
                - &MultiPoly::monomial(&names, b.clone(), Rational::one());
            if r.leading_coefficient().is_negative() {
                -r
            } else {
                r
            }
        })
        .collect();

    let mut identifications = Vec::new();
    for (i, a) in p.adjoined.iter().enumerate() {
        let mut target = vec![0; n];
        target[i] = a.index;
        let w = words(&basis, &target).into_iter().next();
        let word = match w {
            Some(w) => MultiPoly::monomial(&names, w, Rational::one()),
            None => MultiPoly::zero(&names),
        };
        identifications.push((a.base_eq.to_string(), word));
    }

    let pres = InvariantPresentation {
        root_vars,
        generators: gen_polys,
        relations,
        identifications,
        degree_bound: bound,
    };
    if bound < needed {
        return Err(StackError::BoundExceeded {
            needed,
            bound,
            partial: Box::new(pres),
        });
    }
    // dimension count: generator products reach every invariant monomial
    let mut reached: BTreeSet<Vec<u32>> = BTreeSet::from([vec![0; n]]);
    for row in invariants_by_degree.iter().take(bound as usize + 1).skip(1) {
        for b in row {
            let ok = basis.iter().any(|h| {
                h.iter().zip(b).all(|(x, y)| x <= y)
                    && reached.contains(&b.iter().zip(h).map(|(y, x)| y - x).collect::<Vec<_>>())
            });
            if !ok {
                return Err(StackError::InternalInvariant(format!(
                    "invariant monomial {b:?} is not generated"
                )));
            }
        }
        reached.extend(row.iter().cloned());
    }
    if !pres.verify(p) {
        return Err(StackError::InternalInvariant("relation does not vanish".into()));
    }
    Ok(pres)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, vars};
    use crate::parser::parse_polynomial;

    fn presentation(eqs: &[(&str, u32)]) -> RootChartPresentation {
        let v = vars(&["q", "s"]);
        RootChartPresentation {
            chart: 0,
            chart_name: "(q,s)".into(),
            point: [int(0), int(0)],
            base_vars: v.clone(),
            adjoined: eqs
                .iter()
                .enumerate()
                .map(|(i, (e, r))| Adjoined {
                    divisor: format!("D{i}"),
                    root_var: ROOT_NAMES[i].into(),
                    index: *r,
                    base_eq: parse_polynomial(e, &v).unwrap(),
                })
                .collect(),
        }
    }

    #[test]
    fn regularity() {
        let p = presentation(&[("s", 6), ("q", 2)]);
        assert_eq!(regularity_check(&p), Regularity::Regular(vec!["z".into(), "w".into()]));
        let bad = presentation(&[("s", 6), ("sq", 2)]);
        assert!(matches!(regularity_check(&bad), Regularity::NotRegular(_)));
    }

    #[test]
    fn kernel_at_p() {
        let h = CyclicHom {
            source: vec![6, 2],
            target: 6,
            exponents: vec![1, 3],
        };
        let k = kernel_and_verdict(&h).unwrap();
        assert_eq!(k.order, 2);
        assert_eq!(k.generators, vec![vec![3, 1]]);
        assert!(!k.representable);
    }

    #[test]
    fn degenerate_homs() {
        let id = CyclicHom {
            source: vec![6],
            target: 6,
            exponents: vec![1],
        };
        assert!(kernel_and_verdict(&id).unwrap().representable);
        let zero = CyclicHom {
            source: vec![3],
            target: 5,
            exponents: vec![0],
        };
        assert_eq!(kernel_and_verdict(&zero).unwrap().order, 3);
        let bad = CyclicHom {
            source: vec![2],
            target: 6,
            exponents: vec![1],
        };
        assert!(matches!(kernel_and_verdict(&bad), Err(StackError::InvalidHom)));
    }

    #[test]
    fn smith_kernel_matches_enumeration() {
        for d1 in 1..=6u32 {
            for d2 in 1..=4u32 {
                for e in 1..=6u32 {
                    for c1 in 0..e {
                        for c2 in 0..e {
                            let h = CyclicHom {
                                source: vec![d1, d2],
                                target: e,
                                exponents: vec![c1, c2],
                            };
                            if !h.is_well_defined() {
                                continue;
                            }
                            let k = kernel_and_verdict(&h).unwrap();
                            let brute: BTreeSet<Vec<u32>> = kernel_brute_force(&h).into_iter().collect();
                            assert_eq!(generated_subgroup(&k.generators, &h.source), brute, "{h:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coarse_space_at_p() {
        let p = presentation(&[("s", 6), ("q", 2)]);
        let inv = relative_coarse_presentation(&p, &[vec![3, 1]], None).unwrap();
        let gens: Vec<String> = inv.generators.iter().map(|(_, m)| m.to_string()).collect();
        assert_eq!(gens, vec!["z^2", "zw", "w^2"]);
        let rels: Vec<String> = inv.relations.iter().map(|r| r.to_string()).collect();
        assert_eq!(rels, vec!["AC - B^2"]);
        assert_eq!(inv.identifications[0].1.to_string(), "A^3");
        assert_eq!(inv.identifications[1].1.to_string(), "C");
    }

    #[test]
    fn coarse_space_trivial_and_mu3() {
        let p = presentation(&[("s", 3), ("q", 3)]);
        let inv = relative_coarse_presentation(&p, &[], None).unwrap();
        assert_eq!(inv.generator_degrees(), vec![1, 1]);
        assert!(inv.relations.is_empty());
        let inv = relative_coarse_presentation(&p, &[vec![1, 2]], None).unwrap();
        let gens: Vec<String> = inv.generators.iter().map(|(_, m)| m.to_string()).collect();
        assert_eq!(gens, vec!["z^3", "zw", "w^3"]);
        let rels: Vec<String> = inv.relations.iter().map(|r| r.to_string()).collect();
        assert_eq!(rels, vec!["B^3 - AC"]);
        assert!(matches!(
            relative_coarse_presentation(&p, &[vec![1, 2]], Some(3)),
            Err(StackError::BoundExceeded { .. })
        ));
    }
}
