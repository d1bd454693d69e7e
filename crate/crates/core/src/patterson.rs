//! Critical exponent and conformal boundary measures.
//!
//! The Poincaré series of the deck group has abscissa of convergence
//! `delta`, located spectrally: the weighted non-backtracking transition
//! matrix `M(s)_{ef} = exp(-s len(f))` (for `f` admissible after `e`) has
//! spectral radius strictly decreasing in `s`, and `delta` is the unique
//! root of `rho(M(s)) = 1`.  The right Perron vector `h` then realizes a
//! conformal density on boundary cylinders:
//!
//! ```text
//! mu_p(cylinder past directed tree edge d) = exp(-delta d(p, head(d))) h(d)
//! ```
//!
//! when the geodesic from `p` arrives through `d`, with the complement rule
//! on the far side.  Exponents are exact rationals; only `delta` and the
//! eigenvector are floating point, so conformality residuals reflect
//! eigenvector precision alone.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, Signed, ToPrimitive};

use crate::end::{EndCylinder, Shadow};
use crate::graph::{DirEdge, MetricGraph};
use crate::rat::{to_f64, Rat};
use crate::tree::{TreePoint, TreeVertex};
use crate::word::Word;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PattersonError {
    #[error("s = {s} is not strictly above the critical exponent {delta}")]
    SubcriticalS { s: f64, delta: f64 },
    #[error("ball enumeration exceeds the configured cap ({0})")]
    BallTooLarge(String),
    #[error("cylinder depth too shallow: Busemann value not constant yet")]
    DepthTooShallow,
    #[error("operation requires vertex basepoints")]
    NonVertexBasepoint,
    #[error("power iteration failed to converge")]
    SpectralFailure,
}

/// Perron eigendata of the non-backtracking transition matrix at the
/// critical exponent, realizing the conformal density on cylinders.
#[derive(Clone, Debug)]
pub struct GibbsWeights {
    graph: Arc<MetricGraph>,
    delta: f64,
    /// Right Perron vector, scaled so the depth-1 cylinder masses at the
    /// base vertex sum to one.
    h: Vec<f64>,
    /// Left Perron vector, scaled so that `sum(u * h) = 1`.
    u: Vec<f64>,
    /// `|rho(M(delta)) - 1|` reached by the root finder.
    residual: f64,
    /// Spectral growth-slope agreement data is cheap to recompute; only the
    /// f64 edge lengths are cached.
    len_f64: Vec<f64>,
}

/// Applies `y = (M(s) + I) x` for the non-backtracking weighted matrix.
fn apply_shifted(graph: &MetricGraph, s: f64, len_f64: &[f64], x: &[f64], y: &mut [f64]) {
    for (e, ye) in y.iter_mut().enumerate() {
        let mut acc = x[e];
        for f in graph.successors(e) {
            acc += (-s * len_f64[f]).exp() * x[f];
        }
        *ye = acc;
    }
}

/// Transposed variant for the left vector.
fn apply_shifted_t(graph: &MetricGraph, s: f64, len_f64: &[f64], x: &[f64], y: &mut [f64]) {
    y.copy_from_slice(x);
    for e in 0..graph.dir_edge_count() {
        let xe = x[e];
        for f in graph.successors(e) {
            y[f] += (-s * len_f64[f]).exp() * xe;
        }
    }
}

/// Power iteration on `M(s) + I` (the shift makes period-2 structures, such
/// as non-backtracking matrices of bipartite graphs, converge).  Returns
/// `(rho(M(s)), vector)` with the vector normalized to unit l1 mass.
fn perron(
    graph: &MetricGraph,
    s: f64,
    len_f64: &[f64],
    transpose: bool,
) -> Result<(f64, Vec<f64>), PattersonError> {
    let n = graph.dir_edge_count();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..200_000 {
        if transpose {
            apply_shifted_t(graph, s, len_f64, &x, &mut y);
        } else {
            apply_shifted(graph, s, len_f64, &x, &mut y);
        }
        let total: f64 = y.iter().sum();
        let mut diff: f64 = 0.0;
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            let v = yi / total;
            diff = diff.max((v - *xi).abs());
            *xi = v;
        }
        let moved = (total - lambda).abs();
        lambda = total;
        if diff < 1e-14 && moved < 1e-14 * lambda.max(1.0) {
            return Ok((lambda - 1.0, x));
        }
    }
    Err(PattersonError::SpectralFailure)
}

impl GibbsWeights {
    /// Locates the critical exponent and assembles the Perron data.
    ///
    /// Bisection on the strictly decreasing map `s -> rho(M(s))` over the
    /// bracket `[1e-6, 64 / min edge length]`, followed by a Newton polish
    /// using the eigenvalue perturbation formula; the residual on `rho = 1`
    /// is driven below 1e-12.
    pub fn compute(graph: Arc<MetricGraph>) -> Result<GibbsWeights, PattersonError> {
        let len_f64: Vec<f64> = (0..graph.dir_edge_count())
            .map(|d| to_f64(graph.len(d)))
            .collect();
        let mut lo = 1e-6;
        let mut hi = 64.0 / to_f64(graph.min_edge_len());
        let rho = |s: f64| -> Result<f64, PattersonError> {
            Ok(perron(&graph, s, &len_f64, false)?.0)
        };
        if rho(lo)? <= 1.0 || rho(hi)? >= 1.0 {
            return Err(PattersonError::SpectralFailure);
        }
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if rho(mid)? > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 * hi.max(1.0) {
                break;
            }
        }
        let mut delta = 0.5 * (lo + hi);
        for _ in 0..6 {
            let (rho_d, h) = perron(&graph, delta, &len_f64, false)?;
            let (_, u) = perron(&graph, delta, &len_f64, true)?;
            // d rho / d s = u^T M'(s) h / u^T h, with M' = -len(f) M_{ef}.
            let mut num = 0.0;
            let mut den = 0.0;
            for e in 0..graph.dir_edge_count() {
                den += u[e] * h[e];
                for f in graph.successors(e) {
                    num += u[e] * (-len_f64[f]) * (-delta * len_f64[f]).exp() * h[f];
                }
            }
            let step = (rho_d - 1.0) / (num / den);
            delta -= step;
            if step.abs() < 1e-15 * delta.max(1.0) {
                break;
            }
        }
        let (rho_final, mut h) = perron(&graph, delta, &len_f64, false)?;
        let (_, mut u) = perron(&graph, delta, &len_f64, true)?;
        let residual = (rho_final - 1.0).abs();
        if residual > 1e-12 {
            return Err(PattersonError::SpectralFailure);
        }
        // Normalize: depth-1 masses at the base vertex sum to 1.
        let base_k: f64 = graph
            .out_edges(graph.base_vertex())
            .iter()
            .map(|&d| (-delta * len_f64[d]).exp() * h[d])
            .sum();
        for v in h.iter_mut() {
            *v /= base_k;
        }
        let uh: f64 = u.iter().zip(h.iter()).map(|(a, b)| a * b).sum();
        for v in u.iter_mut() {
            *v /= uh;
        }
        Ok(GibbsWeights {
            graph,
            delta,
            h,
            u,
            residual,
            len_f64,
        })
    }

    pub fn graph(&self) -> &Arc<MetricGraph> {
        &self.graph
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn spectral_residual(&self) -> f64 {
        self.residual
    }

    pub fn right(&self) -> &[f64] {
        &self.h
    }

    pub fn left(&self) -> &[f64] {
        &self.u
    }

    pub fn edge_len_f64(&self, d: DirEdge) -> f64 {
        self.len_f64[d]
    }

    /// Total boundary mass as seen from `p` (the base vertex sees mass 1).
    pub fn boundary_mass(&self, p: &TreePoint) -> f64 {
        let g = self.graph.as_ref();
        match p {
            TreePoint::Vertex(tv) => g
                .out_edges(tv.vertex)
                .iter()
                .map(|&d| (-self.delta * self.len_f64[d]).exp() * self.h[d])
                .sum(),
            TreePoint::Interior { edge, offset, .. } => {
                let t = to_f64(offset);
                let len = self.len_f64[*edge];
                (-self.delta * (len - t)).exp() * self.h[*edge]
                    + (-self.delta * t).exp() * self.h[*edge ^ 1]
            }
        }
    }

    /// Conformal-density mass of a cylinder as seen from `p`.
    ///
    /// The exponent bookkeeping (tree distances) is exact rational; only
    /// `delta` and the eigenvector factors are floating point.
    pub fn cylinder_mass(&self, p: &TreePoint, c: &EndCylinder) -> f64 {
        let g = self.graph.as_ref();
        let (tail, d) = c.defining_edge(g);
        let head = g.step(&tail, d);
        let d_ph = g.distance(p, &TreePoint::Vertex(head));
        let d_pt = g.distance(p, &TreePoint::Vertex(tail));
        let len = g.len(d);
        if d_pt == &d_ph + len {
            // `p` lies past the head: complement of the reversed cylinder.
            self.boundary_mass(p) - (-self.delta * to_f64(&d_pt)).exp() * self.h[d ^ 1]
        } else {
            (-self.delta * to_f64(&d_ph)).exp() * self.h[d]
        }
    }

    /// Exact rational exponent of a base-anchored cylinder (its arclength);
    /// used by the conformality sweep so the only float error is `delta`.
    pub fn base_cylinder_mass(&self, path: &[DirEdge]) -> f64 {
        let g = self.graph.as_ref();
        let total: Rat = path.iter().map(|&d| g.len(d)).sum();
        (-self.delta * to_f64(&total)).exp() * self.h[*path.last().expect("nonempty")]
    }
}

/// Wrapper matching the operation name: critical exponent plus eigendata.
pub fn critical_exponent(graph: Arc<MetricGraph>) -> Result<GibbsWeights, PattersonError> {
    GibbsWeights::compute(graph)
}

/// Integer edge lengths after clearing denominators: `(scale D, lengths)`,
/// with `len(d) = lengths[d] / D` exactly.
fn scaled_lengths(graph: &MetricGraph, cap: u64) -> Result<(u64, Vec<u64>), PattersonError> {
    let mut lcm_den = BigInt::from(1u32);
    for e in graph.edges() {
        lcm_den = num::integer::lcm(lcm_den, e.len.denom().clone());
    }
    let to_scaled = |r: &Rat| -> Option<u64> {
        let v = (r * Rat::from_integer(lcm_den.clone())).to_integer();
        v.to_u64()
    };
    let d = lcm_den
        .to_u64()
        .ok_or_else(|| PattersonError::BallTooLarge("length denominators too large".into()))?;
    let mut lens = Vec::with_capacity(graph.dir_edge_count());
    for de in 0..graph.dir_edge_count() {
        let l = to_scaled(graph.len(de))
            .ok_or_else(|| PattersonError::BallTooLarge("edge length overflow".into()))?;
        if l == 0 || l > cap {
            return Err(PattersonError::BallTooLarge(format!(
                "scaled edge length {l} out of range"
            )));
        }
        lens.push(l);
    }
    Ok((d, lens))
}

/// Dynamic-programming table over (scaled length, final directed edge):
/// `table[n][e]` counts the non-backtracking paths out of `from` with total
/// scaled length `n` whose final edge is `e`.
fn path_dp(graph: &MetricGraph, from: usize, max_scaled: u64, lens: &[u64]) -> Vec<Vec<f64>> {
    let n = max_scaled as usize;
    let ec = graph.dir_edge_count();
    let mut table = vec![vec![0.0f64; ec]; n + 1];
    for step in 1..=n {
        for f in 0..ec {
            let lf = lens[f] as usize;
            if lf > step {
                continue;
            }
            let mut acc = 0.0;
            if lf == step && graph.tail(f) == from {
                acc += 1.0;
            }
            let prev = step - lf;
            if prev > 0 {
                let back = f ^ 1;
                // Predecessors of f are edges into tail(f) other than rev(f).
                for &g_out in graph.out_edges(graph.tail(f)) {
                    let e = g_out ^ 1; // edge INTO tail(f)
                    if e == back {
                        continue;
                    }
                    acc += table[prev][e];
                }
            }
            table[step][f] = acc;
        }
    }
    table
}

/// Partial Poincaré sum over deck elements within the given metric radius:
/// `sum exp(-s d(p, gamma q))` for `d(p, gamma q) <= radius`.
///
/// Group elements correspond bijectively to non-backtracking quotient paths
/// between the basepoints' quotient vertices, so the sum is computed by
/// dynamic programming rather than enumeration; the cap bounds the DP table.
pub fn poincare_partial(
    graph: &MetricGraph,
    s: f64,
    p: &TreePoint,
    q: &TreePoint,
    radius: &Rat,
    cap: u64,
) -> Result<f64, PattersonError> {
    let (TreePoint::Vertex(pv), TreePoint::Vertex(qv)) = (p, q) else {
        return Err(PattersonError::NonVertexBasepoint);
    };
    if radius.is_negative() {
        return Ok(0.0);
    }
    let (d_scale, lens) = scaled_lengths(graph, cap)?;
    let max_scaled = (radius * Rat::from_integer(BigInt::from(d_scale)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| PattersonError::BallTooLarge("radius overflow".into()))?;
    if max_scaled.saturating_mul(graph.dir_edge_count() as u64) > cap {
        return Err(PattersonError::BallTooLarge(format!(
            "DP table of {} cells exceeds cap {cap}",
            max_scaled * graph.dir_edge_count() as u64
        )));
    }
    let table = path_dp(graph, pv.vertex, max_scaled, &lens);
    let mut total = if pv.vertex == qv.vertex { 1.0 } else { 0.0 };
    for (n, row) in table.iter().enumerate().skip(1) {
        let mut count = 0.0;
        for (e, c) in row.iter().enumerate() {
            if graph.head(e) == qv.vertex {
                count += c;
            }
        }
        if count > 0.0 {
            total += count * (-s * n as f64 / d_scale as f64).exp();
        }
    }
    Ok(total)
}

/// Number of deck elements with `d(base, gamma base)` in `(lo, hi]`.
pub fn orbit_count_in(
    graph: &MetricGraph,
    lo: &Rat,
    hi: &Rat,
    cap: u64,
) -> Result<f64, PattersonError> {
    let (d_scale, lens) = scaled_lengths(graph, cap)?;
    let base = graph.base_vertex();
    let hi_scaled = (hi * Rat::from_integer(BigInt::from(d_scale)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| PattersonError::BallTooLarge("radius overflow".into()))?;
    if hi_scaled.saturating_mul(graph.dir_edge_count() as u64) > cap {
        return Err(PattersonError::BallTooLarge("DP table exceeds cap".into()));
    }
    let table = path_dp(graph, base, hi_scaled, &lens);
    let mut total = if lo.is_negative() { 1.0 } else { 0.0 };
    for (n, row) in table.iter().enumerate().skip(1) {
        let length = Rat::new(BigInt::from(n), BigInt::from(d_scale));
        if &length > lo && &length <= hi {
            for (e, c) in row.iter().enumerate() {
                if graph.head(e) == base {
                    total += c;
                }
            }
        }
    }
    Ok(total)
}

/// Growth-slope estimate of the critical exponent at radius `t`: counts the
/// orbit in the annulus `(t - w, t]` (w = max edge length) and returns
/// `log(count) / t`.  Falls back to the full ball if the annulus is empty.
pub fn growth_slope(graph: &MetricGraph, t: u32, cap: u64) -> Result<f64, PattersonError> {
    let t_rat = Rat::from_integer(BigInt::from(t));
    let lo = &t_rat - graph.max_edge_len();
    let annulus = orbit_count_in(graph, &lo, &t_rat, cap)?;
    let count = if annulus > 0.0 {
        annulus
    } else {
        orbit_count_in(graph, &Rat::from_integer(BigInt::from(-1)), &t_rat, cap)?
    };
    Ok(count.ln() / t as f64)
}

/// Where a cylinder-measure table came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    PattersonTruncation { s: f64, radius: Rat },
    GibbsExact,
}

/// A table of cylinder masses anchored at one basepoint.
#[derive(Clone, Debug)]
pub struct CylinderMeasure {
    pub basepoint: TreeVertex,
    pub provenance: Provenance,
    /// Masses keyed by base-anchored itinerary, all depths up to the table
    /// depth.
    pub masses: BTreeMap<Vec<DirEdge>, f64>,
}

impl CylinderMeasure {
    pub fn mass(&self, path: &[DirEdge]) -> Option<f64> {
        self.masses.get(path).copied()
    }

    pub fn depth_total(&self, depth: usize) -> f64 {
        self.masses
            .iter()
            .filter(|(k, _)| k.len() == depth)
            .map(|(_, v)| v)
            .sum()
    }
}

/// Enumerates the non-backtracking itineraries out of `v` up to `depth`.
pub fn cylinders_to_depth(graph: &MetricGraph, v: usize, depth: usize) -> Vec<Vec<DirEdge>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<DirEdge>> = graph.out_edges(v).iter().map(|&d| vec![d]).collect();
    while let Some(path) = stack.pop() {
        if path.len() < depth {
            for f in graph.successors(*path.last().unwrap()) {
                let mut next = path.clone();
                next.push(f);
                stack.push(next);
            }
        }
        out.push(path);
    }
    out.sort();
    out
}

/// Truncated Patterson construction: the orbit-sum probability measure at
/// supercritical `s`, binned into cylinders by ray direction.
///
/// Atoms sitting at the basepoint itself (the identity) are dropped and the
/// remaining atoms renormalized, so the depth-1 row is exactly a probability
/// vector.  An atom contributes to the cylinders of every prefix of its
/// direction itinerary that it can see (an atom at graph distance shorter
/// than a cylinder's depth contributes to no cylinder at that depth; such
/// interior mass vanishes in the `s -> delta`, `radius -> infinity` limit).
pub fn patterson_measure_approx(
    weights: &GibbsWeights,
    p: &TreePoint,
    s: f64,
    radius: &Rat,
    depth: usize,
    cap: u64,
) -> Result<CylinderMeasure, PattersonError> {
    let TreePoint::Vertex(pv) = p else {
        return Err(PattersonError::NonVertexBasepoint);
    };
    if s <= weights.delta() {
        return Err(PattersonError::SubcriticalS {
            s,
            delta: weights.delta(),
        });
    }
    let graph = weights.graph().as_ref();
    let (d_scale, lens) = scaled_lengths(graph, cap)?;
    let max_scaled = (radius * Rat::from_integer(BigInt::from(d_scale)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| PattersonError::BallTooLarge("radius overflow".into()))?;
    if max_scaled.saturating_mul(graph.dir_edge_count() as u64) > cap {
        return Err(PattersonError::BallTooLarge("DP table exceeds cap".into()));
    }

    // suffix[n][e]: weighted count sum exp(-s len(tail)) over non-backtracking
    // continuations after edge `e` of scaled length n that land on pv.
    let n = max_scaled as usize;
    let ec = graph.dir_edge_count();
    let mut suffix = vec![vec![0.0f64; ec]; n + 1];
    for e in 0..ec {
        if graph.head(e) == pv.vertex {
            suffix[0][e] = 1.0;
        }
    }
    for step in 1..=n {
        for e in 0..ec {
            let mut acc = 0.0;
            for f in graph.successors(e) {
                let lf = lens[f] as usize;
                if lf <= step {
                    acc += (-s * lf as f64 / d_scale as f64).exp() * suffix[step - lf][f];
                }
            }
            suffix[step][e] = acc;
        }
    }
    // Cumulative in n so each cylinder can apply its own leftover radius.
    for step in 1..=n {
        for e in 0..ec {
            suffix[step][e] += suffix[step - 1][e];
        }
    }

    let mut masses = BTreeMap::new();
    for path in cylinders_to_depth(graph, pv.vertex, depth) {
        let scaled_len: u64 = path.iter().map(|&d| lens[d]).sum();
        if scaled_len > max_scaled {
            masses.insert(path, 0.0);
            continue;
        }
        let leftover = (max_scaled - scaled_len) as usize;
        let weight = (-s * scaled_len as f64 / d_scale as f64).exp()
            * suffix[leftover][*path.last().unwrap()];
        masses.insert(path, weight);
    }
    // Normalize by the nonidentity partial sum = total depth-1 weight.
    let norm: f64 = masses
        .iter()
        .filter(|(k, _)| k.len() == 1)
        .map(|(_, v)| v)
        .sum();
    for v in masses.values_mut() {
        *v /= norm;
    }
    Ok(CylinderMeasure {
        basepoint: pv.clone(),
        provenance: Provenance::PattersonTruncation {
            s,
            radius: radius.clone(),
        },
        masses,
    })
}

/// Exact-realization table for the same cylinders.
pub fn gibbs_measure_table(
    weights: &GibbsWeights,
    p: &TreeVertex,
    depth: usize,
) -> CylinderMeasure {
    let graph = weights.graph().as_ref();
    let mut masses = BTreeMap::new();
    for path in cylinders_to_depth(graph, p.vertex, depth) {
        let c = EndCylinder::new(p.clone(), path.clone());
        masses.insert(path, weights.cylinder_mass(&TreePoint::Vertex(p.clone()), &c));
    }
    CylinderMeasure {
        basepoint: p.clone(),
        provenance: Provenance::GibbsExact,
        masses,
    }
}

/// Largest conformality defect over all cylinders of the given depth:
/// `|log(mu_q(c) / mu_p(c)) + delta * b_xi(q, p)|` with `xi` through `c`.
pub fn conformality_residual(
    weights: &GibbsWeights,
    p: &TreeVertex,
    q: &TreeVertex,
    depth: usize,
) -> Result<f64, PattersonError> {
    let graph = weights.graph().as_ref();
    let base = graph.base_tree_vertex();
    let pp = TreePoint::Vertex(p.clone());
    let qp = TreePoint::Vertex(q.clone());
    let p_path = graph.path_from_base(p);
    let q_path = graph.path_from_base(q);
    let mut worst = 0.0f64;
    for path in cylinders_to_depth(graph, base.vertex, depth) {
        if path.len() < depth {
            continue;
        }
        // b_xi(q, p) must be constant on the cylinder: the defining edge has
        // to lie past the divergence of both basepoint itineraries.
        let dp = crate::tree::common_prefix(&p_path, &path);
        let dq = crate::tree::common_prefix(&q_path, &path);
        if (dp == path.len() && dp < p_path.len()) || (dq == path.len() && dq < q_path.len()) {
            return Err(PattersonError::DepthTooShallow);
        }
        let c = EndCylinder::new(base.clone(), path.clone());
        let head = TreePoint::Vertex(c.head_vertex(graph));
        let busemann_qp = graph.distance(&qp, &head) - graph.distance(&pp, &head);
        let m_p = weights.cylinder_mass(&pp, &c);
        let m_q = weights.cylinder_mass(&qp, &c);
        let defect = ((m_q / m_p).ln() + weights.delta() * to_f64(&busemann_qp)).abs();
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// Result of sweeping Sullivan's shadow bound over a word ball.
#[derive(Clone, Debug)]
pub struct ShadowLemmaReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest mass / bound ratio attained.
    pub max_ratio: f64,
    pub worst_word: Option<Word>,
    pub c_r: f64,
}

/// Checks `mu_p(shadow_r(p, gamma p)) <= C_r exp(-delta d(p, gamma p))` with
/// `C_r = mu_p(boundary) exp(delta r)` for every nonidentity reduced word of
/// length at most `word_radius`.
pub fn shadow_lemma_check(
    weights: &GibbsWeights,
    p: &TreePoint,
    r: &Rat,
    word_radius: usize,
) -> Result<ShadowLemmaReport, crate::end::EndError> {
    let graph = weights.graph().as_ref();
    let c_r = weights.boundary_mass(p) * (weights.delta() * to_f64(r)).exp();
    let mut report = ShadowLemmaReport {
        checked: 0,
        violations: 0,
        max_ratio: 0.0,
        worst_word: None,
        c_r,
    };
    for gamma in reduced_words(graph.generator_count(), word_radius) {
        if gamma.is_identity() {
            continue;
        }
        let gp = graph.act_point(&gamma, p);
        let mass = match graph.shadow(p, &gp, r)? {
            Shadow::FullBoundary => weights.boundary_mass(p),
            Shadow::Cylinders(cyls) => cyls.iter().map(|c| weights.cylinder_mass(p, c)).sum(),
        };
        let bound = c_r * (-weights.delta() * to_f64(&graph.distance(p, &gp))).exp();
        let ratio = mass / bound;
        report.checked += 1;
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst_word = Some(gamma.clone());
        }
        if ratio > 1.0 + 1e-9 {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// All reduced words of length at most `max_len` over `gens` generators.
pub fn reduced_words(gens: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let last = w.letters().last().copied();
            for g in 0..gens {
                for inv in [false, true] {
                    let l = if inv { -((g as i32) + 1) } else { (g as i32) + 1 };
                    if last == Some(-l) {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push(Word::from_letters(letters));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};
    use approx::assert_abs_diff_eq;

    fn rose2() -> Arc<MetricGraph> {
        Arc::new(MetricGraph::rose(&[rat(1), rat(1)]))
    }

    #[test]
    fn critical_exponent_of_roses() {
        let w = GibbsWeights::compute(rose2()).unwrap();
        assert_abs_diff_eq!(w.delta(), 3.0f64.ln(), epsilon = 1e-11);
        assert!(w.spectral_residual() <= 1e-12);
        assert!(w.right().iter().all(|&x| x > 0.0));
        assert!(w.left().iter().all(|&x| x > 0.0));

        let w3 = GibbsWeights::compute(Arc::new(MetricGraph::rose(&[
            rat(1),
            rat(1),
            rat(1),
        ])))
        .unwrap();
        assert_abs_diff_eq!(w3.delta(), 5.0f64.ln(), epsilon = 1e-11);

        let wd = GibbsWeights::compute(Arc::new(MetricGraph::rose(&[rat(2), rat(2)]))).unwrap();
        assert_abs_diff_eq!(wd.delta(), 3.0f64.ln() / 2.0, epsilon = 1e-11);
    }

    #[test]
    fn left_vector_matches_reversal_identity() {
        // u(e) is proportional to exp(-delta len(e)) h(rev e).
        let g = Arc::new(MetricGraph::rose(&[rat(1), rat(2)]));
        let w = GibbsWeights::compute(g.clone()).unwrap();
        let v: Vec<f64> = (0..g.dir_edge_count())
            .map(|e| (-w.delta() * w.edge_len_f64(e)).exp() * w.right()[e ^ 1])
            .collect();
        let scale = w.left()[0] / v[0];
        for e in 0..g.dir_edge_count() {
            assert_abs_diff_eq!(w.left()[e], scale * v[e], epsilon = 1e-10);
        }
    }

    #[test]
    fn gibbs_masses_on_the_unit_rose() {
        let g = rose2();
        let w = GibbsWeights::compute(g.clone()).unwrap();
        let base = g.base_tree_vertex();
        let p = TreePoint::Vertex(base.clone());
        let mass = |path: Vec<DirEdge>| {
            w.cylinder_mass(&p, &EndCylinder::new(base.clone(), path))
        };
        assert_abs_diff_eq!(mass(vec![0]), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(mass(vec![0, 0]), 1.0 / 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mass(vec![0, 0, 2]), 1.0 / 36.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.boundary_mass(&p), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn poincare_sums() {
        let g = rose2();
        let base = TreePoint::base(&g);
        // radius 0: identity only.
        let p0 = poincare_partial(&g, 1.0, &base, &base, &rat(0), 1 << 20).unwrap();
        assert_abs_diff_eq!(p0, 1.0, epsilon = 1e-14);
        // s = 0, radius 2: 1 + 4 + 12 = 17 elements.
        let p2 = poincare_partial(&g, 0.0, &base, &base, &rat(2), 1 << 20).unwrap();
        assert_abs_diff_eq!(p2, 17.0, epsilon = 1e-12);
        // interior basepoints are rejected
        let interior = g.point_on_edge(&g.base_tree_vertex(), 0, ratio(1, 2));
        assert!(matches!(
            poincare_partial(&g, 0.0, &interior, &base, &rat(1), 1 << 20),
            Err(PattersonError::NonVertexBasepoint)
        ));
    }

    #[test]
    fn growth_slope_tracks_delta() {
        let g = rose2();
        let slope = growth_slope(&g, 20, 1 << 24).unwrap();
        assert!((slope - 3.0f64.ln()).abs() < 2e-2, "slope {slope}");
    }
}

#[cfg(test)]
mod debug_tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn debug_rose12() {
        let g = std::sync::Arc::new(MetricGraph::rose(&[rat(1), rat(2)]));
        let len_f64: Vec<f64> = (0..g.dir_edge_count()).map(|d| to_f64(g.len(d))).collect();
        let mut lo = 1e-6;
        let mut hi = 64.0;
        for it in 0..90 {
            let mid = 0.5 * (lo + hi);
            match perron(&g, mid, &len_f64, false) {
                Ok((rho, _)) => { if rho > 1.0 { lo = mid; } else { hi = mid; } }
                Err(_) => { println!("FAILS at it={it} mid={mid}"); return; }
            }
            if hi - lo < 1e-13 * hi.max(1.0) { break; }
        }
        let mut delta = 0.5 * (lo + hi);
        println!("bisection delta={delta}");
        for it in 0..6 {
            let (rho_d, h) = perron(&g, delta, &len_f64, false).unwrap();
            let (_, u) = perron(&g, delta, &len_f64, true).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for e in 0..g.dir_edge_count() {
                den += u[e] * h[e];
                for f in g.successors(e) {
                    num += u[e] * (-len_f64[f]) * (-delta * len_f64[f]).exp() * h[f];
                }
            }
            let step = (rho_d - 1.0) / (num / den);
            println!("it={it} rho={rho_d} num={num} den={den} step={step}");
            delta -= step;
        }
        let (rho_final, _) = perron(&g, delta, &len_f64, false).unwrap();
        println!("final delta={delta} residual={}", (rho_final - 1.0).abs());
    }
}
