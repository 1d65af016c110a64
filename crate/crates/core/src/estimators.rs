//! Normalized discrete estimators of continuum volume, perimeter and
//! normalized cut, the penalized restricted estimator with its family
//! minimizer, U-statistic evaluation and the Hoeffding tail bound.
//!
//! With `tau = Vol(M)`, sample size `n` and graph radius `r`:
//!
//! ```text
//! mu_n(A) = tau / (omega_d n(n-1) r^d)     · delta(A ∩ X; G)
//! nu_n(A) = tau / (gamma_d n(n-1) r^{d+1}) · sigma(A ∩ X; G)
//! h_n(A)  = nu_n(A) / min(mu_n(A), mu_n(A^c))
//!         = (omega_d / (gamma_d r)) · h(A ∩ X; G)
//! ```
//!
//! The two `h_n` routes share the same integers and differ only in
//! normalization algebra; both are computed and checked against each
//! other.

use crate::constants::Constants;
use crate::error::Error;
use crate::geometry::{CandidateSet, Domain};
use crate::graph::{NeighborhoodGraph, VertexSet};
use crate::sampling::Sample;
use crate::Result;

/// Everything needed to evaluate the discrete estimators on one
/// sampled instance.
pub struct EstimatorContext<'a> {
    pub graph: &'a NeighborhoodGraph,
    pub sample: &'a Sample,
    pub domain: &'a Domain,
    pub constants: Constants,
    tau: f64,
}

impl<'a> EstimatorContext<'a> {
    pub fn new(
        graph: &'a NeighborhoodGraph,
        sample: &'a Sample,
        domain: &'a Domain,
        constants: Constants,
    ) -> Result<Self> {
        if constants.d != domain.dim() || sample.dim() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "constants d = {}, domain d = {}, sample d = {}",
                constants.d,
                domain.dim(),
                sample.dim()
            )));
        }
        if graph.vertex_count() != sample.len() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} vertices but sample has {} points",
                graph.vertex_count(),
                sample.len()
            )));
        }
        Ok(EstimatorContext { graph, sample, domain, constants, tau: domain.volume() })
    }

    pub fn n(&self) -> usize {
        self.sample.len()
    }

    pub fn r(&self) -> f64 {
        self.graph.r
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn require_pairs(&self) -> Result<f64> {
        let n = self.n();
        if n < 2 {
            return Err(Error::TooFewPoints { n });
        }
        Ok((n * (n - 1)) as f64)
    }

    /// `tau / (omega_d n(n-1) r^d)`.
    pub fn mu_scale(&self) -> Result<f64> {
        let pairs = self.require_pairs()?;
        Ok(self.tau / (self.constants.omega_d * pairs * self.r().powi(self.constants.d as i32)))
    }

    /// `tau / (gamma_d n(n-1) r^{d+1})`.
    pub fn nu_scale(&self) -> Result<f64> {
        let pairs = self.require_pairs()?;
        Ok(self.tau
            / (self.constants.gamma_d * pairs * self.r().powi(self.constants.d as i32 + 1)))
    }

    /// Vertices whose sample points lie in `A`.
    pub fn vertices_in(&self, a: &CandidateSet) -> VertexSet {
        VertexSet::from_members(self.n(), |i| a.contains(self.sample.point(i)))
    }

    /// Discrete volume estimator `mu_n(A)`.
    pub fn mu_n(&self, a: &CandidateSet) -> Result<f64> {
        let scale = self.mu_scale()?;
        let cut = self.graph.evaluate_cut(&self.vertices_in(a));
        Ok(scale * cut.delta_s as f64)
    }

    /// Discrete perimeter estimator `nu_n(A)`.
    pub fn nu_n(&self, a: &CandidateSet) -> Result<f64> {
        let scale = self.nu_scale()?;
        let cut = self.graph.evaluate_cut(&self.vertices_in(a));
        Ok(scale * cut.sigma_s as f64)
    }

    /// Rescaling factor `omega_d / (gamma_d r)` between graph cuts and
    /// continuum cuts.
    pub fn h_rescale(&self) -> f64 {
        self.constants.omega_d / (self.constants.gamma_d * self.r())
    }

    /// Discrete normalized-cut estimator `h_n(A)`; infinite when the
    /// smaller side has no volume.
    pub fn h_n(&self, a: &CandidateSet) -> Result<f64> {
        self.require_pairs()?;
        let cut = self.graph.evaluate_cut(&self.vertices_in(a));
        let rescaled = self.h_rescale() * cut.h;
        // The ratio route nu / min(mu, mu^c) shares the integers
        // (delta, sigma); the two must agree to rounding.
        debug_assert!({
            let nu = self.nu_scale().unwrap() * cut.sigma_s as f64;
            let mu_min = self.mu_scale().unwrap() * cut.delta_s.min(cut.delta_sc) as f64;
            let ratio = crate::geometry::ratio_or_inf(nu, mu_min);
            (ratio.is_infinite() && rescaled.is_infinite())
                || (ratio - rescaled).abs() <= 1e-9 * rescaled.max(1.0)
        });
        Ok(rescaled)
    }

    /// `(omega_d / (gamma_d r)) · h(S; G)` for an explicit vertex subset.
    pub fn h_n_of_subset(&self, s: &VertexSet) -> f64 {
        self.h_rescale() * self.graph.evaluate_cut(s).h
    }
}

/// Hoeffding tail bound for centered bounded U-statistics:
/// `P(U_n >= t) <= exp(-n t^2 / (5 sigma^2 + 3 b t))`.
pub fn hoeffding_tail_bound(n: usize, t: f64, sigma2: f64, b: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewPoints { n });
    }
    if !(t > 0.0) || !(b > 0.0) || !(sigma2 >= 0.0) {
        return Err(Error::InvalidDomain(format!(
            "hoeffding bound needs t > 0, b > 0, sigma2 >= 0; got t = {t}, b = {b}, sigma2 = {sigma2}"
        )));
    }
    Ok((-(n as f64) * t * t / (5.0 * sigma2 + 3.0 * b * t)).exp())
}

/// Symmetric pair kernels for U-statistics.
pub enum KernelSpec<'a> {
    /// `phi_{A,r}(x, y) = (1_A(x) + 1_A(y))/2 · 1{|x-y| <= r}`.
    Volume { a: &'a CandidateSet, r: f64 },
    /// `(1_A(x) 1_{A^c}(y) + 1_A(y) 1_{A^c}(x))/2 · 1{|x-y| <= r}`.
    Perimeter { a: &'a CandidateSet, r: f64 },
    /// Arbitrary bounded symmetric kernel, evaluated pairwise.
    Custom(&'a dyn Fn(&[f64], &[f64]) -> f64),
}

/// `U_n(phi) = (n(n-1))^{-1} sum_{i != j} phi(X_i, X_j)`.
///
/// The two indicator kernels are summed through graph counts: the paper
/// identities give `sum phi_{A,r} = delta(S_A)` and
/// `sum phi-bar_{A,r} = sigma(S_A)` over ordered pairs, so no quadratic
/// loop is needed. Custom kernels are symmetrized explicitly.
pub fn u_statistic(kernel: &KernelSpec, sample: &Sample) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewPoints { n });
    }
    let pairs = (n * (n - 1)) as f64;
    match kernel {
        KernelSpec::Volume { a, r } => {
            let g = NeighborhoodGraph::build(sample, *r)?;
            let cut = g.evaluate_cut(&VertexSet::from_members(n, |i| a.contains(sample.point(i))));
            Ok(cut.delta_s as f64 / pairs)
        }
        KernelSpec::Perimeter { a, r } => {
            let g = NeighborhoodGraph::build(sample, *r)?;
            let cut = g.evaluate_cut(&VertexSet::from_members(n, |i| a.contains(sample.point(i))));
            Ok(cut.sigma_s as f64 / pairs)
        }
        KernelSpec::Custom(f) => {
            let mut sum = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    sum += f(sample.point(i), sample.point(j))
                        + f(sample.point(j), sample.point(i));
                }
            }
            Ok(sum / pairs)
        }
    }
}

/// Construction sizes for the penalized candidate family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams {
    /// Slab normal directions, uniformly spaced over `[0, pi)`.
    pub angles: usize,
    /// Offsets per direction, uniformly spaced over `±(circumradius - rho)`.
    pub offsets: usize,
    /// Ball centers per axis on a grid inside the domain box; 0 disables balls.
    pub ball_grid: usize,
    /// Ball radii; empty with `ball_grid > 0` selects defaults.
    pub ball_radii: Vec<f64>,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams { angles: 36, offsets: 41, ball_grid: 3, ball_radii: Vec::new() }
    }
}

/// One direction's worth of slab candidates, offsets ascending.
pub struct SlabGroup {
    pub angle: f64,
    pub offsets: Vec<f64>,
    pub candidates: Vec<CandidateSet>,
}

/// The finite candidate family of the penalized estimator: rounded slabs
/// ordered by (angle, offset), then balls by (center grid index, radius).
pub struct CandidateFamily {
    pub rho: f64,
    pub slabs: Vec<SlabGroup>,
    pub balls: Vec<CandidateSet>,
}

impl CandidateFamily {
    pub fn build(domain: &Domain, rho: f64, params: &FamilyParams) -> Result<Self> {
        if domain.dim() != 2 {
            return Err(Error::Unsupported("candidate families are built in d = 2".into()));
        }
        if !(rho > 0.0) {
            return Err(Error::InvalidCandidate(format!("family reach floor must be positive, got {rho}")));
        }
        let circ = domain.circumradius();
        if rho >= circ {
            return Err(Error::InvalidCandidate(format!(
                "reach floor {rho} at least the circumradius {circ}; no feasible slab offsets"
            )));
        }
        let center = [domain.center[0], domain.center[1]];
        let span = circ - rho;
        let mut slabs = Vec::with_capacity(params.angles);
        for ia in 0..params.angles {
            let angle = ia as f64 * std::f64::consts::PI / params.angles as f64;
            let u = crate::geometry::vecmath::unit2(angle);
            let mut offsets = Vec::with_capacity(params.offsets);
            let mut candidates = Vec::with_capacity(params.offsets);
            for io in 0..params.offsets {
                let frac = if params.offsets == 1 {
                    0.5
                } else {
                    io as f64 / (params.offsets - 1) as f64
                };
                let offset = -span + 2.0 * span * frac;
                candidates.push(CandidateSet::rounded_slab(
                    u.to_vec(),
                    offset,
                    rho,
                    center.to_vec(),
                    circ,
                )?);
                offsets.push(offset);
            }
            slabs.push(SlabGroup { angle, offsets, candidates });
        }
        let mut balls = Vec::new();
        if params.ball_grid > 0 {
            let radii: Vec<f64> = if params.ball_radii.is_empty() {
                vec![(0.2 * circ).max(rho), (0.35 * circ).max(2.0 * rho)]
            } else {
                params.ball_radii.clone()
            };
            for r in &radii {
                if *r < rho {
                    return Err(Error::InvalidCandidate(format!(
                        "ball radius {r} below the reach floor {rho}"
                    )));
                }
            }
            let (lo, hi) = domain.bounding_box();
            let g = params.ball_grid;
            for iy in 0..g {
                for ix in 0..g {
                    let cx = lo[0] + (ix as f64 + 0.5) * (hi[0] - lo[0]) / g as f64;
                    let cy = lo[1] + (iy as f64 + 0.5) * (hi[1] - lo[1]) / g as f64;
                    if !domain.contains(&[cx, cy]) {
                        continue;
                    }
                    for &r in &radii {
                        balls.push(CandidateSet::ball(vec![cx, cy], r)?);
                    }
                }
            }
        }
        Ok(CandidateFamily { rho, slabs, balls })
    }

    pub fn len(&self) -> usize {
        self.slabs.iter().map(|s| s.candidates.len()).sum::<usize>() + self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Family members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &CandidateSet> {
        self.slabs.iter().flat_map(|s| s.candidates.iter()).chain(self.balls.iter())
    }

    pub fn get(&self, idx: usize) -> Option<&CandidateSet> {
        self.iter().nth(idx)
    }
}

/// Configuration of the penalized estimator: the reach floor `rho_n`
/// (also the inscribed-ball radius) and the candidate family.
pub struct PenalizedConfig {
    pub rho: f64,
    pub family: CandidateFamily,
}

impl PenalizedConfig {
    pub fn new(rho: f64, family: CandidateFamily) -> Result<Self> {
        for c in family.iter() {
            if c.certified_reach() < rho {
                return Err(Error::InvalidCandidate(format!(
                    "family member with certified reach {} below rho = {rho}",
                    c.certified_reach()
                )));
            }
        }
        Ok(PenalizedConfig { rho, family })
    }
}

/// The penalized estimator `h_n_ddag(R)`: the rescaled graph cut when
/// both `R` and `R^c` contain a ball of radius `rho` centered at a
/// sample point, infinity otherwise. The ball test is exact geometry:
/// signed distance of the point to `∂R` at least `rho`.
pub fn h_n_ddag(ctx: &EstimatorContext, cfg: &PenalizedConfig, r: &CandidateSet) -> Result<f64> {
    ctx.require_pairs()?;
    let mut ball_in = false;
    let mut ball_out = false;
    for p in ctx.sample.iter() {
        let sd = r.signed_distance(p);
        ball_in |= sd >= cfg.rho;
        ball_out |= -sd >= cfg.rho;
        if ball_in && ball_out {
            break;
        }
    }
    if !(ball_in && ball_out) {
        return Ok(f64::INFINITY);
    }
    ctx.h_n(r)
}

/// Result of the family minimization.
pub struct MinimizeResult {
    pub value: f64,
    /// Family index and candidate attaining the minimum; `None` when the
    /// entire family is infeasible.
    pub argmin: Option<(usize, CandidateSet)>,
}

/// Exhaustive scan of the family, ties broken by family order.
///
/// Slab groups are evaluated by an offset sweep: within one direction the
/// member sets are nested, so moving the threshold updates `delta` and
/// `sigma` incrementally in integers. The sweep reproduces bit-identical
/// results to per-candidate evaluation (shared axial coordinates, exact
/// integer counts, and comparisons on the rational `sigma / min-delta`).
pub fn minimize_h_n_ddag(ctx: &EstimatorContext, cfg: &PenalizedConfig) -> Result<MinimizeResult> {
    ctx.require_pairs()?;
    let n = ctx.n();
    let g = ctx.graph;
    let total = g.total_degree();
    let rho = cfg.rho;

    // best = (sigma, min_delta, family index), compared exactly.
    let mut best: Option<(u64, u64, usize)> = None;
    let consider = |sigma: u64, min_delta: u64, idx: usize, best: &mut Option<(u64, u64, usize)>| {
        if min_delta == 0 {
            return;
        }
        let better = match *best {
            None => true,
            Some((bs, bm, _)) => (sigma as u128) * (bm as u128) < (bs as u128) * (min_delta as u128),
        };
        if better {
            *best = Some((sigma, min_delta, idx));
        }
    };

    let mut family_idx = 0usize;
    let mut in_s = vec![false; n];
    for group in &cfg.family.slabs {
        let probe = &group.candidates[0];
        // Axial coordinates are shared across the group by construction.
        let ts: Vec<f64> = (0..n).map(|i| probe.axial(ctx.sample.point(i)).unwrap()).collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| ts[a as usize].partial_cmp(&ts[b as usize]).unwrap());
        let max_t = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_t = ts.iter().cloned().fold(f64::INFINITY, f64::min);

        // Start from the lowest offset: S = {i : t_i > o_min}.
        let first = group.offsets[0];
        in_s.iter_mut().for_each(|b| *b = false);
        let mut delta = 0u64;
        for i in 0..n {
            if ts[i] > first {
                in_s[i] = true;
                delta += g.degree(i) as u64;
            }
        }
        let mut sigma = 0i64;
        for i in 0..n {
            if !in_s[i] {
                continue;
            }
            for &j in g.neighbors(i) {
                if !in_s[j as usize] {
                    sigma += 1;
                }
            }
        }
        let mut cursor = 0usize; // next point (ascending t) not yet removed
        while cursor < n && ts[order[cursor] as usize] <= first {
            cursor += 1;
        }
        for (k, &offset) in group.offsets.iter().enumerate() {
            // Remove points with t <= offset (membership is t > offset).
            while cursor < n {
                let v = order[cursor] as usize;
                if ts[v] > offset {
                    break;
                }
                if in_s[v] {
                    in_s[v] = false;
                    let mut cnt = 0i64;
                    for &w in g.neighbors(v) {
                        if in_s[w as usize] {
                            cnt += 1;
                        }
                    }
                    delta -= g.degree(v) as u64;
                    sigma -= g.degree(v) as i64 - 2 * cnt;
                }
                cursor += 1;
            }
            // Inscribed-ball feasibility: a sample point at axial depth
            // rho on each side (the clip sphere never binds inside the
            // protected zone).
            let feasible = max_t - offset >= rho && min_t - offset <= -rho;
            if feasible {
                consider(sigma as u64, delta.min(total - delta), family_idx + k, &mut best);
            }
        }
        family_idx += group.candidates.len();
    }

    for ball in &cfg.family.balls {
        let mut ball_in = false;
        let mut ball_out = false;
        let mut delta = 0u64;
        let members = VertexSet::from_members(n, |i| {
            let p = ctx.sample.point(i);
            let sd = ball.signed_distance(p);
            ball_in |= sd >= rho;
            ball_out |= -sd >= rho;
            sd > 0.0
        });
        if ball_in && ball_out {
            for i in 0..n {
                if members.contains(i) {
                    delta += g.degree(i) as u64;
                }
            }
            let cut = g.evaluate_cut(&members);
            debug_assert_eq!(cut.delta_s, delta);
            consider(cut.sigma_s, cut.delta_s.min(cut.delta_sc), family_idx, &mut best);
        }
        family_idx += 1;
    }

    match best {
        Some((sigma, min_delta, idx)) => {
            let value = ctx.h_rescale() * (sigma as f64 / min_delta as f64);
            let cand = cfg.family.get(idx).expect("index from iteration").clone();
            Ok(MinimizeResult { value, argmin: Some((idx, cand)) })
        }
        None => Ok(MinimizeResult { value: f64::INFINITY, argmin: None }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vecmath::unit2;
    use crate::sampling::{derive_seed, sample_uniform, Sample};
    use std::f64::consts::PI;

    fn unit_square() -> Domain {
        Domain::rectangle(vec![0.5, 0.5], vec![1.0, 1.0], 0.0, 0.1).unwrap()
    }

    fn ctx_parts(
        points: &[[f64; 2]],
        domain: &Domain,
        r: f64,
    ) -> (NeighborhoodGraph, Sample) {
        let flat: Vec<f64> = points.iter().flatten().copied().collect();
        let sample = Sample::from_points(flat, 2, domain.clone(), 0);
        let graph = NeighborhoodGraph::build(&sample, r).unwrap();
        (graph, sample)
    }

    #[test]
    fn mu_hand_example_three_adjacent_points() {
        // Three mutually adjacent points all in A, tau = 1, d = 2:
        // delta = 6, so mu_n = 1/(pi r^2).
        let m = unit_square();
        let r = 0.3;
        let (g, s) = ctx_parts(&[[0.5, 0.5], [0.6, 0.5], [0.55, 0.58]], &m, r);
        assert_eq!(g.edge_count, 3);
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        let a = CandidateSet::half_plane(0.0, -0.4, [0.5, 0.5]); // contains all
        let mu = ctx.mu_n(&a).unwrap();
        assert!((mu - 1.0 / (PI * r * r)).abs() < 1e-12 / (PI * r * r));
    }

    #[test]
    fn nu_hand_example_two_points_split() {
        // Two adjacent points split by A, tau = 1, d = 2, n = 2: sigma = 1,
        // so nu_n = 1/(gamma_2 · 2 · r^3) with gamma_2 = 2/3.
        let m = unit_square();
        let r = 0.2;
        let (g, s) = ctx_parts(&[[0.45, 0.5], [0.55, 0.5]], &m, r);
        assert_eq!(g.edge_count, 1);
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        let a = CandidateSet::half_plane(0.0, 0.0, [0.5, 0.5]); // x > 0.5
        let nu = ctx.nu_n(&a).unwrap();
        let want = 1.0 / ((2.0 / 3.0) * 2.0 * r.powi(3));
        assert!((nu - want).abs() < 1e-9 * want);
        // A containing all sample points: sigma = 0.
        let all = CandidateSet::half_plane(0.0, -0.4, [0.5, 0.5]);
        assert_eq!(ctx.nu_n(&all).unwrap(), 0.0);
    }

    #[test]
    fn estimators_require_two_points() {
        let m = unit_square();
        let (g, s) = ctx_parts(&[[0.5, 0.5]], &m, 0.2);
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        let a = CandidateSet::half_plane(0.0, 0.0, [0.5, 0.5]);
        assert!(matches!(ctx.mu_n(&a), Err(Error::TooFewPoints { n: 1 })));
        assert!(matches!(ctx.nu_n(&a), Err(Error::TooFewPoints { n: 1 })));
    }

    #[test]
    fn volume_additivity_and_perimeter_symmetry() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 400, 88);
        let g = NeighborhoodGraph::build(&s, 0.1).unwrap();
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        let whole = CandidateSet::half_plane(0.0, -10.0, [0.5, 0.5]);
        for k in 0..20 {
            let a = CandidateSet::half_plane(k as f64 * 0.37, (k as f64 - 10.0) * 0.03, [0.5, 0.5]);
            let mu_a = ctx.mu_n(&a).unwrap();
            let mu_ac = ctx.mu_n(&a.complemented()).unwrap();
            let mu_all = ctx.mu_n(&whole).unwrap();
            assert!((mu_a + mu_ac - mu_all).abs() <= 1e-12 * mu_all);
            let nu_a = ctx.nu_n(&a).unwrap();
            let nu_ac = ctx.nu_n(&a.complemented()).unwrap();
            assert_eq!(nu_a, nu_ac);
        }
    }

    #[test]
    fn normalization_identity() {
        // h_n(A) = (omega/(gamma r)) · h(A ∩ X; G) to 1e-12 relative,
        // on 100 random instances.
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let consts = Constants::new(2).unwrap();
        for rep in 0..100u64 {
            let s = sample_uniform(&m, 60, derive_seed(6060, rep));
            let g = NeighborhoodGraph::build(&s, 0.12).unwrap();
            let ctx = EstimatorContext::new(&g, &s, &m, consts).unwrap();
            let a = CandidateSet::half_plane(rep as f64 * 0.1, 0.05, [0.5, 0.5]);
            let cut = g.evaluate_cut(&ctx.vertices_in(&a));
            let lhs = ctx.h_n(&a).unwrap();
            let rhs = ctx.h_rescale() * cut.h;
            if lhs.is_finite() {
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "rep {rep}");
                // And the ratio route.
                let ratio = crate::geometry::ratio_or_inf(
                    ctx.nu_n(&a).unwrap(),
                    ctx.mu_n(&a).unwrap().min(ctx.mu_n(&a.complemented()).unwrap()),
                );
                assert!((ratio - lhs).abs() <= 1e-12 * lhs.max(1.0), "rep {rep}");
            }
        }
    }

    #[test]
    fn h_n_empty_candidate_is_infinite() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 50, 3);
        let g = NeighborhoodGraph::build(&s, 0.1).unwrap();
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        let far = CandidateSet::half_plane(0.0, 5.0, [0.5, 0.5]);
        assert!(ctx.h_n(&far).unwrap().is_infinite());
    }

    #[test]
    fn u_statistic_constant_and_pair() {
        let m = unit_square();
        let (_, s) = ctx_parts(&[[0.2, 0.2], [0.8, 0.7], [0.4, 0.6]], &m, 0.1);
        let c = |_: &[f64], _: &[f64]| 2.5;
        assert!((u_statistic(&KernelSpec::Custom(&c), &s).unwrap() - 2.5).abs() < 1e-15);

        let (_, s2) = ctx_parts(&[[0.2, 0.2], [0.8, 0.7]], &m, 0.1);
        let f = |x: &[f64], y: &[f64]| x[0] * y[1];
        let got = u_statistic(&KernelSpec::Custom(&f), &s2).unwrap();
        let want = 0.5 * (0.2 * 0.7 + 0.8 * 0.2);
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn u_statistic_volume_kernel_reproduces_mu() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let consts = Constants::new(2).unwrap();
        for rep in 0..50u64 {
            let s = sample_uniform(&m, 40, derive_seed(777, rep));
            let r = 0.1 + 0.002 * rep as f64;
            let g = NeighborhoodGraph::build(&s, r).unwrap();
            let ctx = EstimatorContext::new(&g, &s, &m, consts).unwrap();
            let a = CandidateSet::half_plane(0.2 * rep as f64, 0.03, [0.5, 0.5]);
            let u = u_statistic(&KernelSpec::Volume { a: &a, r }, &s).unwrap();
            let mu = ctx.mu_n(&a).unwrap();
            let scale = m.volume() / (consts.omega_d * r * r);
            assert!((u * scale - mu).abs() <= 1e-12 * mu.max(1e-12), "rep {rep}");
        }
    }

    #[test]
    fn hoeffding_bound_values_and_monotonicity() {
        let b = hoeffding_tail_bound(100, 0.1, 0.05, 1.0).unwrap();
        assert!((b - (-1.0_f64 / 0.55).exp()).abs() < 1e-15);
        // t -> 0+ gives 1.
        assert!((hoeffding_tail_bound(100, 1e-12, 0.05, 1.0).unwrap() - 1.0).abs() < 1e-9);
        // Nonincreasing in n and t.
        let mut prev = 1.0;
        for n in [2, 10, 100, 1000] {
            let v = hoeffding_tail_bound(n, 0.1, 0.05, 1.0).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        prev = 1.0;
        for k in 1..20 {
            let v = hoeffding_tail_bound(50, 0.05 * k as f64, 0.05, 1.0).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        assert!(hoeffding_tail_bound(1, 0.1, 0.05, 1.0).is_err());
        assert!(hoeffding_tail_bound(10, -0.1, 0.05, 1.0).is_err());
    }

    #[test]
    fn penalized_hand_instance() {
        // Six points on a line, slab splitting 3/3, small rho:
        // degrees (2,2,3,3,2,2), sigma = 1, delta = 7 each side,
        // so h_ddag = (omega_2/(gamma_2 r)) / 7 = pi/2.1 at r = 0.45.
        let m = unit_square();
        let r = 0.45;
        let pts = [[0.1, 0.5], [0.2, 0.5], [0.3, 0.5], [0.7, 0.5], [0.8, 0.5], [0.9, 0.5]];
        let (g, s) = ctx_parts(&pts, &m, r);
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        let rho = 0.05;
        let slab = CandidateSet::rounded_slab(
            unit2(0.0).to_vec(),
            0.0,
            rho,
            vec![0.5, 0.5],
            m.circumradius(),
        )
        .unwrap();
        let family = CandidateFamily { rho, slabs: Vec::new(), balls: Vec::new() };
        let cfg = PenalizedConfig::new(rho, family).unwrap();
        let v = h_n_ddag(&ctx, &cfg, &slab).unwrap();
        assert!((v - PI / 2.1).abs() < 1e-12);
        // Tight rho: no sample point is 0.45 deep on the small side.
        let cfg_tight = PenalizedConfig::new(
            0.45,
            CandidateFamily { rho: 0.45, slabs: Vec::new(), balls: Vec::new() },
        )
        .unwrap();
        assert!(h_n_ddag(&ctx, &cfg_tight, &slab).unwrap().is_infinite());
    }

    #[test]
    fn minimize_trivial_families() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 100, 5);
        let g = NeighborhoodGraph::build(&s, 0.15).unwrap();
        let ctx = EstimatorContext::new(&g, &s, &m, Constants::new(2).unwrap()).unwrap();
        // Single feasible slab through the center.
        let rho = 0.05;
        let family = CandidateFamily::build(
            &m,
            rho,
            &FamilyParams { angles: 1, offsets: 1, ball_grid: 0, ball_radii: vec![] },
        )
        .unwrap();
        let single = family.get(0).unwrap().clone();
        let cfg = PenalizedConfig::new(rho, family).unwrap();
        let res = minimize_h_n_ddag(&ctx, &cfg).unwrap();
        let direct = h_n_ddag(&ctx, &cfg, &single).unwrap();
        assert_eq!(res.value, direct);
        assert_eq!(res.argmin.as_ref().unwrap().0, 0);
        // Family whose offsets all violate the ball condition: rho beyond
        // any sample depth along the slab normal.
        let rho_big = 0.39;
        let fam = CandidateFamily::build(
            &m,
            rho_big,
            &FamilyParams { angles: 2, offsets: 3, ball_grid: 0, ball_radii: vec![] },
        )
        .unwrap();
        let cfg = PenalizedConfig::new(rho_big, fam).unwrap();
        let res = minimize_h_n_ddag(&ctx, &cfg).unwrap();
        // Offsets at ±(circ - rho) = ±0.01 need points 0.39 deep on both
        // sides; the disk has radius 0.4 so this is just barely possible
        // only if a sample sits within 0.01 of the rim. With offset 0 the
        // condition needs depth 0.39 on both sides: impossible since the
        // disk radius is 0.4 and the chord at depth 0.39 is tiny.
        if res.argmin.is_none() {
            assert!(res.value.is_infinite());
        }
    }

    #[test]
    fn minimize_sweep_matches_naive_scan() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let consts = Constants::new(2).unwrap();
        for rep in 0..10u64 {
            let s = sample_uniform(&m, 250, derive_seed(909, rep));
            let g = NeighborhoodGraph::build(&s, 0.16).unwrap();
            let ctx = EstimatorContext::new(&g, &s, &m, consts).unwrap();
            let rho = 0.06;
            let family = CandidateFamily::build(
                &m,
                rho,
                &FamilyParams { angles: 7, offsets: 9, ball_grid: 2, ball_radii: vec![0.1, 0.15] },
            )
            .unwrap();
            let cfg = PenalizedConfig::new(rho, family).unwrap();
            let swept = minimize_h_n_ddag(&ctx, &cfg).unwrap();
            // Naive scan in family order with strict improvement.
            let mut naive: Option<(f64, usize)> = None;
            for (idx, cand) in cfg.family.iter().enumerate() {
                let v = h_n_ddag(&ctx, &cfg, cand).unwrap();
                if v.is_finite() && naive.map_or(true, |(bv, _)| v < bv) {
                    naive = Some((v, idx));
                }
            }
            match (swept.argmin, naive) {
                (Some((idx, _)), Some((nv, nidx))) => {
                    assert_eq!(idx, nidx, "rep {rep}");
                    assert_eq!(swept.value, nv, "rep {rep}");
                }
                (None, None) => {}
                other => panic!("rep {rep}: mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn penalized_dominates_global_graph_minimum() {
        // h_ddag(R) >= (omega/(gamma r)) H(G) whenever finite.
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let consts = Constants::new(2).unwrap();
        for rep in 0..20u64 {
            let s = sample_uniform(&m, 14, derive_seed(3131, rep));
            let g = NeighborhoodGraph::build(&s, 0.22).unwrap();
            let ctx = EstimatorContext::new(&g, &s, &m, consts).unwrap();
            let (h_g, _) = g.conductance_exact().unwrap();
            let floor = ctx.h_rescale() * h_g;
            let rho = 0.04;
            let family = CandidateFamily::build(
                &m,
                rho,
                &FamilyParams { angles: 10, offsets: 11, ball_grid: 0, ball_radii: vec![] },
            )
            .unwrap();
            let cfg = PenalizedConfig::new(rho, family).unwrap();
            for cand in cfg.family.iter() {
                let v = h_n_ddag(&ctx, &cfg, cand).unwrap();
                if v.is_finite() {
                    assert!(v >= floor - 1e-12, "rep {rep}: {v} < floor {floor}");
                }
            }
        }
    }
}
