//! Known Cheeger constants and Cheeger-set orbits of the parametric
//! domains, and the L1 symmetric-difference recovery score.
//!
//! Cheeger sets are unique only up to the domain's symmetries, so the
//! recovery score of a candidate is the minimum of `Vol((R ∩ M) Δ A*)`
//! over the orbit of Cheeger sets `A*`.

use crate::error::Error;
use crate::Result;

use super::candidate::{CandidateSet, CandidateShape};
use super::chain::Chain;
use super::cut::relative_cut_quantities;
use super::domain::{Domain, DomainShape};

/// The orbit of Cheeger sets of a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum CheegerOrbit {
    /// All half-disks across a diameter: a one-parameter family of angles.
    DiskDiameters { center: [f64; 2], radius: f64 },
    /// The two half-rectangles across the center cut perpendicular to
    /// the longest axis.
    RectBisection { center: [f64; 2], axis: usize },
}

/// `H(M)` in closed form, from the known optimal bisections.
///
/// Disk: the diameter cut, `h = 2R / (pi R^2 / 2) = 4 / (pi R)`.
/// Rounded rectangle: the center cut across the longest axis,
/// `h = 2·(shortest side) / Vol(M)`; verified against a two-parameter
/// slab-family sweep in tests. Annuli have no closed form here.
pub fn cheeger_constant(m: &Domain) -> Result<f64> {
    match &m.shape {
        DomainShape::Disk { radius } => Ok(4.0 / (std::f64::consts::PI * radius)),
        DomainShape::Rectangle { half_sides, .. } => {
            if half_sides.len() != 2 {
                return Err(Error::Unsupported("rectangle Cheeger constant implemented for d = 2".into()));
            }
            let short = 2.0 * half_sides[0].min(half_sides[1]);
            Ok(2.0 * short / m.volume())
        }
        DomainShape::Annulus { .. } => Err(Error::Unsupported(
            "no closed-form Cheeger constant for the annulus".into(),
        )),
    }
}

pub fn cheeger_orbit(m: &Domain) -> Result<CheegerOrbit> {
    match &m.shape {
        DomainShape::Disk { radius } => Ok(CheegerOrbit::DiskDiameters {
            center: [m.center[0], m.center[1]],
            radius: *radius,
        }),
        DomainShape::Rectangle { half_sides, .. } => {
            if half_sides.len() != 2 {
                return Err(Error::Unsupported("rectangle Cheeger orbit implemented for d = 2".into()));
            }
            let axis = if half_sides[0] >= half_sides[1] { 0 } else { 1 };
            Ok(CheegerOrbit::RectBisection { center: [m.center[0], m.center[1]], axis })
        }
        DomainShape::Annulus { .. } => {
            Err(Error::Unsupported("no known Cheeger orbit for the annulus".into()))
        }
    }
}

/// Grid resolution of the fallback scorer.
const GRID: usize = 2048;
const ANGLE_BINS: usize = 4096;

/// `min_{A* in orbit} Vol((R ∩ M) Δ A*)`.
///
/// Axial candidates against the disk orbit admit a closed form: aligning
/// the diameter with the slab normal nests the two sets, so the minimum
/// is `|Vol(R ∩ M) - Vol(M)/2|` (and `Vol(A Δ B) >= |Vol A - Vol B|`
/// shows nothing beats alignment). Other combinations use a midpoint
/// grid of `GRID`^2 cells.
pub fn l1_recovery_score(a: &CandidateSet, m: &Domain) -> Result<f64> {
    let orbit = cheeger_orbit(m)?;
    match (&orbit, is_axial(a)) {
        (CheegerOrbit::DiskDiameters { .. }, true) => {
            let q = relative_cut_quantities(a, m)?;
            Ok((q.vol_in - m.volume() / 2.0).abs())
        }
        (CheegerOrbit::DiskDiameters { center, .. }, false) => {
            Ok(grid_score_disk_orbit(a, m, *center).0)
        }
        (CheegerOrbit::RectBisection { center, axis }, true) => {
            let mut best = f64::INFINITY;
            for positive in [false, true] {
                best = best.min(axial_vs_bisection(a, m, *center, *axis, positive)?);
            }
            Ok(best)
        }
        (CheegerOrbit::RectBisection { center, axis }, false) => {
            let mut best = f64::INFINITY;
            for positive in [false, true] {
                best = best.min(grid_score_vs_halfplane(a, m, *center, *axis, positive));
            }
            Ok(best)
        }
    }
}

/// The orbit element nearest to the candidate in L1, used by the
/// discrete-measure experiment as the finite-sample comparison target.
pub fn nearest_orbit_element(a: &CandidateSet, m: &Domain) -> Result<CandidateSet> {
    match cheeger_orbit(m)? {
        CheegerOrbit::DiskDiameters { center, .. } => match (&a.shape, a.complement) {
            (CandidateShape::HalfSpace { normal, .. }, comp)
            | (CandidateShape::RoundedSlab { normal, .. }, comp) => {
                let sign = if comp { -1.0 } else { 1.0 };
                Ok(CandidateSet::half_space(
                    vec![sign * normal[0], sign * normal[1]],
                    sign * normal[0] * center[0] + sign * normal[1] * center[1],
                )?)
            }
            (CandidateShape::Ball { .. }, _) => {
                let (_, angle) = grid_score_disk_orbit(a, m, center);
                Ok(CandidateSet::half_plane(angle, 0.0, center))
            }
        },
        CheegerOrbit::RectBisection { center, axis } => {
            let mut best = (f64::INFINITY, false);
            for positive in [false, true] {
                let score = if is_axial(a) {
                    axial_vs_bisection(a, m, center, axis, positive)?
                } else {
                    grid_score_vs_halfplane(a, m, center, axis, positive)
                };
                if score < best.0 {
                    best = (score, positive);
                }
            }
            let mut normal = vec![0.0, 0.0];
            normal[axis] = if best.1 { 1.0 } else { -1.0 };
            let offset = normal[0] * center[0] + normal[1] * center[1];
            CandidateSet::half_space(normal, offset)
        }
    }
}

fn is_axial(a: &CandidateSet) -> bool {
    matches!(a.shape, CandidateShape::HalfSpace { .. } | CandidateShape::RoundedSlab { .. })
}

/// Exact `Vol((A ∩ M) Δ H)` for an axial candidate and an axis-aligned
/// bisection half-plane, via two successive chain clips.
fn axial_vs_bisection(
    a: &CandidateSet,
    m: &Domain,
    center: [f64; 2],
    axis: usize,
    positive: bool,
) -> Result<f64> {
    let DomainShape::Rectangle { half_sides, rounding } = &m.shape else {
        return Err(Error::Unsupported("bisection scoring requires a rectangle".into()));
    };
    let (u, t_abs, flip) = axial_plane(a)?;
    let mut h_u = [0.0, 0.0];
    h_u[axis] = if positive { 1.0 } else { -1.0 };
    let h_t = h_u[0] * center[0] + h_u[1] * center[1];
    let chain =
        Chain::rounded_rect([m.center[0], m.center[1]], half_sides[0], half_sides[1], *rounding);
    // Vol(A ∩ H ∩ M) by clipping twice; for a complemented candidate the
    // "inside" half-plane flips.
    let (cu, ct) = if flip { ([-u[0], -u[1]], -t_abs) } else { (u, t_abs) };
    let inter = chain.clip_halfplane(cu, ct).region.clip_halfplane(h_u, h_t).region.area();
    let vol_a = relative_cut_quantities(a, m)?.vol_in;
    let vol_h = chain.clip_halfplane(h_u, h_t).region.area();
    Ok(vol_a + vol_h - 2.0 * inter)
}

/// Normal/absolute-offset of an axial candidate's hyperplane (before the
/// complement flag); `flip` reports the complement.
fn axial_plane(a: &CandidateSet) -> Result<([f64; 2], f64, bool)> {
    match &a.shape {
        CandidateShape::HalfSpace { normal, offset } => {
            Ok(([normal[0], normal[1]], *offset, a.complement))
        }
        CandidateShape::RoundedSlab { normal, offset, axial_center, .. } => {
            Ok(([normal[0], normal[1]], axial_center + offset, a.complement))
        }
        CandidateShape::Ball { .. } => {
            Err(Error::InvalidCandidate("ball candidates have no axial plane".into()))
        }
    }
}

/// Midpoint-grid score against the full diameter orbit using angular
/// bins: for a half-disk at angle `phi` the symmetric difference is
/// `window_total - 2·window_in + total_in` over the direction window of
/// width pi centered at `phi`. Returns (best score, best angle).
fn grid_score_disk_orbit(a: &CandidateSet, m: &Domain, center: [f64; 2]) -> (f64, f64) {
    use std::f64::consts::TAU;
    let (lo, hi) = m.bounding_box();
    let cell = [(hi[0] - lo[0]) / GRID as f64, (hi[1] - lo[1]) / GRID as f64];
    let cell_area = cell[0] * cell[1];
    let mut tot = vec![0u32; ANGLE_BINS];
    let mut in_r = vec![0u32; ANGLE_BINS];
    let mut total_in = 0u64;
    for i in 0..GRID {
        let x = lo[0] + (i as f64 + 0.5) * cell[0];
        for j in 0..GRID {
            let y = lo[1] + (j as f64 + 0.5) * cell[1];
            if !m.contains(&[x, y]) {
                continue;
            }
            let ang = (y - center[1]).atan2(x - center[0]).rem_euclid(TAU);
            let bin = ((ang / TAU * ANGLE_BINS as f64) as usize).min(ANGLE_BINS - 1);
            tot[bin] += 1;
            if a.contains(&[x, y]) {
                in_r[bin] += 1;
                total_in += 1;
            }
        }
    }
    // Circular prefix sums for half-turn windows.
    let half = ANGLE_BINS / 2;
    let mut window_tot: u64 = tot[..half].iter().map(|&v| v as u64).sum();
    let mut window_in: u64 = in_r[..half].iter().map(|&v| v as u64).sum();
    let mut best = (u64::MAX, 0usize);
    for b in 0..ANGLE_BINS {
        // Window [b, b + half): half-disk centered at the angle of bin b + half/2.
        // Vol(Delta) counts cells in the window not in R plus cells in R outside it.
        let diff = (window_tot + total_in).saturating_sub(2 * window_in);
        if diff < best.0 {
            best = (diff, b);
        }
        window_tot -= tot[b] as u64;
        window_in -= in_r[b] as u64;
        let nb = (b + half) % ANGLE_BINS;
        window_tot += tot[nb] as u64;
        window_in += in_r[nb] as u64;
    }
    let angle = (best.1 as f64 + half as f64 / 2.0) / ANGLE_BINS as f64 * TAU;
    (best.0 as f64 * cell_area, angle)
}

/// Midpoint-grid `Vol((A ∩ M) Δ H)` against one axis-aligned half-plane.
fn grid_score_vs_halfplane(
    a: &CandidateSet,
    m: &Domain,
    center: [f64; 2],
    axis: usize,
    positive: bool,
) -> f64 {
    let (lo, hi) = m.bounding_box();
    let cell = [(hi[0] - lo[0]) / GRID as f64, (hi[1] - lo[1]) / GRID as f64];
    let mut count = 0u64;
    for i in 0..GRID {
        let x = lo[0] + (i as f64 + 0.5) * cell[0];
        for j in 0..GRID {
            let y = lo[1] + (j as f64 + 0.5) * cell[1];
            let p = [x, y];
            if !m.contains(&p) {
                continue;
            }
            let side = (p[axis] - center[axis]) * if positive { 1.0 } else { -1.0 } > 0.0;
            if a.contains(&p) != side {
                count += 1;
            }
        }
    }
    count as f64 * cell[0] * cell[1]
}
