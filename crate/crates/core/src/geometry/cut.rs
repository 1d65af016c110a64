//! Relative cut quantities of candidate sets against domains: the
//! relative perimeter `Vol_{d-1}(∂A ∩ M)`, the two side volumes and the
//! normalized cut `h(A; M)`, plus exact tube volumes for the parametric
//! candidates.

use crate::error::Error;
use crate::Result;

use super::candidate::{CandidateSet, CandidateShape};
use super::chain::Chain;
use super::domain::{Domain, DomainShape};
use super::vecmath::{dist, dot, perp2};

/// Relative cut quantities of a candidate `A` against a domain `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutQuantities {
    /// `Vol_{d-1}(∂A ∩ M)`.
    pub perimeter: f64,
    /// `Vol_d(A ∩ M)`.
    pub vol_in: f64,
    /// `Vol_d(A^c ∩ M)`.
    pub vol_out: f64,
    /// `perimeter / min(vol_in, vol_out)`, with `0/0 = inf`.
    pub h: f64,
}

/// The `0/0 = inf` convention: an empty or full cut is infinitely bad.
pub fn ratio_or_inf(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Area of the circular segment `{x in disk(R) : axial >= s}`.
pub fn disk_segment_area(radius: f64, s: f64) -> f64 {
    if s >= radius {
        0.0
    } else if s <= -radius {
        std::f64::consts::PI * radius * radius
    } else {
        radius * radius * (s / radius).acos() - s * (radius * radius - s * s).sqrt()
    }
}

/// Chord length of the line at signed offset `s` from the disk center.
pub fn disk_chord(radius: f64, s: f64) -> f64 {
    2.0 * (radius * radius - s * s).max(0.0).sqrt()
}

/// Area of the intersection of two disks at center distance `d`.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    use std::f64::consts::PI;
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let c1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let c2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * k.max(0.0).sqrt()
}

/// Length of the circle `∂B(c1, r1)` inside the open disk `B(c2, r2)`,
/// centers at distance `d`.
pub fn circle_arc_inside(r1: f64, r2: f64, d: f64) -> f64 {
    use std::f64::consts::PI;
    if d >= r1 + r2 || d + r2 <= r1 {
        return 0.0; // disjoint, or the second disk is inside the circle
    }
    if d + r1 <= r2 {
        return 2.0 * PI * r1; // circle entirely inside
    }
    let c1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    2.0 * r1 * c1.acos()
}

/// Tolerance for the 1-D quadrature fallback of cut quantities.
pub const CUT_QUAD_TOL: f64 = 1e-9;

/// Compute `(perimeter, vol_in, vol_out, h)` for a candidate against a
/// domain. Closed forms cover axial cuts (half-spaces, reducible rounded
/// slabs) against all domain kinds and balls against disk/annulus; the
/// remaining pairs fall back to 1-D adaptive quadrature along the cut at
/// tolerance [`CUT_QUAD_TOL`].
pub fn relative_cut_quantities(a: &CandidateSet, m: &Domain) -> Result<CutQuantities> {
    if a.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "candidate dim {} vs domain dim {}",
            a.dim(),
            m.dim()
        )));
    }
    if m.dim() != 2 {
        return Err(Error::Unsupported("cut quantities are implemented for d = 2".into()));
    }
    let (perimeter, vol_a, vol_ac) = match &a.shape {
        CandidateShape::HalfSpace { normal, offset } => {
            let u = [normal[0], normal[1]];
            axial_cut(m, u, *offset)?
        }
        CandidateShape::RoundedSlab {
            normal, offset, clip_center, corner_radial, axial_center, ..
        } => {
            // Valid only when the whole domain sits in the corner-free zone,
            // where the slab boundary coincides with its hyperplane.
            let reach_from_clip = dist(clip_center, &m.center) + m.circumradius();
            if reach_from_clip > *corner_radial {
                return Err(Error::InvalidCandidate(
                    "rounded slab does not protect the whole domain; rebuild with a larger protect radius".into(),
                ));
            }
            let u = [normal[0], normal[1]];
            axial_cut(m, u, axial_center + offset)?
        }
        CandidateShape::Ball { center, radius } => {
            let c = [center[0], center[1]];
            ball_cut(m, c, *radius)?
        }
    };
    let (vol_in, vol_out) = if a.complement { (vol_ac, vol_a) } else { (vol_a, vol_ac) };
    Ok(CutQuantities { perimeter, vol_in, vol_out, h: ratio_or_inf(perimeter, vol_in.min(vol_out)) })
}

/// Cut of `{u·x > t}` against the domain: returns the relative perimeter
/// and the volumes of the two sides. Both sides are evaluated by the
/// same closed-form route, so degenerate cuts give an exact zero volume
/// rather than rounding residue (the `0/0 = inf` convention depends on it).
fn axial_cut(m: &Domain, u: [f64; 2], t: f64) -> Result<(f64, f64, f64)> {
    let s = t - dot(&u, &m.center); // signed offset from the domain center
    match &m.shape {
        DomainShape::Disk { radius } => Ok((
            disk_chord(*radius, s),
            disk_segment_area(*radius, s),
            disk_segment_area(*radius, -s),
        )),
        DomainShape::Annulus { inner, outer } => Ok((
            disk_chord(*outer, s) - disk_chord(*inner, s),
            disk_segment_area(*outer, s) - disk_segment_area(*inner, s),
            disk_segment_area(*outer, -s) - disk_segment_area(*inner, -s),
        )),
        DomainShape::Rectangle { half_sides, rounding } => {
            let chain = Chain::rounded_rect(
                [m.center[0], m.center[1]],
                half_sides[0],
                half_sides[1],
                *rounding,
            );
            let clipped = chain.clip_halfplane(u, t);
            let other = chain.clip_halfplane([-u[0], -u[1]], -t);
            Ok((clipped.cut_length, clipped.region.area(), other.region.area()))
        }
    }
}

/// Cut of an open ball against the domain.
fn ball_cut(m: &Domain, c: [f64; 2], radius: f64) -> Result<(f64, f64, f64)> {
    let total = m.volume();
    match &m.shape {
        DomainShape::Disk { radius: big } => {
            let d = dist(&c, &m.center);
            let vol = lens_area(radius, *big, d);
            let out = if d + *big <= radius { 0.0 } else { total - vol };
            Ok((circle_arc_inside(radius, *big, d), vol, out))
        }
        DomainShape::Annulus { inner, outer } => {
            let d = dist(&c, &m.center);
            let vol = lens_area(radius, *outer, d) - lens_area(radius, *inner, d);
            let out = if d + *outer <= radius { 0.0 } else { total - vol };
            Ok((
                circle_arc_inside(radius, *outer, d) - circle_arc_inside(radius, *inner, d),
                vol,
                out,
            ))
        }
        DomainShape::Rectangle { half_sides, rounding } => {
            // Exact containment tests keep the degenerate cases exact.
            let farthest = {
                // Farthest point of the rounded rectangle from c: a core
                // corner pushed out by the rounding.
                let dx = (c[0] - m.center[0]).abs() + (half_sides[0] - rounding);
                let dy = (c[1] - m.center[1]).abs() + (half_sides[1] - rounding);
                (dx * dx + dy * dy).sqrt() + rounding
            };
            if farthest <= radius {
                return Ok((0.0, total, 0.0)); // ball covers M
            }
            if -m.boundary_distance(&c) >= radius {
                return Ok((0.0, 0.0, total)); // ball misses M
            }
            // Quadrature along the first axis: area of ball ∩ M.
            let vol = crate::quad::integrate(
                |x| {
                    let half = (radius * radius - (x - c[0]) * (x - c[0])).max(0.0).sqrt();
                    overlap_length(m, x, c[1] - half, c[1] + half)
                },
                c[0] - radius,
                c[0] + radius,
                CUT_QUAD_TOL,
            )
            .clamp(0.0, total);
            // Perimeter: angular intervals where the circle lies inside M.
            let per = radius * circle_angle_inside(m, c, radius);
            Ok((per, vol, total - vol))
        }
    }
}

/// Length of `{(x, y) : y in [y0, y1]} ∩ M` on the vertical line at `x`.
fn overlap_length(m: &Domain, x: f64, y0: f64, y1: f64) -> f64 {
    line_intervals(m, [x, y0.min(y1)], [0.0, 1.0])
        .into_iter()
        .map(|(a, b)| {
            let lo = a.max(0.0);
            let hi = b.min(y1 - y0);
            (hi - lo).max(0.0)
        })
        .sum()
}

/// Total angle (radians) of the circle `c + r e(theta)` inside `M`,
/// located by sign scanning of the boundary distance plus bisection.
fn circle_angle_inside(m: &Domain, c: [f64; 2], r: f64) -> f64 {
    use std::f64::consts::TAU;
    const SCAN: usize = 2048;
    let at = |theta: f64| -> f64 {
        m.boundary_distance(&[c[0] + r * theta.cos(), c[1] + r * theta.sin()])
    };
    let mut crossings: Vec<f64> = Vec::new();
    let mut prev = at(0.0);
    for k in 1..=SCAN {
        let theta = k as f64 * TAU / SCAN as f64;
        let cur = at(theta);
        if (prev > 0.0) != (cur > 0.0) {
            let mut lo = (k - 1) as f64 * TAU / SCAN as f64;
            let mut hi = theta;
            let lo_pos = prev > 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (at(mid) > 0.0) == lo_pos {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    if crossings.is_empty() {
        return if at(0.37) > 0.0 { TAU } else { 0.0 };
    }
    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut inside = 0.0;
    for i in 0..crossings.len() {
        let a = crossings[i];
        let b = if i + 1 < crossings.len() { crossings[i + 1] } else { crossings[0] + TAU };
        if at(0.5 * (a + b)) > 0.0 {
            inside += b - a;
        }
    }
    inside
}

/// Parameter intervals of the line `origin + t·dir` inside `M` (`dir` unit).
pub fn line_intervals(m: &Domain, origin: [f64; 2], dir: [f64; 2]) -> Vec<(f64, f64)> {
    let mut ts: Vec<f64> = Vec::new();
    let circle = |c: [f64; 2], radius: f64, ts: &mut Vec<f64>| {
        let oc = [origin[0] - c[0], origin[1] - c[1]];
        let b = dir[0] * oc[0] + dir[1] * oc[1];
        let c0 = oc[0] * oc[0] + oc[1] * oc[1] - radius * radius;
        let disc = b * b - c0;
        if disc > 0.0 {
            let root = disc.sqrt();
            ts.push(-b - root);
            ts.push(-b + root);
        }
    };
    match &m.shape {
        DomainShape::Disk { radius } => circle([m.center[0], m.center[1]], *radius, &mut ts),
        DomainShape::Annulus { inner, outer } => {
            let c = [m.center[0], m.center[1]];
            circle(c, *inner, &mut ts);
            circle(c, *outer, &mut ts);
        }
        DomainShape::Rectangle { half_sides, rounding } => {
            let chain = Chain::rounded_rect(
                [m.center[0], m.center[1]],
                half_sides[0],
                half_sides[1],
                *rounding,
            );
            chain_line_crossings(&chain, origin, dir, &mut ts);
        }
    }
    if ts.is_empty() {
        return Vec::new();
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut intervals = Vec::new();
    for w in ts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let p = [origin[0] + mid * dir[0], origin[1] + mid * dir[1]];
        if m.contains(&p) {
            intervals.push((w[0], w[1]));
        }
    }
    intervals
}

/// Collect line-boundary crossing parameters against a chain.
fn chain_line_crossings(chain: &Chain, origin: [f64; 2], dir: [f64; 2], ts: &mut Vec<f64>) {
    use super::chain::Element;
    for el in &chain.elements {
        match *el {
            Element::Seg { a, b } => {
                // origin + t·dir = a + s·(b - a), 0 <= s <= 1.
                let e = [b[0] - a[0], b[1] - a[1]];
                let det = dir[0] * (-e[1]) - dir[1] * (-e[0]);
                if det.abs() < 1e-15 {
                    continue;
                }
                let rhs = [a[0] - origin[0], a[1] - origin[1]];
                let t = (rhs[0] * (-e[1]) - rhs[1] * (-e[0])) / det;
                let s = (dir[0] * rhs[1] - dir[1] * rhs[0]) / det;
                if (0.0..=1.0).contains(&s) {
                    ts.push(t);
                }
            }
            Element::Arc { a, b, center, radius } => {
                let oc = [origin[0] - center[0], origin[1] - center[1]];
                let bq = dir[0] * oc[0] + dir[1] * oc[1];
                let c0 = oc[0] * oc[0] + oc[1] * oc[1] - radius * radius;
                let disc = bq * bq - c0;
                if disc <= 0.0 {
                    continue;
                }
                let root = disc.sqrt();
                for t in [-bq - root, -bq + root] {
                    let p = [origin[0] + t * dir[0], origin[1] + t * dir[1]];
                    let tp = (p[1] - center[1]).atan2(p[0] - center[0]);
                    let ta = (a[1] - center[1]).atan2(a[0] - center[0]);
                    let tb = (b[1] - center[1]).atan2(b[0] - center[0]);
                    let span = {
                        let mut s = (tb - ta) % std::f64::consts::TAU;
                        if s < 0.0 {
                            s += std::f64::consts::TAU;
                        }
                        s
                    };
                    let off = {
                        let mut o = (tp - ta) % std::f64::consts::TAU;
                        if o < 0.0 {
                            o += std::f64::consts::TAU;
                        }
                        o
                    };
                    if off <= span {
                        ts.push(t);
                    }
                }
            }
        }
    }
}

/// Total chord length of the line `{x : u·x = t}` inside `M`.
pub fn chord_length(m: &Domain, u: [f64; 2], t: f64) -> f64 {
    let origin = [u[0] * t, u[1] * t];
    line_intervals(m, origin, perp2(u)).iter().map(|(a, b)| b - a).sum()
}

/// Integrate `f` over `{x : u·x >= t} ∩ M` by nested adaptive quadrature.
pub fn integrate_halfplane_region<F: Fn(f64, f64) -> f64>(
    m: &Domain,
    u: [f64; 2],
    t: f64,
    f: F,
    tol: f64,
) -> f64 {
    let s_hi = dot(&u, &m.center) + m.circumradius();
    if t >= s_hi {
        return 0.0;
    }
    let s_lo = t.max(dot(&u, &m.center) - m.circumradius());
    let v = perp2(u);
    let inner_tol = tol / (s_hi - s_lo).max(1e-9) / 8.0;
    crate::quad::integrate(
        |s| {
            let origin = [u[0] * s, u[1] * s];
            line_intervals(m, origin, v)
                .into_iter()
                .map(|(t0, t1)| {
                    crate::quad::integrate(
                        |w| f(origin[0] + w * v[0], origin[1] + w * v[1]),
                        t0,
                        t1,
                        inner_tol,
                    )
                })
                .sum::<f64>()
        },
        s_lo,
        s_hi,
        tol,
    )
}

/// Exact tube volume around the candidate boundary at radius `r`, for
/// `r < certified_reach`. Half-spaces use their relative boundary inside
/// `M` (the infinite hyperplane has unbounded tube); balls and slabs use
/// their full boundary.
pub fn tube_volume(a: &CandidateSet, m: &Domain, r: f64) -> Result<f64> {
    let reach = a.certified_reach();
    if !(r < reach) {
        return Err(Error::TubeRadius { r, reach });
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidCandidate(format!("tube radius must be nonnegative, got {r}")));
    }
    match &a.shape {
        CandidateShape::Ball { center, radius } => {
            let d = center.len();
            let omega = crate::constants::unit_ball_volume(d)?;
            Ok(omega * ((radius + r).powi(d as i32) - (radius - r).powi(d as i32)))
        }
        CandidateShape::HalfSpace { normal, offset } => {
            if m.dim() != 2 {
                return Err(Error::Unsupported("half-space tube volume implemented for d = 2".into()));
            }
            let chord = chord_length(m, [normal[0], normal[1]], *offset);
            Ok(2.0 * chord * r)
        }
        CandidateShape::RoundedSlab {
            offset, rounding, clip_radius, corner_radial, ..
        } => {
            if a.dim() != 2 {
                return Err(Error::Unsupported("slab tube volume implemented for d = 2".into()));
            }
            // Boundary pieces: flat face of length 2·corner_radial, two
            // rounding arcs, and the clip-circle arc. In the plane the
            // exact tube of a segment/arc of length L is 2·L·r.
            let shrunk = clip_radius - rounding;
            let psi = std::f64::consts::PI - ((offset + rounding) / shrunk).clamp(-1.0, 1.0).acos();
            let corner_angle_from_axis = ((offset + rounding) / shrunk).clamp(-1.0, 1.0).acos();
            let big_arc = 2.0 * (std::f64::consts::PI - corner_angle_from_axis);
            let per = 2.0 * corner_radial + 2.0 * rounding * psi + clip_radius * big_arc;
            Ok(2.0 * per * r)
        }
    }
}
