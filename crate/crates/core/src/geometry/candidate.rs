//! Candidate cut regions with certified boundary reach.
//!
//! Three parametric families: open half-spaces (reach = infinity), open
//! balls (reach = radius) and rounded slabs. A rounded slab is the
//! morphological opening by `rounding` of (half-space ∩ clip ball):
//! erosion then dilation leaves a convex set whose boundary a ball of
//! radius `rounding` rolls along on both sides.
//!
//! Construction guarantees a *protected zone*: inside the ball of radius
//! `protect_radius` about the clip center (chosen to contain the domain)
//! the slab's corner features are unreachable, so membership and signed
//! distance reduce to the plane and clip-sphere terms exactly. This is
//! what makes offset sweeps over a slab family produce bit-identical
//! results to per-candidate evaluation.

use crate::error::Error;
use crate::Result;

use super::vecmath::{dist, dot, norm, unit2};

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateShape {
    /// Open half-space `{x : u·x > offset}` with unit normal `u`.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// Open ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Opening of `{x : u·(x - clip_center) >= offset} ∩ B(clip_center, clip_radius)`
    /// by `rounding`.
    RoundedSlab {
        normal: Vec<f64>,
        offset: f64,
        rounding: f64,
        clip_center: Vec<f64>,
        clip_radius: f64,
        /// Radial extent of the eroded corner circle; points with smaller
        /// radial component never see the corner features.
        corner_radial: f64,
        /// u·clip_center, cached so axial coordinates are reproducible.
        axial_center: f64,
    },
}

/// A candidate cut set: a parametric shape plus a complement flag that
/// exchanges `A` and `A^c` in every derived quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub shape: CandidateShape,
    pub complement: bool,
}

impl CandidateSet {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidCandidate("half-space normal must be nonzero".into()));
        }
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCandidate(format!("half-space normal must be unit, |u| = {n}")));
        }
        Ok(CandidateSet { shape: CandidateShape::HalfSpace { normal, offset }, complement: false })
    }

    /// Half-plane in 2-d from a normal angle and an offset along it,
    /// measured from `anchor`: `{x : u·(x - anchor) > offset}`.
    pub fn half_plane(angle: f64, offset: f64, anchor: [f64; 2]) -> Self {
        let u = unit2(angle);
        let abs_offset = u[0] * anchor[0] + u[1] * anchor[1] + offset;
        CandidateSet {
            shape: CandidateShape::HalfSpace { normal: u.to_vec(), offset: abs_offset },
            complement: false,
        }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidCandidate(format!("ball radius must be positive, got {radius}")));
        }
        Ok(CandidateSet { shape: CandidateShape::Ball { center, radius }, complement: false })
    }

    /// Rounded slab with clip ball sized so that every point of
    /// `B(clip_center, protect_radius)` is in the corner-free zone:
    /// we need `corner_radial >= protect_radius`, i.e.
    /// `(clip_radius - rounding)^2 >= protect^2 + (offset + rounding)^2`.
    pub fn rounded_slab(
        normal: Vec<f64>,
        offset: f64,
        rounding: f64,
        clip_center: Vec<f64>,
        protect_radius: f64,
    ) -> Result<Self> {
        let n = norm(&normal);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCandidate(format!("slab normal must be unit, |u| = {n}")));
        }
        if !(rounding > 0.0) {
            return Err(Error::InvalidCandidate(format!("slab rounding must be positive, got {rounding}")));
        }
        if !(protect_radius > 0.0) {
            return Err(Error::InvalidCandidate("slab protect radius must be positive".into()));
        }
        if offset.abs() > protect_radius {
            return Err(Error::InvalidCandidate(format!(
                "slab offset {offset} outside protected radius {protect_radius}"
            )));
        }
        let reach_ext = offset.abs() + rounding;
        let clip_radius =
            rounding + (protect_radius * protect_radius + reach_ext * reach_ext).sqrt() * (1.0 + 1e-9)
                + 0.25 * protect_radius;
        let shrunk = clip_radius - rounding;
        let corner_radial = (shrunk * shrunk - (offset + rounding) * (offset + rounding)).sqrt();
        debug_assert!(corner_radial >= protect_radius);
        let axial_center = dot(&normal, &clip_center);
        Ok(CandidateSet {
            shape: CandidateShape::RoundedSlab {
                normal,
                offset,
                rounding,
                clip_center,
                clip_radius,
                corner_radial,
                axial_center,
            },
            complement: false,
        })
    }

    pub fn complemented(&self) -> Self {
        CandidateSet { shape: self.shape.clone(), complement: !self.complement }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            CandidateShape::HalfSpace { .. } => "half-space",
            CandidateShape::Ball { .. } => "ball",
            CandidateShape::RoundedSlab { .. } => "rounded-slab",
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            CandidateShape::HalfSpace { normal, .. } => normal.len(),
            CandidateShape::Ball { center, .. } => center.len(),
            CandidateShape::RoundedSlab { normal, .. } => normal.len(),
        }
    }

    /// Certified lower bound on the reach of the shape boundary.
    pub fn certified_reach(&self) -> f64 {
        match &self.shape {
            CandidateShape::HalfSpace { .. } => f64::INFINITY,
            CandidateShape::Ball { radius, .. } => *radius,
            CandidateShape::RoundedSlab { rounding, .. } => *rounding,
        }
    }

    /// Axial coordinate `u·x - u·clip_center` for slabs and half-spaces;
    /// offset sweeps rely on this being the shared code path.
    pub fn axial(&self, x: &[f64]) -> Option<f64> {
        match &self.shape {
            CandidateShape::HalfSpace { normal, offset } => Some(dot(normal, x) - offset),
            CandidateShape::RoundedSlab { normal, axial_center, .. } => {
                Some(dot(normal, x) - axial_center)
            }
            CandidateShape::Ball { .. } => None,
        }
    }

    /// Signed distance of `x` to the boundary of the *shape*, positive
    /// inside the shape (before the complement flag).
    fn shape_signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            CandidateShape::HalfSpace { normal, offset } => dot(normal, x) - offset,
            CandidateShape::Ball { center, radius } => radius - dist(x, center),
            CandidateShape::RoundedSlab {
                normal,
                offset,
                rounding,
                clip_center,
                clip_radius,
                corner_radial,
                axial_center,
            } => {
                let a = dot(normal, x) - axial_center;
                let r2 = x
                    .iter()
                    .zip(clip_center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum::<f64>();
                let radial_sq = (r2 - a * a).max(0.0);
                if radial_sq <= corner_radial * corner_radial {
                    // Corner-free zone: exact intersection signed distance.
                    (a - offset).min(clip_radius - r2.sqrt())
                } else {
                    // Corner or sphere regime (outside the protected zone).
                    let rho = *rounding;
                    let shrunk = clip_radius - rho;
                    let plane = offset + rho;
                    let b = radial_sq.sqrt();
                    let r = r2.sqrt();
                    let d_e = if a >= plane {
                        if r <= shrunk {
                            // Inside the eroded set.
                            return rho + (a - plane).min(shrunk - r);
                        }
                        let proj_axial = a * shrunk / r;
                        if proj_axial >= plane {
                            r - shrunk
                        } else {
                            ((a - plane).powi(2) + (b - corner_radial).powi(2)).sqrt()
                        }
                    } else {
                        ((a - plane).powi(2) + (b - corner_radial).powi(2)).sqrt()
                    };
                    rho - d_e
                }
            }
        }
    }

    /// Signed distance to the boundary of the candidate set, positive
    /// inside `A` (complement flag applied).
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        let sd = self.shape_signed_distance(x);
        if self.complement {
            -sd
        } else {
            sd
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x) > 0.0
    }

    /// Whether `B(x, rho) ⊆ A`.
    pub fn contains_ball(&self, x: &[f64], rho: f64) -> bool {
        self.signed_distance(x) >= rho
    }

    pub fn to_kv(&self) -> Vec<(String, String)> {
        let fmt_vec = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut kv = vec![("kind".to_string(), self.kind_name().to_string())];
        match &self.shape {
            CandidateShape::HalfSpace { normal, offset } => {
                kv.push(("normal".into(), fmt_vec(normal)));
                kv.push(("offset".into(), offset.to_string()));
            }
            CandidateShape::Ball { center, radius } => {
                kv.push(("center".into(), fmt_vec(center)));
                kv.push(("radius".into(), radius.to_string()));
            }
            CandidateShape::RoundedSlab { normal, offset, rounding, clip_center, .. } => {
                kv.push(("normal".into(), fmt_vec(normal)));
                kv.push(("offset".into(), offset.to_string()));
                kv.push(("rounding".into(), rounding.to_string()));
                kv.push(("clip_center".into(), fmt_vec(clip_center)));
            }
        }
        kv.push(("complement".into(), self.complement.to_string()));
        kv
    }
}
