//! Parametric bounded domains with exact volume, boundary measure,
//! reach and inner parallel sets.

use crate::error::Error;
use crate::Result;

use super::vecmath::dist;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    /// Open disk (d = 2).
    Disk { radius: f64 },
    /// Axis-aligned box with rounded corners, any dimension >= 2.
    /// `half_sides` include the rounding; `rounding = 0` is a sharp box.
    Rectangle { half_sides: Vec<f64>, rounding: f64 },
    /// Open annulus `inner < |x - c| < outer` (d = 2).
    Annulus { inner: f64, outer: f64 },
}

/// A parametric bounded open domain. The `margin` is the clearance used
/// when inflating the tight bounding box into the enclosing box that
/// candidate families and rejection sampling live in.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub center: Vec<f64>,
    pub shape: DomainShape,
    pub margin: f64,
}

impl Domain {
    pub fn disk(center: [f64; 2], radius: f64, margin: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!("disk radius must be positive, got {radius}")));
        }
        Self::validated(Domain {
            center: center.to_vec(),
            shape: DomainShape::Disk { radius },
            margin,
        })
    }

    /// Rectangle from full side lengths.
    pub fn rectangle(center: Vec<f64>, sides: Vec<f64>, rounding: f64, margin: f64) -> Result<Self> {
        if sides.len() != center.len() {
            return Err(Error::DimensionMismatch(format!(
                "rectangle center has dim {} but {} side lengths given",
                center.len(),
                sides.len()
            )));
        }
        let half: Vec<f64> = sides.iter().map(|s| s / 2.0).collect();
        Self::validated(Domain {
            center,
            shape: DomainShape::Rectangle { half_sides: half, rounding },
            margin,
        })
    }

    pub fn annulus(center: [f64; 2], inner: f64, outer: f64, margin: f64) -> Result<Self> {
        Self::validated(Domain {
            center: center.to_vec(),
            shape: DomainShape::Annulus { inner, outer },
            margin,
        })
    }

    fn validated(d: Domain) -> Result<Self> {
        if !(d.margin >= 0.0) {
            return Err(Error::InvalidDomain(format!("margin must be nonnegative, got {}", d.margin)));
        }
        match &d.shape {
            DomainShape::Disk { radius } => {
                if d.center.len() != 2 {
                    return Err(Error::DimensionMismatch("disk requires a 2-d center".into()));
                }
                if !(*radius > 0.0) {
                    return Err(Error::InvalidDomain("disk radius must be positive".into()));
                }
            }
            DomainShape::Rectangle { half_sides, rounding } => {
                if half_sides.len() < 2 {
                    return Err(Error::InvalidDomain("rectangle needs dimension >= 2".into()));
                }
                if half_sides.iter().any(|a| !(*a > 0.0)) {
                    return Err(Error::InvalidDomain("rectangle sides must be positive".into()));
                }
                let min_half = half_sides.iter().cloned().fold(f64::INFINITY, f64::min);
                if !(*rounding >= 0.0) || *rounding >= min_half {
                    return Err(Error::InvalidDomain(format!(
                        "corner rounding {rounding} must lie in [0, {min_half})"
                    )));
                }
            }
            DomainShape::Annulus { inner, outer } => {
                if d.center.len() != 2 {
                    return Err(Error::DimensionMismatch("annulus requires a 2-d center".into()));
                }
                if !(*inner > 0.0) || !(*outer > *inner) {
                    return Err(Error::InvalidDomain(format!(
                        "annulus radii must satisfy 0 < inner < outer, got ({inner}, {outer})"
                    )));
                }
            }
        }
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            DomainShape::Disk { .. } => "disk",
            DomainShape::Rectangle { .. } => "rectangle",
            DomainShape::Annulus { .. } => "annulus",
        }
    }

    /// Exact volume `tau_M`.
    pub fn volume(&self) -> f64 {
        match &self.shape {
            DomainShape::Disk { radius } => std::f64::consts::PI * radius * radius,
            DomainShape::Rectangle { half_sides, rounding } => {
                rounded_box_volume(half_sides, *rounding)
            }
            DomainShape::Annulus { inner, outer } => {
                std::f64::consts::PI * (outer * outer - inner * inner)
            }
        }
    }

    /// Exact boundary measure `Vol_{d-1}(∂M)`.
    pub fn boundary_measure(&self) -> f64 {
        match &self.shape {
            DomainShape::Disk { radius } => 2.0 * std::f64::consts::PI * radius,
            DomainShape::Rectangle { half_sides, rounding } => {
                rounded_box_surface(half_sides, *rounding)
            }
            DomainShape::Annulus { inner, outer } => 2.0 * std::f64::consts::PI * (inner + outer),
        }
    }

    /// Reach of the boundary, reported as the minimum over connected
    /// boundary components of their individual reach.
    pub fn reach_of_boundary(&self) -> f64 {
        match &self.shape {
            DomainShape::Disk { radius } => *radius,
            DomainShape::Rectangle { half_sides, rounding } => {
                let min_half = half_sides.iter().cloned().fold(f64::INFINITY, f64::min);
                rounding.min(min_half)
            }
            DomainShape::Annulus { inner, .. } => *inner,
        }
    }

    /// Radius of the largest ball centered at an interior medial point.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            DomainShape::Disk { radius } => *radius,
            DomainShape::Rectangle { half_sides, .. } => {
                half_sides.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            DomainShape::Annulus { inner, outer } => (outer - inner) / 2.0,
        }
    }

    /// Radius of the smallest ball about `center` containing the closure.
    pub fn circumradius(&self) -> f64 {
        match &self.shape {
            DomainShape::Disk { radius } => *radius,
            DomainShape::Rectangle { half_sides, .. } => {
                half_sides.iter().map(|a| a * a).sum::<f64>().sqrt()
            }
            DomainShape::Annulus { outer, .. } => *outer,
        }
    }

    /// The inner parallel set `M_r = {x in M : dist(x, ∂M) >= r}` as a
    /// domain of the same parametric kind.
    pub fn inner_parallel(&self, r: f64) -> Result<Domain> {
        let inradius = self.inradius();
        if !(r > 0.0) {
            return Err(Error::InvalidDomain(format!("inner parallel offset must be positive, got {r}")));
        }
        if r >= inradius {
            return Err(Error::EmptyInnerParallel { r, inradius });
        }
        let shape = match &self.shape {
            DomainShape::Disk { radius } => DomainShape::Disk { radius: radius - r },
            DomainShape::Rectangle { half_sides, rounding } => DomainShape::Rectangle {
                half_sides: half_sides.iter().map(|a| a - r).collect(),
                rounding: (rounding - r).max(0.0),
            },
            DomainShape::Annulus { inner, outer } => DomainShape::Annulus {
                inner: inner + r,
                outer: outer - r,
            },
        };
        Ok(Domain { center: self.center.clone(), shape, margin: self.margin })
    }

    /// Signed distance to the boundary, positive inside `M`.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            DomainShape::Disk { radius } => radius - dist(x, &self.center),
            DomainShape::Rectangle { half_sides, rounding } => {
                let core_sd = sharp_box_sd(x, &self.center, half_sides, *rounding);
                -(core_sd - rounding)
            }
            DomainShape::Annulus { inner, outer } => {
                let s = dist(x, &self.center);
                (s - inner).min(outer - s)
            }
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.boundary_distance(x) > 0.0
    }

    /// Tight axis-aligned bounding box (per-axis low/high).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let ext: Vec<f64> = match &self.shape {
            DomainShape::Disk { radius } => vec![*radius; 2],
            DomainShape::Rectangle { half_sides, .. } => half_sides.clone(),
            DomainShape::Annulus { outer, .. } => vec![*outer; 2],
        };
        let lo = self.center.iter().zip(&ext).map(|(c, e)| c - e).collect();
        let hi = self.center.iter().zip(&ext).map(|(c, e)| c + e).collect();
        (lo, hi)
    }

    /// Bounding box inflated by the configured margin; the box candidate
    /// families are constructed in.
    pub fn enclosing_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (lo, hi) = self.bounding_box();
        (
            lo.iter().map(|v| v - self.margin).collect(),
            hi.iter().map(|v| v + self.margin).collect(),
        )
    }

    /// Key-value serialization consumed by the harness config parser.
    pub fn to_kv(&self) -> Vec<(String, String)> {
        let fmt_vec = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut kv = vec![
            ("kind".to_string(), self.kind_name().to_string()),
            ("center".to_string(), fmt_vec(&self.center)),
        ];
        match &self.shape {
            DomainShape::Disk { radius } => kv.push(("radius".into(), radius.to_string())),
            DomainShape::Rectangle { half_sides, rounding } => {
                let sides: Vec<f64> = half_sides.iter().map(|a| 2.0 * a).collect();
                kv.push(("sides".into(), fmt_vec(&sides)));
                kv.push(("rounding".into(), rounding.to_string()));
            }
            DomainShape::Annulus { inner, outer } => {
                kv.push(("inner".into(), inner.to_string()));
                kv.push(("outer".into(), outer.to_string()));
            }
        }
        kv.push(("margin".into(), self.margin.to_string()));
        kv
    }

    /// Inverse of [`Domain::to_kv`]. Unknown keys are rejected by the
    /// config layer, not here.
    pub fn from_kv(get: &dyn Fn(&str) -> Option<String>) -> Result<Domain> {
        let kind = get("kind").ok_or_else(|| Error::InvalidDomain("missing domain kind".into()))?;
        let parse_vec = |key: &str| -> Result<Vec<f64>> {
            let raw = get(key).ok_or_else(|| Error::InvalidDomain(format!("missing domain {key}")))?;
            raw.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::InvalidDomain(format!("bad number {tok:?} in domain {key}")))
                })
                .collect()
        };
        let parse_num = |key: &str, default: Option<f64>| -> Result<f64> {
            match get(key) {
                Some(raw) => raw
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidDomain(format!("bad number {raw:?} for domain {key}"))),
                None => default.ok_or_else(|| Error::InvalidDomain(format!("missing domain {key}"))),
            }
        };
        let margin = parse_num("margin", Some(DEFAULT_MARGIN))?;
        let center = parse_vec("center")?;
        match kind.trim() {
            "disk" => {
                let c: [f64; 2] = center
                    .clone()
                    .try_into()
                    .map_err(|_| Error::DimensionMismatch("disk center must be 2-d".into()))?;
                Domain::disk(c, parse_num("radius", None)?, margin)
            }
            "rectangle" => Domain::rectangle(
                center,
                parse_vec("sides")?,
                parse_num("rounding", Some(DEFAULT_ROUNDING))?,
                margin,
            ),
            "annulus" => {
                let c: [f64; 2] = center
                    .clone()
                    .try_into()
                    .map_err(|_| Error::DimensionMismatch("annulus center must be 2-d".into()))?;
                Domain::annulus(c, parse_num("inner", None)?, parse_num("outer", None)?, margin)
            }
            other => Err(Error::InvalidDomain(format!("unknown domain kind {other:?}"))),
        }
    }
}

/// Default corner rounding for rectangles, keeping the boundary reach positive.
pub const DEFAULT_ROUNDING: f64 = 0.02;

/// Default enclosing-box margin.
pub const DEFAULT_MARGIN: f64 = 0.5;

/// Signed distance to a rounded box reduced to its sharp core:
/// distance to the core box minus nothing (rounding applied by caller).
fn sharp_box_sd(x: &[f64], center: &[f64], half_sides: &[f64], rounding: f64) -> f64 {
    let mut out_sq = 0.0;
    let mut max_inside = f64::NEG_INFINITY;
    for i in 0..x.len() {
        let d = (x[i] - center[i]).abs() - (half_sides[i] - rounding);
        if d > 0.0 {
            out_sq += d * d;
        }
        max_inside = max_inside.max(d);
    }
    if out_sq > 0.0 {
        out_sq.sqrt()
    } else {
        max_inside
    }
}

/// Volume of the Minkowski sum (core box with half-sides `a_i - rho`) ⊕ B_rho:
/// sum over axis subsets T of `prod_{i∉T} (2 a'_i) · omega_{|T|} rho^{|T|}`.
fn rounded_box_volume(half_sides: &[f64], rho: f64) -> f64 {
    let sides: Vec<f64> = half_sides.iter().map(|a| 2.0 * (a - rho)).collect();
    let e = elementary_symmetric(&sides);
    let d = sides.len();
    let mut v = 0.0;
    for k in 0..=d {
        let omega_k = if k == 0 {
            1.0
        } else {
            crate::constants::unit_ball_volume(k).expect("k <= d <= MAX_DIM")
        };
        v += omega_k * rho.powi(k as i32) * e[d - k];
    }
    v
}

/// Surface measure, the rho-derivative of [`rounded_box_volume`] at fixed core.
fn rounded_box_surface(half_sides: &[f64], rho: f64) -> f64 {
    let sides: Vec<f64> = half_sides.iter().map(|a| 2.0 * (a - rho)).collect();
    let e = elementary_symmetric(&sides);
    let d = sides.len();
    let mut s = 0.0;
    for k in 1..=d {
        let omega_k = crate::constants::unit_ball_volume(k).expect("k <= d <= MAX_DIM");
        s += k as f64 * omega_k * rho.powi(k as i32 - 1) * e[d - k];
    }
    s
}

/// e[j] = elementary symmetric polynomial of degree j in `vals`.
fn elementary_symmetric(vals: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; vals.len() + 1];
    e[0] = 1.0;
    for &v in vals {
        for j in (1..e.len()).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

/// Witness for the ball-volume lemma on disks: a center `z` with
/// `B(z, alpha/4) ⊆ B(x, alpha) ∩ M_r`, following the constructive step
/// of the lemma (`z = x + (r + alpha/4)(y - x)/|y - x|` with `B(y, reach) ⊆ M`).
/// Only disks are supported; the lemma's constant is never assigned.
pub fn quarter_ball_witness(domain: &Domain, x: &[f64; 2], alpha: f64, r: f64) -> Result<[f64; 2]> {
    let DomainShape::Disk { radius } = domain.shape else {
        return Err(Error::Unsupported("quarter-ball witness is defined on disks only".into()));
    };
    if !(2.0 * r <= alpha && alpha <= radius) {
        return Err(Error::InvalidDomain(format!(
            "need 0 < 2r <= alpha <= reach, got r = {r}, alpha = {alpha}"
        )));
    }
    if !domain.contains(x) {
        return Err(Error::InvalidDomain("witness point must lie in M".into()));
    }
    // For a disk the free-rolling ball is B(center, radius), so y = center.
    let y = [domain.center[0], domain.center[1]];
    let dx = [y[0] - x[0], y[1] - x[1]];
    let len = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
    if len == 0.0 {
        return Ok(*x);
    }
    let step = (r + alpha / 4.0).min(len);
    Ok([x[0] + step * dx[0] / len, x[1] + step * dx[1] / len])
}
