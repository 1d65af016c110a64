//! Dimensional constants: unit-ball volumes, spherical-cap volumes and
//! the cap-average constant `gamma_d`.

use crate::error::Error;
use crate::quad;
use crate::Result;

/// Largest dimension for which constants are provided.
pub const MAX_DIM: usize = 20;

/// Absolute tolerance for the `gamma_d` quadrature.
pub const GAMMA_TOL: f64 = 1e-10;

/// Volume `omega_d` of the unit d-ball, via the recurrence
/// `omega_d = omega_{d-2} · 2·pi / d` with `omega_0 = 1`, `omega_1 = 2`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionRange { d, lo: 1, hi: MAX_DIM });
    }
    let mut v = [1.0, 2.0]; // omega_0, omega_1
    for k in 2..=d {
        let next = v[0] * 2.0 * std::f64::consts::PI / k as f64;
        v = [v[1], next];
    }
    Ok(v[1])
}

/// Volume of the unit-ball cap `{x : ||x|| <= 1, <u, x> >= eta}`.
///
/// Evaluated as `omega_{d-1} · \int_eta^1 (1 - t^2)^{(d-1)/2} dt` by
/// adaptive quadrature; continuous and nonincreasing in `eta`, with
/// `cap(d, 0) = omega_d / 2` and `cap(d, 1) = 0`.
pub fn cap_volume(d: usize, eta: f64) -> Result<f64> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionRange { d, lo: 1, hi: MAX_DIM });
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EtaRange { eta });
    }
    if eta == 1.0 {
        return Ok(0.0);
    }
    if d == 1 {
        // Cross-section volume is the 0-ball volume 1: length of [eta, 1].
        return Ok(1.0 - eta);
    }
    let slice = unit_ball_volume(d - 1)?;
    let p = (d - 1) as f64 / 2.0;
    Ok(quad::integrate(
        move |t: f64| (1.0 - t * t).max(0.0).powf(p),
        eta,
        1.0,
        1e-13,
    ) * slice)
}

/// The cap-average constant `gamma_d = \int_0^1 cap(d, eta) d eta`,
/// computed by adaptive quadrature to absolute tolerance [`GAMMA_TOL`].
///
/// Closed forms (`gamma_1 = 1/2`, `gamma_2 = 2/3`, `gamma_3 = pi/4`)
/// serve as test oracles only.
pub fn gamma_constant(d: usize) -> Result<f64> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionRange { d, lo: 1, hi: MAX_DIM });
    }
    Ok(quad::integrate(
        move |eta: f64| cap_volume(d, eta.clamp(0.0, 1.0)).expect("eta in range"),
        0.0,
        1.0,
        GAMMA_TOL,
    ))
}

/// Bundle of the per-dimension constants used in estimator normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub d: usize,
    pub omega_d: f64,
    pub gamma_d: f64,
}

impl Constants {
    pub fn new(d: usize) -> Result<Self> {
        Ok(Self {
            d,
            omega_d: unit_ball_volume(d)?,
            gamma_d: gamma_constant(d)?,
        })
    }
}
