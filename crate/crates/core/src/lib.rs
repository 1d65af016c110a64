//! Normalized graph cuts and continuum Cheeger quantities on sampled domains.
//!
//! The crate is organized around the experiment pipeline:
//!
//! * [`constants`] — unit-ball volumes, spherical-cap volumes and the
//!   cap-average constant `gamma_d`.
//! * [`geometry`] — parametric domains (disk, rounded rectangle, annulus)
//!   and candidate cut sets (half-space, ball, rounded slab) with
//!   closed-form relative volumes, perimeters and normalized cuts.
//! * [`sampling`] — reproducible uniform rejection sampling.
//! * [`graph`] — fixed-radius neighborhood graphs, discrete cut
//!   quantities and exact small-graph conductance.
//! * [`spectral`] — power-iteration sweep cuts as a conductance upper
//!   bound.
//! * [`estimators`] — the normalized discrete estimators `mu_n`, `nu_n`,
//!   `h_n`, the penalized functional `h_n_ddag` with its family
//!   minimizer, U-statistics and the Hoeffding tail bound.
//!
//! All values are plain `f64`; degenerate cuts follow the `0/0 = inf`
//! convention and are represented by `f64::INFINITY`, which compares
//! greater than every finite value and serializes as `inf`.

pub mod constants;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod graph;
pub mod quad;
pub mod sampling;
pub mod spectral;

pub use constants::Constants;
pub use error::Error;
pub use estimators::{CandidateFamily, EstimatorContext, KernelSpec, PenalizedConfig};
pub use geometry::{CandidateSet, CutQuantities, Domain};
pub use graph::{CutEvaluation, NeighborhoodGraph, VertexSet};
pub use sampling::Sample;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
