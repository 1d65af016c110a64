//! Parametric domains, candidate cut sets and their exact continuum
//! quantities.

pub mod candidate;
pub mod chain;
pub mod cut;
pub mod domain;
pub mod recover;
pub mod vecmath;

pub use candidate::{CandidateSet, CandidateShape};
pub use cut::{
    chord_length, circle_arc_inside, disk_chord, disk_segment_area, integrate_halfplane_region,
    lens_area, line_intervals, ratio_or_inf, relative_cut_quantities, tube_volume, CutQuantities,
};
pub use domain::{quarter_ball_witness, Domain, DomainShape, DEFAULT_MARGIN, DEFAULT_ROUNDING};
pub use recover::{
    cheeger_constant, cheeger_orbit, l1_recovery_score, nearest_orbit_element, CheegerOrbit,
};
