//! Numerical verification of stability properties of higher-dimensional
//! catenoids in `R^{n+1}`, `n >= 3`.
//!
//! The crate builds the catenoid profile curve, evaluates its curvature
//! quantities, checks the Simons identity and its equality case, and
//! computes Dirichlet spectra and the Morse index of the stability operator
//! `L = Δ + (1-δ)|A|²` by separating spherical-harmonic modes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod dd;
pub mod cli;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod simons;
pub mod spectrum;

pub use error::{Error, Result};
pub use exec::Execution;
pub use profile::{
    build_profile, build_profile_with_step, embed, eval_at_arclength, make_spec, max_axis_height,
    CatenoidSpec, Profile, ProfilePoint,
};
