//! Vacuum-field energy densities around a two-level atom whose transition
//! frequency is shifted abruptly at `t = 0`, and the resulting
//! time-dependent Casimir-Polder interaction with a second, polarizable atom.
//!
//! Two independent engines evaluate the angle-averaged far-zone densities:
//!
//! * [`closedform`] evaluates the analytic light-cone profiles (step plus
//!   delta-derivative terms) with mollified distributions.
//! * [`quad`] integrates the underlying double mode integrals by brute-force
//!   quadrature under an exponential regulator `exp(-eta k)`.
//!
//! All quantities are in reduced units (`hbar = 1`, and by default
//! `omega0 = c = |d| = 1`), so lengths read as `omega0 r / c` and times as
//! `omega0 t`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod error;
pub mod fieldgeom;
pub mod kernels;
pub mod model;
pub mod potential;
pub mod quad;
pub mod sweep;

pub use closedform::{
    certify_against_oracle, closedform_electric, closedform_magnetic, mollified_distribution,
    total_energy_density, total_energy_density_quad, CertificationReport, Distribution,
    EnergyDensityDelta, MollifierFamily, MollifierSpec, ProfileCoefficients, ProfileValue,
};
pub use error::{Error, Result};
pub use model::{
    coupling_epsilon, dressed_amplitudes, state_norm, DressedState, Engine, Mode, ModeSet,
    ModelParams, SpacetimePoint,
};
pub use potential::{
    cp_force, cp_potential_delta, cp_potential_delta_quad, magnetic_interaction_delta, PotentialSample,
};
pub use quad::{
    delta_energy_electric_quad, delta_energy_magnetic_quad, delta_energy_quad_both, eta_extrapolate,
    OraclePath, QuadResult, RegulatorSpec,
};
pub use sweep::{run_sweep, ProfileGrid, SweepConfig};

/// Reduced-distance threshold `omega0 r / c` above which the far-zone
/// kernel is trusted.
pub const FAR_ZONE_MIN_RHO: f64 = 10.0;
