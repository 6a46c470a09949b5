//! Change of the Casimir-Polder potential felt by a passive, statically
//! polarizable test atom at distance `r`.
//!
//! With `V = -alpha <E^2> / 2` and an electric energy density `<E^2> / (8 pi)`,
//! the change relative to `t < 0` is `dV = -4 pi alpha dE_E`. Only this
//! change is reported; the time-independent baseline is not modelled.

use serde::{Deserialize, Serialize};

use crate::closedform::{closedform_electric, closedform_magnetic, MollifierSpec};
use crate::error::{invalid, Result};
use crate::model::{Engine, ModelParams, SpacetimePoint};
use crate::quad::{delta_energy_electric_quad, RegulatorSpec};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub r: f64,
    pub t: f64,
    /// Potential change relative to the pre-shift interaction.
    pub delta_v: f64,
    /// `-d(delta_v)/dr`.
    pub force: f64,
    pub force_error: f64,
    pub engine: Engine,
    pub far_zone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceEstimate {
    pub force: f64,
    pub error: f64,
}

fn potential_at(r: f64, t: f64, params: &ModelParams, spec: &MollifierSpec) -> Result<f64> {
    let point = SpacetimePoint::new(r, t, params)?;
    Ok(-4.0 * PI * params.alpha_test * closedform_electric(&point, params, spec)?.value)
}

fn check_alpha(params: &ModelParams) -> Result<()> {
    if !(params.alpha_test >= 0.0) {
        return invalid(format!("polarizability must be non-negative, got {}", params.alpha_test));
    }
    Ok(())
}

/// Default differentiation step: well inside the mollifier width and the
/// distance.
pub fn default_step(point: &SpacetimePoint, spec: &MollifierSpec) -> f64 {
    (spec.width / 8.0).min(0.005 * point.r)
}

/// Potential change from the closed-form electric profile, with the force
/// from [`cp_force`] at [`default_step`].
pub fn cp_potential_delta(point: &SpacetimePoint, params: &ModelParams, spec: &MollifierSpec) -> Result<PotentialSample> {
    check_alpha(params)?;
    let delta_v = potential_at(point.r, point.t, params, spec)?;
    let f = cp_force(point, params, spec, default_step(point, spec))?;
    Ok(PotentialSample {
        r: point.r,
        t: point.t,
        delta_v,
        force: f.force,
        force_error: f.error,
        engine: Engine::ClosedForm,
        far_zone: point.far_zone,
    })
}

/// Potential change from the quadrature engine. The force is not
/// differentiated through the oracle and is reported as NaN.
pub fn cp_potential_delta_quad(point: &SpacetimePoint, params: &ModelParams, reg: &RegulatorSpec) -> Result<PotentialSample> {
    check_alpha(params)?;
    let e = delta_energy_electric_quad(point, params, reg)?;
    Ok(PotentialSample {
        r: point.r,
        t: point.t,
        delta_v: -4.0 * PI * params.alpha_test * e.value,
        force: f64::NAN,
        force_error: f64::NAN,
        engine: Engine::Quadrature,
        far_zone: point.far_zone,
    })
}

/// `-d(delta_v)/dr` by central differences at steps `h` and `h/2`, combined
/// by one Richardson step. The error is the size of the Richardson
/// correction.
pub fn cp_force(point: &SpacetimePoint, params: &ModelParams, spec: &MollifierSpec, step: f64) -> Result<ForceEstimate> {
    check_alpha(params)?;
    spec.validate()?;
    if !(step > 0.0) {
        return invalid(format!("step must be positive, got {step}"));
    }
    if step > 0.25 * spec.width {
        return invalid(format!("step {step} is not small against the mollifier width {}", spec.width));
    }
    if step > 0.01 * point.r {
        return invalid(format!("step {step} is not small against r = {}", point.r));
    }
    let v = |r: f64| potential_at(r, point.t, params, spec);
    let central = |h: f64| -> Result<f64> { Ok((v(point.r + h)? - v(point.r - h)?) / (2.0 * h)) };
    let coarse = central(step)?;
    let fine = central(0.5 * step)?;
    let refined = (4.0 * fine - coarse) / 3.0;
    Ok(ForceEstimate {
        force: -refined,
        error: (refined - fine).abs(),
    })
}

/// `-4 pi beta dE_M`, the analogous interaction through a magnetic
/// polarizability `beta`.
pub fn magnetic_interaction_delta(
    point: &SpacetimePoint,
    params: &ModelParams,
    beta: f64,
    spec: &MollifierSpec,
) -> Result<f64> {
    if !(beta >= 0.0) {
        return invalid(format!("magnetic polarizability must be non-negative, got {beta}"));
    }
    Ok(-4.0 * PI * beta * closedform_magnetic(point, params, spec)?.value)
}
