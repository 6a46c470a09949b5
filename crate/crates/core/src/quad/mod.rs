//! Brute-force quadrature of the angle-averaged mode integrals for the
//! electric and magnetic energy-density changes,
//!
//! ```text
//! dE_E = -dw0 c^2/(2 pi)^3 iint dk dk' k^3 k'^3 <B_E> 2 Re F e^{-eta (k + k')}
//! dE_M = +dw0 c^2/(2 pi)^3 iint dk dk' k^2 k'^2 <B_M> 2 Re G e^{-eta (k + k')}
//! ```
//!
//! With `x = k r`, `u = c t / r` and `eps = eta / r` both reduce to
//! `(+-) dw0 c |d|^2 / (4 pi^3 omega0^2 r^7) * I(u, eps)` where
//!
//! ```text
//! I(u, eps) = iint dx dx' sum_i w_i f_i(x) f_i(x') (1 - cos(u (x + x'))) / (x + x') e^{-eps (x + x')}
//! ```
//!
//! and `f_i`, `w_i` are the separable radial factors of
//! [`crate::fieldgeom`]. Three independent routes evaluate `I`:
//!
//! * [`OraclePath::ImaginaryTime`] (default): `1/X` and `cos(uX)/X` written as
//!   Laplace integrals over `s in [0, inf)`, so the integrand is a sum of
//!   squares of single transforms `Phi_i(eps + s)` and `Phi_i(eps + s + iu)`.
//!   No cancellation across the light-cone front.
//! * [`OraclePath::RealTime`]: `(1 - cos uX)/X = int_0^u sin(X v) dv`, with the
//!   single transforms evaluated at `eps - iv`.
//! * [`OraclePath::Direct2d`]: tensor Gauss-Legendre over `(x, x')`.

pub mod extrapolate;
pub mod gauss;
mod transform;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, SpacetimePoint};
pub use extrapolate::{eta_extrapolate, Extrapolation};
use gauss::{integrate_to_infinity_with_companion, integrate_with_companion, AdaptiveOptions, PanelRule};
use transform::{LaplaceSums, B_IDX, C_IDX, D_IDX, A_IDX};

/// Exponential regulator `exp(-eta k)` and quadrature tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatorSpec {
    /// Regulator length (inverse wavenumber).
    pub eta: f64,
    /// Truncation wavenumber.
    pub k_max: f64,
    /// Relative tolerance on the dimensionless integral `I`.
    pub rel_tol: f64,
    /// Absolute tolerance on the dimensionless integral `I`, which is
    /// `O(1)` in the static region.
    pub abs_tol: f64,
}

impl RegulatorSpec {
    pub fn new(eta: f64) -> Self {
        Self {
            eta,
            k_max: 60.0 / eta,
            rel_tol: 1e-7,
            abs_tol: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return invalid(format!("regulator eta must be positive, got {}", self.eta));
        }
        if !(self.k_max * self.eta >= 40.0) {
            return invalid(format!(
                "k_max * eta = {} leaves a tail above exp(-40)",
                self.k_max * self.eta
            ));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return invalid("quadrature tolerances must be positive");
        }
        Ok(())
    }
}

impl Default for RegulatorSpec {
    fn default() -> Self {
        Self::new(0.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// Imaginary part left after adding the complex-conjugate branch.
    pub imag_residual: f64,
    pub est_error: f64,
    pub evaluations: usize,
    /// False outside the far zone; the value is still computed.
    pub far_zone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OraclePath {
    #[default]
    ImaginaryTime,
    RealTime,
    Direct2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Electric,
    Magnetic,
}

impl Field {
    fn terms(&self) -> &'static [(f64, usize)] {
        match self {
            Field::Electric => &[(1.0 / 3.0, B_IDX), (2.0 / 3.0, C_IDX), (1.0 / 3.0, D_IDX)],
            Field::Magnetic => &[(2.0 / 3.0, A_IDX)],
        }
    }

    fn sign(&self) -> f64 {
        match self {
            Field::Electric => -1.0,
            Field::Magnetic => 1.0,
        }
    }
}

/// The dimensionless integral `I(u, eps)` with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIntegral {
    pub value: f64,
    pub imag_residual: f64,
    pub est_error: f64,
    pub evaluations: usize,
}

/// `c |d|^2 / (4 pi^3 omega0^2 r^7)`, mapping `I` to an energy density per
/// unit `delta_omega0`.
pub fn density_scale(r: f64, params: &ModelParams) -> f64 {
    params.light_speed * params.dipole_norm_sq()
        / (4.0 * PI.powi(3) * params.omega0 * params.omega0 * r.powi(7))
}

pub fn delta_energy_electric_quad(
    point: &SpacetimePoint,
    params: &ModelParams,
    reg: &RegulatorSpec,
) -> Result<QuadResult> {
    delta_energy_quad(point, params, reg, Field::Electric, OraclePath::default())
}

pub fn delta_energy_magnetic_quad(
    point: &SpacetimePoint,
    params: &ModelParams,
    reg: &RegulatorSpec,
) -> Result<QuadResult> {
    delta_energy_quad(point, params, reg, Field::Magnetic, OraclePath::default())
}

pub fn delta_energy_quad(
    point: &SpacetimePoint,
    params: &ModelParams,
    reg: &RegulatorSpec,
    field: Field,
    path: OraclePath,
) -> Result<QuadResult> {
    let [electric, magnetic] = delta_energy_quad_pair(point, params, reg, path, &[field])?;
    Ok(match field {
        Field::Electric => electric,
        Field::Magnetic => magnetic,
    }
    .expect("requested field is computed"))
}

/// Electric and magnetic densities from one set of mode transforms.
pub fn delta_energy_quad_both(
    point: &SpacetimePoint,
    params: &ModelParams,
    reg: &RegulatorSpec,
    path: OraclePath,
) -> Result<(QuadResult, QuadResult)> {
    let [e, m] = delta_energy_quad_pair(point, params, reg, path, &[Field::Electric, Field::Magnetic])?;
    Ok((e.unwrap(), m.unwrap()))
}

fn delta_energy_quad_pair(
    point: &SpacetimePoint,
    params: &ModelParams,
    reg: &RegulatorSpec,
    path: OraclePath,
    fields: &[Field],
) -> Result<[Option<QuadResult>; 2]> {
    params.validate()?;
    reg.validate()?;
    let u = params.light_speed * point.t / point.r;
    let eps = reg.eta / point.r;
    let x_max = reg.k_max * point.r;
    let scale = params.delta_omega0 * density_scale(point.r, params);
    let integrals = mode_integrals(u, eps, x_max, reg, path, fields);
    let mut out = [None, None];
    for (field, result) in fields.iter().zip(integrals) {
        let to_density = field.sign() * scale;
        let integral = result.map_err(|e| match e {
            Error::Convergence { partial, est_error } => Error::Convergence {
                partial: partial * to_density,
                est_error: est_error * to_density.abs(),
            },
            other => other,
        })?;
        let slot = match field {
            Field::Electric => 0,
            Field::Magnetic => 1,
        };
        out[slot] = Some(QuadResult {
            value: to_density * integral.value,
            imag_residual: (to_density * integral.imag_residual).abs(),
            est_error: (to_density * integral.est_error).abs(),
            evaluations: integral.evaluations,
            far_zone: point.far_zone,
        });
    }
    Ok(out)
}

/// Evaluates `I(u, eps)` for each requested field along one route.
pub fn mode_integrals(
    u: f64,
    eps: f64,
    x_max: f64,
    reg: &RegulatorSpec,
    path: OraclePath,
    fields: &[Field],
) -> Vec<Result<ModeIntegral>> {
    let opts = AdaptiveOptions {
        abs_tol: reg.abs_tol,
        rel_tol: reg.rel_tol,
        max_segments: 400,
    };
    match path {
        OraclePath::ImaginaryTime => imaginary_time(u, eps, x_max, &opts, fields),
        OraclePath::RealTime => real_time(u, eps, x_max, &opts, fields),
        OraclePath::Direct2d => {
            let fine = direct_2d(u, eps, x_max, 8);
            let coarse = direct_2d(u, eps, x_max, 6);
            let evaluations = 2 * fine.nodes * fine.nodes;
            fields
                .iter()
                .map(|f| {
                    let (a, b) = match f {
                        Field::Electric => (fine.electric, coarse.electric),
                        Field::Magnetic => (fine.magnetic, coarse.magnetic),
                    };
                    Ok(ModeIntegral {
                        value: a,
                        imag_residual: 0.0,
                        est_error: (a - b).abs(),
                        evaluations,
                    })
                })
                .collect()
        }
    }
}

fn sorted_breaks(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| *p > lo && *p < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn finish(result: gauss::Integral, truncation: f64) -> Result<ModeIntegral> {
    let est_error = result.error + truncation * result.value.abs();
    if !result.converged {
        return Err(Error::Convergence {
            partial: result.value,
            est_error,
        });
    }
    Ok(ModeIntegral {
        value: result.value,
        imag_residual: result.companion.abs(),
        est_error,
        evaluations: result.evaluations,
    })
}

fn field_sum(field: Field, values: &[Complex64; 4]) -> Complex64 {
    field
        .terms()
        .iter()
        .map(|&(w, i)| w * values[i] * values[i])
        .sum()
}

fn imaginary_time(
    u: f64,
    eps: f64,
    x_max: f64,
    opts: &AdaptiveOptions,
    fields: &[Field],
) -> Vec<Result<ModeIntegral>> {
    let cache: RefCell<HashMap<u64, LaplaceSums>> = RefCell::new(HashMap::new());
    let sums_at = |s: f64| -> LaplaceSums {
        if let Some(hit) = cache.borrow().get(&s.to_bits()) {
            return *hit;
        }
        let a = eps + s;
        // same exp(-60)-level truncation as the regulator tail at s = 0
        let x_cut = x_max * (eps / a).min(1.0);
        let sums = LaplaceSums::compute(a, u, x_cut, true);
        cache.borrow_mut().insert(s.to_bits(), sums);
        sums
    };
    let breaks = sorted_breaks(
        vec![eps, 10.0 * eps, 0.1, 1.0, (u - 1.0).abs() + eps, 10.0],
        0.0,
        10.0,
    );
    let truncation = (-(x_max * eps)).exp();
    fields
        .iter()
        .map(|&field| {
            let integrand = |s: f64| {
                let sums = sums_at(s);
                let static_part = field_sum(field, &sums.real).re;
                let shifted = 0.5 * (field_sum(field, &sums.plus) + field_sum(field, &sums.minus));
                (static_part - shifted.re, shifted.im)
            };
            finish(integrate_to_infinity_with_companion(integrand, &breaks, opts), truncation)
        })
        .collect()
}

fn real_time(
    u: f64,
    eps: f64,
    x_max: f64,
    opts: &AdaptiveOptions,
    fields: &[Field],
) -> Vec<Result<ModeIntegral>> {
    if u == 0.0 {
        return fields
            .iter()
            .map(|_| {
                Ok(ModeIntegral {
                    value: 0.0,
                    imag_residual: 0.0,
                    est_error: 0.0,
                    evaluations: 0,
                })
            })
            .collect();
    }
    let cache: RefCell<HashMap<u64, LaplaceSums>> = RefCell::new(HashMap::new());
    let sums_at = |v: f64| -> LaplaceSums {
        if let Some(hit) = cache.borrow().get(&v.to_bits()) {
            return *hit;
        }
        // plus branch at eps - iv, minus branch at eps + iv
        let sums = LaplaceSums::compute(eps, -v, x_max, false);
        cache.borrow_mut().insert(v.to_bits(), sums);
        sums
    };
    let breaks = sorted_breaks(
        vec![
            1.0 - 10.0 * eps,
            1.0 - eps,
            1.0,
            1.0 + eps,
            1.0 + 10.0 * eps,
        ],
        0.0,
        u,
    );
    let truncation = (-(x_max * eps)).exp();
    fields
        .iter()
        .map(|&field| {
            let integrand = |v: f64| {
                let sums = sums_at(v);
                // (P(eps - iv) - P(eps + iv)) / 2i
                let diff = (field_sum(field, &sums.plus) - field_sum(field, &sums.minus))
                    / Complex64::new(0.0, 2.0);
                (diff.re, diff.im)
            };
            finish(integrate_with_companion(integrand, &breaks, opts), truncation)
        })
        .collect()
}

struct Direct2d {
    electric: f64,
    magnetic: f64,
    nodes: usize,
}

/// Tensor Gauss-Legendre sum over `(x, x')`, panels a quarter period of the
/// fastest oscillation `(1 + u)` wide. Symmetric pairs are folded.
fn direct_2d(u: f64, eps: f64, x_max: f64, order: usize) -> Direct2d {
    let rule = PanelRule::uniform(0.0, x_max, FRAC_PI_2 / (1.0 + u), order);
    let n = rule.len();
    let mut g = vec![[0.0f64; 4]; n];
    let mut phase = vec![Complex64::new(0.0, 0.0); n];
    for (i, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let (s, c) = x.sin_cos();
        let damp = w * (-eps * x).exp();
        g[i] = transform::FACTORS.map(|f| damp * f.eval_with(x, s, c));
        phase[i] = Complex64::from_polar(1.0, u * x);
    }
    let (mut electric, mut magnetic) = (0.0, 0.0);
    for i in 0..n {
        let (mut acc_b, mut acc_c, mut acc_d, mut acc_a) = (0.0, 0.0, 0.0, 0.0);
        let (xi, pi) = (rule.nodes[i], phase[i]);
        for j in 0..=i {
            let x_sum = xi + rule.nodes[j];
            let p = pi * phase[j];
            let mut kernel = (1.0 - p.re) / x_sum;
            if j == i {
                kernel *= 0.5;
            }
            acc_b += kernel * g[j][B_IDX];
            acc_c += kernel * g[j][C_IDX];
            acc_d += kernel * g[j][D_IDX];
            acc_a += kernel * g[j][A_IDX];
        }
        electric += 2.0
            * (g[i][B_IDX] * acc_b / 3.0 + 2.0 * g[i][C_IDX] * acc_c / 3.0 + g[i][D_IDX] * acc_d / 3.0);
        magnetic += 2.0 * 2.0 * g[i][A_IDX] * acc_a / 3.0;
    }
    Direct2d {
        electric,
        magnetic,
        nodes: n,
    }
}
