//! Analytic far-zone light-cone profiles of the electric and magnetic
//! energy-density changes.
//!
//! Each field is a step term plus delta-derivative terms localized on the
//! front `r = c t`:
//!
//! ```text
//! dE = s dw0 K [ c0 (1 - Theta(x)) / r^7 + c1 delta(x) / r^6 + c2 delta'(x) / r^5
//!              + c3 delta''(x) / r^4 + c4 delta'''(x) / r^3 + c5 delta''''(x) / r^2 ],
//! x = r - c t,  K = c |d|^2 / (24 pi^2 omega0^2)
//! ```
//!
//! The distributions are replaced by analytic mollifiers of width `eta`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{Engine, ModelParams, SpacetimePoint};
use crate::quad::{self, OraclePath, RegulatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierFamily {
    /// `delta(x) = eta / (pi (x^2 + eta^2))`, the boundary value of the
    /// exponential regulator `exp(-eta k)`.
    #[default]
    Lorentzian,
    /// Normal density with standard deviation `eta`.
    Gaussian,
}

impl MollifierFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            MollifierFamily::Lorentzian => "lorentzian",
            MollifierFamily::Gaussian => "gaussian",
        }
    }
}

impl std::str::FromStr for MollifierFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lorentzian" => Ok(MollifierFamily::Lorentzian),
            "gaussian" => Ok(MollifierFamily::Gaussian),
            other => invalid(format!("unknown mollifier family '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifierSpec {
    pub family: MollifierFamily,
    pub width: f64,
}

impl MollifierSpec {
    pub fn new(family: MollifierFamily, width: f64) -> Self {
        Self { family, width }
    }

    pub fn lorentzian(width: f64) -> Self {
        Self::new(MollifierFamily::Lorentzian, width)
    }

    pub fn gaussian(width: f64) -> Self {
        Self::new(MollifierFamily::Gaussian, width)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return invalid(format!("mollifier width must be positive, got {}", self.width));
        }
        Ok(())
    }
}

impl Default for MollifierSpec {
    fn default() -> Self {
        Self::lorentzian(0.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Theta,
    /// `n`-th derivative of the delta function, `n <= 4`.
    Delta(u8),
}

/// Mollified step or delta derivative at `x`.
pub fn mollified_distribution(dist: Distribution, x: f64, spec: &MollifierSpec) -> Result<f64> {
    spec.validate()?;
    let eta = spec.width;
    Ok(match (dist, spec.family) {
        (Distribution::Delta(n), _) if n > 4 => {
            return invalid(format!("delta derivative order {n} exceeds 4"));
        }
        (Distribution::Theta, MollifierFamily::Lorentzian) => 0.5 + (x / eta).atan() / PI,
        (Distribution::Theta, MollifierFamily::Gaussian) => 0.5 * (1.0 + libm::erf(x / (eta * std::f64::consts::SQRT_2))),
        (Distribution::Delta(n), MollifierFamily::Lorentzian) => {
            // d^n/dx^n Im[1 / (x - i eta)] / pi
            let z = Complex64::new(x, -eta);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(n) * z.powi(-(n as i32 + 1)).im / PI
        }
        (Distribution::Delta(n), MollifierFamily::Gaussian) => {
            let z = x / eta;
            let phi = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * hermite_he(n, z) * phi / eta.powi(n as i32 + 1)
        }
    })
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// Probabilists' Hermite polynomial.
fn hermite_he(n: u8, z: f64) -> f64 {
    let (mut a, mut b) = (1.0, z);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = z * b - f64::from(k) * a;
        a = b;
        b = c;
    }
    b
}

/// Exact profile coefficients for the step and the five delta terms,
/// multiplying `(1 - Theta)/r^7, delta/r^6, delta'/r^5, delta''/r^4,
/// delta'''/r^3, delta''''/r^2`, and the overall sign of `dw0 K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCoefficients {
    pub overall_sign: i8,
    pub coefficients: [Rational64; 6],
}

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl ProfileCoefficients {
    pub const RADIAL_POWERS: [i32; 6] = [7, 6, 5, 4, 3, 2];

    pub fn electric() -> Self {
        Self {
            overall_sign: -1,
            coefficients: [rat(13, 2), rat(13, 2), rat(-5, 2), rat(1, 3), rat(0, 1), rat(1, 30)],
        }
    }

    pub fn magnetic() -> Self {
        Self {
            overall_sign: 1,
            coefficients: [rat(133, 2), rat(133, 2), rat(-29, 1), rat(41, 6), rat(-5, 6), rat(1, 30)],
        }
    }

    /// Coefficients with the overall sign folded in.
    pub fn signed(&self) -> [Rational64; 6] {
        let s = Rational64::from_integer(i64::from(self.overall_sign));
        self.coefficients.map(|c| s * c)
    }

    /// Electric plus magnetic, combined in exact arithmetic.
    pub fn total() -> Self {
        let e = Self::electric().signed();
        let m = Self::magnetic().signed();
        Self {
            overall_sign: 1,
            coefficients: std::array::from_fn(|i| e[i] + m[i]),
        }
    }

    pub fn as_f64(&self) -> [f64; 6] {
        self.coefficients.map(|c| *c.numer() as f64 / *c.denom() as f64)
    }

    fn evaluate(&self, point: &SpacetimePoint, params: &ModelParams, spec: &MollifierSpec) -> Result<f64> {
        let x = point.front_offset(params);
        let r = point.r;
        let c = self.as_f64();
        let mut sum = c[0] * (1.0 - mollified_distribution(Distribution::Theta, x, spec)?) / r.powi(7);
        for n in 0..5u8 {
            let k = n as usize + 1;
            if c[k] != 0.0 {
                sum += c[k] * mollified_distribution(Distribution::Delta(n), x, spec)? / r.powi(Self::RADIAL_POWERS[k]);
            }
        }
        Ok(f64::from(self.overall_sign) * params.delta_omega0 * params.profile_prefactor() * sum)
    }
}

/// A density value with its far-zone validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileValue {
    pub value: f64,
    pub far_zone: bool,
}

fn flagged(
    coeffs: ProfileCoefficients,
    point: &SpacetimePoint,
    params: &ModelParams,
    spec: &MollifierSpec,
) -> Result<ProfileValue> {
    params.validate()?;
    spec.validate()?;
    Ok(ProfileValue {
        value: coeffs.evaluate(point, params, spec)?,
        far_zone: point.far_zone,
    })
}

pub fn closedform_electric(point: &SpacetimePoint, params: &ModelParams, spec: &MollifierSpec) -> Result<ProfileValue> {
    flagged(ProfileCoefficients::electric(), point, params, spec)
}

pub fn closedform_magnetic(point: &SpacetimePoint, params: &ModelParams, spec: &MollifierSpec) -> Result<ProfileValue> {
    flagged(ProfileCoefficients::magnetic(), point, params, spec)
}

/// Inside-cone static value `s dw0 K c0 / r^7` of a profile.
pub fn static_value(coeffs: &ProfileCoefficients, r: f64, params: &ModelParams) -> f64 {
    f64::from(coeffs.overall_sign) * params.delta_omega0 * params.profile_prefactor() * coeffs.as_f64()[0] / r.powi(7)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyDensityDelta {
    pub electric: f64,
    pub magnetic: f64,
    pub total: f64,
    pub point: SpacetimePoint,
    pub engine: Engine,
    pub mollifier: Option<MollifierSpec>,
    pub regulator: Option<RegulatorSpec>,
    pub far_zone: bool,
}

impl EnergyDensityDelta {
    fn new(electric: f64, magnetic: f64, point: SpacetimePoint, engine: Engine) -> Self {
        Self {
            electric,
            magnetic,
            total: electric + magnetic,
            point,
            engine,
            mollifier: None,
            regulator: None,
            far_zone: point.far_zone,
        }
    }
}

pub fn total_energy_density(
    point: &SpacetimePoint,
    params: &ModelParams,
    spec: &MollifierSpec,
) -> Result<EnergyDensityDelta> {
    let e = closedform_electric(point, params, spec)?;
    let m = closedform_magnetic(point, params, spec)?;
    Ok(EnergyDensityDelta {
        mollifier: Some(*spec),
        ..EnergyDensityDelta::new(e.value, m.value, *point, Engine::ClosedForm)
    })
}

/// Both densities from the quadrature engine.
pub fn total_energy_density_quad(
    point: &SpacetimePoint,
    params: &ModelParams,
    reg: &RegulatorSpec,
) -> Result<EnergyDensityDelta> {
    let (e, m) = quad::delta_energy_quad_both(point, params, reg, OraclePath::default())?;
    Ok(EnergyDensityDelta {
        regulator: Some(*reg),
        ..EnergyDensityDelta::new(e.value, m.value, *point, Engine::Quadrature)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Inside the light cone, `c t - r >= 5 eta`.
    Static,
    /// Outside the light cone, `r - c t >= 5 eta`.
    Causal,
    /// Within `5 eta` of the front; reported, not graded.
    Front,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldComparison {
    pub closedform: f64,
    pub quadrature: f64,
    /// `|closedform - quadrature| / max(|quadrature|, |static closed form|)`.
    pub deviation: f64,
    /// Same deviation with the width and regulator halved.
    pub deviation_half_eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedPoint {
    pub point: SpacetimePoint,
    pub region: Region,
    pub electric: FieldComparison,
    pub magnetic: FieldComparison,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub eta: f64,
    pub tolerance: f64,
    pub points: Vec<CertifiedPoint>,
    pub pass: bool,
}

pub const CERTIFY_TOLERANCE: f64 = 0.05;

pub fn region_of(point: &SpacetimePoint, params: &ModelParams, eta: f64) -> Region {
    let x = point.front_offset(params);
    if x <= -5.0 * eta {
        Region::Static
    } else if x >= 5.0 * eta {
        Region::Causal
    } else {
        Region::Front
    }
}

/// Compares the closed forms against the quadrature engine at matched
/// `eta`, and again at `eta / 2`. A graded point passes when both fields
/// deviate by at most 5% and the deviation shrinks under halving.
pub fn certify_against_oracle(
    points: &[SpacetimePoint],
    params: &ModelParams,
    spec: &MollifierSpec,
    reg: &RegulatorSpec,
) -> Result<CertificationReport> {
    spec.validate()?;
    reg.validate()?;
    if spec.family != MollifierFamily::Lorentzian || (spec.width - reg.eta).abs() > 1e-12 * reg.eta {
        return invalid("certification needs a Lorentzian mollifier with width equal to the regulator eta");
    }
    let half_spec = MollifierSpec::lorentzian(0.5 * spec.width);
    let half_reg = RegulatorSpec {
        eta: 0.5 * reg.eta,
        k_max: 2.0 * reg.k_max,
        ..*reg
    };
    let mut out = Vec::with_capacity(points.len());
    for point in points {
        let full = compare(point, params, spec, reg)?;
        let half = compare(point, params, &half_spec, &half_reg)?;
        let region = region_of(point, params, reg.eta);
        let merge = |a: FieldComparison, b: FieldComparison| FieldComparison {
            deviation_half_eta: b.deviation,
            ..a
        };
        let electric = merge(full.0, half.0);
        let magnetic = merge(full.1, half.1);
        let ok = |f: &FieldComparison| f.deviation <= CERTIFY_TOLERANCE && f.deviation_half_eta <= f.deviation;
        let pass = region == Region::Front || (ok(&electric) && ok(&magnetic));
        out.push(CertifiedPoint {
            point: *point,
            region,
            electric,
            magnetic,
            pass,
        });
    }
    let pass = out.iter().all(|p| p.pass);
    Ok(CertificationReport {
        eta: reg.eta,
        tolerance: CERTIFY_TOLERANCE,
        points: out,
        pass,
    })
}

fn compare(
    point: &SpacetimePoint,
    params: &ModelParams,
    spec: &MollifierSpec,
    reg: &RegulatorSpec,
) -> Result<(FieldComparison, FieldComparison)> {
    let cf = total_energy_density(point, params, spec)?;
    let q = total_energy_density_quad(point, params, reg)?;
    let field = |cf: f64, q: f64, coeffs: ProfileCoefficients| {
        let floor = static_value(&coeffs, point.r, params).abs();
        FieldComparison {
            closedform: cf,
            quadrature: q,
            deviation: (cf - q).abs() / q.abs().max(floor),
            deviation_half_eta: f64::NAN,
        }
    };
    Ok((
        field(cf.electric, q.electric, ProfileCoefficients::electric()),
        field(cf.magnetic, q.magnetic, ProfileCoefficients::magnetic()),
    ))
}
