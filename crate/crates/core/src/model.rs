//! Atom/field parameters, transverse modes, the multipolar coupling and the
//! second-order dressed ground state.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::FAR_ZONE_MIN_RHO;

/// Physical parameters in reduced units (`hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Atomic transition frequency before the shift.
    pub omega0: f64,
    /// Sudden, signed shift of the transition frequency applied at `t = 0`.
    pub delta_omega0: f64,
    /// Atomic dipole moment.
    pub dipole: [f64; 3],
    pub light_speed: f64,
    /// Static electric polarizability of the test atom.
    pub alpha_test: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            delta_omega0: 0.01,
            dipole: [0.0, 0.0, 1.0],
            light_speed: 1.0,
            alpha_test: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return invalid(format!("omega0 must be positive, got {}", self.omega0));
        }
        if !(self.light_speed > 0.0 && self.light_speed.is_finite()) {
            return invalid(format!("light_speed must be positive, got {}", self.light_speed));
        }
        if !(self.alpha_test >= 0.0 && self.alpha_test.is_finite()) {
            return invalid(format!("alpha_test must be non-negative, got {}", self.alpha_test));
        }
        if !self.delta_omega0.is_finite() || self.dipole.iter().any(|c| !c.is_finite()) {
            return invalid("delta_omega0 and dipole must be finite");
        }
        Ok(())
    }

    /// Returns a message when `|delta_omega0| / omega0` is too large for the
    /// first-order treatment of the shift to be trusted.
    pub fn perturbative_warning(&self) -> Option<String> {
        let ratio = self.delta_omega0.abs() / self.omega0;
        (ratio >= 0.1).then(|| {
            format!("|delta_omega0|/omega0 = {ratio:.3} is not small; first-order results are unreliable")
        })
    }

    pub fn dipole_vec(&self) -> Vector3<f64> {
        Vector3::from(self.dipole)
    }

    pub fn dipole_norm_sq(&self) -> f64 {
        self.dipole_vec().norm_squared()
    }

    /// `K = c |d|^2 / (24 pi^2 omega0^2)`, the common prefactor of the
    /// far-zone profiles.
    pub fn profile_prefactor(&self) -> f64 {
        self.light_speed * self.dipole_norm_sq() / (24.0 * PI * PI * self.omega0 * self.omega0)
    }

    /// Reduced distance `omega0 r / c`.
    pub fn rho(&self, r: f64) -> f64 {
        self.omega0 * r / self.light_speed
    }
}

/// Radial distance from the source atom and time since the shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub r: f64,
    pub t: f64,
    /// `omega0 r / c >= 10`.
    pub far_zone: bool,
}

impl SpacetimePoint {
    pub fn new(r: f64, t: f64, params: &ModelParams) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("r must be positive, got {r}"));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return invalid(format!("t must be non-negative, got {t}"));
        }
        Ok(Self {
            r,
            t,
            far_zone: params.rho(r) >= FAR_ZONE_MIN_RHO,
        })
    }

    /// Signed distance `r - c t` from the light-cone front.
    pub fn front_offset(&self, params: &ModelParams) -> f64 {
        self.r - params.light_speed * self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    ClosedForm,
    Quadrature,
    Both,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::ClosedForm => "closedform",
            Engine::Quadrature => "quadrature",
            Engine::Both => "both",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closedform" => Ok(Engine::ClosedForm),
            "quadrature" => Ok(Engine::Quadrature),
            "both" => Ok(Engine::Both),
            other => Err(Error::Config(format!("unknown engine `{other}`"))),
        }
    }
}

/// A single transverse field mode `(k, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub wavevector: Vector3<f64>,
    /// 1 or 2.
    pub polarization_index: u8,
    pub polarization_vector: Vector3<f64>,
}

const TRANSVERSE_TOL: f64 = 1e-12;

impl Mode {
    pub fn new(
        wavevector: Vector3<f64>,
        polarization_index: u8,
        polarization_vector: Vector3<f64>,
    ) -> Result<Self> {
        let k = wavevector.norm();
        if !(k > 0.0 && k.is_finite()) {
            return invalid("mode wavevector must be non-zero and finite");
        }
        if !matches!(polarization_index, 1 | 2) {
            return invalid(format!("polarization index must be 1 or 2, got {polarization_index}"));
        }
        if (polarization_vector.norm() - 1.0).abs() > TRANSVERSE_TOL {
            return invalid("polarization vector must have unit length");
        }
        if polarization_vector.dot(&wavevector).abs() > TRANSVERSE_TOL * k {
            return invalid("polarization vector is not transverse to the wavevector");
        }
        Ok(Self {
            wavevector,
            polarization_index,
            polarization_vector,
        })
    }

    /// Dispersion `omega_k = c |k|`.
    pub fn omega(&self, light_speed: f64) -> f64 {
        light_speed * self.wavevector.norm()
    }
}

/// Deterministic orthonormal polarization pair for the direction of `k`.
///
/// Gram-Schmidt is seeded with the Cartesian axis least aligned with `k`;
/// ties go to the lowest axis index.
pub fn polarization_dyad(k: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let khat = k.normalize();
    let mut axis = 0;
    for i in 1..3 {
        if khat[i].abs() < khat[axis].abs() {
            axis = i;
        }
    }
    let mut seed = Vector3::zeros();
    seed[axis] = 1.0;
    let e1 = (seed - khat * khat.dot(&seed)).normalize();
    let e2 = khat.cross(&e1);
    (e1, e2)
}

/// A finite set of modes in a quantization volume.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    modes: Vec<Mode>,
    volume: f64,
}

impl ModeSet {
    /// Checks that every wavevector carries two orthonormal polarizations.
    pub fn new(modes: Vec<Mode>, volume: f64) -> Result<Self> {
        if !(volume > 0.0 && volume.is_finite()) {
            return invalid(format!("quantization volume must be positive, got {volume}"));
        }
        let mut paired = vec![false; modes.len()];
        for i in 0..modes.len() {
            if paired[i] {
                continue;
            }
            let partner = (i + 1..modes.len()).find(|&j| {
                !paired[j]
                    && modes[j].wavevector == modes[i].wavevector
                    && modes[j].polarization_index != modes[i].polarization_index
            });
            let Some(j) = partner else {
                return invalid(format!("mode {i} has no partner polarization"));
            };
            if modes[i]
                .polarization_vector
                .dot(&modes[j].polarization_vector)
                .abs()
                > TRANSVERSE_TOL
            {
                return invalid(format!("polarizations of modes {i} and {j} are not orthogonal"));
            }
            paired[i] = true;
            paired[j] = true;
        }
        Ok(Self { modes, volume })
    }

    /// Builds both polarizations for every wavevector, in input order.
    pub fn from_wavevectors(wavevectors: &[Vector3<f64>], volume: f64) -> Result<Self> {
        let mut modes = Vec::with_capacity(2 * wavevectors.len());
        for k in wavevectors {
            if !(k.norm() > 0.0) {
                return invalid("mode wavevector must be non-zero");
            }
            let (e1, e2) = polarization_dyad(k);
            modes.push(Mode::new(*k, 1, e1)?);
            modes.push(Mode::new(*k, 2, e2)?);
        }
        Self::new(modes, volume)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Multipolar coupling `eps = -sqrt(2 pi omega_k / V) (e . d)`.
pub fn coupling_epsilon(mode: &Mode, params: &ModelParams, volume: f64) -> Result<f64> {
    if !(volume > 0.0 && volume.is_finite()) {
        return invalid(format!("quantization volume must be positive, got {volume}"));
    }
    let omega = mode.omega(params.light_speed);
    let projection = mode.polarization_vector.dot(&params.dipole_vec());
    Ok(-(2.0 * PI * omega / volume).sqrt() * projection)
}

/// Second-order dressed ground state.
///
/// Two-photon coefficients are stored per *ordered* pair of mode indices with
/// the unsymmetrized coefficient `-eps_a eps_b / ((omega0 + w_a)(w_a + w_b))`.
/// The physical amplitude of the state `a^dag_a a^dag_b |0>` is the sum over
/// both orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedState {
    pub amp_ground: f64,
    amp_one_photon: Vec<f64>,
    /// Row-major `n x n`, entry `(a, b)` for the ordered pair.
    amp_two_photon: Vec<f64>,
}

impl DressedState {
    pub fn mode_count(&self) -> usize {
        self.amp_one_photon.len()
    }

    pub fn one_photon(&self, mode: usize) -> f64 {
        self.amp_one_photon[mode]
    }

    pub fn one_photon_amplitudes(&self) -> &[f64] {
        &self.amp_one_photon
    }

    /// Unsymmetrized coefficient for the ordered pair `(a, b)`.
    pub fn two_photon(&self, a: usize, b: usize) -> f64 {
        self.amp_two_photon[a * self.mode_count() + b]
    }
}

pub fn dressed_amplitudes(params: &ModelParams, modes: &ModeSet) -> Result<DressedState> {
    params.validate()?;
    if modes.is_empty() {
        return invalid("mode set is empty");
    }
    let n = modes.len();
    let omega0 = params.omega0;
    let mut eps = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    for m in modes.modes() {
        eps.push(coupling_epsilon(m, params, modes.volume())?);
        omega.push(m.omega(params.light_speed));
    }

    let shift: f64 = eps
        .iter()
        .zip(&omega)
        .map(|(e, w)| e * e / ((omega0 + w) * (omega0 + w)))
        .sum();
    let amp_one_photon = eps
        .iter()
        .zip(&omega)
        .map(|(e, w)| e / (omega0 + w))
        .collect();
    let mut amp_two_photon = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            amp_two_photon[a * n + b] =
                -eps[a] * eps[b] / ((omega0 + omega[a]) * (omega[a] + omega[b]));
        }
    }
    Ok(DressedState {
        amp_ground: 1.0 - 0.5 * shift,
        amp_one_photon,
        amp_two_photon,
    })
}

/// `<g|g>` including every term the truncated state produces (through fourth
/// order in the coupling).
pub fn state_norm(state: &DressedState) -> f64 {
    let n = state.mode_count();
    let one: f64 = state.amp_one_photon.iter().map(|a| a * a).sum();
    let mut two = 0.0;
    for a in 0..n {
        // a^dag_a a^dag_a |0> has norm 2
        let diag = state.two_photon(a, a);
        two += 2.0 * diag * diag;
        for b in a + 1..n {
            let amp = state.two_photon(a, b) + state.two_photon(b, a);
            two += amp * amp;
        }
    }
    state.amp_ground * state.amp_ground + one + two
}
