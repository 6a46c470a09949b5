//! Far-zone time kernel shared by the electric and magnetic densities,
//!
//! ```text
//! F(w, w', t) = G(w, w', t) = (1 - exp(-i (w + w') t)) / (omega0^2 (w + w'))
//! ```
//!
//! together with the integral representations that let the double mode
//! integrals factor into products of single integrals:
//!
//! * real time: `(1 - e^{-i W t}) / W = i * int_0^t e^{-i W s} ds`
//! * imaginary time: `(1 - e^{-i W t}) / W = int_0^inf e^{-W s} (1 - e^{-i W t}) ds`
//!
//! Both exponentials factor as `e^{-a (w + w')} = e^{-a w} e^{-a w'}`.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::ModelParams;
use crate::quad::gauss::PanelRule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// `w + w'`.
    pub omega_sum: f64,
}

impl KernelValue {
    /// The kernel plus its complex conjugate, `2 Re F`. Non-negative.
    pub fn with_conjugate(&self) -> f64 {
        2.0 * self.value.re
    }
}

pub fn far_zone_kernel(omega_k: f64, omega_kp: f64, t: f64, params: &ModelParams) -> Result<KernelValue> {
    if !(omega_k >= 0.0 && omega_kp >= 0.0) {
        return invalid("mode frequencies must be non-negative");
    }
    if !(t >= 0.0) {
        return invalid(format!("t must be non-negative, got {t}"));
    }
    let omega_sum = omega_k + omega_kp;
    if omega_sum <= 0.0 {
        return invalid("kernel undefined for vanishing frequency sum");
    }
    Ok(KernelValue {
        value: one_minus_phase_over(omega_sum, t) / (params.omega0 * params.omega0),
        omega_sum,
    })
}

/// `(1 - e^{-i W t}) / W`, written with half-angle forms so that small
/// `W t` does not cancel.
pub fn one_minus_phase_over(omega_sum: f64, t: f64) -> Complex64 {
    let half = 0.5 * omega_sum * t;
    let s = half.sin();
    // 1 - e^{-2ih} = 2 sin^2 h + i sin 2h
    Complex64::new(2.0 * s * s, (2.0 * half).sin()) / omega_sum
}

/// Real-axis nodes and weights on `[0, t]`.
#[derive(Debug, Clone)]
pub struct TimeQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeQuadrature {
    /// `i * sum_j w_j e^{-i W s_j}`, approximating `(1 - e^{-i W t}) / W`.
    pub fn apply(&self, omega_sum: f64) -> Complex64 {
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| Complex64::from_polar(*w, -omega_sum * s))
            .sum();
        Complex64::i() * sum
    }
}

/// Gauss-Legendre panels on `[0, t]`, each at most half a period of
/// `e^{-i W s}` wide with 8 nodes (16 nodes per period).
pub fn kernel_time_representation(omega_sum: f64, t: f64) -> TimeQuadrature {
    if t <= 0.0 {
        return TimeQuadrature {
            nodes: Vec::new(),
            weights: Vec::new(),
        };
    }
    let half_period = if omega_sum > 0.0 {
        std::f64::consts::PI / omega_sum
    } else {
        t
    };
    let rule = PanelRule::uniform(0.0, t, half_period.min(t), 8);
    TimeQuadrature {
        nodes: rule.nodes,
        weights: rule.weights,
    }
}

/// Integrand of the imaginary-time representation at `s`:
/// `e^{-W s} (1 - e^{-i W t})`.
pub fn imaginary_time_integrand(omega_sum: f64, t: f64, s: f64) -> Complex64 {
    (-omega_sum * s).exp() * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -omega_sum * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss::{integrate_to_infinity, AdaptiveOptions};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn kernel_vanishes_at_zero_time() {
        let k = far_zone_kernel(0.7, 1.9, 0.0, &unit()).unwrap();
        assert_eq!(k.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn kernel_vanishes_after_full_period() {
        let k = far_zone_kernel(1.0, 1.0, PI, &unit()).unwrap();
        assert!(k.value.norm() < 1e-15);
    }

    #[test]
    fn kernel_half_period_value() {
        let k = far_zone_kernel(1.0, 2.0, PI / 3.0, &unit()).unwrap();
        assert_relative_eq!(k.value.re, 2.0 / 3.0, epsilon = 1e-15);
        assert!(k.value.im.abs() < 1e-15);
    }

    #[test]
    fn kernel_is_bounded_and_conjugate_sum_nonnegative() {
        let p = ModelParams {
            omega0: 1.7,
            ..unit()
        };
        for &(w, wp, t) in &[(0.1, 0.2, 3.0), (5.0, 1.0, 0.37), (2.0, 2.0, 100.0)] {
            let k = far_zone_kernel(w, wp, t, &p).unwrap();
            assert!(k.value.norm() <= 2.0 / (p.omega0 * p.omega0 * k.omega_sum) * (1.0 + 1e-15));
            assert!(k.with_conjugate() >= 0.0);
            let expected = 2.0 / (p.omega0 * p.omega0 * k.omega_sum) * (1.0 - (k.omega_sum * t).cos());
            assert_relative_eq!(k.with_conjugate(), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn kernel_rejects_bad_input() {
        assert!(far_zone_kernel(0.0, 0.0, 1.0, &unit()).is_err());
        assert!(far_zone_kernel(1.0, 1.0, -1.0, &unit()).is_err());
    }

    #[test]
    fn time_representation_unit_case() {
        let rule = kernel_time_representation(1.0, 1.0);
        let direct = one_minus_phase_over(1.0, 1.0);
        let expected = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -1.0);
        assert!((rule.apply(1.0) - direct).norm() < 1e-12);
        assert!((direct - expected).norm() < 1e-15);
    }

    #[test]
    fn time_representation_empty_at_zero() {
        let rule = kernel_time_representation(3.0, 0.0);
        assert!(rule.nodes.is_empty());
        assert_eq!(rule.apply(3.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn time_representation_oscillatory() {
        let (omega, t) = (100.0, 10.0);
        let rule = kernel_time_representation(omega, t);
        let periods = omega * t / (2.0 * PI);
        assert!(rule.nodes.len() as f64 >= 10.0 * periods);
        assert!((rule.apply(omega) - one_minus_phase_over(omega, t)).norm() < 1e-10);
    }

    #[test]
    fn imaginary_time_representation_matches_kernel() {
        for &(omega, t) in &[(1.0, 1.0), (3.0, 7.5), (0.2, 40.0)] {
            let opts = AdaptiveOptions::default();
            let re = integrate_to_infinity(|s| imaginary_time_integrand(omega, t, s).re, &[0.0, 1.0 / omega], &opts);
            let im = integrate_to_infinity(|s| imaginary_time_integrand(omega, t, s).im, &[0.0, 1.0 / omega], &opts);
            let direct = one_minus_phase_over(omega, t);
            assert_relative_eq!(re.value, direct.re, epsilon = 1e-10);
            assert_relative_eq!(im.value, direct.im, epsilon = 1e-10);
        }
    }
}
