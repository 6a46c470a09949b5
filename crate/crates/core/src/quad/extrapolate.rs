//! Polynomial (Neville) extrapolation of regulated values to `eta -> 0`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Change of the estimate when the coarsest sample is dropped.
    pub error: f64,
}

fn neville_at_zero(points: &[(f64, f64)]) -> f64 {
    let mut t: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = t.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            t[i] = (xj * t[i] - xi * t[i + 1]) / (xj - xi);
        }
    }
    t[0]
}

/// Extrapolates `(eta, value)` samples, ordered by strictly decreasing eta,
/// to `eta = 0`.
///
/// Fails with [`Error::ExtrapolationUnreliable`] when the successive
/// differences grow instead of shrinking, or when the error estimate exceeds
/// a tenth of the extrapolated magnitude.
pub fn eta_extrapolate(points: &[(f64, f64)]) -> Result<Extrapolation> {
    if points.len() < 3 {
        return invalid(format!("need at least 3 regulator values, got {}", points.len()));
    }
    if points.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
        return invalid("regulator values must be positive and samples finite");
    }
    if points.windows(2).any(|w| w[1].0 >= w[0].0) {
        return invalid("regulator values must be strictly decreasing");
    }
    let diffs: Vec<f64> = points.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let value = neville_at_zero(points);
    let error = (value - neville_at_zero(&points[1..])).abs();
    if diffs.windows(2).any(|d| d[1] > d[0]) {
        return Err(Error::ExtrapolationUnreliable(format!(
            "differences do not decrease: {diffs:?}"
        )));
    }
    if error > 0.1 * value.abs() {
        return Err(Error::ExtrapolationUnreliable(format!(
            "error estimate {error:.3e} exceeds 10% of {value:.3e}"
        )));
    }
    Ok(Extrapolation { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_polynomials() {
        let f = |e: f64| 3.0 - 2.0 * e + 0.5 * e * e;
        let pts: Vec<_> = [0.4, 0.2, 0.1].iter().map(|&e| (e, f(e))).collect();
        let r = eta_extrapolate(&pts).unwrap();
        assert_relative_eq!(r.value, 3.0, epsilon = 1e-13);
    }

    #[test]
    fn linear_convergence_with_small_error() {
        let f = |e: f64| 1.0 + e + (5.0 * e).sin() * e * e;
        let pts: Vec<_> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&e| (e, f(e))).collect();
        let r = eta_extrapolate(&pts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-3);
        assert!(r.error < 1e-2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eta_extrapolate(&[(0.1, 1.0), (0.05, 1.0)]), Err(Error::InvalidArgument(_))));
        assert!(eta_extrapolate(&[(0.1, 1.0), (0.2, 1.0), (0.05, 1.0)]).is_err());
    }

    #[test]
    fn flags_noisy_sequences() {
        let pts = [(0.1, 1.0), (0.05, 1.1), (0.025, 0.5)];
        assert!(matches!(eta_extrapolate(&pts), Err(Error::ExtrapolationUnreliable(_))));
    }
}
