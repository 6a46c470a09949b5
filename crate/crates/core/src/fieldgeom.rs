//! Spherical Bessel utilities and the solid-angle averages of the dipole
//! field structures entering the electric and magnetic energy densities.
//!
//! With `x = k r`, `x' = k' r` the averaged brackets reduce to
//!
//! ```text
//! electric: (|d|^2 / 3) [ j0(x) j0(x') + 2 j0'(x) j0'(x') / (x x') + j0''(x) j0''(x') ]
//! magnetic: (2 |d|^2 / 3) k k' j0'(x) j0'(x')
//! ```
//!
//! The [`pointwise`] module builds the unaveraged brackets from explicit
//! Cartesian derivatives; it is kept as an independent check of the
//! reductions above.

use crate::model::ModelParams;

/// Spherical Bessel function `j0(x) = sin(x) / x`.
pub fn sph_bessel_j0(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// `j0'(x) = (x cos x - sin x) / x^2`.
pub fn sph_bessel_j0_prime(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 * (1.0 / 45360.0 - x2 / 3_991_680.0))))
    } else {
        let (s, c) = x.sin_cos();
        (x * c - s) / (x * x)
    }
}

/// `j0''(x) = ((2 - x^2) sin x - 2 x cos x) / x^3`.
pub fn sph_bessel_j0_second(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        -1.0 / 3.0 + x2 * (1.0 / 10.0 + x2 * (-1.0 / 168.0 + x2 * (1.0 / 6480.0 - x2 / 443_520.0)))
    } else {
        let (s, c) = x.sin_cos();
        ((2.0 - x * x) * s - 2.0 * x * c) / (x * x * x)
    }
}

/// Angle-averaged bracket of the magnetic energy density,
/// `<d^2 grad j0(kr) . grad j0(k'r) - (d . grad j0(kr))(d . grad j0(k'r))>`.
pub fn magnetic_bracket_avg(k: f64, kp: f64, r: f64, params: &ModelParams) -> f64 {
    2.0 * params.dipole_norm_sq() / 3.0
        * k
        * kp
        * sph_bessel_j0_prime(k * r)
        * sph_bessel_j0_prime(kp * r)
}

/// Angle-averaged four-term bracket of the electric energy density.
pub fn electric_bracket_avg(k: f64, kp: f64, r: f64, params: &ModelParams) -> f64 {
    let (x, xp) = (k * r, kp * r);
    params.dipole_norm_sq() / 3.0
        * (sph_bessel_j0(x) * sph_bessel_j0(xp)
            + 2.0 * sph_bessel_j0_prime(x) * sph_bessel_j0_prime(xp) / (x * xp)
            + sph_bessel_j0_second(x) * sph_bessel_j0_second(xp))
}

/// Radial factors `f(x)` such that `x^3 x'^3 <bracket>` is a weighted sum of
/// products `f(x) f(x')`. Closed trigonometric forms, no division.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialFactor {
    /// `x^3 j0(x) = x^2 sin x`
    CubeJ0,
    /// `x^2 j0'(x) = x cos x - sin x`
    SquareJ0Prime,
    /// `x^3 j0''(x) = (2 - x^2) sin x - 2 x cos x`
    CubeJ0Second,
    /// `x^3 j0'(x) = x (x cos x - sin x)`
    CubeJ0Prime,
}

impl RadialFactor {
    #[inline]
    pub fn eval_with(&self, x: f64, sin: f64, cos: f64) -> f64 {
        match self {
            RadialFactor::CubeJ0 => x * x * sin,
            RadialFactor::SquareJ0Prime => x * cos - sin,
            RadialFactor::CubeJ0Second => (2.0 - x * x) * sin - 2.0 * x * cos,
            RadialFactor::CubeJ0Prime => x * (x * cos - sin),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        self.eval_with(x, s, c)
    }
}

/// `x^3 x'^3 <electric bracket> / |d|^2 = sum_i w_i f_i(x) f_i(x')`.
pub const ELECTRIC_TERMS: [(f64, RadialFactor); 3] = [
    (1.0 / 3.0, RadialFactor::CubeJ0),
    (2.0 / 3.0, RadialFactor::SquareJ0Prime),
    (1.0 / 3.0, RadialFactor::CubeJ0Second),
];

/// `x^3 x'^3 <magnetic bracket> / (|d|^2 k k')`: the magnetic density
/// integrand `k^2 k'^2 <B_M>` in `x` variables, up to `r^-6`.
pub const MAGNETIC_TERMS: [(f64, RadialFactor); 1] = [(2.0 / 3.0, RadialFactor::CubeJ0Prime)];

pub mod pointwise {
    //! Unaveraged brackets at a point `r_vec`, built from Cartesian
    //! derivatives of `j0(k |r|)`:
    //! `d_i d_j j0 = (delta_ij - rhat_i rhat_j) f'/r + rhat_i rhat_j f''`.

    use nalgebra::{Matrix3, Vector3};

    use super::{sph_bessel_j0, sph_bessel_j0_prime, sph_bessel_j0_second};
    use crate::quad::gauss::gauss_legendre;

    fn gradient(k: f64, r_vec: &Vector3<f64>) -> Vector3<f64> {
        let r = r_vec.norm();
        r_vec / r * (k * sph_bessel_j0_prime(k * r))
    }

    pub fn hessian(k: f64, r_vec: &Vector3<f64>) -> Matrix3<f64> {
        let r = r_vec.norm();
        let rhat = r_vec / r;
        let x = k * r;
        let outer = rhat * rhat.transpose();
        // f'/r = k^2 j0'(x)/x, which tends to -k^2/3 at small x
        let radial_over_r = if x.abs() < 1e-4 {
            k * k * (-1.0 / 3.0 + x * x / 30.0)
        } else {
            k * sph_bessel_j0_prime(x) / r
        };
        (Matrix3::identity() - outer) * radial_over_r + outer * (k * k * sph_bessel_j0_second(x))
    }

    pub fn electric_bracket(k: f64, kp: f64, r_vec: &Vector3<f64>, d: &Vector3<f64>) -> f64 {
        let r = r_vec.norm();
        let (f, g) = (sph_bessel_j0(k * r), sph_bessel_j0(kp * r));
        let (hk, hkp) = (hessian(k, r_vec), hessian(kp, r_vec));
        let dd_g = d.dot(&(hkp * d));
        let dd_f = d.dot(&(hk * d));
        let contraction = d.dot(&(hk * hkp * d));
        d.norm_squared() * f * g
            + f * dd_g / (kp * kp)
            + g * dd_f / (k * k)
            + contraction / (k * k * kp * kp)
    }

    pub fn magnetic_bracket(k: f64, kp: f64, r_vec: &Vector3<f64>, d: &Vector3<f64>) -> f64 {
        let (gf, gg) = (gradient(k, r_vec), gradient(kp, r_vec));
        d.norm_squared() * gf.dot(&gg) - d.dot(&gf) * d.dot(&gg)
    }

    /// Product rule on the unit sphere: Gauss-Legendre in `cos(theta)` times
    /// the uniform rule in `phi`. Weights sum to one (solid-angle mean).
    pub fn sphere_rule(n_theta: usize, n_phi: usize) -> Vec<(Vector3<f64>, f64)> {
        let (mu, w) = gauss_legendre(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        for (m, wm) in mu.iter().zip(&w) {
            let st = (1.0 - m * m).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                points.push((
                    Vector3::new(st * phi.cos(), st * phi.sin(), *m),
                    0.5 * wm / n_phi as f64,
                ));
            }
        }
        points
    }

    /// Solid-angle mean of `f(r rhat)` with the 110-point (10 x 11) rule.
    pub fn sphere_average(r: f64, f: impl Fn(&Vector3<f64>) -> f64) -> f64 {
        sphere_rule(10, 11)
            .iter()
            .map(|(n, w)| w * f(&(n * r)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::pointwise::*;
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;

    #[test]
    fn j0_values() {
        assert_eq!(sph_bessel_j0(0.0), 1.0);
        assert!(sph_bessel_j0(std::f64::consts::PI).abs() < 1e-16);
        assert_relative_eq!(sph_bessel_j0(1.0), 0.841_470_984_807_896_5, epsilon = 1e-16);
    }

    #[test]
    fn series_branches_are_continuous() {
        for &x in &[1e-3, 0.1] {
            let (lo, hi) = (x * (1.0 - 1e-12), x * (1.0 + 1e-12));
            assert_relative_eq!(sph_bessel_j0(lo), sph_bessel_j0(hi), epsilon = 1e-11);
            assert_relative_eq!(sph_bessel_j0_prime(lo), sph_bessel_j0_prime(hi), max_relative = 1e-10);
            assert_relative_eq!(sph_bessel_j0_second(lo), sph_bessel_j0_second(hi), max_relative = 1e-10);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &x in &[0.05, 0.3, 1.7, 12.0] {
            let fd1 = (sph_bessel_j0(x + h) - sph_bessel_j0(x - h)) / (2.0 * h);
            let fd2 = (sph_bessel_j0_prime(x + h) - sph_bessel_j0_prime(x - h)) / (2.0 * h);
            assert!((fd1 - sph_bessel_j0_prime(x)).abs() < 1e-9);
            assert!((fd2 - sph_bessel_j0_second(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn radial_factors_match_bessel_forms() {
        for &x in &[0.2, 1.0, 7.5, 40.0] {
            assert_relative_eq!(RadialFactor::CubeJ0.eval(x), x.powi(3) * sph_bessel_j0(x), max_relative = 1e-12);
            assert_relative_eq!(RadialFactor::SquareJ0Prime.eval(x), x * x * sph_bessel_j0_prime(x), max_relative = 1e-12);
            assert_relative_eq!(RadialFactor::CubeJ0Second.eval(x), x.powi(3) * sph_bessel_j0_second(x), max_relative = 1e-12);
            assert_relative_eq!(RadialFactor::CubeJ0Prime.eval(x), x.powi(3) * sph_bessel_j0_prime(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn separable_terms_reproduce_brackets() {
        let params = ModelParams::default();
        let (k, kp, r) = (0.4, 1.3, 11.0);
        let (x, xp) = (k * r, kp * r);
        let e: f64 = ELECTRIC_TERMS.iter().map(|(w, f)| w * f.eval(x) * f.eval(xp)).sum();
        assert_relative_eq!(e, (x * xp).powi(3) * electric_bracket_avg(k, kp, r, &params), max_relative = 1e-12);
        let m: f64 = MAGNETIC_TERMS.iter().map(|(w, f)| w * f.eval(x) * f.eval(xp)).sum();
        let m_ref = (x * xp).powi(3) * magnetic_bracket_avg(k, kp, r, &params) / (k * kp);
        assert_relative_eq!(m, m_ref, max_relative = 1e-12);
    }

    #[test]
    fn magnetic_average_matches_sphere_quadrature() {
        let params = ModelParams {
            dipole: [0.3, -0.5, 0.8],
            ..ModelParams::default()
        };
        let d = params.dipole_vec();
        let (k, kp, r) = (1.0, 2.0, 5.0);
        let numeric = sphere_average(r, |v| magnetic_bracket(k, kp, v, &d));
        let analytic = magnetic_bracket_avg(k, kp, r, &params);
        assert!((numeric - analytic).abs() <= 1e-10 * analytic.abs().max(1e-300));
    }

    #[test]
    fn magnetic_bracket_at_bessel_zero_is_positive() {
        let params = ModelParams::default();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(sph_bessel_j0_prime(pi), -1.0 / pi, epsilon = 1e-15);
        let (k, kp) = (1.0, 1.0);
        let b = magnetic_bracket_avg(k, kp, pi, &params);
        assert_relative_eq!(b, 2.0 / 3.0 / (pi * pi), epsilon = 1e-15);
    }

    #[test]
    fn electric_average_matches_sphere_quadrature() {
        let params = ModelParams {
            dipole: [0.2, 0.7, -0.4],
            ..ModelParams::default()
        };
        let d = params.dipole_vec();
        let (k, kp, r) = (0.3, 0.7, 20.0);
        let numeric = sphere_average(r, |v| electric_bracket(k, kp, v, &d));
        let analytic = electric_bracket_avg(k, kp, r, &params);
        assert!(
            (numeric - analytic).abs() <= 1e-8 * analytic.abs(),
            "{numeric} vs {analytic}"
        );
    }

    #[test]
    fn electric_partial_sum_at_equal_wavenumbers() {
        // first term plus both (d.grad)^2 terms: (1 - 1/3 - 1/3) |d|^2 j0^2
        let d = Vector3::new(0.0, 0.6, 0.8);
        let (k, r) = (0.8, 13.0);
        let partial = sphere_average(r, |v| {
            let f = sph_bessel_j0(k * v.norm());
            let dd_f = d.dot(&(hessian(k, v) * d));
            d.norm_squared() * f * f + 2.0 * f * dd_f / (k * k)
        });
        let j = sph_bessel_j0(k * r);
        assert_relative_eq!(partial, j * j / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn brackets_vanish_without_dipole() {
        let params = ModelParams {
            dipole: [0.0; 3],
            ..ModelParams::default()
        };
        assert_eq!(electric_bracket_avg(1.0, 2.0, 3.0, &params), 0.0);
        assert_eq!(magnetic_bracket_avg(1.0, 2.0, 3.0, &params), 0.0);
    }
}
