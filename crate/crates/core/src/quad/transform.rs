//! Truncated Laplace transforms `Phi_f(s) = int_0^X f(x) e^{-s x} dx` of the
//! four radial factors, evaluated at `a`, `a + ib` and `a - ib` from one
//! sweep over the nodes.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::gauss::gauss_legendre;
use crate::fieldgeom::RadialFactor;

pub const B_IDX: usize = 0;
pub const C_IDX: usize = 1;
pub const D_IDX: usize = 2;
pub const A_IDX: usize = 3;

pub const FACTORS: [RadialFactor; 4] = [
    RadialFactor::CubeJ0,
    RadialFactor::SquareJ0Prime,
    RadialFactor::CubeJ0Second,
    RadialFactor::CubeJ0Prime,
];

const ORDER: usize = 6;
const REANCHOR: usize = 512;

/// Compensated running sum.
#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LaplaceSums {
    /// `Phi(a)`; zero unless requested.
    pub real: [Complex64; 4],
    pub plus: [Complex64; 4],
    pub minus: [Complex64; 4],
}

impl LaplaceSums {
    /// Panels of width at most `(pi/2) / (1 + |b|)`, 6 Gauss nodes each.
    /// The exponentials advance by recurrence and are re-anchored every
    /// few hundred panels.
    pub fn compute(a: f64, b: f64, x_cut: f64, want_real: bool) -> Self {
        let (xi, wi) = gauss_legendre(ORDER);
        let max_panel = FRAC_PI_2 / (1.0 + b.abs());
        let panels = ((x_cut / max_panel).ceil() as usize).max(1);
        let h = x_cut / panels as f64;

        let offsets: Vec<f64> = xi.iter().map(|x| 0.5 * h * (1.0 + x)).collect();
        let weights: Vec<f64> = wi.iter().map(|w| 0.5 * h * w).collect();
        let node_decay: Vec<f64> = offsets.iter().map(|o| (-a * o).exp()).collect();
        let node_phase: Vec<Complex64> = offsets.iter().map(|o| Complex64::from_polar(1.0, -b * o)).collect();
        let node_rot: Vec<Complex64> = offsets.iter().map(|o| Complex64::from_polar(1.0, *o)).collect();
        let step_decay = (-a * h).exp();
        let step_phase = Complex64::from_polar(1.0, -b * h);
        let step_rot = Complex64::from_polar(1.0, h);

        let mut real = [Neumaier::default(); 4];
        let mut plus = [[Neumaier::default(); 2]; 4];
        let mut minus = [[Neumaier::default(); 2]; 4];
        let (mut decay, mut phase, mut rot) = (1.0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));

        for p in 0..panels {
            let x0 = p as f64 * h;
            if p % REANCHOR == 0 {
                decay = (-a * x0).exp();
                phase = Complex64::from_polar(1.0, -b * x0);
                rot = Complex64::from_polar(1.0, x0);
            }
            let mut panel_real = [0.0; 4];
            let mut panel_cos = [0.0; 4];
            let mut panel_sin = [0.0; 4];
            for m in 0..ORDER {
                let x = x0 + offsets[m];
                let wd = weights[m] * decay * node_decay[m];
                let ph = phase * node_phase[m];
                let r = rot * node_rot[m];
                for (k, f) in FACTORS.iter().enumerate() {
                    let v = wd * f.eval_with(x, r.im, r.re);
                    panel_real[k] += v;
                    panel_cos[k] += v * ph.re;
                    panel_sin[k] += v * ph.im;
                }
            }
            for k in 0..4 {
                if want_real {
                    real[k].add(panel_real[k]);
                }
                plus[k][0].add(panel_cos[k]);
                plus[k][1].add(panel_sin[k]);
                minus[k][0].add(panel_cos[k]);
                minus[k][1].add(-panel_sin[k]);
            }
            decay *= step_decay;
            phase *= step_phase;
            rot *= step_rot;
        }
        Self {
            real: real.map(|s| Complex64::new(s.value(), 0.0)),
            plus: plus.map(|[re, im]| Complex64::new(re.value(), im.value())),
            minus: minus.map(|[re, im]| Complex64::new(re.value(), im.value())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(s: Complex64) -> [Complex64; 4] {
        let q = s * s + 1.0;
        let q2 = q * q;
        let q3 = q2 * q;
        [
            2.0 * (3.0 * s * s - 1.0) / q3,
            -2.0 / q2,
            2.0 * (3.0 - s * s) / q3,
            -8.0 * s / q3,
        ]
    }

    #[test]
    fn matches_rational_transforms() {
        for &(a, b) in &[(0.5, 0.0), (0.05, 3.0), (0.01, 0.7), (1.3, 12.0)] {
            let sums = LaplaceSums::compute(a, b, 60.0 / a, true);
            let e_real = exact(Complex64::new(a, 0.0));
            let e_plus = exact(Complex64::new(a, b));
            let e_minus = exact(Complex64::new(a, -b));
            for k in 0..4 {
                let scale = 1e-9 * (1.0 + e_real[k].norm());
                assert!((sums.real[k] - e_real[k]).norm() < scale, "real a={a} k={k}");
                assert!((sums.plus[k] - e_plus[k]).norm() < 1e-9 * (1.0 + e_plus[k].norm()));
                assert!((sums.minus[k] - e_minus[k]).norm() < 1e-9 * (1.0 + e_minus[k].norm()));
            }
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = Neumaier::default();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }
}
