//! Gauss-Legendre panel rules and a globally adaptive Gauss-Kronrod (7/15)
//! integrator.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Composite Gauss-Legendre rule: equal panels covering `[a, b]`.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    /// Panels no wider than `max_panel`, each with an `order`-point rule.
    pub fn uniform(a: f64, b: f64, max_panel: f64, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let panels = (((b - a) / max_panel).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    companion: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, gc) = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_c = gc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, g1) = f(center - dx);
        let (f2, g2) = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_c += WGK[j] * (g1 + g2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(roundoff);
    }
    Segment {
        a,
        b,
        value,
        companion: res_c * half,
        error,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_segments: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Integral of the companion function on the final segments.
    pub companion: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Globally adaptive integration over consecutive intervals
/// `[breaks[0], breaks[1]], [breaks[1], breaks[2]], ...`.
///
/// The worst segment is bisected until the summed error estimate drops below
/// `max(abs_tol, rel_tol |I|)` or the segment budget is exhausted.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], opts: &AdaptiveOptions) -> Integral {
    integrate_with_companion(|x| (f(x), 0.0), breaks, opts)
}

/// As [`integrate`], for `f` returning `(primary, companion)`. Only the
/// primary drives refinement; the companion is integrated with the same
/// Kronrod rule on the final segments.
pub fn integrate_with_companion<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    breaks: &[f64],
    opts: &AdaptiveOptions,
) -> Integral {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut segments: Vec<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * segments.len();
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        let converged = error <= tol || segments.is_empty();
        if converged || segments.len() >= opts.max_segments {
            return Integral {
                value,
                companion: segments.iter().map(|s| s.companion).sum(),
                error,
                evaluations,
                converged,
            };
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // cannot split further; keep the estimate and stop refining it
            segments.push(Segment { error: 0.0, ..s });
            continue;
        }
        segments.push(kronrod15(&mut f, s.a, mid));
        segments.push(kronrod15(&mut f, mid, s.b));
        evaluations += 30;
    }
}

/// Integral over `[breaks[0], infinity)`. The last finite break starts the
/// tail, which is mapped onto `(0, 1)` by `x = b + s / (1 - s)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    opts: &AdaptiveOptions,
) -> Integral {
    integrate_to_infinity_with_companion(|x| (f(x), 0.0), breaks, opts)
}

pub fn integrate_to_infinity_with_companion<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    breaks: &[f64],
    opts: &AdaptiveOptions,
) -> Integral {
    assert!(!breaks.is_empty(), "need a lower limit");
    let last = *breaks.last().unwrap();
    // finite part occupies [breaks[0], last]; tail occupies [last, last + 1]
    let mut extended = breaks.to_vec();
    extended.push(last + 1.0);
    let mapped = |z: f64| {
        if z <= last {
            f(z)
        } else {
            let s = z - last;
            let one_minus = 1.0 - s;
            let jac = 1.0 / (one_minus * one_minus);
            let (v, c) = f(last + s / one_minus);
            (v * jac, c * jac)
        }
    };
    integrate_with_companion(mapped, &extended, opts)
}
