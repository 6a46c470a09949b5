use std::f64::consts::PI;

use dynacp::closedform::{static_value, Distribution};
use dynacp::fieldgeom::{electric_bracket_avg, magnetic_bracket_avg};
use dynacp::kernels::far_zone_kernel;
use dynacp::model::polarization_dyad;
use dynacp::*;
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vector3<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(x, y, z)| Vector3::new(x, y, z))
        .prop_filter("non-zero", |v| v.norm() > 0.1)
}

fn family() -> impl Strategy<Value = MollifierFamily> {
    prop_oneof![Just(MollifierFamily::Lorentzian), Just(MollifierFamily::Gaussian)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn densities_are_linear_in_the_shift(
        rho in 10.0..50.0f64,
        tau in 0.0..150.0f64,
        shift in -0.09..0.09f64,
        fam in family(),
        width in 0.01..0.5f64,
    ) {
        let base = ModelParams { delta_omega0: 1.0, ..ModelParams::default() };
        let scaled = ModelParams { delta_omega0: shift, ..base };
        let spec = MollifierSpec::new(fam, width);
        let p = SpacetimePoint::new(rho, tau, &base).unwrap();
        let a = total_energy_density(&p, &base, &spec).unwrap();
        let b = total_energy_density(&p, &scaled, &spec).unwrap();
        prop_assert!((b.electric - shift * a.electric).abs() <= 1e-14 * a.electric.abs());
        prop_assert!((b.magnetic - shift * a.magnetic).abs() <= 1e-14 * a.magnetic.abs());
        prop_assert_eq!(b.total, b.electric + b.magnetic);
    }

    #[test]
    fn gaussian_profiles_vanish_outside_the_cone(rho in 10.0..60.0f64, lead in 20.0..200.0f64, width in 0.02..0.3f64) {
        let params = ModelParams::default();
        let spec = MollifierSpec::gaussian(width);
        let t = rho - lead * width;
        prop_assume!(t >= 0.0);
        let p = SpacetimePoint::new(rho, t, &params).unwrap();
        let d = total_energy_density(&p, &params, &spec).unwrap();
        let floor = static_value(&ProfileCoefficients::electric(), rho, &params).abs();
        prop_assert!(d.electric.abs() <= 1e-3 * floor);
        prop_assert!(d.magnetic.abs() <= 1e-3 * floor);
    }

    #[test]
    fn theta_is_monotone(fam in family(), width in 0.01..1.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
        let spec = MollifierSpec::new(fam, width);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t_lo = mollified_distribution(Distribution::Theta, lo, &spec).unwrap();
        let t_hi = mollified_distribution(Distribution::Theta, hi, &spec).unwrap();
        prop_assert!(t_lo <= t_hi);
        prop_assert!((0.0..=1.0).contains(&t_lo) && (0.0..=1.0).contains(&t_hi));
    }

    #[test]
    fn mode_exchange_symmetry(k in 0.01..5.0f64, kp in 0.01..5.0f64, r in 0.1..30.0f64, t in 0.0..50.0f64) {
        let params = ModelParams { dipole: [0.4, 0.1, -0.7], ..ModelParams::default() };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        let (e1, e2) = (electric_bracket_avg(k, kp, r, &params), electric_bracket_avg(kp, k, r, &params));
        prop_assert!(close(e1, e2), "{} vs {}", e1, e2);
        let (m1, m2) = (magnetic_bracket_avg(k, kp, r, &params), magnetic_bracket_avg(kp, k, r, &params));
        prop_assert!(close(m1, m2), "{} vs {}", m1, m2);
        let f = far_zone_kernel(k, kp, t, &params).unwrap();
        let g = far_zone_kernel(kp, k, t, &params).unwrap();
        prop_assert!(close(f.value.re, g.value.re) && close(f.value.im, g.value.im), "{} vs {}", f.value, g.value);
    }

    #[test]
    fn polarization_sum_is_frame_independent(k in vec3(), d in vec3(), axis in vec3(), angle in 0.0..PI) {
        // sum over both polarizations of eps^2 = (2 pi w / V) (|d|^2 - (khat . d)^2)
        let volume = 50.0;
        let params = ModelParams { dipole: [d.x, d.y, d.z], ..ModelParams::default() };
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let (e1, e2) = polarization_dyad(&k);
        let sum = |a: Vector3<f64>, b: Vector3<f64>| {
            let m1 = Mode::new(k, 1, a).unwrap();
            let m2 = Mode::new(k, 2, b).unwrap();
            coupling_epsilon(&m1, &params, volume).unwrap().powi(2)
                + coupling_epsilon(&m2, &params, volume).unwrap().powi(2)
        };
        // rotating the dyad about k leaves the sum unchanged
        let about_k = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(k), angle);
        let s0 = sum(e1, e2);
        let s1 = sum(about_k * e1, about_k * e2);
        let khat = k.normalize();
        let expected = 2.0 * PI * k.norm() / volume * (d.norm_squared() - khat.dot(&d).powi(2));
        prop_assert!((s0 - s1).abs() <= 1e-12 * (1.0 + s0));
        prop_assert!((s0 - expected).abs() <= 1e-12 * (1.0 + expected));
        // rotating k and d together
        let kr = rot * k;
        let dr = rot * d;
        let pr = ModelParams { dipole: [dr.x, dr.y, dr.z], ..params };
        let (f1, f2) = polarization_dyad(&kr);
        let sr = coupling_epsilon(&Mode::new(kr, 1, f1).unwrap(), &pr, volume).unwrap().powi(2)
            + coupling_epsilon(&Mode::new(kr, 2, f2).unwrap(), &pr, volume).unwrap().powi(2);
        prop_assert!((sr - s0).abs() <= 1e-10 * (1.0 + s0));
    }

    #[test]
    fn norm_defect_is_quartic(ks in prop::collection::vec(vec3(), 3..12), volume in 2000.0..20000.0f64) {
        let params = ModelParams::default();
        let defect = |v: f64| {
            let modes = ModeSet::from_wavevectors(&ks, v).unwrap();
            1.0 - state_norm(&dressed_amplitudes(&params, &modes).unwrap())
        };
        let d1 = defect(volume);
        let d2 = defect(4.0 * volume);
        prop_assume!(d1.abs() > 1e-12);
        // halving every coupling divides the defect by 16
        prop_assert!((d1 / d2 - 16.0).abs() < 1e-3 * 16.0);
    }

    #[test]
    fn force_matches_power_law_in_static_region(rho in 12.0..60.0f64, fam in family()) {
        let params = ModelParams::default();
        let spec = MollifierSpec::new(fam, 0.1);
        let p = SpacetimePoint::new(rho, 4.0 * rho, &params).unwrap();
        let s = cp_potential_delta(&p, &params, &spec).unwrap();
        prop_assert!((s.force - 7.0 * s.delta_v / rho).abs() <= 1e-3 * s.force.abs());
    }

    #[test]
    fn sweep_row_count(count in 2usize..6, nt in 0usize..5) {
        let cfg = dynacp::sweep::SweepConfig {
            r_grid: dynacp::sweep::RGrid { min: 10.0, max: 30.0, count, spacing: dynacp::sweep::Spacing::Log },
            t_values: (0..nt).map(|i| 7.0 * i as f64).collect(),
            threads: Some(1),
            ..Default::default()
        };
        let grid = run_sweep(&cfg).unwrap();
        prop_assert_eq!(grid.rows.len(), count * nt);
        for row in &grid.rows {
            prop_assert_eq!(row.total, row.electric + row.magnetic);
        }
    }
}
