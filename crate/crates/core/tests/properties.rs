//! Randomized invariants across modules.

use proptest::prelude::*;
use rt_core::dispersion::{self, TIGHT_TOL};
use rt_core::grid::GridSpec;
use rt_core::simulator::{self, SimulationRun};
use rt_core::{mode, symbol, witness, Complex64, FluidParams, Phase};

fn params() -> impl Strategy<Value = FluidParams> {
    prop::array::uniform6(0.2f64..5.0).prop_map(|v| FluidParams::new(v[0], v[1], v[2], v[3], v[4], v[5]).unwrap())
}

fn unstable_params() -> impl Strategy<Value = FluidParams> {
    params().prop_filter("heavy fluid on top", |p| p.rho2 > 1.05 * p.rho1)
}

fn stable_params() -> impl Strategy<Value = FluidParams> {
    params().prop_filter("light fluid on top", |p| p.rho2 <= p.rho1)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scaled_form_matches_symbol(p in params(), tau in 0.01f64..20.0, zeta in 1e-4f64..1e3) {
        let direct = symbol::symbol_s(Complex64::new(tau * tau * zeta, 0.0), tau, &p).unwrap();
        let k = symbol::k_of_zeta(Complex64::new(zeta, 0.0), &p).unwrap();
        let scaled = (k * symbol::psi(tau, &p).unwrap() + zeta) * (tau * tau);
        prop_assert!(rel(direct, scaled) <= 1e-12, "{direct} vs {scaled}");
    }

    #[test]
    fn schwarz_reflection(p in params(), tau in 0.01f64..10.0, re in -0.5f64..10.0, im in -10.0f64..10.0) {
        let lam = Complex64::new(re * tau * tau * p.min_kinematic_viscosity(), im);
        let a = symbol::symbol_s(lam.conj(), tau, &p).unwrap();
        let b = symbol::symbol_s(lam, tau, &p).unwrap().conj();
        prop_assert!(rel(a, b) <= 1e-14);
    }

    #[test]
    fn omega_stays_on_principal_branch(p in params(), tau in 0.0f64..10.0, re in -50.0f64..50.0, im in -50.0f64..50.0) {
        let lam = Complex64::new(re, im);
        for phase in [Phase::Lower, Phase::Upper] {
            let w = symbol::omega(phase, lam, tau, &p);
            prop_assert!(w.re >= 0.0);
            let radicand = lam * p.rho(phase) + p.mu(phase) * tau * tau;
            prop_assert!((w * w - radicand).norm() <= 1e-13 * radicand.norm().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn k_stays_in_lower_right_sector(p in params(), r in 1e-3f64..1e3, theta in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let k = symbol::k_of_zeta(Complex64::from_polar(r, theta), &p).unwrap();
        let arg = k.arg();
        prop_assert!(arg > -std::f64::consts::FRAC_PI_2 && arg <= 0.0, "arg k = {arg}");
    }

    #[test]
    fn band_root_is_positive_and_zeroes_symbol(p in unstable_params(), f in 0.01f64..0.99) {
        let ts = dispersion::cutoff_wavenumber(&p).unwrap();
        let tau = f * ts;
        let lam = dispersion::growth_rate(tau, &p, TIGHT_TOL).unwrap();
        prop_assert!(lam > 0.0);
        prop_assert!(dispersion::normalized_residual(lam, tau, &p).unwrap() <= 1e-10);
    }

    #[test]
    fn solve_is_linear_and_balanced(p in params(), tau in 0.05f64..5.0, lam in 0.01f64..5.0, h in -3.0f64..3.0) {
        prop_assume!(h.abs() > 1e-3);
        let lam = Complex64::new(lam, 0.0);
        let one = mode::solve_mode(lam, tau, Complex64::new(1.0, 0.0), &p).unwrap();
        let many = mode::solve_mode(lam, tau, Complex64::new(h, 0.0), &p).unwrap();
        for (x, y) in one.coeffs_lower.iter().chain(&one.coeffs_upper).zip(many.coeffs_lower.iter().chain(&many.coeffs_upper)) {
            prop_assert!((*x * h - *y).norm() <= 1e-12 * y.norm().max(1e-300) + 1e-14 * h.abs());
        }
        let scale = (many.h_amp * mode::interface_forcing(tau, &p)).norm();
        prop_assert!(many.normal_stress_defect(&p).norm() <= 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn determinant_is_real_for_real_lambda(p in params(), tau in 0.05f64..5.0, lam in 0.001f64..10.0) {
        let d = mode::free_mode_determinant(Complex64::new(lam, 0.0), tau, &p);
        prop_assert_eq!(d.im, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_zero_is_real_and_unique(p in unstable_params(), f in 0.05f64..0.95) {
        let tau = f * dispersion::cutoff_wavenumber(&p).unwrap();
        let floor = 0.5 * dispersion::KAPPA * dispersion::branch_edge(tau, &p);
        let root = dispersion::rightmost_root(tau, &p, floor).unwrap().expect("band root");
        prop_assert!(root.lambda.im.abs() <= 1e-9 * root.lambda.re.abs());
        let region = dispersion::default_region(tau, &p);
        let taller = dispersion::Rect::new(region.re_min, region.re_max, 2.0 * region.im_min, 2.0 * region.im_max).unwrap();
        prop_assert_eq!(dispersion::count_zeros_rhp(tau, &p, &region).unwrap().count, 1);
        prop_assert_eq!(dispersion::count_zeros_rhp(tau, &p, &taller).unwrap().count, 1);
    }

    #[test]
    fn stable_fluids_have_no_growing_zero(p in stable_params(), tau in 0.05f64..10.0) {
        let region = dispersion::default_region(tau, &p);
        prop_assert_eq!(dispersion::count_zeros_rhp(tau, &p, &region).unwrap().count, 0);
    }

    #[test]
    fn symbol_multiplier_keeps_support(p in unstable_params(), frac in 0.2f64..0.45, angle in 0.0f64..std::f64::consts::TAU) {
        let xi0 = [0.7 * angle.cos(), 0.7 * angle.sin()];
        let eps = frac * 0.7;
        let spec = witness::grid_for(2, 128, eps).unwrap();
        let window = witness::build_window(eps, spec).unwrap();
        let h = witness::build_heps(xi0, eps, &window).unwrap();
        let g = witness::apply_symbol_multiplier(&h, 0.1, &p).unwrap();
        for (a, b) in h.spectrum().iter().zip(g.spectrum()) {
            if a.norm() == 0.0 {
                prop_assert_eq!(b.norm(), 0.0);
            }
        }
    }

    #[test]
    fn evolution_is_linear_with_semigroup(seed in any::<u64>(), a_re in -5.0f64..5.0, a_im in -5.0f64..5.0, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let p = FluidParams::new(1.0, 2.0, 0.5, 1.5, 1.0, 1.0).unwrap();
        let spec = GridSpec::new(1, 32, 30.0).unwrap();
        let run = SimulationRun::new(simulator::white_noise(spec, seed, 1.0).unwrap(), p, vec![]).unwrap();
        let a = Complex64::new(a_re, a_im);
        prop_assume!(a.norm() > 1e-3);
        let full = simulator::evolve(&run, t1 + t2).unwrap();
        let scale = full.values().iter().map(|v| v.norm()).fold(0.0, f64::max) * a.norm();
        let lin = simulator::evolve(&run.restarted(run.field0.scaled(a)).unwrap(), t1 + t2).unwrap();
        for (x, y) in lin.values().iter().zip(full.scaled(a).values()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
        let mid = simulator::evolve(&run, t1).unwrap();
        let two = simulator::evolve(&run.restarted(mid).unwrap(), t2).unwrap();
        for (x, y) in two.values().iter().zip(full.values()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale / a.norm());
        }
        prop_assert_eq!(full.spectrum()[0], run.field0.spectrum()[0]);
    }
}

#[test]
fn phi_is_strictly_increasing() {
    let p = FluidParams::new(0.7, 2.9, 1.8, 0.4, 1.3, 2.2).unwrap();
    let mut last = symbol::phi_real(0.0, &p).0;
    for i in 1..=10_000 {
        let z = 1e3 * i as f64 / 10_000.0;
        let v = symbol::phi_real(z, &p).0;
        assert!(v > last, "Phi not increasing at {z}");
        last = v;
    }
}
