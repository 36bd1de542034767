use nextjump_core::closed_form::{survival_exact, survival_shorttime};
use nextjump_core::engine::{derivative_detuned, derivative_resonant};
use nextjump_core::readout::{characteristic_roots, slow_rate};
use nextjump_core::{
    closed_form_record, evolve, initial_state, make_params, propagate, sample_jump_times,
    EvolutionSpec, FockTruncation, QubitLevel, Regime, SurvivalModel, SurvivalRecord,
    SystemParams, C64,
};
use proptest::prelude::*;

fn run(p: &SystemParams, regime: Regime, level: QubitLevel, t_end: f64) -> SurvivalRecord {
    let tr = FockTruncation::for_params(p);
    evolve(
        &initial_state(level, &tr),
        p,
        &EvolutionSpec::new(regime, t_end, p),
        &tr,
    )
    .unwrap()
    .0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_drive_is_kappa_sqrt_nbar_over_two(kappa in 1e-3f64..1e3, nbar in 0.0f64..1e4) {
        let p = make_params(kappa, nbar, 0.0, 0.0).unwrap();
        prop_assert!((p.gamma_drive() - kappa * nbar.sqrt() / 2.0).abs()
            <= 4.0 * f64::EPSILON * p.gamma_drive());
    }

    #[test]
    fn initial_state_has_unit_survival(n_max in 1usize..200, b in any::<bool>()) {
        let tr = FockTruncation::new(n_max, 1e-10).unwrap();
        let level = if b { QubitLevel::B } else { QubitLevel::G };
        prop_assert_eq!(initial_state(level, &tr).survival_probability(), 1.0);
    }

    #[test]
    fn short_time_bound(t in 1e-3f64..0.1, nbar in 0.5f64..100.0) {
        let p = make_params(1.0, nbar, 0.0, 0.0).unwrap();
        let exact = survival_exact(t, &p).ln();
        let short = survival_shorttime(t, &p).ln();
        prop_assert!(((exact - short) / exact).abs() < 0.05);
    }

    #[test]
    fn inside_window_slow_root_tracks_gamma_plus_leak(
        chi in 10.0f64..60.0,
        nbar in 20.0f64..400.0,
        frac in 0.02f64..0.316,
    ) {
        // β_B²/(4|Ω|²) = 1/frac² ≥ 10
        let p0 = make_params(1.0, nbar, chi, 0.0).unwrap();
        // the closure condition Γ²/χ² ≪ 1; beyond it the Γ²/χ shift of
        // |G,0⟩ detunes it from |B,0⟩ and slows the transfer
        prop_assume!(p0.gamma_drive().powi(2) / (chi * chi) <= 0.05);
        let bb = 2.0 * (2.0 / std::f64::consts::PI).sqrt() * p0.gamma_drive();
        let p = p0.with_omega(C64::new(frac * bb / 2.0, 0.0)).unwrap();
        let e = characteristic_roots(&p).unwrap();
        prop_assume!(e.valid);
        let gamma = slow_rate(&p).unwrap();
        // second-order leak of |G,0⟩ through |G,1⟩
        let k = p.kappa();
        let leak = k * p.gamma_drive().powi(2) / (2.0 * (chi * chi + k * k / 4.0));
        let want = gamma + leak;
        prop_assert!((e.roots[1].re + want).abs() / want <= 0.15,
            "λ₂ = {}, γ + leak = {}", e.roots[1], want);
        // the leak is negligible once the Rabi rate dominates it tenfold
        if e.diagnostics.rabi_over_leak >= 10.0 {
            prop_assert!((e.roots[1].re + gamma).abs() / gamma <= 0.15,
                "λ₂ = {}, γ = {}", e.roots[1], gamma);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn engine_records_are_monotone_and_match_oracle(
        nbar in 0.1f64..10.0,
        chi in 0.0f64..8.0,
    ) {
        let p = make_params(1.0, nbar, chi, 0.0).unwrap();
        let regime = if chi == 0.0 { Regime::Resonant } else { Regime::Detuned };
        let rec = run(&p, regime, QubitLevel::G, 5.0);
        for pair in rec.points().windows(2) {
            prop_assert!(pair[1].w <= pair[0].w * (1.0 + 1e-12));
        }
        for pt in rec.points() {
            prop_assert!((pt.w - survival_exact(pt.t, &p)).abs() < 1e-8);
        }
    }

    #[test]
    fn generator_decrement_identity(nbar in 0.1f64..10.0, chi in 0.0f64..8.0) {
        let p = make_params(1.0, nbar, chi, 0.0).unwrap();
        let tr = FockTruncation::for_params(&p);
        let states = propagate(
            &initial_state(QubitLevel::G, &tr),
            &p,
            &EvolutionSpec::new(Regime::Detuned, 3.0, &p),
            &tr,
        )
        .unwrap();
        for s in states.iter().step_by(5) {
            let d = if chi == 0.0 {
                derivative_resonant(s, &p).unwrap()
            } else {
                derivative_detuned(s, &p).unwrap()
            };
            let dw: f64 = s.amps_g().iter().zip(&d.d_g)
                .chain(s.amps_b().iter().zip(&d.d_b))
                .map(|(c, dc)| 2.0 * (c.conj() * dc).re)
                .sum();
            let loss = p.kappa() * s.photon_weight();
            prop_assert!((dw + loss).abs() <= 1e-12 * loss.max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn linearity(re in -0.7f64..0.7, im in -0.7f64..0.7) {
        let c = C64::new(re, im);
        let p = make_params(1.0, 3.0, 2.0, 0.5).unwrap();
        let tr = FockTruncation::for_params(&p);
        let start = initial_state(QubitLevel::B, &tr);
        let spec = EvolutionSpec::new(Regime::Coupled, 2.0, &p);
        // step sequences may differ with the amplitude scale; both land on t_end
        let plain = propagate(&start, &p, &spec, &tr).unwrap();
        let scaled = propagate(&start.scaled(c), &p, &spec, &tr).unwrap();
        let (a, b) = (plain.last().unwrap(), scaled.last().unwrap());
        prop_assert_eq!(a.time(), b.time());
        let diff = a.amps_g().iter().zip(b.amps_g())
            .chain(a.amps_b().iter().zip(b.amps_b()))
            .map(|(x, y)| (x * c - y).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-8, "{}", diff);
    }

    #[test]
    fn coupled_records_are_monotone(
        nbar in 0.1f64..9.0,
        chi in 0.0f64..10.0,
        omega in 0.0f64..3.0,
        b in any::<bool>(),
    ) {
        let p = make_params(1.0, nbar, chi, omega).unwrap();
        let level = if b { QubitLevel::B } else { QubitLevel::G };
        let rec = run(&p, Regime::Coupled, level, 3.0);
        for pair in rec.points().windows(2) {
            prop_assert!(pair[1].w <= pair[0].w * (1.0 + 1e-12));
        }
    }

    #[test]
    fn uncensored_fraction_is_binomial(nbar in 0.2f64..2.0, seed in any::<u64>()) {
        let p = make_params(1.0, nbar, 0.0, 0.0).unwrap();
        let rec = closed_form_record(&p, SurvivalModel::Exact, 1.5, 301).unwrap();
        let n = 20_000;
        let s = sample_jump_times(&rec, n, seed);
        let q = 1.0 - rec.w_end();
        let frac = s.times.len() as f64 / n as f64;
        let sd = (q * (1.0 - q) / n as f64).sqrt();
        prop_assert!((frac - q).abs() < 5.0 * sd, "{} vs {} (sd {})", frac, q, sd);
        prop_assert_eq!(s.times.len() + s.censored, n);
        prop_assert!(s.times.iter().all(|&t| (0.0..=rec.t_end()).contains(&t)));
    }
}

#[test]
fn regime_continuity_independent_stepping() {
    let p = make_params(1.0, 6.0, 0.0, 0.0).unwrap();
    let a = run(&p, Regime::Resonant, QubitLevel::G, 4.0);
    let b = run(&p, Regime::Detuned, QubitLevel::G, 4.0);
    let c = run(&p, Regime::Coupled, QubitLevel::G, 4.0);
    assert_eq!(a, b.clone());
    for pt in c.points() {
        assert!((pt.w - a.interpolate(pt.t)).abs() < 1e-6 * pt.w.max(1e-3));
    }
    assert!((a.w_end() - c.w_end()).abs() < 1e-12);
}
