//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails other than those listed in
//! [`KNOWN_UNATTAINABLE`].

use std::time::{Duration, Instant};

use nextjump_core::closed_form::{
    alpha_detuned, figure1_curve, figure2_curve, log_survival_exact, survival_exact,
};
use nextjump_core::readout::{
    characteristic_roots, evolve_reduced, readout_error, readout_time_estimate, slow_rate,
    ReducedOptions, ReducedState,
};
use nextjump_core::{
    closed_form_record, evolve, histogram_vs_density, initial_state, make_params, mean_jump_time,
    sample_jump_times, EvolutionSpec, FockTruncation, QubitLevel, Regime, StepControl,
    SurvivalModel, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// Criteria that cannot hold for the exact solution at the stated
/// tolerances. They are still evaluated and reported as FAIL.
///
/// figure 1 crossover: logW/n̄ = 3 − τ − 4e^{−τ/2} + e^{−τ} exactly, so the
/// gap to 3 − τ at τ = 8 is 4e^{−4} − e^{−8} ≈ 0.073, and the relative
/// departure from −τ³/12 is 3τ/8 + O(τ²) ≈ 7.5% at τ = 0.2.
const KNOWN_UNATTAINABLE: [&str; 1] = ["figure 1 crossover"];

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_solution_oracle() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for nbar in [1.0, 4.0, 10.0] {
        let p = make_params(1.0, nbar, 0.0, 0.0).map_err(|e| e.to_string())?;
        let tr = FockTruncation::for_params(&p);
        let start = Instant::now();
        let (rec, _) = evolve(
            &initial_state(QubitLevel::G, &tr),
            &p,
            &EvolutionSpec::new(Regime::Resonant, 5.0, &p),
            &tr,
        )
        .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let err = rec
            .points()
            .iter()
            .map(|pt| (pt.w - survival_exact(pt.t, &p)).abs())
            .fold(0.0, f64::max);
        ok &= err < 1e-8 && elapsed < Duration::from_secs(5);
        detail.push(format!("nbar={nbar}: max|ΔW|={err:.2e} in {:.3}s", elapsed.as_secs_f64()));
    }
    verdict(ok, detail.join("; "))
}

fn short_time_law() -> Check {
    let mut worst: f64 = 0.0;
    for nbar in [4.0, 100.0] {
        let p = make_params(1.0, nbar, 0.0, 0.0).map_err(|e| e.to_string())?;
        let tr = FockTruncation::for_params(&p);
        let mut spec = EvolutionSpec::new(Regime::Resonant, 0.1, &p);
        spec.step_ctrl = StepControl {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_step: 0.002,
        };
        let (rec, _) = evolve(&initial_state(QubitLevel::G, &tr), &p, &spec, &tr)
            .map_err(|e| e.to_string())?;
        for pt in rec.points().iter().filter(|pt| pt.t > 0.0) {
            let got = pt.w.ln();
            let law = -nbar * pt.t.powi(3) / 12.0;
            worst = worst.max(((got - law) / got).abs());
        }
    }
    verdict(worst < 0.05, format!("max relative deviation {worst:.4} on κt ∈ (0, 0.1]"))
}

fn decrement_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t: f64 = rng.random_range(0.05..5.0);
        let chi: f64 = rng.random_range(0.0..20.0);
        let p = make_params(1.0, 4.0, chi, 0.0).map_err(|e| e.to_string())?;
        let h = 1e-3 * t.min(1.0 / (chi + 1.0));
        let f = |x: f64| log_survival_exact(x, &p);
        let dlog = (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h);
        let w = survival_exact(t, &p);
        let dw = dlog * w;
        let want = -p.kappa() * alpha_detuned(t, &p).norm_sqr() * w;
        worst = worst.max(((dw - want) / want).abs());
    }
    verdict(worst < 1e-8, format!("max relative error {worst:.2e} over 100 points"))
}

fn figure2_reproduction() -> Check {
    let c = 5.0;
    let taus: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.005).collect();
    let curve = figure2_curve(&taus, c).map_err(|e| e.to_string())?;
    let closed = curve
        .points
        .iter()
        .map(|&(tau, y)| {
            let e = (-tau / 2.0).exp();
            let want = (1.0 - e).powi(2) + 4.0 * e * (c * tau / 2.0).sin().powi(2);
            (y - want).abs()
        })
        .fold(0.0, f64::max);
    let nbar = 4.0;
    let p = make_params(1.0, nbar, c, 0.0).map_err(|e| e.to_string())?;
    let scaled = curve
        .points
        .iter()
        .map(|&(tau, y)| {
            let want = (1.0 + 4.0 * c * c) * alpha_detuned(tau, &p).norm_sqr() / nbar;
            (y - want).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        closed < 1e-12 && scaled < 1e-10,
        format!("closed-form dev {closed:.2e}, |α|² identity dev {scaled:.2e}"),
    )
}

fn figure1_crossover() -> Check {
    let nbar = 25.0;
    let short: Vec<f64> = (1..=200).map(|i| i as f64 * 1e-3).collect();
    let curve = figure1_curve(&short, nbar).map_err(|e| e.to_string())?;
    let cubic = curve
        .iter()
        .map(|&(tau, y)| {
            let law = -tau.powi(3) / 12.0;
            ((y - law) / law).abs()
        })
        .fold(0.0, f64::max);
    let long = figure1_curve(&[8.0], nbar).map_err(|e| e.to_string())?[0].1;
    let gap = (long - (3.0 - 8.0)).abs();
    verdict(
        cubic < 0.05 && gap < 0.05,
        format!("τ³ rel dev {cubic:.4} for τ ≤ 0.2; |logW/n̄ − (3−τ)| = {gap:.4} at τ=8"),
    )
}

fn mean_jump_time_asymptotics() -> Check {
    let p = make_params(1.0, 400.0, 0.0, 0.0).map_err(|e| e.to_string())?;
    let rec = closed_form_record(&p, SurvivalModel::Exact, 2.0, 4001).map_err(|e| e.to_string())?;
    let mean = mean_jump_time(&rec).map_err(|e| e.to_string())?;
    const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_6;
    let g = p.gamma_drive();
    let want = GAMMA_ONE_THIRD / 3.0 * (3.0 / (p.kappa() * g * g)).cbrt();
    let rel = ((mean - want) / want).abs();
    verdict(rel < 0.10, format!("t̄_j={mean:.6}, asymptote={want:.6}, rel {rel:.4}"))
}

fn cubic_eigenvalues() -> Check {
    let p = make_params(1.0, 100.0, 10.0, 1.0).map_err(|e| e.to_string())?;
    let e = characteristic_roots(&p).map_err(|e| e.to_string())?;
    // det(λ − M) evaluated straight from the 3×3 generator
    let g = p.gamma_drive();
    let b = (2.0 / std::f64::consts::PI).sqrt() * g;
    let s = C64::new(-p.kappa() / 2.0, p.chi());
    let om2 = p.omega_rabi().norm_sqr();
    let det = |l: C64| (l + b) * (l * (l - s) + g * g) + om2 * (l - s);
    let residual = e.roots.iter().map(|&l| det(l).norm()).fold(0.0, f64::max);
    let gamma = slow_rate(&p).map_err(|e| e.to_string())?;
    let rel = ((e.roots[1].re + gamma) / gamma).abs();
    verdict(
        residual < 1e-9 && e.valid && rel < 0.15,
        format!(
            "max residual {residual:.2e}, window {}, Re λ₂={:.5} vs −γ={:.5} (rel {rel:.4})",
            e.valid,
            e.roots[1].re,
            -gamma
        ),
    )
}

fn reduced_vs_full() -> Check {
    // Γ²/χ² = (n̄/4)/χ² = 0.05
    let p = make_params(1.0, 20.0, 10.0, 0.0).map_err(|e| e.to_string())?;
    let ratio = p.gamma_drive().powi(2) / p.chi().powi(2);
    let tr = FockTruncation::for_params(&p);
    let (full, _) = evolve(
        &initial_state(QubitLevel::G, &tr),
        &p,
        &EvolutionSpec::new(Regime::Coupled, 3.0, &p),
        &tr,
    )
    .map_err(|e| e.to_string())?;
    let reduced = evolve_reduced(
        &ReducedState::ground(),
        &p,
        3.0,
        &StepControl::for_kappa(1.0),
        ReducedOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let worst = reduced
        .points()
        .iter()
        .map(|pt| {
            let w_full = full.interpolate(pt.t);
            ((pt.w - w_full) / w_full).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        ratio <= 0.05 + 1e-15 && worst < 0.05,
        format!("Γ²/χ²={ratio:.3}, max relative deviation {worst:.4} on κt ≤ 3"),
    )
}

fn monte_carlo_consistency() -> Check {
    let p = make_params(1.0, 4.0, 0.0, 0.0).map_err(|e| e.to_string())?;
    let tr = FockTruncation::for_params(&p);
    let start = Instant::now();
    let (rec, _) = evolve(
        &initial_state(QubitLevel::G, &tr),
        &p,
        &EvolutionSpec::new(Regime::Resonant, 10.0, &p),
        &tr,
    )
    .map_err(|e| e.to_string())?;
    let samples = sample_jump_times(&rec, 100_000, 2024);
    let report = histogram_vs_density(&samples, &rec, 50).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mean_ref = mean_jump_time(&rec).map_err(|e| e.to_string())?;
    let n = samples.times.len() as f64;
    let mean = samples.times.iter().sum::<f64>() / n;
    let var = samples.times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let z = (mean - mean_ref).abs() / se;
    verdict(
        report.pass && z < 3.0 && elapsed < Duration::from_secs(30),
        format!(
            "KS D={:.5} (crit {:.5}), mean {mean:.5} vs {mean_ref:.5} ({z:.2} SE), {:.2}s",
            report.ks_statistic,
            report.critical_value,
            elapsed.as_secs_f64()
        ),
    )
}

fn readout_threshold() -> Check {
    let mut bad = Vec::new();
    let mut values: Vec<f64> = (1..=400).map(|i| i as f64 * 0.25).collect();
    values.extend([12.0, 12.0 * (1.0 + 1e-12), 12.0 * (1.0 - 1e-12)]);
    for kappa in [1.0, 2.5] {
        for &nbar in &values {
            let p = make_params(kappa, nbar, 0.0, 0.0).map_err(|e| e.to_string())?;
            let t = readout_time_estimate(&p).map_err(|e| e.to_string())?;
            if (t < 1.0 / kappa) != (nbar > 12.0) {
                bad.push(format!("κ={kappa}, n̄={nbar}"));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{} n̄ values × 2 κ, mismatches: {bad:?}", values.len()),
    )
}

fn error_rate_scaling() -> Check {
    let p = make_params(1.0, 27.0, 30.0, 0.0).map_err(|e| e.to_string())?;
    let t_j = readout_time_estimate(&p).map_err(|e| e.to_string())?;
    let r = readout_error(&p, t_j).map_err(|e| e.to_string())?;
    let scaling = (p.kappa() * 27f64.cbrt() / 30.0).powi(2);
    let ratio = r.epsilon / scaling;
    verdict(
        (0.5..=2.0).contains(&ratio),
        format!("t_j={t_j:.5}, ε={:.5}, scaling {scaling:.5}, ratio {ratio:.3}", r.epsilon),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact-solution oracle", exact_solution_oracle),
        ("short-time law", short_time_law),
        ("decrement identity", decrement_identity),
        ("figure 2 reproduction", figure2_reproduction),
        ("figure 1 crossover", figure1_crossover),
        ("mean jump time asymptotics", mean_jump_time_asymptotics),
        ("cubic eigenvalues", cubic_eigenvalues),
        ("reduced vs full model", reduced_vs_full),
        ("monte carlo consistency", monte_carlo_consistency),
        ("readout threshold", readout_threshold),
        ("error-rate scaling", error_rate_scaling),
    ];
    let mut failed = 0;
    let mut unexpected = 0;
    for (name, check) in criteria {
        let known = KNOWN_UNATTAINABLE.contains(&name);
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                let note = if known {
                    " [known unattainable]"
                } else {
                    unexpected += 1;
                    ""
                };
                println!("FAIL {name}: {detail}{note}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass ({} known unattainable, {} unexpected failures)",
        criteria.len() - failed,
        criteria.len(),
        failed - unexpected,
        unexpected
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
