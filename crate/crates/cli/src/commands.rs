use std::path::PathBuf;

use nextjump_core::closed_form::{
    figure1_curve, figure2_curve, mean_jump_time_shorttime, survival_dispersive_long,
    survival_dispersive_short, survival_shorttime, t3_fraction,
};
use nextjump_core::readout::{
    characteristic_roots, readout_error, readout_time_estimate, slow_rate,
};
use nextjump_core::sampler::{CHUNK_SIZE, RNG_ALGORITHM};
use nextjump_core::{
    evolve, histogram_vs_density, initial_state, mean_jump_time, propagate, sample_jump_times,
    survival_exact, EvolutionSpec, FockTruncation, QubitLevel, Regime, SystemParams, C64,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::{emit, Format, Table};
use crate::{
    Axis, CliError, Common, EigenArgs, FigureArgs, Level, McArgs, RegimeArg, SurvivalArgs,
    SweepArgs,
};

pub const SEED_ENV: &str = "NEXTJUMP_SEED";

/// Common options after merging flags, config file and defaults.
struct Resolved {
    params: SystemParams,
    format: Format,
    output: Option<PathBuf>,
}

fn resolve(common: &Common, cfg: &Config) -> Result<Resolved, CliError> {
    let kappa = cfg.pick(common.kappa, "kappa")?.unwrap_or(1.0);
    let nbar = cfg.pick(common.nbar, "nbar")?.unwrap_or(4.0);
    let chi = cfg.pick(common.chi, "chi")?.unwrap_or(0.0);
    let omega = cfg.pick(common.omega, "omega")?.unwrap_or(0.0);
    let params = SystemParams::new(kappa, nbar, chi, C64::new(omega, 0.0))?;
    Ok(Resolved {
        params,
        format: cfg.pick_enum(common.format, "format")?.unwrap_or(Format::Csv),
        output: cfg.pick(common.output.clone(), "output")?,
    })
}

fn params_json(p: &SystemParams) -> Value {
    json!({
        "kappa": p.kappa(),
        "nbar": p.nbar(),
        "chi": p.chi(),
        "omega_re": p.omega_rabi().re,
        "omega_im": p.omega_rabi().im,
        "gamma_drive": p.gamma_drive(),
    })
}

fn qubit_level(l: Level) -> QubitLevel {
    match l {
        Level::G => QubitLevel::G,
        Level::B => QubitLevel::B,
    }
}

fn regime_for(arg: RegimeArg, p: &SystemParams) -> Regime {
    match arg {
        RegimeArg::Resonant => Regime::Resonant,
        RegimeArg::Detuned => Regime::Detuned,
        RegimeArg::Coupled => Regime::Coupled,
        RegimeArg::Auto => {
            if p.omega_rabi().norm() != 0.0 {
                Regime::Coupled
            } else if p.chi() != 0.0 {
                Regime::Detuned
            } else {
                Regime::Resonant
            }
        }
    }
}

fn truncation(n_max: Option<usize>, p: &SystemParams) -> Result<FockTruncation, CliError> {
    Ok(match n_max {
        Some(n) => FockTruncation::new(n, FockTruncation::DEFAULT_TAIL_TOL)?,
        None => FockTruncation::for_params(p),
    })
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {x}")))
    }
}

fn grid(t_end: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    Ok((0..points)
        .map(|i| t_end * i as f64 / (points - 1) as f64)
        .collect())
}

pub fn survival(a: SurvivalArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg)?;
    let p = r.params;
    let level = cfg.pick_enum(a.level, "level")?.unwrap_or(Level::G);
    let regime = regime_for(cfg.pick_enum(a.regime, "regime")?.unwrap_or(RegimeArg::Auto), &p);
    let t_end = positive("t-end", cfg.pick(a.t_end, "t-end")?.unwrap_or(3.0))?;
    let points = cfg.pick(a.points, "points")?.unwrap_or(301);
    let tr = truncation(cfg.pick(a.n_max, "n-max")?, &p)?;
    let times = grid(t_end, points)?;
    regime.check(&p)?;

    // Closed forms describe the bare resonator seen by the chosen level:
    // detuned by χ for G, on resonance for B.
    let closed = if p.omega_rabi().norm() == 0.0 {
        Some(p.with_chi(if level == Level::G { p.chi() } else { 0.0 })?)
    } else {
        None
    };

    let mut state = initial_state(qubit_level(level), &tr);
    let mut rows = Vec::with_capacity(times.len());
    for &t in &times {
        if t > state.time() {
            let mut spec = EvolutionSpec::new(regime, t - state.time(), &p);
            spec.output_stride = usize::MAX;
            state = propagate(&state, &p, &spec, &tr)?
                .pop()
                .expect("propagate returns the final state");
        }
        let w_num = state.survival_probability();
        let d = p.kappa() * state.photon_weight();
        let (w_exact, w_short, w_ds, w_dl) = match &closed {
            Some(q) => (
                survival_exact(t, q),
                survival_shorttime(t, q),
                survival_dispersive_short(t, q),
                survival_dispersive_long(t, q),
            ),
            None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        };
        rows.push(vec![t, w_num, w_exact, w_short, w_ds, w_dl, d]);
    }

    let table = Table {
        kind: "survival",
        params: params_json(&p),
        meta: vec![
            ("level".into(), format!("{level:?}")),
            ("regime".into(), format!("{regime:?}")),
            ("n_max".into(), tr.n_max().to_string()),
            ("tail_tol".into(), format!("{:e}", tr.tail_tol())),
        ],
        columns: ["t", "W_numeric", "W_exact", "W_short", "W_disp_short", "W_disp_long", "D"]
            .map(String::from)
            .to_vec(),
        rows,
    };
    emit(&table.render(r.format)?, r.output.as_deref())
}

fn c64_json(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn eigen(a: EigenArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg)?;
    let e = characteristic_roots(&r.params)?;
    let report = json!({
        "schema": format!("nextjump.eigen.v{}", crate::output::SCHEMA_VERSION),
        "params": params_json(&r.params),
        "roots": e.roots.map(c64_json),
        "approx": e.approx.map(c64_json),
        "residuals": e.residuals,
        "coefficient_scale": e.coefficient_scale,
        "window": {
            "valid": e.valid,
            "fast_over_rabi": e.diagnostics.fast_over_rabi,
            "rabi_over_leak": e.diagnostics.rabi_over_leak,
        },
        "gamma": e.gamma_slow,
        "beta_b": e.beta_b,
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(&text, r.output.as_deref())
}

pub fn figure(a: FigureArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg)?;
    let tau_max = positive("tau-max", cfg.pick(a.tau_max, "tau-max")?.unwrap_or(10.0))?;
    let points = cfg.pick(a.points, "points")?.unwrap_or(1001);
    let taus = grid(tau_max, points)?;

    let table = if a.which == 1 {
        let mut nbars = cfg.pick_list(a.nbar_list, "nbar-list")?;
        if nbars.is_empty() {
            nbars = vec![1.0, 4.0, 25.0, 100.0];
        }
        let curves = nbars
            .iter()
            .map(|&n| figure1_curve(&taus, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut columns = vec!["tau".to_string()];
        columns.extend(nbars.iter().map(|n| format!("logW_over_nbar[nbar={n}]")));
        columns.push("cubic_law".into());
        columns.push("linear_asymptote".into());
        let rows = taus
            .iter()
            .enumerate()
            .map(|(i, &tau)| {
                let mut row = vec![tau];
                row.extend(curves.iter().map(|c| c[i].1));
                row.push(-tau.powi(3) / 12.0);
                row.push(3.0 - tau);
                row
            })
            .collect();
        Table {
            kind: "figure1",
            params: json!({ "kappa": 1.0 }),
            meta: vec![("nbar_list".into(), format!("{nbars:?}"))],
            columns,
            rows,
        }
    } else {
        let c = positive(
            "chi-over-kappa",
            cfg.pick(a.chi_over_kappa, "chi-over-kappa")?.unwrap_or(5.0),
        )?;
        let curve = figure2_curve(&taus, c)?;
        Table {
            kind: "figure2",
            params: json!({ "kappa": 1.0, "chi_over_kappa": c }),
            meta: vec![(
                "identity_max_dev".into(),
                format!("{:e}", curve.identity_max_dev),
            )],
            columns: vec!["tau".into(), "Y".into()],
            rows: curve.points.iter().map(|&(t, y)| vec![t, y]).collect(),
        }
    };
    emit(&table.render(r.format)?, r.output.as_deref())
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("{SEED_ENV}=`{s}`: {e}"))),
        Err(_) => Ok(None),
    }
}

pub fn mc(a: McArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg)?;
    let p = r.params;
    let level = cfg.pick_enum(a.level, "level")?.unwrap_or(Level::G);
    let regime = regime_for(cfg.pick_enum(a.regime, "regime")?.unwrap_or(RegimeArg::Auto), &p);
    let t_end = positive("t-end", cfg.pick(a.t_end, "t-end")?.unwrap_or(10.0))?;
    let tr = truncation(cfg.pick(a.n_max, "n-max")?, &p)?;
    let n_samples = cfg.pick(a.n_samples, "n-samples")?.unwrap_or(100_000);
    if n_samples == 0 {
        return Err(CliError::Usage("--n-samples must be at least 1".into()));
    }
    let seed = match cfg.pick(a.seed, "seed")? {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let bins = cfg.pick(a.bins, "bins")?.unwrap_or(50);
    if bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let summary_path = cfg.pick(a.summary, "summary")?;

    let (record, _) = evolve(
        &initial_state(qubit_level(level), &tr),
        &p,
        &EvolutionSpec::new(regime, t_end, &p),
        &tr,
    )?;
    let samples = sample_jump_times(&record, n_samples, seed);
    let report = histogram_vs_density(&samples, &record, bins)?;

    let n = samples.times.len() as f64;
    let mean = samples.times.iter().sum::<f64>() / n;
    let var = samples.times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let (mean_ref, mean_ref_error) = match mean_jump_time(&record) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let hist = Table {
        kind: "histogram",
        params: params_json(&p),
        meta: vec![
            ("seed".into(), seed.to_string()),
            ("rng".into(), RNG_ALGORITHM.into()),
            ("n_samples".into(), n_samples.to_string()),
            ("censored".into(), samples.censored.to_string()),
        ],
        columns: ["bin_lo", "bin_hi", "observed", "expected"]
            .map(String::from)
            .to_vec(),
        rows: report
            .bins
            .iter()
            .map(|b| vec![b.lo, b.hi, b.observed, b.expected])
            .collect(),
    };
    if let Some(out) = r.output.as_deref() {
        emit(&hist.render(r.format)?, Some(out))?;
    }

    let summary = json!({
        "schema": format!("nextjump.mc.v{}", crate::output::SCHEMA_VERSION),
        "params": params_json(&p),
        "level": format!("{level:?}"),
        "regime": format!("{regime:?}"),
        "t_end": record.t_end(),
        "w_end": record.w_end(),
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "chunk_size": CHUNK_SIZE,
        "n_samples": n_samples,
        "uncensored": samples.times.len(),
        "censored": samples.censored,
        "mean": mean,
        "std_error": (var / n).sqrt(),
        "mean_jump_time": mean_ref,
        "mean_jump_time_error": mean_ref_error,
        "ks_statistic": report.ks_statistic,
        "critical_value": report.critical_value,
        "p_value": report.p_value,
        "alpha": report.alpha,
        "pass": report.pass,
        "histogram": hist.to_json(),
    });
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    emit(&text, summary_path.as_deref())
}

fn with_axis(base: &SystemParams, axis: Axis, v: f64) -> Result<SystemParams, CliError> {
    Ok(match axis {
        Axis::Nbar => base.with_nbar(v)?,
        Axis::Chi => base.with_chi(v)?,
        Axis::Omega => base.with_omega(C64::new(v, 0.0))?,
        Axis::Kappa => base.with_kappa(v)?,
    })
}

/// `t_j`, mean-time estimate, ε, γ, t³ fraction and window validity; NaN
/// where a quantity is undefined at that point.
fn sweep_row(p: &SystemParams, v: f64) -> Vec<f64> {
    let t_j = readout_time_estimate(p).unwrap_or(f64::NAN);
    let epsilon = if t_j.is_finite() {
        readout_error(p, t_j).map(|r| r.epsilon).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let valid = characteristic_roots(p)
        .map(|e| if e.valid { 1.0 } else { 0.0 })
        .unwrap_or(f64::NAN);
    vec![
        v,
        t_j,
        mean_jump_time_shorttime(p).unwrap_or(f64::NAN),
        epsilon,
        slow_rate(p).unwrap_or(f64::NAN),
        t3_fraction(p).unwrap_or(f64::NAN),
        valid,
    ]
}

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let cfg = Config::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg)?;
    let axis = cfg
        .pick_enum(a.axis, "axis")?
        .ok_or_else(|| CliError::Usage("--axis is required (nbar, chi, omega, kappa)".into()))?;
    let values = cfg.pick_list(a.values, "values")?;
    if values.is_empty() {
        return Err(CliError::Usage("--values must list at least one value".into()));
    }
    let params = values
        .iter()
        .map(|&v| with_axis(&r.params, axis, v))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<f64>> = params
        .par_iter()
        .zip(values.par_iter())
        .map(|(p, &v)| sweep_row(p, v))
        .collect();
    let axis_name = format!("{axis:?}").to_lowercase();
    let table = Table {
        kind: "sweep",
        params: params_json(&r.params),
        meta: vec![("axis".into(), axis_name.clone())],
        columns: [
            axis_name.as_str(),
            "t_j_estimate",
            "t_j_mean_shorttime",
            "epsilon",
            "gamma",
            "t3_fraction",
            "window_valid",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    };
    emit(&table.render(r.format)?, r.output.as_deref())
}
