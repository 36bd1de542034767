//! Analytic no-jump solutions, asymptotic survival laws, mean jump times and
//! the two figure curves.
//!
//! For a resonator driven `χ` below resonance the no-jump state stays
//! coherent, `C_n = e^β α^n/√n!`, with
//!
//! ```text
//! α(t) = (Γ/s)(e^{st} − 1),   β(t) = −Γ² t² φ₂(st),   s = iχ − κ/2
//! ```
//!
//! and `log W = β + β* + |α|² = −κ ∫₀ᵗ |α|²`. The integral is evaluated as
//! `−κ|Γ/s|² t³ [κ² φ₃(−κt) − 2 Re(s² φ₃(st))]`, which keeps full relative
//! precision as `t → 0` where the direct sum cancels at order `t²`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::params::{Source, SurvivalPoint, SurvivalRecord, SystemParams};
use crate::special::{expm1, one_minus_sinc, phi};

/// Coherent amplitude and log-prefactor of the no-jump state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherentTrajectory {
    pub alpha: C64,
    pub beta: C64,
}

impl CoherentTrajectory {
    /// `exp(β + β* + |α|²)`, evaluated literally.
    pub fn survival(&self) -> f64 {
        (2.0 * self.beta.re + self.alpha.norm_sqr()).exp()
    }
}

fn rate(kappa: f64, chi: f64) -> C64 {
    C64::new(-kappa / 2.0, chi)
}

pub(crate) fn coherent(t: f64, kappa: f64, gamma: f64, chi: f64) -> CoherentTrajectory {
    let s = rate(kappa, chi);
    let st = s * t;
    CoherentTrajectory {
        alpha: expm1(st) * (gamma / s),
        beta: -phi(2, st) * (gamma * gamma * t * t),
    }
}

pub(crate) fn log_survival(t: f64, kappa: f64, gamma: f64, chi: f64) -> f64 {
    if gamma == 0.0 || t <= 0.0 {
        return 0.0;
    }
    let s = rate(kappa, chi);
    let amp2 = gamma * gamma / s.norm_sqr();
    let bracket = kappa * kappa * phi(3, C64::new(-kappa * t, 0.0)).re
        - 2.0 * (s * s * phi(3, s * t)).re;
    -kappa * amp2 * t.powi(3) * bracket
}

/// `α(t) = √n̄ (1 − e^{−κt/2})`, the on-resonance amplitude (ignores `χ`).
pub fn alpha_resonant(t: f64, params: &SystemParams) -> C64 {
    coherent(t, params.kappa(), params.gamma_drive(), 0.0).alpha
}

/// `α(t) = iΓ/(iκ/2 + χ) · (1 − e^{(iχ − κ/2)t})`.
pub fn alpha_detuned(t: f64, params: &SystemParams) -> C64 {
    coherent(t, params.kappa(), params.gamma_drive(), params.chi()).alpha
}

/// `β(t)` with `dβ/dt = −Γα`, `β(0) = 0`.
pub fn beta_of(t: f64, params: &SystemParams) -> C64 {
    coherent(t, params.kappa(), params.gamma_drive(), params.chi()).beta
}

pub fn coherent_trajectory(t: f64, params: &SystemParams) -> CoherentTrajectory {
    coherent(t, params.kappa(), params.gamma_drive(), params.chi())
}

pub fn log_survival_exact(t: f64, params: &SystemParams) -> f64 {
    log_survival(t, params.kappa(), params.gamma_drive(), params.chi())
}

/// Exact no-jump survival `W(t) = exp(β + β* + |α|²)`.
pub fn survival_exact(t: f64, params: &SystemParams) -> f64 {
    log_survival_exact(t, params).exp()
}

/// `dW/dt = −κ|α|² W`.
pub fn survival_exact_derivative(t: f64, params: &SystemParams) -> f64 {
    -params.kappa() * alpha_detuned(t, params).norm_sqr() * survival_exact(t, params)
}

/// Short-time law `exp(−n̄(κt)³/12)`. Valid for `κt ≪ 1`.
pub fn survival_shorttime(t: f64, params: &SystemParams) -> f64 {
    (-params.nbar() * (params.kappa() * t).powi(3) / 12.0).exp()
}

/// Large-detuning long-time law `exp(−Γ²/χ² − Γ²κt/χ²)`. Valid for
/// `κ/χ ≪ 1`, `κt ≫ 1`.
pub fn survival_dispersive_long(t: f64, params: &SystemParams) -> f64 {
    let g2 = params.gamma_drive().powi(2);
    if g2 == 0.0 {
        return 1.0;
    }
    let chi = params.chi();
    if chi == 0.0 {
        return 0.0;
    }
    (-(g2 / (chi * chi)) * (1.0 + params.kappa() * t)).exp()
}

/// Large-detuning short-time law `exp[−(κ³n̄/2χ²)(t − sin(χt)/χ)]`. Reduces
/// to the `t³` law at `χ = 0`.
pub fn survival_dispersive_short(t: f64, params: &SystemParams) -> f64 {
    let k3n = params.kappa().powi(3) * params.nbar();
    let chi = params.chi();
    let x = chi * t;
    if x.abs() < 1e-300 {
        return (-k3n * t.powi(3) / 12.0).exp();
    }
    // t − sin(χt)/χ = t (1 − sinc χt)
    (-k3n / (2.0 * chi * chi) * t * one_minus_sinc(x)).exp()
}

/// Which analytic survival law to tabulate into a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurvivalModel {
    Exact,
    ShortTime,
    DispersiveShort,
}

/// Tabulates an analytic survival law on `n_points` evenly spaced times in
/// `[0, t_end]`.
pub fn closed_form_record(
    params: &SystemParams,
    model: SurvivalModel,
    t_end: f64,
    n_points: usize,
) -> Result<SurvivalRecord> {
    if t_end.is_nan() || t_end <= 0.0 || n_points < 2 {
        return Err(invalid("grid", "need t_end > 0 and at least two points"));
    }
    let kappa = params.kappa();
    let nbar = params.nbar();
    let chi = params.chi();
    let points = (0..n_points)
        .map(|i| {
            let t = t_end * i as f64 / (n_points - 1) as f64;
            let (w, dw_dt) = match model {
                SurvivalModel::Exact => (
                    survival_exact(t, params),
                    survival_exact_derivative(t, params),
                ),
                SurvivalModel::ShortTime => {
                    let w = survival_shorttime(t, params);
                    (w, -nbar * kappa.powi(3) * t * t / 4.0 * w)
                }
                SurvivalModel::DispersiveShort => {
                    let w = survival_dispersive_short(t, params);
                    let slope = if chi == 0.0 {
                        nbar * kappa.powi(3) * t * t / 4.0
                    } else {
                        kappa.powi(3) * nbar / (2.0 * chi * chi) * (1.0 - (chi * t).cos())
                    };
                    (w, -slope * w)
                }
            };
            SurvivalPoint { t, w, dw_dt }
        })
        .collect();
    let source = match model {
        SurvivalModel::Exact => Source::ClosedForm,
        _ => Source::AsymptoticShort,
    };
    SurvivalRecord::new(points, source, *params)
}

/// Survival cutoff below which a record needs no tail model.
pub const DEFAULT_TAIL_CUTOFF: f64 = 1e-6;

/// Mean next-jump time `∫₀^∞ W dt` (equal to `−∫ t dW` when `W(∞) = 0`).
///
/// The grid part uses the cubic Hermite rule on `(W, dW/dt)`; beyond the last
/// point an exponential tail `W_end/r` is added when the local decay rate
/// `r = −W'/W` has settled.
pub fn mean_jump_time(record: &SurvivalRecord) -> Result<f64> {
    mean_jump_time_with_cutoff(record, DEFAULT_TAIL_CUTOFF)
}

pub fn mean_jump_time_with_cutoff(record: &SurvivalRecord, cutoff: f64) -> Result<f64> {
    let pts = record.points();
    let body: f64 = pts
        .windows(2)
        .map(|w| {
            let h = w[1].t - w[0].t;
            h / 2.0 * (w[0].w + w[1].w) + h * h / 12.0 * (w[0].dw_dt - w[1].dw_dt)
        })
        .sum();

    let last = pts[pts.len() - 1];
    let tail_rate = |p: &SurvivalPoint| {
        if p.w > 0.0 {
            -p.dw_dt / p.w
        } else {
            0.0
        }
    };
    let r_end = tail_rate(&last);
    let settled = pts.len() >= 2 && {
        let r_prev = tail_rate(&pts[pts.len() - 2]);
        r_end > 0.0 && ((r_end - r_prev) / r_end).abs() < 0.05
    };
    if settled {
        Ok(body + last.w / r_end)
    } else if last.w <= cutoff {
        Ok(body)
    } else {
        Err(Error::TailTooHeavy {
            w_end: last.w,
            cutoff,
        })
    }
}

/// `a₀ = Γfunc(1/3)/3 = Γfunc(4/3) ≈ 0.892980`.
pub fn short_time_prefactor() -> f64 {
    statrs::function::gamma::gamma(1.0 / 3.0) / 3.0
}

/// Short-time estimate `a₀ (3/(κΓ²))^{1/3}` of the mean jump time.
pub fn mean_jump_time_shorttime(params: &SystemParams) -> Result<f64> {
    let g2 = params.gamma_drive().powi(2);
    if g2 == 0.0 {
        return Err(Error::DivisionByZero("mean jump time needs Γ > 0"));
    }
    Ok(short_time_prefactor() * (3.0 / (params.kappa() * g2)).cbrt())
}

/// Fraction `κ³n̄/(12χ³)` of jumps falling in the `t³` window.
pub fn t3_fraction(params: &SystemParams) -> Result<f64> {
    let chi = params.chi();
    if chi == 0.0 {
        return Err(Error::DivisionByZero("t3 fraction needs chi > 0"));
    }
    Ok(params.kappa().powi(3) * params.nbar() / (12.0 * chi.powi(3)))
}

/// `log W / n̄ = −τ + 2α(τ)/√n̄ + α²(τ)/n̄` at `κ = 1`.
pub fn figure1_curve(taus: &[f64], nbar: f64) -> Result<Vec<(f64, f64)>> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(invalid("nbar", "figure 1 needs nbar > 0"));
    }
    let gamma = nbar.sqrt() / 2.0;
    Ok(taus
        .iter()
        .map(|&tau| (tau, log_survival(tau, 1.0, gamma, 0.0) / nbar))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure2Curve {
    pub chi_over_kappa: f64,
    pub points: Vec<(f64, f64)>,
    /// Largest `|Y − [1+(2χ/κ)²]|α|²/n̄|` over the identity sample points.
    pub identity_max_dev: f64,
}

/// Number of grid points checked against the `|α|²` form of `Y`.
pub const FIGURE2_IDENTITY_SAMPLES: usize = 20;

/// `Y(τ) = (1 − e^{−τ/2})² + 4 e^{−τ/2} sin²(χτ/2κ)`.
pub fn figure2_value(tau: f64, chi_over_kappa: f64) -> f64 {
    let e = (-tau / 2.0).exp();
    let first = -(-tau / 2.0).exp_m1();
    first * first + 4.0 * e * (chi_over_kappa * tau / 2.0).sin().powi(2)
}

pub fn figure2_curve(taus: &[f64], chi_over_kappa: f64) -> Result<Figure2Curve> {
    if !(chi_over_kappa > 0.0 && chi_over_kappa.is_finite()) {
        return Err(invalid("chi_over_kappa", "figure 2 needs chi/kappa > 0"));
    }
    let points: Vec<(f64, f64)> = taus
        .iter()
        .map(|&tau| (tau, figure2_value(tau, chi_over_kappa)))
        .collect();

    let scale = 1.0 + (2.0 * chi_over_kappa).powi(2);
    let gamma = 0.5; // n̄ = 1, κ = 1
    let stride = (points.len() / FIGURE2_IDENTITY_SAMPLES).max(1);
    let identity_max_dev = points
        .iter()
        .step_by(stride)
        .take(FIGURE2_IDENTITY_SAMPLES)
        .map(|&(tau, y)| {
            let a2 = coherent(tau, 1.0, gamma, chi_over_kappa).alpha.norm_sqr();
            (y - scale * a2).abs()
        })
        .fold(0.0, f64::max);
    Ok(Figure2Curve {
        chi_over_kappa,
        points,
        identity_max_dev,
    })
}
