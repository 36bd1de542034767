//! Reduced qubit–resonator model for dispersive readout.
//!
//! With the drive on the bright (B) resonance and large dispersion, only
//! `|B,0⟩`, `|G,0⟩` and `|G,1⟩` are tracked. The bright-manifold excitations
//! are slaved to `|B,0⟩` through the saddle-point closure
//! `C_{B,1} = √(2/π) C_{B,0}`, which turns the drive term into a decay of
//! `c_B0` at rate `β_B/2 = √(2/π)Γ`:
//!
//! ```text
//! dc_B0/dt = iΩ c_G0 − (β_B/2) c_B0
//! dc_G0/dt = iΩ* c_B0 − Γ c_G1
//! dc_G1/dt = (iχ − κ/2) c_G1 + Γ c_G0
//! ```
//!
//! The characteristic polynomial of this system is the cubic solved by
//! [`characteristic_roots`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::closed_form::{coherent, log_survival};
use crate::cubic::MonicCubic;
use crate::error::{invalid, Error, Result};
use crate::ode::{integrate, StepControl};
use crate::params::{FockTruncation, Source, SurvivalPoint, SurvivalRecord, SystemParams};
use crate::quadrature::integrate_vec;

/// Saddle-point ratio `C_{B,1}/C_{B,0} = √(2/π)`.
pub fn closure_constant() -> f64 {
    (2.0 / PI).sqrt()
}

/// Effective bright-manifold decay `β_B = 2√(2/π)Γ`.
pub fn beta_b(params: &SystemParams) -> f64 {
    2.0 * closure_constant() * params.gamma_drive()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub c_b0: C64,
    pub c_g0: C64,
    pub c_g1: C64,
    pub time: f64,
}

impl ReducedState {
    pub fn bright() -> Self {
        Self::from_array(0.0, [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])
    }

    pub fn ground() -> Self {
        Self::from_array(0.0, [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    fn from_array(time: f64, a: [C64; 3]) -> Self {
        Self {
            c_b0: a[0],
            c_g0: a[1],
            c_g1: a[2],
            time,
        }
    }

    fn to_array(self) -> [C64; 3] {
        [self.c_b0, self.c_g0, self.c_g1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_b0.norm_sqr() + self.c_g0.norm_sqr() + self.c_g1.norm_sqr()
    }
}

/// How `|G,0⟩` couples to the drive in the reduced equations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriveCoupling {
    /// `−Γ c_G1`, from the G-manifold ladder. Reproduces the cubic exactly.
    #[default]
    GroundLadder,
    /// `−Γ C_{B,1} = −Γ√(2/π) c_B0`, a cross-manifold term.
    CrossManifold,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDerivative {
    pub d_b0: C64,
    pub d_g0: C64,
    pub d_g1: C64,
}

struct ReducedRates {
    half_beta_b: f64,
    gamma: f64,
    omega: C64,
    g1_rate: C64,
    coupling: DriveCoupling,
}

impl ReducedRates {
    fn new(params: &SystemParams, coupling: DriveCoupling) -> Self {
        Self {
            half_beta_b: beta_b(params) / 2.0,
            gamma: params.gamma_drive(),
            omega: params.omega_rabi(),
            g1_rate: C64::new(-params.kappa() / 2.0, params.chi()),
            coupling,
        }
    }

    fn apply(&self, y: &[C64], dy: &mut [C64]) {
        let i = C64::new(0.0, 1.0);
        let (b0, g0, g1) = (y[0], y[1], y[2]);
        dy[0] = i * self.omega * g0 - b0 * self.half_beta_b;
        let feed = match self.coupling {
            DriveCoupling::GroundLadder => g1 * self.gamma,
            DriveCoupling::CrossManifold => b0 * (self.gamma * closure_constant()),
        };
        dy[1] = i * self.omega.conj() * b0 - feed;
        dy[2] = self.g1_rate * g1 + g0 * self.gamma;
    }
}

pub fn reduced_derivative(
    state: &ReducedState,
    params: &SystemParams,
    coupling: DriveCoupling,
) -> ReducedDerivative {
    let mut dy = [C64::new(0.0, 0.0); 3];
    ReducedRates::new(params, coupling).apply(&state.to_array(), &mut dy);
    ReducedDerivative {
        d_b0: dy[0],
        d_g0: dy[1],
        d_g1: dy[2],
    }
}

const KERNEL_ABS_TOL: f64 = 1e-12;
const KERNEL_REL_TOL: f64 = 1e-10;

/// Bright-manifold state built up by a feed into `|B,0⟩`:
///
/// ```text
/// C_{B,n}(t) = ∫₀ᵗ ds h(s) e^{β(t−s)} α(t−s)ⁿ/√n!
/// ```
///
/// with the on-resonance `α`, `β` (the drive sits on the B resonance).
/// `history(s)` is the feed rate `dC_{B,0}/ds` at time `s`.
pub fn displaced_b_state(
    history: &dyn Fn(f64) -> C64,
    t: f64,
    params: &SystemParams,
    truncation: &FockTruncation,
) -> Result<Vec<C64>> {
    if t.is_nan() || t < 0.0 {
        return Err(invalid("t", "must be non-negative"));
    }
    let levels = truncation.levels();
    let kappa = params.kappa();
    let gamma = params.gamma_drive();
    integrate_vec(
        |s, out| {
            let h = history(s);
            let ct = coherent(t - s, kappa, gamma, 0.0);
            let mut c = h * ct.beta.exp();
            for (n, o) in out.iter_mut().enumerate() {
                if n > 0 {
                    c = c * ct.alpha / (n as f64).sqrt();
                }
                *o = c;
            }
        },
        0.0,
        t,
        levels,
        KERNEL_ABS_TOL,
        KERNEL_REL_TOL,
    )
}

/// `C_{B,1}(t) = ∫ ds (dC_{B,0}/ds) α(t−s) e^{β(t−s)}`.
pub fn memory_kernel_cb1(
    history: &dyn Fn(f64) -> C64,
    t: f64,
    params: &SystemParams,
) -> Result<C64> {
    let tr = FockTruncation::new(1, FockTruncation::DEFAULT_TAIL_TOL)?;
    displaced_b_state(history, t, params, &tr).map(|v| v[1])
}

/// Scale-separation diagnostics for the validity window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowDiagnostics {
    /// `β_B²/(4|Ω|²)`; must exceed 1.
    pub fast_over_rabi: f64,
    /// `4χ²|Ω|²/(κβ_BΓ²)`; must exceed 1.
    pub rabi_over_leak: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueSet {
    /// Exact roots, ordered to pair with `approx`.
    pub roots: [C64; 3],
    /// `[−β_B/2, −γ, iχ − κ/2]`.
    pub approx: [C64; 3],
    /// `|p(λ)|` for each root.
    pub residuals: [f64; 3],
    /// Largest coefficient magnitude of the monic cubic.
    pub coefficient_scale: f64,
    pub beta_b: f64,
    /// `γ = 2|Ω|²/β_B`; `None` when `β_B = 0`.
    pub gamma_slow: Option<f64>,
    pub valid: bool,
    pub diagnostics: WindowDiagnostics,
}

/// Monic form of `λ(λ+β_B/2)(λ−s) + |Ω|²(λ−s) + Γ²(λ+β_B/2)`,
/// `s = iχ − κ/2`.
pub fn characteristic_cubic(params: &SystemParams) -> MonicCubic {
    let b = C64::new(beta_b(params) / 2.0, 0.0);
    let s = C64::new(-params.kappa() / 2.0, params.chi());
    let om2 = params.omega_rabi().norm_sqr();
    let g2 = params.gamma_drive().powi(2);
    MonicCubic {
        c2: b - s,
        c1: -b * s + om2 + g2,
        c0: -s * om2 + b * g2,
    }
}

fn window(params: &SystemParams) -> (bool, WindowDiagnostics) {
    let bb = beta_b(params);
    let om2 = params.omega_rabi().norm_sqr();
    let leak = params.kappa() * bb * params.gamma_drive().powi(2);
    let chi2 = params.chi().powi(2);
    let diagnostics = WindowDiagnostics {
        fast_over_rabi: bb * bb / (4.0 * om2),
        rabi_over_leak: if leak == 0.0 {
            f64::INFINITY
        } else {
            4.0 * chi2 * om2 / leak
        },
    };
    let lower = if chi2 == 0.0 {
        if leak == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        leak / (4.0 * chi2)
    };
    (bb * bb / 4.0 > om2 && om2 > lower, diagnostics)
}

/// Solves the characteristic cubic and pairs each root with its large-
/// dispersion approximation.
pub fn characteristic_roots(params: &SystemParams) -> Result<EigenvalueSet> {
    let cubic = characteristic_cubic(params);
    let found = cubic.roots()?;
    let bb = beta_b(params);
    let gamma_slow = (bb > 0.0).then(|| 2.0 * params.omega_rabi().norm_sqr() / bb);
    let approx = [
        C64::new(-bb / 2.0, 0.0),
        C64::new(-gamma_slow.unwrap_or(0.0), 0.0),
        C64::new(-params.kappa() / 2.0, params.chi()),
    ];

    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let cost = |p: &[usize; 3]| -> f64 { (0..3).map(|k| (found[p[k]] - approx[k]).norm()).sum() };
    let best = PERMS
        .iter()
        .min_by(|a, b| cost(a).total_cmp(&cost(b)))
        .expect("non-empty");
    let roots = [found[best[0]], found[best[1]], found[best[2]]];
    let residuals = roots.map(|z| cubic.eval(z).norm());
    let (valid, diagnostics) = window(params);
    Ok(EigenvalueSet {
        roots,
        approx,
        residuals,
        coefficient_scale: cubic.scale(),
        beta_b: bb,
        gamma_slow,
        valid,
        diagnostics,
    })
}

/// Slow jump rate `γ = 2|Ω|²/β_B`.
pub fn slow_rate(params: &SystemParams) -> Result<f64> {
    let bb = beta_b(params);
    if bb == 0.0 {
        return Err(Error::DivisionByZero("slow rate needs Γ > 0"));
    }
    Ok(2.0 * params.omega_rabi().norm_sqr() / bb)
}

/// How the bright-manifold contribution to `W` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrightNorm {
    /// `|c_B0|² + |c_G0|² + |c_G1|²`.
    #[default]
    Plain,
    /// `(1 + 2/π)|c_B0|²` for the bright manifold.
    Closure,
    /// `⟨B|B⟩` from the displaced-state integral fed by `iΩ c_G0`.
    Exact,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReducedOptions {
    pub coupling: DriveCoupling,
    pub bright_norm: BrightNorm,
}

struct Sample {
    t: f64,
    y: [C64; 3],
    dy: [C64; 3],
}

/// Integrates the reduced model and tabulates `W(t)` on every accepted step.
pub fn evolve_reduced(
    initial: &ReducedState,
    params: &SystemParams,
    t_end: f64,
    step_ctrl: &StepControl,
    options: ReducedOptions,
) -> Result<SurvivalRecord> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", "must be positive"));
    }
    let rates = ReducedRates::new(params, options.coupling);
    let mut samples = Vec::new();
    let mut push = |t: f64, y: &[C64]| {
        let mut dy = [C64::new(0.0, 0.0); 3];
        rates.apply(y, &mut dy);
        samples.push(Sample {
            t,
            y: [y[0], y[1], y[2]],
            dy,
        });
    };
    let y0 = initial.to_array();
    push(0.0, &y0);
    integrate(
        |_, y, dy| rates.apply(y, dy),
        0.0,
        y0.to_vec(),
        t_end,
        step_ctrl,
        |_, t, y| {
            push(t, y);
            Ok(())
        },
    )?;

    let weighted = |s: &Sample, w_b: f64| -> SurvivalPoint {
        let w = w_b * s.y[0].norm_sqr() + s.y[1].norm_sqr() + s.y[2].norm_sqr();
        let dw_dt = w_b * 2.0 * (s.y[0].conj() * s.dy[0]).re
            + 2.0 * (s.y[1].conj() * s.dy[1]).re
            + 2.0 * (s.y[2].conj() * s.dy[2]).re;
        SurvivalPoint { t: s.t, w, dw_dt }
    };
    let points: Vec<SurvivalPoint> = match options.bright_norm {
        BrightNorm::Plain => samples.iter().map(|s| weighted(s, 1.0)).collect(),
        BrightNorm::Closure => samples
            .iter()
            .map(|s| weighted(s, 1.0 + 2.0 / PI))
            .collect(),
        BrightNorm::Exact => exact_bright_points(&samples, initial.c_b0, params)?,
    };
    SurvivalRecord::new(points, Source::ReducedModel, *params)
}

fn hermite(a: &Sample, b: &Sample, idx: usize, t: f64) -> C64 {
    let h = b.t - a.t;
    let x = (t - a.t) / h;
    let x2 = x * x;
    let x3 = x2 * x;
    a.y[idx] * (2.0 * x3 - 3.0 * x2 + 1.0)
        + a.dy[idx] * (h * (x3 - 2.0 * x2 + x))
        + b.y[idx] * (-2.0 * x3 + 3.0 * x2)
        + b.dy[idx] * (h * (x3 - x2))
}

fn exact_bright_points(
    samples: &[Sample],
    c_b0_initial: C64,
    params: &SystemParams,
) -> Result<Vec<SurvivalPoint>> {
    let kappa = params.kappa();
    let gamma = params.gamma_drive();
    let i_omega = C64::new(0.0, 1.0) * params.omega_rabi();
    let truncation = FockTruncation::for_params(params);
    let c_g0_at = |t: f64| -> C64 {
        let hi = samples.partition_point(|s| s.t <= t).clamp(1, samples.len() - 1);
        hermite(&samples[hi - 1], &samples[hi], 1, t)
    };
    let feed = move |s: f64| i_omega * c_g0_at(s);

    samples
        .iter()
        .map(|s| {
            let mut bright = displaced_b_state(&feed, s.t, params, &truncation)?;
            // free evolution of the initial |B,0⟩ amplitude
            let ct = coherent(s.t, kappa, gamma, 0.0);
            let mut c = c_b0_initial * ct.beta.exp();
            for (n, b) in bright.iter_mut().enumerate() {
                if n > 0 {
                    c = c * ct.alpha / (n as f64).sqrt();
                }
                *b += c;
            }
            let w_b: f64 = bright.iter().map(|b| b.norm_sqr()).sum();
            let loss: f64 = bright
                .iter()
                .enumerate()
                .map(|(n, b)| n as f64 * b.norm_sqr())
                .sum();
            let dw_b = -kappa * loss + 2.0 * (bright[0].conj() * i_omega * s.y[1]).re;
            let w = w_b + s.y[1].norm_sqr() + s.y[2].norm_sqr();
            let dw_dt = dw_b
                + 2.0 * (s.y[1].conj() * s.dy[1]).re
                + 2.0 * (s.y[2].conj() * s.dy[2]).re;
            Ok(SurvivalPoint { t: s.t, w, dw_dt })
        })
        .collect()
}

/// `−dW/dt ≈ 2γW − 2γ exp[−n̄(κt)³/12]`, stated for `n̄^{1/6} > Γt > 1`.
pub fn jump_rate_asymptotic(t: f64, params: &SystemParams, w: f64) -> Result<f64> {
    let gamma = slow_rate(params)?;
    let cubic = (-params.nbar() * (params.kappa() * t).powi(3) / 12.0).exp();
    Ok(2.0 * gamma * w - 2.0 * gamma * cubic)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReadoutError {
    /// `[1 − W(χ, t_j)] / [1 − W(0, t_j)]`.
    pub epsilon: f64,
    /// `2κ t_j Γ²/χ²`.
    pub linear_estimate: f64,
    /// `[κ n̄^{1/3}/χ]²`.
    pub scaling_estimate: f64,
}

/// Probability of a jump by `t_j` with the qubit dark, relative to bright.
pub fn readout_error(params: &SystemParams, t_j: f64) -> Result<ReadoutError> {
    if !(t_j > 0.0 && t_j.is_finite()) {
        return Err(invalid("t_j", "must be positive"));
    }
    let kappa = params.kappa();
    let gamma = params.gamma_drive();
    let chi = params.chi();
    let dark = -log_survival(t_j, kappa, gamma, chi).exp_m1();
    let bright = -log_survival(t_j, kappa, gamma, 0.0).exp_m1();
    if bright == 0.0 {
        return Err(Error::DivisionByZero("bright-state jump probability is zero"));
    }
    let (linear_estimate, scaling_estimate) = if chi == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (
            2.0 * kappa * t_j * gamma * gamma / (chi * chi),
            (kappa * params.nbar().cbrt() / chi).powi(2),
        )
    };
    Ok(ReadoutError {
        epsilon: dark / bright,
        linear_estimate,
        scaling_estimate,
    })
}

/// Expected next-jump time for a bright qubit, `(12/n̄)^{1/3}/κ`. Shorter
/// than `1/κ` exactly when `n̄ > 12`.
pub fn readout_time_estimate(params: &SystemParams) -> Result<f64> {
    let nbar = params.nbar();
    if nbar <= 0.0 {
        return Err(invalid("nbar", "readout time needs nbar > 0"));
    }
    Ok((12.0 / nbar).cbrt() / params.kappa())
}
