//! Truncated Fock-space integration of the no-jump amplitude equations.
//!
//! The generator acts on `[C_{G,0..=N}, C_{B,0..=N}]` as
//!
//! ```text
//! dC_{q,n}/dt = (i n δ_q − κn/2) C_{q,n} + Γ (√n C_{q,n−1} − √(n+1) C_{q,n+1}) + Rabi
//! ```
//!
//! with `δ_G = χ`, `δ_B = 0` (the drive sits on the bright resonance) and the
//! Rabi terms `iΩ C_{G,n}` into B and `iΩ* C_{B,n}` into G. Only the damping
//! term changes the norm, so `dW/dt = −κ Σ n |C_{q,n}|²` exactly.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ode::{integrate, StepControl};
use crate::params::{
    photon_weight, tail_mass, FockTruncation, NoJumpState, Source, SurvivalPoint, SurvivalRecord,
    SystemParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Bare resonator driven on resonance (`χ = 0`, `Ω = 0`).
    Resonant,
    /// Resonator driven `χ` below its resonance (`Ω = 0`).
    Detuned,
    /// Qubit and resonator together.
    Coupled,
}

impl Regime {
    pub fn check(self, params: &SystemParams) -> Result<()> {
        let omega_zero = params.omega_rabi().norm() == 0.0;
        match self {
            Regime::Resonant if params.chi() != 0.0 || !omega_zero => Err(Error::RegimeMismatch {
                regime: "Resonant",
                requirement: "chi == 0 and omega_rabi == 0",
            }),
            Regime::Detuned if !omega_zero => Err(Error::RegimeMismatch {
                regime: "Detuned",
                requirement: "omega_rabi == 0",
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec {
    pub regime: Regime,
    pub t_end: f64,
    pub step_ctrl: StepControl,
    /// Accepted steps between recorded grid points.
    pub output_stride: usize,
}

impl EvolutionSpec {
    /// Default tolerances, recording every accepted step.
    pub fn new(regime: Regime, t_end: f64, params: &SystemParams) -> Self {
        Self {
            regime,
            t_end,
            step_ctrl: StepControl::for_kappa(params.kappa()),
            output_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.output_stride == 0 {
            return Err(invalid("output_stride", "must be at least 1"));
        }
        self.step_ctrl.validate()
    }
}

/// `dC/dt` split by qubit level.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivative {
    pub d_g: Vec<C64>,
    pub d_b: Vec<C64>,
}

/// Precomputed generator for a fixed truncation and parameter set.
pub(crate) struct Generator {
    levels: usize,
    gamma: f64,
    half_kappa: f64,
    chi: f64,
    omega: C64,
    sqrt_n: Vec<f64>,
}

impl Generator {
    pub(crate) fn new(params: &SystemParams, levels: usize) -> Self {
        Self {
            levels,
            gamma: params.gamma_drive(),
            half_kappa: params.kappa() / 2.0,
            chi: params.chi(),
            omega: params.omega_rabi(),
            sqrt_n: (0..=levels).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    fn ladder(&self, amps: &[C64], detuning: f64, out: &mut [C64]) {
        let top = self.levels - 1;
        for n in 0..self.levels {
            let nf = n as f64;
            let mut d = amps[n] * C64::new(-self.half_kappa * nf, detuning * nf);
            if n > 0 {
                d += amps[n - 1] * (self.gamma * self.sqrt_n[n]);
            }
            if n < top {
                d -= amps[n + 1] * (self.gamma * self.sqrt_n[n + 1]);
            }
            out[n] = d;
        }
    }

    pub(crate) fn apply(&self, y: &[C64], dy: &mut [C64]) {
        let (g, b) = y.split_at(self.levels);
        let (dg, db) = dy.split_at_mut(self.levels);
        self.ladder(g, self.chi, dg);
        self.ladder(b, 0.0, db);
        if self.omega.norm() != 0.0 {
            let i = C64::new(0.0, 1.0);
            let into_b = i * self.omega;
            let into_g = i * self.omega.conj();
            for n in 0..self.levels {
                dg[n] += into_g * b[n];
                db[n] += into_b * g[n];
            }
        }
    }
}

fn derivative(state: &NoJumpState, params: &SystemParams) -> Derivative {
    let levels = state.n_max() + 1;
    let gen = Generator::new(params, levels);
    let mut dy = vec![C64::new(0.0, 0.0); 2 * levels];
    gen.apply(state.flat(), &mut dy);
    let d_b = dy.split_off(levels);
    Derivative { d_g: dy, d_b }
}

/// Resonant drive on the bare resonator.
pub fn derivative_resonant(state: &NoJumpState, params: &SystemParams) -> Result<Derivative> {
    Regime::Resonant.check(params)?;
    Ok(derivative(state, params))
}

/// Resonant derivative plus the detuning term `i n χ C_{G,n}`.
pub fn derivative_detuned(state: &NoJumpState, params: &SystemParams) -> Result<Derivative> {
    Regime::Detuned.check(params)?;
    Ok(derivative(state, params))
}

/// Full qubit–resonator no-jump derivative.
pub fn derivative_coupled(state: &NoJumpState, params: &SystemParams) -> Derivative {
    derivative(state, params)
}

fn run<V>(
    initial: &NoJumpState,
    params: &SystemParams,
    spec: &EvolutionSpec,
    truncation: &FockTruncation,
    mut visit: V,
) -> Result<NoJumpState>
where
    V: FnMut(f64, &[C64]),
{
    spec.validate()?;
    spec.regime.check(params)?;
    if initial.n_max() != truncation.n_max() {
        return Err(invalid(
            "initial",
            format!(
                "state has n_max = {}, truncation has {}",
                initial.n_max(),
                truncation.n_max()
            ),
        ));
    }
    let gen = Generator::new(params, truncation.levels());
    let tail_tol = truncation.tail_tol();
    let check_tail = |t: f64, y: &[C64]| -> Result<()> {
        let w: f64 = y.iter().map(|a| a.norm_sqr()).sum();
        let tail = tail_mass(y);
        if tail > tail_tol * w {
            return Err(Error::TruncationOverflow {
                time: t,
                tail: tail / w,
                limit: tail_tol,
            });
        }
        Ok(())
    };

    let t0 = initial.time();
    check_tail(t0, initial.flat())?;
    visit(t0, initial.flat());
    let mut w_prev = initial.survival_probability();
    let stride = spec.output_stride;
    let t_stop = t0 + spec.t_end;
    let y = integrate(
        |_, y, dy| gen.apply(y, dy),
        t0,
        initial.flat().to_vec(),
        t_stop,
        &spec.step_ctrl,
        |n, t, y| {
            check_tail(t, y)?;
            let w: f64 = y.iter().map(|a| a.norm_sqr()).sum();
            if w > w_prev * (1.0 + SurvivalRecord::MONOTONE_SLACK) {
                return Err(Error::NonMonotoneRecord { index: n });
            }
            w_prev = w;
            if n % stride == 0 || t == t_stop {
                visit(t, y);
            }
            Ok(())
        },
    )?;
    Ok(NoJumpState::from_flat(t_stop, y))
}

/// Integrates the selected regime from `initial`, recording `(t, W, dW/dt)`
/// every `output_stride` accepted steps and at `t_end`.
///
/// `dW/dt` is taken from the damping term, `−κ Σ n |C|²`, not from finite
/// differences. Fails with [`Error::TruncationOverflow`] as soon as the two
/// highest Fock levels carry more than `tail_tol` of the norm.
pub fn evolve(
    initial: &NoJumpState,
    params: &SystemParams,
    spec: &EvolutionSpec,
    truncation: &FockTruncation,
) -> Result<(SurvivalRecord, NoJumpState)> {
    let kappa = params.kappa();
    let t0 = initial.time();
    let mut points = Vec::new();
    let last = run(initial, params, spec, truncation, |t, y| {
        points.push(SurvivalPoint {
            t: t - t0,
            w: y.iter().map(|a| a.norm_sqr()).sum(),
            dw_dt: -kappa * photon_weight(y),
        });
    })?;
    let record = SurvivalRecord::new(points, Source::NumericOde, *params)?;
    Ok((record, last))
}

/// Like [`evolve`] but returns the full state at every recorded time. Does
/// not require the initial state to be normalised.
pub fn propagate(
    initial: &NoJumpState,
    params: &SystemParams,
    spec: &EvolutionSpec,
    truncation: &FockTruncation,
) -> Result<Vec<NoJumpState>> {
    let mut states = Vec::new();
    run(initial, params, spec, truncation, |t, y| {
        states.push(NoJumpState::from_flat(t, y.to_vec()));
    })?;
    Ok(states)
}
