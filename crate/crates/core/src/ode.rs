//! Adaptive Dormand–Prince 5(4) integrator for complex linear systems.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerances and step limit for adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
}

impl StepControl {
    /// `abs_tol = rel_tol = 1e-10`, `max_step = 0.05/κ`.
    pub fn for_kappa(kappa: f64) -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: 0.05 / kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1), got {tol}")));
            }
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(invalid("max_step", "must be positive and finite"));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 50_000_000;

fn error_norm(err: &[C64], y0: &[C64], y1: &[C64], ctrl: &StepControl) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = ctrl.abs_tol + ctrl.rel_tol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / err.len().max(1) as f64).sqrt()
}

fn scaled_norm(v: &[C64], y: &[C64], ctrl: &StepControl) -> f64 {
    let sum: f64 = v
        .iter()
        .zip(y)
        .map(|(x, y)| (x.norm() / (ctrl.abs_tol + ctrl.rel_tol * y.norm())).powi(2))
        .sum();
    (sum / v.len().max(1) as f64).sqrt()
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t_end`, calling `on_step`
/// after every accepted step with the step count, time and state. The final
/// step lands exactly on `t_end`.
pub fn integrate<F, O>(
    mut rhs: F,
    t0: f64,
    mut y: Vec<C64>,
    t_end: f64,
    ctrl: &StepControl,
    mut on_step: O,
) -> Result<Vec<C64>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<()>,
{
    ctrl.validate()?;
    let dim = y.len();
    if t_end <= t0 {
        return Ok(y);
    }
    let zero = C64::new(0.0, 0.0);
    let mut k: Vec<Vec<C64>> = vec![vec![zero; dim]; 7];
    let mut stage = vec![zero; dim];
    let mut y_new = vec![zero; dim];
    let mut err = vec![zero; dim];

    let mut t = t0;
    rhs(t, &y, &mut k[0]);

    let mut h = initial_step(&mut rhs, t, &y, &k[0], ctrl).min(t_end - t);
    let mut accepted = 0usize;
    let mut rejected_last = false;

    for _ in 0..MAX_STEPS {
        // stretch onto t_end rather than leave a sliver step behind
        let last = t + 1.01 * h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { time: t, step: h });
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = zero;
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        acc += kj[i] * A[s][j];
                    }
                }
                stage[i] = y[i] + acc * h;
            }
            rhs(t + C[s] * h, &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }
        for i in 0..dim {
            let mut acc = zero;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    acc += kj[i] * E[j];
                }
            }
            err[i] = acc * h;
        }

        let en = error_norm(&err, &y, &y_new, ctrl);
        if en <= 1.0 {
            t = if last { t_end } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            accepted += 1;
            on_step(accepted, t, &y)?;
            if last {
                return Ok(y);
            }
            let mut fac = if en == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if rejected_last {
                fac = fac.min(1.0);
            }
            rejected_last = false;
            h = (h * fac).min(ctrl.max_step);
        } else {
            let fac = (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            h *= fac;
            rejected_last = true;
        }
    }
    Err(Error::StepSizeUnderflow { time: t, step: h })
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[C64], f0: &[C64], ctrl: &StepControl) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let d0 = scaled_norm(y, y, ctrl);
    let d1 = scaled_norm(f0, y, ctrl);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(ctrl.max_step);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    rhs(t + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y, ctrl) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(ctrl.max_step)
}
