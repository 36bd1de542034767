//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex,
//! vector-valued integrands.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

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
// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

struct Panel {
    lo: f64,
    hi: f64,
    value: Vec<C64>,
    error: f64,
}

fn gk15<F>(f: &mut F, lo: f64, hi: f64, dim: usize, buf: &mut [C64]) -> Panel
where
    F: FnMut(f64, &mut [C64]),
{
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let zero = C64::new(0.0, 0.0);
    let mut kronrod = vec![zero; dim];
    let mut gauss = vec![zero; dim];

    f(centre, buf);
    for i in 0..dim {
        kronrod[i] = buf[i] * WGK[7];
        gauss[i] = buf[i] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        for x in [centre - dx, centre + dx] {
            f(x, buf);
            for i in 0..dim {
                kronrod[i] += buf[i] * WGK[j];
                if j % 2 == 1 {
                    gauss[i] += buf[i] * WG[j / 2];
                }
            }
        }
    }
    let mut error = 0.0f64;
    for i in 0..dim {
        kronrod[i] *= half;
        gauss[i] *= half;
        error = error.max((kronrod[i] - gauss[i]).norm());
    }
    Panel {
        lo,
        hi,
        value: kronrod,
        error,
    }
}

/// Integrates `f` over `[lo, hi]`, where `f(x, out)` writes `dim` values.
/// Stops once the summed error estimate drops below
/// `max(abs_tol, rel_tol·‖I‖∞)`.
pub fn integrate_vec<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    dim: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Vec<C64>>
where
    F: FnMut(f64, &mut [C64]),
{
    let zero = C64::new(0.0, 0.0);
    if hi <= lo {
        return Ok(vec![zero; dim]);
    }
    let mut buf = vec![zero; dim];
    let mut panels = vec![gk15(&mut f, lo, hi, dim, &mut buf)];
    loop {
        let mut total = vec![zero; dim];
        let mut err = 0.0;
        for p in &panels {
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t += v;
            }
            err += p.error;
        }
        let size = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(size.is_finite() && err.is_finite()) {
            return Err(Error::QuadratureFailure { lo, hi, error: err });
        }
        if err <=abs_tol.max(rel_tol * size) {
            return Ok(total);
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure { lo, hi, error: err });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi {
            return Err(Error::QuadratureFailure { lo, hi, error: err });
        }
        panels.push(gk15(&mut f, p.lo, mid, dim, &mut buf));
        panels.push(gk15(&mut f, mid, p.hi, dim, &mut buf));
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> Result<C64>
where
    F: FnMut(f64) -> C64,
{
    integrate_vec(|x, out| out[0] = f(x), lo, hi, 1, abs_tol, rel_tol).map(|v| v[0])
}
