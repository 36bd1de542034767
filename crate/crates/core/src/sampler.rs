//! Monte-Carlo sampling of next-jump times from a survival record.
//!
//! A uniform `u` maps to the time where `W(t) = u`; draws with `u` below
//! `W(t_end)` fall past the record and are reported as censored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::params::SurvivalRecord;

/// Generator family used for every draw.
pub const RNG_ALGORITHM: &str = "ChaCha8";

/// Draws per independent RNG stream. Fixed so results do not depend on the
/// thread count.
pub const CHUNK_SIZE: usize = 8192;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpSampleSet {
    /// Uncensored jump times, in draw order.
    pub times: Vec<f64>,
    /// Draws that landed beyond `t_end`.
    pub censored: usize,
    pub requested: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub chunk_size: usize,
}

/// Inverse of the log-linear interpolant; `None` when `u < W(t_end)`.
fn invert(record: &SurvivalRecord, u: f64) -> Option<f64> {
    let pts = record.points();
    if u < record.w_end() {
        return None;
    }
    // first index with W < u; pts[0].w = 1 ≥ u
    let j = pts.partition_point(|p| p.w >= u);
    if j == 0 {
        return Some(0.0);
    }
    if j == pts.len() {
        // u == W(t_end)
        return Some(record.t_end());
    }
    let (a, b) = (&pts[j - 1], &pts[j]);
    let frac = if b.w > 0.0 {
        (u / a.w).ln() / (b.w / a.w).ln()
    } else {
        (a.w - u) / (a.w - b.w)
    };
    Some(a.t + frac.clamp(0.0, 1.0) * (b.t - a.t))
}

/// Draws `n` next-jump times. Deterministic in `seed`: the draws are split
/// into fixed-size chunks, chunk `k` using stream `k` of the seeded
/// generator, and chunks run in parallel.
pub fn sample_jump_times(record: &SurvivalRecord, n: usize, seed: u64) -> JumpSampleSet {
    let n_chunks = n.div_ceil(CHUNK_SIZE);
    let chunks: Vec<(Vec<f64>, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK_SIZE.min(n - k * CHUNK_SIZE);
            let mut times = Vec::with_capacity(len);
            let mut censored = 0;
            for _ in 0..len {
                // (0, 1]
                let u = 1.0 - rng.random::<f64>();
                match invert(record, u) {
                    Some(t) => times.push(t),
                    None => censored += 1,
                }
            }
            (times, censored)
        })
        .collect();
    let mut times = Vec::with_capacity(n);
    let mut censored = 0;
    for (t, c) in chunks {
        times.extend(t);
        censored += c;
    }
    JumpSampleSet {
        times,
        censored,
        requested: n,
        seed,
        rng: RNG_ALGORITHM,
        chunk_size: CHUNK_SIZE,
    }
}

/// Survival function of the Kolmogorov distribution,
/// `P(K > x) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // the alternating series converges slowly here; the CDF is ~0
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value `K_α` with `P(K > K_α) = α`.
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.3, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum number of uncensored samples for [`histogram_vs_density`].
pub const MIN_SAMPLES: usize = 1000;

/// Significance level of the goodness-of-fit check.
pub const KS_ALPHA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Fraction of all draws (censored included) landing in the bin.
    pub observed: f64,
    /// `W(lo) − W(hi)`.
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub bins: Vec<HistogramBin>,
    pub censored_fraction: f64,
    pub expected_censored: f64,
    pub ks_statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
}

/// Compares samples with the jump distribution of `record`: a histogram
/// against `W(a) − W(b)` per bin, and a Kolmogorov–Smirnov test of the
/// uncensored times against `(1 − W(t))/(1 − W(t_end))`.
pub fn histogram_vs_density(
    samples: &JumpSampleSet,
    record: &SurvivalRecord,
    bins: usize,
) -> Result<FitReport> {
    if bins == 0 {
        return Err(invalid("bins", "must be positive"));
    }
    let n = samples.times.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    let w_end = record.w_end();
    if w_end >= 1.0 {
        return Err(Error::DivisionByZero("record has no jump probability"));
    }
    let total = (n + samples.censored) as f64;
    let t_end = record.t_end();
    let width = t_end / bins as f64;
    let mut counts = vec![0usize; bins];
    for &t in &samples.times {
        let k = ((t / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let hist = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let lo = k as f64 * width;
            let hi = if k + 1 == bins { t_end } else { lo + width };
            HistogramBin {
                lo,
                hi,
                observed: c as f64 / total,
                expected: record.interpolate(lo) - record.interpolate(hi),
            }
        })
        .collect();

    let mut sorted = samples.times.clone();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let norm = 1.0 - w_end;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = (1.0 - record.interpolate(t)) / norm;
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    let critical_value = kolmogorov_critical(KS_ALPHA) / nf.sqrt();
    Ok(FitReport {
        bins: hist,
        censored_fraction: samples.censored as f64 / total,
        expected_censored: w_end,
        ks_statistic: d,
        critical_value,
        p_value: kolmogorov_sf(d * nf.sqrt()),
        alpha: KS_ALPHA,
        pass: d <= critical_value,
    })
}
