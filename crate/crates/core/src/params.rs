//! Physical parameters, the truncated amplitude state and the survival record
//! shared by every other module.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Rates describing the driven, damped resonator and its qubit.
///
/// The drive amplitude `Γ = κ√n̄/2` is never stored; it is recomputed from
/// `kappa` and `nbar` on every call to [`SystemParams::gamma_drive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    kappa: f64,
    nbar: f64,
    chi: f64,
    omega_rabi: C64,
}

impl SystemParams {
    /// Validates and builds a parameter set.
    pub fn new(kappa: f64, nbar: f64, chi: f64, omega_rabi: C64) -> Result<Self> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(invalid("kappa", format!("must be finite and > 0, got {kappa}")));
        }
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        if !chi.is_finite() || chi < 0.0 {
            return Err(invalid("chi", format!("must be finite and >= 0, got {chi}")));
        }
        if !omega_rabi.re.is_finite() || !omega_rabi.im.is_finite() {
            return Err(invalid("omega_rabi", "must be finite"));
        }
        Ok(Self {
            kappa,
            nbar,
            chi,
            omega_rabi,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn omega_rabi(&self) -> C64 {
        self.omega_rabi
    }

    /// Drive amplitude Γ = κ√n̄/2.
    pub fn gamma_drive(&self) -> f64 {
        self.kappa * self.nbar.sqrt() / 2.0
    }

    pub fn with_nbar(&self, nbar: f64) -> Result<Self> {
        Self::new(self.kappa, nbar, self.chi, self.omega_rabi)
    }

    pub fn with_chi(&self, chi: f64) -> Result<Self> {
        Self::new(self.kappa, self.nbar, chi, self.omega_rabi)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(kappa, self.nbar, self.chi, self.omega_rabi)
    }

    pub fn with_omega(&self, omega_rabi: C64) -> Result<Self> {
        Self::new(self.kappa, self.nbar, self.chi, omega_rabi)
    }
}

/// Convenience constructor with a real Rabi coupling.
pub fn make_params(kappa: f64, nbar: f64, chi: f64, omega_rabi: f64) -> Result<SystemParams> {
    SystemParams::new(kappa, nbar, chi, C64::new(omega_rabi, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitLevel {
    /// Ground (dark) level.
    G,
    /// Excited (bright) level.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockTruncation {
    n_max: usize,
    tail_tol: f64,
}

impl FockTruncation {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(invalid("n_max", "must be at least 1"));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(invalid("tail_tol", format!("must lie in (0, 1), got {tail_tol}")));
        }
        Ok(Self { n_max, tail_tol })
    }

    /// `ceil(n̄ + 8√(n̄+1)) + 8`: the top two levels of a coherent state with
    /// |α|² ≤ n̄ then hold well under 1e-12 of its norm.
    pub fn for_params(params: &SystemParams) -> Self {
        let nbar = params.nbar();
        let n_max = (nbar + 8.0 * (nbar + 1.0).sqrt()).ceil() as usize + 8;
        Self {
            n_max,
            tail_tol: Self::DEFAULT_TAIL_TOL,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Number of Fock levels kept per qubit level.
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }
}

/// Unnormalised amplitudes `C_{q,n}` conditioned on no jump since reset.
///
/// Stored as one contiguous vector: `[C_{G,0..=N}, C_{B,0..=N}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoJumpState {
    time: f64,
    amps: Vec<C64>,
}

impl NoJumpState {
    pub fn from_parts(time: f64, amps_g: &[C64], amps_b: &[C64]) -> Result<Self> {
        if amps_g.len() != amps_b.len() || amps_g.len() < 2 {
            return Err(invalid(
                "amplitudes",
                "G and B manifolds need equal length of at least 2",
            ));
        }
        let mut amps = Vec::with_capacity(2 * amps_g.len());
        amps.extend_from_slice(amps_g);
        amps.extend_from_slice(amps_b);
        Ok(Self { time, amps })
    }

    pub(crate) fn from_flat(time: f64, amps: Vec<C64>) -> Self {
        debug_assert!(amps.len().is_multiple_of(2));
        Self { time, amps }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() / 2 - 1
    }

    pub fn amps_g(&self) -> &[C64] {
        &self.amps[..self.amps.len() / 2]
    }

    pub fn amps_b(&self) -> &[C64] {
        &self.amps[self.amps.len() / 2..]
    }

    pub(crate) fn flat(&self) -> &[C64] {
        &self.amps
    }

    /// Returns `c` times this state.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            time: self.time,
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// `W = Σ_n |C_{G,n}|² + |C_{B,n}|²`.
    pub fn survival_probability(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Σ_n n (|C_{G,n}|² + |C_{B,n}|²)`, the mean photon number weighted by
    /// the unnormalised state.
    pub fn photon_weight(&self) -> f64 {
        photon_weight(&self.amps)
    }

    /// Mass carried by the two highest retained Fock levels.
    pub fn tail_mass(&self) -> f64 {
        tail_mass(&self.amps)
    }
}

pub(crate) fn photon_weight(amps: &[C64]) -> f64 {
    let levels = amps.len() / 2;
    amps.iter()
        .enumerate()
        .map(|(i, a)| (i % levels) as f64 * a.norm_sqr())
        .sum()
}

pub(crate) fn tail_mass(amps: &[C64]) -> f64 {
    let levels = amps.len() / 2;
    let from = levels.saturating_sub(2);
    amps.iter()
        .enumerate()
        .filter(|(i, _)| i % levels >= from)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Reset state: amplitude one in `|level, 0⟩`.
pub fn initial_state(level: QubitLevel, truncation: &FockTruncation) -> NoJumpState {
    let levels = truncation.levels();
    let mut amps = vec![C64::new(0.0, 0.0); 2 * levels];
    let idx = match level {
        QubitLevel::G => 0,
        QubitLevel::B => levels,
    };
    amps[idx] = C64::new(1.0, 0.0);
    NoJumpState::from_flat(0.0, amps)
}

/// Where a survival record came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    NumericOde,
    ClosedForm,
    AsymptoticShort,
    AsymptoticLong,
    ReducedModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub t: f64,
    pub w: f64,
    pub dw_dt: f64,
}

/// Survival probability `W(t)` and its derivative on an increasing time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalRecord {
    points: Vec<SurvivalPoint>,
    source: Source,
    params: SystemParams,
}

impl SurvivalRecord {
    /// Relative slack allowed between successive `W` values.
    pub const MONOTONE_SLACK: f64 = 1e-12;

    pub fn new(points: Vec<SurvivalPoint>, source: Source, params: SystemParams) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidRecord("empty grid".into()))?;
        if first.t != 0.0 {
            return Err(Error::InvalidRecord(format!("grid starts at t = {}", first.t)));
        }
        if (first.w - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidRecord(format!("W(0) = {} != 1", first.w)));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.t.is_finite() && p.w.is_finite() && p.dw_dt.is_finite()) {
                return Err(Error::InvalidRecord(format!("non-finite entry at index {i}")));
            }
            if p.w < 0.0 {
                return Err(Error::InvalidRecord(format!("negative W at index {i}")));
            }
            if p.dw_dt > 0.0 {
                return Err(Error::NonMonotoneRecord { index: i });
            }
        }
        for (i, pair) in points.windows(2).enumerate() {
            if pair[1].t <= pair[0].t {
                return Err(Error::InvalidRecord(format!(
                    "time not strictly increasing at index {}",
                    i + 1
                )));
            }
            if pair[1].w > pair[0].w * (1.0 + Self::MONOTONE_SLACK) {
                return Err(Error::NonMonotoneRecord { index: i + 1 });
            }
        }
        Ok(Self {
            points,
            source,
            params,
        })
    }

    pub fn points(&self) -> &[SurvivalPoint] {
        &self.points
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn t_end(&self) -> f64 {
        self.points.last().map(|p| p.t).unwrap_or(0.0)
    }

    pub fn w_end(&self) -> f64 {
        self.points.last().map(|p| p.w).unwrap_or(1.0)
    }

    /// `W` at an arbitrary time inside the grid, log-linear between points.
    pub fn interpolate(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= 0.0 {
            return pts[0].w;
        }
        if t >= self.t_end() {
            return self.w_end();
        }
        let hi = pts.partition_point(|p| p.t <= t);
        let (a, b) = (&pts[hi - 1], &pts[hi]);
        log_linear(a, b, t)
    }
}

pub(crate) fn log_linear(a: &SurvivalPoint, b: &SurvivalPoint, t: f64) -> f64 {
    let frac = (t - a.t) / (b.t - a.t);
    if a.w > 0.0 && b.w > 0.0 {
        (a.w.ln() + frac * (b.w.ln() - a.w.ln())).exp()
    } else {
        a.w + frac * (b.w - a.w)
    }
}

/// Jump density `D(t) = −dW/dt` on the record grid.
pub fn jump_density(record: &SurvivalRecord) -> Vec<(f64, f64)> {
    record
        .points()
        .iter()
        .map(|p| (p.t, (-p.dw_dt).max(0.0)))
        .collect()
}
