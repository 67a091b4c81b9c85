//! Double scaling limit: lattice spacing `a = 1/N` and a driving ratio
//! `σ(N)` that shrinks with `N`.
//!
//! The observable is the largest relative bond length ever reached,
//! `r(N) = max_t (z_{k+l} − z_k) / (l a)`. It tends to one when
//! `σ N ln N → 0` and grows without bound when `σ N ln N → ∞`.

pub mod statics;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::extremal::{m_of_n, sup_inf_extensions, torus_partial_sum_bound, DEFAULT_HORIZON_PERIODS};
use crate::params::{AnalysisWindow, ChainParams, Convention};

pub use statics::{
    critical_force_ratio, fitted_depth, inflection_point, mie_fit_from_curvature, printed_critical_ratio,
    static_fixed_point, CriticalRatio, FixedPoint,
};

/// `σ(N) = c · N^{−alpha} · (ln N)^{−beta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFamily {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ScalingFamily {
    pub fn new(c: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) || !alpha.is_finite() || !beta.is_finite() {
            return Err(ChainError::domain(format!(
                "invalid scaling family c={c} alpha={alpha} beta={beta}"
            )));
        }
        Ok(ScalingFamily { c, alpha, beta })
    }

    pub fn sigma(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.c * nf.powf(-self.alpha) * nf.ln().powf(-self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ExtensionVanishes,
    ExtensionDiverges,
    Inconclusive,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::ExtensionVanishes => "extension-vanishes",
            Classification::ExtensionDiverges => "extension-diverges",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

/// How `sup_t I` over all time is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupEstimate {
    /// Best value on the finite sampling grid.
    Sampled,
    /// The larger of the sampled value and the torus bound `head − tail`
    /// over the first `M(N)` modes. Both are lower bounds of the all-time
    /// sup; the torus one assumes those `M(N)` frequencies are rationally
    /// independent.
    #[default]
    Torus,
}

impl SupEstimate {
    pub fn name(self) -> &'static str {
        match self {
            SupEstimate::Sampled => "sampled",
            SupEstimate::Torus => "torus",
        }
    }
}

impl std::str::FromStr for SupEstimate {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(SupEstimate::Sampled),
            "torus" => Ok(SupEstimate::Torus),
            other => Err(ChainError::domain(format!(
                "unknown sup estimate '{other}' (sampled or torus)"
            ))),
        }
    }
}

/// Constant `c` of the mode cutoff `M(N) = ⌊cN / ln ln N⌋` used by
/// [`SupEstimate::Torus`].
pub const DEFAULT_CUTOFF_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub span: usize,
    pub epsilon: f64,
    pub horizon_periods: u32,
    pub convention: Convention,
    /// Scan every admissible offset instead of four representative ones.
    pub all_offsets: bool,
    pub estimate: SupEstimate,
    pub cutoff_constant: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            span: 1,
            epsilon: 0.25,
            horizon_periods: DEFAULT_HORIZON_PERIODS,
            convention: Convention::Corrected,
            all_offsets: false,
            estimate: SupEstimate::Torus,
            cutoff_constant: DEFAULT_CUTOFF_CONSTANT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeExtension {
    pub n: usize,
    pub sigma: f64,
    /// `max_t (z_{k+l} − z_k) / (l a)` maximised over the offsets.
    pub r: f64,
    /// Largest estimate of `sup_t I` over the offsets.
    pub sup_deviation: f64,
    pub k_at_max: usize,
    /// Largest sampled `sup_t I` over the offsets.
    pub sup_sampled: f64,
    /// Largest torus bound `head − tail` over the offsets, when used.
    pub sup_torus: Option<f64>,
}

/// Offsets `{0, ⌊R/4⌋, ⌊R/2⌋, R − l}` with `R = ⌊(1−ε)N⌋`, or all of `0..=R−l`.
pub fn sample_offsets(n: usize, span: usize, epsilon: f64, all: bool) -> Vec<usize> {
    let right = AnalysisWindow::max_right(n, epsilon);
    if span > right {
        return Vec::new();
    }
    let mut ks: Vec<usize> = if all {
        (0..=right - span).collect()
    } else {
        vec![0, right / 4, right / 2, right - span]
            .into_iter()
            .filter(|&k| k + span <= right)
            .collect()
    };
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Relative extension `r = 1 + Nσ(l + sup_t I)/l` of a chain with spacing
/// `a = 1/N`, maximised over the sampled offsets.
///
/// The torus estimate needs the cutoff `M(N)`, which is defined for
/// `N ≥ 16`; smaller chains always use the sampled value.
pub fn relative_extension(n: usize, sigma: f64, opts: &SweepOptions) -> Result<RelativeExtension> {
    let l = opts.span;
    let ks = sample_offsets(n, l, opts.epsilon, opts.all_offsets);
    if ks.is_empty() {
        return Err(ChainError::domain(format!(
            "span {l} does not fit the epsilon window for N={n}"
        )));
    }
    let windows = ks
        .iter()
        .map(|&k| AnalysisWindow::new(n, k, l, opts.epsilon))
        .collect::<Result<Vec<_>>>()?;
    let params = ChainParams::with_sigma(n, 1.0, sigma, 1.0 / n as f64)?;
    let reports = sup_inf_extensions(&params, &windows, opts.horizon_periods, opts.convention)?;
    let cutoff = match opts.estimate {
        SupEstimate::Torus if n >= 16 => Some(m_of_n(n, opts.cutoff_constant)?),
        _ => None,
    };

    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut sup_sampled = f64::NEG_INFINITY;
    let mut sup_torus: Option<f64> = None;
    for (w, rep) in windows.iter().zip(&reports) {
        let mut estimate = rep.sup_lower;
        sup_sampled = sup_sampled.max(rep.sup_lower);
        if let Some(m) = cutoff {
            let torus = torus_partial_sum_bound(n, w, m, opts.convention)?.lower();
            sup_torus = Some(sup_torus.map_or(torus, |t| t.max(torus)));
            estimate = estimate.max(torus);
        }
        if estimate > best.0 {
            best = (estimate, w.k);
        }
    }
    let r = 1.0 + n as f64 * sigma * (l as f64 + best.0) / l as f64;
    Ok(RelativeExtension {
        n,
        sigma,
        r,
        sup_deviation: best.0,
        k_at_max: best.1,
        sup_sampled,
        sup_torus,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVerdict {
    pub family: ScalingFamily,
    pub ladder: Vec<usize>,
    pub points: Vec<RelativeExtension>,
    pub classification: Classification,
    /// Least-squares slope of `r` against `ln N`.
    pub slope: f64,
    /// Slopes between consecutive ladder entries.
    pub local_slopes: Vec<f64>,
}

/// Relative spread allowed between local slopes of a diverging family.
pub const SLOPE_STABILITY: f64 = 0.30;

/// Computes `r(N)` along the ladder and classifies the family.
pub fn phase_sweep(family: &ScalingFamily, ladder: &[usize], opts: &SweepOptions) -> Result<PhaseVerdict> {
    if ladder.is_empty() {
        return Err(ChainError::domain("empty N ladder"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ChainError::domain("ladder must be strictly increasing"));
    }
    if ladder[0] < 16 {
        return Err(ChainError::domain(format!(
            "ladder entries must be >= 16, got {}",
            ladder[0]
        )));
    }
    let points = ladder
        .par_iter()
        .map(|&n| relative_extension(n, family.sigma(n), opts))
        .collect::<Result<Vec<_>>>()?;

    let logs: Vec<f64> = ladder.iter().map(|&n| (n as f64).ln()).collect();
    let rs: Vec<f64> = points.iter().map(|p| p.r).collect();
    let local_slopes: Vec<f64> = (1..rs.len())
        .map(|i| (rs[i] - rs[i - 1]) / (logs[i] - logs[i - 1]))
        .collect();
    let slope = least_squares_slope(&logs, &rs);
    let classification = classify(&rs, &local_slopes);
    Ok(PhaseVerdict {
        family: *family,
        ladder: ladder.to_vec(),
        points,
        classification,
        slope,
        local_slopes,
    })
}

/// Vanishing: `r − 1` identically zero, or positive and strictly decreasing.
/// Diverging: `r` strictly increasing, and either the final `r` exceeds 2 or
/// the local slopes against `ln N` are positive and agree within
/// [`SLOPE_STABILITY`] of their mean.
pub fn classify(rs: &[f64], local_slopes: &[f64]) -> Classification {
    if rs.len() < 2 {
        return Classification::Inconclusive;
    }
    let excess: Vec<f64> = rs.iter().map(|r| r - 1.0).collect();
    if excess.iter().all(|&e| e == 0.0) {
        return Classification::ExtensionVanishes;
    }
    if excess.iter().all(|&e| e > 0.0) && excess.windows(2).all(|w| w[1] < w[0]) {
        return Classification::ExtensionVanishes;
    }
    if rs.windows(2).all(|w| w[1] > w[0]) {
        let last = *rs.last().expect("non-empty");
        if last > 2.0 || slopes_stable(local_slopes) {
            return Classification::ExtensionDiverges;
        }
    }
    Classification::Inconclusive
}

fn slopes_stable(slopes: &[f64]) -> bool {
    if slopes.is_empty() || slopes.iter().any(|&s| !(s > 0.0)) {
        return false;
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    slopes.iter().all(|s| (s - mean).abs() <= SLOPE_STABILITY * mean)
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
