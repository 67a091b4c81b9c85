//! Two-sided estimates of the all-time supremum and infimum of the bond
//! window deviation `I_{N,k,l}(t)`.
//!
//! The lower side of the sandwich is a sampled value of `I` (a grid search
//! followed by golden-section polishing); the upper side is the triangle
//! inequality `Σ |w_m|`. When the frequencies of the leading modes are
//! rationally independent their trajectory is dense on the torus, and the
//! supremum of the leading partial sum equals the sum of its absolute
//! weights, which gives the near-tightness statement of
//! [`torus_partial_sum_bound`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::modesum::CosineSums;
use crate::params::{AnalysisWindow, ChainParams, Convention};
use crate::spectral::{b_coefficient, mode_count, ExtensionCoefficients, ModeData};

/// Grid points per period of the fastest mode.
pub const SAMPLES_PER_FAST_PERIOD: f64 = 16.0;
/// Golden-section tolerance, as a fraction of the fastest period.
pub const REFINE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_HORIZON_PERIODS: u32 = 50;

/// `F_N(x) = x ln(N/x)`.
pub fn f_n(n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) || x > n as f64 {
        return Err(ChainError::domain(format!("F_N needs 0 < x <= N, got x={x}, N={n}")));
    }
    Ok(x * (n as f64 / x).ln())
}

/// Mode cutoff `⌊cN / ln ln N⌋`, clamped to `[1, 2N−2]`.
pub fn m_of_n(n: usize, c: f64) -> Result<usize> {
    if n < 16 {
        return Err(ChainError::domain(format!("M(N) needs N >= 16, got {n}")));
    }
    if !(c > 0.0) {
        return Err(ChainError::domain(format!("M(N) needs c > 0, got {c}")));
    }
    let raw = (c * n as f64 / (n as f64).ln().ln()).floor();
    Ok((raw as usize).clamp(1, mode_count(n)))
}

/// Smallest `Ĉ` with `|a_m| ≤ Ĉ N²/m²` for every odd mode and every span `l`.
pub fn tail_constant(n: usize, conv: Convention) -> f64 {
    (1..=mode_count(n))
        .step_by(2)
        .map(|m| {
            let s = (PI * m as f64 / conv.denominator(n)).sin();
            let c = (PI * m as f64 / (4 * n - 2) as f64).cos().abs();
            (m * m) as f64 * c / (s * s) / (n * n) as f64
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub window: AnalysisWindow,
    pub sigma: f64,
    /// Largest sampled value of `I`.
    pub sup_lower: f64,
    /// Triangle bound `2/(2N−1) Σ |a_m b_m|`.
    pub sup_upper: f64,
    /// Smallest sampled value of `I`.
    pub inf_upper: f64,
    pub inf_lower: f64,
    pub t_at_sup: f64,
    pub t_at_inf: f64,
    pub horizon: f64,
    /// False when the grid held no interior maximum to refine.
    pub bracketed: bool,
}

/// Uniform sampling grid for a chain: `16` points per fastest period over
/// `horizon_periods` periods of the slowest mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub step: f64,
    pub samples: usize,
    pub horizon: f64,
    pub t_tol: f64,
}

impl SamplingPlan {
    pub fn new(modes: &ModeData, horizon_periods: u32) -> Self {
        let fast_period = 2.0 * PI / modes.fastest();
        let step = fast_period / SAMPLES_PER_FAST_PERIOD;
        let horizon = horizon_periods as f64 * 2.0 * PI / modes.slowest();
        let samples = (horizon / step).ceil() as usize;
        SamplingPlan {
            step,
            samples,
            horizon,
            t_tol: REFINE_TOLERANCE * fast_period,
        }
    }
}

/// Sandwich of `sup_t I` and `inf_t I` for one window.
pub fn sup_inf_extension(
    params: &ChainParams,
    window: &AnalysisWindow,
    horizon_periods: u32,
    conv: Convention,
) -> Result<ExtremalReport> {
    Ok(sup_inf_extensions(params, std::slice::from_ref(window), horizon_periods, conv)?.remove(0))
}

/// Sandwiches for several windows of the same chain, sharing one time scan.
pub fn sup_inf_extensions(
    params: &ChainParams,
    windows: &[AnalysisWindow],
    horizon_periods: u32,
    conv: Convention,
) -> Result<Vec<ExtremalReport>> {
    let n = params.n();
    let coeffs = windows
        .iter()
        .map(|w| ExtensionCoefficients::new(n, w, conv))
        .collect::<Result<Vec<_>>>()?;
    let modes = ModeData::new(n, params.omega0(), conv)?;
    let plan = SamplingPlan::new(&modes, horizon_periods);
    let sums = CosineSums::new(&modes.omegas, coeffs.iter().map(|c| c.weights()).collect());
    let extrema = sums.extrema(plan.step, plan.samples, plan.t_tol);

    Ok(windows
        .iter()
        .zip(&coeffs)
        .zip(&extrema)
        .map(|((w, c), e)| {
            let bound = c.triangle_bound();
            ExtremalReport {
                n,
                window: *w,
                sigma: params.sigma(),
                sup_lower: e.max,
                sup_upper: bound,
                inf_upper: e.min,
                inf_lower: -bound,
                t_at_sup: e.t_max,
                t_at_inf: e.t_min,
                horizon: plan.horizon,
                bracketed: e.max_bracketed,
            }
        })
        .collect())
}

/// Leading-mode sum and certified tail of the triangle bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusBound {
    /// `2/(2N−1) Σ_{m ≤ M} |a_m b_m|`.
    pub head: f64,
    /// `2/(2N−1) Σ_{M < m ≤ 2N−2, m odd} Ĉ N²/m²`, bounding the remaining modes.
    pub tail: f64,
}

impl TorusBound {
    /// Lower bound on `sup I`, valid when the first `M` frequencies are
    /// rationally independent.
    pub fn lower(&self) -> f64 {
        self.head - self.tail
    }

    pub fn upper(&self) -> f64 {
        self.head + self.tail
    }
}

pub fn torus_partial_sum_bound(
    n: usize,
    window: &AnalysisWindow,
    cutoff: usize,
    conv: Convention,
) -> Result<TorusBound> {
    if cutoff == 0 || cutoff > mode_count(n) {
        return Err(ChainError::domain(format!(
            "cutoff {cutoff} outside 1..={}",
            mode_count(n)
        )));
    }
    let coeffs = ExtensionCoefficients::new(n, window, conv)?;
    let head = coeffs.abs_sum(cutoff);
    let c_hat = tail_constant(n, conv);
    let nn = (n * n) as f64;
    let tail_sum: f64 = ((cutoff + 1)..=mode_count(n))
        .filter(|m| m % 2 == 1)
        .map(|m| c_hat * nn / (m * m) as f64)
        .sum();
    Ok(TorusBound {
        head,
        tail: 2.0 / (2 * n - 1) as f64 * tail_sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub f_n_l: f64,
    /// `sup_t I / F_N(l)`.
    pub ratio_sup: f64,
    /// `−inf_t I / F_N(l)`.
    pub ratio_inf: f64,
    pub report: ExtremalReport,
}

/// Fitted constants of the two-sided bounds
/// `l + c₁F ≤ sup σ⁻¹Δx ≤ l + c₂F` and `l − c₃F ≤ inf σ⁻¹Δx ≤ l − c₄F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub epsilon: f64,
    pub entries: Vec<RatioEntry>,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl RatioScan {
    pub fn sup_spread(&self) -> f64 {
        self.c2 / self.c1
    }

    pub fn inf_spread(&self) -> f64 {
        self.c3 / self.c4
    }
}

/// Offset placing a span in the middle of the admissible range, or `None`
/// when the span does not fit.
pub fn centered_offset(n: usize, l: usize, epsilon: f64) -> Option<usize> {
    let right = AnalysisWindow::max_right(n, epsilon);
    (l <= right).then(|| (right - l) / 2)
}

/// Powers of two `1, 2, 4, …` up to `⌊N/4⌋`.
pub fn dyadic_spans(n: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |l| Some(l * 2))
        .take_while(|&l| l <= (n / 4).max(1))
        .collect()
}

/// Measures `sup I / F_N(l)` and `−inf I / F_N(l)` for every `(N, l)`, with
/// the window centred in the admissible range, and fits the four constants
/// as the extreme ratios. Entries are sorted by `(N, l)`.
pub fn theorem_ratio_scan<L>(
    ladder: &[usize],
    spans: L,
    epsilon: f64,
    horizon_periods: u32,
    conv: Convention,
) -> Result<RatioScan>
where
    L: Fn(usize) -> Vec<usize> + Sync,
{
    if ladder.is_empty() {
        return Err(ChainError::domain("empty N ladder"));
    }
    let per_n: Vec<Vec<RatioEntry>> = ladder
        .par_iter()
        .map(|&n| {
            let params = ChainParams::with_sigma(n, 1.0, 1.0, 1.0)?;
            let mut windows = Vec::new();
            for l in spans(n) {
                if l >= n {
                    return Err(ChainError::domain(format!("span l={l} leaves F_N(l) = 0 for N={n}")));
                }
                let k = centered_offset(n, l, epsilon)
                    .ok_or_else(|| ChainError::domain(format!("span l={l} violates the epsilon window for N={n}")))?;
                windows.push(AnalysisWindow::new(n, k, l, epsilon)?);
            }
            let reports = sup_inf_extensions(&params, &windows, horizon_periods, conv)?;
            reports
                .into_iter()
                .map(|r| {
                    let f = f_n(n, r.window.l as f64)?;
                    Ok(RatioEntry {
                        f_n_l: f,
                        ratio_sup: r.sup_lower / f,
                        ratio_inf: -r.inf_upper / f,
                        report: r,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut entries: Vec<RatioEntry> = per_n.into_iter().flatten().collect();
    entries.sort_by_key(|e| (e.report.n, e.report.window.l, e.report.window.k));
    if entries.is_empty() {
        return Err(ChainError::domain("no admissible windows in the scan"));
    }
    let fold = |f: fn(&RatioEntry) -> f64| {
        entries
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (c1, c2) = fold(|e| e.ratio_sup);
    let (c4, c3) = fold(|e| e.ratio_inf);
    Ok(RatioScan {
        epsilon,
        entries,
        c1,
        c2,
        c3,
        c4,
    })
}

/// Measured constants of the coefficient inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBounds {
    /// Largest `|a_m|` over even modes (zero when they vanish exactly).
    pub even_max: f64,
    /// Largest `|b_m|`.
    pub b_max: f64,
    /// Smallest `C` with `|a_m| ≤ C N²/m²` over all windows.
    pub decay_constant: f64,
    /// Range of `m|a_m|/(Nl)` over odd `m ≤ N/l`.
    pub band: (f64, f64),
    /// Per margin `ε`: the smallest `m(|b_m|/m + |b_{m+2}|/(m+2))` over odd
    /// `m` and all admissible windows.
    pub pair_floor: Vec<(f64, f64)>,
}

/// Evaluates the coefficient inequalities over every admissible window of
/// the given chain sizes.
pub fn coefficient_bounds(ns: &[usize], epsilons: &[f64], conv: Convention) -> Result<CoefficientBounds> {
    let mut out = CoefficientBounds {
        even_max: 0.0,
        b_max: 0.0,
        decay_constant: 0.0,
        band: (f64::INFINITY, f64::NEG_INFINITY),
        pair_floor: Vec::new(),
    };
    for &n in ns {
        // a_m does not depend on k, so k = 0 covers every span
        for l in 1..n {
            let w = AnalysisWindow {
                k: 0,
                l,
                epsilon: 0.5 / n as f64,
            };
            let c = ExtensionCoefficients::new(n, &w, conv)?;
            for m in 1..=mode_count(n) {
                let am = c.a(m).abs();
                if m % 2 == 0 {
                    out.even_max = out.even_max.max(am);
                    continue;
                }
                out.decay_constant = out.decay_constant.max(am * (m * m) as f64 / (n * n) as f64);
                if m * l <= n {
                    let r = m as f64 * am / (n * l) as f64;
                    out.band = (out.band.0.min(r), out.band.1.max(r));
                }
            }
        }
    }
    for &eps in epsilons {
        let mut floor = f64::INFINITY;
        for &n in ns {
            let right = AnalysisWindow::max_right(n, eps);
            for k in 0..right {
                for l in 1..=(right - k) {
                    for m in (1..=mode_count(n)).step_by(2) {
                        let b0 = b_coefficient(n, k, l, m).abs();
                        let b2 = b_coefficient(n, k, l, m + 2).abs();
                        out.b_max = out.b_max.max(b0);
                        floor = floor.min(m as f64 * (b0 / m as f64 + b2 / (m + 2) as f64));
                    }
                }
            }
        }
        out.pair_floor.push((eps, floor));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const C: Convention = Convention::Corrected;

    #[test]
    fn f_n_examples() {
        assert_eq!(f_n(100, 100.0).unwrap(), 0.0);
        assert_abs_diff_eq!(f_n(100, 1.0).unwrap(), 100f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(f_n(64, 8.0).unwrap(), 8.0 * 8f64.ln(), epsilon = 1e-13);
        assert_abs_diff_eq!(f_n(64, 8.0).unwrap(), 16.6355, epsilon = 1e-4);
        assert!(f_n(10, 0.0).is_err());
        assert!(f_n(10, -1.0).is_err());
    }

    #[test]
    fn f_n_is_concave() {
        let n = 100;
        let h = 1e-3;
        for i in 1..100 {
            let x = i as f64;
            let d2 = (f_n(n, x + h).unwrap() - 2.0 * f_n(n, x).unwrap() + f_n(n, x - h).unwrap()) / (h * h);
            assert!(d2 < 0.0, "x={x} d2={d2}");
        }
    }

    #[test]
    fn m_of_n_examples() {
        assert_eq!(m_of_n(100, 1.0).unwrap(), 65);
        assert_eq!(m_of_n(16, 1.0).unwrap(), 15);
        assert_eq!(m_of_n(100, 10.0).unwrap(), 198);
        assert!(m_of_n(15, 1.0).is_err());
        assert!(m_of_n(100, 0.0).is_err());
    }

    fn n2() -> (ChainParams, AnalysisWindow) {
        (
            ChainParams::with_sigma(2, 1.0, 1.0, 0.5).unwrap(),
            AnalysisWindow::new(2, 0, 1, 0.25).unwrap(),
        )
    }

    #[test]
    fn two_particle_sandwich() {
        let (p, w) = n2();
        let r = sup_inf_extension(&p, &w, 5, C).unwrap();
        assert_abs_diff_eq!(r.sup_lower, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.inf_upper, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.sup_upper, 1.0, epsilon = 1e-14);
        assert!(r.bracketed);
    }

    #[test]
    fn zero_horizon_sees_only_the_start() {
        let p = ChainParams::with_sigma(30, 1.0, 1.0, 1.0).unwrap();
        let w = AnalysisWindow::new(30, 3, 4, 0.25).unwrap();
        let r = sup_inf_extension(&p, &w, 0, C).unwrap();
        assert_abs_diff_eq!(r.sup_lower, -4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.inf_upper, -4.0, epsilon = 1e-10);
        assert!(!r.bracketed);
    }

    #[test]
    fn torus_bound_examples() {
        let w = AnalysisWindow::new(2, 0, 1, 0.25).unwrap();
        let b = torus_partial_sum_bound(2, &w, 1, C).unwrap();
        assert_abs_diff_eq!(b.head, 1.0, epsilon = 1e-14);
        assert_eq!(b.tail, 0.0);

        let w = AnalysisWindow::new(20, 2, 3, 0.25).unwrap();
        let coeffs = ExtensionCoefficients::new(20, &w, C).unwrap();
        let full = torus_partial_sum_bound(20, &w, 38, C).unwrap();
        assert_eq!(full.tail, 0.0);
        assert_abs_diff_eq!(full.head, coeffs.triangle_bound(), epsilon = 1e-14);
        let one = torus_partial_sum_bound(20, &w, 1, C).unwrap();
        assert_abs_diff_eq!(
            one.head,
            2.0 / 39.0 * (coeffs.a(1) * coeffs.b(1)).abs(),
            epsilon = 1e-14
        );
        assert!(one.upper() >= coeffs.triangle_bound());
        assert!(torus_partial_sum_bound(20, &w, 0, C).is_err());
    }

    #[test]
    fn tail_constant_bounds_every_coefficient() {
        for &n in &[5usize, 8, 33] {
            let c_hat = tail_constant(n, C);
            for l in 1..n / 2 {
                let w = AnalysisWindow::new(n, 0, l, 0.25).unwrap();
                let c = ExtensionCoefficients::new(n, &w, C).unwrap();
                for m in 1..=mode_count(n) {
                    assert!(c.a(m).abs() <= c_hat * (n * n) as f64 / (m * m) as f64 * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn ratio_scan_rejects_spans_outside_window() {
        assert!(theorem_ratio_scan(&[16], |n| vec![n - 1], 0.25, 1, C).is_err());
        let scan = theorem_ratio_scan(&[16], |_| vec![2], 0.25, 2, C).unwrap();
        assert!(scan.c1 > 0.0);
        assert_eq!(scan.c1, scan.c2);
        assert_eq!(scan.c3, scan.c4);
    }

    #[test]
    fn dyadic_spans_stop_at_quarter() {
        assert_eq!(dyadic_spans(64), vec![1, 2, 4, 8, 16]);
        assert_eq!(dyadic_spans(2), vec![1]);
    }
}
