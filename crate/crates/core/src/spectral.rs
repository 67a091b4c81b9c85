//! Closed-form normal-mode solution of the driven pinned chain.
//!
//! Starting from rest on the lattice, the deviation of site `n` is
//!
//! ```text
//! x_n(t) = σ [ n − 1/(2N−1) Σ_{m=1}^{2N−2} γ_{m,n} cos(ω_m t) ]
//! γ_{m,n} = sin(πm/2) cos(πm/(4N−2)) sin(πnm/(2N−1)) / sin²(πm/D)
//! ω_m     = 2ω₀ sin(πm/D)
//! ```
//!
//! with `D = 4N−2` under [`Convention::Corrected`]. The difference of two sites
//! collapses to a single cosine sum with coefficients `a_m b_m`, see
//! [`ExtensionCoefficients`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::params::{AnalysisWindow, ChainParams, Convention};

/// `sin(πm/2)` evaluated exactly from the parity of `m`.
#[inline]
pub(crate) fn half_turn_sign(m: usize) -> f64 {
    match m % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Number of modes in the expansion, `2N − 2`.
#[inline]
pub fn mode_count(n: usize) -> usize {
    2 * n - 2
}

/// Frequency of mode `m`, `2ω₀ sin(πm/D)`.
pub fn mode_frequency(n: usize, omega0: f64, m: usize, conv: Convention) -> Result<f64> {
    if n < 2 {
        return Err(ChainError::domain(format!("need at least 2 particles, got {n}")));
    }
    if m > 4 * n - 3 {
        return Err(ChainError::domain(format!("mode index {m} outside 0..={}", 4 * n - 3)));
    }
    Ok(raw_frequency(n, omega0, m, conv))
}

#[inline]
fn raw_frequency(n: usize, omega0: f64, m: usize, conv: Convention) -> f64 {
    2.0 * omega0 * (PI * m as f64 / conv.denominator(n)).sin()
}

/// Mode-independent part of `γ` and `a_m`:
/// `sin(πm/2) cos(πm/(4N−2)) / sin²(πm/D)`.
#[inline]
fn mode_weight(n: usize, m: usize, conv: Convention) -> f64 {
    let sign = half_turn_sign(m);
    if sign == 0.0 {
        return 0.0;
    }
    let s = (PI * m as f64 / conv.denominator(n)).sin();
    sign * (PI * m as f64 / (4 * n - 2) as f64).cos() / (s * s)
}

fn check_mode(n: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(ChainError::domain(format!("need at least 2 particles, got {n}")));
    }
    if m == 0 || m > mode_count(n) {
        return Err(ChainError::domain(format!(
            "mode index {m} outside 1..={}",
            mode_count(n)
        )));
    }
    Ok(())
}

fn check_site(n: usize, site: usize) -> Result<()> {
    if site >= n {
        return Err(ChainError::domain(format!("site {site} outside 0..{n}")));
    }
    Ok(())
}

/// The coefficient `γ_{m,N,n}` of mode `m` at site `site`.
pub fn gamma_coefficient(n: usize, site: usize, m: usize, conv: Convention) -> Result<f64> {
    check_mode(n, m)?;
    check_site(n, site)?;
    Ok(mode_weight(n, m, conv) * (PI * (site * m) as f64 / (2 * n - 1) as f64).sin())
}

/// `|Σ_m γ_{m,n} / (2N−1) − n|`; vanishes (to rounding) only for the
/// corrected convention.
pub fn gamma_identity_residual(n: usize, site: usize, conv: Convention) -> Result<f64> {
    check_site(n, site)?;
    let mut sum = 0.0;
    for m in 1..=mode_count(n) {
        sum += gamma_coefficient(n, site, m, conv)?;
    }
    Ok((sum / (2 * n - 1) as f64 - site as f64).abs())
}

/// Mode frequencies `ω_1 … ω_{2N−2}` under one convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub n: usize,
    pub convention: Convention,
    pub omegas: Vec<f64>,
}

impl ModeData {
    pub fn new(n: usize, omega0: f64, conv: Convention) -> Result<Self> {
        if n < 2 {
            return Err(ChainError::domain(format!("need at least 2 particles, got {n}")));
        }
        let omegas = (1..=mode_count(n)).map(|m| raw_frequency(n, omega0, m, conv)).collect();
        Ok(ModeData {
            n,
            convention: conv,
            omegas,
        })
    }

    /// `ω_m` for `1 ≤ m ≤ 2N−2`.
    pub fn omega(&self, m: usize) -> f64 {
        self.omegas[m - 1]
    }

    pub fn slowest(&self) -> f64 {
        self.omegas[0]
    }

    pub fn fastest(&self) -> f64 {
        *self.omegas.last().expect("at least two modes")
    }
}

/// Precomputed closed-form trajectory of all sites.
///
/// Only odd modes are stored; even modes have `γ = 0` identically.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    params: ChainParams,
    convention: Convention,
    /// Odd-mode frequencies.
    omegas: Vec<f64>,
    /// `gamma[site][j]` for the j-th odd mode, already divided by `2N−1`.
    gamma: Vec<Vec<f64>>,
}

impl SpectralSolution {
    pub fn new(params: ChainParams, conv: Convention) -> Self {
        let n = params.n();
        let odd: Vec<usize> = (1..=mode_count(n)).step_by(2).collect();
        let omegas = odd
            .iter()
            .map(|&m| raw_frequency(n, params.omega0(), m, conv))
            .collect();
        let scale = 1.0 / (2 * n - 1) as f64;
        let gamma = (0..n)
            .map(|site| {
                odd.iter()
                    .map(|&m| scale * mode_weight(n, m, conv) * (PI * (site * m) as f64 / (2 * n - 1) as f64).sin())
                    .collect()
            })
            .collect();
        SpectralSolution {
            params,
            convention: conv,
            omegas,
            gamma,
        }
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Deviation `x_site(t)` from the lattice site `site·a`.
    pub fn displacement(&self, site: usize, t: f64) -> f64 {
        let cos: Vec<f64> = self.omegas.iter().map(|w| (w * t).cos()).collect();
        self.displacement_with(site, &cos)
    }

    fn displacement_with(&self, site: usize, cos: &[f64]) -> f64 {
        if site == 0 {
            return 0.0;
        }
        let s: f64 = self.gamma[site].iter().zip(cos).map(|(g, c)| g * c).sum();
        self.params.sigma() * (site as f64 - s)
    }

    /// All deviations at time `t`, sharing one evaluation of the cosines.
    pub fn displacements(&self, t: f64) -> Vec<f64> {
        let cos: Vec<f64> = self.omegas.iter().map(|w| (w * t).cos()).collect();
        (0..self.params.n())
            .map(|site| self.displacement_with(site, &cos))
            .collect()
    }

    /// Velocities `ẋ_site(t)` at time `t`.
    pub fn velocities(&self, t: f64) -> Vec<f64> {
        let sin: Vec<f64> = self.omegas.iter().map(|w| w * (w * t).sin()).collect();
        (0..self.params.n())
            .map(|site| {
                if site == 0 {
                    return 0.0;
                }
                let s: f64 = self.gamma[site].iter().zip(&sin).map(|(g, s)| g * s).sum();
                self.params.sigma() * s
            })
            .collect()
    }
}

/// Deviation `x_n(t)` of site `site` from its initial position.
pub fn exact_displacement(params: &ChainParams, site: usize, t: f64, conv: Convention) -> Result<f64> {
    check_site(params.n(), site)?;
    if t < 0.0 {
        return Err(ChainError::domain(format!("time must be non-negative, got {t}")));
    }
    if site == 0 {
        return Ok(0.0);
    }
    let n = params.n();
    let mut s = 0.0;
    for m in (1..=mode_count(n)).step_by(2) {
        let g = mode_weight(n, m, conv) * (PI * (site * m) as f64 / (2 * n - 1) as f64).sin();
        s += g * (raw_frequency(n, params.omega0(), m, conv) * t).cos();
    }
    Ok(params.sigma() * (site as f64 - s / (2 * n - 1) as f64))
}

/// Coefficients of the bond-window deviation
///
/// ```text
/// I(t) = σ⁻¹(x_{k+l} − x_k − σl) = −2/(2N−1) Σ a_m b_m cos(ω_m t)
/// a_m  = sin(πm/2) cos(πm/(4N−2)) sin(πml/(4N−2)) / sin²(πm/D)
/// b_m  = cos(πm(k + l/2)/(2N−1))
/// ```
///
/// Both vectors are indexed by `m − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCoefficients {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ExtensionCoefficients {
    pub fn new(n: usize, window: &AnalysisWindow, conv: Convention) -> Result<Self> {
        window.validate(n)?;
        let (k, l) = (window.k, window.l);
        let a = (1..=mode_count(n))
            .map(|m| mode_weight(n, m, conv) * (PI * (m * l) as f64 / (4 * n - 2) as f64).sin())
            .collect();
        let b = (1..=mode_count(n)).map(|m| b_coefficient(n, k, l, m)).collect();
        Ok(ExtensionCoefficients { n, k, l, a, b })
    }

    pub fn a(&self, m: usize) -> f64 {
        self.a[m - 1]
    }

    pub fn b(&self, m: usize) -> f64 {
        self.b[m - 1]
    }

    /// Cosine-sum weights `−2/(2N−1) a_m b_m`, indexed by `m − 1`.
    pub fn weights(&self) -> Vec<f64> {
        let scale = -2.0 / (2 * self.n - 1) as f64;
        self.a.iter().zip(&self.b).map(|(a, b)| scale * a * b).collect()
    }

    /// `2/(2N−1) Σ_{m ≤ upto} |a_m b_m|`.
    pub fn abs_sum(&self, upto: usize) -> f64 {
        let scale = 2.0 / (2 * self.n - 1) as f64;
        scale
            * self
                .a
                .iter()
                .zip(&self.b)
                .take(upto)
                .map(|(a, b)| (a * b).abs())
                .sum::<f64>()
    }

    /// Triangle-inequality bound on `|I(t)|` over all times.
    pub fn triangle_bound(&self) -> f64 {
        self.abs_sum(self.a.len())
    }
}

/// `b_m = cos(πm(k + l/2)/(2N−1))`, defined for any mode index.
pub fn b_coefficient(n: usize, k: usize, l: usize, m: usize) -> f64 {
    // k + l/2 = (2k + l)/2
    (PI * (m * (2 * k + l)) as f64 / (2 * (2 * n - 1)) as f64).cos()
}

pub fn extension_coefficients(n: usize, window: &AnalysisWindow, conv: Convention) -> Result<ExtensionCoefficients> {
    ExtensionCoefficients::new(n, window, conv)
}

/// `I_{N,k,l}(t)` evaluated from the `(a_m, b_m)` cosine sum.
pub fn extension_deviation(params: &ChainParams, window: &AnalysisWindow, t: f64, conv: Convention) -> Result<f64> {
    if t < 0.0 {
        return Err(ChainError::domain(format!("time must be non-negative, got {t}")));
    }
    let coeffs = ExtensionCoefficients::new(params.n(), window, conv)?;
    let modes = ModeData::new(params.n(), params.omega0(), conv)?;
    Ok(coeffs
        .weights()
        .iter()
        .zip(&modes.omegas)
        .map(|(w, om)| w * (om * t).cos())
        .sum())
}

/// `I_{N,k,l}(t)` evaluated as `σ⁻¹(x_{k+l} − x_k) − l` from the site
/// displacements. Requires `σ > 0`.
pub fn extension_deviation_from_displacements(
    params: &ChainParams,
    window: &AnalysisWindow,
    t: f64,
    conv: Convention,
) -> Result<f64> {
    window.validate(params.n())?;
    if params.sigma() <= 0.0 {
        return Err(ChainError::domain("displacement route needs sigma > 0"));
    }
    let right = exact_displacement(params, window.k + window.l, t, conv)?;
    let left = exact_displacement(params, window.k, t, conv)?;
    Ok((right - left) / params.sigma() - window.l as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const C: Convention = Convention::Corrected;
    const L: Convention = Convention::PaperLiteral;

    #[test]
    fn frequency_examples() {
        assert_eq!(mode_frequency(5, 1.0, 0, C).unwrap(), 0.0);
        assert_abs_diff_eq!(mode_frequency(2, 1.0, 1, C).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mode_frequency(5, 1.0, 9, C).unwrap(), 2.0, epsilon = 1e-15);
        assert!(mode_frequency(5, 1.0, 18, C).is_err());
        assert_abs_diff_eq!(
            mode_frequency(2, 1.0, 1, L).unwrap(),
            2.0 * (PI / 12.0).sin(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_coefficient(2, 1, 2, C).unwrap(), 0.0);
        assert_eq!(gamma_coefficient(2, 1, 2, L).unwrap(), 0.0);
        assert_abs_diff_eq!(gamma_coefficient(2, 1, 1, C).unwrap(), 3.0, epsilon = 1e-13);
        assert_eq!(gamma_coefficient(2, 0, 1, C).unwrap(), 0.0);
        assert!(gamma_coefficient(2, 2, 1, C).is_err());
        assert!(gamma_coefficient(2, 1, 3, C).is_err());
    }

    #[test]
    fn gamma_identity_examples() {
        assert!(gamma_identity_residual(2, 1, C).unwrap() <= 1e-12);
        assert_eq!(gamma_identity_residual(2, 0, C).unwrap(), 0.0);
        // 2 + √3 − 1
        let lit = gamma_identity_residual(2, 1, L).unwrap();
        assert_abs_diff_eq!(lit, 1.0 + 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn gamma_identity_holds_for_corrected() {
        for &n in &[2usize, 3, 5, 17, 64, 257] {
            for site in 0..n {
                let r = gamma_identity_residual(n, site, C).unwrap();
                assert!(r <= 1e-9 * (site.max(1) as f64), "N={n} n={site} residual {r}");
            }
        }
    }

    #[test]
    fn displacement_examples() {
        let p = ChainParams::with_sigma(2, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(exact_displacement(&p, 0, 3.7, C).unwrap(), 0.0);
        assert_abs_diff_eq!(exact_displacement(&p, 1, 0.0, C).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(exact_displacement(&p, 1, PI, C).unwrap(), 2.0, epsilon = 1e-13);

        let p = ChainParams::with_sigma(17, 1.3, 0.2, 1.0).unwrap();
        let sol = SpectralSolution::new(p, C);
        for site in 0..17 {
            assert_abs_diff_eq!(exact_displacement(&p, site, 0.0, C).unwrap(), 0.0, epsilon = 1e-11);
            assert_abs_diff_eq!(
                sol.displacement(site, 2.5),
                exact_displacement(&p, site, 2.5, C).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn coefficient_examples() {
        let w = AnalysisWindow::new(2, 0, 1, 0.25).unwrap();
        let c = extension_coefficients(2, &w, C).unwrap();
        assert_abs_diff_eq!(c.a(1), 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.b(1), 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_eq!(c.a(2), 0.0);
        assert_abs_diff_eq!(-(2.0 / 3.0) * c.a(1) * c.b(1), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.triangle_bound(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn deviation_examples() {
        let p = ChainParams::with_sigma(2, 1.0, 1.0, 0.5).unwrap();
        let w = AnalysisWindow::new(2, 0, 1, 0.25).unwrap();
        assert_abs_diff_eq!(extension_deviation(&p, &w, 0.0, C).unwrap(), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(extension_deviation(&p, &w, PI, C).unwrap(), 1.0, epsilon = 1e-14);

        let p = ChainParams::with_sigma(40, 1.0, 0.3, 1.0).unwrap();
        let w = AnalysisWindow::new(40, 7, 5, 0.25).unwrap();
        assert_abs_diff_eq!(extension_deviation(&p, &w, 0.0, C).unwrap(), -5.0, epsilon = 1e-10);
    }

    #[test]
    fn invalid_window_is_rejected() {
        let w = AnalysisWindow {
            k: 0,
            l: 10,
            epsilon: 0.25,
        };
        assert!(extension_coefficients(10, &w, C).is_err());
    }
}
