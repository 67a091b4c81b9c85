//! Static fixed points of the driven chain.
//!
//! Every bond of a static chain carries the same tension `f`, so a fixed
//! point exists iff `V'(h) = f` has a root with `a ≤ h ≤ b`. For a Mie
//! potential `V'` increases on `(a, b]`, peaks at the inflection point `b`
//! and decays afterwards, so the critical force is `V'(b)`.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::potential::{MiePotential, Potential};

/// Mie potential with its minimum at `a = 1/N` and curvature `κ` there:
/// `c_m = κ N^{−2−m} / (m(m−n))`, `c_n = κ N^{−2−n} / (n(m−n))`.
pub fn mie_fit_from_curvature(kappa: f64, n_particles: usize, n: f64, m: f64) -> Result<MiePotential> {
    if !(n > 0.0 && n < m) {
        return Err(ChainError::domain(format!(
            "Mie exponents need 0 < n < m, got n={n} m={m}"
        )));
    }
    if !(kappa > 0.0) || n_particles == 0 {
        return Err(ChainError::domain("curvature and particle count must be positive"));
    }
    let big_n = n_particles as f64;
    let c_m = kappa / (m * (m - n)) * big_n.powf(-2.0 - m);
    let c_n = kappa / (n * (m - n)) * big_n.powf(-2.0 - n);
    let pot = MiePotential::new(n, m, c_n, c_m)?;

    // the fit must reproduce its own landmarks
    let a = 1.0 / big_n;
    let tension_scale = n * c_n * a.powf(-n - 1.0);
    if (pot.a - a).abs() > 1e-10 * a
        || pot.derivative(a).abs() > 1e-10 * tension_scale
        || (pot.curvature(a) - kappa).abs() > 1e-10 * kappa
    {
        return Err(ChainError::domain("Mie fit failed its landmark checks"));
    }
    Ok(pot)
}

/// Well depth predicted by the fit, `V(a) = −κ/(mn) N⁻²`.
pub fn fitted_depth(kappa: f64, n_particles: usize, n: f64, m: f64) -> f64 {
    -kappa / (m * n) / (n_particles as f64).powi(2)
}

/// Inflection point `b > a` with `V''(b) = 0`, found numerically.
pub fn inflection_point(pot: &MiePotential) -> f64 {
    pot.b
}

/// The printed closed form
/// `(ρ^{−(n−1)/(m−n)} − ρ^{−(m−1)/(m−n)}) / (m−n)` with `ρ = (m+1)/(n+1)`.
pub fn printed_critical_ratio(n: f64, m: f64) -> f64 {
    let rho = (m + 1.0) / (n + 1.0);
    (rho.powf(-(n - 1.0) / (m - n)) - rho.powf(-(m - 1.0) / (m - n))) / (m - n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRatio {
    /// `C = N V'(b) / κ`, the authoritative value.
    pub value: f64,
    pub printed: f64,
    /// Set when the printed form differs from `value` by more than 1e-6
    /// relative.
    pub mismatch: bool,
}

/// Critical ratio `C(n, m)` such that a fixed point exists iff
/// `f/κ ≤ C/N`. The value is N-independent, so it is evaluated at `N = 1`.
pub fn critical_force_ratio(n: f64, m: f64) -> Result<CriticalRatio> {
    let pot = mie_fit_from_curvature(1.0, 1, n, m)?;
    let value = pot.max_tension() / pot.kappa;
    let printed = printed_critical_ratio(n, m);
    Ok(CriticalRatio {
        value,
        printed,
        mismatch: (value - printed).abs() > 1e-6 * value.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixedPoint {
    /// Uniform bond length `h` of the static chain.
    Gap {
        h: f64,
    },
    NoFixedPoint,
}

impl FixedPoint {
    pub fn gap(&self) -> Option<f64> {
        match self {
            FixedPoint::Gap { h } => Some(*h),
            FixedPoint::NoFixedPoint => None,
        }
    }
}

/// Solves `V'(h) = f` on `[a, b]`.
pub fn static_fixed_point(pot: &Potential, force: f64) -> Result<FixedPoint> {
    if !(force >= 0.0) {
        return Err(ChainError::domain(format!("force must be non-negative, got {force}")));
    }
    match pot {
        Potential::Quadratic { kappa, a } => Ok(FixedPoint::Gap { h: a + force / kappa }),
        Potential::Mie(p) => Ok(mie_fixed_point(p, force)),
    }
}

fn mie_fixed_point(p: &MiePotential, force: f64) -> FixedPoint {
    if force == 0.0 {
        return FixedPoint::Gap { h: p.a };
    }
    let peak = p.max_tension();
    // a force equal to the peak up to rounding sits exactly on b
    if force > peak * (1.0 + 1e-12) {
        return FixedPoint::NoFixedPoint;
    }
    if force >= peak {
        return FixedPoint::Gap { h: p.b };
    }
    let (mut lo, mut hi) = (p.a, p.b);
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.derivative(mid) < force {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    FixedPoint::Gap { h: 0.5 * (lo + hi) }
}
