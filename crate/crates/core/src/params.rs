//! Physical parameters of the pinned chain and the index windows used to
//! measure bond extensions.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};

/// Which ring size enters the dispersion relation and the `1/sin²` factor of
/// the mode coefficients.
///
/// `Corrected` uses the eigenfrequencies of the `4N-2` site ring,
/// `2ω₀ sin(πm/(4N-2))`. `PaperLiteral` keeps the `8N-4` denominator as it is
/// usually printed; it does not solve the equations of motion and is kept
/// only to document the discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    Corrected,
    PaperLiteral,
}

impl Convention {
    /// Denominator `D` in `sin(πm/D)` for a chain of `n` particles.
    pub fn denominator(self, n: usize) -> f64 {
        match self {
            Convention::Corrected => (4 * n - 2) as f64,
            Convention::PaperLiteral => (8 * n - 4) as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Corrected => "corrected",
            Convention::PaperLiteral => "paper-literal",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Convention::Corrected),
            "paper-literal" | "literal" => Ok(Convention::PaperLiteral),
            other => Err(ChainError::domain(format!("unknown convention '{other}'"))),
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A chain of `n` unit cells with the first particle pinned at the origin and
/// a constant force on the last one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    n: usize,
    omega0: f64,
    f0: f64,
    a: f64,
    sigma: f64,
}

impl ChainParams {
    /// `omega0` is the proper frequency `√(κ/mass)`, `f0` the force per unit
    /// mass and `a` the lattice spacing.
    pub fn new(n: usize, omega0: f64, f0: f64, a: f64) -> Result<Self> {
        if n < 2 {
            return Err(ChainError::domain(format!("need at least 2 particles, got {n}")));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(ChainError::domain(format!("omega0 must be positive, got {omega0}")));
        }
        if !(f0 >= 0.0 && f0.is_finite()) {
            return Err(ChainError::domain(format!("f0 must be non-negative, got {f0}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(ChainError::domain(format!("spacing must be positive, got {a}")));
        }
        Ok(ChainParams {
            n,
            omega0,
            f0,
            a,
            sigma: f0 / (omega0 * omega0),
        })
    }

    /// Builds the parameters from stiffness, particle mass and applied force.
    pub fn from_physical(n: usize, kappa: f64, mass: f64, force: f64, a: f64) -> Result<Self> {
        if !(kappa > 0.0) || !(mass > 0.0) {
            return Err(ChainError::domain("stiffness and mass must be positive"));
        }
        ChainParams::new(n, (kappa / mass).sqrt(), force / mass, a)
    }

    /// Picks `f0` so that the driving ratio is `sigma`.
    pub fn with_sigma(n: usize, omega0: f64, sigma: f64, a: f64) -> Result<Self> {
        ChainParams::new(n, omega0, sigma * omega0 * omega0, a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn spacing(&self) -> f64 {
        self.a
    }

    /// Static elongation per bond, `f0 / ω₀²`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// The bond window `[k, k+l]` together with the margin `ε` that keeps it away
/// from the driven end: `0 ≤ k < k+l ≤ (1-ε)N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    pub k: usize,
    pub l: usize,
    pub epsilon: f64,
}

impl AnalysisWindow {
    pub fn new(n: usize, k: usize, l: usize, epsilon: f64) -> Result<Self> {
        let w = AnalysisWindow { k, l, epsilon };
        w.validate(n)?;
        Ok(w)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ChainError::domain(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.l == 0 {
            return Err(ChainError::domain("window span l must be at least 1"));
        }
        let right = self.k + self.l;
        if right > n - 1 || right as f64 > (1.0 - self.epsilon) * n as f64 {
            return Err(ChainError::domain(format!(
                "window k={} l={} violates k+l <= (1-eps)N = {} for N={n}",
                self.k,
                self.l,
                (1.0 - self.epsilon) * n as f64
            )));
        }
        Ok(())
    }

    /// Largest admissible right end `k+l` for `n` particles.
    pub fn max_right(n: usize, epsilon: f64) -> usize {
        (((1.0 - epsilon) * n as f64).floor() as usize).min(n - 1)
    }
}
