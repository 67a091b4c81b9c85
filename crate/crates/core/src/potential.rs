//! Nearest-neighbour pair potentials.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};

/// Two-exponent pair potential `V(r) = −c_n r^{−n} + c_m r^{−m}` with
/// `0 < n < m`. Lennard-Jones is `(n, m) = (6, 12)`.
///
/// The landmarks are cached at construction: the minimum `a`
/// (`V'(a) = 0`), the curvature `κ = V''(a)`, the well depth `V(a)` and the
/// inflection point `b > a` where `V''(b) = 0` and `V'` peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiePotential {
    pub n: f64,
    pub m: f64,
    pub c_n: f64,
    pub c_m: f64,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub depth: f64,
}

impl MiePotential {
    pub fn new(n: f64, m: f64, c_n: f64, c_m: f64) -> Result<Self> {
        if !(n > 0.0 && n < m && m.is_finite()) {
            return Err(ChainError::domain(format!(
                "Mie exponents need 0 < n < m, got n={n} m={m}"
            )));
        }
        if !(c_n > 0.0 && c_m > 0.0) {
            return Err(ChainError::domain("Mie coefficients must be positive"));
        }
        let a = (m * c_m / (n * c_n)).powf(1.0 / (m - n));
        let mut pot = MiePotential {
            n,
            m,
            c_n,
            c_m,
            a,
            b: f64::NAN,
            kappa: 0.0,
            depth: 0.0,
        };
        pot.kappa = pot.curvature(a);
        pot.depth = pot.value(a);
        pot.b = find_inflection(&pot);
        Ok(pot)
    }

    pub fn value(&self, r: f64) -> f64 {
        -self.c_n * r.powf(-self.n) + self.c_m * r.powf(-self.m)
    }

    /// `V'(r)`; positive (attractive tension) for `r > a`.
    pub fn derivative(&self, r: f64) -> f64 {
        self.n * self.c_n * r.powf(-self.n - 1.0) - self.m * self.c_m * r.powf(-self.m - 1.0)
    }

    pub fn curvature(&self, r: f64) -> f64 {
        -self.n * (self.n + 1.0) * self.c_n * r.powf(-self.n - 2.0)
            + self.m * (self.m + 1.0) * self.c_m * r.powf(-self.m - 2.0)
    }

    /// Largest tension the bond can sustain, `V'(b)`.
    pub fn max_tension(&self) -> f64 {
        self.derivative(self.b)
    }
}

/// Root of `V''` to the right of the minimum, by bisection.
fn find_inflection(pot: &MiePotential) -> f64 {
    let mut lo = pot.a;
    let mut hi = 2.0 * pot.a;
    while pot.curvature(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pot.curvature(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pair potential of one bond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `V(r) = κ/2 (r − a)²`.
    Quadratic {
        kappa: f64,
        a: f64,
    },
    Mie(MiePotential),
}

impl Potential {
    pub fn quadratic(kappa: f64, a: f64) -> Result<Self> {
        if !(kappa > 0.0 && a > 0.0) {
            return Err(ChainError::domain(format!(
                "quadratic potential needs kappa > 0 and a > 0, got {kappa}, {a}"
            )));
        }
        Ok(Potential::Quadratic { kappa, a })
    }

    /// Equilibrium bond length.
    pub fn rest_length(&self) -> f64 {
        match self {
            Potential::Quadratic { a, .. } => *a,
            Potential::Mie(p) => p.a,
        }
    }

    /// Curvature at the minimum.
    pub fn stiffness(&self) -> f64 {
        match self {
            Potential::Quadratic { kappa, .. } => *kappa,
            Potential::Mie(p) => p.kappa,
        }
    }

    /// Energy of a bond stretched by `dx` beyond its rest length.
    pub fn energy(&self, dx: f64) -> f64 {
        match self {
            Potential::Quadratic { kappa, .. } => 0.5 * kappa * dx * dx,
            Potential::Mie(p) => p.value(p.a + dx),
        }
    }

    /// Tension `V'` of a bond stretched by `dx`.
    #[inline]
    pub fn tension(&self, dx: f64) -> f64 {
        match self {
            Potential::Quadratic { kappa, .. } => kappa * dx,
            Potential::Mie(p) => p.derivative(p.a + dx),
        }
    }

    #[inline]
    pub fn curvature(&self, dx: f64) -> f64 {
        match self {
            Potential::Quadratic { kappa, .. } => *kappa,
            Potential::Mie(p) => p.curvature(p.a + dx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lennard_jones_landmarks() {
        // c_6 = 1/36, c_12 = 1/72 puts the minimum at 1 with unit curvature
        let p = MiePotential::new(6.0, 12.0, 1.0 / 36.0, 1.0 / 72.0).unwrap();
        assert_relative_eq!(p.a, 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.kappa, 1.0, max_relative = 1e-12);
        assert_relative_eq!(p.depth, -1.0 / 72.0, max_relative = 1e-12);
        assert_relative_eq!(p.b, (13.0f64 / 7.0).powf(1.0 / 6.0), max_relative = 1e-12);
        assert!(p.curvature(p.b).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(MiePotential::new(12.0, 6.0, 1.0, 1.0).is_err());
        assert!(MiePotential::new(6.0, 6.0, 1.0, 1.0).is_err());
        assert!(MiePotential::new(6.0, 12.0, -1.0, 1.0).is_err());
        assert!(Potential::quadratic(0.0, 1.0).is_err());
    }

    #[test]
    fn quadratic_tension_is_linear() {
        let q = Potential::quadratic(3.0, 0.5).unwrap();
        assert_eq!(q.tension(0.25), 0.75);
        assert_eq!(q.energy(0.5), 0.375);
        assert_eq!(q.rest_length(), 0.5);
    }
}
