//! Totients and brute-force integer relations among mode frequencies.
//!
//! The degree of the root of unity `e^{2πi/n}` is `φ(n)`, and
//! `liminf φ(n) ln ln n / n = e^{−γ}`. Together they bound how many of the
//! ratios `ω_m / 2ω₀ = sin(πm/(4N−2))` can satisfy an integer relation.
//! This module checks the consequences numerically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::params::Convention;
use crate::spectral::mode_count;

/// `e^{−γ}`.
pub const EXP_MINUS_EULER_GAMMA: f64 = 0.561_459_483_566_885_2;

/// Default refusal threshold for the exhaustive relation search.
pub const DEFAULT_SEARCH_LIMIT: f64 = 1e8;

/// Euler's totient by trial division.
pub fn euler_totient(n: u64) -> Result<u64> {
    if n < 1 {
        return Err(ChainError::domain("totient needs n >= 1"));
    }
    let mut rest = n;
    let mut phi = n;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if rest > 1 {
        phi -= phi / rest;
    }
    Ok(phi)
}

/// Degree of `e^{2πi/n}` over the rationals.
pub fn algebraic_degree_of_root_of_unity(n: u64) -> Result<u64> {
    euler_totient(n)
}

/// `φ(0..=limit)` by a linear sieve (`φ(0)` is stored as 0).
pub fn totient_sieve(limit: usize) -> Vec<u32> {
    let mut phi = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    if limit >= 1 {
        phi[1] = 1;
    }
    for i in 2..=limit {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if ip > limit {
                break;
            }
            if i % p as usize == 0 {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    phi
}

/// One record of the totient scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotientRecord {
    pub n: u64,
    pub phi: u64,
    /// `φ(n) / n`.
    pub ratio: f64,
    /// `φ(n) ln ln n / n`.
    pub value: f64,
}

/// Scans `2 ≤ n ≤ limit` and returns every `n` at which `φ(n)/n` reaches a
/// new running minimum, with the weighted value `φ(n) ln ln n / n` there.
///
/// The records fall on the primorials, and along them the weighted value
/// climbs towards `e^{−γ}` from below.
pub fn totient_liminf_scan(limit: usize) -> Result<Vec<TotientRecord>> {
    if limit < 10 {
        return Err(ChainError::domain(format!("scan limit must be >= 10, got {limit}")));
    }
    let phi = totient_sieve(limit);
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for (n, &p) in phi.iter().enumerate().skip(2) {
        let ratio = p as f64 / n as f64;
        if ratio < best {
            best = ratio;
            out.push(TotientRecord {
                n: n as u64,
                phi: p as u64,
                ratio,
                value: ratio * (n as f64).ln().ln(),
            });
        }
    }
    Ok(out)
}

/// Primorials `1, 2, 6, 30, …` not exceeding `limit`.
pub fn primorials(limit: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    let mut acc = 1u64;
    let mut p = 1u64;
    loop {
        p += 1;
        if (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            continue;
        }
        match acc.checked_mul(p) {
            Some(next) if next <= limit => {
                acc = next;
                out.push(acc);
            }
            _ => return out,
        }
    }
}

/// `ω_m / 2ω₀ = sin(πm/D)` for `m = 1..=M`.
pub fn frequency_ratios(n: usize, cutoff: usize, conv: Convention) -> Result<Vec<f64>> {
    if n < 2 || cutoff == 0 || cutoff > mode_count(n) {
        return Err(ChainError::domain(format!(
            "need 1 <= M <= 2N-2, got M={cutoff} for N={n}"
        )));
    }
    Ok((1..=cutoff)
        .map(|m| (PI * m as f64 / conv.denominator(n)).sin())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResult {
    pub found: bool,
    /// `(a₀, a₁, …, a_M)` with `Σ_{m≥1} a_m v_m = a₀`; empty when not found.
    pub coefficients: Vec<i64>,
    pub residual: f64,
}

/// Exhaustive search for integers `|a_i| ≤ bound`, not all of `a_1..a_M`
/// zero, with `|Σ a_m v_m − a₀| ≤ tol`.
///
/// Relations are normalised so that `a₀ ≥ 0`, and when `a₀ = 0` the first
/// non-zero `a_m` is positive. Candidates are visited in lexicographic order
/// of `(a₀, a₁, …, a_M)` and the first hit is returned.
pub fn integer_relation_search(values: &[f64], bound: i64, tol: f64) -> Result<RelationResult> {
    integer_relation_search_limited(values, bound, tol, DEFAULT_SEARCH_LIMIT)
}

pub fn integer_relation_search_limited(values: &[f64], bound: i64, tol: f64, limit: f64) -> Result<RelationResult> {
    if values.is_empty() {
        return Err(ChainError::domain("no values to relate"));
    }
    if bound < 1 || !(tol > 0.0) {
        return Err(ChainError::domain("need bound >= 1 and tol > 0"));
    }
    let size = ((2 * bound + 1) as f64).powi(values.len() as i32 + 1);
    if size > limit {
        return Err(ChainError::SearchTooLarge { size, limit });
    }
    let dim = values.len();
    let mut coeffs = vec![-bound; dim];
    for a0 in 0..=bound {
        coeffs.iter_mut().for_each(|c| *c = -bound);
        loop {
            let leading = coeffs.iter().find(|&&c| c != 0);
            let admissible = match leading {
                None => false,
                Some(&c) => a0 > 0 || c > 0,
            };
            if admissible {
                let s: f64 = coeffs.iter().zip(values).map(|(&c, v)| c as f64 * v).sum();
                let residual = (s - a0 as f64).abs();
                if residual <= tol {
                    let mut out = Vec::with_capacity(dim + 1);
                    out.push(a0);
                    out.extend_from_slice(&coeffs);
                    return Ok(RelationResult {
                        found: true,
                        coefficients: out,
                        residual,
                    });
                }
            }
            if !odometer(&mut coeffs, bound) {
                break;
            }
        }
    }
    Ok(RelationResult {
        found: false,
        coefficients: Vec::new(),
        residual: f64::NAN,
    })
}

/// Advances the last coordinate fastest; false once every vector was visited.
fn odometer(coeffs: &mut [i64], bound: i64) -> bool {
    for c in coeffs.iter_mut().rev() {
        if *c < bound {
            *c += 1;
            return true;
        }
        *c = -bound;
    }
    false
}

/// `|Σ a_m v_m − a₀|` with error-free (two-sum/two-product) accumulation.
pub fn compensated_residual(values: &[f64], coefficients: &[i64]) -> f64 {
    let (mut hi, mut lo) = (-(coefficients[0] as f64), 0.0f64);
    for (&c, &v) in coefficients[1..].iter().zip(values) {
        let p = c as f64 * v;
        let p_err = (c as f64).mul_add(v, -p);
        let s = hi + p;
        let bb = s - hi;
        let s_err = (hi - (s - bb)) + (p - bb);
        hi = s;
        lo += s_err + p_err;
    }
    (hi + lo).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IndependenceVerdict {
    NoRelationFound,
    Relation { coefficients: Vec<i64>, residual: f64 },
}

impl IndependenceVerdict {
    pub fn independent(&self) -> bool {
        matches!(self, IndependenceVerdict::NoRelationFound)
    }
}

/// Searches for a small integer relation among the first `M` frequency
/// ratios of an `N`-particle chain.
pub fn rational_independence_check(
    n: usize,
    cutoff: usize,
    bound: i64,
    tol: f64,
    conv: Convention,
) -> Result<IndependenceVerdict> {
    let values = frequency_ratios(n, cutoff, conv)?;
    let r = integer_relation_search(&values, bound, tol)?;
    Ok(if r.found {
        IndependenceVerdict::Relation {
            coefficients: r.coefficients,
            residual: r.residual,
        }
    } else {
        IndependenceVerdict::NoRelationFound
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn totient_examples() {
        assert_eq!(euler_totient(1).unwrap(), 1);
        assert_eq!(euler_totient(12).unwrap(), 4);
        assert_eq!(
            euler_totient(12).unwrap(),
            (1..=12).filter(|&k| gcd(k, 12) == 1).count() as u64
        );
        assert!(euler_totient(0).is_err());
        for p in [
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
        ] {
            assert_eq!(euler_totient(p).unwrap(), p - 1);
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        let phi = totient_sieve(2000);
        for n in 1..=2000u64 {
            assert_eq!(phi[n as usize] as u64, euler_totient(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn primorial_list() {
        assert_eq!(primorials(1_000_000), vec![1, 2, 6, 30, 210, 2310, 30030, 510510]);
    }

    #[test]
    fn scan_value_at_30030() {
        let recs = totient_liminf_scan(40_000).unwrap();
        let r = recs.iter().find(|r| r.n == 30030).unwrap();
        assert!((r.value - 0.4475).abs() < 1e-4);
        assert!((r.ratio - 0.191808).abs() < 1e-6);
        assert!(totient_liminf_scan(5).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(
            frequency_ratios(2, 1, Convention::Corrected).unwrap(),
            vec![(PI / 6.0).sin()]
        );
        let lit = frequency_ratios(2, 1, Convention::PaperLiteral).unwrap();
        assert!((lit[0] - 0.258819).abs() < 1e-6);
        let v = frequency_ratios(40, 78, Convention::Corrected).unwrap();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(frequency_ratios(2, 3, Convention::Corrected).is_err());
    }

    #[test]
    fn relation_examples() {
        let r = integer_relation_search(&[0.5], 2, 1e-12).unwrap();
        assert!(r.found);
        assert_eq!(r.coefficients, vec![1, 2]);

        let v = [(PI / 10.0).sin(), (3.0 * PI / 10.0).sin()];
        let r = integer_relation_search(&v, 2, 1e-12).unwrap();
        assert_eq!(r.coefficients, vec![1, -2, 2]);

        // sin(π/14) − sin(3π/14) + sin(5π/14) = 1/2
        let v = [(PI / 14.0).sin(), (3.0 * PI / 14.0).sin(), (5.0 * PI / 14.0).sin()];
        let r = integer_relation_search(&v, 2, 1e-12).unwrap();
        assert_eq!(r.coefficients, vec![1, 2, -2, 2]);

        let v = frequency_ratios(8, 3, Convention::Corrected).unwrap();
        assert!(!integer_relation_search(&v, 5, 1e-10).unwrap().found);
    }

    #[test]
    fn oversized_search_is_refused() {
        let v = vec![0.1; 8];
        assert!(matches!(
            integer_relation_search(&v, 10, 1e-10),
            Err(ChainError::SearchTooLarge { .. })
        ));
        assert!(integer_relation_search(&[], 1, 1e-10).is_err());
    }

    #[test]
    fn independence_examples() {
        let c = Convention::Corrected;
        match rational_independence_check(2, 1, 2, 1e-10, c).unwrap() {
            IndependenceVerdict::Relation { coefficients, residual } => {
                assert_eq!(coefficients, vec![1, 2]);
                assert!(residual <= 1e-15);
            }
            other => panic!("expected a relation, got {other:?}"),
        }
        assert!(rational_independence_check(8, 3, 5, 1e-10, c).unwrap().independent());
        assert!(rational_independence_check(2, 1, 1, 1e-10, c).unwrap().independent());
    }
}
