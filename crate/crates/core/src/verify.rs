//! Self-check suites run by the `verify` command.
//!
//! Each suite is a list of quick invariant checks. The report renders as
//! TAP: `ok`/`not ok` lines, with checks that are known to fail under the
//! paper-literal dispersion marked `# TODO expected failure`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::extremal::{sup_inf_extension, torus_partial_sum_bound};
use crate::integrator::{circle_equivalence_error, spectral_vs_ode_error};
use crate::number_theory::{euler_totient, integer_relation_search, primorials, totient_liminf_scan};
use crate::params::{AnalysisWindow, ChainParams, Convention};
use crate::phase::{
    critical_force_ratio, phase_sweep, static_fixed_point, Classification, ScalingFamily, SweepOptions,
};
use crate::potential::Potential;
use crate::spectral::{
    b_coefficient, exact_displacement, extension_deviation, extension_deviation_from_displacements,
    gamma_identity_residual, mode_count, ExtensionCoefficients,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ChainCore,
    Integrator,
    Extremal,
    Phase,
    NumberTheory,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["chain-core", "integrator", "extremal", "phase", "number-theory", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ChainCore => "chain-core",
            Suite::Integrator => "integrator",
            Suite::Extremal => "extremal",
            Suite::Phase => "phase",
            Suite::NumberTheory => "number-theory",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain-core" => Ok(Suite::ChainCore),
            "integrator" => Ok(Suite::Integrator),
            "extremal" => Ok(Suite::Extremal),
            "phase" => Ok(Suite::Phase),
            "number-theory" => Ok(Suite::NumberTheory),
            "all" => Ok(Suite::All),
            other => Err(ChainError::domain(format!(
                "unknown suite '{other}' (expected one of {})",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    /// Failed, as documented for the selected convention.
    ExpectedFail,
    /// Was documented to fail but passed.
    UnexpectedPass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub convention: Convention,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    /// True unless some check failed without being expected to.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.checks.iter().filter(|c| c.outcome == outcome).count()
    }

    pub fn to_tap(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "TAP version 13");
        let _ = writeln!(s, "1..{}", self.checks.len());
        for (i, c) in self.checks.iter().enumerate() {
            let (status, directive) = match c.outcome {
                Outcome::Pass => ("ok", ""),
                Outcome::Fail => ("not ok", ""),
                Outcome::ExpectedFail => ("not ok", " # TODO expected failure"),
                Outcome::UnexpectedPass => ("ok", " # TODO unexpectedly passed"),
            };
            let _ = writeln!(s, "{status} {} - {}: {}{directive}", i + 1, c.suite.name(), c.name);
            let _ = writeln!(s, "  # {}", c.detail);
        }
        let _ = writeln!(
            s,
            "# suite {} convention {}: {} pass, {} fail, {} expected-fail",
            self.suite.name(),
            self.convention.name(),
            self.count(Outcome::Pass) + self.count(Outcome::UnexpectedPass),
            self.count(Outcome::Fail),
            self.count(Outcome::ExpectedFail)
        );
        s
    }
}

struct Collector {
    suite: Suite,
    conv: Convention,
    checks: Vec<Check>,
}

impl Collector {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.record(name, ok, false, detail);
    }

    /// A check documented to fail under the paper-literal convention.
    fn check_convention(&mut self, name: &str, ok: bool, detail: String) {
        self.record(name, ok, self.conv == Convention::PaperLiteral, detail);
    }

    fn record(&mut self, name: &str, ok: bool, expect_fail: bool, detail: String) {
        let outcome = match (ok, expect_fail) {
            (true, false) => Outcome::Pass,
            (false, false) => Outcome::Fail,
            (false, true) => Outcome::ExpectedFail,
            (true, true) => Outcome::UnexpectedPass,
        };
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            outcome,
            detail,
        });
    }
}

/// Runs one suite (or all of them) under the given convention.
pub fn run_suite(suite: Suite, conv: Convention) -> Result<VerifyReport> {
    let parts: &[Suite] = match suite {
        Suite::All => &[
            Suite::ChainCore,
            Suite::Integrator,
            Suite::Extremal,
            Suite::Phase,
            Suite::NumberTheory,
        ],
        _ => std::slice::from_ref(&suite),
    };
    let mut checks = Vec::new();
    for &part in parts {
        let mut c = Collector {
            suite: part,
            conv,
            checks: Vec::new(),
        };
        match part {
            Suite::ChainCore => chain_core(&mut c)?,
            Suite::Integrator => integrator(&mut c)?,
            Suite::Extremal => extremal(&mut c)?,
            Suite::Phase => phase(&mut c)?,
            Suite::NumberTheory => number_theory(&mut c)?,
            Suite::All => unreachable!(),
        }
        checks.extend(c.checks);
    }
    Ok(VerifyReport {
        suite,
        convention: conv,
        checks,
    })
}

fn chain_core(c: &mut Collector) -> Result<()> {
    let conv = c.conv;

    let mut worst = 0.0f64;
    for &n in &[2usize, 3, 5, 17, 64] {
        for site in 0..n {
            worst = worst.max(gamma_identity_residual(n, site, conv)? / (site.max(1) as f64));
        }
    }
    c.check_convention(
        "gamma-sum identity",
        worst <= 1e-9,
        format!("max residual / max(1,n) = {worst:.3e}"),
    );

    let params = ChainParams::new(2, 1.0, 1.0, 1.0)?;
    let mut err = 0.0f64;
    for i in 0..=1000 {
        let t = i as f64 * 0.1;
        err = err.max((exact_displacement(&params, 1, t, Convention::Corrected)? - (1.0 - t.cos())).abs());
    }
    // oracle for the default dispersion; the literal one is covered by the identity above
    c.check("two-particle closed form", err <= 1e-10, format!("max error {err:.3e}"));

    let mut even = 0.0f64;
    let mut bmax = 0.0f64;
    for &n in &[5usize, 16, 33] {
        for l in 1..n {
            let w = AnalysisWindow {
                k: 0,
                l,
                epsilon: 0.5 / n as f64,
            };
            let co = ExtensionCoefficients::new(n, &w, conv)?;
            for m in (2..=mode_count(n)).step_by(2) {
                even = even.max(co.a(m).abs());
            }
            for k in 0..n - l {
                for m in 1..=mode_count(n) {
                    bmax = bmax.max(b_coefficient(n, k, l, m).abs());
                }
            }
        }
    }
    c.check(
        "even modes vanish",
        even == 0.0,
        format!("max |a_m| over even m = {even:e}"),
    );
    c.check("|b_m| <= 1", bmax <= 1.0, format!("max |b_m| = {bmax:.17}"));

    let params = ChainParams::new(12, 1.3, 0.7, 1.0)?;
    let w = AnalysisWindow::new(12, 2, 5, 0.1)?;
    let mut diff = 0.0f64;
    for i in 0..50 {
        let t = 0.37 * i as f64;
        let direct = extension_deviation(&params, &w, t, conv)?;
        let via = extension_deviation_from_displacements(&params, &w, t, conv)?;
        diff = diff.max((direct - via).abs());
    }
    c.check(
        "extension deviation two-path agreement",
        diff <= 1e-10,
        format!("max difference {diff:.3e}"),
    );
    Ok(())
}

fn integrator(c: &mut Collector) -> Result<()> {
    let mut worst = 0.0f64;
    for &n in &[2usize, 5] {
        let params = ChainParams::new(n, 1.0, 1.0, 1.0)?;
        worst = worst.max(spectral_vs_ode_error(&params, 20.0, 1e-3, c.conv)?);
    }
    c.check_convention(
        "spectral vs ODE cross-check",
        worst <= 1e-5,
        format!("max normalised error {worst:.3e}"),
    );

    let params = ChainParams::new(5, 1.0, 1.0, 1.0)?;
    let r = circle_equivalence_error(&params, 20.0, 1e-3)?;
    c.check(
        "ring equals pinned line",
        r.max_error <= 1e-6 && r.mirror_residual <= 1e-9 && r.odd_residual <= 1e-9,
        format!(
            "error {:.3e}, mirror {:.3e}, odd {:.3e}",
            r.max_error, r.mirror_residual, r.odd_residual
        ),
    );
    Ok(())
}

fn extremal(c: &mut Collector) -> Result<()> {
    let conv = c.conv;
    let params = ChainParams::with_sigma(32, 1.0, 1.0, 1.0)?;
    let mut ok = true;
    let mut detail = String::new();
    for &(k, l) in &[(0usize, 1usize), (5, 4), (10, 8)] {
        let w = AnalysisWindow::new(32, k, l, 0.25)?;
        let r = sup_inf_extension(&params, &w, 5, conv)?;
        ok &= r.inf_lower <= r.inf_upper && r.inf_upper <= r.sup_lower && r.sup_lower <= r.sup_upper;
        let _ = write!(detail, "l={l}: {:.4} <= {:.4}; ", r.sup_lower, r.sup_upper);
    }
    c.check(
        "sampled extremes inside the triangle bound",
        ok,
        detail.trim_end().to_string(),
    );

    let two = ChainParams::with_sigma(2, 1.0, 1.0, 1.0)?;
    let r = sup_inf_extension(&two, &AnalysisWindow::new(2, 0, 1, 0.25)?, 5, Convention::Corrected)?;
    c.check(
        "two-particle sup",
        (r.sup_lower - 1.0).abs() <= 1e-9,
        format!("sup I = {:.12}", r.sup_lower),
    );

    let w = AnalysisWindow::new(8, 0, 1, 0.1)?;
    let bound = torus_partial_sum_bound(8, &w, 3, conv)?;
    let r = sup_inf_extension(&ChainParams::with_sigma(8, 1.0, 1.0, 1.0)?, &w, 50, conv)?;
    c.check(
        "sampled sup below head + tail",
        r.sup_lower <= bound.upper(),
        format!("sup {:.6} <= {:.6}", r.sup_lower, bound.upper()),
    );
    Ok(())
}

fn phase(c: &mut Collector) -> Result<()> {
    let cr = critical_force_ratio(6.0, 12.0)?;
    c.check(
        "Lennard-Jones critical ratio",
        (cr.value - 0.03737).abs() <= 1e-4 && cr.mismatch,
        format!("C = {:.6}, printed form {:.6}", cr.value, cr.printed),
    );

    let q = Potential::quadratic(2.0, 0.1)?;
    let h = static_fixed_point(&q, 0.3)?.gap();
    c.check(
        "quadratic fixed point h = a + sigma",
        h == Some(0.1 + 0.15),
        format!("h = {h:?}"),
    );

    let zero = ScalingFamily::new(0.0, 1.0, 0.0)?;
    let opts = SweepOptions {
        horizon_periods: 2,
        convention: c.conv,
        ..Default::default()
    };
    let v = phase_sweep(&zero, &[16, 32], &opts)?;
    c.check(
        "undriven family vanishes",
        v.classification == Classification::ExtensionVanishes,
        format!("classified {}", v.classification.name()),
    );
    Ok(())
}

fn number_theory(c: &mut Collector) -> Result<()> {
    let mut mismatches = 0;
    for n in 1..=1000u64 {
        let brute = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
        if euler_totient(n)? != brute {
            mismatches += 1;
        }
    }
    c.check(
        "totient vs brute force",
        mismatches == 0,
        format!("{mismatches} mismatches for n <= 1000"),
    );

    let recs = totient_liminf_scan(100_000)?;
    let last = recs.last().expect("scan has records");
    let at_primorial = primorials(100_000).contains(&last.n);
    c.check(
        "running minimum at a primorial",
        at_primorial,
        format!("last record n = {}, value {:.6}", last.n, last.value),
    );

    let r = integer_relation_search(&[(PI / 6.0).sin()], 2, 1e-12)?;
    c.check(
        "relation 2 sin(pi/6) = 1",
        r.found && r.coefficients == vec![1, 2],
        format!("{:?}", r.coefficients),
    );
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
