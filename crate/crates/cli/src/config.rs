//! Run configuration shared by every subcommand.
//!
//! The same record is filled from a JSON file (`--config`) and from the
//! command line; flags given on the command line win. Every field is
//! optional so a file can set only what it needs.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use hchain::{Convention, SupEstimate};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    Spectral,
    Ode,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Dispersion convention: corrected or paper-literal.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,

    /// Destination of the main table (stdout when absent).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Destination of the JSON summary.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,

    /// Significant digits of numbers in CSV output.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_particles: Option<usize>,

    /// Proper frequency `sqrt(kappa/mass)`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,

    /// Driving ratio `f0 / omega0^2`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,

    /// Lattice spacing.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,

    /// Margin keeping windows away from the driven end.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    /// Sampling horizon in periods of the slowest mode.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_periods: Option<u32>,

    /// simulate: solution to tabulate.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SimMode>,

    /// simulate: final time.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,

    /// simulate: integrator time step.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,

    /// simulate: write one snapshot every this many steps.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_every: Option<usize>,

    /// sup-scan, phase-sweep: comma-separated chain sizes.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<usize>>,

    /// sup-scan: comma-separated spans (powers of two up to N/4 when absent).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spans: Option<Vec<usize>>,

    /// phase-sweep: span l of the measured window.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<usize>,

    /// phase-sweep: amplitude c of sigma(N) = c N^-alpha (ln N)^-beta.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_c: Option<f64>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_alpha: Option<f64>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_beta: Option<f64>,

    /// phase-sweep: scan every admissible offset.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_offsets: Option<bool>,

    /// phase-sweep: estimate of the all-time sup, sampled or torus.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_estimate: Option<SupEstimate>,

    /// phase-sweep: constant c of the mode cutoff c N / ln ln N.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_constant: Option<f64>,

    /// static: attractive exponent of the Mie potential.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mie_n: Option<f64>,

    /// static: repulsive exponent of the Mie potential.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mie_m: Option<f64>,

    /// static: curvature at the minimum.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,

    /// static: comma-separated applied forces.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forces: Option<Vec<f64>>,

    /// verify: suite to run.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(self, top;
            convention, out, summary, precision, workers, n_particles, omega0, sigma, spacing, epsilon,
            horizon_periods, mode, duration, dt, dump_every, ladder, spans, span, family_c, family_alpha,
            family_beta, all_offsets, sup_estimate, cutoff_constant, mie_n, mie_m, kappa, forces, suite,
        );
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn convention(&self) -> Convention {
        self.convention.unwrap_or_default()
    }

    pub fn precision(&self) -> usize {
        self.precision.unwrap_or(hchain::report::DEFAULT_DIGITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            convention: Some(Convention::PaperLiteral),
            n_particles: Some(12),
            sigma: Some(0.1 + 0.2),
            ladder: Some(vec![64, 128]),
            forces: Some(vec![0.0, 1e-300, -0.0]),
            mode: Some(SimMode::Both),
            sup_estimate: Some(SupEstimate::Sampled),
            all_offsets: Some(true),
            out: Some(PathBuf::from("a b/ü.csv")),
            ..Default::default()
        }
    }

    #[test]
    fn round_trips_losslessly() {
        let c = sample();
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.forces.as_ref().unwrap()[2].to_bits(), (-0.0f64).to_bits());
        let empty: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(empty, RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"n-partcles": 3}"#).is_err());
    }

    #[test]
    fn overlay_prefers_the_top_layer() {
        let file = sample();
        let flags = RunConfig {
            n_particles: Some(30),
            ..Default::default()
        };
        let merged = file.clone().overlay(flags);
        assert_eq!(merged.n_particles, Some(30));
        assert_eq!(merged.ladder, file.ladder);
        assert_eq!(merged.convention(), Convention::PaperLiteral);
    }
}
