//! Subcommand implementations. Each writes its main artifact to `--out`
//! (stdout when absent) and, where it has one, a JSON summary to
//! `--summary` (stdout when the table went to a file, stderr otherwise).

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{bail, Context, Result};
use hchain::extremal::{dyadic_spans, theorem_ratio_scan, DEFAULT_HORIZON_PERIODS};
use hchain::integrator::{integrate, spectral_vs_ode_error, step, step_count};
use hchain::phase::{
    critical_force_ratio, fitted_depth, mie_fit_from_curvature, phase_sweep, static_fixed_point, FixedPoint,
};
use hchain::report::{fmt_sig, write_extremal_csv, write_phase_csv, write_trajectory_rows, TRAJECTORY_HEADER};
use hchain::spectral::{mode_count, mode_frequency, SpectralSolution};
use hchain::verify::{run_suite, Suite};
use hchain::{ChainParams, ChainState, ScalingFamily, SweepOptions, SystemSpec};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, SimMode};

const DEFAULT_PARTICLES: usize = 20;
const DEFAULT_LADDER: [usize; 5] = [64, 128, 256, 512, 1024];
const DEFAULT_SCAN_LADDER: [usize; 4] = [64, 128, 256, 512];
/// Mismatch threshold for the spectral/ODE comparison, in units of `σN`.
const AGREEMENT_TOLERANCE: f64 = 1e-5;

fn table_sink(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_summary<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match (&cfg.summary, &cfg.out) {
        (Some(path), _) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        (None, Some(_)) => io::stdout().lock().write_all(text.as_bytes())?,
        (None, None) => io::stderr().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn chain_params(cfg: &RunConfig) -> Result<ChainParams> {
    Ok(ChainParams::with_sigma(
        cfg.n_particles.unwrap_or(DEFAULT_PARTICLES),
        cfg.omega0.unwrap_or(1.0),
        cfg.sigma.unwrap_or(1.0),
        cfg.spacing.unwrap_or(1.0),
    )?)
}

pub fn spectrum(cfg: &RunConfig) -> Result<()> {
    let n = cfg.n_particles.unwrap_or(DEFAULT_PARTICLES);
    let omega0 = cfg.omega0.unwrap_or(1.0);
    // validates n and omega0
    ChainParams::new(n, omega0, 0.0, 1.0)?;
    let digits = cfg.precision();
    let mut out = table_sink(cfg)?;
    writeln!(out, "m,omega_m")?;
    for m in 1..=mode_count(n) {
        writeln!(
            out,
            "{m},{}",
            fmt_sig(mode_frequency(n, omega0, m, cfg.convention())?, digits)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn simulate(cfg: &RunConfig) -> Result<()> {
    let params = chain_params(cfg)?;
    let conv = cfg.convention();
    let mode = cfg.mode.unwrap_or(SimMode::Both);
    let t_end = cfg.duration.unwrap_or(100.0 / params.omega0());
    let dt = cfg.dt.unwrap_or(1e-3 / params.omega0());
    if !(t_end >= 0.0 && t_end.is_finite()) {
        bail!(hchain::ChainError::Domain(format!(
            "duration must be non-negative, got {t_end}"
        )));
    }
    if !(dt > 0.0) {
        bail!(hchain::ChainError::Domain(format!("dt must be positive, got {dt}")));
    }
    let steps = step_count(t_end, dt);
    let every = cfg.dump_every.unwrap_or((steps / 1000).max(1)).max(1);
    let digits = cfg.precision();
    let spec = SystemSpec::harmonic_line(&params);
    // surface a stability violation before any output is written
    step(&spec, &ChainState::lattice(&spec), dt)?;

    let mut out = table_sink(cfg)?;
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    match mode {
        SimMode::Spectral => {
            let solution = SpectralSolution::new(params, conv);
            let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
            for i in (0..=steps).step_by(every) {
                let t = i as f64 * h;
                let state = ChainState {
                    t,
                    spacing: params.spacing(),
                    deviations: solution.displacements(t),
                    velocities: solution.velocities(t),
                };
                write_trajectory_rows(&mut out, &state, digits)?;
            }
        }
        SimMode::Ode | SimMode::Both => {
            let mut count = 0usize;
            let mut io_error = None;
            integrate(&spec, t_end, dt, |state| {
                if count.is_multiple_of(every) && io_error.is_none() {
                    io_error = write_trajectory_rows(&mut out, state, digits).err();
                }
                count += 1;
            })?;
            if let Some(e) = io_error {
                return Err(e.into());
            }
        }
    }
    out.flush()?;
    drop(out);

    let mut summary = json!({
        "command": "simulate",
        "mode": mode,
        "convention": conv,
        "n_particles": params.n(),
        "omega0": params.omega0(),
        "sigma": params.sigma(),
        "spacing": params.spacing(),
        "duration": t_end,
        "dt": dt,
        "steps": steps,
    });
    if mode == SimMode::Both {
        let error = if params.sigma() > 0.0 && t_end > 0.0 {
            spectral_vs_ode_error(&params, t_end, dt, conv)?
        } else {
            0.0
        };
        summary["error"] = json!(error);
        summary["mismatch"] = json!(error > AGREEMENT_TOLERANCE);
    }
    write_summary(cfg, &summary)
}

pub fn sup_scan(cfg: &RunConfig) -> Result<()> {
    let ladder = cfg.ladder.clone().unwrap_or_else(|| DEFAULT_SCAN_LADDER.to_vec());
    let epsilon = cfg.epsilon.unwrap_or(0.25);
    let horizon = cfg.horizon_periods.unwrap_or(DEFAULT_HORIZON_PERIODS);
    let spans = cfg.spans.clone();
    let scan = theorem_ratio_scan(
        &ladder,
        |n| spans.clone().unwrap_or_else(|| dyadic_spans(n)),
        epsilon,
        horizon,
        cfg.convention(),
    )?;
    let reports: Vec<_> = scan.entries.iter().map(|e| e.report).collect();
    let mut out = table_sink(cfg)?;
    write_extremal_csv(&mut out, &reports, cfg.precision())?;
    out.flush()?;
    drop(out);
    write_summary(
        cfg,
        &json!({
            "command": "sup-scan",
            "convention": cfg.convention(),
            "epsilon": epsilon,
            "horizon_periods": horizon,
            "windows": reports.len(),
            "c1": scan.c1,
            "c2": scan.c2,
            "c3": scan.c3,
            "c4": scan.c4,
        }),
    )
}

pub fn phase(cfg: &RunConfig) -> Result<()> {
    let family = ScalingFamily::new(
        cfg.family_c.unwrap_or(0.01),
        cfg.family_alpha.unwrap_or(1.0),
        cfg.family_beta.unwrap_or(0.0),
    )?;
    let ladder = cfg.ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
    let defaults = SweepOptions::default();
    let opts = SweepOptions {
        span: cfg.span.unwrap_or(defaults.span),
        epsilon: cfg.epsilon.unwrap_or(defaults.epsilon),
        horizon_periods: cfg.horizon_periods.unwrap_or(defaults.horizon_periods),
        convention: cfg.convention(),
        all_offsets: cfg.all_offsets.unwrap_or(defaults.all_offsets),
        estimate: cfg.sup_estimate.unwrap_or(defaults.estimate),
        cutoff_constant: cfg.cutoff_constant.unwrap_or(defaults.cutoff_constant),
    };
    let verdict = phase_sweep(&family, &ladder, &opts)?;
    let mut out = table_sink(cfg)?;
    write_phase_csv(&mut out, &verdict, cfg.precision())?;
    out.flush()?;
    drop(out);
    write_summary(
        cfg,
        &json!({ "command": "phase-sweep", "options": opts, "verdict": verdict }),
    )
}

pub fn statics(cfg: &RunConfig) -> Result<()> {
    let (n, m) = (cfg.mie_n.unwrap_or(6.0), cfg.mie_m.unwrap_or(12.0));
    let kappa = cfg.kappa.unwrap_or(1.0);
    let particles = cfg.n_particles.unwrap_or(DEFAULT_PARTICLES);
    let pot = mie_fit_from_curvature(kappa, particles, n, m)?;
    let critical = critical_force_ratio(n, m)?;
    let critical_force = kappa * critical.value / particles as f64;
    let forces = cfg
        .forces
        .clone()
        .unwrap_or_else(|| [0.0, 0.5, 1.0, 2.0].iter().map(|x| x * critical_force).collect());
    let fixed_points = forces
        .iter()
        .map(|&f| {
            let fp = static_fixed_point(&hchain::Potential::Mie(pot), f)?;
            Ok(json!({ "force": f, "fixed_point": fp, "exists": fp != FixedPoint::NoFixedPoint }))
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = json!({
        "command": "static",
        "n": n,
        "m": m,
        "kappa": kappa,
        "n_particles": particles,
        "c_n": pot.c_n,
        "c_m": pot.c_m,
        "a": pot.a,
        "b": pot.b,
        "depth": pot.depth,
        "fitted_depth": fitted_depth(kappa, particles, n, m),
        "critical_ratio": critical,
        "critical_force": critical_force,
        "fixed_points": fixed_points,
    });
    let mut out = table_sink(cfg)?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Returns whether every check passed or failed as documented.
pub fn verify(cfg: &RunConfig) -> Result<bool> {
    let suite: Suite = cfg.suite.as_deref().unwrap_or("all").parse()?;
    let report = run_suite(suite, cfg.convention())?;
    let mut out = table_sink(cfg)?;
    out.write_all(report.to_tap().as_bytes())?;
    out.flush()?;
    Ok(report.passed())
}
