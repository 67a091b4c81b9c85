//! Plain-text output: CSV tables with a fixed number of significant digits.
//!
//! Every table has a header row, LF line endings and UTF-8 text.

use std::io::{self, Write};

use crate::extremal::ExtremalReport;
use crate::integrator::ChainState;
use crate::phase::PhaseVerdict;

pub const DEFAULT_DIGITS: usize = 17;

pub const TRAJECTORY_HEADER: &str = "t,site,z,v";
pub const EXTREMAL_HEADER: &str =
    "N,k,l,epsilon,sigma,sup_lower,sup_upper,inf_lower,inf_upper,F_N_l,ratio_sup,ratio_inf,horizon";
pub const PHASE_HEADER: &str = "N,sigma,r,slope_estimate,classification";

/// Scientific notation with `digits` significant digits, e.g.
/// `fmt_sig(0.5, 3) == "5.00e-1"`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*e}", digits.max(1) - 1, x)
}

/// Appends one trajectory snapshot as `t,site,z,v` rows.
pub fn write_trajectory_rows<W: Write>(out: &mut W, state: &ChainState, digits: usize) -> io::Result<()> {
    let t = fmt_sig(state.t, digits);
    for k in 0..state.len() {
        writeln!(
            out,
            "{t},{k},{},{}",
            fmt_sig(state.position(k), digits),
            fmt_sig(state.velocities[k], digits)
        )?;
    }
    Ok(())
}

pub fn write_extremal_csv<W: Write>(out: &mut W, rows: &[ExtremalReport], digits: usize) -> io::Result<()> {
    writeln!(out, "{EXTREMAL_HEADER}")?;
    for r in rows {
        let l = r.window.l as f64;
        let f = l * (r.n as f64 / l).ln();
        let f_cols = if f > 0.0 {
            [
                fmt_sig(f, digits),
                fmt_sig(r.sup_lower / f, digits),
                fmt_sig(-r.inf_upper / f, digits),
            ]
        } else {
            [fmt_sig(f, digits), "NaN".into(), "NaN".into()]
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.window.k,
            r.window.l,
            fmt_sig(r.window.epsilon, digits),
            fmt_sig(r.sigma, digits),
            fmt_sig(r.sup_lower, digits),
            fmt_sig(r.sup_upper, digits),
            fmt_sig(r.inf_lower, digits),
            fmt_sig(r.inf_upper, digits),
            f_cols[0],
            f_cols[1],
            f_cols[2],
            fmt_sig(r.horizon, digits),
        )?;
    }
    Ok(())
}

/// One row per ladder entry. The slope column is the local slope of `r`
/// against `ln N` towards the previous entry (the next one for the first
/// row), or the fitted slope for a single-entry ladder.
pub fn write_phase_csv<W: Write>(out: &mut W, verdict: &PhaseVerdict, digits: usize) -> io::Result<()> {
    writeln!(out, "{PHASE_HEADER}")?;
    for (i, p) in verdict.points.iter().enumerate() {
        let slope = match verdict.local_slopes.len() {
            0 => verdict.slope,
            _ => verdict.local_slopes[i.saturating_sub(1)],
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            p.n,
            fmt_sig(p.sigma, digits),
            fmt_sig(p.r, digits),
            fmt_sig(slope, digits),
            verdict.classification.name()
        )?;
    }
    Ok(())
}
