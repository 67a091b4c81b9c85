//! Direct time integration of the chain equations of motion.
//!
//! This is the independent oracle for the closed-form solution: it knows
//! nothing about normal modes. Two topologies are supported, the pinned line
//! (site 0 fixed, constant force on the last site) and the forced ring of
//! `4N−2` sites whose odd/mirror symmetries reproduce the pinned line.
//!
//! The scheme is kick-drift-kick velocity Verlet. It is symplectic and
//! time-reversible, so energy errors stay bounded over long runs.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::params::{ChainParams, Convention};
use crate::potential::{MiePotential, Potential};
use crate::spectral::SpectralSolution;

/// Gaps below this fraction of the rest length abort a run.
const MIN_GAP_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Topology {
    /// `n` particles, the first pinned at the origin.
    PinnedLine { n: usize },
    /// Periodic ring of `4n−2` sites driven by `+f₀` at sites `n−1, n` and
    /// `−f₀` at sites `3n−2, 3n−1`.
    CircleForced { n: usize },
}

impl Topology {
    pub fn sites(&self) -> usize {
        match *self {
            Topology::PinnedLine { n } => n,
            Topology::CircleForced { n } => 4 * n - 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub topology: Topology,
    pub potential: Potential,
    pub mass: f64,
    /// Driving force per unit mass.
    pub f0: f64,
}

impl SystemSpec {
    pub fn new(topology: Topology, potential: Potential, mass: f64, f0: f64) -> Result<Self> {
        let n = match topology {
            Topology::PinnedLine { n } | Topology::CircleForced { n } => n,
        };
        if n < 2 {
            return Err(ChainError::domain(format!("need at least 2 particles, got {n}")));
        }
        if !(mass > 0.0) {
            return Err(ChainError::domain(format!("mass must be positive, got {mass}")));
        }
        if !f0.is_finite() {
            return Err(ChainError::domain("driving must be finite"));
        }
        Ok(SystemSpec {
            topology,
            potential,
            mass,
            f0,
        })
    }

    /// Quadratic pinned line matching `params` (unit mass).
    pub fn harmonic_line(params: &ChainParams) -> Self {
        SystemSpec {
            topology: Topology::PinnedLine { n: params.n() },
            potential: Potential::Quadratic {
                kappa: params.omega0().powi(2),
                a: params.spacing(),
            },
            mass: 1.0,
            f0: params.f0(),
        }
    }

    /// Quadratic forced ring equivalent to `params`.
    pub fn harmonic_circle(params: &ChainParams) -> Self {
        SystemSpec {
            topology: Topology::CircleForced { n: params.n() },
            ..SystemSpec::harmonic_line(params)
        }
    }

    pub fn spacing(&self) -> f64 {
        self.potential.rest_length()
    }

    /// Band edge `2√(κ/mass)` of the linearised chain.
    pub fn max_frequency(&self) -> f64 {
        2.0 * (self.potential.stiffness() / self.mass).sqrt()
    }

    /// 64 steps per period of the fastest linear mode.
    pub fn default_dt(&self) -> f64 {
        2.0 * PI / self.max_frequency() / 64.0
    }

    fn forcing(&self, site: usize) -> f64 {
        match self.topology {
            Topology::PinnedLine { n } => {
                if site == n - 1 {
                    self.f0
                } else {
                    0.0
                }
            }
            Topology::CircleForced { n } => {
                if site == n - 1 || site == n {
                    self.f0
                } else if site == 3 * n - 2 || site == 3 * n - 1 {
                    -self.f0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Positions and velocities at time `t`.
///
/// Positions are stored as deviations `x_k = z_k − k·a` from the reference
/// lattice so that small displacements keep full precision; use
/// [`ChainState::position`] for the absolute coordinate `z_k`. On the pinned
/// line `x_0` is zero at all times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub t: f64,
    pub spacing: f64,
    pub deviations: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl ChainState {
    /// The reference lattice at rest.
    pub fn lattice(spec: &SystemSpec) -> Self {
        let s = spec.topology.sites();
        ChainState {
            t: 0.0,
            spacing: spec.spacing(),
            deviations: vec![0.0; s],
            velocities: vec![0.0; s],
        }
    }

    pub fn len(&self) -> usize {
        self.deviations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deviations.is_empty()
    }

    pub fn position(&self, k: usize) -> f64 {
        k as f64 * self.spacing + self.deviations[k]
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.position(k)).collect()
    }

    /// Bond lengths `z_{k+1} − z_k` (the ring closes through its period).
    pub fn gaps(&self, topology: &Topology) -> Vec<f64> {
        let s = self.len();
        let bonds = match topology {
            Topology::PinnedLine { .. } => s - 1,
            Topology::CircleForced { .. } => s,
        };
        (0..bonds)
            .map(|j| self.spacing + self.deviations[(j + 1) % s] - self.deviations[j])
            .collect()
    }

    /// Reverses the direction of motion.
    pub fn reversed(&self) -> Self {
        ChainState {
            velocities: self.velocities.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }
}

/// Fills `acc` with accelerations and returns the smallest gap.
fn accelerations(spec: &SystemSpec, state: &ChainState, acc: &mut [f64]) -> Result<f64> {
    let x = &state.deviations;
    let s = x.len();
    let inv_mass = 1.0 / spec.mass;
    let a = spec.spacing();
    let ring = matches!(spec.topology, Topology::CircleForced { .. });
    let bonds = if ring { s } else { s - 1 };
    let mie = matches!(spec.potential, Potential::Mie(_));

    acc.iter_mut().enumerate().for_each(|(i, v)| *v = spec.forcing(i));
    let mut min_gap = f64::INFINITY;
    for j in 0..bonds {
        let right = (j + 1) % s;
        let dx = x[right] - x[j];
        if mie {
            let gap = a + dx;
            if gap <= MIN_GAP_FRACTION * a {
                return Err(ChainError::Singular {
                    bond: j,
                    gap,
                    t: state.t,
                });
            }
            min_gap = min_gap.min(gap);
        }
        let tension = spec.potential.tension(dx) * inv_mass;
        acc[j] += tension;
        acc[right] -= tension;
    }
    if !ring {
        acc[0] = 0.0;
    }
    Ok(if mie { min_gap } else { a })
}

fn check_stability(spec: &SystemSpec, min_gap: f64, dt: f64) -> Result<()> {
    let curvature = spec
        .potential
        .curvature(min_gap - spec.spacing())
        .max(spec.potential.stiffness());
    let omega_max = 2.0 * (curvature / spec.mass).sqrt();
    if !(dt > 0.0) {
        return Err(ChainError::Stability(format!("time step must be positive, got {dt}")));
    }
    if dt * omega_max >= 2.0 {
        return Err(ChainError::Stability(format!(
            "dt = {dt} exceeds 2/omega_max = {} (omega_max = {omega_max})",
            2.0 / omega_max
        )));
    }
    Ok(())
}

/// Velocity Verlet stepper that reuses the end-of-step accelerations.
struct Stepper<'a> {
    spec: &'a SystemSpec,
    acc: Vec<f64>,
    min_gap: f64,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a SystemSpec, state: &ChainState) -> Result<Self> {
        let mut acc = vec![0.0; state.len()];
        let min_gap = accelerations(spec, state, &mut acc)?;
        Ok(Stepper { spec, acc, min_gap })
    }

    fn advance(&mut self, state: &mut ChainState, dt: f64) -> Result<()> {
        check_stability(self.spec, self.min_gap, dt)?;
        let pinned = matches!(self.spec.topology, Topology::PinnedLine { .. });
        let half = 0.5 * dt;
        for (v, a) in state.velocities.iter_mut().zip(&self.acc) {
            *v += half * a;
        }
        for (x, v) in state.deviations.iter_mut().zip(&state.velocities) {
            *x += dt * v;
        }
        if pinned {
            state.deviations[0] = 0.0;
            state.velocities[0] = 0.0;
        }
        state.t += dt;
        self.min_gap = accelerations(self.spec, state, &mut self.acc)?;
        for (v, a) in state.velocities.iter_mut().zip(&self.acc) {
            *v += half * a;
        }
        Ok(())
    }
}

/// Advances `state` by one kick-drift-kick step.
pub fn step(spec: &SystemSpec, state: &ChainState, dt: f64) -> Result<ChainState> {
    let mut next = state.clone();
    Stepper::new(spec, state)?.advance(&mut next, dt)?;
    Ok(next)
}

/// Number of uniform steps used to cover `t_end` with steps no longer than `dt`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    if t_end <= 0.0 {
        return 0;
    }
    (t_end / dt - 1e-9).ceil().max(1.0) as usize
}

/// Integrates from `state` for a duration `t_end`.
///
/// The duration is split into `step_count(t_end, dt)` equal steps. The
/// observer sees the initial state and then every accepted step, in order.
pub fn integrate_from<F>(
    spec: &SystemSpec,
    mut state: ChainState,
    t_end: f64,
    dt: f64,
    mut observer: F,
) -> Result<ChainState>
where
    F: FnMut(&ChainState),
{
    if !(dt > 0.0) {
        return Err(ChainError::Stability(format!("time step must be positive, got {dt}")));
    }
    if t_end < 0.0 {
        return Err(ChainError::domain(format!(
            "duration must be non-negative, got {t_end}"
        )));
    }
    let steps = step_count(t_end, dt);
    observer(&state);
    if steps == 0 {
        return Ok(state);
    }
    let h = t_end / steps as f64;
    let t0 = state.t;
    let mut stepper = Stepper::new(spec, &state)?;
    for i in 1..=steps {
        stepper.advance(&mut state, h)?;
        // keep the clock free of accumulated rounding
        state.t = t0 + i as f64 * h;
        observer(&state);
    }
    Ok(state)
}

/// Integrates from the lattice at rest.
pub fn integrate<F>(spec: &SystemSpec, t_end: f64, dt: f64, observer: F) -> Result<ChainState>
where
    F: FnMut(&ChainState),
{
    integrate_from(spec, ChainState::lattice(spec), t_end, dt, observer)
}

/// `H = Σ m v²/2 + Σ V(gap) − Σ F_k z_k`, with the driving potential included
/// so that `H` is conserved by the exact flow.
pub fn total_energy(spec: &SystemSpec, state: &ChainState) -> Result<f64> {
    if state.deviations.len() != spec.topology.sites() || state.velocities.len() != state.deviations.len() {
        return Err(ChainError::domain("state does not match the system size"));
    }
    let kinetic: f64 = state.velocities.iter().map(|v| 0.5 * spec.mass * v * v).sum();
    let mut pair = 0.0;
    for gap in state.gaps(&spec.topology) {
        if matches!(spec.potential, Potential::Mie(_)) && gap <= 0.0 {
            return Err(ChainError::domain(format!("non-positive gap {gap} in a Mie chain")));
        }
        pair += spec.potential.energy(gap - state.spacing);
    }
    let driving: f64 = (0..state.len())
        .map(|k| spec.mass * spec.forcing(k) * state.position(k))
        .sum();
    Ok(kinetic + pair - driving)
}

/// Sampling stride giving roughly `target` observations over `steps` steps.
fn stride(steps: usize, target: usize) -> usize {
    (steps / target.max(1)).max(1)
}

/// Largest deviation between the closed form and the integrated pinned line,
/// over all sites and about a thousand sampled times, in units of `σN`.
pub fn spectral_vs_ode_error(params: &ChainParams, t_end: f64, dt: f64, conv: Convention) -> Result<f64> {
    if !(params.sigma() > 0.0) {
        return Err(ChainError::domain("error normalisation needs sigma > 0"));
    }
    let spec = SystemSpec::harmonic_line(params);
    let solution = SpectralSolution::new(*params, conv);
    let every = stride(step_count(t_end, dt), 1000);
    let mut count = 0usize;
    let mut worst = 0.0f64;
    integrate(&spec, t_end, dt, |state| {
        if count.is_multiple_of(every) {
            let exact = solution.displacements(state.t);
            for (x, e) in state.deviations.iter().zip(&exact) {
                worst = worst.max((x - e).abs());
            }
        }
        count += 1;
    })?;
    Ok(worst / (params.sigma() * params.n() as f64))
}

/// Outcome of the ring-versus-line comparison, in units of `σN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleReport {
    /// `max |x_n − y_n|` over `n ≤ N−1` and sampled times.
    pub max_error: f64,
    /// `max |y_n − y_{2N−1−n}|`.
    pub mirror_residual: f64,
    /// `max |y_n + y_{−n}|` (indices modulo `4N−2`).
    pub odd_residual: f64,
}

/// Integrates the pinned line and the forced ring side by side and compares
/// the first `N` ring sites with the line.
pub fn circle_equivalence_error(params: &ChainParams, t_end: f64, dt: f64) -> Result<CircleReport> {
    if !(params.sigma() > 0.0) {
        return Err(ChainError::domain("error normalisation needs sigma > 0"));
    }
    let n = params.n();
    let every = stride(step_count(t_end, dt), 1000);

    let mut line = Vec::new();
    let mut count = 0usize;
    integrate(&SystemSpec::harmonic_line(params), t_end, dt, |state| {
        if count.is_multiple_of(every) {
            line.push(state.deviations.clone());
        }
        count += 1;
    })?;

    let ring_len = 4 * n - 2;
    let mut report = CircleReport {
        max_error: 0.0,
        mirror_residual: 0.0,
        odd_residual: 0.0,
    };
    let mut count = 0usize;
    let mut sample = 0usize;
    integrate(&SystemSpec::harmonic_circle(params), t_end, dt, |state| {
        if count.is_multiple_of(every) {
            let y = &state.deviations;
            for (xn, yn) in line[sample].iter().zip(y) {
                report.max_error = report.max_error.max((xn - yn).abs());
            }
            for j in 0..ring_len {
                let mirror = (2 * n - 1 + ring_len - j) % ring_len;
                let opposite = (ring_len - j) % ring_len;
                report.mirror_residual = report.mirror_residual.max((y[j] - y[mirror]).abs());
                report.odd_residual = report.odd_residual.max((y[j] + y[opposite]).abs());
            }
            sample += 1;
        }
        count += 1;
    })?;
    let scale = params.sigma() * n as f64;
    report.max_error /= scale;
    report.mirror_residual /= scale;
    report.odd_residual /= scale;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissociationVerdict {
    pub force: f64,
    pub dissociated: bool,
    /// Largest gap seen during the run.
    pub max_gap: f64,
    /// First time any gap exceeded `3b`.
    pub escape_time: Option<f64>,
}

/// Drives a Mie chain of `n` particles (unit mass, started at rest on its
/// minimum) with each force in turn for a duration `t_end`.
///
/// A run counts as dissociated when some gap passes `3b` and the largest
/// gap never decreases during the last quarter of the run.
pub fn dissociation_scan(pot: &MiePotential, n: usize, forces: &[f64], t_end: f64) -> Result<Vec<DissociationVerdict>> {
    if forces.windows(2).any(|w| w[0] > w[1]) {
        return Err(ChainError::domain("forces must be sorted ascending"));
    }
    forces
        .par_iter()
        .map(|&force| dissociation_run(pot, n, force, t_end))
        .collect()
}

fn dissociation_run(pot: &MiePotential, n: usize, force: f64, t_end: f64) -> Result<DissociationVerdict> {
    let spec = SystemSpec::new(Topology::PinnedLine { n }, Potential::Mie(*pot), 1.0, force)?;
    let threshold = 3.0 * pot.b;
    let tail_start = 0.75 * t_end;
    let mut max_gap = pot.a;
    let mut escape_time = None;
    let mut last_tail: Option<f64> = None;
    let mut tail_monotone = true;
    integrate(&spec, t_end, spec.default_dt(), |state| {
        let widest = state.gaps(&spec.topology).into_iter().fold(f64::NEG_INFINITY, f64::max);
        max_gap = max_gap.max(widest);
        if escape_time.is_none() && widest > threshold {
            escape_time = Some(state.t);
        }
        if state.t >= tail_start {
            if let Some(prev) = last_tail {
                if widest < prev {
                    tail_monotone = false;
                }
            }
            last_tail = Some(widest);
        }
    })?;
    Ok(DissociationVerdict {
        force,
        dissociated: escape_time.is_some() && tail_monotone,
        max_gap,
        escape_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn n2() -> ChainParams {
        ChainParams::with_sigma(2, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn equilibrium_is_fixed() {
        let p = ChainParams::new(6, 1.0, 0.0, 1.0).unwrap();
        let spec = SystemSpec::harmonic_line(&p);
        let s0 = ChainState::lattice(&spec);
        let s1 = step(&spec, &s0, 0.01).unwrap();
        assert_eq!(s1.deviations, s0.deviations);
        assert_eq!(s1.velocities, s0.velocities);
    }

    #[test]
    fn two_particles_follow_scalar_solution() {
        let spec = SystemSpec::harmonic_line(&n2());
        let end = integrate(&spec, PI, 1e-3, |_| {}).unwrap();
        assert_abs_diff_eq!(end.deviations[1], 2.0, epsilon = 1e-5);
        assert_eq!(end.deviations[0], 0.0);
    }

    #[test]
    fn ring_reduces_to_line_for_two_particles() {
        let spec = SystemSpec::harmonic_circle(&n2());
        let end = integrate(&spec, PI, 1e-3, |_| {}).unwrap();
        assert_abs_diff_eq!(end.deviations[1], 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(end.deviations[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.deviations[3], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_duration_is_identity() {
        let spec = SystemSpec::harmonic_line(&n2());
        let mut calls = 0;
        let end = integrate(&spec, 0.0, 0.1, |_| calls += 1).unwrap();
        assert_eq!(end, ChainState::lattice(&spec));
        assert_eq!(calls, 1);
    }

    #[test]
    fn unstable_step_is_rejected() {
        let spec = SystemSpec::harmonic_line(&n2());
        let err = step(&spec, &ChainState::lattice(&spec), 1.5).unwrap_err();
        assert!(err.is_numerical());
        assert!(integrate(&spec, 1.0, 0.0, |_| {}).is_err());
    }

    #[test]
    fn energy_examples() {
        let p = ChainParams::with_sigma(8, 1.0, 0.0, 0.7).unwrap();
        let spec = SystemSpec::harmonic_line(&p);
        assert_eq!(total_energy(&spec, &ChainState::lattice(&spec)).unwrap(), 0.0);

        let p = ChainParams::with_sigma(8, 1.0, 0.5, 0.7).unwrap();
        let spec = SystemSpec::harmonic_line(&p);
        let h0 = total_energy(&spec, &ChainState::lattice(&spec)).unwrap();
        assert_abs_diff_eq!(h0, -0.5 * 7.0 * 0.7, epsilon = 1e-14);

        // closed-form state at t = π for N = 2: x₁ = 2, v₁ = 0
        let a = 0.3;
        let spec = SystemSpec::harmonic_line(&ChainParams::with_sigma(2, 1.0, 1.0, a).unwrap());
        let state = ChainState {
            t: PI,
            spacing: a,
            deviations: vec![0.0, 2.0],
            velocities: vec![0.0, 0.0],
        };
        assert_abs_diff_eq!(total_energy(&spec, &state).unwrap(), -a, epsilon = 1e-14);
    }

    #[test]
    fn mie_lattice_is_a_fixed_point() {
        let pot = MiePotential::new(6.0, 12.0, 1.0 / 36.0, 1.0 / 72.0).unwrap();
        let spec = SystemSpec::new(Topology::PinnedLine { n: 20 }, Potential::Mie(pot), 1.0, 0.0).unwrap();
        let end = integrate(&spec, 50.0, spec.default_dt(), |_| {}).unwrap();
        assert!(end.velocities.iter().all(|v| v.abs() < 1e-12));
        assert!(end.deviations.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn collapsed_gap_aborts() {
        let pot = MiePotential::new(6.0, 12.0, 1.0 / 36.0, 1.0 / 72.0).unwrap();
        let spec = SystemSpec::new(Topology::PinnedLine { n: 3 }, Potential::Mie(pot), 1.0, 0.0).unwrap();
        let mut state = ChainState::lattice(&spec);
        state.deviations[1] = -1.0;
        assert!(matches!(step(&spec, &state, 0.01), Err(ChainError::Singular { .. })));
        assert!(total_energy(&spec, &state).is_err());
    }

    #[test]
    fn step_matches_integrate() {
        let p = ChainParams::with_sigma(5, 1.0, 0.2, 1.0).unwrap();
        let spec = SystemSpec::harmonic_line(&p);
        let mut s = ChainState::lattice(&spec);
        for _ in 0..10 {
            s = step(&spec, &s, 0.05).unwrap();
        }
        let end = integrate(&spec, 0.5, 0.05, |_| {}).unwrap();
        for (a, b) in s.deviations.iter().zip(&end.deviations) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn unsorted_forces_rejected() {
        let pot = MiePotential::new(6.0, 12.0, 1.0 / 36.0, 1.0 / 72.0).unwrap();
        assert!(dissociation_scan(&pot, 4, &[0.2, 0.1], 1.0).is_err());
    }
}
