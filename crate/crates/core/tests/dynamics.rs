//! Long-run behaviour of the integrator: energy conservation, time
//! reversal and agreement with the closed form under both conventions.

use hchain::integrator::{integrate, integrate_from, spectral_vs_ode_error, total_energy};
use hchain::spectral::SpectralSolution;
use hchain::{ChainParams, ChainState, Convention, SystemSpec};

#[test]
fn energy_drift_is_small() {
    let params = ChainParams::new(50, 1.0, 1.0, 1.0).unwrap();
    let spec = SystemSpec::harmonic_line(&params);
    let h0 = total_energy(&spec, &ChainState::lattice(&spec)).unwrap();
    let mut worst = 0.0f64;
    let end = integrate(&spec, 1000.0, 0.01, |s| {
        worst = worst.max((total_energy(&spec, s).unwrap() - h0).abs());
    })
    .unwrap();
    let drift = (total_energy(&spec, &end).unwrap() - h0).abs() / h0.abs();
    assert!(drift <= 1e-4, "final relative drift {drift:e}");
    assert!(
        worst / h0.abs() <= 1e-3,
        "max relative excursion {:e}",
        worst / h0.abs()
    );
}

#[test]
fn time_reversal_returns_to_lattice() {
    for &n in &[2usize, 7, 20, 50] {
        let params = ChainParams::new(n, 1.3, 0.8, 1.0).unwrap();
        let spec = SystemSpec::harmonic_line(&params);
        let forward = integrate(&spec, 200.0, 1e-2, |_| {}).unwrap();
        let back = integrate_from(&spec, forward.reversed(), 200.0, 1e-2, |_| {}).unwrap();
        let scale = params.sigma() * n as f64;
        let err = back.deviations.iter().map(|x| x.abs()).fold(0.0, f64::max) / scale;
        assert!(err <= 1e-8, "N={n}: returned {err:e} from the lattice");
    }
}

#[test]
fn literal_convention_disagrees_with_the_ode() {
    let params = ChainParams::new(5, 1.0, 1.0, 1.0).unwrap();
    let corrected = spectral_vs_ode_error(&params, 20.0, 1e-3, Convention::Corrected).unwrap();
    let literal = spectral_vs_ode_error(&params, 20.0, 1e-3, Convention::PaperLiteral).unwrap();
    assert!(corrected <= 1e-5);
    assert!(literal > 1e-2, "literal error {literal}");
}

#[test]
fn velocities_match_finite_differences() {
    let params = ChainParams::new(9, 1.0, 1.0, 1.0).unwrap();
    let sol = SpectralSolution::new(params, Convention::Corrected);
    let (t, h) = (3.7, 1e-5);
    let v = sol.velocities(t);
    let plus = sol.displacements(t + h);
    let minus = sol.displacements(t - h);
    for site in 0..9 {
        let fd = (plus[site] - minus[site]) / (2.0 * h);
        assert!((fd - v[site]).abs() <= 1e-6, "site {site}: {fd} vs {}", v[site]);
    }
}
