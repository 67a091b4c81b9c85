//! Forced one-dimensional harmonic chain: exact normal-mode solution, a
//! symplectic integrator used as an independent oracle, extremal analysis of
//! bond extensions, the double scaling limit, Mie statics and the number
//! theory behind the density argument.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremal;
pub mod integrator;
pub mod modesum;
pub mod number_theory;
pub mod params;
pub mod phase;
pub mod potential;
pub mod report;
pub mod spectral;
pub mod verify;

pub use error::{ChainError, Result};
pub use extremal::{ExtremalReport, RatioScan, TorusBound};
pub use integrator::{ChainState, SystemSpec, Topology};
pub use params::{AnalysisWindow, ChainParams, Convention};
pub use phase::{Classification, FixedPoint, PhaseVerdict, ScalingFamily, SupEstimate, SweepOptions};
pub use potential::{MiePotential, Potential};
pub use spectral::{ModeData, SpectralSolution};
