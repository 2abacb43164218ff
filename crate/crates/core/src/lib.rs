//! Quantum-circuit prediction step for the one-dimensional Fokker-Planck
//! equation, with a classical exact reference solver and an error-analysis
//! suite.
//!
//! The pipeline: a joint position-velocity density is square-root encoded
//! into the amplitudes of a qubit register ([`grid`]); transport is applied
//! exactly as diagonal phases between Fourier transforms of the position
//! register, and velocity diffusion is replaced by a unitary phase surrogate
//! on the velocity register ([`circuit`], executed by [`statevec`]); the
//! decoded density is compared against `exp(dt*L)p` computed classically
//! ([`classical`]) with the metrics and diagnostics in [`analysis`].
//!
//! Everything is generic over the real scalar type (see [`float::Real`]);
//! the aliases below fix `f64`, which is what the stated numerical
//! tolerances are calibrated for.

pub mod analysis;
pub mod circuit;
pub mod classical;
pub mod error;
pub mod float;
pub mod grid;
pub mod spectral;
pub mod statevec;

pub use error::{Error, Result};
pub use float::Real;

/// `f64` phase-space grid.
pub type Grid = grid::PhaseSpaceGrid<f64>;
/// `f64` joint density.
pub type Density = grid::DensityGrid<f64>;
/// `f64` amplitude vector.
pub type Amplitude = grid::AmplitudeState<f64>;
/// `f64` gate.
pub type Gate = circuit::GateOp<f64>;
/// `f64` circuit.
pub type Circuit = circuit::QuantumCircuit<f64>;
/// `f64` drift phase schedule.
pub type Plan = circuit::PhasePlan<f64>;
/// `f64` simulator state.
pub type Sim = statevec::SimState<f64>;
/// `f64` metrics report.
pub type Metrics = analysis::MetricsReport<f64>;
