//! Two-site continuous-variable entanglement in thermal networks of coupled
//! quantum harmonic oscillators.
//!
//! The pipeline is:
//!
//! 1. [`network`]: describe the oscillators (masses and a symmetric potential
//!    matrix), either explicitly or through the uniform chain generators.
//! 2. [`diag`]: simultaneously diagonalize the kinetic and potential quadratic
//!    forms with a canonical (commutation-preserving) transform.
//! 3. [`thermal`]: canonical-ensemble moments of each normal mode.
//! 4. [`entangle`]: the 4×4 covariance matrix of two sites, the partial
//!    transpose, the separability function `L`, logarithmic negativity and
//!    the symplectic-spectrum cross-check.
//! 5. [`analytic`]: closed-form modes of the uniform circular and linear
//!    chains, used as oracles for the numerical path.
//!
//! Units: ħ = 1 and k_B = 1 throughout, so `T = 1/β`.

pub mod analytic;
pub mod cli;
pub mod diag;
pub mod emit;
pub mod entangle;
mod error;
pub mod network;
pub mod thermal;

pub use analytic::{circular_modes, linear_modes, AnalyticBasis, ChainKind};
pub use diag::{jacobi_eigh, mode_frequencies, simultaneous_diagonalize, Eigh, NormalModeBasis};
pub use entangle::{
    critical_temperature, entanglement_report, log_negativity, pair_covariance,
    partial_transpose, separability_l, symplectic_spectrum, CriticalTemperature,
    EntanglementReport, PairCovariance,
};
pub use error::{Error, ErrorKind, Result};
pub use network::{make_circular_chain, make_linear_chain, parse_network, OscillatorNetwork, ThermalEnvironment};
pub use thermal::{mode_moments, mode_position_density, single_oscillator_moments, ModeMoments};
