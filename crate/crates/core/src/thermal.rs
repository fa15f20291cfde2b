//! Canonical-ensemble moments of single oscillators and of normal modes.
//!
//! A normal mode with Hamiltonian `½μP² + ½λQ²` is an oscillator of mass
//! `1/μ` and frequency `ω = √(μλ)`. First moments vanish identically and
//! are not stored; [`ModeMoments::q_mean`] and [`ModeMoments::p_mean`]
//! return the constant zero.

use std::f64::consts::PI;

use crate::diag::NormalModeBasis;
use crate::error::{Error, Result};
use crate::network::ThermalEnvironment;

/// Modes with `λ ≤ ZERO_MODE_TOLERANCE·max(λ)` have no thermal state.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-12;

/// `coth(βω/2)`, exactly 1 for the ground state.
pub(crate) fn coth_factor(beta: f64, omega: f64) -> f64 {
    if beta == f64::INFINITY {
        return 1.0;
    }
    let x = 0.5 * beta * omega;
    if x > 20.0 {
        1.0
    } else if x < 1e-8 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

fn tanh_factor(beta: f64, omega: f64) -> f64 {
    if beta == f64::INFINITY {
        1.0
    } else {
        (0.5 * beta * omega).tanh()
    }
}

/// Rejects zero or negative modes, naming the first offender (1-based).
pub(crate) fn require_positive_modes(lambdas: &[f64]) -> Result<()> {
    let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = ZERO_MODE_TOLERANCE * max.max(0.0);
    match lambdas.iter().position(|&l| l <= floor) {
        Some(k) => Err(Error::ZeroMode {
            mode: k + 1,
            lambda: lambdas[k],
        }),
        None => Ok(()),
    }
}

/// `(⟨q²⟩, ⟨p²⟩)` of a single oscillator of mass `m` and frequency `w`.
pub fn single_oscillator_moments(m: f64, w: f64, env: ThermalEnvironment) -> Result<(f64, f64)> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
    }
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidParameter(format!("frequency must be positive, got {w}")));
    }
    let coth = coth_factor(env.beta(), w);
    Ok((coth / (2.0 * m * w), 0.5 * m * w * coth))
}

/// Second moments of every normal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMoments {
    /// `⟨Qᵢ²⟩`
    pub q2: Vec<f64>,
    /// `⟨Pᵢ²⟩`
    pub p2: Vec<f64>,
}

impl ModeMoments {
    pub fn q_mean(&self, _mode: usize) -> f64 {
        0.0
    }

    pub fn p_mean(&self, _mode: usize) -> f64 {
        0.0
    }
}

pub fn mode_moments(basis: &NormalModeBasis, env: ThermalEnvironment) -> Result<ModeMoments> {
    require_positive_modes(basis.lambdas())?;
    let sqrt_mu = basis.mu().sqrt();
    let (q2, p2) = basis
        .lambdas()
        .iter()
        .map(|&lambda| {
            let sqrt_lambda = lambda.sqrt();
            let coth = coth_factor(env.beta(), sqrt_mu * sqrt_lambda);
            (
                sqrt_mu / (2.0 * sqrt_lambda) * coth,
                sqrt_lambda / (2.0 * sqrt_mu) * coth,
            )
        })
        .unzip();
    Ok(ModeMoments { q2, p2 })
}

/// Thermal position density of mode `mode` (1-based, ascending `λ`) at `Q = q`.
///
/// `ρ(Q) = √(κ/π)·exp(-κQ²)` with `κ = √(λ/μ)·tanh(β√(μλ)/2)`.
pub fn mode_position_density(basis: &NormalModeBasis, mode: usize, env: ThermalEnvironment, q: f64) -> Result<f64> {
    require_positive_modes(basis.lambdas())?;
    if mode == 0 || mode > basis.n() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range 1..={}",
            basis.n()
        )));
    }
    let lambda = basis.lambdas()[mode - 1];
    let mu = basis.mu();
    let kappa = (lambda / mu).sqrt() * tanh_factor(env.beta(), (mu * lambda).sqrt());
    Ok((kappa / PI).sqrt() * (-kappa * q * q).exp())
}
