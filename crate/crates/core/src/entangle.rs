//! Two-site covariance, partial transposition, the separability function `L`,
//! logarithmic negativity and the critical temperature.
//!
//! The covariance matrix `Γ` uses anticommutators, `Γₖₗ = ⟨RₖRₗ + RₗRₖ⟩`
//! with `R = (qᵢ, pᵢ, qⱼ, pⱼ)`, so the unit oscillator ground state has
//! `Γ = 1`, the uncertainty relation reads `Γ + iΩ ≥ 0` with
//! `Ω = σ ⊕ σ`, `σ = [[0, 1], [-1, 0]]`, and the PPT threshold on the
//! symplectic eigenvalues of the transposed state is `ν̃ = 1`.
//!
//! ```text
//!     | A 0 C 0 |
//! Γ = | 0 E 0 G |
//!     | C 0 H 0 |
//!     | 0 G 0 J |
//! ```

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::diag::{jacobi_eigh, simultaneous_diagonalize, NormalModeBasis};
use crate::error::{Error, Result};
use crate::network::{OscillatorNetwork, ThermalEnvironment};
use crate::thermal::{coth_factor, require_positive_modes};

/// Relative slack on `L` below which a state still counts as separable.
///
/// Boundary states (uncoupled ground states) have `L = 0` exactly in real
/// arithmetic; this keeps their verdict from depending on rounding.
pub const L_TOLERANCE: f64 = 1e-12;
/// Radicand of the negativity formula tolerated below zero, relative to its scale.
pub const RADICAND_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = 1e-12;

/// Two-site covariance entries. Sites are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCovariance {
    pub site_i: usize,
    pub site_j: usize,
    /// `2⟨qᵢ²⟩`
    pub a: f64,
    /// `2⟨pᵢ²⟩`
    pub e: f64,
    /// `⟨qᵢqⱼ + qⱼqᵢ⟩`
    pub c: f64,
    /// `⟨pᵢpⱼ + pⱼpᵢ⟩`
    pub g: f64,
    /// `2⟨qⱼ²⟩`
    pub h: f64,
    /// `2⟨pⱼ²⟩`
    pub j: f64,
}

impl PairCovariance {
    /// The 4×4 matrix in `(qᵢ, pᵢ, qⱼ, pⱼ)` order. The position–momentum
    /// entries are literal zeros.
    pub fn matrix(&self) -> Matrix4<f64> {
        let (a, e, c, g, h, j) = (self.a, self.e, self.c, self.g, self.h, self.j);
        Matrix4::new(
            a, 0.0, c, 0.0, //
            0.0, e, 0.0, g, //
            c, 0.0, h, 0.0, //
            0.0, g, 0.0, j,
        )
    }

    /// Smallest eigenvalue of the Hermitian matrix `Γ + iΩ`; non-negative for
    /// any physical state.
    pub fn uncertainty_min_eigenvalue(&self) -> Result<f64> {
        let gamma = self.matrix();
        let omega = symplectic_form();
        // X + iY  ->  [[X, -Y], [Y, X]]
        let embedded = DMatrix::from_fn(8, 8, |r, c| match (r < 4, c < 4) {
            (true, true) => gamma[(r, c)],
            (false, false) => gamma[(r - 4, c - 4)],
            (true, false) => -omega[(r, c - 4)],
            (false, true) => omega[(r - 4, c)],
        });
        Ok(jacobi_eigh(&embedded)?.values[0])
    }
}

/// `Ω = σ ⊕ σ`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

fn check_sites(i: usize, j: usize, n: usize) -> Result<()> {
    for site in [i, j] {
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, n });
        }
    }
    if i == j {
        return Err(Error::SameSite(i));
    }
    Ok(())
}

/// Covariance sums over modes, shared by the numerical and closed-form bases.
///
/// `q_weight(r, c, l)` is the real part of `A_rl·conj(A_cl)` and
/// `p_weight(r, c, l)` the real part of `(A⁻¹)_lr·conj((A⁻¹)_lc)`, with
/// 0-based indices.
pub(crate) fn covariance_from_modes(
    mu: f64,
    lambdas: &[f64],
    env: ThermalEnvironment,
    i: usize,
    j: usize,
    q_weight: impl Fn(usize, usize, usize) -> f64,
    p_weight: impl Fn(usize, usize, usize) -> f64,
) -> Result<PairCovariance> {
    check_sites(i, j, lambdas.len())?;
    require_positive_modes(lambdas)?;
    let (r, s) = (i - 1, j - 1);
    let sqrt_mu = mu.sqrt();
    let mut pc = PairCovariance {
        site_i: i,
        site_j: j,
        a: 0.0,
        e: 0.0,
        c: 0.0,
        g: 0.0,
        h: 0.0,
        j: 0.0,
    };
    for (l, &lambda) in lambdas.iter().enumerate() {
        let sqrt_lambda = lambda.sqrt();
        let coth = coth_factor(env.beta(), sqrt_mu * sqrt_lambda);
        let pos = sqrt_mu * coth / sqrt_lambda;
        let mom = sqrt_lambda * coth / sqrt_mu;
        pc.a += q_weight(r, r, l) * pos;
        pc.c += q_weight(r, s, l) * pos;
        pc.h += q_weight(s, s, l) * pos;
        pc.e += p_weight(r, r, l) * mom;
        pc.g += p_weight(r, s, l) * mom;
        pc.j += p_weight(s, s, l) * mom;
    }
    Ok(pc)
}

/// Covariance of sites `i` and `j` (1-based) in the thermal state.
pub fn pair_covariance(basis: &NormalModeBasis, env: ThermalEnvironment, i: usize, j: usize) -> Result<PairCovariance> {
    let a = basis.a();
    let a_inv = basis.a_inv();
    covariance_from_modes(
        basis.mu(),
        basis.lambdas(),
        env,
        i,
        j,
        |r, c, l| a[(r, l)] * a[(c, l)],
        |r, c, l| a_inv[(l, r)] * a_inv[(l, c)],
    )
}

/// `G → -G`, the partial transpose with respect to site `j`.
pub fn partial_transpose(pc: &PairCovariance) -> PairCovariance {
    PairCovariance { g: -pc.g, ..*pc }
}

/// `L = (C²−AH)(G²−EJ) + 2CG − HJ − AE + 1`; the pair is entangled when `L < 0`.
///
/// Evaluated on the untransposed entries: `L` is the determinant of
/// `Γᵀᵖ + iΩ` and equals `(1 − ν̃₋²)(1 − ν̃₊²)`.
pub fn separability_l(pc: &PairCovariance) -> f64 {
    let PairCovariance { a, e, c, g, h, j, .. } = *pc;
    (c * c - a * h) * (g * g - e * j) + 2.0 * c * g - h * j - a * e + 1.0
}

/// Entanglement verdict: `L` below zero by more than rounding noise.
pub fn is_entangled(pc: &PairCovariance) -> bool {
    let scale = 1.0_f64.max((pc.a * pc.h * pc.e * pc.j).abs());
    separability_l(pc) < -L_TOLERANCE * scale
}

/// Logarithmic negativity `E_N = −½ log₂{x − √(x² − d)}` with
/// `x = ½(AE + HJ) − CG` and `d = (C² − AH)(G² − EJ)`.
///
/// Zero for separable pairs. The braced term is `ν̃₋²` and is evaluated in
/// the cancellation-free form `d / (x + √(x² − d))`.
pub fn log_negativity(pc: &PairCovariance) -> Result<f64> {
    let PairCovariance { a, e, c, g, h, j, .. } = *pc;
    let x = 0.5 * (a * e + h * j) - c * g;
    let d = (c * c - a * h) * (g * g - e * j);
    let mut radicand = x * x - d;
    if radicand < 0.0 {
        if radicand < -RADICAND_TOLERANCE * (x * x).max(1.0) {
            return Err(Error::NegativeRadicand(radicand));
        }
        radicand = 0.0;
    }
    if !is_entangled(pc) {
        return Ok(0.0);
    }
    let brace = if x > 0.0 {
        d / (x + radicand.sqrt())
    } else {
        x - radicand.sqrt()
    };
    if brace.is_nan() || brace <= 0.0 {
        return Err(Error::NotPositiveSemidefinite(brace));
    }
    Ok((-0.5 * brace.log2()).max(0.0))
}

/// Symplectic eigenvalues `(ν₁ ≤ ν₂)` of `Γ`, or of its partial transpose
/// when `transposed` is set: the moduli of the eigenvalues of `iΩΓ`.
///
/// Computed from `Γ^{1/2}` as the singular values of the antisymmetric
/// matrix `Γ^{1/2} Ω Γ^{1/2}`, independently of [`separability_l`] and
/// [`log_negativity`].
pub fn symplectic_spectrum(pc: &PairCovariance, transposed: bool) -> Result<(f64, f64)> {
    let pc = if transposed { partial_transpose(pc) } else { *pc };
    let gamma = DMatrix::from_iterator(4, 4, pc.matrix().iter().copied());
    let eig = jacobi_eigh(&gamma)?;
    let top = eig.values[3].abs().max(f64::MIN_POSITIVE);
    if eig.values[0] < -PSD_TOLERANCE * top {
        return Err(Error::NotPositiveSemidefinite(eig.values[0]));
    }
    let root = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        eig.values.iter().map(|v| v.max(0.0).sqrt()),
    ));
    let sqrt_gamma = &eig.vectors * root * eig.vectors.transpose();
    let omega = DMatrix::from_iterator(4, 4, symplectic_form().iter().copied());
    let k = &sqrt_gamma * omega * &sqrt_gamma;
    let ktk = k.transpose() * &k;
    let ktk = (&ktk + ktk.transpose()) * 0.5;
    let squares = jacobi_eigh(&ktk)?.values;
    let nu1 = (0.5 * (squares[0] + squares[1])).max(0.0).sqrt();
    let nu2 = (0.5 * (squares[2] + squares[3])).max(0.0).sqrt();
    Ok((nu1, nu2))
}

/// Everything known about one pair at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub l_value: f64,
    pub log_negativity: f64,
    /// Symplectic spectrum of the partial transpose, ascending.
    pub nu_tilde: (f64, f64),
    pub entangled: bool,
}

pub fn entanglement_report(pc: &PairCovariance) -> Result<EntanglementReport> {
    Ok(EntanglementReport {
        l_value: separability_l(pc),
        log_negativity: log_negativity(pc)?,
        nu_tilde: symplectic_spectrum(pc, true)?,
        entangled: is_entangled(pc),
    })
}

/// Result of a critical-temperature search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalTemperature {
    /// Entangled just below, separable just above.
    Crossing(f64),
    /// Separable already at the lower end of the bracket.
    Separable,
    /// Still entangled at `t_max` after expanding the bracket.
    NoCrossing { t_max: f64 },
}

const BISECTION_RELATIVE_WIDTH: f64 = 1e-9;
const MAX_BRACKET_DOUBLINGS: usize = 60;

/// Temperature at which the pair `(i, j)` stops being entangled.
///
/// Starting from `t_lo`, where the pair must be entangled for a crossing to
/// exist, the upper end is doubled (up to 60 times) until the pair is
/// separable, and the bracket is then bisected to a relative width of 1e-9.
pub fn critical_temperature(
    net: &OscillatorNetwork,
    i: usize,
    j: usize,
    t_lo: f64,
    t_hi: f64,
) -> Result<CriticalTemperature> {
    if !(t_lo > 0.0 && t_hi > t_lo && t_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "invalid temperature bracket [{t_lo}, {t_hi}]"
        )));
    }
    let basis = simultaneous_diagonalize(net)?;
    critical_temperature_in_basis(&basis, i, j, t_lo, t_hi)
}

pub(crate) fn critical_temperature_in_basis(
    basis: &NormalModeBasis,
    i: usize,
    j: usize,
    t_lo: f64,
    t_hi: f64,
) -> Result<CriticalTemperature> {
    let entangled_at = |t: f64| -> Result<bool> {
        let env = ThermalEnvironment::from_temperature(t)?;
        Ok(is_entangled(&pair_covariance(basis, env, i, j)?))
    };
    if !entangled_at(t_lo)? {
        return Ok(CriticalTemperature::Separable);
    }
    let (mut lo, mut hi) = (t_lo, t_hi);
    let mut doublings = 0;
    while entangled_at(hi)? {
        if doublings == MAX_BRACKET_DOUBLINGS {
            return Ok(CriticalTemperature::NoCrossing { t_max: hi });
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    while hi - lo > BISECTION_RELATIVE_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if entangled_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalTemperature::Crossing(0.5 * (lo + hi)))
}
