//! Closed-form normal modes of uniform chains with unit coupling.
//!
//! For equal masses `R` is the identity, so the transform diagonalizing the
//! chain is the one diagonalizing `V` itself:
//!
//! - circular: `(A)ₖₗ = exp(2πi·kl/n)/√n`, `λₗ = shift + 4 sin²(πl/n)`,
//! - linear: `(A)ₖₗ = √(2/(n+1))·sin(πkl/(n+1))`, `λₗ = shift + 4 sin²(πl/(2(n+1)))`,
//!
//! with `k, l = 1…n`. The pinning shift adds to every eigenvalue because it
//! is a multiple of the identity. The circular transform is unitary rather
//! than real, so complex arithmetic stays inside this module.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use crate::entangle::{covariance_from_modes, PairCovariance};
use crate::error::{Error, Result};
use crate::network::ThermalEnvironment;

pub use crate::network::ChainKind;

/// Mode transform of a chain; columns are modes, rows are sites.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeMatrix {
    Complex(DMatrix<Complex<f64>>),
    Real(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticBasis {
    kind: ChainKind,
    modes: ModeMatrix,
    /// In mode order `l = 1…n`, not sorted.
    lambdas: Vec<f64>,
}

fn check_shift(onsite_shift: f64) -> Result<()> {
    if onsite_shift >= 0.0 && onsite_shift.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "onsite shift must be non-negative and finite, got {onsite_shift}"
        )))
    }
}

/// Fourier modes of the ring. At zero shift mode `l = n` is the zero mode.
pub fn circular_modes(n: usize, onsite_shift: f64) -> Result<AnalyticBasis> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("circular chain needs n >= 3, got {n}")));
    }
    check_shift(onsite_shift)?;
    let norm = 1.0 / (n as f64).sqrt();
    let a = DMatrix::from_fn(n, n, |r, c| {
        let (k, l) = (r + 1, c + 1);
        // reduce kl mod n before scaling so the phase stays exact for large n
        let phase = 2.0 * PI * ((k * l) % n) as f64 / n as f64;
        Complex::from_polar(norm, phase)
    });
    let lambdas = (1..=n)
        .map(|l| onsite_shift + 4.0 * (PI * (l % n) as f64 / n as f64).sin().powi(2))
        .collect();
    Ok(AnalyticBasis {
        kind: ChainKind::Circular,
        modes: ModeMatrix::Complex(a),
        lambdas,
    })
}

/// Standing-wave modes of the chain with fixed ends.
pub fn linear_modes(n: usize, onsite_shift: f64) -> Result<AnalyticBasis> {
    if n < 1 {
        return Err(Error::InvalidParameter("linear chain needs n >= 1".into()));
    }
    check_shift(onsite_shift)?;
    let m = (n + 1) as f64;
    let norm = (2.0 / m).sqrt();
    let a = DMatrix::from_fn(n, n, |r, c| norm * (PI * ((r + 1) * (c + 1)) as f64 / m).sin());
    let lambdas = (1..=n)
        .map(|l| onsite_shift + 4.0 * (PI * l as f64 / (2.0 * m)).sin().powi(2))
        .collect();
    Ok(AnalyticBasis {
        kind: ChainKind::Linear,
        modes: ModeMatrix::Real(a),
        lambdas,
    })
}

impl AnalyticBasis {
    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn modes(&self) -> &ModeMatrix {
        &self.modes
    }

    /// The transform as a complex matrix, whatever the chain kind.
    pub fn a_complex(&self) -> DMatrix<Complex<f64>> {
        match &self.modes {
            ModeMatrix::Complex(a) => a.clone(),
            ModeMatrix::Real(a) => a.map(|x| Complex::new(x, 0.0)),
        }
    }

    /// Eigenvalues in mode order `l = 1…n`.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn sorted_lambdas(&self) -> Vec<f64> {
        let mut l = self.lambdas.clone();
        l.sort_by(f64::total_cmp);
        l
    }

    /// Covariance of sites `i`, `j` (1-based) for the chain of equal masses
    /// `mass` and unit coupling, i.e. `make_chain(kind, n, mass, shift, 1)`.
    ///
    /// Complex mode products enter through their real part,
    /// `Re(A_il·conj(A_jl))`; `A⁻¹ = A†` gives the same weights for momenta.
    pub fn pair_covariance(&self, mass: f64, env: ThermalEnvironment, i: usize, j: usize) -> Result<PairCovariance> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let mu = 1.0 / mass;
        match &self.modes {
            ModeMatrix::Complex(a) => {
                let w = |r: usize, c: usize, l: usize| (a[(r, l)] * a[(c, l)].conj()).re;
                covariance_from_modes(mu, &self.lambdas, env, i, j, w, w)
            }
            ModeMatrix::Real(a) => {
                let w = |r: usize, c: usize, l: usize| a[(r, l)] * a[(c, l)];
                covariance_from_modes(mu, &self.lambdas, env, i, j, w, w)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::jacobi_eigh;
    use crate::network::{make_circular_chain, make_linear_chain};

    fn max_abs_c(m: &DMatrix<Complex<f64>>) -> f64 {
        m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    #[test]
    fn ring_of_four() {
        let b = circular_modes(4, 0.0).unwrap();
        let expected = [2.0, 4.0, 2.0, 0.0];
        for (got, want) in b.lambdas().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{:?}", b.lambdas());
        }
        assert_eq!(b.lambdas()[3], 0.0);
        let shifted = circular_modes(4, 0.5).unwrap();
        assert!((shifted.lambdas()[1] - 4.5).abs() < 1e-15);
    }

    #[test]
    fn fourier_matrix_is_unitary_and_diagonalizes_ring() {
        for n in [3, 4, 7, 16] {
            let a = circular_modes(n, 0.0).unwrap().a_complex();
            let id = DMatrix::<Complex<f64>>::identity(n, n);
            assert!(max_abs_c(&(a.adjoint() * &a - &id)) < 1e-12);

            let v = make_circular_chain(n, 1.0, 0.0, 1.0).unwrap().potential().map(|x| Complex::new(x, 0.0));
            let d = a.adjoint() * v * &a;
            let lambdas = circular_modes(n, 0.0).unwrap().lambdas().to_vec();
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { lambdas[r] } else { 0.0 };
                    assert!((d[(r, c)] - Complex::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_modes_values_and_orthogonality() {
        let b = linear_modes(3, 0.0).unwrap();
        assert!((b.lambdas()[1] - 2.0).abs() < 1e-15);
        let a = match b.modes() {
            ModeMatrix::Real(a) => a.clone(),
            ModeMatrix::Complex(_) => unreachable!(),
        };
        let orth = a.transpose() * &a - DMatrix::identity(3, 3);
        assert!(orth.iter().all(|x| x.abs() < 1e-12));
        assert!(linear_modes(1, 0.0).unwrap().lambdas()[0] > 0.0);
    }

    #[test]
    fn linear_spectrum_matches_eigensolver() {
        for n in [1, 2, 5, 17, 64] {
            let numeric = jacobi_eigh(make_linear_chain(n, 1.0, 0.0, 1.0).unwrap().potential()).unwrap().values;
            let exact = linear_modes(n, 0.0).unwrap().sorted_lambdas();
            for (x, y) in numeric.iter().zip(&exact) {
                assert!((x - y).abs() <= 1e-9 * 4.0, "n = {n}");
            }
        }
    }

    #[test]
    fn argument_errors() {
        assert!(circular_modes(2, 0.0).is_err());
        assert!(circular_modes(5, -0.1).is_err());
        assert!(linear_modes(0, 0.0).is_err());
        let b = circular_modes(5, 0.0).unwrap();
        assert!(matches!(
            b.pair_covariance(1.0, ThermalEnvironment::ground_state(), 1, 2),
            Err(Error::ZeroMode { mode: 5, .. })
        ));
    }
}
