//! Canonical simultaneous diagonalization of the kinetic and potential forms.
//!
//! With `R = √(T/μ)`, `μ = (det T)^{1/n}` and `S` the orthogonal eigenvectors
//! of `R·V·R`, the transform `q = A·Q`, `p = (A⁻¹)ᵀ·P` with `A = R·S` turns
//! `½ pᵀTp + ½ qᵀVq` into `Σ ½μPᵢ² + ½λᵢQᵢ²` while keeping `[Qᵢ, Pⱼ] = iδᵢⱼ`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::OscillatorNetwork;

const EIGH_SYMMETRY_TOLERANCE: f64 = 1e-12;
const EIGH_RELATIVE_THRESHOLD: f64 = 1e-14;
const EIGH_MAX_SWEEPS: usize = 100;
const SIGN_THRESHOLD: f64 = 1e-12;
/// Negative eigenvalues smaller than this (relative to max |λ|) are rounding noise.
const NEGATIVE_LAMBDA_TOLERANCE: f64 = 1e-12;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigh {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthogonal; column `k` belongs to `values[k]`.
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the off-diagonal Frobenius norm falls below
/// `1e-14·‖m‖_F`, failing after 100 sweeps. Eigenvalues are sorted ascending
/// (stable, so ties keep Jacobi column order) and each eigenvector is signed
/// so that its first component of magnitude above `1e-12` is positive.
pub fn jacobi_eigh(m: &DMatrix<f64>) -> Result<Eigh> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidParameter(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("eigensolver input has non-finite entries".into()));
    }
    for r in 0..n {
        for c in (r + 1)..n {
            let diff = (m[(r, c)] - m[(c, r)]).abs();
            if diff > EIGH_SYMMETRY_TOLERANCE {
                return Err(Error::MatrixNotSymmetric { row: r, col: c, diff });
            }
        }
    }

    let mut a = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            m[(r, c)]
        } else {
            0.5 * (m[(r, c)] + m[(c, r)])
        }
    });
    let mut v = DMatrix::<f64>::identity(n, n);
    let threshold = EIGH_RELATIVE_THRESHOLD * m.norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == EIGH_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    for mut col in vectors.column_iter_mut() {
        if let Some(first) = col.iter().copied().find(|x| x.abs() > SIGN_THRESHOLD) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
    Ok(Eigh { values, vectors })
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a[(r, c)] * a[(r, c)];
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    let n = a.nrows();
    for r in 0..n {
        if r != p && r != q {
            let g = a[(r, p)];
            let h = a[(r, q)];
            let rp = g - s * (h + g * tau);
            let rq = h + s * (g - h * tau);
            a[(r, p)] = rp;
            a[(p, r)] = rp;
            a[(r, q)] = rq;
            a[(q, r)] = rq;
        }
    }
    for r in 0..n {
        let g = v[(r, p)];
        let h = v[(r, q)];
        v[(r, p)] = g - s * (h + g * tau);
        v[(r, q)] = h + s * (g - h * tau);
    }
}

/// Normal-mode basis of an oscillator network.
///
/// `λ` may contain zero or negative values here; thermal consumers reject
/// them, spectral inspection does not.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeBasis {
    mu: f64,
    r_diag: Vec<f64>,
    s: DMatrix<f64>,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    lambdas: Vec<f64>,
}

impl NormalModeBasis {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `μ = (det T)^{1/n}`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Diagonal of `R = √(T/μ)`.
    pub fn r_diag(&self) -> &[f64] {
        &self.r_diag
    }

    /// Orthogonal eigenvectors of `R·V·R`.
    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// `A = R·S`, with `q = A·Q`.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// `A⁻¹ = Sᵀ·R⁻¹`, with `p = (A⁻¹)ᵀ·P`.
    pub fn a_inv(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    /// Eigenvalues of `R·V·R`, ascending.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

pub fn simultaneous_diagonalize(net: &OscillatorNetwork) -> Result<NormalModeBasis> {
    let n = net.n();
    let inv_masses: Vec<f64> = net.masses().iter().map(|m| 1.0 / m).collect();
    // geometric mean in log space so large n cannot overflow the determinant
    let mu = (inv_masses.iter().map(|t| t.ln()).sum::<f64>() / n as f64).exp();
    let r_diag: Vec<f64> = inv_masses.iter().map(|t| (t / mu).sqrt()).collect();

    let v = net.potential();
    let rvr = DMatrix::from_fn(n, n, |r, c| (r_diag[r] * r_diag[c]) * v[(r, c)]);
    let Eigh { values, vectors: s } = jacobi_eigh(&rvr)?;

    let a = DMatrix::from_fn(n, n, |r, c| r_diag[r] * s[(r, c)]);
    let a_inv = DMatrix::from_fn(n, n, |r, c| s[(c, r)] / r_diag[c]);
    Ok(NormalModeBasis {
        mu,
        r_diag,
        s,
        a,
        a_inv,
        lambdas: values,
    })
}

/// Phonon frequencies `ωᵢ = √(μλᵢ)`, ascending.
///
/// Eigenvalues within `1e-12·max|λ|` below zero are rounding noise and give
/// `ω = 0`; anything more negative is an unstable potential.
pub fn mode_frequencies(basis: &NormalModeBasis) -> Result<Vec<f64>> {
    let scale = basis.lambdas.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    basis
        .lambdas
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            if lambda < -NEGATIVE_LAMBDA_TOLERANCE * scale {
                Err(Error::UnstableMode { mode: k + 1, lambda })
            } else {
                Ok((basis.mu * lambda.max(0.0)).sqrt())
            }
        })
        .collect()
}
