//! Shared generators and oracles for the integration tests.
//!
//! Nothing here calls into the implementation's eigensolver: spectra are
//! cross-checked with nalgebra's `SymmetricEigen`.

#![allow(dead_code)]

use harmonic_entanglement::{NormalModeBasis, OscillatorNetwork, ThermalEnvironment};
use nalgebra::DMatrix;
use rand::Rng;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Masses log-uniform in [0.1, 10], `V = MᵀM + εI` with `M` uniform in [-1, 1].
pub fn random_network<R: Rng>(rng: &mut R, n: usize, epsilon: f64) -> OscillatorNetwork {
    let masses: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..=1.0))).collect();
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0));
    let v = m.transpose() * &m + DMatrix::identity(n, n) * epsilon;
    let v = (&v + v.transpose()) * 0.5;
    OscillatorNetwork::new(masses, v).expect("generated network is valid")
}

/// β log-uniform in [0.1, 100], or the ground state one time in five.
pub fn random_env<R: Rng>(rng: &mut R) -> ThermalEnvironment {
    if rng.gen_range(0..5) == 0 {
        ThermalEnvironment::ground_state()
    } else {
        ThermalEnvironment::new(10f64.powf(rng.gen_range(-1.0..=2.0))).unwrap()
    }
}

pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let i = rng.gen_range(1..=n);
    let mut j = rng.gen_range(1..n);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Worst-case violations of the normal-mode basis invariants.
#[derive(Debug, Clone, Copy)]
pub struct DiagResiduals {
    /// max |SᵀS − I|
    pub orthogonality: f64,
    /// max |Sᵀ(RVR)S − diag λ| / max|λ|
    pub rvr: f64,
    /// max |AᵀVA − diag λ| / max|λ|
    pub potential: f64,
    /// max |A⁻¹T(A⁻¹)ᵀ − μI| / μ
    pub kinetic: f64,
    /// max |M Ω Mᵀ − Ω| for M = diag(A, (A⁻¹)ᵀ) in interleaved (q, p) order
    pub symplectic: f64,
}

pub fn diag_residuals(net: &OscillatorNetwork, b: &NormalModeBasis) -> DiagResiduals {
    let n = net.n();
    let scale = b.lambdas().iter().fold(0.0_f64, |acc, l| acc.max(l.abs())).max(f64::MIN_POSITIVE);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(b.lambdas()));
    let r = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(b.r_diag()));
    let s = b.s();
    let a = b.a();
    let a_inv = b.a_inv();
    let v = net.potential();
    let t = net.kinetic();

    let orthogonality = max_abs(&(s.transpose() * s - DMatrix::identity(n, n)));
    let rvr = max_abs(&(s.transpose() * (&r * v * &r) * s - &d)) / scale;
    let potential = max_abs(&(a.transpose() * v * a - &d)) / scale;
    let kinetic = max_abs(&(a_inv * &t * a_inv.transpose() - DMatrix::identity(n, n) * b.mu())) / b.mu();

    let mut big = DMatrix::zeros(2 * n, 2 * n);
    let a_inv_t = a_inv.transpose();
    for x in 0..n {
        for y in 0..n {
            big[(2 * x, 2 * y)] = a[(x, y)];
            big[(2 * x + 1, 2 * y + 1)] = a_inv_t[(x, y)];
        }
    }
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    let symplectic = max_abs(&(&big * &omega * big.transpose() - &omega));
    DiagResiduals {
        orthogonality,
        rvr,
        potential,
        kinetic,
        symplectic,
    }
}

/// Classical normal-mode frequencies: square roots of the eigenvalues of
/// `T^{1/2} V T^{1/2}`, via nalgebra, ascending.
pub fn classical_frequencies(net: &OscillatorNetwork) -> Vec<f64> {
    let n = net.n();
    let half = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        net.masses().iter().map(|m| (1.0 / m).sqrt()),
    ));
    let k = &half * net.potential() * &half;
    let mut w: Vec<f64> = k
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    w.sort_by(f64::total_cmp);
    w
}

/// Eigenvalues of a symmetric matrix via nalgebra, ascending.
pub fn reference_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        left + right + diff / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // split first so a narrow peak cannot hide between the initial nodes
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = simpson(x0, x1, f0, fm, f1);
            adaptive(f, x0, x1, f0, fm, f1, whole, tol / pieces as f64, 40)
        })
        .sum()
}
