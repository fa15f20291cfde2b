//! Oscillator networks, the uniform chain generators and the input document format.
//!
//! Site indices are 1-based at every public boundary (documents, CLI, the
//! `site` arguments of [`crate::entangle`]) and 0-based inside matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Absolute asymmetry tolerated (and removed) when a potential is loaded.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Boundary condition of a uniform chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    /// Periodic boundary: site n couples back to site 1.
    Circular,
    /// Fixed ends: the corner couplings of the circular matrix are zero.
    Linear,
}

impl std::str::FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "circular" => Ok(ChainKind::Circular),
            "linear" => Ok(ChainKind::Linear),
            other => Err(Error::InvalidParameter(format!(
                "unknown chain kind {other:?} (expected circular or linear)"
            ))),
        }
    }
}

impl std::fmt::Display for ChainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChainKind::Circular => "circular",
            ChainKind::Linear => "linear",
        })
    }
}

/// Oscillators with Hamiltonian `½ pᵀ T p + ½ qᵀ V q`, `T = diag(1/mᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorNetwork {
    masses: Vec<f64>,
    potential: DMatrix<f64>,
}

impl OscillatorNetwork {
    /// Validates the fields and symmetrizes the potential.
    ///
    /// Asymmetry up to [`SYMMETRY_TOLERANCE`] is averaged away; anything
    /// larger is rejected.
    pub fn new(masses: Vec<f64>, potential: DMatrix<f64>) -> Result<Self> {
        let n = masses.len();
        if n == 0 {
            return Err(Error::Schema {
                path: "network.masses".into(),
                msg: "at least one oscillator is required".into(),
            });
        }
        for (i, &m) in masses.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidMass {
                    path: format!("network.masses[{i}]"),
                    value: m,
                });
            }
        }
        if potential.nrows() != n {
            return Err(Error::DimensionMismatch {
                path: "network.potential".into(),
                expected: n,
                found: potential.nrows(),
            });
        }
        if potential.ncols() != n {
            return Err(Error::DimensionMismatch {
                path: "network.potential[0]".into(),
                expected: n,
                found: potential.ncols(),
            });
        }
        for r in 0..n {
            for c in 0..n {
                if !potential[(r, c)].is_finite() {
                    return Err(Error::Schema {
                        path: format!("network.potential[{r}][{c}]"),
                        msg: "entry must be finite".into(),
                    });
                }
            }
        }
        let mut potential = potential;
        for r in 0..n {
            for c in (r + 1)..n {
                let diff = (potential[(r, c)] - potential[(c, r)]).abs();
                if diff > SYMMETRY_TOLERANCE {
                    return Err(Error::PotentialNotSymmetric {
                        path: format!("network.potential[{r}][{c}]"),
                        row: r,
                        col: c,
                        diff,
                    });
                }
                let avg = 0.5 * (potential[(r, c)] + potential[(c, r)]);
                potential[(r, c)] = avg;
                potential[(c, r)] = avg;
            }
        }
        Ok(OscillatorNetwork { masses, potential })
    }

    /// Number of oscillators.
    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// The symmetric potential matrix `V`.
    pub fn potential(&self) -> &DMatrix<f64> {
        &self.potential
    }

    /// The diagonal kinetic matrix `T = diag(1/mᵢ)`.
    pub fn kinetic(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.n(),
            self.masses.iter().map(|m| 1.0 / m),
        ))
    }

    /// Relabels sites: new site `k` is old site `perm[k]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let masses = perm.iter().map(|&p| self.masses[p]).collect();
        let potential = DMatrix::from_fn(n, n, |r, c| self.potential[(perm[r], perm[c])]);
        Ok(OscillatorNetwork { masses, potential })
    }

    /// Explicit-form input document for this network.
    pub fn to_document(&self) -> Value {
        let rows: Vec<Vec<f64>> = self
            .potential
            .row_iter()
            .map(|row| row.iter().copied().collect())
            .collect();
        serde_json::json!({ "network": { "masses": self.masses, "potential": rows } })
    }
}

/// Canonical-ensemble bath, `β = 1/T` with ħ = k_B = 1.
///
/// `β = +∞` is the ground state and is represented exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnvironment {
    beta: f64,
}

impl ThermalEnvironment {
    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 {
            Ok(ThermalEnvironment { beta })
        } else {
            Err(Error::InvalidParameter(format!(
                "beta must be positive (or +inf), got {beta}"
            )))
        }
    }

    pub fn ground_state() -> Self {
        ThermalEnvironment { beta: f64::INFINITY }
    }

    /// `T = 0` maps to the ground state.
    pub fn from_temperature(t: f64) -> Result<Self> {
        if t == 0.0 {
            Ok(Self::ground_state())
        } else if t > 0.0 && t.is_finite() {
            Self::new(1.0 / t)
        } else {
            Err(Error::InvalidParameter(format!(
                "temperature must be non-negative and finite, got {t}"
            )))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn is_ground_state(&self) -> bool {
        self.beta == f64::INFINITY
    }
}

fn check_chain_params(n: usize, mass: f64, onsite: f64, coupling: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("chain needs n >= 1".into()));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidMass {
            path: "network.mass".into(),
            value: mass,
        });
    }
    if !onsite.is_finite() || !coupling.is_finite() {
        return Err(Error::InvalidParameter(
            "onsite and coupling must be finite".into(),
        ));
    }
    Ok(())
}

/// Uniform chain with nearest-neighbour springs and periodic boundary.
///
/// `V[i][i] = onsite + 2·coupling`, `V[i][i±1 mod n] = -coupling`. With
/// `onsite = 0` the matrix is the ring Laplacian, whose uniform translation
/// is a zero mode. Rings of one or two sites sum the coincident springs:
/// `n = 1` gives `[[onsite]]` and `n = 2` has off-diagonal `-2·coupling`.
pub fn make_circular_chain(n: usize, mass: f64, onsite: f64, coupling: f64) -> Result<OscillatorNetwork> {
    check_chain_params(n, mass, onsite, coupling)?;
    let potential = match n {
        1 => DMatrix::from_element(1, 1, onsite),
        2 => {
            let d = onsite + 2.0 * coupling;
            let o = -2.0 * coupling;
            DMatrix::from_row_slice(2, 2, &[d, o, o, d])
        }
        _ => DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                onsite + 2.0 * coupling
            } else if (r + 1) % n == c || (c + 1) % n == r {
                -coupling
            } else {
                0.0
            }
        }),
    };
    Ok(OscillatorNetwork {
        masses: vec![mass; n],
        potential,
    })
}

/// Uniform chain with fixed ends: the circular matrix without its corner terms.
pub fn make_linear_chain(n: usize, mass: f64, onsite: f64, coupling: f64) -> Result<OscillatorNetwork> {
    check_chain_params(n, mass, onsite, coupling)?;
    let potential = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            onsite + 2.0 * coupling
        } else if r + 1 == c || c + 1 == r {
            -coupling
        } else {
            0.0
        }
    });
    Ok(OscillatorNetwork {
        masses: vec![mass; n],
        potential,
    })
}

/// Builds either chain kind.
pub fn make_chain(kind: ChainKind, n: usize, mass: f64, onsite: f64, coupling: f64) -> Result<OscillatorNetwork> {
    match kind {
        ChainKind::Circular => make_circular_chain(n, mass, onsite, coupling),
        ChainKind::Linear => make_linear_chain(n, mass, onsite, coupling),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    network: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitForm {
    masses: Vec<f64>,
    potential: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorForm {
    kind: ChainKind,
    n: usize,
    mass: f64,
    onsite: f64,
    coupling: f64,
}

fn from_value<T: serde::de::DeserializeOwned>(prefix: &str, value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            prefix.to_string()
        } else {
            format!("{prefix}.{inner}")
        };
        Error::Schema {
            path,
            msg: e.into_inner().to_string(),
        }
    })
}

/// Parses a JSON network document.
///
/// Two forms are accepted:
///
/// ```text
/// {"network": {"masses": [...], "potential": [[...], ...]}}
/// {"network": {"kind": "circular"|"linear", "n": 4, "mass": 1, "onsite": 1, "coupling": 1}}
/// ```
pub fn parse_network(document: &str) -> Result<OscillatorNetwork> {
    let root: Value = serde_json::from_str(document).map_err(|e| Error::Schema {
        path: "$".into(),
        msg: e.to_string(),
    })?;
    let doc: Document = from_value("$", root)?;
    let is_generator = doc
        .network
        .as_object()
        .map(|o| o.contains_key("kind"))
        .unwrap_or(false);
    if is_generator {
        let g: GeneratorForm = from_value("network", doc.network)?;
        make_chain(g.kind, g.n, g.mass, g.onsite, g.coupling)
    } else {
        let e: ExplicitForm = from_value("network", doc.network)?;
        let n = e.masses.len();
        if e.potential.len() != n {
            return Err(Error::DimensionMismatch {
                path: "network.potential".into(),
                expected: n,
                found: e.potential.len(),
            });
        }
        for (r, row) in e.potential.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    path: format!("network.potential[{r}]"),
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let potential = DMatrix::from_fn(n, n, |r, c| e.potential[r][c]);
        OscillatorNetwork::new(e.masses, potential)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_document_round_trips() {
        let net = parse_network(r#"{"network": {"masses": [1, 1], "potential": [[2, -1], [-1, 2]]}}"#).unwrap();
        assert_eq!(net.masses(), &[1.0, 1.0]);
        assert_eq!(net.potential(), &DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        let again = parse_network(&net.to_document().to_string()).unwrap();
        assert_eq!(again, net);
    }

    #[test]
    fn generator_document_delegates() {
        let net = parse_network(
            r#"{"network": {"kind": "circular", "n": 4, "mass": 1, "onsite": 1, "coupling": 1}}"#,
        )
        .unwrap();
        assert_eq!(net, make_circular_chain(4, 1.0, 1.0, 1.0).unwrap());
        let lin = parse_network(
            r#"{"network": {"kind": "linear", "n": 3, "mass": 2, "onsite": 0, "coupling": 1}}"#,
        )
        .unwrap();
        assert_eq!(lin, make_linear_chain(3, 2.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn asymmetric_potential_rejected() {
        let err = parse_network(r#"{"network": {"masses": [1, 1], "potential": [[1, 0.5], [0.4, 1]]}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("potential not symmetric"), "{err}");
        assert!(err.to_string().contains("network.potential[0][1]"), "{err}");
    }

    #[test]
    fn tiny_asymmetry_is_averaged() {
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5 + 4e-13, 1.0]);
        let net = OscillatorNetwork::new(vec![1.0, 1.0], v).unwrap();
        assert_eq!(net.potential()[(0, 1)], net.potential()[(1, 0)]);
        assert!((net.potential()[(0, 1)] - (0.5 + 2e-13)).abs() < 1e-15);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let cases = [
            (r#"{"network": {"masses": [1, -1], "potential": [[1, 0], [0, 1]]}}"#, "network.masses[1]"),
            (r#"{"network": {"masses": [1, 1], "potential": [[1, 0]]}}"#, "network.potential"),
            (r#"{"network": {"masses": [1, 1], "potential": [[1, 0], [0]]}}"#, "network.potential[1]"),
            (r#"{"network": {"masses": [1, "x"], "potential": [[1, 0], [0, 1]]}}"#, "network.masses[1]"),
            (r#"{"network": {"kind": "spiral", "n": 3, "mass": 1, "onsite": 0, "coupling": 1}}"#, "network.kind"),
            (r#"{"network": {"kind": "linear", "n": 3, "mass": 1, "onsite": 0}}"#, "network"),
            (r#"{"network": {"kind": "linear", "n": 3, "mass": 0, "onsite": 0, "coupling": 1}}"#, "network.mass"),
            (r#"{"net": {}}"#, "$"),
            (r#"not json"#, "$"),
        ];
        for (doc, path) in cases {
            let err = parse_network(doc).unwrap_err();
            assert_eq!(err.kind(), crate::ErrorKind::Input);
            assert!(err.to_string().starts_with(path), "{doc}: {err}");
        }
    }

    #[test]
    fn circular_chain_pattern() {
        let net = make_circular_chain(4, 1.0, 0.0, 1.0).unwrap();
        let first = [2.0, -1.0, 0.0, -1.0];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(net.potential()[(r, c)], first[(c + 4 - r) % 4]);
            }
        }
        assert_eq!(
            make_circular_chain(3, 1.0, 5.0, 0.0).unwrap().potential(),
            &(DMatrix::identity(3, 3) * 5.0)
        );
        let big = make_circular_chain(8, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(big.potential()[(0, 0)], 3.0);
        assert_eq!(big.potential()[(0, 7)], -1.0);
        assert_eq!(big.masses(), &[2.0; 8]);
    }

    #[test]
    fn linear_chain_pattern() {
        let net = make_linear_chain(3, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(
            net.potential(),
            &DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0])
        );
        assert_eq!(make_linear_chain(1, 1.0, 4.0, 0.0).unwrap().potential()[(0, 0)], 4.0);
        assert_eq!(
            make_linear_chain(2, 1.0, 1.0, 0.5).unwrap().potential(),
            &DMatrix::from_row_slice(2, 2, &[2.0, -0.5, -0.5, 2.0])
        );
    }

    #[test]
    fn small_rings_sum_coincident_springs() {
        assert_eq!(make_circular_chain(1, 1.0, 0.7, 3.0).unwrap().potential()[(0, 0)], 0.7);
        let two = make_circular_chain(2, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(two.potential(), &DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]));
    }

    #[test]
    fn chain_parameter_errors() {
        assert!(make_circular_chain(0, 1.0, 0.0, 1.0).is_err());
        assert!(make_linear_chain(3, 0.0, 0.0, 1.0).is_err());
        assert!(make_linear_chain(3, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn circular_chain_is_cyclically_invariant() {
        let net = make_circular_chain(7, 1.3, 0.4, 0.9).unwrap();
        let shift: Vec<usize> = (0..7).map(|k| (k + 1) % 7).collect();
        assert_eq!(net.permuted(&shift).unwrap(), net);
        assert_eq!(net.potential(), &net.potential().transpose());
    }

    #[test]
    fn thermal_environment_rules() {
        assert!(ThermalEnvironment::new(0.0).is_err());
        assert!(ThermalEnvironment::new(-1.0).is_err());
        assert!(ThermalEnvironment::new(f64::NAN).is_err());
        assert!(ThermalEnvironment::new(f64::INFINITY).unwrap().is_ground_state());
        assert_eq!(ThermalEnvironment::from_temperature(0.5).unwrap().beta(), 2.0);
        assert!(ThermalEnvironment::from_temperature(0.0).unwrap().is_ground_state());
        assert!(ThermalEnvironment::from_temperature(-1.0).is_err());
    }
}
