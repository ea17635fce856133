//! Finite-dimensional matrix representations of the observable sets used
//! throughout: su(2) spin-j triples, truncated su(1,1) discrete-series
//! triples D⁺(k), and truncated Fock-space canonical quadratures.
//!
//! Conventions (ħ = 1 everywhere):
//!   su(2):   `[J₁,J₂] = iJ₃` and cyclic; J₃|j,m⟩ = m|j,m⟩.
//!   su(1,1): `[K₁,K₂] = -iK₃`, `[K₂,K₃] = iK₁`, `[K₃,K₁] = iK₂`, the
//!            bracket set consistent with K₃ bounded below. With
//!            K± = K₁ ± iK₂ this gives `[K₃,K±] = ±K±` and
//!            `[K₋,K₊] = 2K₃`, realized on the basis |k,n⟩ by
//!            K₃|k,n⟩ = (k+n)|k,n⟩ and K₊|k,n⟩ = √((n+1)(2k+n))|k,n+1⟩.
//!   Fock:    q = (a+a†)/√2, p = (a-a†)/(i√2), so `[q,p] = i` and the
//!            ground-state variance of either quadrature is 1/2.
//!
//! Truncation policy: operators are built at the full dimension, but raising
//! operators corrupt only the last rows, so every commutator identity holds
//! exactly on the interior subspace (all but the top two basis levels).
//! Downstream moment code requires states to carry negligible mass there.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, C64};

/// A declared commutation relation `[X_i, X_j] = i(constant·I + Σ_k coeffs[k]·X_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Commutator {
    pub lhs: (usize, usize),
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

/// An ordered list of Hermitian observables on a common finite space,
/// with optional declared commutation structure and an interior mask
/// marking the basis levels free of truncation artifacts.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    pub labels: Vec<String>,
    pub matrices: Vec<DMatrix<C64>>,
    pub structure: Option<Vec<Commutator>>,
    pub interior_mask: Vec<bool>,
}

impl ObservableSet {
    /// Builds and validates a set: matching dimensions, Hermitian members.
    pub fn new(
        labels: Vec<String>,
        matrices: Vec<DMatrix<C64>>,
        structure: Option<Vec<Commutator>>,
        interior_mask: Vec<bool>,
    ) -> Result<Self> {
        if labels.len() != matrices.len() || matrices.is_empty() {
            return Err(Error::InvalidParameter(
                "labels and matrices must be nonempty and of equal length".into(),
            ));
        }
        let dim = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: m.nrows(),
                });
            }
            matcore::require_hermitian(m)?;
        }
        if interior_mask.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: interior_mask.len(),
            });
        }
        Ok(ObservableSet {
            labels,
            matrices,
            structure,
            interior_mask,
        })
    }

    /// Number of observables.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    /// Number of interior (truncation-artifact-free) basis levels.
    pub fn interior_dim(&self) -> usize {
        self.interior_mask.iter().filter(|&&b| b).count()
    }

    /// True when the representation is exact (no truncated levels).
    pub fn is_exact(&self) -> bool {
        self.interior_dim() == self.dim()
    }

    /// The observables transformed as `X'_i = Σ_j Λ_ij X_j`. The declared
    /// structure is dropped (it no longer matches the labels).
    pub fn transformed(&self, lambda: &DMatrix<f64>) -> Result<ObservableSet> {
        let n = self.len();
        if lambda.nrows() != n || lambda.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: lambda.nrows(),
            });
        }
        let dim = self.dim();
        let matrices: Vec<DMatrix<C64>> = (0..n)
            .map(|i| {
                let mut acc = DMatrix::<C64>::zeros(dim, dim);
                for j in 0..n {
                    acc += self.matrices[j].scale(lambda[(i, j)]);
                }
                acc
            })
            .collect();
        let labels = (0..n).map(|i| format!("T{}", self.labels[i])).collect();
        ObservableSet::new(labels, matrices, None, self.interior_mask.clone())
    }
}

/// Which representation a state or observable set lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Su2,
    Su11,
    Fock,
}

/// Serializable description of a representation: kind, weight (j for su(2),
/// Bargmann index k for su(1,1), absent for Fock), truncation dimension, and
/// for Fock sets the mode count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub kind: RepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
}

impl RepSpec {
    pub fn su2(j: f64) -> Result<Self> {
        let d = su2_dim(j)?;
        Ok(RepSpec {
            kind: RepKind::Su2,
            weight: Some(j),
            dim: d,
            modes: None,
        })
    }

    pub fn su11(k: f64, dim: usize) -> Result<Self> {
        let spec = RepSpec {
            kind: RepKind::Su11,
            weight: Some(k),
            dim,
            modes: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fock(modes: usize, dim_per_mode: usize) -> Result<Self> {
        let spec = RepSpec {
            kind: RepKind::Fock,
            weight: None,
            dim: dim_per_mode,
            modes: Some(modes),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            RepKind::Su2 => {
                let j = self.weight.ok_or_else(|| {
                    Error::InvalidParameter("su2 spec requires a weight j".into())
                })?;
                let d = su2_dim(j)?;
                if d != self.dim {
                    return Err(Error::InvalidParameter(format!(
                        "su2 with j = {j} forces dim = {d}, got {}",
                        self.dim
                    )));
                }
                if self.modes.is_some() {
                    return Err(Error::InvalidParameter(
                        "su2 spec takes no mode count".into(),
                    ));
                }
            }
            RepKind::Su11 => {
                let k = self.weight.ok_or_else(|| {
                    Error::InvalidParameter("su11 spec requires a weight k".into())
                })?;
                if !k.is_finite() || k <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "k must be positive, got {k}"
                    )));
                }
                if self.dim < 4 {
                    return Err(Error::InvalidParameter(format!(
                        "su11 truncation needs dim >= 4, got {}",
                        self.dim
                    )));
                }
                if self.modes.is_some() {
                    return Err(Error::InvalidParameter(
                        "su11 spec takes no mode count".into(),
                    ));
                }
            }
            RepKind::Fock => {
                if self.weight.is_some() {
                    return Err(Error::InvalidParameter("fock spec takes no weight".into()));
                }
                let modes = self.modes.unwrap_or(1);
                if !(1..=2).contains(&modes) {
                    return Err(Error::InvalidParameter(format!(
                        "fock supports 1 or 2 modes, got {modes}"
                    )));
                }
                if self.dim < 4 {
                    return Err(Error::InvalidParameter(format!(
                        "fock truncation needs dim >= 4 per mode, got {}",
                        self.dim
                    )));
                }
            }
        }
        Ok(())
    }

    /// Total Hilbert-space dimension (per-mode dim to the mode-count power
    /// for Fock sets).
    pub fn total_dim(&self) -> usize {
        match self.kind {
            RepKind::Fock => self.dim.pow(self.modes.unwrap_or(1) as u32),
            _ => self.dim,
        }
    }

    /// The same spec at a different truncation dimension (su(2) dims are
    /// fixed by j and pass through unchanged).
    pub fn with_dim(&self, dim: usize) -> RepSpec {
        match self.kind {
            RepKind::Su2 => self.clone(),
            _ => RepSpec {
                dim,
                ..self.clone()
            },
        }
    }

    /// Builds the observable set this spec describes.
    pub fn observables(&self) -> Result<ObservableSet> {
        self.validate()?;
        match self.kind {
            RepKind::Su2 => su2_generators(self.weight.unwrap()),
            RepKind::Su11 => su11_generators(self.weight.unwrap(), self.dim),
            RepKind::Fock => fock_quadratures(self.modes.unwrap_or(1), self.dim),
        }
    }
}

fn su2_dim(j: f64) -> Result<usize> {
    let two_j = 2.0 * j;
    if !(two_j.is_finite() && two_j > 0.0 && (two_j - two_j.round()).abs() < 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "j must be a positive half-integer, got {j}"
        )));
    }
    Ok(two_j.round() as usize + 1)
}

fn real_mat(dim: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |r, c| C64::new(f(r, c), 0.0))
}

/// Standard angular-momentum matrices {J₁, J₂, J₃} for spin j (exact
/// finite representation; every basis level is interior).
pub fn su2_generators(j: f64) -> Result<ObservableSet> {
    let dim = su2_dim(j)?;
    // basis |j,m⟩ with m = -j + n, n = 0..2j
    let m_of = |n: usize| -j + n as f64;
    let raise = |n: usize| {
        let m = m_of(n);
        (j * (j + 1.0) - m * (m + 1.0)).sqrt()
    };
    let jp = real_mat(dim, |r, c| if r == c + 1 { raise(c) } else { 0.0 });
    let jm = jp.adjoint();
    let j1 = (&jp + &jm).scale(0.5);
    let j2 = (&jp - &jm) * C64::new(0.0, -0.5);
    let j3 = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C64::new(m_of(r), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let structure = vec![
        Commutator {
            lhs: (0, 1),
            coeffs: vec![0.0, 0.0, 1.0],
            constant: 0.0,
        },
        Commutator {
            lhs: (1, 2),
            coeffs: vec![1.0, 0.0, 0.0],
            constant: 0.0,
        },
        Commutator {
            lhs: (2, 0),
            coeffs: vec![0.0, 1.0, 0.0],
            constant: 0.0,
        },
    ];
    ObservableSet::new(
        vec!["J1".into(), "J2".into(), "J3".into()],
        vec![j1, j2, j3],
        Some(structure),
        vec![true; dim],
    )
}

/// Truncated discrete-series generators {K₁, K₂, K₃} of su(1,1) at Bargmann
/// index k, on the basis |k,n⟩, n = 0..dim-1. The top two levels are outside
/// the interior mask.
pub fn su11_generators(k: f64, dim: usize) -> Result<ObservableSet> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "k must be positive, got {k}"
        )));
    }
    if dim < 4 {
        return Err(Error::InvalidParameter(format!(
            "su11 truncation needs dim >= 4, got {dim}"
        )));
    }
    let kp = real_mat(dim, |r, c| {
        if r == c + 1 {
            let n = c as f64;
            ((n + 1.0) * (2.0 * k + n)).sqrt()
        } else {
            0.0
        }
    });
    let km = kp.adjoint();
    let k1 = (&kp + &km).scale(0.5);
    let k2 = (&kp - &km) * C64::new(0.0, -0.5);
    let k3 = real_mat(dim, |r, c| if r == c { k + r as f64 } else { 0.0 });
    let structure = vec![
        Commutator {
            lhs: (0, 1),
            coeffs: vec![0.0, 0.0, -1.0],
            constant: 0.0,
        },
        Commutator {
            lhs: (1, 2),
            coeffs: vec![1.0, 0.0, 0.0],
            constant: 0.0,
        },
        Commutator {
            lhs: (2, 0),
            coeffs: vec![0.0, 1.0, 0.0],
            constant: 0.0,
        },
    ];
    let mut interior = vec![true; dim];
    interior[dim - 1] = false;
    interior[dim - 2] = false;
    ObservableSet::new(
        vec!["K1".into(), "K2".into(), "K3".into()],
        vec![k1, k2, k3],
        Some(structure),
        interior,
    )
}

/// Truncated boson lowering operator on dim Fock levels.
pub fn fock_lowering(dim: usize) -> DMatrix<C64> {
    real_mat(dim, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

/// Canonical quadratures {q₁..q_N, p₁..p_N} for N ∈ {1, 2} modes, ordered to
/// match the symplectic form. The interior excludes the top two Fock levels
/// of each mode.
pub fn fock_quadratures(modes: usize, dim_per_mode: usize) -> Result<ObservableSet> {
    if !(1..=2).contains(&modes) {
        return Err(Error::InvalidParameter(format!(
            "fock supports 1 or 2 modes, got {modes}"
        )));
    }
    if dim_per_mode < 4 {
        return Err(Error::InvalidParameter(format!(
            "fock truncation needs dim >= 4 per mode, got {dim_per_mode}"
        )));
    }
    let a = fock_lowering(dim_per_mode);
    let ad = a.adjoint();
    let q1m = (&a + &ad).scale(1.0 / 2f64.sqrt());
    let p1m = (&a - &ad) * C64::new(0.0, -1.0 / 2f64.sqrt());
    let mode_interior: Vec<bool> = (0..dim_per_mode).map(|n| n < dim_per_mode - 2).collect();

    if modes == 1 {
        let structure = vec![Commutator {
            lhs: (0, 1),
            coeffs: vec![0.0, 0.0],
            constant: 1.0,
        }];
        return ObservableSet::new(
            vec!["q".into(), "p".into()],
            vec![q1m, p1m],
            Some(structure),
            mode_interior,
        );
    }

    let id = DMatrix::<C64>::identity(dim_per_mode, dim_per_mode);
    let q1 = q1m.kronecker(&id);
    let q2 = id.kronecker(&q1m);
    let p1 = p1m.kronecker(&id);
    let p2 = id.kronecker(&p1m);
    let total = dim_per_mode * dim_per_mode;
    let interior: Vec<bool> = (0..total)
        .map(|idx| mode_interior[idx / dim_per_mode] && mode_interior[idx % dim_per_mode])
        .collect();
    let zero4 = vec![0.0; 4];
    let structure = vec![
        Commutator {
            lhs: (0, 2),
            coeffs: zero4.clone(),
            constant: 1.0,
        },
        Commutator {
            lhs: (1, 3),
            coeffs: zero4.clone(),
            constant: 1.0,
        },
        Commutator {
            lhs: (0, 1),
            coeffs: zero4.clone(),
            constant: 0.0,
        },
        Commutator {
            lhs: (2, 3),
            coeffs: zero4.clone(),
            constant: 0.0,
        },
        Commutator {
            lhs: (0, 3),
            coeffs: zero4.clone(),
            constant: 0.0,
        },
        Commutator {
            lhs: (1, 2),
            coeffs: zero4,
            constant: 0.0,
        },
    ];
    ObservableSet::new(
        vec!["q1".into(), "q2".into(), "p1".into(), "p2".into()],
        vec![q1, q2, p1, p2],
        Some(structure),
        interior,
    )
}

/// Operator 2-norm of a complex matrix (largest singular value).
fn op_norm(m: &DMatrix<C64>) -> f64 {
    let gram = m.adjoint() * m;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max)
        .max(0.0)
        .sqrt()
}

/// Max over declared commutators of the operator-norm residual of
/// `[X_i,X_j] - i(c·I + Σ f_k X_k)`, restricted to the interior columns.
/// A correctly masked truncated set reads back 0 (up to roundoff).
pub fn structure_residual(set: &ObservableSet) -> Result<f64> {
    let structure = set.structure.as_ref().ok_or(Error::MissingStructure)?;
    let dim = set.dim();
    let mut worst = 0.0_f64;
    for com in structure {
        let (i, j) = com.lhs;
        if i >= set.len() || j >= set.len() || com.coeffs.len() != set.len() {
            return Err(Error::InvalidParameter(
                "commutator spec indices do not match the observable set".into(),
            ));
        }
        let mut expected = DMatrix::<C64>::identity(dim, dim) * C64::new(0.0, com.constant);
        for (kidx, &f) in com.coeffs.iter().enumerate() {
            if f != 0.0 {
                expected += &set.matrices[kidx] * C64::new(0.0, f);
            }
        }
        let mut residual =
            &set.matrices[i] * &set.matrices[j] - &set.matrices[j] * &set.matrices[i] - expected;
        for c in 0..dim {
            if !set.interior_mask[c] {
                for r in 0..dim {
                    residual[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
        worst = worst.max(op_norm(&residual));
    }
    Ok(worst)
}

/// Casimir operator of an su(2) or su(1,1) triple: J² = J₁²+J₂²+J₃², or
/// K₃²-K₁²-K₂² for su(1,1).
pub fn casimir(set: &ObservableSet, kind: RepKind) -> Result<DMatrix<C64>> {
    if set.len() != 3 {
        return Err(Error::InvalidParameter(
            "Casimir needs a 3-generator set".into(),
        ));
    }
    let sq = |m: &DMatrix<C64>| m * m;
    match kind {
        RepKind::Su2 => Ok(sq(&set.matrices[0]) + sq(&set.matrices[1]) + sq(&set.matrices[2])),
        RepKind::Su11 => Ok(sq(&set.matrices[2]) - sq(&set.matrices[0]) - sq(&set.matrices[1])),
        RepKind::Fock => Err(Error::InvalidParameter(
            "no Casimir for quadrature sets".into(),
        )),
    }
}

/// Interior-masked vector norm helper used in module tests.
pub fn masked_norm(v: &DVector<C64>, mask: &[bool]) -> f64 {
    v.iter()
        .zip(mask.iter())
        .filter(|(_, &m)| m)
        .map(|(x, _)| x.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
