//! Expectation values, the uncertainty matrix σ, the mean-commutator matrix
//! C, and eigenstate residuals, for pure and mixed states.
//!
//! σ_jk = ⟨X_jX_k + X_kX_j⟩/2 - ⟨X_j⟩⟨X_k⟩ and C_jk = (-i/2)⟨[X_j, X_k]⟩.
//! The symmetrized products are computed explicitly and symmetry asserted
//! afterwards, which catches truncation corruption instead of hiding it.
//! Products of truncated observables widen the corrupted band by one row
//! each, so a truncated set requires states with tail mass below
//! [`crate::states::TAIL_TOL`] and two spare interior rows.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::ObservableSet;
use crate::error::{Error, Result};
use crate::matcore::{self, C64};
use crate::states::{QuantumState, StateData, TAIL_TOL};

/// The (σ, C) pair for a (state, observables) combination, plus the means
/// and the state's tail-mass diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MomentPairDto", into = "MomentPairDto")]
pub struct MomentPair {
    pub sigma: DMatrix<f64>,
    pub cmat: DMatrix<f64>,
    pub means: DVector<f64>,
    pub state_tail_mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct MomentPairDto {
    sigma: Vec<Vec<f64>>,
    cmat: Vec<Vec<f64>>,
    means: Vec<f64>,
    state_tail_mass: f64,
}

pub(crate) fn mat_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub(crate) fn rows_to_mat(rows: &[Vec<f64>]) -> std::result::Result<DMatrix<f64>, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err("matrix rows must form a square".into());
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl From<MomentPair> for MomentPairDto {
    fn from(mp: MomentPair) -> Self {
        MomentPairDto {
            sigma: mat_to_rows(&mp.sigma),
            cmat: mat_to_rows(&mp.cmat),
            means: mp.means.iter().cloned().collect(),
            state_tail_mass: mp.state_tail_mass,
        }
    }
}

impl TryFrom<MomentPairDto> for MomentPair {
    type Error = String;

    fn try_from(dto: MomentPairDto) -> std::result::Result<Self, String> {
        Ok(MomentPair {
            sigma: rows_to_mat(&dto.sigma)?,
            cmat: rows_to_mat(&dto.cmat)?,
            means: DVector::from_vec(dto.means),
            state_tail_mass: dto.state_tail_mass,
        })
    }
}

impl MomentPair {
    /// Number of observables.
    pub fn len(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.nrows() == 0
    }

    /// σ + iC, the Hermitian companion whose nonnegativity is the content of
    /// the uncertainty relations.
    pub fn hermitian_companion(&self) -> DMatrix<C64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| C64::new(self.sigma[(i, j)], self.cmat[(i, j)]))
    }
}

/// A complex combination Σ βᵢXᵢ over an observable set.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCombination {
    pub coeffs: Vec<C64>,
}

impl ComplexCombination {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidParameter(
                "combination coefficients must not all vanish".into(),
            ));
        }
        Ok(ComplexCombination { coeffs })
    }

    /// The matrix Σ βᵢXᵢ.
    pub fn matrix(&self, set: &ObservableSet) -> Result<DMatrix<C64>> {
        if self.coeffs.len() != set.len() {
            return Err(Error::DimensionMismatch {
                left: self.coeffs.len(),
                right: set.len(),
            });
        }
        let dim = set.dim();
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for (beta, x) in self.coeffs.iter().zip(&set.matrices) {
            if beta.norm() != 0.0 {
                acc += x * *beta;
            }
        }
        Ok(acc)
    }
}

fn check_dims(op_dim: usize, state: &QuantumState) -> Result<()> {
    if op_dim != state.dim() {
        return Err(Error::DimensionMismatch {
            left: op_dim,
            right: state.dim(),
        });
    }
    Ok(())
}

/// ⟨ψ|A|ψ⟩ or Tr(ρA) for an arbitrary (not necessarily Hermitian) operator.
pub fn expectation_complex(op: &DMatrix<C64>, state: &QuantumState) -> Result<C64> {
    check_dims(op.nrows(), state)?;
    match &state.data {
        StateData::Pure(v) => Ok(v.dotc(&(op * v))),
        StateData::Mixed(rho) => {
            // Tr(ρA) = Σ_ab ρ_ab A_ba
            let n = rho.nrows();
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    acc += rho[(a, b)] * op[(b, a)];
                }
            }
            Ok(acc)
        }
    }
}

/// Real expectation value of a Hermitian observable; asserts the imaginary
/// part is below 1e-10 before dropping it.
pub fn expectation(x: &DMatrix<C64>, state: &QuantumState) -> Result<f64> {
    let val = expectation_complex(x, state)?;
    let scale = f64::max(1.0, val.norm());
    if val.im.abs() > 1e-10 * scale {
        return Err(Error::NotHermitian {
            defect: val.im.abs(),
        });
    }
    Ok(val.re)
}

/// All second moments ⟨X_iX_j⟩ for a pure state via matrix-vector products
/// (never forming operator products), or via Tr(ρX_iX_j) for mixed states.
fn second_moments(set: &ObservableSet, state: &QuantumState) -> Result<DMatrix<C64>> {
    let n = set.len();
    match &state.data {
        StateData::Pure(v) => {
            let applied: Vec<DVector<C64>> = set.matrices.iter().map(|x| x * v).collect();
            Ok(DMatrix::from_fn(n, n, |i, j| applied[i].dotc(&applied[j])))
        }
        StateData::Mixed(rho) => {
            let products: Vec<DMatrix<C64>> = set.matrices.iter().map(|x| x * rho).collect();
            let dim = rho.nrows();
            Ok(DMatrix::from_fn(n, n, |i, j| {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        acc += set.matrices[i][(a, b)] * products[j][(b, a)];
                    }
                }
                acc
            }))
        }
    }
}

/// The uncertainty matrix σ and mean-commutator matrix C for a (state,
/// observables) pair. Fails when a truncated set is paired with a state
/// whose tail mass makes the products unsafe, when the symmetrized moments
/// come out asymmetric, or when σ + iC is not PSD within 1e-10 (the latter
/// two indicate truncation corruption, not physics).
pub fn moment_pair(set: &ObservableSet, state: &QuantumState) -> Result<MomentPair> {
    check_dims(set.dim(), state)?;
    if !set.is_exact() && state.tail_mass >= TAIL_TOL {
        return Err(Error::TailMassTooLarge {
            tail: state.tail_mass,
        });
    }
    let n = set.len();
    let mut means = DVector::<f64>::zeros(n);
    for i in 0..n {
        means[i] = expectation(&set.matrices[i], state)?;
    }

    let raw = second_moments(set, state)?;
    let mut sigma = DMatrix::<f64>::zeros(n, n);
    let mut cmat = DMatrix::<f64>::zeros(n, n);
    let scale = f64::max(1.0, matcore::max_abs_c(&raw));
    for i in 0..n {
        for j in 0..n {
            let sym = (raw[(i, j)] + raw[(j, i)]) * 0.5;
            if sym.im.abs() > 1e-10 * scale {
                return Err(Error::NotSymmetric {
                    defect: sym.im.abs(),
                });
            }
            sigma[(i, j)] = sym.re - means[i] * means[j];
            // ⟨[X_i, X_j]⟩ = 2i·Im⟨X_iX_j⟩, so C_ij = Im⟨X_iX_j⟩ up to the
            // explicit antisymmetrization below.
            cmat[(i, j)] = 0.5 * (raw[(i, j)] - raw[(j, i)]).im;
        }
    }

    let sym_defect = matcore::max_abs(&(&sigma - sigma.transpose()));
    if sym_defect > 1e-12 * f64::max(1.0, matcore::max_abs(&sigma)) {
        return Err(Error::NotSymmetric { defect: sym_defect });
    }
    let pair = MomentPair {
        sigma,
        cmat,
        means,
        state_tail_mass: state.tail_mass,
    };
    let companion = pair.hermitian_companion();
    let tol = 1e-10 * f64::max(1.0, matcore::max_abs_c(&companion));
    if !matcore::is_psd(&companion, tol)? {
        let min_eig = matcore::min_eigenvalue(&companion)?;
        return Err(Error::MomentMatrixNotPsd { min_eig });
    }
    Ok(pair)
}

/// Eigenstate residual of B = Σ βᵢXᵢ on a pure state: returns
/// (‖(B - ⟨B⟩)ψ‖, ⟨B⟩). Zero residual iff ψ is an eigenstate. Mixed states
/// are rejected (eigenstate conditions are pure-state statements).
pub fn eigenstate_residual(
    combo: &ComplexCombination,
    set: &ObservableSet,
    state: &QuantumState,
) -> Result<(f64, C64)> {
    let v = state.vector()?;
    check_dims(set.dim(), state)?;
    let b = combo.matrix(set)?;
    let applied = &b * v;
    let rayleigh = v.dotc(&applied);
    let residual = (&applied - v * rayleigh).norm();
    Ok((residual, rayleigh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fock_quadratures, su11_generators, su2_generators};
    use crate::states::{bg_cs, fock_number, su11_cs, su11_lowest, vacuum};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expectation_values() {
        let set = su2_generators(1.0).unwrap();
        let up = QuantumState::from_coefficients(
            DVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            None,
        )
        .unwrap();
        assert_relative_eq!(
            expectation(&set.matrices[2], &up).unwrap(),
            1.0,
            epsilon = 1e-14
        );

        let fock = fock_quadratures(1, 16).unwrap();
        let vac = vacuum(16).unwrap();
        let q = &fock.matrices[0];
        let q2 = q * q;
        assert_relative_eq!(expectation(&q2, &vac).unwrap(), 0.5, epsilon = 1e-14);

        let k3 = &su11_generators(0.25, 64).unwrap().matrices[2];
        let zcs = su11_cs(c(0.5, 0.0), 0.25, 64).unwrap();
        assert_relative_eq!(expectation(k3, &zcs).unwrap(), 5.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn moment_pair_vacuum_quadratures() {
        let set = fock_quadratures(1, 16).unwrap();
        let vac = vacuum(16).unwrap();
        let mp = moment_pair(&set, &vac).unwrap();
        assert_relative_eq!(mp.sigma[(0, 0)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(mp.sigma[(1, 1)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(mp.sigma[(0, 1)], 0.0, epsilon = 1e-14);
        // ⟨[q,p]⟩ = i so C₁₂ = (-i/2)(i) = 1/2
        assert_relative_eq!(mp.cmat[(0, 1)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(mp.cmat[(1, 0)], -0.5, epsilon = 1e-14);
    }

    #[test]
    fn moment_pair_spin_up_pauli_oracle() {
        let set = su2_generators(0.5).unwrap();
        // |↑⟩ = |m=+1/2⟩ is the second basis vector
        let up = QuantumState::from_coefficients(
            DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            None,
        )
        .unwrap();
        let mp = moment_pair(&set, &up).unwrap();
        assert_relative_eq!(mp.sigma[(0, 0)], 0.25, epsilon = 1e-15);
        assert_relative_eq!(mp.sigma[(1, 1)], 0.25, epsilon = 1e-15);
        assert_relative_eq!(mp.sigma[(2, 2)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(mp.sigma[(0, 1)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(mp.cmat[(0, 1)], 0.25, epsilon = 1e-15);
        assert_relative_eq!(mp.cmat[(0, 2)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(mp.cmat[(1, 2)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn moment_pair_su11_lowest_weight_oracle() {
        for k in [0.25, 0.5, 1.0] {
            let set = su11_generators(k, 16).unwrap();
            let lowest = su11_lowest(k, 16).unwrap();
            let mp = moment_pair(&set, &lowest).unwrap();
            assert_relative_eq!(mp.sigma[(0, 0)], k / 2.0, epsilon = 1e-13);
            assert_relative_eq!(mp.sigma[(1, 1)], k / 2.0, epsilon = 1e-13);
            assert_relative_eq!(mp.sigma[(2, 2)], 0.0, epsilon = 1e-13);
            // [K₁,K₂] = -iK₃ gives C₁₂ = -⟨K₃⟩/2 = -k/2
            assert_relative_eq!(mp.cmat[(0, 1)], -k / 2.0, epsilon = 1e-13);
            assert_relative_eq!(mp.cmat[(0, 2)], 0.0, epsilon = 1e-13);
            assert_relative_eq!(mp.cmat[(1, 2)], 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn eigenstate_residual_bg_state() {
        let (z, k, dim) = (c(0.9, 0.25), 0.5, 48);
        let set = su11_generators(k, dim).unwrap();
        let state = bg_cs(z, k, dim).unwrap();
        // K₋ = K₁ - iK₂
        let combo = ComplexCombination::new(vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        let (res, rayleigh) = eigenstate_residual(&combo, &set, &state).unwrap();
        assert!(res < 1e-9, "residual {res}");
        assert!((rayleigh - z).norm() < 1e-9);
    }

    #[test]
    fn eigenstate_residual_vacuum_q() {
        let set = fock_quadratures(1, 16).unwrap();
        let vac = vacuum(16).unwrap();
        let combo = ComplexCombination::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let (res, rayleigh) = eigenstate_residual(&combo, &set, &vac).unwrap();
        assert_relative_eq!(res, 0.5_f64.sqrt(), epsilon = 1e-13);
        assert!(rayleigh.norm() < 1e-13);
    }

    #[test]
    fn eigenstate_residual_maximal_symmetry_combination() {
        // su11_cs(ζ) is an eigenstate of 2K₁ + wK₃ with w = -(ζ + 1/ζ) and
        // eigenvalue -k(1/ζ - ζ): at ζ = 0.5, β = (2, 0, -2.5), z = -1.5k.
        let (k, dim) = (0.75, 64);
        let set = su11_generators(k, dim).unwrap();
        let state = su11_cs(c(0.5, 0.0), k, dim).unwrap();
        let combo = ComplexCombination::new(vec![c(2.0, 0.0), c(0.0, 0.0), c(-2.5, 0.0)]).unwrap();
        let (res, rayleigh) = eigenstate_residual(&combo, &set, &state).unwrap();
        assert!(res < 1e-8, "residual {res}");
        assert_relative_eq!(rayleigh.re, -1.5 * k, epsilon = 1e-9);
        assert!(rayleigh.im.abs() < 1e-10);
    }

    #[test]
    fn mixed_states_rejected_for_residuals() {
        let set = su2_generators(0.5).unwrap();
        let rho = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        let mixed = QuantumState::mixed(rho, None).unwrap();
        let combo = ComplexCombination::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            eigenstate_residual(&combo, &set, &mixed),
            Err(Error::MixedStateUnsupported)
        ));
    }

    #[test]
    fn mixed_state_moments() {
        // maximally mixed spin-1/2: σ = diag(1/4,1/4,1/4), C = 0
        let set = su2_generators(0.5).unwrap();
        let rho = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        let mixed = QuantumState::mixed(rho, None).unwrap();
        let mp = moment_pair(&set, &mixed).unwrap();
        for i in 0..3 {
            assert_relative_eq!(mp.sigma[(i, i)], 0.25, epsilon = 1e-14);
            for j in 0..3 {
                assert_relative_eq!(mp.cmat[(i, j)], 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn tail_guard_rejects_boundary_states() {
        let set = su11_generators(0.5, 16).unwrap();
        let top = fock_number(14, 16);
        assert!(top.is_err());
        // hand-build a state sitting on the boundary
        let mut v = DVector::<C64>::zeros(16);
        v[15] = c(1.0, 0.0);
        let state = QuantumState::from_coefficients(v, None).unwrap();
        assert!(matches!(
            moment_pair(&set, &state),
            Err(Error::TailMassTooLarge { .. })
        ));
    }

    #[test]
    fn moment_pair_serializes_round_trip() {
        let set = fock_quadratures(1, 16).unwrap();
        let vac = vacuum(16).unwrap();
        let mp = moment_pair(&set, &vac).unwrap();
        let json = serde_json::to_string(&mp).unwrap();
        let back: MomentPair = serde_json::from_str(&json).unwrap();
        assert_eq!(mp, back);
    }
}
