//! State-family constructors, as coefficient vectors in the representation
//! bases: SU(1,1) maximal-symmetry coherent states, Bloch states,
//! Barut–Girardello states, the general algebraic family |z,u,v,w;k⟩ built
//! both from its confluent-hypergeometric series and by a numerical
//! eigensolve, squeezed vacua, and even/odd coherent states.
//!
//! Analytic-representation pairing: a state Σ cₙ|k,n⟩ corresponds to the
//! analytic function f(η) = Σ cₙ ηⁿ/√(n! Γ(2k+n)), the unique weight under
//! which the differential realization K₊ = η, K₋ = 2k d/dη + η d²/dη²,
//! K₃ = k + η d/dη acts with the matrix elements used in [`crate::algebra`].
//! All series are evaluated directly in basis-coefficient space through
//! their defining recurrences, so no Γ or factorial is ever materialized
//! and nothing overflows at large truncation.
//!
//! Every constructor returns a unit-norm state with its overall phase fixed
//! by making the first nonzero coefficient real positive, and errors when
//! the top two basis levels carry more than [`TAIL_TOL`] of the norm.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{RepKind, RepSpec};
use crate::error::{Error, Result};
use crate::matcore::{self, C64};

/// Norm fraction allowed in the top two basis levels of a truncated state.
pub const TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// A unit-norm pure state or a trace-one PSD mixed state, tagged with the
/// representation basis it is expressed in (absent for ad-hoc bases) and a
/// tail-mass diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuantumStateDto", into = "QuantumStateDto")]
pub struct QuantumState {
    pub data: StateData,
    pub basis: Option<RepSpec>,
    pub tail_mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct QuantumStateDto {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Vec<Vec<C64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<RepSpec>,
    tail_mass: f64,
}

impl From<QuantumState> for QuantumStateDto {
    fn from(s: QuantumState) -> Self {
        match &s.data {
            StateData::Pure(v) => QuantumStateDto {
                kind: "pure".into(),
                coefficients: Some(v.iter().cloned().collect()),
                density: None,
                basis: s.basis,
                tail_mass: s.tail_mass,
            },
            StateData::Mixed(m) => QuantumStateDto {
                kind: "mixed".into(),
                coefficients: None,
                density: Some(
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                        .collect(),
                ),
                basis: s.basis,
                tail_mass: s.tail_mass,
            },
        }
    }
}

impl TryFrom<QuantumStateDto> for QuantumState {
    type Error = String;

    fn try_from(dto: QuantumStateDto) -> std::result::Result<Self, String> {
        // Accept stored values verbatim (no renormalization) so serialized
        // reports round-trip bit for bit, but sanity-check the invariants.
        match dto.kind.as_str() {
            "pure" => {
                let coeffs = dto.coefficients.ok_or("pure state needs coefficients")?;
                let v = DVector::from_vec(coeffs);
                if (v.norm() - 1.0).abs() > 1e-9 {
                    return Err(format!("pure state norm {} is not 1", v.norm()));
                }
                Ok(QuantumState {
                    data: StateData::Pure(v),
                    basis: dto.basis,
                    tail_mass: dto.tail_mass,
                })
            }
            "mixed" => {
                let rows = dto.density.ok_or("mixed state needs a density matrix")?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err("density matrix must be square".into());
                }
                let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
                let trace = m.trace();
                if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
                    return Err(format!("density matrix trace {trace} is not 1"));
                }
                Ok(QuantumState {
                    data: StateData::Mixed(m),
                    basis: dto.basis,
                    tail_mass: dto.tail_mass,
                })
            }
            other => Err(format!("unknown state kind {other}")),
        }
    }
}

fn top_two_mass(v: &DVector<C64>) -> f64 {
    let d = v.len();
    if d < 3 {
        return 0.0;
    }
    v[d - 1].norm_sqr() + v[d - 2].norm_sqr()
}

/// Rotates the global phase so the first nonzero coefficient is real positive.
fn fix_phase(v: &mut DVector<C64>) {
    let max = v.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()));
    if max == 0.0 {
        return;
    }
    if let Some(lead) = v.iter().find(|c| c.norm() > 1e-14 * max) {
        let phase = lead / lead.norm();
        let rot = phase.conj();
        for c in v.iter_mut() {
            *c *= rot;
        }
    }
}

impl QuantumState {
    /// Normalizes, fixes the phase, and wraps a coefficient vector. The
    /// caller is responsible for any tail-mass policy.
    pub fn from_coefficients(mut v: DVector<C64>, basis: Option<RepSpec>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidParameter(
                "state coefficients must be finite and not all zero".into(),
            ));
        }
        v /= C64::new(norm, 0.0);
        fix_phase(&mut v);
        let tail_mass = top_two_mass(&v);
        Ok(QuantumState {
            data: StateData::Pure(v),
            basis,
            tail_mass,
        })
    }

    /// As [`Self::from_coefficients`], then errors unless the tail mass is
    /// below [`TAIL_TOL`].
    pub fn from_truncated_coefficients(v: DVector<C64>, basis: Option<RepSpec>) -> Result<Self> {
        let state = Self::from_coefficients(v, basis)?;
        if state.tail_mass >= TAIL_TOL {
            return Err(Error::TruncationTooSmall {
                dim: state.dim(),
                tail: state.tail_mass,
                limit: TAIL_TOL,
            });
        }
        Ok(state)
    }

    /// Validates and wraps a density matrix: Hermitian, trace one, min
    /// eigenvalue ≥ -1e-10.
    pub fn mixed(rho: DMatrix<C64>, basis: Option<RepSpec>) -> Result<Self> {
        matcore::require_hermitian(&rho)?;
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace must be 1, got {trace}"
            )));
        }
        let min_eig = matcore::min_eigenvalue(&rho)?;
        if min_eig < -1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        let d = rho.nrows();
        let tail_mass = if d < 3 {
            0.0
        } else {
            rho[(d - 1, d - 1)].re + rho[(d - 2, d - 2)].re
        };
        Ok(QuantumState {
            data: StateData::Mixed(rho),
            basis,
            tail_mass,
        })
    }

    pub fn dim(&self) -> usize {
        match &self.data {
            StateData::Pure(v) => v.len(),
            StateData::Mixed(m) => m.nrows(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn vector(&self) -> Result<&DVector<C64>> {
        match &self.data {
            StateData::Pure(v) => Ok(v),
            StateData::Mixed(_) => Err(Error::MixedStateUnsupported),
        }
    }

    /// |⟨self|other⟩| for two pure states.
    pub fn overlap(&self, other: &QuantumState) -> Result<f64> {
        let a = self.vector()?;
        let b = other.vector()?;
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(a.dotc(b).norm())
    }
}

/// Fock number state |n⟩ on dim levels.
pub fn fock_number(n: usize, dim: usize) -> Result<QuantumState> {
    if dim < 4 {
        return Err(Error::InvalidParameter(format!(
            "dim must be >= 4, got {dim}"
        )));
    }
    if n + 2 >= dim {
        return Err(Error::TruncationTooSmall {
            dim,
            tail: 1.0,
            limit: TAIL_TOL,
        });
    }
    let v = DVector::from_fn(dim, |i, _| {
        if i == n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    QuantumState::from_truncated_coefficients(v, Some(RepSpec::fock(1, dim)?))
}

/// Fock vacuum on dim levels.
pub fn vacuum(dim: usize) -> Result<QuantumState> {
    fock_number(0, dim)
}

/// Lowest-weight vector |k,0⟩ of the su(1,1) representation.
pub fn su11_lowest(k: f64, dim: usize) -> Result<QuantumState> {
    let spec = RepSpec::su11(k, dim)?;
    let v = DVector::from_fn(dim, |i, _| {
        if i == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    QuantumState::from_truncated_coefficients(v, Some(spec))
}

/// SU(1,1) coherent state with maximal symmetry,
/// N exp(ζK₊)|k,0⟩ with |ζ| < 1: coefficients cₙ ∝ ζⁿ √(Γ(2k+n)/(n! Γ(2k))).
pub fn su11_cs(zeta: C64, k: f64, dim: usize) -> Result<QuantumState> {
    let spec = RepSpec::su11(k, dim)?;
    if zeta.norm() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "su(1,1) coherent states require |zeta| < 1, got {}",
            zeta.norm()
        )));
    }
    let mut v = DVector::<C64>::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    v[0] = c;
    for n in 0..dim - 1 {
        let nf = n as f64;
        c *= zeta * ((2.0 * k + nf) / (nf + 1.0)).sqrt();
        v[n + 1] = c;
    }
    QuantumState::from_truncated_coefficients(v, Some(spec))
}

/// Bloch (SU(2)) coherent state N exp(τJ₊)|j,-j⟩:
/// cₙ = τⁿ √(C(2j,n)), exact at the finite dimension 2j+1.
pub fn bloch_cs(tau: C64, j: f64) -> Result<QuantumState> {
    let spec = RepSpec::su2(j)?;
    let dim = spec.dim;
    let two_j = dim - 1;
    let mut v = DVector::<C64>::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    v[0] = c;
    for n in 0..two_j {
        // C(2j, n+1)/C(2j, n) = (2j - n)/(n + 1)
        c *= tau * (((two_j - n) as f64) / ((n + 1) as f64)).sqrt();
        v[n + 1] = c;
    }
    let state = QuantumState::from_coefficients(v, Some(spec))?;
    Ok(state)
}

/// Barut–Girardello state: eigenstate of K₋ with eigenvalue z,
/// via the recurrence c_{n+1} = z·cₙ/√((n+1)(2k+n)).
pub fn bg_cs(z: C64, k: f64, dim: usize) -> Result<QuantumState> {
    let spec = RepSpec::su11(k, dim)?;
    let mut v = DVector::<C64>::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    v[0] = c;
    for n in 0..dim - 1 {
        let nf = n as f64;
        c *= z / ((nf + 1.0) * (2.0 * k + nf)).sqrt();
        v[n + 1] = c;
    }
    let state = QuantumState::from_truncated_coefficients(v, Some(spec))?;
    let res = su11_combo_residual(
        state.vector()?,
        k,
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        z,
    );
    if res > 1e-9 {
        return Err(Error::ResidualTooLarge {
            residual: res,
            tol: 1e-9,
        });
    }
    Ok(state)
}

/// Applies uK₋ + vK₊ + wK₃ to a coefficient vector in the |k,n⟩ basis
/// without forming matrices.
pub fn su11_apply_combo(psi: &DVector<C64>, k: f64, u: C64, v: C64, w: C64) -> DVector<C64> {
    let d = psi.len();
    let mut out = DVector::<C64>::zeros(d);
    for n in 0..d {
        let nf = n as f64;
        let mut acc = w * C64::new(k + nf, 0.0) * psi[n];
        if n + 1 < d {
            // K₋|k,n+1⟩ = √((n+1)(2k+n))|k,n⟩
            acc += u * C64::new(((nf + 1.0) * (2.0 * k + nf)).sqrt(), 0.0) * psi[n + 1];
        }
        if n > 0 {
            // K₊|k,n-1⟩ = √(n(2k+n-1))|k,n⟩
            acc += v * C64::new((nf * (2.0 * k + nf - 1.0)).sqrt(), 0.0) * psi[n - 1];
        }
        out[n] = acc;
    }
    out
}

/// Interior-restricted norm of (uK₋ + vK₊ + wK₃ - z)ψ: the top two rows are
/// the only ones a truncated application corrupts, so they are excluded.
pub fn su11_combo_residual(psi: &DVector<C64>, k: f64, u: C64, v: C64, w: C64, z: C64) -> f64 {
    let d = psi.len();
    let applied = su11_apply_combo(psi, k, u, v, w);
    (0..d.saturating_sub(2))
        .map(|n| (applied[n] - z * psi[n]).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Parameters of the algebraic coherent state |z,u,v,w;k⟩, the eigenstate of
/// uK₋ + vK₊ + wK₃ with eigenvalue z. Derived quantities are recomputed on
/// demand, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicCsParams {
    pub z: C64,
    pub u: C64,
    pub v: C64,
    pub w: C64,
    pub k: f64,
}

impl AlgebraicCsParams {
    /// l = √(w² - 4uv) (principal branch).
    pub fn ell(&self) -> C64 {
        (self.w * self.w - self.u * self.v * 4.0).sqrt()
    }

    /// Kummer numerator parameter a = k + z/l. Only meaningful for l ≠ 0;
    /// the series code works with (k+m)·l + z instead, which stays finite
    /// in the l → 0 limit.
    pub fn kummer_a(&self) -> C64 {
        C64::new(self.k, 0.0) + self.z / self.ell()
    }

    /// Kummer denominator parameter b = 2k.
    pub fn kummer_b(&self) -> f64 {
        2.0 * self.k
    }

    /// Exponential prefactor slope c = -(w+l)/(2u).
    pub fn exp_c(&self) -> C64 {
        -(self.w + self.ell()) / (self.u * 2.0)
    }

    /// Kummer argument scale c₁ = l/u.
    pub fn c1(&self) -> C64 {
        self.ell() / self.u
    }
}

/// The algebraic-family parameters that the maximal-symmetry state
/// su11_cs(ζ) verifiably satisfies, for any nonzero u: v = u*,
/// w = -(uζ² + u*)/ζ and z = k(2uζ + w). With the conventional phase choice
/// arg u = -arg ζ these reduce to real w = -|u|(|ζ| + 1/|ζ|) and real
/// z = -k|u|(1/|ζ| - |ζ|); the state built with -ζ satisfies the same
/// combination with w and z negated.
pub fn maximal_symmetry_cs_params(zeta: C64, k: f64, u: C64) -> Result<AlgebraicCsParams> {
    if zeta.norm() == 0.0 || zeta.norm() >= 1.0 {
        return Err(Error::InvalidParameter("need 0 < |zeta| < 1".into()));
    }
    if u.norm() == 0.0 {
        return Err(Error::UZero);
    }
    let v = u.conj();
    let w = -(u * zeta * zeta + v) / zeta;
    let z = (u * zeta * 2.0 + w) * k;
    Ok(AlgebraicCsParams { z, u, v, w, k })
}

/// Rescales the in-progress coefficient vector when magnitudes drift out of
/// f64 range; the recurrences are linear so a global factor is harmless.
fn rescale_if_needed(coeffs: &mut [C64], carry: &mut [C64; 2]) {
    let mag = carry[0].re.abs().max(carry[0].im.abs());
    if mag > 1e140 {
        let f = C64::new(1e-140, 0.0);
        for c in coeffs.iter_mut() {
            *c *= f;
        }
        carry[0] *= f;
        carry[1] *= f;
    }
}

/// Algebraic coherent state |z,u,v,w;k⟩ from its analytic representation
/// Φ_z(η) = N e^{cη} ₁F₁(a, 2k; c₁η). The Taylor coefficients of the full
/// product satisfy the three-term recurrence obtained by reading the
/// defining eigenvalue equation row by row in the |k,n⟩ basis,
///
///   u √((n+1)(2k+n)) c_{n+1} = (z - w(k+n)) c_n - v √(n(2k+n-1)) c_{n-1},
///
/// which is evaluated directly in coefficient space (the l → 0 limit needs
/// no special casing and no Γ ever materializes). Forward substitution is
/// stable whenever the normalizable solution carries the dominant
/// asymptotic branch; in the discrete-eigenvalue regime (one characteristic
/// root inside the unit disk, one outside, as for the maximal-symmetry
/// states) the wanted solution is the subdominant one, so a backward
/// (Miller-style) pass recovers it and the row-0 boundary condition is then
/// verified through the residual gate. Requires u ≠ 0; the u = 0 branch of
/// the defining equation is out of scope here.
pub fn algebraic_cs_series(params: &AlgebraicCsParams, dim: usize) -> Result<QuantumState> {
    let spec = RepSpec::su11(params.k, dim)?;
    if params.u.norm() == 0.0 {
        return Err(Error::UZero);
    }
    let k = params.k;
    let raise = |n: usize| (((n + 1) as f64) * (2.0 * k + n as f64)).sqrt();
    let lower = |n: usize| ((n as f64) * (2.0 * k + n as f64 - 1.0)).sqrt();

    let forward = || -> Vec<C64> {
        let mut coeffs = vec![C64::new(0.0, 0.0); dim];
        coeffs[0] = C64::new(1.0, 0.0);
        let mut carry = [coeffs[0], C64::new(0.0, 0.0)];
        for n in 0..dim - 1 {
            let next = ((params.z - params.w * (k + n as f64)) * carry[0]
                - params.v * carry[1] * lower(n))
                / (params.u * raise(n));
            carry = [next, carry[0]];
            rescale_if_needed(&mut coeffs[..=n], &mut carry);
            coeffs[n + 1] = carry[0];
        }
        coeffs
    };

    let finish = |coeffs: Vec<C64>| -> Result<QuantumState> {
        let state = QuantumState::from_truncated_coefficients(
            DVector::from_vec(coeffs),
            Some(spec.clone()),
        )?;
        let res = su11_combo_residual(state.vector()?, k, params.u, params.v, params.w, params.z);
        let scale = f64::max(1.0, params.z.norm());
        if res > 1e-8 * scale {
            return Err(Error::ResidualTooLarge {
                residual: res,
                tol: 1e-8 * scale,
            });
        }
        Ok(state)
    };

    let diverged = |coeffs: &[C64]| {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let top = coeffs[dim - 1].norm().max(coeffs[dim - 2].norm());
        !norm.is_finite() || top > 1e-6 * norm.max(f64::MIN_POSITIVE)
    };
    let grows = |coeffs: &[C64]| {
        let top = coeffs[dim - 1].norm().max(coeffs[dim - 2].norm());
        let mid = coeffs[dim / 2].norm();
        !top.is_finite() || top >= 0.5 * mid
    };

    // A decaying forward profile is the wanted solution even when its tail
    // is still too fat (the tail gate then reports the truncation honestly).
    // With v = 0 the recurrence is first order and the forward solution is
    // the only one, so the same applies regardless of profile. Only a
    // growing two-branch profile signals dominant-branch takeover: either
    // the discrete-eigenvalue regime or genuinely non-normalizable
    // parameters, both of which the backward pass sorts out.
    let fwd = forward();
    if !diverged(&fwd) || !grows(&fwd) || params.v.norm() == 0.0 {
        return finish(fwd);
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); dim];
    coeffs[dim - 1] = C64::new(1.0, 0.0);
    let mut carry = [coeffs[dim - 1], C64::new(0.0, 0.0)]; // (c_n, c_{n+1})
    for n in (1..dim).rev() {
        let prev = ((params.z - params.w * (k + n as f64)) * carry[0]
            - params.u * raise(n) * carry[1])
            / (params.v * lower(n));
        carry = [prev, carry[0]];
        rescale_if_needed(&mut coeffs[n..], &mut carry);
        coeffs[n - 1] = carry[0];
    }
    let flat_profile = grows(&coeffs);
    finish(coeffs).map_err(|err| match err {
        // a non-decaying backward profile means no normalizable eigenvector
        // exists at this z, not that dim was too small
        Error::TruncationTooSmall { .. } if flat_profile => Error::SeriesDiverged { dim },
        other => other,
    })
}

/// Which eigenpair [`algebraic_cs_eigensolve`] should extract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigSelector {
    /// The (pseudo)eigenpair with eigenvalue nearest this target.
    TargetZ(C64),
    /// The eigenvalue of smallest modulus.
    LowestAbs,
}

fn max_component(v: &DVector<C64>) -> f64 {
    v.iter()
        .fold(0.0_f64, |acc, c| acc.max(c.re.abs()).max(c.im.abs()))
}

/// Numerical cross-validation route for the algebraic coherent states: the
/// residual-minimizing vector of B = uK₋ + vK₊ + wK₃ near the selected
/// eigenvalue, i.e. the smallest singular direction of B - zI, from an
/// eigendecomposition of the Hermitian Gram matrix (B-z)†(B-z) followed by
/// two scaled inverse-iteration polish steps. Works directly on the
/// truncated matrix, fully independent of the series route.
pub fn algebraic_cs_eigensolve(
    u: C64,
    v: C64,
    w: C64,
    k: f64,
    dim: usize,
    selector: EigSelector,
) -> Result<(QuantumState, C64)> {
    let spec = RepSpec::su11(k, dim)?;
    if dim < 8 {
        return Err(Error::InvalidParameter(format!(
            "eigensolve needs dim >= 8, got {dim}"
        )));
    }
    let set = spec.observables()?;
    let kp = &set.matrices[0] + &set.matrices[1] * C64::new(0.0, 1.0);
    let km = &set.matrices[0] - &set.matrices[1] * C64::new(0.0, 1.0);
    let b = &km * u + &kp * v + &set.matrices[2] * w;
    let bscale = matcore::max_abs_c(&b).max(1.0);

    let shift = match selector {
        EigSelector::TargetZ(z) => z,
        EigSelector::LowestAbs => C64::new(0.0, 0.0),
    };
    let shifted = &b - DMatrix::<C64>::identity(dim, dim) * shift;

    let gram = shifted.adjoint() * &shifted;
    let eig = gram.symmetric_eigen();
    let (min_idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty spectrum");
    let mut x: DVector<C64> = eig.eigenvectors.column(min_idx).into_owned();

    // Two inverse-iteration steps drive the residual from eigensolver
    // accuracy (~ε‖B‖²) down to solve-level accuracy. Intermediates are
    // rescaled by the largest component, never by a 2-norm, because the
    // amplification through a near-singular solve can overflow a squared
    // norm long before it overflows individual entries.
    let lu = shifted.clone().lu();
    let lu_adj = shifted.adjoint().lu();
    for _ in 0..2 {
        let Some(mut y) = lu_adj.solve(&x) else { break };
        let my = max_component(&y);
        if !my.is_finite() || my == 0.0 {
            break;
        }
        y /= C64::new(my, 0.0);
        let Some(mut next) = lu.solve(&y) else { break };
        let mn = max_component(&next);
        if !mn.is_finite() || mn == 0.0 {
            break;
        }
        next /= C64::new(mn, 0.0);
        x = next;
    }
    x /= C64::new(x.norm(), 0.0);
    let rayleigh = x.dotc(&(&b * &x));

    let state = QuantumState::from_coefficients(x, Some(spec))?;
    let tail = state.tail_mass;
    let res_interior = su11_combo_residual(state.vector()?, k, u, v, w, rayleigh);
    if tail >= TAIL_TOL || res_interior > 1e-8 * bscale {
        return Err(Error::NoAcceptableEigenvector {
            residual: res_interior,
            tail,
        });
    }
    Ok((state, rayleigh))
}

/// Squeezed vacuum family for arbitrary complex squeezing parameter ζ,
/// |ζ| < 1: the k = 1/4 maximal-symmetry state mapped onto the even Fock
/// levels, |k=1/4, n⟩ ↔ |2n⟩.
pub fn squeezed_from_zeta(zeta: C64, dim: usize) -> Result<QuantumState> {
    if dim < 4 {
        return Err(Error::InvalidParameter(format!(
            "dim must be >= 4, got {dim}"
        )));
    }
    if zeta.norm() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "squeezed vacuum requires |zeta| < 1, got {}",
            zeta.norm()
        )));
    }
    let k = 0.25;
    let su11_levels = dim.div_ceil(2);
    let mut v = DVector::<C64>::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    v[0] = c;
    for n in 0..su11_levels - 1 {
        let nf = n as f64;
        c *= zeta * ((2.0 * k + nf) / (nf + 1.0)).sqrt();
        if 2 * (n + 1) < dim {
            v[2 * (n + 1)] = c;
        }
    }
    QuantumState::from_truncated_coefficients(v, Some(RepSpec::fock(1, dim)?))
}

/// Canonical squeezed vacuum with real squeezing r: ζ = tanh r.
pub fn squeezed_vacuum(r: f64, dim: usize) -> Result<QuantumState> {
    squeezed_from_zeta(C64::new(r.tanh(), 0.0), dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// Even/odd coherent states N(|α⟩ ± |-α⟩): eigenstates of a² with
/// eigenvalue α². The odd family at α = 0 degenerates to the limit state |1⟩.
pub fn even_odd_cs(alpha: C64, parity: Parity, dim: usize) -> Result<QuantumState> {
    if dim < 4 {
        return Err(Error::InvalidParameter(format!(
            "dim must be >= 4, got {dim}"
        )));
    }
    let spec = RepSpec::fock(1, dim)?;
    if alpha.norm() == 0.0 && parity == Parity::Odd {
        return fock_number(1, dim);
    }
    let keep = |n: usize| match parity {
        Parity::Even => n.is_multiple_of(2),
        Parity::Odd => !n.is_multiple_of(2),
    };
    let mut v = DVector::<C64>::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    if keep(0) {
        v[0] = c;
    }
    for n in 0..dim - 1 {
        c *= alpha / C64::new((n as f64 + 1.0).sqrt(), 0.0);
        if keep(n + 1) {
            v[n + 1] = c;
        }
    }
    let state = QuantumState::from_truncated_coefficients(v, Some(spec))?;
    let res = fock_a2_residual(state.vector()?, alpha * alpha);
    if res > 1e-9 {
        return Err(Error::ResidualTooLarge {
            residual: res,
            tol: 1e-9,
        });
    }
    Ok(state)
}

/// Interior-restricted norm of (a² - λ)ψ in the Fock basis.
pub fn fock_a2_residual(psi: &DVector<C64>, lambda: C64) -> f64 {
    let d = psi.len();
    (0..d.saturating_sub(2))
        .map(|n| {
            let mut val = -lambda * psi[n];
            if n + 2 < d {
                val += C64::new(((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt(), 0.0) * psi[n + 2];
            }
            val.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// CLI-facing description of a state family plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "family",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum StateFamily {
    Vacuum,
    Fock { n: usize },
    Su11Cs { zeta: C64 },
    Su11Lowest,
    Bloch { tau: C64 },
    BgCs { z: C64 },
    Algebraic { u: C64, v: C64, w: C64, z: C64 },
    SqueezedVacuum { r: f64 },
    EvenCs { alpha: C64 },
    OddCs { alpha: C64 },
}

impl StateFamily {
    /// Builds the state in the given representation; the family must be
    /// compatible with the representation kind.
    pub fn build(&self, rep: &RepSpec) -> Result<QuantumState> {
        rep.validate()?;
        let want = |kind: RepKind, what: &str| -> Result<()> {
            if rep.kind == kind {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "state family {what} requires a {kind:?} representation"
                )))
            }
        };
        match self {
            StateFamily::Vacuum => {
                want(RepKind::Fock, "vacuum")?;
                let mut state = fock_number(0, rep.total_dim())?;
                state.basis = Some(rep.clone());
                Ok(state)
            }
            StateFamily::Fock { n } => {
                want(RepKind::Fock, "fock")?;
                if rep.modes.unwrap_or(1) != 1 {
                    return Err(Error::InvalidParameter(
                        "fock number states are single mode".into(),
                    ));
                }
                fock_number(*n, rep.dim)
            }
            StateFamily::Su11Cs { zeta } => {
                want(RepKind::Su11, "su11_cs")?;
                su11_cs(*zeta, rep.weight.unwrap(), rep.dim)
            }
            StateFamily::Su11Lowest => {
                want(RepKind::Su11, "su11_lowest")?;
                su11_lowest(rep.weight.unwrap(), rep.dim)
            }
            StateFamily::Bloch { tau } => {
                want(RepKind::Su2, "bloch")?;
                bloch_cs(*tau, rep.weight.unwrap())
            }
            StateFamily::BgCs { z } => {
                want(RepKind::Su11, "bg_cs")?;
                bg_cs(*z, rep.weight.unwrap(), rep.dim)
            }
            StateFamily::Algebraic { u, v, w, z } => {
                want(RepKind::Su11, "algebraic")?;
                let params = AlgebraicCsParams {
                    z: *z,
                    u: *u,
                    v: *v,
                    w: *w,
                    k: rep.weight.unwrap(),
                };
                algebraic_cs_series(&params, rep.dim)
            }
            StateFamily::SqueezedVacuum { r } => {
                want(RepKind::Fock, "squeezed_vacuum")?;
                if rep.modes.unwrap_or(1) != 1 {
                    return Err(Error::InvalidParameter(
                        "squeezed vacuum here is single mode".into(),
                    ));
                }
                squeezed_vacuum(*r, rep.dim)
            }
            StateFamily::EvenCs { alpha } => {
                want(RepKind::Fock, "even_cs")?;
                even_odd_cs(*alpha, Parity::Even, rep.dim)
            }
            StateFamily::OddCs { alpha } => {
                want(RepKind::Fock, "odd_cs")?;
                even_odd_cs(*alpha, Parity::Odd, rep.dim)
            }
        }
    }

    /// Sets a named real parameter; used by sweeps and searches.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match (self, name) {
            (StateFamily::Su11Cs { zeta }, "zeta") => *zeta = C64::new(value, 0.0),
            (StateFamily::Bloch { tau }, "tau") => *tau = C64::new(value, 0.0),
            (StateFamily::BgCs { z }, "z") => *z = C64::new(value, 0.0),
            (StateFamily::SqueezedVacuum { r }, "r") => *r = value,
            (StateFamily::EvenCs { alpha }, "alpha") | (StateFamily::OddCs { alpha }, "alpha") => {
                *alpha = C64::new(value, 0.0)
            }
            (StateFamily::Algebraic { w, .. }, "w") => *w = C64::new(value, 0.0),
            (StateFamily::Algebraic { z, .. }, "z") => *z = C64::new(value, 0.0),
            (fam, other) => {
                return Err(Error::InvalidParameter(format!(
                    "family {fam:?} has no sweepable parameter named {other}"
                )))
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::su11_generators;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn su11_cs_zero_is_lowest_weight() {
        let s = su11_cs(c(0.0, 0.0), 0.5, 16).unwrap();
        let v = s.vector().unwrap();
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-15);
        assert!(v.iter().skip(1).all(|x| x.norm() == 0.0));
    }

    #[test]
    fn su11_cs_matches_exponential_series_oracle() {
        // Oracle: apply exp(ζK₊)|k,0⟩ term by term with the K₊ matrix.
        let (zeta, k, dim) = (c(0.35, 0.2), 0.75, 40);
        let set = su11_generators(k, dim).unwrap();
        let kp = &set.matrices[0] + &set.matrices[1] * c(0.0, 1.0);
        let mut term = DVector::<C64>::zeros(dim);
        term[0] = c(1.0, 0.0);
        let mut acc = term.clone();
        for n in 1..dim {
            term = (&kp * &term) * (zeta / c(n as f64, 0.0));
            acc += &term;
        }
        let oracle = QuantumState::from_coefficients(acc, None).unwrap();
        let state = su11_cs(zeta, k, dim).unwrap();
        assert!(state.overlap(&oracle).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn su11_cs_coefficient_ratio() {
        let (zeta, k) = (c(0.5, 0.0), 0.25);
        let s = su11_cs(zeta, k, 32).unwrap();
        let v = s.vector().unwrap();
        for n in 0..6 {
            let expect = zeta * ((2.0 * k + n as f64) / (n as f64 + 1.0)).sqrt();
            let got = v[n + 1] / v[n];
            assert_relative_eq!(got.re, expect.re, epsilon = 1e-12);
            assert_relative_eq!(got.im, expect.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn su11_cs_k3_expectation() {
        // ⟨K₃⟩ = k(1+|ζ|²)/(1-|ζ|²) = 5/12 at k = 1/4, ζ = 0.5, with a scan
        // over dims confirming the truncation has converged.
        let mut last = None;
        for dim in [32, 64, 128] {
            let s = su11_cs(c(0.5, 0.0), 0.25, dim).unwrap();
            let v = s.vector().unwrap();
            let k3: f64 = v
                .iter()
                .enumerate()
                .map(|(n, cn)| (0.25 + n as f64) * cn.norm_sqr())
                .sum();
            assert_relative_eq!(k3, 5.0 / 12.0, epsilon = 1e-12);
            if let Some(prev) = last {
                let delta: f64 = k3 - prev;
                assert!(delta.abs() < 1e-10);
            }
            last = Some(k3);
        }
    }

    #[test]
    fn su11_cs_rejects_large_zeta() {
        assert!(su11_cs(c(1.0, 0.0), 0.5, 32).is_err());
        assert!(su11_cs(c(0.99, 0.0), 0.5, 8).is_err()); // tail check fails
    }

    #[test]
    fn bloch_cs_zero_is_lowest() {
        let s = bloch_cs(c(0.0, 0.0), 1.5).unwrap();
        let v = s.vector().unwrap();
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bloch_cs_j1_expectation_oracle() {
        // brute-force 3×3: J₃ diag(-1,0,1) on the normalized coefficients
        let tau = c(0.3, 0.0);
        let s = bloch_cs(tau, 1.0).unwrap();
        let v = s.vector().unwrap();
        let j3: f64 = v
            .iter()
            .enumerate()
            .map(|(n, cn)| (n as f64 - 1.0) * cn.norm_sqr())
            .sum();
        // exp(τJ₊)|1,-1⟩ has cₙ = τⁿ√C(2,n): (1, τ√2, τ²)
        let t = 0.3_f64;
        let norm = 1.0 + 2.0 * t * t + t * t * t * t;
        let expect = (-1.0 + 0.0 * 2.0 * t * t + t.powi(4)) / norm;
        assert_relative_eq!(j3, expect, epsilon = 1e-12);
    }

    #[test]
    fn bloch_spin_half_covers_sphere() {
        let s = bloch_cs(c(2.0, -1.0), 0.5).unwrap();
        let v = s.vector().unwrap();
        let expect = (1.0 + 5.0_f64).sqrt().recip();
        assert_relative_eq!(v[0].re, expect, epsilon = 1e-12);
    }

    #[test]
    fn bg_cs_zero_and_ratio() {
        let s = bg_cs(c(0.0, 0.0), 0.5, 16).unwrap();
        assert_relative_eq!(s.vector().unwrap()[0].re, 1.0, epsilon = 1e-15);

        let (z, k) = (c(0.8, 0.3), 0.5);
        let s = bg_cs(z, k, 48).unwrap();
        let v = s.vector().unwrap();
        let got = v[2] / v[0];
        let expect = z * z / (2.0 * 2.0 * k * (2.0 * k + 1.0)).sqrt();
        assert_relative_eq!(got.re, expect.re, epsilon = 1e-12);
        assert_relative_eq!(got.im, expect.im, epsilon = 1e-12);
    }

    #[test]
    fn bg_cs_eigen_residual() {
        let s = bg_cs(c(1.0, 0.5), 0.5, 48).unwrap();
        let res = su11_combo_residual(
            s.vector().unwrap(),
            0.5,
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.5),
        );
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn algebraic_series_reproduces_bg() {
        let (z, k, dim) = (c(0.9, -0.4), 0.75, 64);
        let params = AlgebraicCsParams {
            z,
            u: c(1.0, 0.0),
            v: c(0.0, 0.0),
            w: c(0.0, 0.0),
            k,
        };
        let series = algebraic_cs_series(&params, dim).unwrap();
        let bg = bg_cs(z, k, dim).unwrap();
        assert!(series.overlap(&bg).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn algebraic_series_continuous_at_l_zero() {
        // approach w² = 4uv: the series must vary continuously
        let k = 0.5;
        let u = c(1.0, 0.0);
        let v = c(0.09, 0.0);
        let w_crit = 0.6; // w² = 4uv exactly
        let z = c(0.3, 0.0) * k;
        let at = |w: f64| {
            let params = AlgebraicCsParams {
                z,
                u,
                v,
                w: c(w, 0.0),
                k,
            };
            algebraic_cs_series(&params, 64).unwrap()
        };
        let exact = at(w_crit);
        for delta in [1e-3, 1e-5, 1e-7] {
            let near = at(w_crit + delta);
            let overlap = exact.overlap(&near).unwrap();
            assert!(
                overlap > 1.0 - 50.0 * delta,
                "overlap {overlap} at delta {delta}"
            );
        }
    }

    #[test]
    fn maximal_symmetry_state_satisfies_algebraic_equation() {
        // su11_cs(ζ) is the eigenstate of uK₋ + u*K₊ + wK₃ with
        // w = -|u|(|ζ| + 1/|ζ|) and eigenvalue z = -k|u|(1/|ζ| - |ζ|);
        // the -ζ state satisfies the sign-flipped pair (w, z) → (-w, -z).
        let (zeta, k, dim) = (0.5, 0.5, 64);
        let u = c(1.0, 0.0);
        let p = maximal_symmetry_cs_params(c(zeta, 0.0), k, u).unwrap();
        assert_relative_eq!(p.w.re, -2.5, epsilon = 1e-12);
        assert_relative_eq!(p.z.re, -k * 1.5, epsilon = 1e-12);

        let plus = su11_cs(c(zeta, 0.0), k, dim).unwrap();
        let res = su11_combo_residual(plus.vector().unwrap(), k, p.u, p.v, p.w, p.z);
        assert!(res < 1e-8, "plus-state residual {res}");

        let minus = su11_cs(c(-zeta, 0.0), k, dim).unwrap();
        let res_flip = su11_combo_residual(minus.vector().unwrap(), k, p.u, p.v, -p.w, -p.z);
        assert!(res_flip < 1e-8, "minus-state residual {res_flip}");

        // |z| agrees with the k|u|(1/|ζ| - |ζ|) magnitude as published.
        assert_relative_eq!(p.z.norm(), k * (1.0 / zeta - zeta), epsilon = 1e-12);
    }

    #[test]
    fn maximal_symmetry_params_complex_zeta_phase_matched() {
        // with arg u = -arg ζ the combination coefficients w, z come out real
        let (k, dim) = (0.5, 96);
        let zeta = C64::from_polar(0.45, 0.8);
        let u = C64::from_polar(1.3, -0.8);
        let p = maximal_symmetry_cs_params(zeta, k, u).unwrap();
        assert!(p.w.im.abs() < 1e-14 && p.z.im.abs() < 1e-14);
        assert_relative_eq!(p.z.norm(), k * 1.3 * (1.0 / 0.45 - 0.45), epsilon = 1e-12);
        let state = su11_cs(zeta, k, dim).unwrap();
        let res = su11_combo_residual(state.vector().unwrap(), k, p.u, p.v, p.w, p.z);
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn algebraic_series_reproduces_maximal_symmetry_cs() {
        // (u,v,w,z) = (1, 1, |ζ|+1/|ζ|, k(1/|ζ|-|ζ|)) at ζ = 0.5 gives the
        // ζ → -ζ maximal-symmetry state; with (±w, ±z) the two orientations.
        let (k, dim) = (0.75, 64);
        let params = AlgebraicCsParams {
            z: c(1.5 * k, 0.0),
            u: c(1.0, 0.0),
            v: c(1.0, 0.0),
            w: c(2.5, 0.0),
            k,
        };
        let series = algebraic_cs_series(&params, dim).unwrap();
        let target = su11_cs(c(-0.5, 0.0), k, dim).unwrap();
        assert!(series.overlap(&target).unwrap() > 1.0 - 1e-10);

        let params_flipped = AlgebraicCsParams {
            z: -params.z,
            w: -params.w,
            ..params
        };
        let series2 = algebraic_cs_series(&params_flipped, dim).unwrap();
        let target2 = su11_cs(c(0.5, 0.0), k, dim).unwrap();
        assert!(series2.overlap(&target2).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn algebraic_series_rejects_u_zero_and_divergent() {
        let p = AlgebraicCsParams {
            z: c(0.1, 0.0),
            u: c(0.0, 0.0),
            v: c(1.0, 0.0),
            w: c(0.0, 0.0),
            k: 0.5,
        };
        assert!(matches!(algebraic_cs_series(&p, 32), Err(Error::UZero)));

        // hyperbolic element: no normalizable eigenstate at any dim
        let p = AlgebraicCsParams {
            z: c(0.75, 0.0),
            u: c(1.0, 0.0),
            v: c(1.0, 0.0),
            w: c(1.5, 0.0),
            k: 0.5,
        };
        assert!(matches!(
            algebraic_cs_series(&p, 64),
            Err(Error::SeriesDiverged { .. })
        ));
    }

    #[test]
    fn algebraic_series_undersized_dim_reports_truncation() {
        // a Barut-Girardello limit with |z| large enough to need more levels
        let p = AlgebraicCsParams {
            z: c(3.0, 0.0),
            u: c(1.0, 0.0),
            v: c(0.0, 0.0),
            w: c(0.0, 0.0),
            k: 0.5,
        };
        assert!(matches!(
            algebraic_cs_series(&p, 8),
            Err(Error::TruncationTooSmall { .. })
        ));
        assert!(algebraic_cs_series(&p, 64).is_ok());

        // a slowly decaying elliptic-continuum state: the forward profile
        // decays, so an undersized basis is a truncation matter too
        let s = c(0.9, 0.0);
        let p = AlgebraicCsParams {
            z: c(0.2, 0.0),
            u: c(1.0, 0.0),
            v: s * s,
            w: -s * 2.0,
            k: 0.5,
        };
        assert!(matches!(
            algebraic_cs_series(&p, 24),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn eigensolve_hermitian_returns_real_z() {
        // v = u*, w real with w² > 4|u|²: Hermitian elliptic combination
        let (state, z) = algebraic_cs_eigensolve(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-2.5, 0.0),
            0.5,
            48,
            EigSelector::TargetZ(c(-0.75, 0.0)),
        )
        .unwrap();
        assert!(z.im.abs() < 1e-10, "z = {z}");
        assert!(state.tail_mass < TAIL_TOL);
        // and it is the maximal-symmetry state at ζ = 0.5
        let target = su11_cs(c(0.5, 0.0), 0.5, 48).unwrap();
        assert!(state.overlap(&target).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn eigensolve_reproduces_bg() {
        let (z, k, dim) = (c(0.9, 0.4), 0.5, 64);
        let (state, z_out) = algebraic_cs_eigensolve(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            k,
            dim,
            EigSelector::TargetZ(z),
        )
        .unwrap();
        let bg = bg_cs(z, k, dim).unwrap();
        assert!(state.overlap(&bg).unwrap() > 1.0 - 1e-8);
        assert!((z_out - z).norm() < 1e-6, "z_out = {z_out}");
    }

    #[test]
    fn eigensolve_matches_series() {
        // elliptic regime built from two roots inside the unit disk
        let k = 0.5;
        let u = c(0.8, 0.1);
        let (s1, s2) = (c(0.3, 0.1), c(-0.4, 0.2));
        let params = AlgebraicCsParams {
            z: c(0.4, 0.1),
            u,
            v: u * s1 * s2,
            w: -u * (s1 + s2),
            k,
        };
        let dim = 64;
        let series = algebraic_cs_series(&params, dim).unwrap();
        let (eig, _) = algebraic_cs_eigensolve(
            params.u,
            params.v,
            params.w,
            k,
            dim,
            EigSelector::TargetZ(params.z),
        )
        .unwrap();
        assert!(series.overlap(&eig).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn squeezed_vacuum_basics() {
        let s = squeezed_vacuum(0.0, 16).unwrap();
        let v = s.vector().unwrap();
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-15);

        let s = squeezed_vacuum(0.5, 48).unwrap();
        let v = s.vector().unwrap();
        for (n, cn) in v.iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(cn.norm(), 0.0, "odd Fock component {n} must vanish");
            }
        }
    }

    #[test]
    fn squeezed_matches_su11_quarter() {
        let r = 0.4_f64;
        let sq = squeezed_vacuum(r, 64).unwrap();
        let su = su11_cs(c(r.tanh(), 0.0), 0.25, 32).unwrap();
        let sqv = sq.vector().unwrap();
        let suv = su.vector().unwrap();
        for n in 0..32 {
            assert_relative_eq!(sqv[2 * n].re, suv[n].re, epsilon = 1e-12);
        }
    }

    #[test]
    fn even_odd_cs_limits_and_residual() {
        let even0 = even_odd_cs(c(0.0, 0.0), Parity::Even, 16).unwrap();
        assert_relative_eq!(even0.vector().unwrap()[0].re, 1.0, epsilon = 1e-15);

        let odd0 = even_odd_cs(c(0.0, 0.0), Parity::Odd, 16).unwrap();
        assert_relative_eq!(odd0.vector().unwrap()[1].re, 1.0, epsilon = 1e-15);

        let alpha = c(1.2, 0.0);
        for parity in [Parity::Even, Parity::Odd] {
            let s = even_odd_cs(alpha, parity, 40).unwrap();
            let res = fock_a2_residual(s.vector().unwrap(), alpha * alpha);
            assert!(res < 1e-9, "{parity:?} residual {res}");
        }
    }

    #[test]
    fn state_family_json_round_trip() {
        let fam = StateFamily::Su11Cs {
            zeta: c(0.5, -0.25),
        };
        let json = serde_json::to_string(&fam).unwrap();
        assert!(json.contains("su11_cs"));
        let back: StateFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(fam, back);
    }

    #[test]
    fn tail_mass_errors_mention_dim() {
        match su11_cs(c(0.9, 0.0), 1.0, 16) {
            Err(Error::TruncationTooSmall { dim, .. }) => assert_eq!(dim, 16),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
