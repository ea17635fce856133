//! Evaluation of the uncertainty relations: the characteristic family
//! C_r(σ) ≥ C_r(C) at every order, the pairwise product/covariance forms,
//! the trace-class relation for quadrature sets, the subset saturation
//! criterion, the explicit eigenvalue system satisfied by the su(1,1)
//! maximal-symmetry states, and the invariance suite under linear
//! transformations of the observables.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::ObservableSet;
use crate::error::{Error, Result};
use crate::matcore::{self, SymplecticForm, C64};
use crate::moments::{self, ComplexCombination, MomentPair};
use crate::parallel;
use crate::sampling;
use crate::states::{self, QuantumState, StateData};

/// Default relative saturation tolerance for analytically saturated families.
pub const SATURATION_TOL: f64 = 1e-8;
/// Looser tolerance for optimizer outputs.
pub const SATURATION_TOL_SEARCH: f64 = 1e-6;
/// A gap below -VIOLATION_TOL·scale means a bug, surfaced as an error.
pub const VIOLATION_TOL: f64 = 1e-10;

/// One order of the characteristic family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub r: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostics {
    pub dim: usize,
    pub tail_mass: f64,
}

/// Per-order record of the characteristic uncertainty relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UrReport {
    pub per_order: Vec<OrderReport>,
    pub tol: f64,
    pub diagnostics: Diagnostics,
}

impl UrReport {
    pub fn order(&self, r: usize) -> Option<&OrderReport> {
        self.per_order.iter().find(|o| o.r == r)
    }

    /// True when every order holds within the violation tolerance (always
    /// the case for a successfully constructed report).
    pub fn all_hold(&self) -> bool {
        self.per_order
            .iter()
            .all(|o| o.gap >= -VIOLATION_TOL * f64::max(1.0, o.lhs.abs()))
    }
}

fn saturation_flag(lhs: f64, rhs: f64, tol: f64) -> bool {
    (lhs - rhs) <= tol * f64::max(1.0, lhs.abs())
}

/// Evaluates C_r(σ) ≥ C_r(C) for r = 1..n from a precomputed moment pair.
pub fn characteristic_ur_from_moments(
    mp: &MomentPair,
    tol: f64,
    diag: Diagnostics,
) -> Result<UrReport> {
    let cs = matcore::char_coeffs_minors(&mp.sigma)?;
    let cc = matcore::char_coeffs_minors(&mp.cmat)?;
    let n = mp.len();
    let mut per_order = Vec::with_capacity(n);
    for r in 1..=n {
        let (lhs, rhs) = (cs.get(r), cc.get(r));
        let gap = lhs - rhs;
        let scale = f64::max(1.0, lhs.abs());
        if gap < -VIOLATION_TOL * scale {
            return Err(Error::RelationViolated {
                r,
                gap,
                tol: VIOLATION_TOL * scale,
            });
        }
        per_order.push(OrderReport {
            r,
            lhs,
            rhs,
            gap,
            saturated: saturation_flag(lhs, rhs, tol),
        });
    }
    Ok(UrReport {
        per_order,
        tol,
        diagnostics: diag,
    })
}

/// The characteristic uncertainty relations of every order for a (state,
/// observables) pair. A negative gap beyond the violation tolerance is a
/// bug or truncation artifact and comes back as an error, never silently.
pub fn characteristic_ur(set: &ObservableSet, state: &QuantumState, tol: f64) -> Result<UrReport> {
    let mp = moments::moment_pair(set, state)?;
    characteristic_ur_from_moments(
        &mp,
        tol,
        Diagnostics {
            dim: set.dim(),
            tail_mass: state.tail_mass,
        },
    )
}

/// Product and covariance-corrected two-observable relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairwiseReport {
    pub lhs_heis: f64,
    pub lhs_schr: f64,
    pub rhs: f64,
    pub saturated_heis: bool,
    pub saturated_schr: bool,
}

/// `Δ²X·Δ²Y ≥ Δ²X·Δ²Y - (ΔXY)² ≥ |⟨[X,Y]⟩|²/4` for two Hermitian observables.
pub fn pairwise_schrodinger(
    x: &DMatrix<C64>,
    y: &DMatrix<C64>,
    state: &QuantumState,
    tol: f64,
) -> Result<PairwiseReport> {
    let d = state.dim();
    let set = ObservableSet::new(
        vec!["X".into(), "Y".into()],
        vec![x.clone(), y.clone()],
        None,
        vec![true; d],
    )?;
    let mp = moments::moment_pair(&set, state)?;
    let lhs_heis = mp.sigma[(0, 0)] * mp.sigma[(1, 1)];
    let lhs_schr = lhs_heis - mp.sigma[(0, 1)] * mp.sigma[(0, 1)];
    // C₁₂ = (-i/2)⟨[X,Y]⟩, so |⟨[X,Y]⟩|²/4 = C₁₂².
    let rhs = mp.cmat[(0, 1)] * mp.cmat[(0, 1)];
    Ok(PairwiseReport {
        lhs_heis,
        lhs_schr,
        rhs,
        saturated_heis: saturation_flag(lhs_heis, rhs, tol),
        saturated_schr: saturation_flag(lhs_schr, rhs, tol),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceOrderReport {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub saturated: bool,
}

/// Trace-class relation report, including the symplectic transform used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    rename_all = "camelCase",
    try_from = "TraceUrReportDto",
    into = "TraceUrReportDto"
)]
pub struct TraceUrReport {
    pub per_k: Vec<TraceOrderReport>,
    pub lambda: DMatrix<f64>,
    pub nus: Vec<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TraceUrReportDto {
    per_k: Vec<TraceOrderReport>,
    lambda: Vec<Vec<f64>>,
    nus: Vec<f64>,
    diagnostics: Diagnostics,
}

impl From<TraceUrReport> for TraceUrReportDto {
    fn from(r: TraceUrReport) -> Self {
        TraceUrReportDto {
            per_k: r.per_k,
            lambda: moments::mat_to_rows(&r.lambda),
            nus: r.nus,
            diagnostics: r.diagnostics,
        }
    }
}

impl TryFrom<TraceUrReportDto> for TraceUrReport {
    type Error = String;

    fn try_from(dto: TraceUrReportDto) -> std::result::Result<Self, String> {
        Ok(TraceUrReport {
            per_k: dto.per_k,
            lambda: moments::rows_to_mat(&dto.lambda)?,
            nus: dto.nus,
            diagnostics: dto.diagnostics,
        })
    }
}

/// ⟨[A,B]⟩ in a state, through matrix-vector products for pure states.
fn commutator_mean(a: &DMatrix<C64>, b: &DMatrix<C64>, state: &QuantumState) -> Result<C64> {
    match &state.data {
        StateData::Pure(v) => {
            let av = a * v;
            let bv = b * v;
            // ⟨ψ|AB|ψ⟩ = ⟨Aψ, Bψ⟩ for Hermitian A
            Ok(av.dotc(&bv) - bv.dotc(&av))
        }
        StateData::Mixed(_) => {
            let comm = a * b - b * a;
            moments::expectation_complex(&comm, state)
        }
    }
}

/// Trace-class relations Tr(iσJ)^{2k} ≥ 2^{1-2k} Σ_ν |⟨[X'_ν, X'_{N+ν}]⟩|^{2k}
/// for a quadrature set of 2N observables, with X' = Λ(ρ)X rotated by the
/// Williamson transform of σ. Requires σ positive definite.
pub fn trace_ur(
    set: &ObservableSet,
    state: &QuantumState,
    orders: &[usize],
    tol: f64,
) -> Result<TraceUrReport> {
    let n = set.len();
    if !n.is_multiple_of(2) || !(1..=2).contains(&(n / 2)) {
        return Err(Error::InvalidParameter(format!(
            "trace relation needs 2N observables with N in {{1,2}}, got {n}"
        )));
    }
    let modes = n / 2;
    let mp = moments::moment_pair(set, state)?;
    let will = matcore::williamson(&mp.sigma)?;
    let j = SymplecticForm::new(modes)?.matrix();
    let sigma_j = &mp.sigma * &j;

    let transformed = set.transformed(&will.lambda)?;
    let mut comm_moduli = Vec::with_capacity(modes);
    for nu in 0..modes {
        let com = commutator_mean(
            &transformed.matrices[nu],
            &transformed.matrices[modes + nu],
            state,
        )?;
        comm_moduli.push(com.norm());
    }

    let mut per_k = Vec::with_capacity(orders.len());
    for &k in orders {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "trace orders start at k = 1".into(),
            ));
        }
        // (iσJ)^{2k} = (-1)^k (σJ)^{2k}
        let mut power = DMatrix::<f64>::identity(n, n);
        for _ in 0..2 * k {
            power = &power * &sigma_j;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = sign * power.trace();
        let rhs = 2f64.powi(1 - 2 * k as i32)
            * comm_moduli
                .iter()
                .map(|m| m.powi(2 * k as i32))
                .sum::<f64>();
        let scale = f64::max(1.0, lhs.abs());
        per_k.push(TraceOrderReport {
            k,
            lhs,
            rhs,
            holds: lhs - rhs >= -1e-9 * scale,
            saturated: (lhs - rhs).abs() <= tol * scale,
        });
    }
    Ok(TraceUrReport {
        per_k,
        lambda: will.lambda,
        nus: will.nus,
        diagnostics: Diagnostics {
            dim: set.dim(),
            tail_mass: state.tail_mass,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubsetReport {
    pub indices: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub saturated: bool,
}

/// Subset-saturation criterion: if every r-subset of the observables has
/// det σ_sub = det C_sub, the order-r characteristic relation saturates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Proposition1Report {
    pub r: usize,
    pub subsets_all_saturated: bool,
    pub order_r_saturated: bool,
    pub implication_holds: bool,
    pub per_subset: Vec<SubsetReport>,
}

/// Checks the subset criterion at order r: each principal r×r block of
/// (σ, C) is itself an uncertainty pair for the corresponding observables,
/// and minor-level saturation of all of them forces order-r saturation.
/// Subsets are enumerated lexicographically.
pub fn proposition1_check(
    set: &ObservableSet,
    state: &QuantumState,
    r: usize,
    tol: f64,
) -> Result<Proposition1Report> {
    use itertools::Itertools;
    let n = set.len();
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "subset order r = {r} out of range 1..={n}"
        )));
    }
    let mp = moments::moment_pair(set, state)?;
    let mut per_subset = Vec::new();
    let mut all_sat = true;
    for idx in (0..n).combinations(r) {
        let lhs = matcore::principal_minor(&mp.sigma, &idx)?;
        let rhs = matcore::principal_minor(&mp.cmat, &idx)?;
        let saturated = (lhs - rhs).abs() <= tol * f64::max(1.0, lhs.abs());
        all_sat &= saturated;
        per_subset.push(SubsetReport {
            indices: idx,
            lhs,
            rhs,
            saturated,
        });
    }
    let report = characteristic_ur_from_moments(
        &mp,
        tol,
        Diagnostics {
            dim: set.dim(),
            tail_mass: state.tail_mass,
        },
    )?;
    let order_r_saturated = report.order(r).map(|o| o.saturated).unwrap_or(false);
    Ok(Proposition1Report {
        r,
        subsets_all_saturated: all_sat,
        order_r_saturated,
        implication_holds: !(all_sat && !order_r_saturated),
        per_subset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BetaCombinationReport {
    pub label: String,
    pub residual: f64,
    pub rayleigh: C64,
    pub formula_z: C64,
    pub matches_formula: bool,
}

/// Outcome of verifying the three-combination eigenvalue system for the
/// maximal-symmetry state. `sign` records which of ±ζ satisfied it; the
/// published first eigenvalue formula is reported alongside the measured
/// Rayleigh value and flagged rather than asserted, since the two are known
/// to disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BetaSystemReport {
    pub zeta: f64,
    pub k: f64,
    pub dim: usize,
    pub sign: f64,
    pub combinations: Vec<BetaCombinationReport>,
}

/// Verifies that the su(1,1) maximal-symmetry state is a joint eigenstate of
/// the three combinations β₁K₁ + β₂K₂, β'₁K₁ + β'₃K₃, β''₂K₂ + β''₃K₃ with
///   β₁ = iβ₂(1-ζ²)/(1+ζ²), β'₁ = 2β'₃ζ/(1+ζ²), β''₂ = 2iβ''₃ζ/(1-ζ²),
/// trying the state at +ζ and -ζ and recording which sign satisfies the
/// system (the coefficient formulas hold verbatim for the -ζ state under
/// this crate's conventions).
pub fn beta_system_verify(
    zeta: f64,
    k: f64,
    dim: usize,
    beta2: C64,
    beta3_prime: C64,
    beta3_dprime: C64,
) -> Result<BetaSystemReport> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "zeta must lie in (0,1), got {zeta}"
        )));
    }
    let set = crate::algebra::su11_generators(k, dim)?;
    let i = C64::new(0.0, 1.0);
    let zero = C64::new(0.0, 0.0);
    let z2 = zeta * zeta;

    let beta1 = i * beta2 * ((1.0 - z2) / (1.0 + z2));
    let beta1_prime = beta3_prime * (2.0 * zeta / (1.0 + z2));
    let beta2_dprime = i * beta3_dprime * (2.0 * zeta / (1.0 - z2));

    let combos = [
        ("b1*K1 + b2*K2", vec![beta1, beta2, zero]),
        ("b1'*K1 + b3'*K3", vec![beta1_prime, zero, beta3_prime]),
        ("b2''*K2 + b3''*K3", vec![zero, beta2_dprime, beta3_dprime]),
    ];

    // published eigenvalues at m = 0
    let formulas = [
        i * beta2 * (2.0 * k * z2 / (1.0 + z2)),
        beta3_prime * (k * (1.0 - z2) / (1.0 + z2)),
        beta3_dprime * (k * (1.0 + z2) / (1.0 - z2)),
    ];

    let mut best: Option<(f64, f64, Vec<BetaCombinationReport>)> = None;
    for sign in [-1.0, 1.0] {
        let state = states::su11_cs(C64::new(sign * zeta, 0.0), k, dim)?;
        let mut reports = Vec::with_capacity(3);
        let mut worst = 0.0_f64;
        for ((label, coeffs), formula) in combos.iter().zip(formulas.iter()) {
            let combo = ComplexCombination::new(coeffs.clone())?;
            let (residual, rayleigh) = moments::eigenstate_residual(&combo, &set, &state)?;
            worst = worst.max(residual);
            reports.push(BetaCombinationReport {
                label: (*label).to_string(),
                residual,
                rayleigh,
                formula_z: *formula,
                matches_formula: (rayleigh - formula).norm()
                    <= 1e-8 * f64::max(1.0, formula.norm()),
            });
        }
        match &best {
            Some((_, w, _)) if *w <= worst => {}
            _ => best = Some((sign, worst, reports)),
        }
    }
    let (sign, worst, combinations) = best.unwrap();
    if worst >= 1e-6 {
        return Err(Error::BetaSystemDiscrepancy { residual: worst });
    }
    Ok(BetaSystemReport {
        zeta,
        k,
        dim,
        sign,
        combinations,
    })
}

/// Result of the linear-transformation invariance checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvarianceReport {
    pub trials: usize,
    /// Orthogonal transforms: per-order saturation flags must be preserved.
    pub orthogonal_mismatches: usize,
    /// Nonsingular transforms: the order-n (determinant) saturation flag
    /// must be preserved.
    pub full_order_mismatches: usize,
    /// Λ = σ (state-dependent, nonlinear in the state): order-n saturation
    /// preserved; `None` when σ is singular.
    pub sigma_transform_preserved: Option<bool>,
    /// Λ = C, applicable only when det C > 0 (even n).
    pub cmat_transform_preserved: Option<bool>,
}

impl InvarianceReport {
    pub fn all_preserved(&self) -> bool {
        self.orthogonal_mismatches == 0
            && self.full_order_mismatches == 0
            && self.sigma_transform_preserved.unwrap_or(true)
            && self.cmat_transform_preserved.unwrap_or(true)
    }
}

/// Runs the invariance suite: orthogonal transforms preserve every
/// saturation flag; generic nonsingular transforms, and the state-dependent
/// choices Λ = σ (and Λ = C when det C > 0), preserve order-n saturation.
/// Trials use seeded substreams and evaluate in parallel deterministically.
pub fn invariance_suite(
    set: &ObservableSet,
    state: &QuantumState,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<InvarianceReport> {
    let n = set.len();
    let base = characteristic_ur(set, state, tol)?;
    let base_flags: Vec<bool> = base.per_order.iter().map(|o| o.saturated).collect();
    let base_full = *base_flags.last().expect("at least one order");

    let outcomes = parallel::map_indexed(trials, |t| -> Result<(bool, bool)> {
        let mut rng = sampling::rng_stream(seed, t as u64);
        let q = sampling::random_orthogonal(n, &mut rng);
        let rotated = set.transformed(&q)?;
        let report = characteristic_ur(&rotated, state, tol)?;
        let flags: Vec<bool> = report.per_order.iter().map(|o| o.saturated).collect();
        let orthogonal_ok = flags == base_flags;

        let g = sampling::random_nonsingular(n, &mut rng);
        let sheared = set.transformed(&g)?;
        let report_g = characteristic_ur(&sheared, state, tol)?;
        let full_ok = report_g.per_order.last().unwrap().saturated == base_full;
        Ok((orthogonal_ok, full_ok))
    });

    let mut orthogonal_mismatches = 0;
    let mut full_order_mismatches = 0;
    for outcome in outcomes {
        let (ortho_ok, full_ok) = outcome?;
        if !ortho_ok {
            orthogonal_mismatches += 1;
        }
        if !full_ok {
            full_order_mismatches += 1;
        }
    }

    let mp = moments::moment_pair(set, state)?;
    let full_order_preserved = |lambda: &DMatrix<f64>| -> Result<bool> {
        let transformed = set.transformed(lambda)?;
        let report = characteristic_ur(&transformed, state, tol)?;
        Ok(report.per_order.last().unwrap().saturated == base_full)
    };

    let sigma_transform_preserved = if matcore::det_snapped(&mp.sigma)? != 0.0 {
        Some(full_order_preserved(&mp.sigma)?)
    } else {
        None
    };
    let cmat_transform_preserved = if matcore::det_snapped(&mp.cmat)? > 0.0 {
        Some(full_order_preserved(&mp.cmat)?)
    } else {
        None
    };

    Ok(InvarianceReport {
        trials,
        orthogonal_mismatches,
        full_order_mismatches,
        sigma_transform_preserved,
        cmat_transform_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fock_quadratures, su11_generators, su2_generators};
    use crate::states::{
        bg_cs, bloch_cs, fock_number, squeezed_vacuum, su11_cs, su11_lowest, vacuum,
    };
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spin_up() -> QuantumState {
        QuantumState::from_coefficients(DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]), None)
            .unwrap()
    }

    #[test]
    fn characteristic_ur_spin_half_up() {
        let set = su2_generators(0.5).unwrap();
        let report = characteristic_ur(&set, &spin_up(), SATURATION_TOL).unwrap();
        let o1 = report.order(1).unwrap();
        assert_relative_eq!(o1.lhs, 0.5, epsilon = 1e-15);
        assert_relative_eq!(o1.rhs, 0.0, epsilon = 1e-15);
        let o2 = report.order(2).unwrap();
        assert_relative_eq!(o2.lhs, 1.0 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(o2.rhs, 1.0 / 16.0, epsilon = 1e-15);
        assert!(o2.saturated);
        let o3 = report.order(3).unwrap();
        assert_relative_eq!(o3.lhs, 0.0, epsilon = 1e-15);
        assert_relative_eq!(o3.rhs, 0.0, epsilon = 1e-15);
        assert!(o3.saturated);
    }

    #[test]
    fn characteristic_ur_su11_lowest() {
        let k = 0.25;
        let set = su11_generators(k, 16).unwrap();
        let state = su11_lowest(k, 16).unwrap();
        let report = characteristic_ur(&set, &state, SATURATION_TOL).unwrap();
        let o2 = report.order(2).unwrap();
        assert_relative_eq!(o2.lhs, k * k / 4.0, epsilon = 1e-14);
        assert_relative_eq!(o2.rhs, k * k / 4.0, epsilon = 1e-14);
        assert!(o2.saturated);
        assert_relative_eq!(o2.lhs, 1.0 / 64.0, epsilon = 1e-14);
    }

    #[test]
    fn characteristic_ur_odd_orders_have_zero_rhs() {
        let mut rng = sampling::rng_stream(11, 0);
        let set = sampling::random_observable_set(3, 6, &mut rng);
        let state = sampling::random_pure(6, &mut rng);
        let report = characteristic_ur(&set, &state, SATURATION_TOL).unwrap();
        assert_eq!(report.order(1).unwrap().rhs, 0.0);
        assert_eq!(report.order(3).unwrap().rhs, 0.0);
    }

    #[test]
    fn pairwise_vacuum_and_fock_one() {
        let set = fock_quadratures(1, 16).unwrap();
        let (q, p) = (&set.matrices[0], &set.matrices[1]);
        let vac = vacuum(16).unwrap();
        let rep = pairwise_schrodinger(q, p, &vac, SATURATION_TOL).unwrap();
        assert_relative_eq!(rep.lhs_heis, 0.25, epsilon = 1e-14);
        assert_relative_eq!(rep.lhs_schr, 0.25, epsilon = 1e-14);
        assert_relative_eq!(rep.rhs, 0.25, epsilon = 1e-14);
        assert!(rep.saturated_heis && rep.saturated_schr);

        let one = fock_number(1, 16).unwrap();
        let rep1 = pairwise_schrodinger(q, p, &one, SATURATION_TOL).unwrap();
        assert_relative_eq!(rep1.lhs_schr, 9.0 / 4.0, epsilon = 1e-13);
        assert_relative_eq!(rep1.rhs, 1.0 / 4.0, epsilon = 1e-13);
        assert!(!rep1.saturated_schr);
    }

    #[test]
    fn pairwise_squeezed_saturates() {
        let set = fock_quadratures(1, 48).unwrap();
        let sq = squeezed_vacuum(0.5, 48).unwrap();
        let rep = pairwise_schrodinger(&set.matrices[0], &set.matrices[1], &sq, 1e-9).unwrap();
        assert!(rep.saturated_schr);
        assert!(rep.saturated_heis, "real squeezing has zero covariance");
        assert_relative_eq!(rep.lhs_schr, 0.25, epsilon = 1e-10);
    }

    #[test]
    fn trace_ur_vacuum_saturates_k1_k2() {
        let set = fock_quadratures(1, 16).unwrap();
        let vac = vacuum(16).unwrap();
        let report = trace_ur(&set, &vac, &[1, 2], SATURATION_TOL).unwrap();
        let k1 = &report.per_k[0];
        assert_relative_eq!(k1.lhs, 0.5, epsilon = 1e-12);
        assert_relative_eq!(k1.rhs, 0.5, epsilon = 1e-12);
        assert!(k1.holds && k1.saturated);
        let k2 = &report.per_k[1];
        assert_relative_eq!(k2.lhs, 1.0 / 8.0, epsilon = 1e-12);
        assert_relative_eq!(k2.rhs, 1.0 / 8.0, epsilon = 1e-12);
        assert!(k2.saturated);
        assert_relative_eq!(report.nus[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn trace_ur_hot_mixed_state_strict() {
        // σ = I (hotter than vacuum): lhs = 2 > 1/2 = rhs at k = 1.
        // A thermal state with ⟨n⟩ = 1/2 has that dispersion matrix.
        let dim = 32;
        let set = fock_quadratures(1, dim).unwrap();
        let nbar = 0.5_f64;
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        let ratio = nbar / (1.0 + nbar);
        let mut weight = 1.0 / (1.0 + nbar);
        let mut total = 0.0;
        for n in 0..dim {
            rho[(n, n)] = c(weight, 0.0);
            total += weight;
            weight *= ratio;
        }
        rho /= c(total, 0.0);
        let state = QuantumState::mixed(rho, None).unwrap();
        let report = trace_ur(&set, &state, &[1], SATURATION_TOL).unwrap();
        let k1 = &report.per_k[0];
        assert_relative_eq!(k1.lhs, 2.0, epsilon = 1e-6);
        assert_relative_eq!(k1.rhs, 0.5, epsilon = 1e-9);
        assert!(k1.holds && !k1.saturated);
    }

    #[test]
    fn trace_squared_is_twice_the_determinant() {
        // the k = 1 trace form carries a factor 2 relative to the pairwise
        // determinant form, on both sides, so saturation coincides
        let dim = 96;
        let set = fock_quadratures(1, dim).unwrap();
        for r in [0.0, 0.3, 0.8] {
            let state = squeezed_vacuum(r, dim).unwrap();
            let mp = moments::moment_pair(&set, &state).unwrap();
            let det_sigma = matcore::det_snapped(&mp.sigma).unwrap();
            let report = trace_ur(&set, &state, &[1], SATURATION_TOL).unwrap();
            assert_relative_eq!(report.per_k[0].lhs, 2.0 * det_sigma, epsilon = 1e-12);
            let pairwise =
                pairwise_schrodinger(&set.matrices[0], &set.matrices[1], &state, SATURATION_TOL)
                    .unwrap();
            assert_relative_eq!(report.per_k[0].rhs, 2.0 * pairwise.rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn trace_ur_rejects_singular_sigma() {
        // duplicating an observable makes σ singular
        let dim = 12;
        let set = fock_quadratures(1, dim).unwrap();
        let dup = ObservableSet::new(
            vec!["q".into(), "q2".into()],
            vec![set.matrices[0].clone(), set.matrices[0].clone()],
            None,
            set.interior_mask.clone(),
        )
        .unwrap();
        let vac = vacuum(dim).unwrap();
        assert!(matches!(
            trace_ur(&dup, &vac, &[1], SATURATION_TOL),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn trace_ur_two_mode_vacuum() {
        let set = fock_quadratures(2, 8).unwrap();
        let vac = crate::states::fock_number(0, 64).unwrap();
        let report = trace_ur(&set, &vac, &[1, 2], SATURATION_TOL).unwrap();
        let k1 = &report.per_k[0];
        assert_relative_eq!(k1.lhs, 1.0, epsilon = 1e-12);
        assert_relative_eq!(k1.rhs, 1.0, epsilon = 1e-12);
        assert!(k1.saturated);
    }

    #[test]
    fn proposition1_su11_cs() {
        let (k, dim) = (0.25, 64);
        let set = su11_generators(k, dim).unwrap();
        let state = su11_cs(c(0.5, 0.0), k, dim).unwrap();
        let report = proposition1_check(&set, &state, 2, SATURATION_TOL).unwrap();
        assert!(report.subsets_all_saturated, "{:?}", report.per_subset);
        assert!(report.order_r_saturated);
        assert!(report.implication_holds);
        assert_eq!(report.per_subset.len(), 3);
        assert_eq!(report.per_subset[0].indices, vec![0, 1]);
    }

    #[test]
    fn proposition1_bloch() {
        let set = su2_generators(1.0).unwrap();
        let state = bloch_cs(c(0.3, 0.0), 1.0).unwrap();
        for r in [2, 3] {
            let report = proposition1_check(&set, &state, r, 1e-10).unwrap();
            assert!(report.subsets_all_saturated, "r = {r}");
            assert!(report.order_r_saturated, "r = {r}");
        }
    }

    #[test]
    fn proposition1_generic_state_not_saturated() {
        let set = su2_generators(1.0).unwrap();
        let mut rng = sampling::rng_stream(5, 0);
        let state = sampling::random_pure(3, &mut rng);
        let report = proposition1_check(&set, &state, 2, SATURATION_TOL).unwrap();
        assert!(report.implication_holds);
        assert!(!report.subsets_all_saturated);
    }

    #[test]
    fn beta_system_resolves_sign() {
        let report =
            beta_system_verify(0.5, 0.5, 64, c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(
            report.sign, -1.0,
            "the -ζ state satisfies the published system"
        );
        for combo in &report.combinations {
            assert!(combo.residual < 1e-8, "{}: {}", combo.label, combo.residual);
        }
        // β'₁/β'₃ = 2ζ/(1+ζ²) = 0.8 at ζ = 0.5 is implicit in the combo;
        // its eigenvalue matches the published z' = 0.6·k·β'₃.
        let zp = &report.combinations[1];
        assert_relative_eq!(zp.rayleigh.re, 0.6 * 0.5, epsilon = 1e-9);
        assert!(zp.matches_formula);
        let zpp = &report.combinations[2];
        assert!(zpp.matches_formula);
        // the published first eigenvalue mixes ζ and ζ²; report, don't assert
        let z1 = &report.combinations[0];
        assert!(
            !z1.matches_formula,
            "the printed z formula is known to disagree"
        );
        assert_relative_eq!(z1.rayleigh.im, -2.0 * 0.5 * 0.5 / 1.25, epsilon = 1e-9);
    }

    #[test]
    fn invariance_bloch_rotations() {
        let set = su2_generators(1.0).unwrap();
        let state = bloch_cs(c(0.3, 0.0), 1.0).unwrap();
        let report = invariance_suite(&set, &state, 20, 42, SATURATION_TOL).unwrap();
        assert_eq!(report.orthogonal_mismatches, 0);
        assert_eq!(report.full_order_mismatches, 0);
        // det σ = 0 for a spin coherent state, so Λ = σ is skipped
        assert!(report.sigma_transform_preserved.is_none());
        // n = 3 odd: det C = 0 always
        assert!(report.cmat_transform_preserved.is_none());
    }

    #[test]
    fn invariance_quadratures_with_sigma_and_cmat_transforms() {
        let set = fock_quadratures(1, 32).unwrap();
        let state = squeezed_vacuum(0.3, 32).unwrap();
        let report = invariance_suite(&set, &state, 20, 7, 1e-8).unwrap();
        assert!(report.all_preserved(), "{report:?}");
        assert_eq!(report.sigma_transform_preserved, Some(true));
        assert_eq!(report.cmat_transform_preserved, Some(true));
    }

    #[test]
    fn diag_scaling_preserves_full_order_saturation() {
        // Λ = diag(2,1,1) doubles det λ; both sides scale by det²Λ = 4.
        let set = su2_generators(1.0).unwrap();
        let state = bloch_cs(c(0.4, 0.1), 1.0).unwrap();
        let lam = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
        let transformed = set.transformed(&lam).unwrap();
        let base = characteristic_ur(&set, &state, SATURATION_TOL).unwrap();
        let after = characteristic_ur(&transformed, &state, SATURATION_TOL).unwrap();
        assert_eq!(
            base.order(3).unwrap().saturated,
            after.order(3).unwrap().saturated
        );
    }

    #[test]
    fn bg_state_order3_saturated_via_sharp_combination() {
        // BG states are eigenstates of K₋, a complex combination; still the
        // su(1,1) CS all saturate r = 3 because det C vanishes identically
        // for 3 antisymmetric... check both sides at a genuine eigenstate of
        // a real combination instead: su11_cs.
        let (k, dim) = (0.5, 64);
        let set = su11_generators(k, dim).unwrap();
        let state = su11_cs(c(0.4, 0.0), k, dim).unwrap();
        let report = characteristic_ur(&set, &state, SATURATION_TOL).unwrap();
        let o3 = report.order(3).unwrap();
        assert!(o3.lhs.abs() < 1e-10, "det σ should vanish, got {}", o3.lhs);
        assert!(o3.saturated);

        let bg = bg_cs(c(0.8, 0.2), k, dim).unwrap();
        let bg_report = characteristic_ur(&set, &bg, SATURATION_TOL).unwrap();
        // r = 2 is generally NOT saturated for BG states
        assert!(!bg_report.order(2).unwrap().saturated);
    }
}
