//! Randomized and analytic invariant suites, shared by the CLI `validate`
//! subcommand and the integration tests. Each property runs its trials on
//! seeded substreams (in parallel under the default feature) and reports one
//! pass/fail line.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::error::{Error, Result};
use crate::matcore::{self, C64};
use crate::moments::{self, ComplexCombination};
use crate::parallel;
use crate::sampling;
use crate::search;
use crate::states::{self, AlgebraicCsParams, EigSelector, QuantumState};
use crate::uncertainty::{self, SATURATION_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl PropertyResult {
    fn new(suite: &str, name: &str, passed: bool, detail: String) -> Self {
        PropertyResult {
            suite: suite.into(),
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Counts failures across trials and summarizes the first failure message.
fn tally(
    suite: &str,
    name: &str,
    outcomes: Vec<std::result::Result<(), String>>,
) -> PropertyResult {
    let total = outcomes.len();
    let mut failures = 0usize;
    let mut first = String::new();
    for outcome in outcomes {
        if let Err(msg) = outcome {
            if failures == 0 {
                first = msg;
            }
            failures += 1;
        }
    }
    let passed = failures == 0;
    let detail = if passed {
        format!("{total} trials")
    } else {
        format!("{failures}/{total} trials failed; first: {first}")
    };
    PropertyResult::new(suite, name, passed, detail)
}

pub const SUITES: [&str; 6] = [
    "matrix",
    "algebra",
    "states",
    "moments",
    "uncertainty",
    "all",
];

/// Runs one named suite (or "all"). `trials` scales the randomized
/// properties; the reference scale is 10_000 draws for the theorem checks.
pub fn run_suite(suite: &str, trials: usize, seed: u64) -> Result<Vec<PropertyResult>> {
    let mut results = Vec::new();
    let all = suite == "all";
    if suite == "matrix" || all {
        matrix_suite(trials, seed, &mut results);
    }
    if suite == "algebra" || all {
        algebra_suite(seed, &mut results);
    }
    if suite == "states" || all {
        states_suite(seed, &mut results);
    }
    if suite == "moments" || all {
        moments_suite(trials, seed, &mut results);
    }
    if suite == "uncertainty" || all {
        uncertainty_suite(trials, seed, &mut results);
    }
    if results.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "unknown suite {suite}; available: {SUITES:?}"
        )));
    }
    Ok(results)
}

fn matrix_suite(trials: usize, seed: u64, out: &mut Vec<PropertyResult>) {
    let suite = "matrix";

    // two independent characteristic-coefficient routes agree
    out.push(tally(
        suite,
        "char_coeffs_minors_equals_faddeev",
        parallel::map_indexed(trials.min(2000), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x11, t as u64);
            let n = 2 + (t % 7); // up to 8
            let (s, k) = sampling::random_psd_split(n, &mut rng);
            let m = if t % 2 == 0 { s } else { k };
            let a = matcore::char_coeffs_minors(&m).map_err(|e| e.to_string())?;
            let b = matcore::char_coeffs_faddeev(&m).map_err(|e| e.to_string())?;
            for r in 0..=n {
                let scale = f64::max(1.0, a.get(r).abs());
                if (a.get(r) - b.get(r)).abs() > 1e-10 * scale {
                    return Err(format!(
                        "n={n} r={r}: minors {} vs faddeev {}",
                        a.get(r),
                        b.get(r)
                    ));
                }
            }
            Ok(())
        }),
    ));

    // odd antisymmetric: exact zeros
    out.push(tally(
        suite,
        "antisymmetric_odd_coefficients_vanish",
        parallel::map_indexed(trials.min(2000), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x12, t as u64);
            let n = [3, 5, 7][t % 3];
            let (_, k) = sampling::random_psd_split(n, &mut rng);
            let coeffs = matcore::char_coeffs_minors(&k).map_err(|e| e.to_string())?;
            for r in (1..=n).step_by(2) {
                if coeffs.get(r).abs() > 1e-12 {
                    return Err(format!("n={n} odd r={r}: {}", coeffs.get(r)));
                }
            }
            if n % 2 == 1 && coeffs.get(n) != 0.0 {
                return Err(format!(
                    "odd-dimension det should snap to 0, got {}",
                    coeffs.get(n)
                ));
            }
            Ok(())
        }),
    ));

    // principal minors of a PSD matrix are nonnegative
    out.push(tally(
        suite,
        "psd_principal_minors_nonnegative",
        parallel::map_indexed(trials.min(2000), |t| {
            use itertools::Itertools;
            let mut rng = sampling::rng_stream(seed ^ 0x13, t as u64);
            let n = 2 + (t % 5);
            let (s, _) = sampling::random_psd_split(n, &mut rng);
            for r in 1..=n {
                for idx in (0..n).combinations(r) {
                    let m = matcore::principal_minor(&s, &idx).map_err(|e| e.to_string())?;
                    if m < -1e-12 {
                        return Err(format!("minor {idx:?} = {m}"));
                    }
                }
            }
            Ok(())
        }),
    ));

    // abstract matrix theorem: S + iK PSD Hermitian forces C_r(S) ≥ C_r(K)
    out.push(tally(
        suite,
        "psd_splitting_characteristic_inequality",
        parallel::map_indexed(trials, |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x14, t as u64);
            let n = 2 + (t % 7);
            let (s, k) = sampling::random_psd_split(n, &mut rng);
            let cs = matcore::char_coeffs_minors(&s).map_err(|e| e.to_string())?;
            let ck = matcore::char_coeffs_minors(&k).map_err(|e| e.to_string())?;
            for r in 1..=n {
                if cs.get(r) < ck.get(r) - 1e-10 {
                    return Err(format!(
                        "n={n} r={r}: C_r(S)={} < C_r(K)={}",
                        cs.get(r),
                        ck.get(r)
                    ));
                }
            }
            Ok(())
        }),
    ));

    // Williamson invariants on random positive definite dispersion matrices
    out.push(tally(
        suite,
        "williamson_invariants",
        parallel::map_indexed(trials.min(500), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x15, t as u64);
            let modes = 1 + t % 2;
            let d = 2 * modes;
            let (s, _) = sampling::random_psd_split(d, &mut rng);
            let sigma = &s + DMatrix::<f64>::identity(d, d).scale(0.5);
            let w = matcore::williamson(&sigma).map_err(|e| e.to_string())?;
            let j = matcore::SymplecticForm::new(modes)
                .map_err(|e| e.to_string())?
                .matrix();
            let sym = matcore::max_abs(&(&w.lambda * &j * w.lambda.transpose() - &j));
            let diag =
                matcore::max_abs(&(&w.lambda * &sigma * w.lambda.transpose() - w.diagonal()));
            if sym > 1e-9 {
                return Err(format!("symplectic defect {sym}"));
            }
            if diag > 1e-9 {
                return Err(format!("diagonalization defect {diag}"));
            }
            if w.nus.windows(2).any(|p| p[0] < p[1]) {
                return Err("symplectic eigenvalues not sorted descending".into());
            }
            Ok(())
        }),
    ));
}

fn algebra_suite(seed: u64, out: &mut Vec<PropertyResult>) {
    let suite = "algebra";
    let _ = seed;

    let mut hermitian_ok = Vec::new();
    for (name, set) in [
        ("su2(j=3/2)", algebra::su2_generators(1.5)),
        ("su11(k=1/4)", algebra::su11_generators(0.25, 48)),
        ("su11(k=3/4)", algebra::su11_generators(0.75, 48)),
        ("fock(1)", algebra::fock_quadratures(1, 32)),
        ("fock(2)", algebra::fock_quadratures(2, 8)),
    ] {
        let result = set.map_err(|e| e.to_string()).and_then(|set| {
            for m in &set.matrices {
                let defect = matcore::hermitian_defect(m);
                if defect > 1e-12 {
                    return Err(format!("{name}: defect {defect}"));
                }
            }
            let residual = algebra::structure_residual(&set).map_err(|e| e.to_string())?;
            if residual > 1e-12 {
                return Err(format!("{name}: interior residual {residual}"));
            }
            Ok(())
        });
        hermitian_ok.push(result);
    }
    out.push(tally(
        suite,
        "generators_hermitian_with_exact_interior",
        hermitian_ok,
    ));

    // raising-operator matrix elements match the closed formula
    let kp_elements = (0..40usize)
        .map(|n| {
            let k = 0.25 + 0.25 * (n % 4) as f64;
            let set = algebra::su11_generators(k, 48).map_err(|e| e.to_string())?;
            let kp = &set.matrices[0] + &set.matrices[1] * C64::new(0.0, 1.0);
            let nf = n as f64;
            let expect = ((nf + 1.0) * (2.0 * k + nf)).sqrt();
            let got = kp[(n + 1, n)].re;
            if (got - expect).abs() > 1e-12 * expect.max(1.0) {
                return Err(format!("k={k} n={n}: {got} vs {expect}"));
            }
            Ok(())
        })
        .collect();
    out.push(tally(suite, "su11_raising_matrix_elements", kp_elements));

    // doubling the truncation leaves converged moments unchanged
    let convergence = [0.25, 0.5, 1.0]
        .into_iter()
        .map(|k| {
            let mut prev: Option<f64> = None;
            for dim in [64, 128, 256] {
                let set = algebra::su11_generators(k, dim).map_err(|e| e.to_string())?;
                let state =
                    states::su11_cs(C64::new(0.6, 0.1), k, dim).map_err(|e| e.to_string())?;
                let mp = moments::moment_pair(&set, &state).map_err(|e| e.to_string())?;
                let probe = mp.sigma[(0, 0)] + mp.means[2];
                if let Some(p) = prev {
                    if (probe - p).abs() > 1e-10 {
                        return Err(format!("k={k} dim={dim}: moved {}", (probe - p).abs()));
                    }
                }
                prev = Some(probe);
            }
            Ok(())
        })
        .collect();
    out.push(tally(
        suite,
        "moments_converged_under_dim_doubling",
        convergence,
    ));
}

fn states_suite(seed: u64, out: &mut Vec<PropertyResult>) {
    let suite = "states";

    // every constructor yields unit norm, with acceptable tail on the
    // truncated (infinite-dimensional) representations; Bloch states live
    // in an exact finite basis where tail mass is just a diagnostic
    let families: Vec<(String, bool, Result<QuantumState>)> = vec![
        (
            "su11_cs".into(),
            true,
            states::su11_cs(C64::new(0.5, 0.2), 0.75, 96),
        ),
        (
            "bloch".into(),
            false,
            states::bloch_cs(C64::new(0.4, -0.3), 1.5),
        ),
        (
            "bg".into(),
            true,
            states::bg_cs(C64::new(1.0, 0.5), 0.5, 48),
        ),
        ("squeezed".into(), true, states::squeezed_vacuum(0.8, 96)),
        (
            "even".into(),
            true,
            states::even_odd_cs(C64::new(1.2, 0.0), states::Parity::Even, 40),
        ),
        (
            "odd".into(),
            true,
            states::even_odd_cs(C64::new(1.2, 0.3), states::Parity::Odd, 48),
        ),
    ];
    let norm_checks = families
        .into_iter()
        .map(|(name, truncated, state)| {
            let state = state.map_err(|e| format!("{name}: {e}"))?;
            let v = state.vector().map_err(|e| format!("{name}: {e}"))?;
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(format!("{name}: norm {}", v.norm()));
            }
            if truncated && state.tail_mass >= states::TAIL_TOL {
                return Err(format!("{name}: tail {}", state.tail_mass));
            }
            Ok(())
        })
        .collect();
    out.push(tally(
        suite,
        "constructors_unit_norm_small_tail",
        norm_checks,
    ));

    // defining-equation residuals per family
    let residuals = vec![
        {
            let state = states::su11_cs(C64::new(0.5, 0.0), 0.5, 64).unwrap();
            let p = states::maximal_symmetry_cs_params(C64::new(0.5, 0.0), 0.5, C64::new(1.0, 0.0))
                .unwrap();
            let res = states::su11_combo_residual(state.vector().unwrap(), 0.5, p.u, p.v, p.w, p.z);
            if res < 1e-8 {
                Ok(())
            } else {
                Err(format!("zeta-CS residual {res}"))
            }
        },
        {
            let z = C64::new(1.0, 0.5);
            let state = states::bg_cs(z, 0.5, 48).unwrap();
            let res = states::su11_combo_residual(
                state.vector().unwrap(),
                0.5,
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                z,
            );
            if res < 1e-9 {
                Ok(())
            } else {
                Err(format!("BG residual {res}"))
            }
        },
        {
            let alpha = C64::new(1.2, 0.0);
            let state = states::even_odd_cs(alpha, states::Parity::Even, 40).unwrap();
            let res = states::fock_a2_residual(state.vector().unwrap(), alpha * alpha);
            if res < 1e-9 {
                Ok(())
            } else {
                Err(format!("even-CS residual {res}"))
            }
        },
    ];
    out.push(tally(suite, "defining_equation_residuals", residuals));

    // series vs eigensolve on random elliptic draws
    out.push(tally(
        suite,
        "series_eigensolve_cross_validation",
        parallel::map_indexed(20, |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x31, t as u64);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, r: f64| {
                let radius = r * rng.random::<f64>().sqrt();
                let angle = std::f64::consts::TAU * rng.random::<f64>();
                C64::from_polar(radius, angle)
            };
            // parameters from roots inside the disk: normalizable regime,
            // all magnitudes ≤ 1.5
            let u = C64::from_polar(
                0.4 + 0.5 * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            );
            let s1 = draw(&mut rng, 0.7);
            let s2 = draw(&mut rng, 0.7);
            let w = -u * (s1 + s2);
            let v = u * s1 * s2;
            let k = [0.25, 0.5, 0.75, 1.0][t % 4];
            let z = draw(&mut rng, 1.0);
            let params = AlgebraicCsParams { z, u, v, w, k };
            let dim = 96;
            let series = states::algebraic_cs_series(&params, dim).map_err(|e| e.to_string())?;
            let (eig, _) =
                states::algebraic_cs_eigensolve(u, v, w, k, dim, EigSelector::TargetZ(z))
                    .map_err(|e| e.to_string())?;
            let overlap = series.overlap(&eig).map_err(|e| e.to_string())?;
            if overlap > 1.0 - 1e-8 {
                Ok(())
            } else {
                Err(format!("overlap {overlap} for {params:?}"))
            }
        }),
    ));

    // the Barut–Girardello limit of the series
    let bg_limits = [0.25, 0.5, 1.0]
        .into_iter()
        .map(|k| {
            let z = C64::new(0.9, -0.4);
            let params = AlgebraicCsParams {
                z,
                u: C64::new(1.0, 0.0),
                v: C64::new(0.0, 0.0),
                w: C64::new(0.0, 0.0),
                k,
            };
            let series = states::algebraic_cs_series(&params, 64).map_err(|e| e.to_string())?;
            let bg = states::bg_cs(z, k, 64).map_err(|e| e.to_string())?;
            let overlap = series.overlap(&bg).map_err(|e| e.to_string())?;
            if overlap > 1.0 - 1e-10 {
                Ok(())
            } else {
                Err(format!("k={k}: overlap {overlap}"))
            }
        })
        .collect();
    out.push(tally(
        suite,
        "series_reproduces_barut_girardello",
        bg_limits,
    ));
}

fn moments_suite(trials: usize, seed: u64, out: &mut Vec<PropertyResult>) {
    let suite = "moments";

    // σ + iC is PSD for random states and observable sets (pure and mixed)
    out.push(tally(
        suite,
        "hermitian_companion_psd",
        parallel::map_indexed(trials, |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x41, t as u64);
            let n = 2 + t % 3;
            let d = 2 + t % 7;
            let set = sampling::random_observable_set(n, d, &mut rng);
            let state = if t % 2 == 0 {
                sampling::random_pure(d, &mut rng)
            } else {
                sampling::random_mixed(d, 1 + t % 3, &mut rng)
            };
            // moment_pair internally rejects non-PSD companions
            moments::moment_pair(&set, &state)
                .map(|_| ())
                .map_err(|e| e.to_string())
        }),
    ));

    // transformation law under X' = ΛX
    out.push(tally(
        suite,
        "congruence_transformation_law",
        parallel::map_indexed(trials.min(2000), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x42, t as u64);
            let n = 2 + t % 3;
            let d = 3 + t % 5;
            let set = sampling::random_observable_set(n, d, &mut rng);
            let state = sampling::random_pure(d, &mut rng);
            let lambda = sampling::random_nonsingular(n, &mut rng);
            let mp = moments::moment_pair(&set, &state).map_err(|e| e.to_string())?;
            let transformed = set.transformed(&lambda).map_err(|e| e.to_string())?;
            let mp_t = moments::moment_pair(&transformed, &state).map_err(|e| e.to_string())?;
            let sigma_expect =
                matcore::congruence(&lambda, &mp.sigma).map_err(|e| e.to_string())?;
            let cmat_expect = matcore::congruence(&lambda, &mp.cmat).map_err(|e| e.to_string())?;
            let scale = f64::max(1.0, matcore::max_abs(&sigma_expect));
            let ds = matcore::max_abs(&(&mp_t.sigma - sigma_expect));
            let dc = matcore::max_abs(&(&mp_t.cmat - cmat_expect));
            if ds > 1e-10 * scale || dc > 1e-10 * scale {
                return Err(format!("sigma defect {ds}, cmat defect {dc}"));
            }
            Ok(())
        }),
    ));

    // sharp real combinations have vanishing σβ
    out.push(tally(
        suite,
        "sharp_observable_kills_sigma_direction",
        parallel::map_indexed(trials.min(500), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x43, t as u64);
            let d = 4 + t % 4;
            let set = sampling::random_observable_set(3, d, &mut rng);
            // an eigenvector of X₁ is sharp for β = (1,0,0)
            let eig = set.matrices[0].clone().symmetric_eigen();
            let column = eig.eigenvectors.column(t % d).into_owned();
            let state = QuantumState::from_coefficients(column, None).map_err(|e| e.to_string())?;
            let combo = ComplexCombination::new(vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ])
            .map_err(|e| e.to_string())?;
            let (residual, _) =
                moments::eigenstate_residual(&combo, &set, &state).map_err(|e| e.to_string())?;
            if residual > 1e-8 {
                return Err(format!("eigenvector residual {residual}"));
            }
            let mp = moments::moment_pair(&set, &state).map_err(|e| e.to_string())?;
            let beta = nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0]);
            let sb = (&mp.sigma * beta).norm();
            if sb > 1e-6 {
                return Err(format!("‖σβ‖ = {sb}"));
            }
            Ok(())
        }),
    ));
}

fn uncertainty_suite(trials: usize, seed: u64, out: &mut Vec<PropertyResult>) {
    let suite = "uncertainty";

    // the characteristic relations hold for random states and observables
    out.push(tally(
        suite,
        "characteristic_relations_randomized",
        parallel::map_indexed(trials, |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x51, t as u64);
            let n = 2 + t % 3; // 2, 3, 4
            let d = 2 + t % 7; // up to 8
            let set = sampling::random_observable_set(n, d, &mut rng);
            let state = if t % 2 == 0 {
                sampling::random_pure(d, &mut rng)
            } else {
                sampling::random_mixed(d, 1 + t % 4, &mut rng)
            };
            // a violation is returned as an error by construction
            uncertainty::characteristic_ur(&set, &state, SATURATION_TOL)
                .map(|_| ())
                .map_err(|e| e.to_string())
        }),
    ));

    // odd orders have exactly zero right-hand side
    out.push(tally(
        suite,
        "odd_order_rhs_exactly_zero",
        parallel::map_indexed(trials.min(2000), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x52, t as u64);
            let n = 3 + t % 2; // 3 or 4
            let d = 3 + t % 5;
            let set = sampling::random_observable_set(n, d, &mut rng);
            let state = sampling::random_pure(d, &mut rng);
            let report = uncertainty::characteristic_ur(&set, &state, SATURATION_TOL)
                .map_err(|e| e.to_string())?;
            for o in &report.per_order {
                if o.r % 2 == 1 && o.rhs.abs() > 1e-12 {
                    return Err(format!("r={} rhs={}", o.r, o.rhs));
                }
            }
            Ok(())
        }),
    ));

    // the full order reproduces the determinant form
    out.push(tally(
        suite,
        "full_order_equals_determinants",
        parallel::map_indexed(trials.min(2000), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x53, t as u64);
            let n = 2 + t % 3;
            let d = 3 + t % 5;
            let set = sampling::random_observable_set(n, d, &mut rng);
            let state = sampling::random_pure(d, &mut rng);
            let mp = moments::moment_pair(&set, &state).map_err(|e| e.to_string())?;
            let report = uncertainty::characteristic_ur(&set, &state, SATURATION_TOL)
                .map_err(|e| e.to_string())?;
            let full = report.per_order.last().unwrap();
            let det_sigma = matcore::det_snapped(&mp.sigma).map_err(|e| e.to_string())?;
            let det_cmat = matcore::det_snapped(&mp.cmat).map_err(|e| e.to_string())?;
            let scale = f64::max(1.0, det_sigma.abs());
            if (full.lhs - det_sigma).abs() > 1e-10 * scale
                || (full.rhs - det_cmat).abs() > 1e-10 * scale
            {
                return Err(format!(
                    "r=n lhs {} vs det σ {}, rhs {} vs det C {}",
                    full.lhs, det_sigma, full.rhs, det_cmat
                ));
            }
            Ok(())
        }),
    ));

    // subset-criterion implication never fires false
    out.push(tally(
        suite,
        "subset_criterion_implication",
        parallel::map_indexed(trials.min(1000), |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x54, t as u64);
            let n = 3 + t % 2;
            let d = 3 + t % 5;
            let set = sampling::random_observable_set(n, d, &mut rng);
            let state = sampling::random_pure(d, &mut rng);
            for r in 2..n {
                let rep = uncertainty::proposition1_check(&set, &state, r, SATURATION_TOL)
                    .map_err(|e| e.to_string())?;
                if !rep.implication_holds {
                    return Err(format!("implication violated at r={r}"));
                }
            }
            Ok(())
        }),
    ));

    // a sharp real combination forces both sides of the full order to zero
    let sharp = [(0.25, 0.3), (0.5, 0.5), (1.0, 0.7)]
        .into_iter()
        .map(|(k, zeta)| {
            let dim = 256;
            let set = algebra::su11_generators(k, dim).map_err(|e| e.to_string())?;
            let state = states::su11_cs(C64::new(zeta, 0.0), k, dim).map_err(|e| e.to_string())?;
            let report = uncertainty::characteristic_ur(&set, &state, SATURATION_TOL)
                .map_err(|e| e.to_string())?;
            let o3 = report.per_order.last().unwrap();
            if o3.lhs.abs() > 1e-10 || !o3.saturated {
                return Err(format!(
                    "k={k} zeta={zeta}: lhs {} saturated {}",
                    o3.lhs, o3.saturated
                ));
            }
            Ok(())
        })
        .collect();
    out.push(tally(suite, "sharp_combination_forces_full_order", sharp));

    // trace relation at k=1 saturates exactly when the covariance-corrected
    // pairwise relation does, on random centered Gaussian states and
    // non-Gaussian controls
    out.push(tally(
        suite,
        "trace_and_pairwise_saturation_cooccur",
        parallel::map_indexed(100, |t| {
            let mut rng = sampling::rng_stream(seed ^ 0x55, t as u64);
            let dim = 48;
            let set = algebra::fock_quadratures(1, dim).map_err(|e| e.to_string())?;
            let state = if t % 2 == 0 {
                sampling::random_gaussian_like(dim, 0.6, &mut rng)
            } else {
                // control: a superposition with the vacuum replaced by |1⟩
                // weight, generically not a minimizer
                let g = sampling::random_gaussian_like(dim, 0.4, &mut rng);
                let mut v = g.vector().unwrap().clone();
                v[1] += C64::new(0.35, 0.1);
                QuantumState::from_coefficients(v, None).map_err(|e| e.to_string())?
            };
            let trace =
                uncertainty::trace_ur(&set, &state, &[1], 1e-8).map_err(|e| e.to_string())?;
            let pairwise =
                uncertainty::pairwise_schrodinger(&set.matrices[0], &set.matrices[1], &state, 1e-8)
                    .map_err(|e| e.to_string())?;
            let trace_sat = trace.per_k[0].saturated;
            if trace_sat != pairwise.saturated_schr {
                return Err(format!(
                    "trace saturated {trace_sat} but pairwise {}",
                    pairwise.saturated_schr
                ));
            }
            if t % 2 == 0 && !trace_sat {
                return Err("gaussian state failed to saturate".into());
            }
            Ok(())
        }),
    ));

    // invariance of flags under orthogonal transforms
    let invariance = vec![
        {
            let set = algebra::su2_generators(1.0).map_err(|e| e.to_string());
            set.and_then(|set| {
                let state = states::bloch_cs(C64::new(0.3, 0.1), 1.0).map_err(|e| e.to_string())?;
                let rep =
                    uncertainty::invariance_suite(&set, &state, 25, seed ^ 0x56, SATURATION_TOL)
                        .map_err(|e| e.to_string())?;
                if rep.orthogonal_mismatches == 0 && rep.full_order_mismatches == 0 {
                    Ok(())
                } else {
                    Err(format!("{rep:?}"))
                }
            })
        },
        {
            let set = algebra::su11_generators(0.5, 128).map_err(|e| e.to_string());
            set.and_then(|set| {
                let state =
                    states::su11_cs(C64::new(0.4, 0.0), 0.5, 128).map_err(|e| e.to_string())?;
                let rep =
                    uncertainty::invariance_suite(&set, &state, 25, seed ^ 0x57, SATURATION_TOL)
                        .map_err(|e| e.to_string())?;
                if rep.orthogonal_mismatches == 0 && rep.full_order_mismatches == 0 {
                    Ok(())
                } else {
                    Err(format!("{rep:?}"))
                }
            })
        },
    ];
    out.push(tally(suite, "orthogonal_invariance_of_flags", invariance));

    // determinism of the search path
    let determinism = vec![(|| -> std::result::Result<(), String> {
        let spec = search::SearchSpec {
            rep: crate::algebra::RepSpec::su2(0.5).unwrap(),
            order: 2,
            space: search::SearchSpace::FullPureState,
            optimizer: search::OptimizerConfig {
                max_evals: 600,
                restarts: 2,
                seed: seed ^ 0x58,
                ..search::OptimizerConfig::default()
            },
            tol: 1e-8,
        };
        let a = search::minimize_gap(&spec).map_err(|e| e.to_string())?;
        let b = search::minimize_gap(&spec).map_err(|e| e.to_string())?;
        if a == b {
            Ok(())
        } else {
            Err("same seed produced different search results".into())
        }
    })()];
    out.push(tally(suite, "search_determinism", determinism));
}
