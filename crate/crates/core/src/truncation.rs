//! Truncation-dimension control for the infinite-dimensional
//! representations: evaluate at a starting dimension and double until every
//! reported scalar stops moving and the state tail is negligible, or give
//! up at a hard cap. Exact finite representations (su(2)) evaluate once.

use serde::{Deserialize, Serialize};

use crate::algebra::{RepKind, RepSpec};
use crate::error::{Error, Result};
use crate::moments::{self, MomentPair};
use crate::states::{QuantumState, StateFamily, TAIL_TOL};
use crate::uncertainty::{self, Diagnostics, UrReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AutoPolicy {
    pub start: usize,
    pub cap: usize,
    /// Convergence threshold on the largest move of any reported scalar
    /// between consecutive doublings.
    pub value_tol: f64,
}

impl Default for AutoPolicy {
    fn default() -> Self {
        AutoPolicy {
            start: 32,
            cap: 4096,
            value_tol: 1e-10,
        }
    }
}

/// One attempted dimension in an auto-truncation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncationStep {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A converged (state, moments, report) triple at its final dimension.
#[derive(Debug, Clone)]
pub struct ConvergedEvaluation {
    pub rep: RepSpec,
    pub state: QuantumState,
    pub moment_pair: MomentPair,
    pub report: UrReport,
    pub steps: Vec<TruncationStep>,
}

fn evaluate_at(
    rep: &RepSpec,
    family: &StateFamily,
    tol: f64,
) -> Result<(QuantumState, MomentPair, UrReport)> {
    let set = rep.observables()?;
    let state = family.build(rep)?;
    let mp = moments::moment_pair(&set, &state)?;
    let report = uncertainty::characteristic_ur_from_moments(
        &mp,
        tol,
        Diagnostics {
            dim: set.dim(),
            tail_mass: state.tail_mass,
        },
    )?;
    Ok((state, mp, report))
}

fn scalars(mp: &MomentPair, report: &UrReport) -> Vec<f64> {
    let mut out: Vec<f64> = mp.means.iter().cloned().collect();
    out.extend(mp.sigma.iter().cloned());
    out.extend(mp.cmat.iter().cloned());
    for o in &report.per_order {
        out.push(o.lhs);
        out.push(o.rhs);
    }
    out
}

/// Single-shot evaluation at the dimension carried by the spec.
pub fn evaluate_fixed(
    rep: &RepSpec,
    family: &StateFamily,
    tol: f64,
) -> Result<ConvergedEvaluation> {
    let (state, moment_pair, report) = evaluate_at(rep, family, tol)?;
    let step = TruncationStep {
        dim: rep.total_dim(),
        tail_mass: Some(state.tail_mass),
        max_delta: None,
        error: None,
    };
    Ok(ConvergedEvaluation {
        rep: rep.clone(),
        state,
        moment_pair,
        report,
        steps: vec![step],
    })
}

/// Doubles the truncation dimension from `policy.start` until every
/// reported scalar moves less than `policy.value_tol` between steps and the
/// state tail mass is below the constructor threshold, then returns the
/// converged evaluation. Dimensions where the state cannot yet be built
/// (tail too fat) are recorded and skipped. Failing to converge by
/// `policy.cap` is a truncation error, distinct from a violated relation.
pub fn evaluate_auto(
    rep: &RepSpec,
    family: &StateFamily,
    tol: f64,
    policy: &AutoPolicy,
) -> Result<ConvergedEvaluation> {
    rep.validate()?;
    if rep.kind == RepKind::Su2 {
        return evaluate_fixed(rep, family, tol);
    }
    let mut steps = Vec::new();
    let mut prev: Option<(Vec<f64>, ConvergedEvaluation)> = None;
    let mut dim = policy.start.max(4);
    while dim <= policy.cap {
        let rep_at = rep.with_dim(dim);
        match evaluate_at(&rep_at, family, tol) {
            Ok((state, mp, report)) => {
                let values = scalars(&mp, &report);
                let tail = state.tail_mass;
                let candidate = ConvergedEvaluation {
                    rep: rep_at,
                    state,
                    moment_pair: mp,
                    report,
                    steps: Vec::new(),
                };
                let max_delta = prev.as_ref().map(|(old, _)| {
                    old.iter()
                        .zip(values.iter())
                        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
                });
                steps.push(TruncationStep {
                    dim,
                    tail_mass: Some(tail),
                    max_delta,
                    error: None,
                });
                if let Some(delta) = max_delta {
                    if delta < policy.value_tol && tail < TAIL_TOL {
                        let mut done = candidate;
                        done.steps = steps;
                        return Ok(done);
                    }
                }
                prev = Some((values, candidate));
            }
            Err(err @ (Error::TruncationTooSmall { .. } | Error::TailMassTooLarge { .. })) => {
                steps.push(TruncationStep {
                    dim,
                    tail_mass: None,
                    max_delta: None,
                    error: Some(err.to_string()),
                });
                prev = None;
            }
            Err(other) => return Err(other),
        }
        dim *= 2;
    }
    Err(Error::TruncationTooSmall {
        dim: policy.cap,
        tail: steps.last().and_then(|s| s.tail_mass).unwrap_or(f64::NAN),
        limit: TAIL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::C64;
    use approx::assert_relative_eq;

    #[test]
    fn auto_converges_for_moderate_zeta() {
        let rep = RepSpec::su11(0.25, 32).unwrap();
        let family = StateFamily::Su11Cs {
            zeta: C64::new(0.5, 0.0),
        };
        let done = evaluate_auto(&rep, &family, 1e-8, &AutoPolicy::default()).unwrap();
        assert!(done.rep.dim <= 128, "converged at dim {}", done.rep.dim);
        assert!(done.steps.len() >= 2);
        assert_relative_eq!(done.moment_pair.means[2], 5.0 / 12.0, epsilon = 1e-10);
        assert!(done.report.order(2).unwrap().saturated);
    }

    #[test]
    fn auto_gives_truncation_error_at_cap() {
        let rep = RepSpec::su11(0.5, 32).unwrap();
        let family = StateFamily::Su11Cs {
            zeta: C64::new(0.9995, 0.0),
        };
        let policy = AutoPolicy {
            start: 32,
            cap: 256,
            value_tol: 1e-10,
        };
        match evaluate_auto(&rep, &family, 1e-8, &policy) {
            Err(Error::TruncationTooSmall { dim, .. }) => assert_eq!(dim, 256),
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn su2_is_single_shot() {
        let rep = RepSpec::su2(1.0).unwrap();
        let family = StateFamily::Bloch {
            tau: C64::new(0.3, 0.0),
        };
        let done = evaluate_auto(&rep, &family, 1e-12, &AutoPolicy::default()).unwrap();
        assert_eq!(done.steps.len(), 1);
        assert!(done.report.order(2).unwrap().saturated);
    }
}
