//! Derivative-free minimization of characteristic-relation gaps over
//! parameterized state families and over the full pure-state manifold, plus
//! grid sweeps. Used to confirm numerically that the coherent-state
//! families are the minimizers.
//!
//! Pure states are parameterized by 2d-2 unconstrained reals: d-1
//! hyperspherical angles fixing the magnitudes (unit norm by construction)
//! and d-1 phases, with the global phase removed. The optimizer is a
//! multi-restart adaptive Nelder–Mead descent; each restart owns a seeded
//! RNG substream and restarts merge deterministically in index order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{ObservableSet, RepSpec};
use crate::error::{Error, Result};
use crate::matcore::{self, C64};
use crate::moments;
use crate::parallel;
use crate::sampling;
use crate::states::{QuantumState, StateFamily};
use crate::uncertainty::{self, Diagnostics, OrderReport, Proposition1Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    pub restarts: usize,
    pub simplex_scale: f64,
    pub seed: u64,
    pub ftol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evals: 20_000,
            restarts: 8,
            simplex_scale: 0.5,
            seed: 0,
            ftol: 1e-13,
        }
    }
}

/// A named parameter interval for family searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchSpace {
    /// All pure states of the representation space (2d-2 real parameters).
    FullPureState,
    /// A named state family with finite parameter ranges.
    Family {
        family: StateFamily,
        params: Vec<ParamRange>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchSpec {
    pub rep: RepSpec,
    pub order: usize,
    pub space: SearchSpace,
    pub optimizer: OptimizerConfig,
    /// Saturation tolerance used when certifying a minimizer.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RestartTrace {
    pub restart: usize,
    pub best: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    pub best_params: Vec<f64>,
    pub best_gap: f64,
    pub best_state: QuantumState,
    pub eval_count: usize,
    pub converged: bool,
    pub trace: Vec<RestartTrace>,
    /// Present when the best gap fell below the search tolerance: the subset
    /// criterion evaluated at the minimizer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certification: Option<Proposition1Report>,
}

/// Maps 2d-2 unconstrained parameters to a unit-norm pure state.
pub fn pure_state_from_angles(x: &[f64], dim: usize) -> Result<QuantumState> {
    if x.len() != 2 * dim - 2 {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: 2 * dim - 2,
        });
    }
    let (thetas, phases) = x.split_at(dim - 1);
    let mut coeffs = nalgebra::DVector::<C64>::zeros(dim);
    let mut sin_prod = 1.0;
    for i in 0..dim {
        let mag = if i < dim - 1 {
            let m = sin_prod * thetas[i].cos();
            sin_prod *= thetas[i].sin();
            m
        } else {
            sin_prod
        };
        let phase = if i == 0 { 0.0 } else { phases[i - 1] };
        coeffs[i] = C64::from_polar(
            mag.abs(),
            phase + if mag < 0.0 { std::f64::consts::PI } else { 0.0 },
        );
    }
    QuantumState::from_coefficients(coeffs, None)
}

struct Objective<'a> {
    set: &'a ObservableSet,
    rep: &'a RepSpec,
    order: usize,
    space: &'a SearchSpace,
    /// worst theorem violation seen, if any
    violation: Option<(usize, f64)>,
}

impl<'a> Objective<'a> {
    fn state_for(&self, x: &[f64]) -> Result<QuantumState> {
        match self.space {
            SearchSpace::FullPureState => pure_state_from_angles(x, self.set.dim()),
            SearchSpace::Family { family, params } => {
                let mut fam = family.clone();
                for (range, &value) in params.iter().zip(x.iter()) {
                    fam.set_param(&range.name, value)?;
                }
                fam.build(self.rep)
            }
        }
    }

    /// Tail-heavy points on a truncated representation get a large finite
    /// penalty that shrinks as the tail does, so the simplex has a descent
    /// direction back into the feasible region instead of a wall of
    /// infinities (a random point on a 20-level sphere almost always
    /// carries too much mass in the top levels).
    fn tail_penalty(tail: f64) -> f64 {
        1e9 * (1.0 + (tail / crate::states::TAIL_TOL).ln().max(0.0))
    }

    fn gap(&mut self, x: &[f64]) -> f64 {
        let state = match self.state_for(x) {
            Ok(s) => s,
            Err(Error::TruncationTooSmall { tail, .. }) => return Self::tail_penalty(tail),
            Err(_) => return f64::INFINITY,
        };
        let mp = match moments::moment_pair(self.set, &state) {
            Ok(mp) => mp,
            Err(Error::TailMassTooLarge { tail }) => return Self::tail_penalty(tail),
            Err(_) => return f64::INFINITY,
        };
        let cs = match matcore::char_coeffs_minors(&mp.sigma) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        let cc = match matcore::char_coeffs_minors(&mp.cmat) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        let gap = cs.get(self.order) - cc.get(self.order);
        let scale = f64::max(1.0, cs.get(self.order).abs());
        if gap < -uncertainty::VIOLATION_TOL * scale {
            let worse = match self.violation {
                Some((_, g)) => gap < g,
                None => true,
            };
            if worse {
                self.violation = Some((self.order, gap));
            }
        }
        gap
    }
}

/// Adaptive Nelder–Mead (dimension-scaled expansion/contraction/shrink
/// coefficients). Returns (best point, best value, evals used, converged).
fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    ftol: f64,
) -> (Vec<f64>, f64, usize, bool) {
    let n = x0.len();
    let (alpha, beta, gamma, delta) = (
        1.0,
        1.0 + 2.0 / n as f64,
        0.75 - 1.0 / (2.0 * n as f64),
        1.0 - 1.0 / n as f64,
    );
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut xi = x0.to_vec();
        xi[i] += step;
        let fxi = eval(&xi, &mut evals);
        simplex.push((xi, fxi));
    }

    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for (c, v) in centroid.iter_mut().zip(x.iter()) {
                *c += v / n as f64;
            }
        }
        let second_worst = simplex[n - 1].1;
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(simplex[n].0.iter())
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let f_reflect = eval(&reflect, &mut evals);

        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(reflect.iter())
                .map(|(c, r)| c + beta * (r - c))
                .collect();
            let f_expand = eval(&expand, &mut evals);
            simplex[n] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < second_worst {
            simplex[n] = (reflect, f_reflect);
        } else {
            let (base, f_base) = if f_reflect < simplex[n].1 {
                (reflect.clone(), f_reflect)
            } else {
                (simplex[n].0.clone(), simplex[n].1)
            };
            let contract: Vec<f64> = centroid
                .iter()
                .zip(base.iter())
                .map(|(c, b)| c + gamma * (b - c))
                .collect();
            let f_contract = eval(&contract, &mut evals);
            if f_contract < f_base {
                simplex[n] = (contract, f_contract);
            } else {
                // shrink toward the best vertex
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best_x
                        .iter()
                        .zip(entry.0.iter())
                        .map(|(b, x)| b + delta * (x - b))
                        .collect();
                    let f_shrunk = eval(&shrunk, &mut evals);
                    *entry = (shrunk, f_shrunk);
                    if evals >= max_evals {
                        break;
                    }
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, evals, converged)
}

fn random_start(space: &SearchSpace, dim: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    match space {
        SearchSpace::FullPureState => {
            let mut x = Vec::with_capacity(2 * dim - 2);
            for _ in 0..dim - 1 {
                x.push(rng.random::<f64>() * std::f64::consts::PI);
            }
            for _ in 0..dim - 1 {
                x.push(rng.random::<f64>() * std::f64::consts::TAU);
            }
            x
        }
        SearchSpace::Family { params, .. } => params
            .iter()
            .map(|p| p.lo + (p.hi - p.lo) * rng.random::<f64>())
            .collect(),
    }
}

/// Multi-restart simplex descent on the order-r characteristic gap.
/// Deterministic for a fixed seed: restarts run on independent substreams
/// and merge in restart order. Every evaluated gap is checked against the
/// theorem; a violation aborts with an error instead of being optimized.
pub fn minimize_gap(spec: &SearchSpec) -> Result<SearchResult> {
    spec.rep.validate()?;
    let set = spec.rep.observables()?;
    if spec.order == 0 || spec.order > set.len() {
        return Err(Error::InvalidParameter(format!(
            "order {} out of range 1..={}",
            spec.order,
            set.len()
        )));
    }
    let dim = set.dim();
    let n_params = match &spec.space {
        SearchSpace::FullPureState => 2 * dim - 2,
        SearchSpace::Family { params, .. } => {
            if params.is_empty() {
                return Err(Error::InvalidParameter(
                    "family search needs parameters".into(),
                ));
            }
            if params
                .iter()
                .any(|p| !p.lo.is_finite() || !p.hi.is_finite() || p.lo >= p.hi)
            {
                return Err(Error::InvalidParameter(
                    "parameter ranges must be finite".into(),
                ));
            }
            params.len()
        }
    };

    let budget_per_restart = spec.optimizer.max_evals.max(n_params + 2);
    type RestartOutcome = (Vec<f64>, f64, usize, bool, Option<(usize, f64)>);
    let restarts: Vec<RestartOutcome> =
        parallel::map_indexed(spec.optimizer.restarts.max(1), |ri| {
            let mut rng = sampling::rng_stream(spec.optimizer.seed, ri as u64);
            let mut objective = Objective {
                set: &set,
                rep: &spec.rep,
                order: spec.order,
                space: &spec.space,
                violation: None,
            };
            let mut x = random_start(&spec.space, dim, &mut rng);
            let mut fx = f64::INFINITY;
            let mut used = 0;
            let mut converged = false;
            // three stages with shrinking initial steps, re-centered on the
            // stage best: helps the simplex escape high-dimension stagnation
            let stages = [1.0, 0.2, 0.04];
            let stage_budget = budget_per_restart / stages.len();
            for scale in stages {
                let step = spec.optimizer.simplex_scale * scale;
                let mut f = |p: &[f64]| objective.gap(p);
                let (bx, bfx, ev, conv) =
                    nelder_mead(&mut f, &x, step, stage_budget, spec.optimizer.ftol);
                used += ev;
                if bfx < fx {
                    x = bx;
                    fx = bfx;
                }
                converged = conv;
            }
            (x, fx, used, converged, objective.violation)
        });

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut eval_count = 0;
    let mut any_converged = false;
    let mut trace = Vec::with_capacity(restarts.len());
    for (ri, (x, fx, used, converged, violation)) in restarts.into_iter().enumerate() {
        if let Some((r, gap)) = violation {
            return Err(Error::RelationViolated {
                r,
                gap,
                tol: uncertainty::VIOLATION_TOL,
            });
        }
        eval_count += used;
        any_converged |= converged && fx.is_finite();
        trace.push(RestartTrace {
            restart: ri,
            best: fx,
            evals: used,
            converged,
        });
        let better = match &best {
            Some((_, bfx)) => fx < *bfx,
            None => fx.is_finite(),
        };
        if better {
            best = Some((x, fx));
        }
    }
    let (best_params, _) = best.ok_or(Error::AllRestartsDiverged)?;

    let objective = Objective {
        set: &set,
        rep: &spec.rep,
        order: spec.order,
        space: &spec.space,
        violation: None,
    };
    let best_state = objective.state_for(&best_params)?;
    // recompute the reported gap from the state so it is reproducible
    let report = uncertainty::characteristic_ur(&set, &best_state, spec.tol)?;
    let best_gap = report
        .order(spec.order)
        .map(|o| o.gap)
        .ok_or_else(|| Error::InvalidParameter("order missing from report".into()))?;

    let certification = if best_gap < spec.tol * f64::max(1.0, best_gap.abs()) {
        Some(uncertainty::proposition1_check(
            &set,
            &best_state,
            spec.order,
            uncertainty::SATURATION_TOL_SEARCH,
        )?)
    } else {
        None
    };

    Ok(SearchResult {
        best_params,
        best_gap,
        best_state,
        eval_count,
        converged: any_converged,
        trace,
        certification,
    })
}

/// One grid point of a parameter sweep. Errors are carried in-row so a bad
/// point never aborts the rest of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub value: f64,
    pub dim: usize,
    pub tail_mass: f64,
    pub means: Vec<f64>,
    pub orders: Vec<OrderReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSpec {
    pub rep: RepSpec,
    pub family: StateFamily,
    pub param: String,
    pub values: Vec<f64>,
    pub orders: Vec<usize>,
    pub tol: f64,
}

/// Evaluates the characteristic relations across a parameter grid; rows are
/// independent, evaluate in parallel, and come back in grid order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.rep.validate()?;
    let set = spec.rep.observables()?;
    let n = set.len();
    for &r in &spec.orders {
        if r == 0 || r > n {
            return Err(Error::InvalidParameter(format!(
                "sweep order {r} out of range 1..={n}"
            )));
        }
    }
    let rows = parallel::map_indexed(spec.values.len(), |i| {
        let value = spec.values[i];
        let mut fam = spec.family.clone();
        let outcome = fam
            .set_param(&spec.param, value)
            .and_then(|()| fam.build(&spec.rep))
            .and_then(|state| {
                let mp = moments::moment_pair(&set, &state)?;
                let report = uncertainty::characteristic_ur_from_moments(
                    &mp,
                    spec.tol,
                    Diagnostics {
                        dim: set.dim(),
                        tail_mass: state.tail_mass,
                    },
                )?;
                Ok((mp, report, state.tail_mass))
            });
        match outcome {
            Ok((mp, report, tail)) => SweepRow {
                value,
                dim: set.dim(),
                tail_mass: tail,
                means: mp.means.iter().cloned().collect(),
                orders: report
                    .per_order
                    .into_iter()
                    .filter(|o| spec.orders.contains(&o.r))
                    .collect(),
                error: None,
            },
            Err(err) => SweepRow {
                value,
                dim: set.dim(),
                tail_mass: f64::NAN,
                means: Vec::new(),
                orders: Vec::new(),
                error: Some(err.to_string()),
            },
        }
    });
    Ok(rows)
}

/// Helper shared by the CLI and tests: inclusive numeric grid start:stop:step.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidParameter(format!(
            "bad grid {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step).round() as usize + 1;
    Ok((0..count)
        .map(|i| start + step * i as f64)
        .filter(|v| *v <= stop + 1e-12 * step)
        .collect())
}

/// Reproducibility contract: the reported best gap re-derives from the
/// reported best state within this tolerance.
pub fn verify_result_reproducible(spec: &SearchSpec, result: &SearchResult) -> Result<bool> {
    let set = spec.rep.observables()?;
    let report = uncertainty::characteristic_ur(&set, &result.best_state, spec.tol)?;
    let gap = report
        .order(spec.order)
        .map(|o| o.gap)
        .ok_or_else(|| Error::InvalidParameter("order missing".into()))?;
    Ok((gap - result.best_gap).abs() <= 1e-10 * f64::max(1.0, gap.abs()))
}
