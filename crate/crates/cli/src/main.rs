//! Command-line front end: evaluate uncertainty-relation reports, sweep
//! state families over parameter grids, search for minimum-uncertainty
//! states, and run the validation suites.
//!
//! Exit codes: 0 success; 1 a relation was violated or a validation
//! property failed (a bug, not physics); 2 configuration error;
//! 3 truncation did not converge.

use charur_cli::{args, artifact, csvout};

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;

use charur::algebra::RepKind;
use charur::search::{
    grid, minimize_gap, sweep, OptimizerConfig, ParamRange, SearchSpace, SearchSpec, SweepSpec,
};
use charur::truncation::{evaluate_auto, evaluate_fixed, AutoPolicy, ConvergedEvaluation};
use charur::uncertainty::{trace_ur, SATURATION_TOL};
use charur::validate::run_suite;
use charur::Error as CoreError;

use args::{load_config, parse_orders, parse_range, resolve_out, DimArg, SystemArgs};
use artifact::{
    to_json, ReportArtifact, SearchArtifact, SweepArtifact, ValidateArtifact, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "charur",
    about = "Characteristic uncertainty relations: reports, sweeps, searches, validation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the characteristic (and optionally trace) relations for one
    /// state and write a JSON report.
    Report(ReportArgs),
    /// Sweep a state-family parameter over a grid and write CSV (or JSON).
    Sweep(SweepArgs),
    /// Minimize a characteristic gap over a state space.
    Search(SearchArgs),
    /// Run the invariant suites and print one pass/fail line per property.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    system: SystemArgs,
    /// Characteristic orders to evaluate, e.g. 1,2,3 (default: all)
    #[arg(long)]
    orders: Option<String>,
    /// Trace-relation orders k, e.g. 1,2 (quadrature sets only)
    #[arg(long)]
    trace_orders: Option<String>,
    /// Relative saturation tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (JSON); stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file merged under the flags
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    system: SystemArgs,
    /// Swept parameter name (zeta | tau | z | alpha | r | w)
    #[arg(long)]
    param: Option<String>,
    /// Grid START:STOP:STEP
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Characteristic orders to record, e.g. 2,3
    #[arg(long)]
    orders: Option<String>,
    /// Relative saturation tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Output format: csv (default) or json
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file merged under the flags
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
struct SearchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    system: SystemArgs,
    /// Characteristic order whose gap is minimized
    #[arg(long)]
    order: Option<usize>,
    /// Search space: full (all pure states) or family
    #[arg(long)]
    space: Option<String>,
    /// Family parameter ranges, NAME=LO:HI (repeatable; family space only)
    #[arg(long = "param", allow_hyphen_values = true)]
    params: Option<Vec<String>>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of optimizer restarts
    #[arg(long)]
    restarts: Option<usize>,
    /// Evaluation budget per restart
    #[arg(long)]
    max_evals: Option<usize>,
    /// Initial simplex step
    #[arg(long)]
    simplex_scale: Option<f64>,
    /// Gap tolerance for certifying a minimizer
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (JSON); stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file merged under the flags
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
struct ValidateArgs {
    /// Suite: matrix | algebra | states | moments | uncertainty | all
    #[arg(long)]
    suite: Option<String>,
    /// Trial count for the randomized properties
    #[arg(long)]
    trials: Option<usize>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Optional JSON artifact with the per-property results
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file merged under the flags
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Report(args) => cmd_report(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Search(args) => cmd_search(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Exit-code contract: 1 = relation violated (bug surfacing), 3 = truncation
/// did not converge, 2 = everything else (configuration, IO).
fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        match core {
            CoreError::RelationViolated { .. } | CoreError::MomentMatrixNotPsd { .. } => 1,
            CoreError::TruncationTooSmall { .. }
            | CoreError::TailMassTooLarge { .. }
            | CoreError::SeriesDiverged { .. }
            | CoreError::NoAcceptableEigenvector { .. } => 3,
            _ => 2,
        }
    } else {
        2
    }
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let path = resolve_out(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evaluate_system(system: &SystemArgs, tol: f64) -> Result<ConvergedEvaluation> {
    let family = system.state_family()?;
    match system.dim_arg()? {
        DimArg::Fixed(dim) => {
            let rep = system.rep_spec(dim)?;
            Ok(evaluate_fixed(&rep, &family, tol)?)
        }
        DimArg::Auto => {
            let policy = AutoPolicy::default();
            let rep = system.rep_spec(policy.start)?;
            Ok(evaluate_auto(&rep, &family, tol, &policy)?)
        }
    }
}

fn cmd_report(mut cli_args: ReportArgs) -> Result<ExitCode> {
    if let Some(path) = &cli_args.config {
        let file: ReportArgs = load_config(path)?;
        cli_args.system.merge_under(file.system);
        cli_args.orders = cli_args.orders.or(file.orders);
        cli_args.trace_orders = cli_args.trace_orders.or(file.trace_orders);
        cli_args.tol = cli_args.tol.or(file.tol);
        cli_args.out = cli_args.out.or(file.out);
    }
    let tol = cli_args.tol.unwrap_or(SATURATION_TOL);
    let family = cli_args.system.state_family()?;

    let done = evaluate_system(&cli_args.system, tol)?;
    let mut ur_report = done.report.clone();
    if let Some(orders) = &cli_args.orders {
        let keep = parse_orders(orders)?;
        let n = ur_report.per_order.len();
        if keep.iter().any(|r| *r == 0 || *r > n) {
            bail!("orders {orders} out of range 1..={n}");
        }
        ur_report.per_order.retain(|o| keep.contains(&o.r));
    }

    let trace_ur_report = match &cli_args.trace_orders {
        Some(spec_str) => {
            let ks = parse_orders(spec_str)?;
            if done.rep.kind != RepKind::Fock {
                bail!("--trace-orders applies to quadrature (fock) sets");
            }
            let set = done.rep.observables()?;
            Some(trace_ur(&set, &done.state, &ks, tol)?)
        }
        None => None,
    };

    let relation_failed = trace_ur_report
        .as_ref()
        .map(|t| t.per_k.iter().any(|k| !k.holds))
        .unwrap_or(false);

    let artifact = ReportArtifact {
        schema_version: SCHEMA_VERSION,
        command: "report".into(),
        rep: done.rep.clone(),
        state: family,
        tol,
        truncation: done.steps.clone(),
        moment_pair: done.moment_pair.clone(),
        ur_report,
        trace_ur_report,
    };
    write_or_print(cli_args.out.as_ref(), &to_json(&artifact)?)?;

    for o in &artifact.ur_report.per_order {
        eprintln!(
            "r={}: lhs {:.6e} rhs {:.6e} gap {:.3e} saturated {}",
            o.r, o.lhs, o.rhs, o.gap, o.saturated
        );
    }
    if relation_failed {
        bail!(CoreError::RelationViolated {
            r: 0,
            gap: f64::NAN,
            tol
        });
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(mut cli_args: SweepArgs) -> Result<ExitCode> {
    if let Some(path) = &cli_args.config {
        let file: SweepArgs = load_config(path)?;
        cli_args.system.merge_under(file.system);
        cli_args.param = cli_args.param.or(file.param);
        cli_args.range = cli_args.range.or(file.range);
        cli_args.orders = cli_args.orders.or(file.orders);
        cli_args.tol = cli_args.tol.or(file.tol);
        cli_args.format = cli_args.format.or(file.format);
        cli_args.out = cli_args.out.or(file.out);
    }
    let tol = cli_args.tol.unwrap_or(SATURATION_TOL);
    let param = cli_args
        .param
        .clone()
        .ok_or_else(|| anyhow!("--param is required"))?;
    let (start, stop, step) = parse_range(
        cli_args
            .range
            .as_deref()
            .ok_or_else(|| anyhow!("--range is required"))?,
    )?;
    let rep = cli_args.system.rep_spec(256)?;
    let family = cli_args.system.state_family()?;
    let orders = match &cli_args.orders {
        Some(s) => parse_orders(s)?,
        None => (1..=rep.observables()?.len()).collect(),
    };

    let spec = SweepSpec {
        rep: rep.clone(),
        family: family.clone(),
        param: param.clone(),
        values: grid(start, stop, step)?,
        orders: orders.clone(),
        tol,
    };
    let rows = sweep(&spec)?;
    let labels = rep.observables()?.labels;

    match cli_args.format.as_deref().unwrap_or("csv") {
        "csv" => {
            let text = csvout::sweep_csv(&param, &labels, &orders, &rows)?;
            write_or_print(cli_args.out.as_ref(), &text)?;
        }
        "json" => {
            let artifact = SweepArtifact {
                schema_version: SCHEMA_VERSION,
                command: "sweep".into(),
                rep,
                state: family,
                param,
                orders,
                labels,
                rows,
            };
            write_or_print(cli_args.out.as_ref(), &to_json(&artifact)?)?;
        }
        other => bail!("unknown format {other:?} (csv|json)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(mut cli_args: SearchArgs) -> Result<ExitCode> {
    if let Some(path) = &cli_args.config {
        let file: SearchArgs = load_config(path)?;
        cli_args.system.merge_under(file.system);
        cli_args.order = cli_args.order.or(file.order);
        cli_args.space = cli_args.space.or(file.space);
        cli_args.params = cli_args.params.or(file.params);
        cli_args.seed = cli_args.seed.or(file.seed);
        cli_args.restarts = cli_args.restarts.or(file.restarts);
        cli_args.max_evals = cli_args.max_evals.or(file.max_evals);
        cli_args.simplex_scale = cli_args.simplex_scale.or(file.simplex_scale);
        cli_args.tol = cli_args.tol.or(file.tol);
        cli_args.out = cli_args.out.or(file.out);
    }
    let rep = cli_args.system.rep_spec(64)?;
    let order = cli_args
        .order
        .ok_or_else(|| anyhow!("--order is required"))?;
    let space = match cli_args.space.as_deref().unwrap_or("full") {
        "full" => SearchSpace::FullPureState,
        "family" => {
            let family = cli_args.system.state_family()?;
            let raw = cli_args
                .params
                .clone()
                .ok_or_else(|| anyhow!("family space needs --param NAME=LO:HI"))?;
            let mut params = Vec::new();
            for entry in raw {
                let (name, range) = entry
                    .split_once('=')
                    .ok_or_else(|| anyhow!("expected NAME=LO:HI, got {entry:?}"))?;
                let parts: Vec<&str> = range.split(':').collect();
                if parts.len() != 2 {
                    bail!("expected NAME=LO:HI, got {entry:?}");
                }
                params.push(ParamRange {
                    name: name.to_string(),
                    lo: parts[0].parse()?,
                    hi: parts[1].parse()?,
                });
            }
            SearchSpace::Family { family, params }
        }
        other => bail!("unknown search space {other:?} (full|family)"),
    };

    let defaults = OptimizerConfig::default();
    let spec = SearchSpec {
        rep,
        order,
        space,
        optimizer: OptimizerConfig {
            max_evals: cli_args.max_evals.unwrap_or(defaults.max_evals),
            restarts: cli_args.restarts.unwrap_or(defaults.restarts),
            simplex_scale: cli_args.simplex_scale.unwrap_or(defaults.simplex_scale),
            seed: cli_args.seed.unwrap_or(defaults.seed),
            ftol: defaults.ftol,
        },
        tol: cli_args.tol.unwrap_or(1e-6),
    };
    let result = minimize_gap(&spec)?;
    eprintln!(
        "best gap {:.6e} after {} evaluations (converged: {})",
        result.best_gap, result.eval_count, result.converged
    );
    let artifact = SearchArtifact {
        schema_version: SCHEMA_VERSION,
        command: "search".into(),
        spec,
        result,
    };
    write_or_print(cli_args.out.as_ref(), &to_json(&artifact)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(mut cli_args: ValidateArgs) -> Result<ExitCode> {
    if let Some(path) = &cli_args.config {
        let file: ValidateArgs = load_config(path)?;
        cli_args.suite = cli_args.suite.or(file.suite);
        cli_args.trials = cli_args.trials.or(file.trials);
        cli_args.seed = cli_args.seed.or(file.seed);
        cli_args.out = cli_args.out.or(file.out);
    }
    let suite = cli_args.suite.unwrap_or_else(|| "all".into());
    let trials = cli_args.trials.unwrap_or(10_000);
    let seed = cli_args.seed.unwrap_or(0);
    let properties = run_suite(&suite, trials, seed)?;
    let mut failed = 0usize;
    for p in &properties {
        println!(
            "{} {}/{} — {}",
            if p.passed { "PASS" } else { "FAIL" },
            p.suite,
            p.name,
            p.detail
        );
        if !p.passed {
            failed += 1;
        }
    }
    println!("{} properties, {} failed", properties.len(), failed);
    if let Some(out) = &cli_args.out {
        let artifact = ValidateArtifact {
            schema_version: SCHEMA_VERSION,
            command: "validate".into(),
            suite,
            trials,
            seed,
            properties,
        };
        write_or_print(Some(out), &to_json(&artifact)?)?;
    }
    if failed > 0 {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
