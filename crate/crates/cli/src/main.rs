//! `potnet`: generate, solve and inspect network design instances.
//!
//! Exit codes: 0 success (optimal or feasible), 1 infeasible, 2 limit
//! reached, 3 input error, 4 numerical failure.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use output::{num, Format, Records};
use potnet::flow::{check_feasibility, effective_resistance, induced_network, FlowError};
use potnet::format::{parse_build_vector, parse_instance, serialize_build_vector, serialize_instance, FormatError};
use potnet::generate::{generate, GenerateError, GeneratorSpec, MultipathSpec, PiBarRule, RandomSpec, THRESHOLD_SLACK};
use potnet::inequality::ValidInequality;
use potnet::model::Instance;
use potnet::separation::{separate, KStrategy, SeparationError, SeparationOptions, EPS_CUT};
use potnet::solver::{solve_branch_and_cut, solve_bruteforce, SolveError, SolveOutcome, SolveStatus, SolverConfig};

#[derive(Parser)]
#[command(name = "potnet", version, about = "Cost-minimal design of potential-based flow networks")]
struct Cli {
    /// Output format for results.
    #[arg(long, value_enum, global = true, default_value = "table")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance document.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        /// Output file; standard output when omitted.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Find a cheapest feasible design.
    Solve(SolveArgs),
    /// Check whether a build vector admits a feasible flow.
    Check { instance: PathBuf, x: PathBuf },
    /// Run one separation call at a build vector.
    Separate {
        instance: PathBuf,
        x: PathBuf,
        #[command(flatten)]
        k: KArgs,
    },
    /// Effective resistance between two named nodes.
    Reduce {
        instance: PathBuf,
        from: String,
        to: String,
        /// Restrict to the network induced by this build vector.
        #[arg(long)]
        x: Option<PathBuf>,
    },
    /// Summary of one or more instances.
    Stats {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Chain of segments, each offering parallel pipe options.
    Multipath {
        #[arg(long, default_value_t = 8)]
        segments: usize,
        #[arg(long, default_value_t = 3)]
        options: usize,
        #[arg(long, default_value_t = 1.0)]
        demand: f64,
        #[arg(long, default_value_t = 2.0)]
        degree: f64,
        /// Fixed potential bound; default is the threshold at which only the
        /// widest option mix is feasible.
        #[arg(long, conflicts_with = "spread_factor")]
        pi_bar: Option<f64>,
        /// Potential bound as a multiple of the spread with every option built.
        #[arg(long)]
        spread_factor: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        segment_length: f64,
        #[arg(long, default_value_t = 0.1)]
        cost_jitter: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Random connected network with random terminals.
    Random {
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 9)]
        arcs: usize,
        #[arg(long, default_value_t = 1)]
        entries: usize,
        #[arg(long, default_value_t = 2)]
        exits: usize,
        #[arg(long, default_value_t = 2.0)]
        degree: f64,
        /// Potential bound as a multiple of the spread with every arc built.
        #[arg(long, default_value_t = 1.5)]
        pi_bar_factor: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct KArgs {
    /// Try every number of cuts up to this value.
    #[arg(long, conflicts_with = "k")]
    k_max: Option<usize>,
    /// Try only this number of cuts.
    #[arg(long)]
    k: Option<usize>,
}

impl KArgs {
    fn strategy(&self) -> KStrategy {
        match (self.k, self.k_max) {
            (Some(k), _) => KStrategy::Fixed(k),
            (None, cap) => KStrategy::All(cap),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    k: KArgs,
    /// Use only no-good cuts.
    #[arg(long)]
    no_cuts: bool,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Maximum number of branch-and-bound nodes to process.
    #[arg(long)]
    node_limit: Option<usize>,
    /// Enumerate all designs instead of branch-and-cut.
    #[arg(long)]
    brute_force: bool,
    /// Separate fractional points only at the root node.
    #[arg(long)]
    root_only: bool,
    /// Run separation for different numbers of cuts in parallel.
    #[arg(long)]
    parallel: bool,
    /// Print the node log to standard error.
    #[arg(long)]
    log: bool,
    /// Write the best design as a build-vector file.
    #[arg(long)]
    x_out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

/// Numerical failures are those raised inside the solvers; everything else
/// is blamed on the input.
fn exit_code(error: &anyhow::Error) -> u8 {
    for cause in error.chain() {
        if let Some(e) = cause.downcast_ref::<FlowError>() {
            return flow_code(e);
        }
        if let Some(e) = cause.downcast_ref::<SolveError>() {
            return match e {
                SolveError::Invalid(_) | SolveError::TooLarge(_) | SolveError::Config(_) => EXIT_INPUT,
                SolveError::Flow(f) => flow_code(f),
                SolveError::Separation(s) => separation_code(s),
                _ => EXIT_NUMERICAL,
            };
        }
        if let Some(e) = cause.downcast_ref::<SeparationError>() {
            return separation_code(e);
        }
        if let Some(e) = cause.downcast_ref::<GenerateError>() {
            return match e {
                GenerateError::Flow(f) => flow_code(f),
                _ => EXIT_INPUT,
            };
        }
        if cause.downcast_ref::<FormatError>().is_some() {
            return EXIT_INPUT;
        }
    }
    EXIT_INPUT
}

fn flow_code(e: &FlowError) -> u8 {
    match e {
        FlowError::NoConvergence { .. } => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn separation_code(e: &SeparationError) -> u8 {
    match e {
        SeparationError::Dimension { .. }
        | SeparationError::OutOfRange { .. }
        | SeparationError::TooManyTerminals { .. }
        | SeparationError::ZeroCuts => EXIT_INPUT,
        _ => EXIT_NUMERICAL,
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

fn main() -> ExitCode {
    // clap's own exit code for usage errors is 2, which means "limit" here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    match &cli.command {
        Command::Generate { kind, output } => cmd_generate(kind, output.as_deref(), out),
        Command::Solve(args) => cmd_solve(args, cli.format, out),
        Command::Check { instance, x } => cmd_check(instance, x, cli.format, out),
        Command::Separate { instance, x, k } => cmd_separate(instance, x, k, cli.format, out),
        Command::Reduce { instance, from, to, x } => cmd_reduce(instance, from, to, x.as_deref(), cli.format, out),
        Command::Stats { instances } => cmd_stats(instances, cli.format, out),
    }
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("{}", path.display()))
}

fn load_x(path: &Path, inst: &Instance) -> anyhow::Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_build_vector(&text, &inst.labels).with_context(|| format!("{}", path.display()))
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_generate(kind: &GenerateKind, output: Option<&Path>, out: &mut dyn Write) -> Result<u8, Failure> {
    let spec = match *kind {
        GenerateKind::Multipath {
            segments,
            options,
            demand,
            degree,
            pi_bar,
            spread_factor,
            segment_length,
            cost_jitter,
            seed,
        } => GeneratorSpec::Multipath(MultipathSpec {
            segments,
            options,
            demand,
            degree,
            pi_bar: match (pi_bar, spread_factor) {
                (Some(p), _) => PiBarRule::Value(p),
                (None, Some(f)) => PiBarRule::FullNetworkSpread { factor: f },
                (None, None) => PiBarRule::UniformMixThreshold {
                    slack: THRESHOLD_SLACK,
                },
            },
            segment_length,
            cost_jitter,
            seed,
        }),
        GenerateKind::Random {
            nodes,
            arcs,
            entries,
            exits,
            degree,
            pi_bar_factor,
            seed,
        } => GeneratorSpec::Random(RandomSpec {
            nodes,
            arcs,
            entries,
            exits,
            degree,
            pi_bar_factor,
            seed,
            ..RandomSpec::default()
        }),
    };
    let text = serialize_instance(&generate(&spec)?);
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(0)
}

fn cmd_solve(args: &SolveArgs, format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let inst = load_instance(&args.instance)?;
    let strategy = args.k.strategy();
    let start = Instant::now();
    let outcome: SolveOutcome = if args.brute_force {
        solve_bruteforce(&inst)?
    } else {
        let time_limit = match args.time_limit {
            Some(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(anyhow::anyhow!("time limit must be a positive number of seconds").into())
            }
            t => t.map(Duration::from_secs_f64),
        };
        let cfg = SolverConfig {
            k: strategy,
            cuts: !args.no_cuts,
            eps_cut: EPS_CUT,
            node_limit: args.node_limit,
            time_limit,
            root_only_cuts: args.root_only,
            parallel: args.parallel,
            ..SolverConfig::default()
        };
        solve_branch_and_cut(&inst, &cfg)?
    };
    let elapsed = start.elapsed().as_secs_f64();
    if args.log {
        for line in &outcome.log {
            eprintln!("{line}");
        }
    }
    if let (Some(path), Some(x)) = (&args.x_out, &outcome.best_x) {
        fs::write(path, serialize_build_vector(x, &inst.labels))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let k_max = strategy.values(inst.num_nodes()).into_iter().max();
    let mut records = Records::new(&[
        "instance",
        "cuts_enabled",
        "k_max",
        "pi_bar",
        "time_s",
        "nodes",
        "gap_pct",
        "status",
        "cost",
        "branch_nodes",
        "cuts",
        "nogoods",
        "method",
    ]);
    let cuts_enabled = !args.brute_force && !args.no_cuts;
    records.push(vec![
        json!(instance_name(&args.instance)),
        json!(cuts_enabled),
        if cuts_enabled { json!(k_max) } else { Value::Null },
        num(inst.pi_bar),
        num(elapsed),
        json!(outcome.stats.nodes_explored),
        outcome.gap_pct().map_or(Value::Null, num),
        json!(outcome.status.to_string()),
        outcome.best_cost.map_or(Value::Null, num),
        json!(outcome.stats.branch_nodes),
        json!(outcome.stats.cuts_added),
        json!(outcome.stats.nogoods_added),
        json!(if args.brute_force { "brute-force" } else { "branch-and-cut" }),
    ]);
    records.write(format, out)?;
    Ok(match outcome.status {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::LimitReached => EXIT_LIMIT,
    })
}

fn cmd_check(instance: &Path, x_path: &Path, format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let x = load_x(x_path, &inst)?;
    let report = check_feasibility(&inst, &x)?;
    let verdict = if report.feasible {
        "feasible, spread ≤ π̄".to_string()
    } else {
        match &report.reason {
            Some(reason) => format!("infeasible: {reason}"),
            None => "infeasible".to_string(),
        }
    };
    let mut records = Records::new(&["instance", "verdict", "max_spread", "pi_bar", "components", "cost"]);
    records.push(vec![
        json!(instance_name(instance)),
        json!(verdict),
        num(report.max_spread()),
        num(inst.pi_bar),
        json!(report.components.len()),
        num(inst.cost_of(&x)),
    ]);
    records.write(format, out)?;
    Ok(if report.feasible { 0 } else { EXIT_INFEASIBLE })
}

fn subset_text(inst: &Instance, subset: &[usize]) -> String {
    let names: Vec<&str> = subset.iter().map(|&v| inst.labels.nodes[v].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// `c·x[id] + … ≥ rhs` with arc names.
fn inequality_text(inst: &Instance, ineq: &ValidInequality) -> String {
    let terms: Vec<String> = ineq
        .support()
        .into_iter()
        .map(|a| format!("{}*x[{}]", ineq.coefficients[a], inst.labels.arcs[a]))
        .collect();
    let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    format!("{lhs} >= {}", ineq.rhs)
}

fn cmd_separate(instance: &Path, x_path: &Path, k: &KArgs, format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let x = load_x(x_path, &inst)?;
    let opts = SeparationOptions {
        k: k.strategy(),
        ..SeparationOptions::default()
    };
    let result = separate(&inst, &x, &opts)?;
    let best_key = result.violated.as_ref().map(|v| v.key());
    let mut records = Records::new(&["k", "min_g", "violated", "best", "subset", "violation", "inequality"]);
    for &(k, g) in &result.certificate {
        let cand = result.candidates.iter().find(|c| c.k == k);
        records.push(vec![
            json!(k),
            num(g),
            json!(cand.is_some()),
            json!(cand.is_some_and(|c| Some(c.key()) == best_key)),
            cand.map_or(Value::Null, |c| json!(subset_text(&inst, &c.subset))),
            cand.map_or(Value::Null, |c| num(c.evaluate_violation(&x))),
            cand.map_or(Value::Null, |c| json!(inequality_text(&inst, c))),
        ]);
    }
    records.write(format, out)?;
    Ok(0)
}

fn cmd_reduce(
    instance: &Path,
    from: &str,
    to: &str,
    x_path: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let node = |name: &str| {
        inst.labels
            .node_index(name)
            .with_context(|| format!("unknown node \"{name}\""))
    };
    let (s, t) = (node(from)?, node(to)?);
    if s == t {
        return Err(anyhow::anyhow!("the two nodes must differ").into());
    }
    let resistance = match x_path {
        Some(p) => {
            let x = load_x(p, &inst)?;
            effective_resistance(&induced_network(&inst.network, &x)?.network, s, t)?
        }
        None => effective_resistance(&inst.network, s, t)?,
    };
    let conductance = resistance.powf(-1.0 / inst.degree());
    let show = |v: f64| if v.is_finite() { num(v) } else { json!("inf") };
    let mut records = Records::new(&["from", "to", "degree", "resistance", "conductance"]);
    records.push(vec![
        json!(from),
        json!(to),
        num(inst.degree()),
        show(resistance),
        num(conductance),
    ]);
    records.write(format, out)?;
    Ok(0)
}

fn cmd_stats(instances: &[PathBuf], format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let mut records = Records::new(&[
        "instance",
        "nodes",
        "arcs",
        "entries",
        "exits",
        "degree",
        "pi_bar",
        "demand",
        "total_cost",
        "spread_all_built",
    ]);
    for path in instances {
        let inst = load_instance(path)?;
        let demand: f64 = inst.balance.iter().filter(|&&b| b > 0.0).sum();
        let all = vec![1.0; inst.num_arcs()];
        let report = check_feasibility(&inst, &all)?;
        records.push(vec![
            json!(instance_name(path)),
            json!(inst.num_nodes()),
            json!(inst.num_arcs()),
            json!(inst.entries().len()),
            json!(inst.exits().len()),
            num(inst.degree()),
            num(inst.pi_bar),
            num(demand),
            num(inst.cost_of(&all)),
            num(report.max_spread()),
        ]);
    }
    records.write(format, out)?;
    Ok(0)
}
