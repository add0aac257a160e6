mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use srti_core::encoding::emit_program;
use srti_core::generator::{attach_random_criteria, generate_srti_with_ties, CriteriaOptions};
use srti_core::objectives::forbidden_violations;
use srti_core::{
    blocking_pairs, extended_pref_list, objective_vector, parse_instance, personalize_instance, serialize_instance,
    solve_with_progress, Instance, Matching, MatchingDoc, Mode, ObjectiveConfig, Outcome, SolveConfig,
};

const EXIT_UNSAT: u8 = 10;
const EXIT_TIMEOUT: u8 = 11;
const EXIT_TIMEOUT_EMPTY: u8 = 12;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "srti", version, about = "Stable roommates with ties, incomplete lists and personal criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a stable matching, or a lexicographically optimal one
    Solve(SolveArgs),
    /// Verify a matching document against an instance
    Check(CheckArgs),
    /// Print the extended preference lists of a criteria instance
    Derive(DeriveArgs),
    /// Generate random instances
    Generate(GenerateArgs),
    /// Time solves over random ensembles and write CSV
    Bench(bench::BenchArgs),
    /// Write the logic-program encoding of an instance
    EmitAsp(EmitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Decision,
    Optimize,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Replace every list by its extended, criteria-based list first
    #[arg(long)]
    personalize: bool,
    /// Explicit lists before derived ones when personalizing
    #[arg(long, overrides_with = "criteria_first")]
    explicit_first: bool,
    /// Derived lists before explicit ones when personalizing
    #[arg(long, overrides_with = "explicit_first")]
    criteria_first: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "decision")]
    mode: ModeArg,
    /// Comma separated levels, e.g. `smoking,cleanliness` or `dormitory`
    #[arg(long)]
    objective: Option<ObjectiveConfig>,
    /// Seconds
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Single reproducible search with canonical tie-breaking
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Matching document to verify
    #[arg(long, short)]
    matching: PathBuf,
    #[arg(long)]
    objective: Option<ObjectiveConfig>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeriveFormat {
    Text,
    Json,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, overrides_with = "criteria_first")]
    explicit_first: bool,
    #[arg(long, overrides_with = "explicit_first")]
    criteria_first: bool,
    /// `json` writes the personalized instance document
    #[arg(long, value_enum, default_value = "text")]
    format: DeriveFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    criteria: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances for seeds `seed..seed+count`
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Probability of tying an agent with the previous one in a list
    #[arg(long, default_value_t = 0.0)]
    ties: f64,
    /// Number of department labels to assign
    #[arg(long)]
    departments: Option<usize>,
    /// File for a single instance, directory for several
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    objective: Option<ObjectiveConfig>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn input_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

type Run = Result<u8, Failure>;

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input_err)?;
    parse_instance(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(input_err)
}

fn with_order_flag(inst: Instance, explicit: bool, criteria: bool) -> Result<Instance, Failure> {
    if !explicit && !criteria {
        return Ok(inst);
    }
    let mut parts = inst.to_parts();
    parts.explicit_first = explicit;
    Instance::new(parts).map_err(input_err)
}

fn load(args: &InputArgs) -> Result<Instance, Failure> {
    let inst = with_order_flag(read_instance(&args.input)?, args.explicit_first, args.criteria_first)?;
    if args.personalize {
        personalize_instance(&inst).map_err(input_err)
    } else {
        Ok(inst)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn solve_cmd(args: SolveArgs) -> Run {
    let inst = load(&args.input)?;
    let time_limit = match args.time_limit {
        Some(t) if !(t >= 0.0 && t.is_finite()) => return Err(input_err(anyhow!("invalid time limit {t}"))),
        t => t.map(Duration::from_secs_f64),
    };
    let cfg = SolveConfig {
        mode: match args.mode {
            ModeArg::Decision => Mode::Decision,
            ModeArg::Optimize => Mode::Optimize,
        },
        objective: args.objective,
        time_limit,
        seed: args.seed,
        deterministic: args.deterministic,
    };
    let mut on_event = |e: &srti_core::ProgressEvent| eprintln!("{e}");
    let result = solve_with_progress(&inst, &cfg, &mut on_event).map_err(input_err)?;
    let doc = |m: &Matching, v: &srti_core::ObjectiveVector| MatchingDoc::new(&inst, m, v.0.clone(), true);
    match &result.outcome {
        Outcome::Solution { matching, objective, .. } => {
            write_out(args.output.as_deref(), &to_json(&doc(matching, objective)))?;
            Ok(0)
        }
        Outcome::Unsat => {
            eprintln!("no stable matching exists");
            Ok(EXIT_UNSAT)
        }
        Outcome::Timeout { best: Some((m, v)) } => {
            write_out(args.output.as_deref(), &to_json(&doc(m, v)))?;
            eprintln!("time limit reached; best matching found so far written");
            Ok(EXIT_TIMEOUT)
        }
        Outcome::Timeout { best: None } => {
            eprintln!("time limit reached before any matching was found");
            Ok(EXIT_TIMEOUT_EMPTY)
        }
    }
}

#[derive(serde::Serialize)]
struct CheckReport {
    stable: bool,
    blocking_pairs: Vec<(String, String)>,
    forbidden_violations: Vec<(String, String)>,
    objective: Vec<u64>,
}

fn check_cmd(args: CheckArgs) -> Run {
    let inst = load(&args.input)?;
    let text = fs::read_to_string(&args.matching)
        .with_context(|| format!("reading {}", args.matching.display()))
        .map_err(input_err)?;
    let doc: MatchingDoc = serde_json::from_str(&text)
        .with_context(|| format!("in {}", args.matching.display()))
        .map_err(input_err)?;
    let m = Matching::from_id_pairs(&inst, &doc.pairs).map_err(input_err)?;
    let objective = args.objective.or_else(|| inst.objective().cloned()).unwrap_or_default();
    let vector = objective_vector(&inst, &m, &objective).map_err(input_err)?;
    let names = |(a, b): (usize, usize)| (inst.id(a).to_string(), inst.id(b).to_string());
    let blocking: Vec<_> = blocking_pairs(&inst, &m).into_iter().map(|p| names((p.x, p.y))).collect();
    let report = CheckReport {
        stable: blocking.is_empty(),
        blocking_pairs: blocking,
        forbidden_violations: forbidden_violations(&inst, &m).into_iter().map(names).collect(),
        objective: vector.0,
    };
    write_out(args.output.as_deref(), &to_json(&report))?;
    Ok(0)
}

fn format_order(inst: &Instance, tiers: &[Vec<usize>]) -> String {
    let parts: Vec<String> = tiers
        .iter()
        .map(|t| {
            let names: Vec<&str> = t.iter().map(|&y| inst.id(y).as_str()).collect();
            if names.len() == 1 {
                names[0].to_string()
            } else {
                format!("{{{}}}", names.join(", "))
            }
        })
        .collect();
    format!("<{}>", parts.join(", "))
}

fn derive_cmd(args: DeriveArgs) -> Run {
    let inst = with_order_flag(read_instance(&args.input)?, args.explicit_first, args.criteria_first)?;
    let text = match args.format {
        DeriveFormat::Json => {
            let mut s = serialize_instance(&personalize_instance(&inst).map_err(input_err)?);
            s.push('\n');
            s
        }
        DeriveFormat::Text => {
            let mut s = String::new();
            for x in 0..inst.len() {
                let order = extended_pref_list(&inst, x).map_err(input_err)?;
                s.push_str(&format!("{} {}\n", inst.id(x), format_order(&inst, order.tiers())));
            }
            s
        }
    };
    write_out(args.output.as_deref(), &text)?;
    Ok(0)
}

fn generate_one(args: &GenerateArgs, seed: u64) -> anyhow::Result<Instance> {
    let inst = generate_srti_with_ties(args.agents, args.edge_prob, args.ties, seed)?;
    let opts = CriteriaOptions {
        departments: args.departments,
        ..CriteriaOptions::new(args.criteria)
    };
    if args.criteria == 0 && args.departments.is_some() {
        return Err(anyhow!("--departments needs --criteria of at least 1"));
    }
    Ok(attach_random_criteria(&inst, &opts, seed)?)
}

fn generate_cmd(args: GenerateArgs) -> Run {
    if args.count == 0 {
        return Err(input_err(anyhow!("--count must be positive")));
    }
    let seeds: Vec<u64> = (0..args.count).map(|k| args.seed + k).collect();
    let instances = seeds
        .par_iter()
        .map(|&s| generate_one(&args, s))
        .collect::<anyhow::Result<Vec<_>>>()
        .map_err(input_err)?;
    if args.count == 1 {
        let mut text = serialize_instance(&instances[0]);
        text.push('\n');
        write_out(args.output.as_deref(), &text)?;
        return Ok(0);
    }
    let dir = args
        .output
        .as_deref()
        .ok_or_else(|| input_err(anyhow!("--output DIR is required with --count > 1")))?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (seed, inst) in seeds.iter().zip(&instances) {
        let path = dir.join(format!("n{}_p{}_m{}_s{seed}.json", args.agents, args.edge_prob, args.criteria));
        let mut text = serialize_instance(inst);
        text.push('\n');
        write_out(Some(&path), &text)?;
    }
    Ok(0)
}

fn emit_cmd(args: EmitArgs) -> Run {
    let inst = load(&args.input)?;
    let objective = args.objective.or_else(|| inst.objective().cloned()).unwrap_or_default();
    let text = emit_program(&inst, &objective).map_err(input_err)?;
    write_out(args.output.as_deref(), &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve_cmd(a),
        Command::Check(a) => check_cmd(a),
        Command::Derive(a) => derive_cmd(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Bench(a) => bench::run(a).map_err(Failure::from),
        Command::EmitAsp(a) => emit_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
