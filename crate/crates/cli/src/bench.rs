use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use srti_core::generator::{attach_random_criteria, generate_srti, CriteriaOptions};
use srti_core::{completeness_degree, personalize_instance, solve, Mode, ObjectiveConfig, Outcome, SolveConfig};

use crate::ModeArg;

#[derive(Args)]
pub struct BenchArgs {
    /// Agent counts
    #[arg(long, value_delimiter = ',', default_value = "20,40,60")]
    agents: Vec<usize>,
    /// Initial completeness degrees in percent
    #[arg(long, value_delimiter = ',', default_value = "25,50")]
    degrees: Vec<u32>,
    /// Criterion counts; 0 solves the plain instance
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    criteria: Vec<usize>,
    /// Instances per cell
    #[arg(long, default_value_t = 20)]
    count: u64,
    /// First seed; cell instances use `seed..seed+count`
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "decision")]
    mode: ModeArg,
    /// Per-instance limit in seconds
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Solves per instance; the fastest is reported
    #[arg(long, default_value_t = 1)]
    repeat: u32,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV destination, stdout when absent
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    seed: u64,
    n: usize,
    degree: u32,
    m: usize,
    mode: &'static str,
    outcome: &'static str,
    time_s: f64,
    vector: String,
    completeness: f64,
}

fn run_one(args: &BenchArgs, n: usize, degree: u32, m: usize, seed: u64) -> anyhow::Result<Row> {
    let base = generate_srti(n, f64::from(degree) / 100.0, seed)?;
    let inst = if m == 0 {
        base
    } else {
        personalize_instance(&attach_random_criteria(&base, &CriteriaOptions::new(m), seed)?)?
    };
    let (mode, label) = match args.mode {
        ModeArg::Decision => (Mode::Decision, "decision"),
        ModeArg::Optimize => (Mode::Optimize, "optimize"),
    };
    let cfg = SolveConfig {
        mode,
        objective: Some(inst.criteria().map(ObjectiveConfig::from_priority).unwrap_or_default()),
        time_limit: Some(Duration::from_secs_f64(args.time_limit)),
        seed,
        deterministic: true,
    };
    let mut best = f64::INFINITY;
    let mut result = None;
    for _ in 0..args.repeat.max(1) {
        let t = Instant::now();
        let r = solve(&inst, &cfg)?;
        best = best.min(t.elapsed().as_secs_f64());
        result = Some(r);
    }
    let r = result.expect("at least one solve");
    let outcome = match &r.outcome {
        Outcome::Solution { .. } => "solution",
        Outcome::Unsat => "unsat",
        Outcome::Timeout { best: Some(_) } => "timeout",
        Outcome::Timeout { best: None } => "timeout-empty",
    };
    Ok(Row {
        seed,
        n,
        degree,
        m,
        mode: label,
        outcome,
        time_s: best,
        vector: r.matching().map(|(_, v)| v.to_string()).unwrap_or_else(|| "[]".into()),
        completeness: if n >= 2 { completeness_degree(&inst)? } else { 0.0 },
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn summarize(rows: &[Row]) {
    let by = |label: &str, keys: Vec<u64>, key: &dyn Fn(&Row) -> u64| {
        for k in keys {
            let times: Vec<f64> = rows.iter().filter(|r| key(r) == k).map(|r| r.time_s).collect();
            eprintln!("median time_s {label}={k}: {:.6} ({} runs)", median(times.clone()), times.len());
        }
    };
    let distinct = |f: &dyn Fn(&Row) -> u64| {
        let mut v: Vec<u64> = rows.iter().map(f).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    by("n", distinct(&|r| r.n as u64), &|r| r.n as u64);
    by("degree", distinct(&|r| u64::from(r.degree)), &|r| u64::from(r.degree));
    by("m", distinct(&|r| r.m as u64), &|r| r.m as u64);
}

pub fn run(args: BenchArgs) -> anyhow::Result<u8> {
    if args.degrees.iter().any(|&d| d > 100) {
        return Err(anyhow!("degrees are percentages in 0..=100"));
    }
    let mut jobs = Vec::new();
    for &n in &args.agents {
        for &d in &args.degrees {
            for &m in &args.criteria {
                for k in 0..args.count {
                    jobs.push((n, d, m, args.seed + k));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs.max(1)).build()?;
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, d, m, s)| run_one(&args, n, d, m, s))
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    let text = String::from_utf8(buf).context("csv output")?;
    crate::write_out(args.output.as_deref(), &text)?;
    summarize(&rows);
    Ok(0)
}
