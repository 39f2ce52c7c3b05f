//! `rieszcap`: potentials, capacities, contents and inequality checks on
//! finite metric measure spaces.

mod batch;
mod setspec;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rieszcap_core::{
    cantor_dust, classical_content, grid, load_space, modified_content, run_suite, save_space,
    snowflake, solve_capacity, weighted_line, CheckOptions, CoverMode, CoverOptions,
    DiagonalMode, DoublingProfile, RieszKernel, RieszParams, SolveOptions, Suite, SuiteConfig,
};
use serde::Serialize;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

/// Error class that maps to exit code 2 (usage) instead of 1 (failure).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "rieszcap",
    version,
    about = "Riesz capacities and Hausdorff contents on finite metric measure spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reference space and write it as JSON
    Gen(GenArgs),
    /// Print the doubling profile of a space
    Profile(ProfileArgs),
    /// Evaluate the Riesz potential of a function
    Potential(PotentialArgs),
    /// Solve the capacity program for a set
    Capacity(CapacityArgs),
    /// Compute a Hausdorff-type content by ball cover
    Content(ContentArgs),
    /// Run inequality check suites
    Verify(VerifyArgs),
    /// Batch mode over a config file, producing a report directory
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// grid | cantor | wline | snowflake
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    side: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    spacing: f64,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Base space for the snowflake transform
    #[arg(long)]
    space: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    space: PathBuf,
    /// Write per-center witness rows as CSV (center,radius,ratio)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PotentialArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Comma-separated values of f
    #[arg(long)]
    f: Option<String>,
    /// Constant value of f on every point
    #[arg(long)]
    uniform: Option<f64>,
    /// riesz | tilde
    #[arg(long, default_value = "riesz")]
    kernel: String,
    /// zero | self
    #[arg(long, default_value = "zero")]
    diagonal: String,
    /// Dump the kernel table as CSV rows i,j,K
    #[arg(long)]
    dump_kernel: Option<PathBuf>,
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long)]
    space: PathBuf,
    /// Indices, ranges, or ball:center,radius
    #[arg(long)]
    set: String,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    /// zero | self
    #[arg(long, default_value = "zero")]
    diagonal: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ContentArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    set: String,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    p: f64,
    /// Radius cap; a float or 'inf'
    #[arg(long, default_value = "inf")]
    rcap: String,
    /// greedy | exact
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Compute the classical lambda-content instead (ball weight rho^lambda)
    #[arg(long)]
    classical_lambda: Option<f64>,
    /// Smallest admissible closed radius (classical content only)
    #[arg(long, default_value_t = 0.0)]
    min_rho: f64,
    /// Node cap for the exact search
    #[arg(long, default_value_t = 1 << 20)]
    node_cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    space: PathBuf,
    /// all | axioms | weaktype | duality | content
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0.3)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.2)]
    tilde_gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    tilde_p: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Write the reports as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker pool size (default: logical cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Potential(args) => cmd_potential(args),
        Command::Capacity(args) => cmd_capacity(args),
        Command::Content(args) => cmd_content(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Report(args) => batch::run_batch(&args.config, &args.out_dir, args.jobs),
    }
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| UsageError(format!("--{flag} is required for kind '{kind}'")).into())
}

fn cmd_gen(args: GenArgs) -> Result<bool> {
    let space = match args.kind.as_str() {
        "grid" => {
            let side = require(args.side, "side", "grid")?;
            grid(args.dim, side, args.spacing)?
        }
        "cantor" => {
            let depth = require(args.depth, "depth", "cantor")?;
            cantor_dust(depth)?
        }
        "wline" => {
            let n = require(args.n, "n", "wline")?;
            let alpha = require(args.alpha, "alpha", "wline")?;
            weighted_line(n, alpha)?
        }
        "snowflake" => {
            let base_path = require(args.space, "space", "snowflake")?;
            let epsilon = require(args.epsilon, "epsilon", "snowflake")?;
            let base = load_space(&base_path)?;
            snowflake(&base, epsilon)?
        }
        other => {
            return Err(UsageError(format!(
                "unknown kind '{other}' (expected grid|cantor|wline|snowflake)"
            ))
            .into())
        }
    };
    save_space(&space, &args.out)?;
    println!(
        "wrote {} ({} points, total mass {})",
        args.out.display(),
        space.len(),
        space.total_mass()
    );
    Ok(true)
}

fn cmd_profile(args: ProfileArgs) -> Result<bool> {
    let space = load_space(&args.space)?;
    let profile = DoublingProfile::compute(&space)?;
    if let Some(out) = &args.out {
        let mut csv = String::from("center,radius,ratio\n");
        for w in &profile.witnesses {
            csv.push_str(&format!("{},{},{}\n", w.center, w.radius, w.ratio));
        }
        fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
    }
    #[derive(Serialize)]
    struct ProfileOut<'a> {
        doubling_constant: f64,
        dimension_exponent: f64,
        lower_constant: f64,
        reverse_exponent: f64,
        reverse_constant: f64,
        points: usize,
        total_mass: f64,
        witnesses: &'a [rieszcap_core::DoublingWitness],
    }
    let out = ProfileOut {
        doubling_constant: profile.doubling_constant,
        dimension_exponent: profile.dimension_exponent,
        lower_constant: profile.lower_constant,
        reverse_exponent: profile.reverse_exponent,
        reverse_constant: profile.reverse_constant,
        points: space.len(),
        total_mass: space.total_mass(),
        witnesses: &profile.witnesses,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn parse_diagonal(text: &str) -> Result<DiagonalMode> {
    match text {
        "zero" => Ok(DiagonalMode::Zero),
        "self" => Ok(DiagonalMode::SelfMass),
        other => Err(UsageError(format!(
            "unknown diagonal mode '{other}' (expected zero|self)"
        ))
        .into()),
    }
}

fn cmd_potential(args: PotentialArgs) -> Result<bool> {
    let space = load_space(&args.space)?;
    let params = RieszParams::new(args.gamma, args.p)?;
    let diagonal = parse_diagonal(&args.diagonal)?;
    let kernel = match args.kernel.as_str() {
        "riesz" => RieszKernel::assemble(&space, params, diagonal),
        "tilde" => RieszKernel::assemble_tilde(&space, args.gamma, params)?,
        other => {
            return Err(UsageError(format!(
                "unknown kernel '{other}' (expected riesz|tilde)"
            ))
            .into())
        }
    };
    if let Some(path) = &args.dump_kernel {
        let mut csv = String::from("i,j,K\n");
        for i in 0..kernel.len() {
            for j in 0..kernel.len() {
                csv.push_str(&format!("{i},{j},{}\n", kernel.k(i, j)));
            }
        }
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    let f: Vec<f64> = match (&args.f, args.uniform) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(UsageError("provide exactly one of --f or --uniform".into()).into())
        }
        (Some(text), None) => text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| UsageError(format!("invalid value '{t}' in --f")).into())
            })
            .collect::<Result<Vec<f64>>>()?,
        (None, Some(c)) => vec![c; space.len()],
    };
    let pot = kernel.potential(&f)?;
    println!("{}", serde_json::to_string(&pot)?);
    Ok(true)
}

fn cmd_capacity(args: CapacityArgs) -> Result<bool> {
    let space = load_space(&args.space)?;
    let set = setspec::parse_set(&args.set, &space)?;
    let params = RieszParams::new(args.gamma, args.p)?;
    let diagonal = parse_diagonal(&args.diagonal)?;
    let kernel = RieszKernel::assemble(&space, params, diagonal);
    let result = solve_capacity(
        &kernel,
        &set,
        SolveOptions {
            tolerance: args.tol,
            max_iter: args.max_iter,
            ..Default::default()
        },
    )?;
    let text = serde_json::to_string_pretty(&result)?;
    if let Some(out) = &args.out {
        fs::write(out, &text).with_context(|| format!("writing {}", out.display()))?;
    }
    println!("{text}");
    if !result.converged {
        eprintln!(
            "warning: gap {} did not meet tolerance {} within {} iterations",
            result.gap, args.tol, result.iterations
        );
    }
    Ok(true)
}

fn cmd_content(args: ContentArgs) -> Result<bool> {
    let space = load_space(&args.space)?;
    let set = setspec::parse_set(&args.set, &space)?;
    let r_cap = setspec::parse_radius_cap(&args.rcap)?;
    let mode = match args.mode.as_str() {
        "greedy" => CoverMode::Greedy,
        "exact" => CoverMode::Exact,
        other => {
            return Err(UsageError(format!(
                "unknown mode '{other}' (expected greedy|exact)"
            ))
            .into())
        }
    };
    let opts = CoverOptions {
        node_cap: args.node_cap,
    };
    let cover = match args.classical_lambda {
        Some(lambda) => classical_content(&space, &set, lambda, r_cap, args.min_rho, mode, &opts)?,
        None => {
            let params = RieszParams::new(args.gamma, args.p)?;
            modified_content(&space, params, &set, r_cap, mode, &opts)?
        }
    };
    #[derive(Serialize)]
    struct BallOut {
        center: usize,
        rho: f64,
        weight: f64,
    }
    #[derive(Serialize)]
    struct CoverOut {
        total_weight: f64,
        exact: bool,
        balls: Vec<BallOut>,
    }
    let out = CoverOut {
        total_weight: cover.total_weight,
        exact: cover.exact,
        balls: cover
            .balls
            .iter()
            .map(|b| BallOut {
                center: b.center,
                rho: b.rho,
                weight: b.weight,
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&out)?;
    if let Some(path) = &args.out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{text}");
    Ok(true)
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let space = load_space(&args.space)?;
    let suite = Suite::parse(&args.suite).map_err(|e| UsageError(e.to_string()))?;
    let cfg = SuiteConfig {
        params: RieszParams::new(args.gamma, args.p)?,
        tilde_params: RieszParams::new(args.tilde_gamma, args.tilde_p)?,
        seed: args.seed,
        check: CheckOptions {
            tolerance: args.tol,
            ..Default::default()
        },
        ..Default::default()
    };
    let reports = run_suite(&space, suite, &cfg)?;
    let mut failed = 0usize;
    for r in &reports {
        let status = if r.passed { "pass" } else { "FAIL" };
        println!(
            "{status} {} {} lhs={} rhs={}",
            r.check_name, r.instance_id, r.lhs, r.rhs
        );
        if !r.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", reports.len(), failed);
    if let Some(out) = &args.out {
        let mut csv = String::from("check_name,instance_id,lhs,rhs,constant_used,passed,slack\n");
        for r in &reports {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.check_name, r.instance_id, r.lhs, r.rhs, r.constant_used, r.passed, r.slack
            ));
        }
        fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(failed == 0)
}
