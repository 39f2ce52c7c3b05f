//! Batch mode: a TOML config fans out capacity solves and check suites to
//! a worker pool and writes a deterministic report directory.

use crate::UsageError;
use anyhow::{Context, Result};
use rayon::prelude::*;
use rieszcap_core::{
    load_space, run_suite, solve_capacity, CapacityResult, CheckOptions, CheckReport,
    DiagonalMode, MetricMeasureSpace, RieszKernel, RieszParams, SolveOptions, Suite, SuiteConfig,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Deserialize)]
pub struct BatchConfig {
    #[serde(default)]
    space: Option<String>,
    #[serde(default)]
    spaces: Vec<String>,
    gammas: Vec<f64>,
    ps: Vec<f64>,
    #[serde(default)]
    sets: Vec<String>,
    #[serde(default)]
    suites: Vec<String>,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    tilde_gamma: Option<f64>,
    #[serde(default)]
    tilde_p: Option<f64>,
}

fn default_seed() -> u64 {
    42
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Serialize)]
struct CapacityRecord {
    space: String,
    set: String,
    gamma: f64,
    p: f64,
    result: CapacityResult,
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    seed: u64,
    tolerance: f64,
    gammas: &'a [f64],
    ps: &'a [f64],
    sets: &'a [String],
    suites: &'a [String],
    spaces: Vec<String>,
    generated_unix_secs: u64,
}

pub fn run_batch(config_path: &Path, out_dir: &Path, jobs: Option<usize>) -> Result<bool> {
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let cfg: BatchConfig = toml::from_str(&text)
        .map_err(|e| UsageError(format!("invalid config: {e}")))?;

    let mut space_paths: Vec<String> = cfg.spaces.clone();
    if let Some(s) = &cfg.space {
        space_paths.insert(0, s.clone());
    }
    if space_paths.is_empty() {
        return Err(UsageError("config names no spaces".into()).into());
    }
    if cfg.gammas.is_empty() || cfg.ps.is_empty() {
        return Err(UsageError("config needs nonempty 'gammas' and 'ps'".into()).into());
    }

    let spaces: Vec<(String, MetricMeasureSpace)> = space_paths
        .iter()
        .map(|p| Ok((p.clone(), load_space(p)?)))
        .collect::<Result<_>>()?;

    let pool = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new().num_threads(j).build()?,
        None => rayon::ThreadPoolBuilder::new().build()?,
    };

    // capacity jobs: space x set x gamma x p
    let mut cap_jobs: Vec<(usize, String, f64, f64)> = Vec::new();
    for (si, _) in spaces.iter().enumerate() {
        for set in &cfg.sets {
            for &gamma in &cfg.gammas {
                for &p in &cfg.ps {
                    cap_jobs.push((si, set.clone(), gamma, p));
                }
            }
        }
    }
    // suite jobs: space x suite
    let mut suite_jobs: Vec<(usize, String)> = Vec::new();
    for (si, _) in spaces.iter().enumerate() {
        for suite in &cfg.suites {
            Suite::parse(suite)?; // fail early on typos
            suite_jobs.push((si, suite.clone()));
        }
    }

    let tolerance = cfg.tolerance;
    let seed = cfg.seed;

    let records: Vec<CapacityRecord> = pool.install(|| {
        cap_jobs
            .par_iter()
            .map(|(si, set_spec, gamma, p)| -> Result<CapacityRecord> {
                let (name, space) = &spaces[*si];
                let set = crate::setspec::parse_set(set_spec, space)?;
                let params = RieszParams::new(*gamma, *p)?;
                let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
                let result = solve_capacity(
                    &kernel,
                    &set,
                    SolveOptions {
                        tolerance,
                        ..Default::default()
                    },
                )?;
                Ok(CapacityRecord {
                    space: name.clone(),
                    set: set_spec.clone(),
                    gamma: *gamma,
                    p: *p,
                    result,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut reports: Vec<(String, CheckReport)> = pool.install(|| {
        suite_jobs
            .par_iter()
            .map(|(si, suite_name)| -> Result<Vec<(String, CheckReport)>> {
                let (name, space) = &spaces[*si];
                let suite = Suite::parse(suite_name)?;
                let mut suite_cfg = SuiteConfig {
                    seed,
                    check: CheckOptions {
                        tolerance,
                        ..Default::default()
                    },
                    ..Default::default()
                };
                suite_cfg.params = RieszParams::new(cfg.gammas[0], cfg.ps[0])?;
                if let (Some(tg), Some(tp)) = (cfg.tilde_gamma, cfg.tilde_p) {
                    suite_cfg.tilde_params = RieszParams::new(tg, tp)?;
                }
                let reports = run_suite(space, suite, &suite_cfg)?;
                Ok(reports.into_iter().map(|r| (name.clone(), r)).collect())
            })
            .collect::<Result<Vec<_>>>()
            .map(|nested| nested.into_iter().flatten().collect())
    })?;

    reports.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.check_name.cmp(&b.1.check_name))
            .then_with(|| a.1.instance_id.cmp(&b.1.instance_id))
    });

    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let mut csv = String::from("space,check_name,instance_id,lhs,rhs,constant_used,passed,slack\n");
    for (space, r) in &reports {
        csv.push_str(&format!(
            "{space},{},{},{},{},{},{},{}\n",
            r.check_name, r.instance_id, r.lhs, r.rhs, r.constant_used, r.passed, r.slack
        ));
    }
    fs::write(out_dir.join("report.csv"), csv)?;

    fs::write(
        out_dir.join("results.json"),
        serde_json::to_string_pretty(&records)?,
    )?;

    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        seed,
        tolerance,
        gammas: &cfg.gammas,
        ps: &cfg.ps,
        sets: &cfg.sets,
        suites: &cfg.suites,
        spaces: space_paths,
        generated_unix_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    fs::write(
        out_dir.join("meta.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;

    let failed = reports.iter().filter(|(_, r)| !r.passed).count();
    println!(
        "report: {} capacity solves, {} checks ({} failed) -> {}",
        records.len(),
        reports.len(),
        failed,
        out_dir.display()
    );
    Ok(failed == 0)
}
