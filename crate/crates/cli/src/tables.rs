//! Convergence-factor experiments over (scheme, cycle, grid, ν).

use std::time::Instant;

use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;
use stokes_mg::lfa::smoothing_factor;
use stokes_mg::{measure_rho, CycleKind, CycleSpec, Error, GridSpec, Smoother};

use crate::config::ExperimentConfig;
use crate::output::Table;
use crate::CliError;

/// Per-run seeds: run `i` of an experiment (in the order cycles, grids, ν
/// are listed) takes the `(i+1)`-th output of SplitMix64 started from the
/// experiment seed. The mapping does not depend on execution order.
pub fn run_seeds(base: u64, count: usize) -> Vec<u64> {
    let mut g = SplitMix64::seed_from_u64(base);
    (0..count).map(|_| g.next_u64()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Diverged,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub scheme: String,
    pub cycle: String,
    pub n: usize,
    pub h: f64,
    pub nu: usize,
    pub rho: Option<f64>,
    pub k_eff: Option<usize>,
    pub lfa_prediction: Option<f64>,
    pub deviation: Option<f64>,
    pub wall_time_s: f64,
    pub seed: u64,
    pub status: Status,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    experiment: usize,
    cycle: CycleKind,
    n: usize,
    nu: usize,
    seed: u64,
}

fn jobs(experiments: &[ExperimentConfig]) -> Vec<Job> {
    let mut out = Vec::new();
    for (e, cfg) in experiments.iter().enumerate() {
        let combos: Vec<_> = cfg
            .cycles
            .iter()
            .flat_map(|&c| cfg.grids.iter().flat_map(move |&n| cfg.nu.iter().map(move |&nu| (c, n, nu))))
            .collect();
        let seeds = run_seeds(cfg.seed, combos.len());
        out.extend(combos.into_iter().zip(seeds).map(|((cycle, n, nu), seed)| Job {
            experiment: e,
            cycle,
            n,
            nu,
            seed,
        }));
    }
    out
}

fn run_job(cfg: &ExperimentConfig, mu: Option<f64>, job: Job) -> ResultRow {
    let grid = GridSpec::new(job.n).expect("grid sizes are validated");
    let start = Instant::now();
    let outcome = Smoother::new(cfg.scheme, cfg.params).and_then(|s| {
        let spec = CycleSpec::new(job.cycle, job.nu, s).with_transfer(cfg.transfer);
        measure_rho(&spec, grid, cfg.k_max, job.seed)
    });
    let wall = start.elapsed().as_secs_f64();
    let prediction = mu.map(|m| m.powi(job.nu as i32));
    let mut row = ResultRow {
        experiment: cfg.name.clone(),
        scheme: cfg.scheme.tag().into(),
        cycle: job.cycle.tag().into(),
        n: job.n,
        h: grid.h(),
        nu: job.nu,
        rho: None,
        k_eff: None,
        lfa_prediction: prediction,
        deviation: None,
        wall_time_s: wall,
        seed: job.seed,
        status: Status::Ok,
        message: String::new(),
    };
    match outcome {
        Ok(m) => {
            row.rho = Some(m.rho);
            row.k_eff = Some(m.k_eff);
            row.deviation = prediction.map(|p| (m.rho - p).abs());
        }
        Err(e @ Error::Diverged { .. }) => {
            row.status = Status::Diverged;
            row.message = e.to_string();
        }
        Err(e) => {
            row.status = Status::Error;
            row.message = e.to_string();
        }
    }
    row
}

/// Runs every combination in a worker pool and returns rows sorted by
/// experiment, cycle, grid size and ν.
pub fn run_tables(experiments: &[ExperimentConfig]) -> Result<Vec<ResultRow>, CliError> {
    let mus = experiments
        .par_iter()
        .map(|e| smoothing_factor(e.scheme, &e.params, e.resolution).map(|r| r.mu))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let jobs = jobs(experiments);
    let mut keyed: Vec<_> = jobs
        .par_iter()
        .map(|&j| ((j.experiment, j.cycle, j.n, j.nu), run_job(&experiments[j.experiment], Some(mus[j.experiment]), j)))
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "-".into())
}

pub fn console_table(rows: &[ResultRow]) -> Table {
    let mut t = Table::new(&["experiment", "scheme", "cycle", "h", "nu", "rho", "k_eff", "mu^nu", "|rho-mu^nu|", "time[s]", "status"]);
    for r in rows {
        t.push(vec![
            r.experiment.clone(),
            r.scheme.clone(),
            r.cycle.clone(),
            format!("1/{}", r.n),
            r.nu.to_string(),
            fmt_opt(r.rho, 3),
            r.k_eff.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
            fmt_opt(r.lfa_prediction, 3),
            fmt_opt(r.deviation, 3),
            format!("{:.2}", r.wall_time_s),
            match r.status {
                Status::Ok => "ok".into(),
                Status::Diverged => "DIVERGED".into(),
                Status::Error => "ERROR".into(),
            },
        ]);
    }
    t
}
