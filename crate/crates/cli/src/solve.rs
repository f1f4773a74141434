//! One-off solve of `L x = L x*` for a seeded random mean-free `x*`,
//! starting from zero and reporting the defect after every cycle.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stokes_mg::stencil::{apply_stokes, residual};
use stokes_mg::multigrid::DIVERGENCE_FACTOR;
use stokes_mg::{CycleSpec, GridSpec, Multigrid, StaggeredField};

use crate::output::Table;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct HistoryRow {
    pub cycle: usize,
    pub defect: f64,
    pub relative_defect: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub history: Vec<HistoryRow>,
    pub converged: bool,
    pub diverged: bool,
    /// `‖x - x*‖ / ‖x*‖` at exit.
    pub relative_error: f64,
    pub rho: f64,
    pub wall_time_s: f64,
}

pub fn solve(spec: CycleSpec, n: usize, k_max: usize, tol: f64, seed: u64) -> Result<SolveReport, CliError> {
    let usage = |e: stokes_mg::Error| CliError::Usage(e.to_string());
    let grid = GridSpec::new(n).map_err(usage)?;
    let mg = Multigrid::new(spec, grid).map_err(usage)?;
    let mut exact = StaggeredField::random(grid, &mut ChaCha8Rng::seed_from_u64(seed));
    exact.remove_mean();
    let b = apply_stokes(grid, &exact).map_err(usage)?;

    let start = Instant::now();
    let mut x = StaggeredField::zeros(grid);
    let d0 = b.norm();
    let mut prev = d0;
    let mut history = Vec::new();
    let (mut converged, mut diverged) = (d0 == 0.0, false);
    for k in 1..=k_max {
        if converged {
            break;
        }
        mg.cycle(&b, &mut x).map_err(|e| CliError::Failure(e.to_string()))?;
        let d = residual(grid, &b, &x).map_err(usage)?.norm();
        history.push(HistoryRow {
            cycle: k,
            defect: d,
            relative_defect: d / d0,
            ratio: d / prev,
        });
        prev = d;
        if !d.is_finite() || d > DIVERGENCE_FACTOR * d0 {
            diverged = true;
            break;
        }
        converged = d <= tol * d0;
    }
    let mut err = x;
    err.sub_assign(&exact);
    let k = history.len().max(1) as f64;
    Ok(SolveReport {
        rho: history.last().map_or(0.0, |h| h.relative_defect.powf(1.0 / k)),
        relative_error: err.norm() / exact.norm(),
        history,
        converged,
        diverged,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn console_table(report: &SolveReport) -> Table {
    let mut t = Table::new(&["cycle", "|d_k|", "|d_k|/|d_0|", "|d_k|/|d_k-1|"]);
    for h in &report.history {
        t.push(vec![
            h.cycle.to_string(),
            format!("{:.3e}", h.defect),
            format!("{:.3e}", h.relative_defect),
            format!("{:.4}", h.ratio),
        ]);
    }
    t
}
