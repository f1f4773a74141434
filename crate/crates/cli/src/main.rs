//! `stokes-mg`: convergence tables, LFA parameter scans, the acceptance
//! checks and single solves for the MAC-grid Stokes multigrid library.
//!
//! Exit status: 0 on success, 1 on a usage or configuration error, 2 when a
//! run diverges or a check fails.

mod config;
mod output;
mod scan;
mod solve;
mod tables;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stokes_mg::verify::{self, VerifyConfig, CRITERIA};
use stokes_mg::{CycleKind, CycleSpec, RelaxParams, RelaxScheme, Smoother};

use config::{Overrides, ParamOverrides};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "stokes-mg", version, about = "Multigrid and local Fourier analysis for MAC-grid Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measure multigrid convergence factors over (scheme, cycle, h, nu).
    Tables(TablesArgs),
    /// Search each scheme's parameter box for the optimal smoothing factor.
    LfaScan(ScanArgs),
    /// Run the acceptance checks and report pass/fail per criterion.
    Verify(VerifyArgs),
    /// Solve one manufactured problem and print the defect history.
    Solve(SolveArgs),
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Override the outer damping.
    #[arg(long)]
    omega: Option<f64>,
    /// Override the velocity-block scaling.
    #[arg(long)]
    alpha: Option<f64>,
    /// Override the Uzawa Schur scaling.
    #[arg(long)]
    sigma: Option<f64>,
    /// Override the Jacobi weight of the inexact Schur solve.
    #[arg(long = "omega-j")]
    omega_j: Option<f64>,
}

impl ParamArgs {
    fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            omega: self.omega,
            alpha: self.alpha,
            sigma: self.sigma,
            omega_j: self.omega_j,
        }
    }
}

#[derive(Args, Debug)]
struct TablesArgs {
    /// Experiment file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in experiment set: table1, table2, table3 or all.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// θ samples per axis for the LFA prediction.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    /// Replace the scheme of every experiment.
    #[arg(long)]
    scheme: Option<String>,
    /// Velocity transfer stencil: centered or shifted.
    #[arg(long)]
    transfer: Option<String>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// File with `[[scan]]` sections; without it every scheme is scanned.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scan a single scheme over its default box.
    #[arg(long)]
    scheme: Option<String>,
    /// θ samples per axis for the reported smoothing factor.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion")]
    criteria: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    /// Velocity transfer stencil: centered or shifted.
    #[arg(long)]
    transfer: Option<String>,
    /// Q-DR damping used by the smoothing-factor and Q-DR table checks.
    #[arg(long)]
    omega: Option<f64>,
    /// CSV summary path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, default_value = "q-ibsr")]
    scheme: String,
    #[arg(long, default_value = "W")]
    cycle: String,
    /// Cells per side of the finest grid.
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    nu: usize,
    #[arg(long, default_value_t = 100)]
    kmax: usize,
    /// Stop once the relative defect drops below this.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    transfer: Option<String>,
    /// CSV path for the defect history.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameters start from the scheme's preset; these flags override entries.
    #[command(flatten)]
    params: ParamArgs,
}

fn run_tables(a: TablesArgs) -> Result<(), CliError> {
    let file = match (&a.config, &a.preset) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --config or --preset, not both".into())),
        (Some(p), None) => config::load(p)?,
        (None, Some(name)) => config::preset(name)?,
        (None, None) => {
            return Err(CliError::Usage(format!(
                "tables needs --config <file> or --preset <{}>",
                config::PRESETS.join("|")
            )))
        }
    };
    let cli = Overrides {
        seed: a.seed,
        kmax: a.kmax,
        resolution: a.resolution,
        output: a.out,
        scheme: a.scheme,
        transfer: a.transfer,
        params: a.params.overrides(),
    };
    let plan = file.resolve(&cli)?;
    let rows = tables::run_tables(&plan.experiments)?;
    print!("{}", tables::console_table(&rows));
    if let Some(path) = &plan.output {
        output::write_csv(path, &rows)?;
    }
    let bad: Vec<_> = rows.iter().filter(|r| r.status != tables::Status::Ok).collect();
    if let Some(first) = bad.first() {
        return Err(CliError::Failure(format!(
            "{} run(s) failed; first: {} {} h=1/{} nu={}: {}",
            bad.len(),
            first.scheme,
            first.cycle,
            first.n,
            first.nu,
            first.message
        )));
    }
    Ok(())
}

fn run_scan(a: ScanArgs) -> Result<(), CliError> {
    let file = a.config.as_deref().map(config::load).transpose()?.unwrap_or_default();
    let res = scan::final_resolution(a.resolution, file.resolution)?;
    let jobs = match (&a.scheme, file.scan.is_empty()) {
        (Some(tag), _) => scan::default_jobs(&[config::parse_scheme(tag)?], res),
        (None, true) => scan::default_jobs(&RelaxScheme::ALL, res),
        (None, false) => file.scan.iter().map(|s| s.resolve(res)).collect::<Result<_, _>>()?,
    };
    let rows = scan::run_scan(&jobs)?;
    print!("{}", scan::console_table(&rows));
    if let Some(path) = a.out.or(file.output) {
        output::write_csv(&path, &rows)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct VerifyRow {
    id: usize,
    title: &'static str,
    passed: bool,
    elapsed_s: f64,
    details: String,
}

fn run_verify(a: VerifyArgs) -> Result<(), CliError> {
    let mut cfg = VerifyConfig::default();
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(k) = a.kmax {
        if k == 0 {
            return Err(CliError::Usage("kmax: must be positive".into()));
        }
        cfg.k_max = k;
    }
    if let Some(r) = a.resolution {
        config::check_resolution(r)?;
        cfg.resolution = r;
    }
    if let Some(t) = &a.transfer {
        cfg.transfer = config::parse_transfer(t)?;
    }
    if let Some(w) = a.omega {
        cfg.qdr = RelaxParams::new(w, cfg.qdr.alpha, cfg.qdr.sigma, cfg.qdr.omega_j).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ids: Vec<usize> = if a.criteria.is_empty() { (1..=CRITERIA).collect() } else { a.criteria };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA) {
        return Err(CliError::Usage(format!("criterion: {bad} is not in 1..={CRITERIA}")));
    }
    let mut reports = Vec::new();
    for id in ids {
        let r = verify::run(id, &cfg);
        println!("{r}");
        reports.push(r);
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    println!("{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    if let Some(path) = &a.out {
        let rows: Vec<_> = reports
            .iter()
            .map(|r| VerifyRow {
                id: r.id,
                title: r.title,
                passed: r.passed,
                elapsed_s: r.elapsed.as_secs_f64(),
                details: r.lines.join("; "),
            })
            .collect();
        output::write_csv(path, &rows)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("criteria {} failed", failed.join(", "))))
    }
}

fn run_solve(a: SolveArgs) -> Result<(), CliError> {
    let usage = |e: stokes_mg::Error| CliError::Usage(e.to_string());
    let scheme = config::parse_scheme(&a.scheme)?;
    let kind: CycleKind = a.cycle.parse().map_err(usage)?;
    let params = a.params.overrides().apply(scheme.default_params());
    let smoother = Smoother::new(scheme, params).map_err(usage)?;
    let mut spec = CycleSpec::new(kind, a.nu, smoother);
    if let Some(t) = &a.transfer {
        spec = spec.with_transfer(config::parse_transfer(t)?);
    }
    if a.kmax == 0 {
        return Err(CliError::Usage("kmax: must be positive".into()));
    }
    if !(a.tol >= 0.0 && a.tol < 1.0) {
        return Err(CliError::Usage(format!("tol: {} outside [0, 1)", a.tol)));
    }
    let report = solve::solve(spec, a.n, a.kmax, a.tol, a.seed)?;
    println!(
        "{scheme} {kind} nu={} h=1/{} omega={} alpha={} sigma={} omega_J={}",
        a.nu, a.n, params.omega, params.alpha, params.sigma, params.omega_j
    );
    print!("{}", solve::console_table(&report));
    println!(
        "cycles={} mean rate={:.4} relative error={:.3e} time={:.2}s",
        report.history.len(),
        report.rho,
        report.relative_error,
        report.wall_time_s
    );
    if let Some(path) = &a.out {
        output::write_csv(path, &report.history)?;
    }
    if report.diverged {
        return Err(CliError::Failure("iteration diverged".into()));
    }
    if !report.converged {
        println!("tolerance {:e} not reached in {} cycles", a.tol, a.kmax);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Tables(a) => run_tables(a),
        Command::LfaScan(a) => run_scan(a),
        Command::Verify(a) => run_verify(a),
        Command::Solve(a) => run_solve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stokes-mg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
