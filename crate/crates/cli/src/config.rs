//! Experiment files and the built-in table presets.
//!
//! A file holds optional top-level defaults followed by `[[experiment]]`
//! sections:
//!
//! ```toml
//! seed = 20240611
//! kmax = 100
//!
//! [[experiment]]
//! name = "qdr-two-grid"
//! scheme = "q-dr"
//! params = "preset"          # or { omega = 0.7 }; missing keys use the preset
//! grids = [32, 64]
//! cycles = ["twogrid"]
//! nu = [1, 2, 3, 4]
//! ```
//!
//! `[[scan]]` sections configure `lfa-scan` (see [`crate::scan`]).
//! Command-line flags override both levels.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use stokes_mg::{CycleKind, RelaxParams, RelaxScheme, TransferStencil};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_KMAX: usize = 100;
pub const DEFAULT_RESOLUTION: usize = 256;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub kmax: Option<usize>,
    pub resolution: Option<usize>,
    pub output: Option<PathBuf>,
    pub transfer: Option<String>,
    #[serde(default)]
    pub experiment: Vec<ExperimentSection>,
    #[serde(default)]
    pub scan: Vec<crate::scan::ScanSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: Option<String>,
    pub scheme: String,
    #[serde(default)]
    pub params: ParamsSection,
    pub grids: Vec<usize>,
    pub cycles: Vec<String>,
    pub nu: Vec<usize>,
    pub seed: Option<u64>,
    pub kmax: Option<usize>,
    pub resolution: Option<usize>,
    pub transfer: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ParamsSection {
    Keyword(String),
    Explicit(ParamOverrides),
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection::Keyword("preset".into())
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub omega: Option<f64>,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub omega_j: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, base: RelaxParams) -> RelaxParams {
        RelaxParams {
            omega: self.omega.unwrap_or(base.omega),
            alpha: self.alpha.unwrap_or(base.alpha),
            sigma: self.sigma.unwrap_or(base.sigma),
            omega_j: self.omega_j.unwrap_or(base.omega_j),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub kmax: Option<usize>,
    pub resolution: Option<usize>,
    pub output: Option<PathBuf>,
    pub scheme: Option<String>,
    pub transfer: Option<String>,
    pub params: ParamOverrides,
}

/// One fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub scheme: RelaxScheme,
    pub params: RelaxParams,
    pub grids: Vec<usize>,
    pub cycles: Vec<CycleKind>,
    pub nu: Vec<usize>,
    pub seed: u64,
    pub k_max: usize,
    pub resolution: usize,
    pub transfer: TransferStencil,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub experiments: Vec<ExperimentConfig>,
    pub output: Option<PathBuf>,
}

pub const PRESETS: [&str; 4] = ["table1", "table2", "table3", "all"];

fn section(name: &str, scheme: &str, cycle: &str, grids: [usize; 2]) -> ExperimentSection {
    ExperimentSection {
        name: Some(name.into()),
        scheme: scheme.into(),
        params: ParamsSection::default(),
        grids: grids.to_vec(),
        cycles: vec![cycle.into()],
        nu: vec![1, 2, 3, 4],
        seed: None,
        kmax: None,
        resolution: None,
        transfer: None,
    }
}

fn table(id: &str, scheme: &str, with_w: bool) -> Vec<ExperimentSection> {
    let mut v = vec![
        section(&format!("{id}-twogrid"), scheme, "twogrid", [32, 64]),
        section(&format!("{id}-V"), scheme, "V", [128, 256]),
    ];
    if with_w {
        v.push(section(&format!("{id}-W"), scheme, "W", [128, 256]));
    }
    v
}

/// Built-in experiment sets reproducing the convergence tables.
pub fn preset(name: &str) -> Result<FileConfig, CliError> {
    let experiment = match name {
        "table1" => table("table1", "q-dr", false),
        "table2" => table("table2", "q-ibsr", true),
        "table3" => table("table3", "q-uzawa", true),
        "all" => [table("table1", "q-dr", false), table("table2", "q-ibsr", true), table("table3", "q-uzawa", true)].concat(),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown preset `{name}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(FileConfig {
        experiment,
        ..FileConfig::default()
    })
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<FileConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))
}

fn usage<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Usage(format!("{context}: {e}"))
}

pub fn parse_scheme(tag: &str) -> Result<RelaxScheme, CliError> {
    tag.parse().map_err(usage("scheme"))
}

pub fn parse_transfer(tag: &str) -> Result<TransferStencil, CliError> {
    tag.parse().map_err(usage("transfer"))
}

pub fn check_resolution(resolution: usize) -> Result<(), CliError> {
    if resolution < 32 || resolution % 2 != 0 {
        return Err(CliError::Usage(format!(
            "resolution: must be even and at least 32, got {resolution}"
        )));
    }
    Ok(())
}

impl FileConfig {
    /// Applies defaults and overrides and validates every experiment.
    pub fn resolve(&self, cli: &Overrides) -> Result<RunPlan, CliError> {
        if self.experiment.is_empty() {
            return Err(CliError::Usage("experiment: no experiments configured".into()));
        }
        let experiments = self
            .experiment
            .iter()
            .enumerate()
            .map(|(i, s)| self.resolve_one(i, s, cli))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RunPlan {
            experiments,
            output: cli.output.clone().or_else(|| self.output.clone()),
        })
    }

    fn resolve_one(&self, index: usize, s: &ExperimentSection, cli: &Overrides) -> Result<ExperimentConfig, CliError> {
        let name = s.name.clone().unwrap_or_else(|| format!("experiment{}", index + 1));
        let field = |f: &str| format!("experiment `{name}`, field `{f}`");

        let scheme = parse_scheme(cli.scheme.as_deref().unwrap_or(&s.scheme)).map_err(|e| CliError::Usage(format!("{}: {e}", field("scheme"))))?;
        let file_params = match &s.params {
            ParamsSection::Keyword(k) if k == "preset" => ParamOverrides::default(),
            ParamsSection::Keyword(k) => {
                return Err(CliError::Usage(format!("{}: expected \"preset\" or a table, got `{k}`", field("params"))))
            }
            ParamsSection::Explicit(p) => *p,
        };
        let params = cli.params.apply(file_params.apply(scheme.default_params()));
        params.validate().map_err(usage(&field("params")))?;

        if s.grids.is_empty() {
            return Err(CliError::Usage(format!("{}: grid-size list is empty", field("grids"))));
        }
        if let Some(&n) = s.grids.iter().find(|&&n| n < 8 || !n.is_power_of_two()) {
            return Err(CliError::Usage(format!("{}: {n} is not a power of two >= 8", field("grids"))));
        }
        if s.cycles.is_empty() {
            return Err(CliError::Usage(format!("{}: cycle list is empty", field("cycles"))));
        }
        let cycles = s
            .cycles
            .iter()
            .map(|c| c.parse::<CycleKind>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage(&field("cycles")))?;
        if s.nu.is_empty() || s.nu.contains(&0) {
            return Err(CliError::Usage(format!("{}: need a non-empty list of positive sweep counts", field("nu"))));
        }

        let k_max = cli.kmax.or(s.kmax).or(self.kmax).unwrap_or(DEFAULT_KMAX);
        if k_max == 0 {
            return Err(CliError::Usage(format!("{}: must be positive", field("kmax"))));
        }
        let resolution = cli.resolution.or(s.resolution).or(self.resolution).unwrap_or(DEFAULT_RESOLUTION);
        check_resolution(resolution).map_err(|e| CliError::Usage(format!("{}: {e}", field("resolution"))))?;
        let transfer = match cli.transfer.as_deref().or(s.transfer.as_deref()).or(self.transfer.as_deref()) {
            Some(t) => parse_transfer(t)?,
            None => TransferStencil::Centered,
        };

        Ok(ExperimentConfig {
            name,
            scheme,
            params,
            grids: s.grids.clone(),
            cycles,
            nu: s.nu.clone(),
            seed: cli.seed.or(s.seed).or(self.seed).unwrap_or(DEFAULT_SEED),
            k_max,
            resolution,
            transfer,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 5

[[experiment]]
scheme = "q-ibsr"
params = { omega = 1.0 }
grids = [16, 32]
cycles = ["W", "twogrid"]
nu = [2]
kmax = 40
"#;

    #[test]
    fn file_values_and_overrides_merge() {
        let plan = parse(SAMPLE).unwrap().resolve(&Overrides::default()).unwrap();
        let e = &plan.experiments[0];
        assert_eq!(e.name, "experiment1");
        assert_eq!(e.seed, 5);
        assert_eq!(e.k_max, 40);
        assert_eq!(e.params.omega, 1.0);
        assert_eq!(e.params.alpha, RelaxParams::qibsr().alpha);
        assert_eq!(e.cycles, vec![CycleKind::W, CycleKind::TwoGrid]);

        let cli = Overrides {
            seed: Some(9),
            kmax: Some(10),
            params: ParamOverrides {
                alpha: Some(2.0),
                ..Default::default()
            },
            ..Default::default()
        };
        let e = parse(SAMPLE).unwrap().resolve(&cli).unwrap().experiments.remove(0);
        assert_eq!((e.seed, e.k_max, e.params.omega, e.params.alpha), (9, 10, 1.0, 2.0));
    }

    #[test]
    fn invalid_fields_are_named() {
        let bad = SAMPLE.replace("[16, 32]", "[16, 12]");
        let err = parse(&bad).unwrap().resolve(&Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("grids"), "{err}");

        let bad = SAMPLE.replace("cycles = [\"W\", \"twogrid\"]", "cycles = [\"F\"]");
        let err = parse(&bad).unwrap().resolve(&Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("cycles"), "{err}");

        let err = parse(&SAMPLE.replace("kmax = 40", "k_max = 40")).unwrap_err();
        assert!(err.to_string().contains("k_max"), "{err}");
    }

    #[test]
    fn presets_use_library_defaults() {
        for name in PRESETS {
            let plan = preset(name).unwrap().resolve(&Overrides::default()).unwrap();
            for e in plan.experiments {
                assert_eq!(e.params, e.scheme.default_params());
                assert_eq!(e.nu, vec![1, 2, 3, 4]);
            }
        }
        assert!(preset("table9").is_err());
    }
}
