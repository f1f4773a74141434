//! Smoothing-factor optimisation per scheme.
//!
//! ```toml
//! [[scan]]
//! scheme = "q-uzawa"
//! omega = 1.0                  # fixed value
//! alpha = [0.8, 2.0, 0.025]    # lo, hi, step
//! refine = true
//! ```
//!
//! Ranges left out fall back to the library's default box for the scheme.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stokes_mg::lfa::{optimize_params, ParamRange, SearchBox};
use stokes_mg::RelaxScheme;

use crate::config::{check_resolution, parse_scheme, DEFAULT_RESOLUTION};
use crate::output::Table;
use crate::CliError;

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RangeSpec {
    Fixed(f64),
    Range([f64; 3]),
}

impl RangeSpec {
    fn to_range(self) -> ParamRange {
        match self {
            RangeSpec::Fixed(v) => ParamRange::fixed(v),
            RangeSpec::Range([lo, hi, step]) => ParamRange::new(lo, hi, step),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub scheme: String,
    pub omega: Option<RangeSpec>,
    pub alpha: Option<RangeSpec>,
    pub sigma: Option<RangeSpec>,
    pub omega_j: Option<RangeSpec>,
    pub refine: Option<bool>,
    /// θ samples per axis used to rank candidates.
    pub search_resolution: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanJob {
    pub scheme: RelaxScheme,
    pub search: SearchBox,
}

impl ScanSection {
    pub fn resolve(&self, final_resolution: usize) -> Result<ScanJob, CliError> {
        let scheme = parse_scheme(&self.scheme)?;
        let mut b = SearchBox::default_for(scheme);
        let set = |slot: &mut ParamRange, spec: Option<RangeSpec>| {
            if let Some(s) = spec {
                *slot = s.to_range();
            }
        };
        set(&mut b.omega, self.omega);
        set(&mut b.alpha, self.alpha);
        set(&mut b.sigma, self.sigma);
        set(&mut b.omega_j, self.omega_j);
        if let Some(r) = self.refine {
            b.refine = r;
        }
        if let Some(r) = self.search_resolution {
            check_resolution(r)?;
            b.resolution = r;
        }
        b.final_resolution = final_resolution;
        Ok(ScanJob { scheme, search: b })
    }
}

/// The default scan: every scheme over its default box.
pub fn default_jobs(schemes: &[RelaxScheme], final_resolution: usize) -> Vec<ScanJob> {
    schemes
        .iter()
        .map(|&scheme| {
            let mut search = SearchBox::default_for(scheme);
            search.final_resolution = final_resolution;
            ScanJob { scheme, search }
        })
        .collect()
}

pub fn final_resolution(cli: Option<usize>, file: Option<usize>) -> Result<usize, CliError> {
    let r = cli.or(file).unwrap_or(DEFAULT_RESOLUTION);
    check_resolution(r)?;
    Ok(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub scheme: String,
    pub omega: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub omega_j: f64,
    pub mu: f64,
    pub expected: f64,
    pub deviation: f64,
    pub evaluations: usize,
    pub resolution: usize,
}

pub fn run_scan(jobs: &[ScanJob]) -> Result<Vec<ScanRow>, CliError> {
    jobs.par_iter()
        .map(|j| {
            let r = optimize_params(j.scheme, &j.search).map_err(|e| CliError::Usage(format!("scan {}: {e}", j.scheme)))?;
            let expected = j.scheme.optimal_smoothing_factor();
            Ok(ScanRow {
                scheme: j.scheme.tag().into(),
                omega: r.params.omega,
                alpha: r.params.alpha,
                sigma: r.params.sigma,
                omega_j: r.params.omega_j,
                mu: r.mu,
                expected,
                deviation: (r.mu - expected).abs(),
                evaluations: r.evaluations,
                resolution: j.search.final_resolution,
            })
        })
        .collect()
}

pub fn console_table(rows: &[ScanRow]) -> Table {
    let mut t = Table::new(&["scheme", "omega", "alpha", "sigma", "omega_J", "mu*", "expected", "deviation", "evals"]);
    for r in rows {
        t.push(vec![
            r.scheme.clone(),
            format!("{:.4}", r.omega),
            format!("{:.4}", r.alpha),
            format!("{:.4}", r.sigma),
            format!("{:.4}", r.omega_j),
            format!("{:.4}", r.mu),
            format!("{:.4}", r.expected),
            format!("{:.1e}", r.deviation),
            r.evaluations.to_string(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_overrides_only_given_ranges() {
        let s: ScanSection = toml::from_str("scheme = \"q-dr\"\nomega = [0.5, 1.0, 0.05]\nalpha = 2.0").unwrap();
        let j = s.resolve(64).unwrap();
        assert_eq!(j.search.omega, ParamRange::new(0.5, 1.0, 0.05));
        assert_eq!(j.search.alpha, ParamRange::fixed(2.0));
        assert_eq!(j.search.sigma, SearchBox::default_for(RelaxScheme::QDR).sigma);
        assert_eq!(j.search.final_resolution, 64);
    }

    #[test]
    fn qdr_scan_finds_three_quarters() {
        let rows = run_scan(&default_jobs(&[RelaxScheme::QDR], 64)).unwrap();
        assert!((rows[0].omega - 0.75).abs() < 2e-3, "{:?}", rows[0]);
        assert!(rows[0].deviation < 2e-3);
    }
}
