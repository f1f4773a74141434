use rayon::prelude::*;

use super::smoothing_factor;
use crate::error::{Error, Result};
use crate::relaxation::{Family, RelaxParams, RelaxScheme, SchurSolve};

/// Inclusive grid `lo, lo + step, ..., ≤ hi`. A range with `lo == hi` is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ParamRange {
    pub const fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step }
    }

    pub const fn fixed(value: f64) -> Self {
        Self {
            lo: value,
            hi: value,
            step: 1.0,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.lo.is_finite()
            && self.hi.is_finite()
            && self.lo > 0.0
            && self.lo <= self.hi
            && (self.is_fixed() || self.step > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::EmptySearch(format!(
                "{name} range [{}, {}] step {}",
                self.lo, self.hi, self.step
            )))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.is_fixed() {
            return vec![self.lo];
        }
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

/// Parameter box for [`optimize_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub omega: ParamRange,
    pub alpha: ParamRange,
    pub sigma: ParamRange,
    pub omega_j: ParamRange,
    /// θ samples per axis while ranking candidates.
    pub resolution: usize,
    /// θ samples per axis for the reported value of the winner.
    pub final_resolution: usize,
    /// Re-search once on a 5x finer grid within one step of the incumbent.
    pub refine: bool,
}

impl SearchBox {
    /// A box containing the known optimum of each scheme on its grid.
    pub fn default_for(scheme: RelaxScheme) -> Self {
        let d = scheme.default_params();
        let base = Self {
            omega: ParamRange::fixed(d.omega),
            alpha: ParamRange::fixed(d.alpha),
            sigma: ParamRange::fixed(d.sigma),
            omega_j: ParamRange::fixed(d.omega_j),
            resolution: 32,
            final_resolution: super::DEFAULT_RESOLUTION,
            refine: false,
        };
        match scheme {
            RelaxScheme::QDR => Self {
                omega: ParamRange::new(0.1, 1.5, 1e-3),
                ..base
            },
            RelaxScheme::QBSRExact => Self {
                omega: ParamRange::new(0.1, 1.5, 5e-3),
                ..base
            },
            RelaxScheme::QIBSR => Self {
                omega: ParamRange::new(0.5, 1.5, 0.05),
                alpha: ParamRange::new(0.8, 2.0, 0.05),
                omega_j: ParamRange::new(0.5, 1.5, 0.1),
                ..base
            },
            RelaxScheme::QSigmaUzawa => Self {
                omega: ParamRange::new(0.8, 1.2, 0.1),
                alpha: ParamRange::new(2.0 / 3.0, 2.0, 1.0 / 24.0),
                sigma: ParamRange::new(0.2, 1.0, 0.05),
                ..base
            },
            RelaxScheme::DWJBaseline => Self {
                omega: ParamRange::new(0.4, 1.2, 0.02),
                alpha: ParamRange::new(0.5, 1.5, 0.05),
                ..base
            },
            RelaxScheme::DiagIBSRBaseline => Self {
                omega: ParamRange::new(0.5, 1.5, 0.05),
                alpha: ParamRange::new(0.5, 2.0, 0.05),
                omega_j: ParamRange::new(0.5, 1.5, 0.1),
                ..base
            },
            RelaxScheme::DiagSigmaUzawaBaseline => Self {
                omega: ParamRange::new(0.8, 1.2, 0.1),
                alpha: ParamRange::new(0.5, 2.0, 0.05),
                sigma: ParamRange::new(0.05, 1.0, 0.05),
                ..base
            },
        }
    }

    fn validate(&self) -> Result<()> {
        self.omega.validate("omega")?;
        self.alpha.validate("alpha")?;
        self.sigma.validate("sigma")?;
        self.omega_j.validate("omega_j")
    }

    fn candidates(&self, scheme: RelaxScheme) -> Vec<RelaxParams> {
        // parameters a scheme ignores collapse to a single value
        let fam = scheme.family();
        let first = |r: &ParamRange| vec![r.lo];
        let alpha = if scheme == RelaxScheme::QDR { first(&self.alpha) } else { self.alpha.values() };
        let sigma = if fam == Family::Uzawa { self.sigma.values() } else { first(&self.sigma) };
        let omega_j = if fam == Family::BraessSarazin(SchurSolve::Jacobi) {
            self.omega_j.values()
        } else {
            first(&self.omega_j)
        };
        let mut out = Vec::new();
        for &omega in &self.omega.values() {
            for &a in &alpha {
                for &s in &sigma {
                    for &wj in &omega_j {
                        out.push(RelaxParams {
                            omega,
                            alpha: a,
                            sigma: s,
                            omega_j: wj,
                        });
                    }
                }
            }
        }
        out
    }

    fn around(&self, p: &RelaxParams) -> Self {
        let refine = |r: &ParamRange, centre: f64| {
            if r.is_fixed() {
                *r
            } else {
                let step = r.step / 5.0;
                ParamRange::new((centre - r.step).max(step), centre + r.step, step)
            }
        };
        Self {
            omega: refine(&self.omega, p.omega),
            alpha: refine(&self.alpha, p.alpha),
            sigma: refine(&self.sigma, p.sigma),
            omega_j: refine(&self.omega_j, p.omega_j),
            refine: false,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub params: RelaxParams,
    /// Smoothing factor of `params` at the box's final resolution.
    pub mu: f64,
    pub evaluations: usize,
}

fn best_of(scheme: RelaxScheme, cands: &[RelaxParams], resolution: usize) -> Result<(RelaxParams, f64)> {
    let (mu, idx) = cands
        .par_iter()
        .enumerate()
        .map(|(i, p)| smoothing_factor(scheme, p, resolution).map(|r| (r.mu, i)))
        .try_reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok((cands[idx], mu))
}

/// Exhaustive grid search of the smoothing factor over a parameter box.
pub fn optimize_params(scheme: RelaxScheme, search: &SearchBox) -> Result<SearchResult> {
    search.validate()?;
    let cands = search.candidates(scheme);
    let mut evaluations = cands.len();
    let (mut best, mut mu) = best_of(scheme, &cands, search.resolution)?;
    if search.refine {
        let fine = search.around(&best).candidates(scheme);
        evaluations += fine.len();
        let (p, m) = best_of(scheme, &fine, search.resolution)?;
        if m < mu {
            best = p;
            mu = m;
        }
    }
    if search.final_resolution != search.resolution {
        mu = smoothing_factor(scheme, &best, search.final_resolution)?.mu;
    }
    Ok(SearchResult {
        params: best,
        mu,
        evaluations,
    })
}
