use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::coarse::{DenseCoarseSolver, SpectralSolver};
use super::transfer::{prolong_add, restrict, TransferStencil};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, StaggeredField};
use crate::relaxation::Smoother;
use crate::stencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CycleKind {
    /// One coarse level, solved exactly.
    TwoGrid,
    V,
    W,
}

impl CycleKind {
    pub const ALL: [CycleKind; 3] = [CycleKind::TwoGrid, CycleKind::V, CycleKind::W];

    /// Recursive coarse-grid visits per level.
    pub fn gamma(self) -> usize {
        match self {
            CycleKind::W => 2,
            _ => 1,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            CycleKind::TwoGrid => "twogrid",
            CycleKind::V => "V",
            CycleKind::W => "W",
        }
    }
}

impl fmt::Display for CycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CycleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "twogrid" | "two-grid" | "tg" | "2g" => Ok(CycleKind::TwoGrid),
            "v" => Ok(CycleKind::V),
            "w" => Ok(CycleKind::W),
            _ => Err(Error::InvalidParameter(format!("unknown cycle `{s}`"))),
        }
    }
}

/// A multigrid cycle: smoothing steps, recursion shape and coarsest grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSpec {
    pub nu1: usize,
    pub nu2: usize,
    pub kind: CycleKind,
    pub coarsest_n: usize,
    pub smoother: Smoother,
    pub transfer: TransferStencil,
}

impl CycleSpec {
    /// `ν` total sweeps split as `ν₁ = ⌈ν/2⌉` pre and `ν₂ = ⌊ν/2⌋` post.
    pub fn new(kind: CycleKind, nu: usize, smoother: Smoother) -> Self {
        Self {
            nu1: nu.div_ceil(2),
            nu2: nu / 2,
            kind,
            coarsest_n: 4,
            smoother,
            transfer: TransferStencil::Centered,
        }
    }

    pub fn nu(&self) -> usize {
        self.nu1 + self.nu2
    }

    pub fn with_transfer(mut self, transfer: TransferStencil) -> Self {
        self.transfer = transfer;
        self
    }

    pub fn with_split(mut self, nu1: usize, nu2: usize) -> Self {
        self.nu1 = nu1;
        self.nu2 = nu2;
        self
    }

    fn validate(&self, finest: GridSpec) -> Result<()> {
        self.smoother.params.validate()?;
        let coarsest = GridSpec::new(self.coarsest_n)?;
        if finest.n() < 2 * coarsest.n() {
            return Err(Error::CannotCoarsen(finest.n()));
        }
        if self.nu() == 0 {
            return Err(Error::InvalidParameter("at least one smoothing step is required".into()));
        }
        Ok(())
    }
}

enum CoarseSolver {
    Dense(DenseCoarseSolver),
    Spectral(SpectralSolver),
}

impl CoarseSolver {
    fn solve(&self, b: &StaggeredField) -> Result<StaggeredField> {
        match self {
            CoarseSolver::Dense(s) => s.solve(b),
            CoarseSolver::Spectral(s) => s.solve(b),
        }
    }
}

/// A cycle bound to a grid hierarchy, with the coarse solver prepared.
pub struct Multigrid {
    spec: CycleSpec,
    levels: Vec<GridSpec>,
    coarse: CoarseSolver,
}

impl fmt::Debug for Multigrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multigrid")
            .field("spec", &self.spec)
            .field("levels", &self.levels)
            .finish()
    }
}

impl Multigrid {
    pub fn new(spec: CycleSpec, finest: GridSpec) -> Result<Self> {
        spec.validate(finest)?;
        let mut levels = vec![finest];
        if spec.kind == CycleKind::TwoGrid {
            levels.push(finest.coarser()?);
        } else {
            while levels.last().unwrap().n() > spec.coarsest_n {
                let next = levels.last().unwrap().coarser()?;
                levels.push(next);
            }
        }
        let bottom = *levels.last().unwrap();
        let coarse = if bottom.n() <= 8 {
            CoarseSolver::Dense(DenseCoarseSolver::new(bottom)?)
        } else {
            CoarseSolver::Spectral(SpectralSolver::new(bottom))
        };
        Ok(Self { spec, levels, coarse })
    }

    pub fn spec(&self) -> &CycleSpec {
        &self.spec
    }

    pub fn levels(&self) -> &[GridSpec] {
        &self.levels
    }

    /// One cycle for `L x = b` on the finest grid, updating `x` in place.
    pub fn cycle(&self, b: &StaggeredField, x: &mut StaggeredField) -> Result<()> {
        b.check(self.levels[0])?;
        x.check(self.levels[0])?;
        self.cycle_at(0, b, x)
    }

    fn cycle_at(&self, level: usize, b: &StaggeredField, x: &mut StaggeredField) -> Result<()> {
        let grid = self.levels[level];
        if level + 1 == self.levels.len() {
            *x = self.coarse.solve(b)?;
            return Ok(());
        }
        let smoother = &self.spec.smoother;
        for _ in 0..self.spec.nu1 {
            smoother.sweep(grid, b, x)?;
        }

        let r = stencil::residual(grid, b, x)?;
        let mut rc = restrict(grid, &r, self.spec.transfer)?;
        rc.remove_mean();
        let coarse_grid = self.levels[level + 1];
        let mut ec = StaggeredField::zeros(coarse_grid);
        if level + 2 == self.levels.len() {
            ec = self.coarse.solve(&rc)?;
        } else {
            for _ in 0..self.spec.kind.gamma() {
                self.cycle_at(level + 1, &rc, &mut ec)?;
            }
        }
        prolong_add(coarse_grid, &ec, x, self.spec.transfer)?;
        x.remove_mean();

        for _ in 0..self.spec.nu2 {
            smoother.sweep(grid, b, x)?;
        }
        Ok(())
    }
}

/// Outcome of a convergence-factor measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Geometric mean defect reduction per cycle.
    pub rho: f64,
    /// Cycles actually run.
    pub k_eff: usize,
    pub initial_defect: f64,
    pub final_defect: f64,
}

/// Default early-stop threshold on `‖d_k‖ / ‖d_0‖`. On `b = 0` the defect
/// decays without a roundoff floor, so the full `k_max` cycles are run and
/// the threshold only keeps the iterate clear of subnormal numbers. A large
/// threshold such as `1e-12` cuts fast runs short and biases `ρ` low, since
/// the initial transient then carries more weight in the geometric mean.
pub const MEASURE_RTOL: f64 = 1e-200;
/// Defect growth treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// Runs up to `k_max` cycles on `L x = 0` from a seeded random mean-free
/// start and returns `ρ = (‖d_k‖ / ‖d_0‖)^{1/k}`, stopping early once the
/// relative defect drops below [`MEASURE_RTOL`].
pub fn measure_rho(spec: &CycleSpec, grid: GridSpec, k_max: usize, seed: u64) -> Result<Measurement> {
    measure_rho_until(spec, grid, k_max, seed, MEASURE_RTOL)
}

/// [`measure_rho`] with an explicit early-stop threshold; `0.0` always runs
/// `k_max` cycles.
pub fn measure_rho_until(spec: &CycleSpec, grid: GridSpec, k_max: usize, seed: u64, stop_rtol: f64) -> Result<Measurement> {
    let mg = Multigrid::new(*spec, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = StaggeredField::random(grid, &mut rng);
    x.remove_mean();
    mg.measure(x, k_max, stop_rtol)
}

impl Multigrid {
    /// Cycles on `L x = 0` from `x0` and reports the mean defect reduction.
    pub fn measure(&self, x0: StaggeredField, k_max: usize, stop_rtol: f64) -> Result<Measurement> {
        if !(0.0..1.0).contains(&stop_rtol) {
            return Err(Error::InvalidParameter(format!("stop tolerance {stop_rtol} outside [0, 1)")));
        }
        if k_max == 0 {
            return Err(Error::InvalidParameter("k_max must be positive".into()));
        }
        let grid = self.levels[0];
        let mut x = x0;
        x.check(grid)?;
        let b = StaggeredField::zeros(grid);

        let d0 = stencil::apply_stokes(grid, &x)?.norm();
        if d0 == 0.0 || !d0.is_finite() {
            return Err(Error::DegenerateMeasurement);
        }
        let mut dk = d0;
        let mut k = 0;
        while k < k_max {
            self.cycle(&b, &mut x)?;
            k += 1;
            dk = stencil::apply_stokes(grid, &x)?.norm();
            if !dk.is_finite() || dk > DIVERGENCE_FACTOR * d0 {
                let spec = &self.spec;
                return Err(Error::Diverged {
                    cycle: k,
                    ratio: dk / d0,
                    context: format!(
                        "{} {}-cycle nu={} h=1/{} params={:?}",
                        spec.smoother.scheme,
                        spec.kind,
                        spec.nu(),
                        grid.n(),
                        spec.smoother.params
                    ),
                });
            }
            if dk < stop_rtol * d0 || dk == 0.0 {
                break;
            }
        }
        Ok(Measurement {
            rho: (dk / d0).powf(1.0 / k as f64),
            k_eff: k,
            initial_defect: d0,
            final_defect: dk,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relaxation::{RelaxParams, RelaxScheme};

    #[test]
    fn split_rounds_pre_smoothing_up() {
        let s = Smoother::preset(RelaxScheme::QDR);
        let c = CycleSpec::new(CycleKind::V, 3, s);
        assert_eq!((c.nu1, c.nu2), (2, 1));
        let c = CycleSpec::new(CycleKind::V, 4, s);
        assert_eq!((c.nu1, c.nu2), (2, 2));
        let c = CycleSpec::new(CycleKind::V, 1, s);
        assert_eq!((c.nu1, c.nu2), (1, 0));
    }

    #[test]
    fn hierarchy_depth() {
        let s = Smoother::preset(RelaxScheme::QDR);
        let g = GridSpec::new(32).unwrap();
        let mg = Multigrid::new(CycleSpec::new(CycleKind::V, 2, s), g).unwrap();
        assert_eq!(mg.levels().iter().map(|l| l.n()).collect::<Vec<_>>(), vec![32, 16, 8, 4]);
        let tg = Multigrid::new(CycleSpec::new(CycleKind::TwoGrid, 2, s), g).unwrap();
        assert_eq!(tg.levels().len(), 2);
        assert!(Multigrid::new(CycleSpec::new(CycleKind::V, 2, s), GridSpec::new(4).unwrap()).is_err());
        assert!(Multigrid::new(CycleSpec::new(CycleKind::V, 0, s), g).is_err());
    }

    #[test]
    fn exact_solution_is_a_fixed_point() {
        let grid = GridSpec::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = StaggeredField::random(grid, &mut rng);
        x.remove_mean();
        let b = stencil::apply_stokes(grid, &x).unwrap();
        for kind in CycleKind::ALL {
            let mg = Multigrid::new(CycleSpec::new(kind, 2, Smoother::preset(RelaxScheme::QDR)), grid).unwrap();
            let mut y = x.clone();
            mg.cycle(&b, &mut y).unwrap();
            y.sub_assign(&x);
            assert!(y.max_abs() < 1e-11, "{kind}: {}", y.max_abs());
        }
    }

    #[test]
    fn qdr_two_grid_converges_fast() {
        let spec = CycleSpec::new(CycleKind::TwoGrid, 2, Smoother::preset(RelaxScheme::QDR));
        let m = measure_rho(&spec, GridSpec::new(32).unwrap(), 15, 1).unwrap();
        assert!(m.rho < 0.2, "{}", m.rho);
    }

    #[test]
    fn divergence_is_reported() {
        let p = RelaxParams { omega: 3.0, ..RelaxParams::qdr() };
        let spec = CycleSpec::new(CycleKind::V, 2, Smoother::new(RelaxScheme::QDR, p).unwrap());
        let err = measure_rho(&spec, GridSpec::new(16).unwrap(), 100, 1).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{err}");
    }

    #[test]
    fn measurement_is_reproducible() {
        let spec = CycleSpec::new(CycleKind::V, 2, Smoother::preset(RelaxScheme::QSigmaUzawa));
        let g = GridSpec::new(16).unwrap();
        let a = measure_rho(&spec, g, 5, 42).unwrap();
        let b = measure_rho(&spec, g, 5, 42).unwrap();
        assert_eq!(a, b);
    }
}
