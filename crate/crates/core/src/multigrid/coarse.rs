//! Exact solvers for the singular periodic Stokes system.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Component, GridSpec, StaggeredField};
use crate::lfa::{stokes_symbol, Frequency};
use crate::stencil;

/// Relative size of the rhs component along the nullspace above which a
/// solve is refused.
const CONSISTENCY_TOL: f64 = 1e-8;

/// Dense LU of `L_h` bordered with the three normalized constant vectors.
///
/// The bordered matrix is nonsingular; its solution is the mean-free
/// least-squares solution and the multipliers equal the projection of the
/// rhs onto the constants.
#[derive(Debug, Clone)]
pub struct DenseCoarseSolver {
    grid: GridSpec,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseCoarseSolver {
    pub fn new(grid: GridSpec) -> Result<Self> {
        let cells = grid.cells();
        let dim = 3 * cells;
        let mut mat = DMatrix::<f64>::zeros(dim + 3, dim + 3);
        let mut e = StaggeredField::zeros(grid);
        let mut col = StaggeredField::zeros(grid);
        for k in 0..dim {
            let (c, idx) = (Component::ALL[k / cells], k % cells);
            e[(c, idx)] = 1.0;
            stencil::stokes_into(grid, &e, &mut col);
            e[(c, idx)] = 0.0;
            for (r, &v) in col.u.iter().chain(&col.v).chain(&col.p).enumerate() {
                mat[(r, k)] = v;
            }
        }
        let w = 1.0 / (cells as f64).sqrt();
        for c in 0..3 {
            for idx in 0..cells {
                mat[(c * cells + idx, dim + c)] = w;
                mat[(dim + c, c * cells + idx)] = w;
            }
        }
        let lu = mat.lu();
        if !lu.is_invertible() {
            return Err(Error::CoarseSolve(format!("bordered matrix on {}x{} is singular", grid.n(), grid.n())));
        }
        Ok(Self { grid, lu })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Mean-free `x` with `L x = b`. Fails if `b` has a significant
    /// component along the constants.
    pub fn solve(&self, b: &StaggeredField) -> Result<StaggeredField> {
        b.check(self.grid)?;
        let cells = self.grid.cells();
        let dim = 3 * cells;
        let mut rhs = DVector::<f64>::zeros(dim + 3);
        for (r, &v) in b.u.iter().chain(&b.v).chain(&b.p).enumerate() {
            rhs[r] = v;
        }
        let sol = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::CoarseSolve("LU back-substitution failed".into()))?;
        let bn = b.norm();
        let lambda = (sol[dim].powi(2) + sol[dim + 1].powi(2) + sol[dim + 2].powi(2)).sqrt();
        if bn > 0.0 && lambda > CONSISTENCY_TOL * bn {
            return Err(Error::InconsistentRhs(lambda / bn));
        }
        let part = |c: usize| sol.rows(c * cells, cells).iter().copied().collect::<Vec<_>>();
        let mut x = StaggeredField::from_parts(self.grid, part(0), part(1), part(2))?;
        x.remove_mean();
        Ok(x)
    }
}

/// Exact solve by diagonalizing `L_h` with 2D FFTs.
///
/// Each component is transformed separately; the phase `exp(-iθ·o)` of the
/// staggering offset `o` turns the component transforms into mode
/// coefficients, which are coupled by the 3×3 symbol. The zero frequency is
/// the nullspace and is dropped.
pub struct SpectralSolver {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver").field("grid", &self.grid).finish()
    }
}

impl SpectralSolver {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn fft2(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.grid.n();
        for row in data.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                col[j] = data[j * n + i];
            }
            fft.process(&mut col);
            for j in 0..n {
                data[j * n + i] = col[j];
            }
        }
    }

    pub fn solve(&self, b: &StaggeredField) -> Result<StaggeredField> {
        b.check(self.grid)?;
        let n = self.grid.n();
        let h = self.grid.h();
        let cells = self.grid.cells();
        let mut hat: Vec<Vec<Complex64>> = Component::ALL
            .iter()
            .map(|&c| {
                let mut d: Vec<Complex64> = b.component(c).iter().map(|&x| Complex64::new(x, 0.0)).collect();
                self.fft2(&mut d, self.forward.as_ref());
                d
            })
            .collect();

        let bn = b.norm();
        let nullspace = (0..3).map(|c| hat[c][0].norm_sqr()).sum::<f64>().sqrt() / (cells as f64).sqrt();
        if bn > 0.0 && nullspace > CONSISTENCY_TOL * bn {
            return Err(Error::InconsistentRhs(nullspace / bn));
        }

        let step = 2.0 * std::f64::consts::PI / n as f64;
        for k2 in 0..n {
            for k1 in 0..n {
                let k = k2 * n + k1;
                if k == 0 {
                    for comp in hat.iter_mut() {
                        comp[0] = Complex64::new(0.0, 0.0);
                    }
                    continue;
                }
                let theta = Frequency::new(step * k1 as f64, step * k2 as f64);
                let shift = |c: Component| {
                    let (ox, oy) = c.offset();
                    Complex64::from_polar(1.0, theta.theta1 * ox + theta.theta2 * oy)
                };
                let rhs = Vector3::from_fn(|c, _| hat[c][k] * shift(Component::ALL[c]).conj());
                let sym: Matrix3<Complex64> = stokes_symbol(theta, h).entries;
                let a = sym
                    .lu()
                    .solve(&rhs)
                    .ok_or(Error::SingularFrequency(theta.theta1, theta.theta2))?;
                for c in 0..3 {
                    hat[c][k] = a[c] * shift(Component::ALL[c]);
                }
            }
        }

        let scale = 1.0 / cells as f64;
        let mut parts = hat.into_iter().map(|mut d| {
            self.fft2(&mut d, self.inverse.as_ref());
            d.into_iter().map(|z| z.re * scale).collect::<Vec<f64>>()
        });
        let (u, v, p) = (parts.next().unwrap(), parts.next().unwrap(), parts.next().unwrap());
        StaggeredField::from_parts(self.grid, u, v, p)
    }
}
