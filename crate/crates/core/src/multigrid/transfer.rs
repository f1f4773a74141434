//! Inter-grid transfers for standard coarsening of the MAC grid.
//!
//! Restriction: 4-point average for the pressure, 6-point weighted average
//! for each velocity component. Prolongation is `4 Rᵀ`, applied as a scatter
//! over the same taps, so the pair is adjoint by construction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, StaggeredField};

/// Placement of the velocity restriction taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransferStencil {
    /// Coarse `u(I, J)` at `(2I h, (2J+1) h)` averages the fine u-values at
    /// rows `2J, 2J+1` on the line `x = 2I h` (weight 1/4) and on the lines
    /// `x = (2I ± 1) h` (weight 1/8). `v` is the mirror image.
    #[default]
    Centered,
    /// The same weights with the straddling rows (columns for `v`) moved one
    /// fine cell outward: geometrically off by `h`, algebraically still a
    /// constant-preserving operator with adjoint `P = 4 Rᵀ`.
    Shifted,
}

impl TransferStencil {
    pub fn tag(self) -> &'static str {
        match self {
            TransferStencil::Centered => "centered",
            TransferStencil::Shifted => "shifted",
        }
    }
}

impl fmt::Display for TransferStencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TransferStencil {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "centered" | "centred" => Ok(TransferStencil::Centered),
            "shifted" => Ok(TransferStencil::Shifted),
            _ => Err(Error::InvalidParameter(format!("unknown transfer stencil `{s}`"))),
        }
    }
}

type Tap = (usize, usize, f64);

#[inline]
fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// Fine-grid taps of coarse `u(ci, cj)`; `n` is the fine size.
fn u_taps(ci: usize, cj: usize, n: usize, stencil: TransferStencil) -> [Tap; 6] {
    let x = 2 * ci as isize;
    let y0 = 2 * cj as isize + if stencil == TransferStencil::Shifted { 1 } else { 0 };
    let tap = |dx: isize, dy: isize, w: f64| (wrap(x + dx, n), wrap(y0 + dy, n), w);
    [
        tap(0, 0, 0.25),
        tap(0, 1, 0.25),
        tap(-1, 0, 0.125),
        tap(-1, 1, 0.125),
        tap(1, 0, 0.125),
        tap(1, 1, 0.125),
    ]
}

/// Fine-grid taps of coarse `v(ci, cj)`: `u_taps` with the axes exchanged.
fn v_taps(ci: usize, cj: usize, n: usize, stencil: TransferStencil) -> [Tap; 6] {
    u_taps(cj, ci, n, stencil).map(|(i, j, w)| (j, i, w))
}

fn p_taps(ci: usize, cj: usize) -> [Tap; 4] {
    let (x, y) = (2 * ci, 2 * cj);
    [(x, y, 0.25), (x + 1, y, 0.25), (x, y + 1, 0.25), (x + 1, y + 1, 0.25)]
}

/// Restricts a fine-grid field to the next coarser grid.
pub fn restrict(fine_grid: GridSpec, fine: &StaggeredField, stencil: TransferStencil) -> Result<StaggeredField> {
    fine.check(fine_grid)?;
    let coarse_grid = fine_grid.coarser()?;
    let (n, nc) = (fine_grid.n(), coarse_grid.n());
    let mut out = StaggeredField::zeros(coarse_grid);
    for cj in 0..nc {
        for ci in 0..nc {
            let k = coarse_grid.idx(ci, cj);
            let gather = |src: &[f64], taps: &[Tap]| -> f64 {
                taps.iter().map(|&(i, j, w)| w * src[j * n + i]).sum()
            };
            out.u[k] = gather(&fine.u, &u_taps(ci, cj, n, stencil));
            out.v[k] = gather(&fine.v, &v_taps(ci, cj, n, stencil));
            out.p[k] = gather(&fine.p, &p_taps(ci, cj));
        }
    }
    Ok(out)
}

/// `fine += 4 Rᵀ coarse`.
pub fn prolong_add(coarse_grid: GridSpec, coarse: &StaggeredField, fine: &mut StaggeredField, stencil: TransferStencil) -> Result<()> {
    coarse.check(coarse_grid)?;
    let fine_grid = coarse_grid.finer();
    fine.check(fine_grid)?;
    let (n, nc) = (fine_grid.n(), coarse_grid.n());
    for cj in 0..nc {
        for ci in 0..nc {
            let k = coarse_grid.idx(ci, cj);
            let scatter = |dst: &mut [f64], taps: &[Tap], value: f64| {
                for &(i, j, w) in taps {
                    dst[j * n + i] += 4.0 * w * value;
                }
            };
            scatter(&mut fine.u, &u_taps(ci, cj, n, stencil), coarse.u[k]);
            scatter(&mut fine.v, &v_taps(ci, cj, n, stencil), coarse.v[k]);
            scatter(&mut fine.p, &p_taps(ci, cj), coarse.p[k]);
        }
    }
    Ok(())
}

/// Prolongs a coarse-grid field to the next finer grid.
pub fn prolong(coarse_grid: GridSpec, coarse: &StaggeredField, stencil: TransferStencil) -> Result<StaggeredField> {
    let mut fine = StaggeredField::zeros(coarse_grid.finer());
    prolong_add(coarse_grid, coarse, &mut fine, stencil)?;
    Ok(fine)
}
