//! Matrix-free stencil applications on periodic staggered grids.
//!
//! Sign conventions: `A = -Δ_h` (positive 5-point Laplacian), `B = -div`
//! and `Bᵀ = grad`, so the Stokes operator is `[[A, Bᵀ], [B, 0]]`.

use crate::error::Result;
use crate::grid::{GridSpec, StaggeredField};

/// The scalar stencils used by the Stokes operator and the smoothers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOp {
    /// `-Δ_h` on one velocity component.
    VelocityLaplacian,
    /// `(∂_x)_{h/2}`, cell centers to u-points.
    GradientX,
    /// `(∂_y)_{h/2}`, cell centers to v-points.
    GradientY,
    /// `-(∂_x)_{h/2}`, u-points to cell centers (one half of `B`).
    DivergenceX,
    /// `-(∂_y)_{h/2}`, v-points to cell centers.
    DivergenceY,
    /// `-Δ_h` at cell centers.
    PressureLaplacian,
    /// Bilinear finite-element mass stencil.
    Mass,
}

const MASS_WEIGHTS: [[f64; 3]; 3] = [[1.0, 4.0, 1.0], [4.0, 16.0, 4.0], [1.0, 4.0, 1.0]];

impl StencilOp {
    /// `(di, dj, weight)` triples: output at `(i, j)` reads input at `(i + di, j + dj)`.
    pub fn coefficients(self, h: f64) -> Vec<(isize, isize, f64)> {
        let h2 = h * h;
        let five_point = || {
            vec![
                (0, 0, 4.0 / h2),
                (-1, 0, -1.0 / h2),
                (1, 0, -1.0 / h2),
                (0, -1, -1.0 / h2),
                (0, 1, -1.0 / h2),
            ]
        };
        match self {
            StencilOp::VelocityLaplacian | StencilOp::PressureLaplacian => five_point(),
            StencilOp::GradientX => vec![(0, 0, 1.0 / h), (-1, 0, -1.0 / h)],
            StencilOp::GradientY => vec![(0, 0, 1.0 / h), (0, -1, -1.0 / h)],
            StencilOp::DivergenceX => vec![(1, 0, -1.0 / h), (0, 0, 1.0 / h)],
            StencilOp::DivergenceY => vec![(0, 1, -1.0 / h), (0, 0, 1.0 / h)],
            StencilOp::Mass => {
                let mut out = Vec::with_capacity(9);
                for (row, dj) in (-1isize..=1).enumerate() {
                    for (col, di) in (-1isize..=1).enumerate() {
                        out.push((di, dj, h2 * MASS_WEIGHTS[row][col] / 36.0));
                    }
                }
                out
            }
        }
    }
}

#[inline]
fn prev(i: usize, n: usize) -> usize {
    if i == 0 {
        n - 1
    } else {
        i - 1
    }
}

#[inline]
fn next(i: usize, n: usize) -> usize {
    if i + 1 == n {
        0
    } else {
        i + 1
    }
}

/// `out = -Δ_h w` (5-point, periodic). Same formula for velocity components
/// and cell-centered scalars.
pub fn neg_laplacian_into(grid: GridSpec, w: &[f64], out: &mut [f64]) {
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    for j in 0..n {
        let (jm, jp) = (prev(j, n) * n, next(j, n) * n);
        let row = j * n;
        for i in 0..n {
            let (im, ip) = (prev(i, n), next(i, n));
            out[row + i] = inv_h2
                * (4.0 * w[row + i] - w[row + im] - w[row + ip] - w[jm + i] - w[jp + i]);
        }
    }
}

/// `out = Q w` with the 9-point mass stencil `h²/36 [1 4 1; 4 16 4; 1 4 1]`.
pub fn mass_into(grid: GridSpec, w: &[f64], out: &mut [f64]) {
    let n = grid.n();
    let s = grid.h() * grid.h() / 36.0;
    for j in 0..n {
        let (rm, r, rp) = (prev(j, n) * n, j * n, next(j, n) * n);
        for i in 0..n {
            let (im, ip) = (prev(i, n), next(i, n));
            let center = w[r + i];
            let edges = w[r + im] + w[r + ip] + w[rm + i] + w[rp + i];
            let corners = w[rm + im] + w[rm + ip] + w[rp + im] + w[rp + ip];
            out[r + i] = s * (16.0 * center + 4.0 * edges + corners);
        }
    }
}

/// `(gu, gv) = grad p`, mapping cell centers to the u- and v-points.
pub fn gradient_into(grid: GridSpec, p: &[f64], gu: &mut [f64], gv: &mut [f64]) {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    for j in 0..n {
        let (r, rm) = (j * n, prev(j, n) * n);
        for i in 0..n {
            gu[r + i] = inv_h * (p[r + i] - p[r + prev(i, n)]);
            gv[r + i] = inv_h * (p[r + i] - p[rm + i]);
        }
    }
}

/// `out = div (u, v)` at cell centers. Note `B = -div`.
pub fn divergence_into(grid: GridSpec, u: &[f64], v: &[f64], out: &mut [f64]) {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    for j in 0..n {
        let (r, rp) = (j * n, next(j, n) * n);
        for i in 0..n {
            out[r + i] = inv_h * (u[r + next(i, n)] - u[r + i] + v[rp + i] - v[r + i]);
        }
    }
}

/// `y = L_h x` for the MAC Stokes operator.
pub fn stokes_into(grid: GridSpec, x: &StaggeredField, y: &mut StaggeredField) {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let inv_h2 = inv_h * inv_h;
    let (u, v, p) = (&x.u, &x.v, &x.p);
    for j in 0..n {
        let (rm, r, rp) = (prev(j, n) * n, j * n, next(j, n) * n);
        for i in 0..n {
            let (im, ip) = (prev(i, n), next(i, n));
            let k = r + i;
            y.u[k] = inv_h2 * (4.0 * u[k] - u[r + im] - u[r + ip] - u[rm + i] - u[rp + i])
                + inv_h * (p[k] - p[r + im]);
            y.v[k] = inv_h2 * (4.0 * v[k] - v[r + im] - v[r + ip] - v[rm + i] - v[rp + i])
                + inv_h * (p[k] - p[rm + i]);
            y.p[k] = -inv_h * (u[r + ip] - u[k] + v[rp + i] - v[k]);
        }
    }
}

fn check_len(grid: GridSpec, w: &[f64]) -> Result<()> {
    if w.len() != grid.cells() {
        return Err(crate::Error::SizeMismatch {
            expected: grid.n(),
            found: (w.len() as f64).sqrt().round() as usize,
        });
    }
    Ok(())
}

pub fn apply_stokes(grid: GridSpec, x: &StaggeredField) -> Result<StaggeredField> {
    x.check(grid)?;
    let mut y = StaggeredField::zeros(grid);
    stokes_into(grid, x, &mut y);
    Ok(y)
}

pub fn apply_mass(grid: GridSpec, w: &[f64]) -> Result<Vec<f64>> {
    check_len(grid, w)?;
    let mut out = vec![0.0; w.len()];
    mass_into(grid, w, &mut out);
    Ok(out)
}

pub fn apply_pressure_laplacian(grid: GridSpec, q: &[f64]) -> Result<Vec<f64>> {
    check_len(grid, q)?;
    let mut out = vec![0.0; q.len()];
    neg_laplacian_into(grid, q, &mut out);
    Ok(out)
}

pub fn apply_velocity_laplacian(grid: GridSpec, w: &[f64]) -> Result<Vec<f64>> {
    apply_pressure_laplacian(grid, w)
}

/// Staggered gradient of a cell-centered scalar: `((∂_x)_{h/2} p, (∂_y)_{h/2} p)`.
pub fn apply_gradient(grid: GridSpec, p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(grid, p)?;
    let mut gu = vec![0.0; p.len()];
    let mut gv = vec![0.0; p.len()];
    gradient_into(grid, p, &mut gu, &mut gv);
    Ok((gu, gv))
}

/// Staggered divergence `(∂_x)_{h/2} u + (∂_y)_{h/2} v` at cell centers.
pub fn apply_divergence(grid: GridSpec, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len(grid, u)?;
    check_len(grid, v)?;
    let mut out = vec![0.0; u.len()];
    divergence_into(grid, u, v, &mut out);
    Ok(out)
}

/// `d = b - L_h x`.
pub fn residual(grid: GridSpec, b: &StaggeredField, x: &StaggeredField) -> Result<StaggeredField> {
    b.check(grid)?;
    x.check(grid)?;
    let mut r = StaggeredField::zeros(grid);
    residual_into(grid, b, x, &mut r);
    Ok(r)
}

pub(crate) fn residual_into(grid: GridSpec, b: &StaggeredField, x: &StaggeredField, r: &mut StaggeredField) {
    stokes_into(grid, x, r);
    r.scale(-1.0);
    r.add_assign(b);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn stencil_row_sums() {
        let h = 0.125;
        let sum = |op: StencilOp| op.coefficients(h).iter().map(|c| c.2).sum::<f64>();
        assert_eq!(sum(StencilOp::VelocityLaplacian), 0.0);
        assert_eq!(sum(StencilOp::PressureLaplacian), 0.0);
        assert_eq!(sum(StencilOp::GradientX), 0.0);
        assert_eq!(sum(StencilOp::GradientY), 0.0);
        assert_eq!(sum(StencilOp::DivergenceX), 0.0);
        assert_eq!(sum(StencilOp::DivergenceY), 0.0);
        assert!((sum(StencilOp::Mass) - h * h).abs() < 1e-16);
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = grid(8);
        let y = apply_stokes(g, &StaggeredField::zeros(g)).unwrap();
        assert_eq!(y.max_abs(), 0.0);
    }

    #[test]
    fn constants_are_in_the_nullspace() {
        let g = grid(8);
        let y = apply_stokes(g, &StaggeredField::constant(g, 1.5, -0.25, 3.0)).unwrap();
        assert!(y.max_abs() < 1e-12);
        let q = apply_pressure_laplacian(g, &vec![2.0; 64]).unwrap();
        assert!(q.iter().all(|x| x.abs() < 1e-12));
        let (gu, gv) = apply_gradient(g, &vec![7.0; 64]).unwrap();
        assert!(gu.iter().chain(&gv).all(|x| *x == 0.0));
    }

    #[test]
    fn mass_of_one_is_h_squared() {
        let g = grid(16);
        let out = apply_mass(g, &vec![1.0; 256]).unwrap();
        let h2 = g.h() * g.h();
        assert!(out.iter().all(|x| (x - h2).abs() < 1e-18));
    }

    #[test]
    fn mass_impulse_response() {
        let g = grid(8);
        let mut w = vec![0.0; 64];
        // impulse at (0, 0) so the response wraps around both axes
        w[g.idx(0, 0)] = 1.0;
        let out = apply_mass(g, &w).unwrap();
        let s = g.h() * g.h() / 36.0;
        for j in 0..8 {
            for i in 0..8 {
                let di = if i == 7 { -1 } else { i as isize };
                let dj = if j == 7 { -1 } else { j as isize };
                let expected = if di.abs() <= 1 && dj.abs() <= 1 {
                    s * MASS_WEIGHTS[(dj + 1) as usize][(di + 1) as usize]
                } else {
                    0.0
                };
                assert!((out[g.idx(i, j)] - expected).abs() < 1e-18, "({i},{j})");
            }
        }
    }

    #[test]
    fn checkerboard_pressure_laplacian() {
        let g = grid(8);
        let q: Vec<f64> = (0..64).map(|k| if (k % 8 + k / 8) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let out = apply_pressure_laplacian(g, &q).unwrap();
        let scale = 8.0 / (g.h() * g.h());
        for (a, b) in out.iter().zip(&q) {
            assert!((a - scale * b).abs() < 1e-10);
        }
    }

    #[test]
    fn divergence_is_negative_adjoint_of_gradient() {
        let g = grid(8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = StaggeredField::random(g, &mut rng);
        let div = apply_divergence(g, &f.u, &f.v).unwrap();
        let (gu, gv) = apply_gradient(g, &f.p).unwrap();
        let lhs: f64 = div.iter().zip(&f.p).map(|(a, b)| a * b).sum();
        let rhs: f64 = gu.iter().zip(&f.u).chain(gv.iter().zip(&f.v)).map(|(a, b)| a * b).sum();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        assert!((lhs + rhs).abs() < 1e-13 * scale * 8.0);
    }

    #[test]
    fn stokes_blocks_agree_with_individual_operators() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = StaggeredField::random(g, &mut rng);
        let y = apply_stokes(g, &x).unwrap();
        let lu = apply_velocity_laplacian(g, &x.u).unwrap();
        let lv = apply_velocity_laplacian(g, &x.v).unwrap();
        let (gu, gv) = apply_gradient(g, &x.p).unwrap();
        let div = apply_divergence(g, &x.u, &x.v).unwrap();
        for k in 0..g.cells() {
            assert!((y.u[k] - (lu[k] + gu[k])).abs() < 1e-9);
            assert!((y.v[k] - (lv[k] + gv[k])).abs() < 1e-9);
            assert!((y.p[k] + div[k]).abs() < 1e-11);
        }
    }

    #[test]
    fn residual_of_exact_solution_vanishes() {
        let g = grid(8);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = StaggeredField::random(g, &mut rng);
        let b = apply_stokes(g, &x).unwrap();
        let r = residual(g, &b, &x).unwrap();
        assert!(r.max_abs() < 1e-12 * b.max_abs());
        let zero = StaggeredField::zeros(g);
        assert_eq!(residual(g, &zero, &zero).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn size_mismatch_is_reported() {
        let g8 = grid(8);
        let g4 = grid(4);
        assert!(apply_stokes(g8, &StaggeredField::zeros(g4)).is_err());
        assert!(apply_mass(g8, &[0.0; 16]).is_err());
        assert!(apply_divergence(g8, &[0.0; 64], &[0.0; 16]).is_err());
    }
}
