//! Sampled Fourier modes on periodic staggered grids.
//!
//! A complex mode is carried as a pair of real fields (real and imaginary
//! part); every grid operator is real, so it acts on both parts separately.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Frequency;
use crate::grid::{Component, GridSpec, StaggeredField};

/// The discrete frequency `θ = 2π (k₁, k₂) / n`.
pub fn grid_frequency(grid: GridSpec, k1: usize, k2: usize) -> Frequency {
    let n = grid.n() as f64;
    Frequency::new(2.0 * PI * k1 as f64 / n, 2.0 * PI * k2 as f64 / n)
}

/// `exp(i (θ₁ (i + o_x) + θ₂ (j + o_y)))` at sample `(i, j)` of `c`.
pub fn phase(theta: Frequency, c: Component, i: usize, j: usize) -> Complex64 {
    let (ox, oy) = c.offset();
    let arg = theta.theta1 * (i as f64 + ox) + theta.theta2 * (j as f64 + oy);
    Complex64::from_polar(1.0, arg)
}

/// Samples `Σ_c coeffs[c] φ_c` and returns its real and imaginary parts.
pub fn sample_mode(grid: GridSpec, theta: Frequency, coeffs: [Complex64; 3]) -> (StaggeredField, StaggeredField) {
    let mut re = StaggeredField::zeros(grid);
    let mut im = StaggeredField::zeros(grid);
    let n = grid.n();
    for c in Component::ALL {
        let a = coeffs[c.position()];
        for j in 0..n {
            for i in 0..n {
                let z = a * phase(theta, c, i, j);
                let k = grid.idx(i, j);
                re[(c, k)] = z.re;
                im[(c, k)] = z.im;
            }
        }
    }
    (re, im)
}

/// Coefficients of `re + i·im` along the mode `θ` (discrete L² projection).
pub fn mode_coefficients(grid: GridSpec, theta: Frequency, re: &StaggeredField, im: &StaggeredField) -> [Complex64; 3] {
    let n = grid.n();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for c in Component::ALL {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                let k = grid.idx(i, j);
                acc += Complex64::new(re[(c, k)], im[(c, k)]) * phase(theta, c, i, j).conj();
            }
        }
        out[c.position()] = acc / grid.cells() as f64;
    }
    out
}

/// Largest deviation of `re + i·im` from the pure mode with `coeffs`.
pub fn mode_deviation(
    grid: GridSpec,
    theta: Frequency,
    coeffs: [Complex64; 3],
    re: &StaggeredField,
    im: &StaggeredField,
) -> f64 {
    let (er, ei) = sample_mode(grid, theta, coeffs);
    let mut worst = 0.0f64;
    for c in Component::ALL {
        for k in 0..grid.cells() {
            let d = Complex64::new(re[(c, k)] - er[(c, k)], im[(c, k)] - ei[(c, k)]);
            worst = worst.max(d.norm());
        }
    }
    worst
}
