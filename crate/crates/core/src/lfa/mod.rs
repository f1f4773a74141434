//! Local Fourier analysis of the MAC Stokes operator and its smoothers.
//!
//! A Fourier mode of frequency `θ = (θ₁, θ₂)` is sampled on each staggered
//! component at that component's own physical position,
//! `φ(x, y) = exp(i (θ₁ x + θ₂ y) / h)`. Every operator on a periodic grid
//! maps the three-component coefficient vector of such a mode by a 3×3
//! complex matrix, its symbol.

mod eig;
pub mod modes;
mod optimize;
mod smoothing;
mod uzawa;

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::relaxation::{Family, RelaxParams, RelaxScheme, SchurSolve};

pub use eig::{eig3, spectral_radius};
pub use optimize::{optimize_params, ParamRange, SearchBox, SearchResult};
pub use smoothing::{
    high_frequency_extrema, smoothing_factor, smoothing_factor_with, SmoothingReport,
    DEFAULT_RESOLUTION,
};
pub use uzawa::{uzawa_branches, UzawaBranch, UzawaDiagnostics};

pub type Symbol3 = Matrix3<Complex64>;

/// A frequency pair in `[-π/2, 3π/2)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub theta1: f64,
    pub theta2: f64,
}

impl Frequency {
    pub const fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    fn in_low_interval(t: f64) -> bool {
        (-PI / 2.0..PI / 2.0).contains(&t)
    }

    fn in_full_interval(t: f64) -> bool {
        (-PI / 2.0..3.0 * PI / 2.0).contains(&t)
    }

    /// `θ ∈ [-π/2, π/2)²`.
    pub fn is_low(&self) -> bool {
        Self::in_low_interval(self.theta1) && Self::in_low_interval(self.theta2)
    }

    /// `θ ∈ [-π/2, 3π/2)² \ [-π/2, π/2)²`.
    pub fn is_high(&self) -> bool {
        Self::in_full_interval(self.theta1) && Self::in_full_interval(self.theta2) && !self.is_low()
    }

    /// `m(θ) = sin²(θ₁/2) + sin²(θ₂/2)`.
    pub fn m(&self) -> f64 {
        (self.theta1 / 2.0).sin().powi(2) + (self.theta2 / 2.0).sin().powi(2)
    }

    /// `m_s(θ) = 9 / ((2 + cos θ₁)(2 + cos θ₂))`, the scaled inverse mass symbol.
    pub fn m_s(&self) -> f64 {
        9.0 / ((2.0 + self.theta1.cos()) * (2.0 + self.theta2.cos()))
    }

    /// `m_r(θ) = 4 m / m_s`, the symbol of `Q A_s`.
    pub fn m_r(&self) -> f64 {
        4.0 * self.m() / self.m_s()
    }
}

/// A 3×3 symbol together with the scalar channels of its frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqSymbol {
    pub entries: Symbol3,
    pub m: f64,
    pub m_s: f64,
    pub m_r: f64,
}

impl FreqSymbol {
    fn new(theta: Frequency, entries: Symbol3) -> Self {
        Self {
            entries,
            m: theta.m(),
            m_s: theta.m_s(),
            m_r: theta.m_r(),
        }
    }

    pub fn eigenvalues(&self) -> [Complex64; 3] {
        eig3(&self.entries)
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.entries)
    }
}

/// Scalar building blocks of every symbol at one frequency.
#[derive(Debug, Clone, Copy)]
struct Blocks {
    /// symbol of `B` (row): `-2i sin(θ_k/2) / h`
    b: [Complex64; 2],
    /// symbol of `A = -Δ_h`
    a: f64,
}

impl Blocks {
    fn new(theta: Frequency, h: f64) -> Self {
        let s1 = (theta.theta1 / 2.0).sin();
        let s2 = (theta.theta2 / 2.0).sin();
        Self {
            b: [Complex64::new(0.0, -2.0 * s1 / h), Complex64::new(0.0, -2.0 * s2 / h)],
            a: 4.0 * theta.m() / (h * h),
        }
    }

    /// symbol of `Bᵀ = grad` (column), the conjugate of `B`.
    fn bt(&self) -> [Complex64; 2] {
        [self.b[0].conj(), self.b[1].conj()]
    }
}

/// Symbol of the staggered Stokes operator `L_h`.
pub fn stokes_symbol(theta: Frequency, h: f64) -> FreqSymbol {
    let blk = Blocks::new(theta, h);
    let z = Complex64::new(0.0, 0.0);
    let a = Complex64::new(blk.a, 0.0);
    let bt = blk.bt();
    let entries = Matrix3::new(a, z, bt[0], z, a, bt[1], blk.b[0], blk.b[1], z);
    FreqSymbol::new(theta, entries)
}

/// Symbol of the update map `N` (`δx = N r`) of one sweep.
pub fn update_symbol(scheme: RelaxScheme, params: &RelaxParams, theta: Frequency, h: f64) -> Result<Symbol3> {
    if theta.m() < 1e-16 {
        return Err(Error::SingularFrequency(theta.theta1, theta.theta2));
    }
    let blk = Blocks::new(theta, h);
    let c = scheme.inverse().symbol(theta.theta1, theta.theta2, h);
    let RelaxParams {
        alpha,
        sigma,
        omega_j,
        ..
    } = *params;
    let b = blk.b;
    let bt = blk.bt();
    let apply = |r: [Complex64; 3]| -> [Complex64; 3] {
        match scheme.family() {
            Family::Distributive => {
                let du_hat = [r[0] * c / alpha, r[1] * c / alpha];
                let dp_hat = (r[2] - (b[0] * du_hat[0] + b[1] * du_hat[1])) * c / alpha;
                [
                    du_hat[0] + bt[0] * dp_hat,
                    du_hat[1] + bt[1] * dp_hat,
                    -dp_hat * blk.a,
                ]
            }
            Family::BraessSarazin(solve) => {
                let rhs = (b[0] * r[0] + b[1] * r[1]) * c - r[2] * alpha;
                let dp = match solve {
                    // B C⁻¹ Bᵀ = c |b|² = c A
                    SchurSolve::Exact => rhs / (c * blk.a),
                    SchurSolve::Jacobi => rhs * (omega_j / scheme.inverse().schur_diagonal()),
                };
                [
                    (r[0] - bt[0] * dp) * c / alpha,
                    (r[1] - bt[1] * dp) * c / alpha,
                    dp,
                ]
            }
            Family::Uzawa => {
                let du = [r[0] * c / alpha, r[1] * c / alpha];
                let dp = (b[0] * du[0] + b[1] * du[1] - r[2]) * sigma;
                [du[0], du[1], dp]
            }
        }
    };
    let mut n = Matrix3::zeros();
    for col in 0..3 {
        let mut e = [Complex64::new(0.0, 0.0); 3];
        e[col] = Complex64::new(1.0, 0.0);
        let out = apply(e);
        for row in 0..3 {
            n[(row, col)] = out[row];
        }
    }
    Ok(n)
}

/// Error-propagation symbol `S̃ = I - ω Ñ L̃` of one sweep.
pub fn relaxation_symbol(scheme: RelaxScheme, params: &RelaxParams, theta: Frequency, h: f64) -> Result<FreqSymbol> {
    let n = update_symbol(scheme, params, theta, h)?;
    let l = stokes_symbol(theta, h).entries;
    let s = Matrix3::identity() - n * l * Complex64::new(params.omega, 0.0);
    Ok(FreqSymbol::new(theta, s))
}

/// Symbol of the mass-based Braess–Sarazin preconditioner `M̃_B` (`α = 1`).
pub fn braess_sarazin_preconditioner_symbol(theta: Frequency, h: f64) -> Symbol3 {
    let mut m = stokes_symbol(theta, h).entries;
    let diag = Complex64::new(theta.m_s() / (h * h), 0.0);
    m[(0, 0)] = diag;
    m[(1, 1)] = diag;
    m
}

/// Symbol of the mass-based σ-Uzawa preconditioner `M̃_U`.
pub fn uzawa_preconditioner_symbol(theta: Frequency, h: f64, alpha: f64, sigma: f64) -> Symbol3 {
    let l = stokes_symbol(theta, h).entries;
    let z = Complex64::new(0.0, 0.0);
    let d = Complex64::new(alpha * theta.m_s() / (h * h), 0.0);
    Matrix3::new(d, z, z, z, d, z, l[(2, 0)], l[(2, 1)], Complex64::new(-1.0 / sigma, 0.0))
}
