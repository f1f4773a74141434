//! Block relaxation sweeps for the MAC Stokes system.
//!
//! Every sweep computes `r = b - L x`, an update `δx = N r` from a scheme
//! specific approximate inverse, and returns `x + ω δx`. The error
//! propagation is therefore `S = I - ω N L`.
//!
//! The mass-based schemes replace `C⁻¹` (the inverse of the velocity
//! Laplacian approximation) by the bilinear mass stencil `Q` on each
//! velocity component. The baselines use `C = diag(A) = (4/h²) I`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, StaggeredField};
use crate::stencil;

/// Which relaxation scheme a sweep applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelaxScheme {
    /// Mass-based distributive relaxation.
    QDR,
    /// Mass-based Braess–Sarazin with an exact Schur complement solve.
    QBSRExact,
    /// Mass-based Braess–Sarazin with one weighted-Jacobi Schur step.
    QIBSR,
    /// Mass-based σ-Uzawa.
    QSigmaUzawa,
    /// Distributive weighted Jacobi, `C = diag(A)`.
    DWJBaseline,
    /// Inexact Braess–Sarazin, `C = diag(A)`.
    DiagIBSRBaseline,
    /// σ-Uzawa, `C = diag(A)`.
    DiagSigmaUzawaBaseline,
}

/// Control flow shared by a group of schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Distributive,
    BraessSarazin(SchurSolve),
    Uzawa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurSolve {
    Exact,
    Jacobi,
}

/// The approximation of `C⁻¹` applied to each velocity component (and, for
/// the distributive schemes, to the transformed pressure equation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityInverse {
    /// 9-point bilinear mass stencil `Q`.
    Mass,
    /// `(h²/4) I`, the inverse of the Laplacian diagonal.
    Diagonal,
}

impl VelocityInverse {
    pub fn apply_into(self, grid: GridSpec, w: &[f64], out: &mut [f64]) {
        match self {
            VelocityInverse::Mass => stencil::mass_into(grid, w, out),
            VelocityInverse::Diagonal => {
                let s = 0.25 * grid.h() * grid.h();
                out.iter_mut().zip(w).for_each(|(o, x)| *o = s * x);
            }
        }
    }

    /// Fourier symbol of the approximate inverse at frequency `θ`.
    pub fn symbol(self, theta1: f64, theta2: f64, h: f64) -> f64 {
        match self {
            VelocityInverse::Mass => h * h * (2.0 + theta1.cos()) * (2.0 + theta2.cos()) / 9.0,
            VelocityInverse::Diagonal => 0.25 * h * h,
        }
    }

    /// The (constant, h-independent) diagonal of `B C⁻¹ Bᵀ`.
    ///
    /// A cell couples to its two u-edges, which are horizontal neighbours of
    /// each other, and likewise its two v-edges: per component the diagonal
    /// is `(c₀ + c₀ - 2 c₁) / h²` with `c₀` the center and `c₁` the axial
    /// neighbour weight of the stencil.
    pub fn schur_diagonal(self) -> f64 {
        let (c0, c1) = match self {
            VelocityInverse::Mass => (16.0 / 36.0, 4.0 / 36.0),
            VelocityInverse::Diagonal => (0.25, 0.0),
        };
        2.0 * (2.0 * c0 - 2.0 * c1)
    }
}

impl RelaxScheme {
    pub const ALL: [RelaxScheme; 7] = [
        RelaxScheme::QDR,
        RelaxScheme::QBSRExact,
        RelaxScheme::QIBSR,
        RelaxScheme::QSigmaUzawa,
        RelaxScheme::DWJBaseline,
        RelaxScheme::DiagIBSRBaseline,
        RelaxScheme::DiagSigmaUzawaBaseline,
    ];

    pub fn family(self) -> Family {
        match self {
            RelaxScheme::QDR | RelaxScheme::DWJBaseline => Family::Distributive,
            RelaxScheme::QBSRExact => Family::BraessSarazin(SchurSolve::Exact),
            RelaxScheme::QIBSR | RelaxScheme::DiagIBSRBaseline => {
                Family::BraessSarazin(SchurSolve::Jacobi)
            }
            RelaxScheme::QSigmaUzawa | RelaxScheme::DiagSigmaUzawaBaseline => Family::Uzawa,
        }
    }

    pub fn inverse(self) -> VelocityInverse {
        if self.is_baseline() {
            VelocityInverse::Diagonal
        } else {
            VelocityInverse::Mass
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(
            self,
            RelaxScheme::DWJBaseline
                | RelaxScheme::DiagIBSRBaseline
                | RelaxScheme::DiagSigmaUzawaBaseline
        )
    }

    pub fn tag(self) -> &'static str {
        match self {
            RelaxScheme::QDR => "q-dr",
            RelaxScheme::QBSRExact => "q-bsr",
            RelaxScheme::QIBSR => "q-ibsr",
            RelaxScheme::QSigmaUzawa => "q-uzawa",
            RelaxScheme::DWJBaseline => "dwj",
            RelaxScheme::DiagIBSRBaseline => "diag-ibsr",
            RelaxScheme::DiagSigmaUzawaBaseline => "diag-uzawa",
        }
    }

    /// Preset parameters.
    pub fn default_params(self) -> RelaxParams {
        match self {
            RelaxScheme::QDR => RelaxParams::qdr(),
            RelaxScheme::QBSRExact => RelaxParams::qbsr(),
            RelaxScheme::QIBSR => RelaxParams::qibsr(),
            RelaxScheme::QSigmaUzawa => RelaxParams::quzawa(),
            RelaxScheme::DWJBaseline => RelaxParams::dwj(),
            RelaxScheme::DiagIBSRBaseline => RelaxParams::diag_ibsr(),
            RelaxScheme::DiagSigmaUzawaBaseline => RelaxParams::diag_uzawa(),
        }
    }

    /// The optimal smoothing factor known in closed form for the scheme.
    pub fn optimal_smoothing_factor(self) -> f64 {
        match self {
            RelaxScheme::QDR | RelaxScheme::QBSRExact | RelaxScheme::QIBSR => 1.0 / 3.0,
            RelaxScheme::QSigmaUzawa => (1.0f64 / 3.0).sqrt(),
            RelaxScheme::DWJBaseline | RelaxScheme::DiagIBSRBaseline => 0.6,
            RelaxScheme::DiagSigmaUzawaBaseline => 0.6f64.sqrt(),
        }
    }
}

impl fmt::Display for RelaxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RelaxScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let scheme = match key.as_str() {
            "q-dr" | "qdr" => RelaxScheme::QDR,
            "q-bsr" | "qbsr" | "q-bsr-exact" => RelaxScheme::QBSRExact,
            "q-ibsr" | "qibsr" => RelaxScheme::QIBSR,
            "q-uzawa" | "q-sigma-uzawa" | "quzawa" => RelaxScheme::QSigmaUzawa,
            "dwj" => RelaxScheme::DWJBaseline,
            "diag-ibsr" | "ibsr" => RelaxScheme::DiagIBSRBaseline,
            "diag-uzawa" | "diag-sigma-uzawa" | "sigma-uzawa" => {
                RelaxScheme::DiagSigmaUzawaBaseline
            }
            _ => return Err(Error::InvalidParameter(format!("unknown scheme `{s}`"))),
        };
        Ok(scheme)
    }
}

/// Relaxation parameters. Entries a scheme does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxParams {
    /// Outer damping `ω`.
    pub omega: f64,
    /// Scaling `α` of the velocity block.
    pub alpha: f64,
    /// Uzawa Schur scaling, `D = σ⁻¹ I`.
    pub sigma: f64,
    /// Weight of the Jacobi step on the Schur complement.
    pub omega_j: f64,
}

impl RelaxParams {
    pub fn new(omega: f64, alpha: f64, sigma: f64, omega_j: f64) -> Result<Self> {
        let p = Self {
            omega,
            alpha,
            sigma,
            omega_j,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("omega", self.omega),
            ("alpha", self.alpha),
            ("sigma", self.sigma),
            ("omega_j", self.omega_j),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub const fn qdr() -> Self {
        Self {
            omega: 0.75,
            alpha: 1.0,
            sigma: 1.0,
            omega_j: 1.0,
        }
    }

    pub const fn qbsr() -> Self {
        Self {
            omega: 0.75,
            alpha: 1.0,
            sigma: 1.0,
            omega_j: 1.0,
        }
    }

    pub const fn qibsr() -> Self {
        Self {
            omega: 0.75 * 1.4,
            alpha: 1.4,
            sigma: 1.0,
            omega_j: 1.0,
        }
    }

    /// `ω = 1, α = 4/3, σ = 1/2`, which satisfies both optimality relations.
    pub const fn quzawa() -> Self {
        Self {
            omega: 1.0,
            alpha: 4.0 / 3.0,
            sigma: 0.5,
            omega_j: 1.0,
        }
    }

    /// The alternative assignment `α = 1, ω = 4/3, σ = 1/2`.
    pub const fn quzawa_swapped() -> Self {
        Self {
            omega: 4.0 / 3.0,
            alpha: 1.0,
            sigma: 0.5,
            omega_j: 1.0,
        }
    }

    /// `ω / α = 4/5` balances `1 - (ω/α) m` at `m = 1/2` and `m = 2`.
    pub const fn dwj() -> Self {
        Self {
            omega: 0.8,
            alpha: 1.0,
            sigma: 1.0,
            omega_j: 1.0,
        }
    }

    pub const fn diag_ibsr() -> Self {
        Self {
            omega: 1.0,
            alpha: 1.25,
            sigma: 1.0,
            omega_j: 0.8,
        }
    }

    /// `(1+σ)ω/α = 1` and `ω²σ/α = 1/5`.
    pub const fn diag_uzawa() -> Self {
        Self {
            omega: 1.0,
            alpha: 1.25,
            sigma: 0.25,
            omega_j: 1.0,
        }
    }

    /// Mass-based σ-Uzawa parameters on the optimal manifold for a given `ω`:
    /// `α = 8ω²/(3(3ω-1))`, `σ = 1/(3ω-1)`.
    pub fn quzawa_optimal(omega: f64) -> Result<Self> {
        if omega <= 1.0 / 3.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must exceed 1/3 on the optimal manifold, got {omega}"
            )));
        }
        let d = 3.0 * omega - 1.0;
        Self::new(omega, 8.0 * omega * omega / (3.0 * d), 1.0 / d, 1.0)
    }
}

/// A relaxation scheme bound to its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoother {
    pub scheme: RelaxScheme,
    pub params: RelaxParams,
    /// Remove the constant mode from each component after every sweep.
    pub project_mean: bool,
}

/// Tolerance and cap of the exact Schur complement solve.
const SCHUR_RTOL: f64 = 1e-12;
const SCHUR_CAP_FACTOR: usize = 10;

impl Smoother {
    pub fn new(scheme: RelaxScheme, params: RelaxParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            scheme,
            params,
            project_mean: true,
        })
    }

    pub fn preset(scheme: RelaxScheme) -> Self {
        Self {
            scheme,
            params: scheme.default_params(),
            project_mean: true,
        }
    }

    pub fn without_projection(mut self) -> Self {
        self.project_mean = false;
        self
    }

    /// The update `δx = N r` for a given residual.
    pub fn correction(&self, grid: GridSpec, r: &StaggeredField) -> Result<StaggeredField> {
        let inv = self.scheme.inverse();
        let RelaxParams {
            alpha,
            sigma,
            omega_j,
            ..
        } = self.params;
        let len = grid.cells();
        let mut d = StaggeredField::zeros(grid);
        let mut tmp = vec![0.0; len];
        match self.scheme.family() {
            Family::Distributive => {
                // δÛ = (αC)⁻¹ r_U
                inv.apply_into(grid, &r.u, &mut d.u);
                inv.apply_into(grid, &r.v, &mut d.v);
                d.u.iter_mut().chain(d.v.iter_mut()).for_each(|x| *x /= alpha);
                // δp̂ = (αE)⁻¹ (r_p - B δÛ), with B = -div
                stencil::divergence_into(grid, &d.u, &d.v, &mut tmp);
                tmp.iter_mut().zip(&r.p).for_each(|(t, rp)| *t = (rp + *t) / alpha);
                let mut p_hat = vec![0.0; len];
                inv.apply_into(grid, &tmp, &mut p_hat);
                // δU = δÛ + Bᵀ δp̂,  δp = -A_p δp̂
                let mut gu = vec![0.0; len];
                let mut gv = vec![0.0; len];
                stencil::gradient_into(grid, &p_hat, &mut gu, &mut gv);
                d.u.iter_mut().zip(&gu).for_each(|(a, g)| *a += g);
                d.v.iter_mut().zip(&gv).for_each(|(a, g)| *a += g);
                stencil::neg_laplacian_into(grid, &p_hat, &mut d.p);
                d.p.iter_mut().for_each(|x| *x = -*x);
            }
            Family::BraessSarazin(solve) => {
                let mut cu = vec![0.0; len];
                let mut cv = vec![0.0; len];
                inv.apply_into(grid, &r.u, &mut cu);
                inv.apply_into(grid, &r.v, &mut cv);
                // rhs = B C⁻¹ r_U - α r_p
                let mut rhs = vec![0.0; len];
                stencil::divergence_into(grid, &cu, &cv, &mut rhs);
                rhs.iter_mut().zip(&r.p).for_each(|(x, rp)| *x = -*x - alpha * rp);
                match solve {
                    SchurSolve::Exact => {
                        d.p = schur_solve(grid, inv, &rhs)?;
                    }
                    SchurSolve::Jacobi => {
                        let w = omega_j / inv.schur_diagonal();
                        d.p.iter_mut().zip(&rhs).for_each(|(x, b)| *x = w * b);
                    }
                }
                // δU = α⁻¹ C⁻¹ (r_U - Bᵀ δp)
                let mut gu = vec![0.0; len];
                let mut gv = vec![0.0; len];
                stencil::gradient_into(grid, &d.p, &mut gu, &mut gv);
                gu.iter_mut().zip(&r.u).for_each(|(g, ru)| *g = ru - *g);
                gv.iter_mut().zip(&r.v).for_each(|(g, rv)| *g = rv - *g);
                inv.apply_into(grid, &gu, &mut d.u);
                inv.apply_into(grid, &gv, &mut d.v);
                d.u.iter_mut().chain(d.v.iter_mut()).for_each(|x| *x /= alpha);
            }
            Family::Uzawa => {
                inv.apply_into(grid, &r.u, &mut d.u);
                inv.apply_into(grid, &r.v, &mut d.v);
                d.u.iter_mut().chain(d.v.iter_mut()).for_each(|x| *x /= alpha);
                // δp = σ (B δU - r_p)
                stencil::divergence_into(grid, &d.u, &d.v, &mut tmp);
                d.p.iter_mut()
                    .zip(tmp.iter().zip(&r.p))
                    .for_each(|(x, (div, rp))| *x = sigma * (-div - rp));
            }
        }
        Ok(d)
    }

    /// One sweep in place.
    pub fn sweep(&self, grid: GridSpec, b: &StaggeredField, x: &mut StaggeredField) -> Result<()> {
        b.check(grid)?;
        x.check(grid)?;
        let mut r = StaggeredField::zeros(grid);
        stencil::residual_into(grid, b, x, &mut r);
        let d = self.correction(grid, &r)?;
        x.axpy(self.params.omega, &d);
        if self.project_mean {
            x.remove_mean();
        }
        Ok(())
    }

    /// One sweep returning the new iterate.
    pub fn apply(&self, grid: GridSpec, b: &StaggeredField, x: &StaggeredField) -> Result<StaggeredField> {
        let mut out = x.clone();
        self.sweep(grid, b, &mut out)?;
        Ok(out)
    }
}

/// Solves `B C⁻¹ Bᵀ q = rhs` by conjugate gradients on the mean-free subspace.
fn schur_solve(grid: GridSpec, inv: VelocityInverse, rhs: &[f64]) -> Result<Vec<f64>> {
    let len = grid.cells();
    let mut b = rhs.to_vec();
    grid::subtract_mean(&mut b);
    let b_norm = grid::dot(&b, &b).sqrt();
    let mut q = vec![0.0; len];
    if b_norm == 0.0 {
        return Ok(q);
    }

    let mut gu = vec![0.0; len];
    let mut gv = vec![0.0; len];
    let mut cu = vec![0.0; len];
    let mut cv = vec![0.0; len];
    let mut apply = |s: &[f64], out: &mut [f64]| {
        stencil::gradient_into(grid, s, &mut gu, &mut gv);
        inv.apply_into(grid, &gu, &mut cu);
        inv.apply_into(grid, &gv, &mut cv);
        stencil::divergence_into(grid, &cu, &cv, out);
        out.iter_mut().for_each(|x| *x = -*x);
    };

    let mut r = b;
    let mut dir = r.clone();
    let mut ad = vec![0.0; len];
    let mut rr = grid::dot(&r, &r);
    let cap = SCHUR_CAP_FACTOR * len;
    for it in 0..cap {
        if rr.sqrt() <= SCHUR_RTOL * b_norm {
            grid::subtract_mean(&mut q);
            return Ok(q);
        }
        apply(&dir, &mut ad);
        let step = rr / grid::dot(&dir, &ad);
        for k in 0..len {
            q[k] += step * dir[k];
            r[k] -= step * ad[k];
        }
        let rr_new = grid::dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..len {
            dir[k] = r[k] + beta * dir[k];
        }
        if !rr.is_finite() {
            return Err(Error::InnerSolveDiverged {
                iterations: it + 1,
                residual: f64::NAN,
            });
        }
    }
    Err(Error::InnerSolveDiverged {
        iterations: cap,
        residual: rr.sqrt() / b_norm,
    })
}

fn sweep_with(
    scheme: RelaxScheme,
    grid: GridSpec,
    params: RelaxParams,
    b: &StaggeredField,
    x: &StaggeredField,
) -> Result<StaggeredField> {
    Smoother::new(scheme, params)?.apply(grid, b, x)
}

/// Mass-based distributive relaxation (`α` is taken from `params`; presets use 1).
pub fn sweep_qdr(grid: GridSpec, params: RelaxParams, b: &StaggeredField, x: &StaggeredField) -> Result<StaggeredField> {
    sweep_with(RelaxScheme::QDR, grid, params, b, x)
}

pub fn sweep_qbsr_exact(grid: GridSpec, params: RelaxParams, b: &StaggeredField, x: &StaggeredField) -> Result<StaggeredField> {
    sweep_with(RelaxScheme::QBSRExact, grid, params, b, x)
}

pub fn sweep_qibsr(grid: GridSpec, params: RelaxParams, b: &StaggeredField, x: &StaggeredField) -> Result<StaggeredField> {
    sweep_with(RelaxScheme::QIBSR, grid, params, b, x)
}

pub fn sweep_quzawa(grid: GridSpec, params: RelaxParams, b: &StaggeredField, x: &StaggeredField) -> Result<StaggeredField> {
    sweep_with(RelaxScheme::QSigmaUzawa, grid, params, b, x)
}

pub fn sweep_baseline(
    grid: GridSpec,
    scheme: RelaxScheme,
    params: RelaxParams,
    b: &StaggeredField,
    x: &StaggeredField,
) -> Result<StaggeredField> {
    if !scheme.is_baseline() {
        return Err(Error::InvalidParameter(format!("{scheme} is not a baseline scheme")));
    }
    sweep_with(scheme, grid, params, b, x)
}
