//! Closed-form branch analysis of mass-based σ-Uzawa.
//!
//! The eigenvalues of `M̃_U⁻¹ L̃` are `λ* = m_r/α` and the two roots of
//! `d(λ) = λ² - (1+σ) m_r/α · λ + σ m_r/α`. Whether those roots are real or
//! a complex pair is decided by `m_r` against `m₂ = 4ασ/(1+σ)²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::relaxation::RelaxParams;

const ETA_MIN: f64 = 8.0 / 9.0;
const ETA_MAX: f64 = 16.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UzawaBranch {
    /// `m_r < m₂`: `λ₁, λ₂` are complex conjugates.
    Complex,
    /// `m_r ≥ m₂`: both roots real.
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UzawaDiagnostics {
    pub m_r: f64,
    pub m2: f64,
    pub lambda_star: f64,
    /// Roots of `d(λ)`, `+` branch first.
    pub d_roots: [Complex64; 2],
    /// `Υ(m_r) = |1 - ω λ₁|` on the complex branch, from `Υ² = 1 + (ω/α)(ωσ - σ - 1) m_r`.
    pub upsilon: f64,
    /// `χ±(m_r)`, defined on the real branch only.
    pub chi_plus: Option<f64>,
    pub chi_minus: Option<f64>,
    /// Smoothing factor of the real-root modes, absent when `m₂ > 16/9`.
    pub mu_r: Option<f64>,
    /// Smoothing factor of the complex modes, `Υ(8/9)`; absent when `m₂ < 8/9`.
    pub mu_c: Option<f64>,
    /// `x = (1+σ)ω/α`
    pub x: f64,
    /// `y = ω²σ/α`
    pub y: f64,
    pub branch: UzawaBranch,
}

fn upsilon_sq(params: &RelaxParams, m_r: f64) -> f64 {
    let RelaxParams {
        omega, alpha, sigma, ..
    } = *params;
    1.0 + omega / alpha * (omega * sigma - sigma - 1.0) * m_r
}

/// Fills every diagnostic for one value of `m_r ∈ [8/9, 16/9]`.
pub fn uzawa_branches(params: &RelaxParams, m_r: f64) -> Result<UzawaDiagnostics> {
    params.validate()?;
    if !(ETA_MIN - 1e-12..=ETA_MAX + 1e-12).contains(&m_r) {
        return Err(Error::InvalidParameter(format!(
            "m_r = {m_r} lies outside [8/9, 16/9]"
        )));
    }
    let RelaxParams {
        omega, alpha, sigma, ..
    } = *params;

    let m2 = 4.0 * alpha * sigma / (1.0 + sigma).powi(2);
    let x = (1.0 + sigma) * omega / alpha;
    let y = omega * omega * sigma / alpha;

    let root = Complex64::new(1.0 - m2 / m_r, 0.0).sqrt();
    let lead = (1.0 + sigma) * m_r / (2.0 * alpha);
    let d_roots = [lead * (1.0 + root), lead * (1.0 - root)];

    let branch = if m_r < m2 {
        UzawaBranch::Complex
    } else {
        UzawaBranch::Real
    };
    let (chi_plus, chi_minus) = match branch {
        UzawaBranch::Real => {
            let s = (1.0 - m2 / m_r).sqrt();
            (Some(0.5 * m_r * (1.0 + s)), Some(0.5 * m_r * (1.0 - s)))
        }
        UzawaBranch::Complex => (None, None),
    };

    let mu_c = (m2 >= ETA_MIN).then(|| upsilon_sq(params, ETA_MIN).max(0.0).sqrt());
    let mu_r = (m2 <= ETA_MAX).then(|| {
        let s = (1.0 - 9.0 * m2 / 16.0).max(0.0).sqrt();
        let chi1 = ETA_MIN * (1.0 + s);
        let chi2 = ETA_MIN * (1.0 - s);
        if x >= 9.0 / 8.0 {
            x * chi1 - 1.0
        } else {
            1.0 - x * chi2
        }
    });

    Ok(UzawaDiagnostics {
        m_r,
        m2,
        lambda_star: m_r / alpha,
        d_roots,
        upsilon: upsilon_sq(params, m_r).max(0.0).sqrt(),
        chi_plus,
        chi_minus,
        mu_r,
        mu_c,
        x,
        y,
        branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_sit_on_the_optimum() {
        let p = RelaxParams::quzawa();
        let d = uzawa_branches(&p, 1.0).unwrap();
        assert!((d.x - 9.0 / 8.0).abs() < 1e-15);
        assert!((d.y - 3.0 / 8.0).abs() < 1e-15);
        assert!((d.m2 - 32.0 / 27.0).abs() < 1e-15);
        let target = (1.0f64 / 3.0).sqrt();
        assert!((d.mu_r.unwrap() - target).abs() < 1e-12);
        assert!((d.mu_c.unwrap() - target).abs() < 1e-12);
        assert!((d.m2 - 4.0 * d.y / (d.x * d.x)).abs() < 1e-14);
    }

    #[test]
    fn vieta_relations() {
        let p = RelaxParams::new(0.9, 1.1, 0.7, 1.0).unwrap();
        for k in 0..=20 {
            let m_r = ETA_MIN + (ETA_MAX - ETA_MIN) * k as f64 / 20.0;
            let d = uzawa_branches(&p, m_r).unwrap();
            let sum = d.d_roots[0] + d.d_roots[1];
            let prod = d.d_roots[0] * d.d_roots[1];
            assert!((sum - Complex64::new((1.0 + p.sigma) * m_r / p.alpha, 0.0)).norm() < 1e-12);
            assert!((prod - Complex64::new(m_r * p.sigma / p.alpha, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn branch_switches_at_m2() {
        let p = RelaxParams::quzawa();
        let m2 = 32.0 / 27.0;
        let below = uzawa_branches(&p, m2 - 1e-3).unwrap();
        let above = uzawa_branches(&p, m2 + 1e-3).unwrap();
        assert_eq!(below.branch, UzawaBranch::Complex);
        assert_eq!(above.branch, UzawaBranch::Real);
        assert!(below.d_roots[0].im.abs() > 0.0);
        assert!(above.chi_plus.is_some());
        // on the complex branch |1 - ω λ₁| = Υ
        let one = Complex64::new(1.0, 0.0);
        assert!(((one - p.omega * below.d_roots[0]).norm() - below.upsilon).abs() < 1e-12);
    }

    #[test]
    fn chi_monotonicity_on_real_branch() {
        let p = RelaxParams::quzawa();
        let m2 = 32.0 / 27.0;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=50 {
            let m_r = m2 + (ETA_MAX - m2) * k as f64 / 50.0;
            let d = uzawa_branches(&p, m_r).unwrap();
            let cur = (d.chi_plus.unwrap(), d.chi_minus.unwrap());
            if let Some((cp, cm)) = prev {
                assert!(cur.0 >= cp - 1e-15);
                assert!(cur.1 <= cm + 1e-15);
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn small_sigma_limit() {
        let p = RelaxParams::new(1.0, 4.0 / 3.0, 1e-10, 1.0).unwrap();
        let d = uzawa_branches(&p, 1.2).unwrap();
        assert!(d.m2 < 1e-9);
        assert_eq!(d.branch, UzawaBranch::Real);
        assert!(d.d_roots.iter().all(|z| z.im == 0.0));
        assert!((d.d_roots[0] * d.d_roots[1]).norm() < 1e-9);
    }

    #[test]
    fn out_of_range_m_r_is_rejected() {
        assert!(uzawa_branches(&RelaxParams::quzawa(), 0.5).is_err());
        assert!(uzawa_branches(&RelaxParams::quzawa(), 1.9).is_err());
    }
}
