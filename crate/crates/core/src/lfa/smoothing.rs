use std::f64::consts::PI;

use rayon::prelude::*;

use super::{relaxation_symbol, Frequency};
use crate::error::{Error, Result};
use crate::relaxation::{RelaxParams, RelaxScheme};

/// Samples per axis for reported smoothing factors.
pub const DEFAULT_RESOLUTION: usize = 256;

/// Maximum of the symbol spectral radius over the sampled high frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingReport {
    pub mu: f64,
    pub argmax: Frequency,
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 32 || resolution % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be even and at least 32, got {resolution}"
        )));
    }
    Ok(())
}

/// Nodal samples `θ_k = -π/2 + 2πk/R`, `k = 0..R`, on each axis. Low
/// frequencies are exactly the index pairs with both `k < R/2`, so the
/// classification never depends on rounding of `θ`. For `R` divisible by 4
/// the grid contains `(π/2, π/2)`, `(π, π)` and `(π/2, 0)`.
fn high_samples(resolution: usize) -> impl IndexedParallelIterator<Item = (usize, Frequency)> {
    let step = 2.0 * PI / resolution as f64;
    let half = resolution / 2;
    (0..resolution * resolution).into_par_iter().map(move |idx| {
        let (k2, k1) = (idx / resolution, idx % resolution);
        let theta = Frequency::new(-PI / 2.0 + step * k1 as f64, -PI / 2.0 + step * k2 as f64);
        let low = k1 < half && k2 < half;
        (if low { usize::MAX } else { idx }, theta)
    })
}

/// Max of `f` over sampled high frequencies; ties keep the first sample in
/// row-major order, so the result is independent of the thread schedule.
fn max_over_high<F>(resolution: usize, f: F) -> Result<(f64, Frequency)>
where
    F: Fn(Frequency) -> Result<f64> + Sync,
{
    check_resolution(resolution)?;
    let best = high_samples(resolution)
        .filter(|(idx, _)| *idx != usize::MAX)
        .map(|(idx, theta)| f(theta).map(|v| (v, idx, theta)))
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX, Frequency::new(0.0, 0.0)),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok((best.0, best.2))
}

/// Smoothing factor `max_{θ ∈ T^high} ρ(S̃(θ))` sampled at `resolution²` points.
pub fn smoothing_factor(scheme: RelaxScheme, params: &RelaxParams, resolution: usize) -> Result<SmoothingReport> {
    params.validate()?;
    smoothing_factor_with(resolution, |theta| {
        Ok(relaxation_symbol(scheme, params, theta, 1.0)?.spectral_radius())
    })
}

/// Smoothing factor of an arbitrary per-frequency spectral radius.
pub fn smoothing_factor_with<F>(resolution: usize, radius: F) -> Result<SmoothingReport>
where
    F: Fn(Frequency) -> Result<f64> + Sync,
{
    let (mu, argmax) = max_over_high(resolution, radius)?;
    Ok(SmoothingReport { mu, argmax })
}

/// `(min, max)` of a scalar function over the sampled high frequencies.
pub fn high_frequency_extrema<F>(resolution: usize, f: F) -> Result<(f64, f64)>
where
    F: Fn(Frequency) -> f64 + Sync,
{
    let (max, _) = max_over_high(resolution, |t| Ok(f(t)))?;
    let (neg_min, _) = max_over_high(resolution, |t| Ok(-f(t)))?;
    Ok((-neg_min, max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qdr_quick_resolution() {
        let r = smoothing_factor(RelaxScheme::QDR, &RelaxParams::qdr(), 64).unwrap();
        assert!((r.mu - 1.0 / 3.0).abs() < 2e-3, "{}", r.mu);
    }

    #[test]
    fn qdr_with_large_omega_is_worse() {
        // max(|1 - 0.9·8/9|, |1 - 0.9·16/9|) = 0.6
        let p = RelaxParams { omega: 0.9, ..RelaxParams::qdr() };
        let r = smoothing_factor(RelaxScheme::QDR, &p, 64).unwrap();
        assert!((r.mu - 0.6).abs() < 1e-9, "{}", r.mu);
        assert!((r.argmax.m_r() - 16.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn resolution_is_checked() {
        assert!(smoothing_factor(RelaxScheme::QDR, &RelaxParams::qdr(), 16).is_err());
        assert!(smoothing_factor(RelaxScheme::QDR, &RelaxParams::qdr(), 33).is_err());
    }

    #[test]
    fn m_r_range_on_coarse_sample() {
        let (lo, hi) = high_frequency_extrema(64, |t| t.m_r()).unwrap();
        assert!((lo - 8.0 / 9.0).abs() < 1e-12);
        assert!((hi - 16.0 / 9.0).abs() < 1e-12);
    }
}
