use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{branch_sqrt, Sheet};
use crate::error::{Error, Result};
use crate::feshbach::ResonancePole;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    pub det_tolerance: f64,
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Iterates beyond this modulus are treated as divergent.
    pub escape_radius: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            det_tolerance: 1e-13,
            step_tolerance: 1e-13,
            max_iterations: 100,
            escape_radius: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootReport {
    pub pole: ResonancePole,
    pub iterations: usize,
    pub residual: f64,
}

/// Newton search for a zero of `det F̃(k1)` in the lower half `k1` plane, with
/// `k2 = sqrt(k1² − Δ)` continued on `Im k2 > 0`.
pub fn find_det_zero<F>(detf: F, seed: Complex64, delta: f64) -> Result<RootReport>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    find_det_zero_with(detf, seed, delta, &NewtonConfig::default())
}

pub fn find_det_zero_with<F>(
    mut detf: F,
    seed: Complex64,
    delta: f64,
    cfg: &NewtonConfig,
) -> Result<RootReport>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !seed.re.is_finite() || !seed.im.is_finite() {
        return Err(Error::InvalidArgument(format!("seed must be finite, got {seed}")));
    }
    let mut k = seed;
    let mut d = detf(k)?;
    for iteration in 1..=cfg.max_iterations {
        let h = 1e-7 * k.norm().max(1.0);
        let slope = (detf(k + h)? - detf(k - h)?) / (2.0 * h);
        let step = d / slope;
        if !step.re.is_finite() || !step.im.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: d.norm(),
            });
        }
        k -= step;
        if k.norm() > cfg.escape_radius {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: d.norm(),
            });
        }
        d = detf(k)?;
        if d.norm() < cfg.det_tolerance && step.norm() < cfg.step_tolerance {
            if k.im >= 0.0 {
                return Err(Error::WrongSheet { re: k.re, im: k.im });
            }
            let k2 = branch_sqrt(k * k - delta, Sheet::Upper);
            return Ok(RootReport {
                pole: ResonancePole::new(k, k2),
                iterations: iteration,
                residual: d.norm(),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual: d.norm(),
    })
}
