use serde::Serialize;

use super::smatrix::THRESHOLD_EXCLUSION;
use crate::error::{Error, Result};

/// Half-width of the fit window on each side of the threshold.
pub const CUSP_WINDOW: f64 = 0.1;
/// Minimum number of samples per side.
pub const CUSP_MIN_POINTS: usize = 5;
/// Slopes must differ by more than this many standard errors.
pub const CUSP_SIGNIFICANCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspReport {
    pub threshold: f64,
    pub below: LineFit,
    pub above: LineFit,
    pub cusp: bool,
}

/// Least-squares slope with its standard error.
fn fit_line(points: &[(f64, f64)]) -> LineFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    LineFit {
        slope,
        stderr,
        points: points.len(),
    }
}

/// Compares one-sided linear fits of `δ1(E)` just below and just above a threshold.
/// A cusp is declared when the slopes differ by more than ten combined standard errors.
pub fn threshold_cusp_metric(samples: &[(f64, f64)], threshold: f64) -> Result<CuspReport> {
    let side = |below: bool| -> Vec<(f64, f64)> {
        samples
            .iter()
            .copied()
            .filter(|&(e, _)| {
                let d = e - threshold;
                d.abs() <= CUSP_WINDOW && d.abs() >= THRESHOLD_EXCLUSION && (d < 0.0) == below
            })
            .collect()
    };
    let (lo, hi) = (side(true), side(false));
    if lo.len() < CUSP_MIN_POINTS || hi.len() < CUSP_MIN_POINTS {
        return Err(Error::InsufficientData(format!(
            "need {CUSP_MIN_POINTS} points within {CUSP_WINDOW} on each side of {threshold}, got {} below and {} above",
            lo.len(),
            hi.len()
        )));
    }
    let below = fit_line(&lo);
    let above = fit_line(&hi);
    let difference = (below.slope - above.slope).abs();
    let stderr = below.stderr.hypot(above.stderr);
    // exact synthetic data have zero standard error; ignore rounding-level differences
    let floor = 1e-8 * below.slope.abs().max(above.slope.abs());
    Ok(CuspReport {
        threshold,
        below,
        above,
        cusp: difference > (CUSP_SIGNIFICANCE * stderr).max(floor),
    })
}
