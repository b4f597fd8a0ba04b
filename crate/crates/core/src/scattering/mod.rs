//! S-matrix construction, eigenphase decomposition, continuity unwrapping, resonance
//! root finding and threshold-cusp detection.

mod cusp;
mod eigenphase;
mod roots;
mod smatrix;
mod unwrap;

pub use cusp::{threshold_cusp_metric, CuspReport, LineFit, CUSP_MIN_POINTS, CUSP_SIGNIFICANCE, CUSP_WINDOW};
pub use eigenphase::{eigenphases, single_channel_phase, EigenphaseSet, UNITARITY_TOLERANCE};
pub use roots::{find_det_zero, find_det_zero_with, NewtonConfig, RootReport};
pub use smatrix::{s_matrix, s_matrix_with, SMatrix, THRESHOLD_EXCLUSION};
pub use unwrap::{unwrap_scan, PhaseSample};

use crate::channels::{ChannelMomenta, ChannelSet};
use crate::error::{Error, Result};
use crate::source::JostSource;

/// Physical S-matrix at real energy `energy` from any Jost source.
pub fn s_matrix_at(source: &dyn JostSource, channels: &ChannelSet, energy: f64) -> Result<SMatrix> {
    let momenta = ChannelMomenta::physical(channels, energy);
    let f_plus = source.jost(&momenta)?;
    let f_minus = source.jost_reflected(&momenta)?;
    s_matrix(&f_plus, &f_minus, channels)
}

/// Raw (not yet unwrapped) phase information at one energy of a two-channel model.
pub fn phase_sample(s: &SMatrix) -> Result<PhaseSample> {
    match s.dim() {
        1 => Ok(PhaseSample::Single {
            energy: s.energy,
            delta1: single_channel_phase(s)?,
        }),
        2 => Ok(PhaseSample::Coupled(eigenphases(s)?)),
        n => Err(Error::Unsupported(format!(
            "phase decomposition for {n} open channels"
        ))),
    }
}

/// Relative margin added beyond the window edge so that a moved point stays outside the
/// window after `E → k → k²` rounding.
const SNAP_GUARD: f64 = 1e-6;

/// Moves energies that fall inside a threshold exclusion window just past the window edge
/// on the same side. Returns the adjusted energies and the indices that moved.
pub fn snap_off_thresholds(energies: &[f64], channels: &ChannelSet, window: f64) -> (Vec<f64>, Vec<usize>) {
    let mut moved = Vec::new();
    let out = energies
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            for &t in channels.thresholds() {
                if (e - t).abs() < window {
                    moved.push(i);
                    let shift = window * (1.0 + SNAP_GUARD);
                    return if e < t { t - shift } else { t + shift };
                }
            }
            e
        })
        .collect();
    (out, moved)
}

/// Uniform grid of `points` energies spanning `[e_min, e_max]`.
pub fn energy_grid(e_min: f64, e_max: f64, points: usize) -> Vec<f64> {
    let step = (e_max - e_min) / (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { e_max } else { e_min + step * i as f64 }).collect()
}

/// Full pipeline: S-matrix, decomposition and unwrapping over a scan grid.
pub fn phase_scan(source: &dyn JostSource, channels: &ChannelSet, energies: &[f64]) -> Result<Vec<PhaseSample>> {
    let raw = energies
        .iter()
        .map(|&e| s_matrix_at(source, channels, e).and_then(|s| phase_sample(&s)))
        .collect::<Result<Vec<_>>>()?;
    unwrap_scan(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_moves_points_outward() {
        let ch = ChannelSet::two(10.0).unwrap();
        let (e, moved) = snap_off_thresholds(&[9.0, 10.0 - 1e-8, 10.0, 10.0 + 1e-9, 11.0], &ch, 1e-6);
        assert_eq!(moved, vec![1, 2, 3]);
        assert!(e[1] < 10.0 - 1e-6 && e[1] > 10.0 - 1.01e-6);
        assert!(e[2] > 10.0 + 1e-6 && e[2] < 10.0 + 1.01e-6);
        assert_eq!(e[2], e[3]);
        assert_eq!(e[4], 11.0);
    }

    #[test]
    fn energy_grid_endpoints() {
        let g = energy_grid(0.05, 20.0, 800);
        assert_eq!(g.len(), 800);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[799], 20.0);
    }
}
