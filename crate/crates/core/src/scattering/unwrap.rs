use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::eigenphase::EigenphaseSet;
use crate::error::{Error, Result};

/// Phase information at one scan energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PhaseSample {
    /// Only the lowest channel is open.
    Single { energy: f64, delta1: f64 },
    /// Two open channels.
    Coupled(EigenphaseSet),
}

impl PhaseSample {
    pub fn energy(&self) -> f64 {
        match self {
            PhaseSample::Single { energy, .. } => *energy,
            PhaseSample::Coupled(e) => e.energy,
        }
    }

    pub fn delta1(&self) -> f64 {
        match self {
            PhaseSample::Single { delta1, .. } => *delta1,
            PhaseSample::Coupled(e) => e.delta1,
        }
    }

    pub fn delta2(&self) -> Option<f64> {
        match self {
            PhaseSample::Single { .. } => None,
            PhaseSample::Coupled(e) => Some(e.delta2),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            PhaseSample::Single { .. } => None,
            PhaseSample::Coupled(e) => Some(e.epsilon),
        }
    }
}

/// `value + nπ` closest to `reference`.
fn nearest(reference: f64, value: f64) -> f64 {
    value + ((reference - value) / PI).round() * PI
}

/// Makes a phase scan continuous. Eigenphases and the mixing parameter are only defined
/// modulo π, and the two eigenvector labelings `(δ1, δ2, ε)` and `(δ2, δ1, ε ± π/2)`
/// describe the same S-matrix; at every point the branch closest to the previous point
/// is kept.
pub fn unwrap_scan(samples: &[PhaseSample]) -> Result<Vec<PhaseSample>> {
    if samples.windows(2).any(|w| !(w[1].energy() > w[0].energy())) {
        return Err(Error::InvalidArgument(
            "scan energies must be strictly increasing".into(),
        ));
    }
    let mut out: Vec<PhaseSample> = Vec::with_capacity(samples.len());
    for sample in samples {
        let energy = sample.energy();
        let values = [Some(sample.delta1()), sample.delta2(), sample.epsilon()];
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Discontinuity {
                energy,
                step: f64::NAN,
            });
        }
        let Some(prev) = out.last().copied() else {
            out.push(*sample);
            continue;
        };
        let next = match *sample {
            PhaseSample::Single { delta1, .. } => {
                let d1 = nearest(prev.delta1(), delta1);
                check_step(energy, (d1 - prev.delta1()).abs())?;
                PhaseSample::Single { energy, delta1: d1 }
            }
            PhaseSample::Coupled(raw) => {
                let swapped = (raw.delta2, raw.delta1, raw.epsilon - FRAC_PI_2);
                let candidates = [(raw.delta1, raw.delta2, raw.epsilon), swapped];
                let (best, cost) = candidates
                    .iter()
                    .map(|&(d1, d2, eps)| {
                        let d1 = nearest(prev.delta1(), d1);
                        let (d2, eps, steps) = match (prev.delta2(), prev.epsilon()) {
                            (Some(p2), Some(pe)) => {
                                let d2 = nearest(p2, d2);
                                let eps = nearest(pe, eps);
                                let steps = [(d1 - prev.delta1()).abs(), (d2 - p2).abs(), (eps - pe).abs()];
                                (d2, eps, steps)
                            }
                            // first point above threshold: δ1 continues, the new
                            // quantities start from their principal values
                            _ => (d2, nearest(0.0, eps), [(d1 - prev.delta1()).abs(), 0.0, 0.0]),
                        };
                        ((d1, d2, eps), steps)
                    })
                    .min_by(|a, b| {
                        let sa: f64 = a.1.iter().sum();
                        let sb: f64 = b.1.iter().sum();
                        sa.total_cmp(&sb)
                    })
                    .expect("two candidates");
                let worst = cost.iter().fold(0.0_f64, |a, &b| a.max(b));
                check_step(energy, worst)?;
                PhaseSample::Coupled(EigenphaseSet {
                    energy,
                    delta1: best.0,
                    delta2: best.1,
                    epsilon: best.2,
                })
            }
        };
        out.push(next);
    }
    Ok(out)
}

fn check_step(energy: f64, step: f64) -> Result<()> {
    if step < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Discontinuity { energy, step })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(energy: f64, delta1: f64) -> PhaseSample {
        PhaseSample::Single { energy, delta1 }
    }

    fn coupled(energy: f64, delta1: f64, delta2: f64, epsilon: f64) -> PhaseSample {
        PhaseSample::Coupled(EigenphaseSet {
            energy,
            delta1,
            delta2,
            epsilon,
        })
    }

    #[test]
    fn continuous_scan_is_unchanged() {
        let scan: Vec<_> = (0..20).map(|i| single(i as f64, 0.05 * i as f64)).collect();
        assert_eq!(unwrap_scan(&scan).unwrap(), scan);
    }

    #[test]
    fn removes_inserted_jump() {
        let mut scan: Vec<_> = (0..20)
            .map(|i| coupled(i as f64, 0.1 * i as f64, -0.05 * i as f64, 0.01 * i as f64))
            .collect();
        let expected = scan.clone();
        if let PhaseSample::Coupled(e) = &mut scan[7] {
            e.delta1 -= 2.0 * PI;
        }
        let out = unwrap_scan(&scan).unwrap();
        for (a, b) in out.iter().zip(&expected) {
            let (PhaseSample::Coupled(a), PhaseSample::Coupled(b)) = (a, b) else {
                panic!("coupled samples expected");
            };
            assert!((a.delta1 - b.delta1).abs() < 1e-12);
            assert_eq!((a.delta2, a.epsilon), (b.delta2, b.epsilon));
        }
    }

    #[test]
    fn follows_a_full_phase_rise() {
        // raw phases folded into (−π/2, π/2]
        let truth: Vec<f64> = (0..100).map(|i| 0.04 * i as f64).collect();
        let scan: Vec<_> = truth
            .iter()
            .enumerate()
            .map(|(i, &d)| single(i as f64, nearest(0.0, d)))
            .collect();
        let out = unwrap_scan(&scan).unwrap();
        for (o, t) in out.iter().zip(&truth) {
            assert!((o.delta1() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn resolves_label_swap() {
        let mut scan = vec![
            coupled(1.0, 0.3, -0.3, 0.7),
            coupled(2.0, 0.31, -0.31, 0.72),
        ];
        // same S-matrix, other labeling
        scan.push(coupled(3.0, -0.32, 0.32, 0.74 - FRAC_PI_2));
        let out = unwrap_scan(&scan).unwrap();
        assert!((out[2].delta1() - 0.32).abs() < 1e-12);
        assert!((out[2].delta2().unwrap() + 0.32).abs() < 1e-12);
        assert!((out[2].epsilon().unwrap() - 0.74).abs() < 1e-12);
    }

    #[test]
    fn threshold_crossing_keeps_delta1() {
        let scan = vec![single(1.0, 1.4), single(2.0, 1.5), coupled(3.0, -1.55, 0.2, 0.05)];
        let out = unwrap_scan(&scan).unwrap();
        assert!((out[2].delta1() - (PI - 1.55)).abs() < 1e-12);
        assert_eq!(out[2].delta2(), Some(0.2));
    }

    #[test]
    fn rejects_unordered_or_broken_input() {
        let scan = vec![single(2.0, 0.0), single(1.0, 0.0)];
        assert!(unwrap_scan(&scan).is_err());
        let scan = vec![single(1.0, 0.0), single(2.0, f64::NAN)];
        assert!(matches!(unwrap_scan(&scan), Err(Error::Discontinuity { .. })));
    }
}
