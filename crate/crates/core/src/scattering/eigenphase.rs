use std::f64::consts::FRAC_PI_4;

use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

use super::smatrix::SMatrix;
use crate::error::{Error, Result};

/// Largest unitarity defect accepted by [`eigenphases`].
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// Eigenphases and mixing parameter of a 2×2 symmetric unitary `S`:
/// `S = O(ε)ᵀ diag(e^{2iδ1}, e^{2iδ2}) O(ε)` with `O(ε) = [[cos ε, sin ε], [−sin ε, cos ε]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenphaseSet {
    pub energy: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub epsilon: f64,
}

impl EigenphaseSet {
    /// Rebuilds `S` from the decomposition.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let (s, c) = self.epsilon.sin_cos();
        let o = dmatrix![
            Complex64::new(c, 0.0), Complex64::new(s, 0.0);
            Complex64::new(-s, 0.0), Complex64::new(c, 0.0)
        ];
        let d = dmatrix![
            Complex64::from_polar(1.0, 2.0 * self.delta1), Complex64::new(0.0, 0.0);
            Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, 2.0 * self.delta2)
        ];
        o.transpose() * d * o
    }
}

/// Decomposes a 2×2 symmetric unitary S-matrix by a real rotation. The eigenvector
/// dominated by channel 1 carries `δ1`, so `ε ∈ (−π/4, π/4]`.
pub fn eigenphases(s: &SMatrix) -> Result<EigenphaseSet> {
    if s.dim() != 2 {
        return Err(Error::NotTwoByTwo(s.dim()));
    }
    let defect = s.unitarity_defect();
    if defect > UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { defect });
    }
    let m = &s.matrix;
    let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    // a − d = cos 2ε (λ1 − λ2) and 2b = sin 2ε (λ1 − λ2), with a common complex factor
    let p = a - d;
    let q = 2.0 * b;
    let mut epsilon = if p.norm().max(q.norm()) <= 1e-14 {
        0.0
    } else {
        let reference = if p.norm() >= q.norm() { p } else { q };
        let phase = reference.conj() / reference.norm();
        0.5 * (q * phase).re.atan2((p * phase).re)
    };
    // ε ∈ (−π/2, π/2]; fold into (−π/4, π/4] by relabeling the eigenvectors
    if epsilon > FRAC_PI_4 {
        epsilon -= 2.0 * FRAC_PI_4;
    } else if epsilon <= -FRAC_PI_4 {
        epsilon += 2.0 * FRAC_PI_4;
    }
    let (sn, cs) = epsilon.sin_cos();
    let lambda1 = cs * cs * a + 2.0 * sn * cs * b + sn * sn * d;
    let lambda2 = sn * sn * a - 2.0 * sn * cs * b + cs * cs * d;
    Ok(EigenphaseSet {
        energy: s.energy,
        delta1: 0.5 * lambda1.arg(),
        delta2: 0.5 * lambda2.arg(),
        epsilon,
    })
}

/// Phase shift `arg(S11)/2` of a single open channel.
pub fn single_channel_phase(s: &SMatrix) -> Result<f64> {
    if s.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected one open channel, got {}",
            s.dim()
        )));
    }
    let defect = s.unitarity_defect();
    if defect > UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { defect });
    }
    Ok(0.5 * s.matrix[(0, 0)].arg())
}
