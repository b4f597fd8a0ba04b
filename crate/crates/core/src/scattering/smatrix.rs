use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::jost::JostMatrix;

/// Half-width of the window around each threshold inside which `S` is not evaluated.
pub const THRESHOLD_EXCLUSION: f64 = 1e-6;

/// Physical scattering matrix restricted to the open channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    pub energy: f64,
    pub open_channels: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl SMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |(S S† − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let p = &self.matrix * self.matrix.adjoint() - DMatrix::<Complex64>::identity(n, n);
        p.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// `max |S_ij − S_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let d = &self.matrix - self.matrix.transpose();
        d.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn max_off_diagonal(&self) -> f64 {
        crate::jost::max_off_diagonal(&self.matrix)
    }
}

/// `S = k^{−1/2} F(−k) F(k)⁻¹ k^{1/2}` restricted to the open–open block.
///
/// `f_plus` must be evaluated at physical-sheet momenta of a real energy. `f_minus`
/// only needs correct open-channel rows, so it may be evaluated either at `−k` or at
/// momenta with just the open channels reflected.
pub fn s_matrix(f_plus: &JostMatrix, f_minus: &JostMatrix, channels: &ChannelSet) -> Result<SMatrix> {
    s_matrix_with(f_plus, f_minus, channels, THRESHOLD_EXCLUSION)
}

pub fn s_matrix_with(
    f_plus: &JostMatrix,
    f_minus: &JostMatrix,
    channels: &ChannelSet,
    exclusion: f64,
) -> Result<SMatrix> {
    let n = channels.len();
    for m in [&f_plus.matrix, &f_minus.matrix] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
    }
    let e = f_plus.momenta.energy();
    if e.im.abs() > 1e-12 * (1.0 + e.re.abs()) {
        return Err(Error::InvalidArgument(format!(
            "S-matrix needs a real energy, got {e}"
        )));
    }
    let energy = e.re;
    for (channel, &threshold) in channels.thresholds().iter().enumerate() {
        if (energy - threshold).abs() < exclusion {
            return Err(Error::NearThreshold {
                energy,
                threshold,
                channel,
                window: exclusion,
            });
        }
    }
    let open = channels.open_count(energy);
    if open == 0 {
        return Err(Error::InvalidArgument(format!(
            "no open channel at E = {energy}"
        )));
    }

    let fp = &f_plus.matrix;
    let row_scale = fp.row_iter().map(|r| r.norm()).product::<f64>();
    let det = fp.clone().determinant();
    if row_scale == 0.0 || det.norm() <= 1e-14 * row_scale {
        return Err(Error::SingularJost { energy });
    }
    let inv = fp.clone().try_inverse().ok_or(Error::SingularJost { energy })?;
    let ratio = &f_minus.matrix * inv;

    let k = f_plus.momenta.k();
    let sqrt_k: Vec<Complex64> = k.iter().map(|x| x.sqrt()).collect();
    let matrix = DMatrix::from_fn(open, open, |i, j| ratio[(i, j)] * sqrt_k[j] / sqrt_k[i]);
    Ok(SMatrix {
        energy,
        open_channels: (0..open).collect(),
        matrix,
    })
}
