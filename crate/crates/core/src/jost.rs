use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::ChannelMomenta;

/// Jost matrix `F(k)` evaluated at a set of channel momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct JostMatrix {
    pub momenta: ChannelMomenta,
    pub matrix: DMatrix<Complex64>,
}

impl JostMatrix {
    pub fn new(momenta: ChannelMomenta, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), momenta.len());
        debug_assert!(matrix.is_square());
        Self { momenta, matrix }
    }

    pub fn identity(momenta: ChannelMomenta) -> Self {
        let n = momenta.len();
        Self::new(momenta, DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.clone().determinant()
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        max_off_diagonal(&self.matrix)
    }
}

pub(crate) fn max_off_diagonal(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}
