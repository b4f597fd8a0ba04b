//! Channel thresholds and channel momenta.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ascending threshold energies of the coupled channels, with the lowest at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    thresholds: Vec<f64>,
}

impl ChannelSet {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidArgument("at least one channel is required".into()));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("thresholds must be finite".into()));
        }
        if thresholds[0] != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lowest threshold must be 0, got {}",
                thresholds[0]
            )));
        }
        if thresholds.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("thresholds must be ascending".into()));
        }
        Ok(Self { thresholds })
    }

    pub fn single() -> Self {
        Self {
            thresholds: vec![0.0],
        }
    }

    /// Two channels separated by a gap `delta`.
    pub fn two(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "threshold gap must be positive, got {delta}"
            )));
        }
        Self::new(vec![0.0, delta])
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn threshold(&self, channel: usize) -> f64 {
        self.thresholds[channel]
    }

    pub fn has_distinct_thresholds(&self) -> bool {
        self.thresholds.windows(2).all(|w| w[1] > w[0])
    }

    /// Number of channels open at real energy `energy` (those with `energy > threshold`).
    pub fn open_count(&self, energy: f64) -> usize {
        self.thresholds.iter().filter(|&&t| energy > t).count()
    }
}

/// Branch of the square root `k_i = ±sqrt(E - Δ_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    /// `Im k >= 0`, and `Re k >= 0` on the real axis.
    Upper,
    /// The negative of the upper-sheet root.
    Lower,
}

impl Sheet {
    pub fn flipped(self) -> Self {
        match self {
            Sheet::Upper => Sheet::Lower,
            Sheet::Lower => Sheet::Upper,
        }
    }
}

/// Square root of `z` on the requested sheet.
pub fn branch_sqrt(z: Complex64, sheet: Sheet) -> Complex64 {
    let mut root = z.sqrt();
    if root.im < 0.0 || (root.im == 0.0 && root.re < 0.0) {
        root = -root;
    }
    match sheet {
        Sheet::Upper => root,
        Sheet::Lower => -root,
    }
}

/// Total energy together with the channel momenta `k_i` satisfying `k_i² = E − Δ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMomenta {
    energy: Complex64,
    k: Vec<Complex64>,
    sheets: Vec<Sheet>,
}

impl ChannelMomenta {
    /// Physical-sheet momenta at real energy: `+sqrt(E−Δ)` for open channels and
    /// `+i sqrt(Δ−E)` for closed ones.
    pub fn physical(channels: &ChannelSet, energy: f64) -> Self {
        let sheets = vec![Sheet::Upper; channels.len()];
        Self::build(channels, Complex64::new(energy, 0.0), sheets)
    }

    pub fn on_sheets(channels: &ChannelSet, energy: Complex64, sheets: &[Sheet]) -> Result<Self> {
        if sheets.len() != channels.len() {
            return Err(Error::DimensionMismatch {
                expected: channels.len(),
                found: sheets.len(),
            });
        }
        Ok(Self::build(channels, energy, sheets.to_vec()))
    }

    /// Momenta parametrized by the first-channel momentum `k1`; the others are placed on
    /// the upper sheet. This is the continuation used for resonance searches.
    pub fn from_k1(channels: &ChannelSet, k1: Complex64) -> Self {
        let energy = k1 * k1;
        let mut k = Vec::with_capacity(channels.len());
        let mut sheets = Vec::with_capacity(channels.len());
        k.push(k1);
        sheets.push(sheet_of(k1));
        for &t in &channels.thresholds()[1..] {
            k.push(branch_sqrt(energy - t, Sheet::Upper));
            sheets.push(Sheet::Upper);
        }
        Self { energy, k, sheets }
    }

    /// Explicit momenta; they must lie on a common energy shell.
    pub fn from_momenta(channels: &ChannelSet, k: Vec<Complex64>) -> Result<Self> {
        if k.len() != channels.len() {
            return Err(Error::DimensionMismatch {
                expected: channels.len(),
                found: k.len(),
            });
        }
        let energy = k[0] * k[0] + channels.threshold(0);
        for (i, (ki, &t)) in k.iter().zip(channels.thresholds()).enumerate() {
            let mismatch = (ki * ki - (energy - t)).norm();
            if mismatch > 1e-10 * (1.0 + energy.norm() + t.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "momentum of channel {i} is off the energy shell by {mismatch:e}"
                )));
            }
        }
        let sheets = k.iter().map(|&ki| sheet_of(ki)).collect();
        Ok(Self { energy, k, sheets })
    }

    fn build(channels: &ChannelSet, energy: Complex64, sheets: Vec<Sheet>) -> Self {
        let k = channels
            .thresholds()
            .iter()
            .zip(&sheets)
            .map(|(&t, &s)| branch_sqrt(energy - t, s))
            .collect();
        Self { energy, k, sheets }
    }

    pub fn energy(&self) -> Complex64 {
        self.energy
    }

    pub fn k(&self) -> &[Complex64] {
        &self.k
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Momenta `−k` at the same energy.
    pub fn negated(&self) -> Self {
        Self {
            energy: self.energy,
            k: self.k.iter().map(|k| -k).collect(),
            sheets: self.sheets.iter().map(|s| s.flipped()).collect(),
        }
    }

    /// Momenta with only the real (open-channel) entries negated. Closed channels keep
    /// their decaying momentum, which keeps inward integration of `f(−k)` stable while
    /// leaving the open rows of `F(−k)` unchanged.
    pub fn reflect_open(&self) -> Self {
        let mut out = self.clone();
        for (k, s) in out.k.iter_mut().zip(out.sheets.iter_mut()) {
            if k.im.abs() <= 1e-14 * k.norm() {
                *k = -*k;
                *s = s.flipped();
            }
        }
        out
    }

    /// Diagonal matrix `diag(k_1, …, k_N)`.
    pub fn diagonal(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.k))
    }
}

fn sheet_of(k: Complex64) -> Sheet {
    if k.im > 0.0 || (k.im == 0.0 && k.re >= 0.0) {
        Sheet::Upper
    } else {
        Sheet::Lower
    }
}
