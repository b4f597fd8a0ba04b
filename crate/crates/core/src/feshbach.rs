//! Exactly solvable two-channel Feshbach-resonance model.
//!
//! The model is the degenerate (`det C = det D = 0`) transformation of the zero
//! potential with two channels. It is controlled by the threshold gap `Δ` and by the
//! resonance energy and width `(E_R, Γ)`, or equivalently by the raw triple
//! `(κ1, κ2, β)`.

use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{ChannelMomenta, ChannelSet};
use crate::error::{Error, Result};
use crate::jost::JostMatrix;
use crate::susy::TransformSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeshbachParams {
    pub delta: f64,
    pub e_r: f64,
    pub gamma: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub beta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl FeshbachParams {
    /// Parameters reproducing a resonance of energy `e_r` and width `gamma` below or
    /// above a threshold gap `delta`.
    pub fn from_physical(delta: f64, e_r: f64, gamma: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "threshold gap must be positive, got {delta}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidWidth(gamma));
        }
        if !(e_r > 0.0) || !e_r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "resonance energy must be positive, got {e_r}"
            )));
        }
        let g2 = 0.25 * gamma * gamma;
        let a = (e_r * e_r + g2).sqrt();
        let b = ((e_r - delta).powi(2) + g2).sqrt();
        // a − E_R and b − (Δ − E_R), both free of cancellation
        let p = g2 / (a + e_r);
        let q = if e_r <= delta {
            g2 / (b + (delta - e_r))
        } else {
            b + (e_r - delta)
        };
        let kappa1 = (0.5 * (p + q)).sqrt();
        let kappa2 = (0.5 * (a + b + delta)).sqrt();
        let beta = (0.25 * (e_r + a) * q).sqrt().sqrt();
        let mut params = Self::assemble(kappa1, kappa2, beta)?;
        params.delta = delta;
        params.e_r = e_r;
        params.gamma = gamma;
        Ok(params)
    }

    /// Parameters from the raw triple. `beta = 0` is accepted and gives the decoupled
    /// limit; the physical triple is then derived from the closed-form zero.
    pub fn from_raw(kappa1: f64, kappa2: f64, beta: f64) -> Result<Self> {
        if !(kappa1 > 0.0) || !kappa1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kappa1 must be positive, got {kappa1}"
            )));
        }
        if !(kappa2 > kappa1) || !kappa2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kappa2 must exceed kappa1, got kappa1 = {kappa1}, kappa2 = {kappa2}"
            )));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beta must be nonnegative, got {beta}"
            )));
        }
        let mut params = Self::assemble(kappa1, kappa2, beta)?;
        let e = params.pole_energy();
        params.delta = kappa2 * kappa2 - kappa1 * kappa1;
        params.e_r = e.re;
        params.gamma = -2.0 * e.im;
        Ok(params)
    }

    fn assemble(kappa1: f64, kappa2: f64, beta: f64) -> Result<Self> {
        let gap = kappa1 * kappa2 - beta * beta;
        if !(gap > 0.0) {
            return Err(Error::ConstraintViolation(format!(
                "kappa1*kappa2 = {} must exceed beta^2 = {}",
                kappa1 * kappa2,
                beta * beta
            )));
        }
        Ok(Self {
            delta: kappa2 * kappa2 - kappa1 * kappa1,
            e_r: f64::NAN,
            gamma: f64::NAN,
            kappa1,
            kappa2,
            beta,
            alpha1: (gap * kappa1 / kappa2).sqrt(),
            alpha2: -(gap * kappa2 / kappa1).sqrt(),
        })
    }

    /// Resonance above the closed-channel threshold; allowed but not a Feshbach resonance.
    pub fn above_threshold(&self) -> bool {
        self.e_r > self.delta
    }

    pub fn is_decoupled(&self) -> bool {
        self.beta == 0.0
    }

    pub fn channels(&self) -> ChannelSet {
        ChannelSet::new(vec![0.0, self.kappa2 * self.kappa2 - self.kappa1 * self.kappa1])
            .expect("kappa2 > kappa1 gives ascending thresholds")
    }

    /// Boundary superpotential `U(0) = [[α1, β], [β, α2]]`.
    pub fn boundary_superpotential(&self) -> DMatrix<f64> {
        dmatrix![self.alpha1, self.beta; self.beta, self.alpha2]
    }

    /// Equivalent generic transformation spec.
    pub fn transform_spec(&self) -> TransformSpec {
        TransformSpec::from_kappa(&[self.kappa1, self.kappa2], self.boundary_superpotential())
            .expect("validated parameters give a valid spec")
    }

    fn pole_energy(&self) -> Complex64 {
        let k1 = self.k1_zero();
        k1 * k1
    }

    fn k1_zero(&self) -> Complex64 {
        Complex64::new((self.kappa2 / self.kappa1).sqrt() * self.beta, -self.alpha1)
    }

    fn k2_zero(&self) -> Complex64 {
        Complex64::new(-(self.kappa1 / self.kappa2).sqrt() * self.beta, -self.alpha2)
    }

    /// `y(r) = (κ2 − κ1) r − arccosh sqrt(κ1κ2/β²)`.
    fn shifted_radius(&self, r: f64) -> f64 {
        let x = (self.kappa1 * self.kappa2).sqrt() / self.beta;
        let offset = (x + (x * x - 1.0).sqrt()).ln();
        (self.kappa2 - self.kappa1) * r - offset
    }
}

/// A zero of `det F̃` in the `(k1, k2)` plane together with its complex energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonancePole {
    pub k1: Complex64,
    pub k2: Complex64,
    pub energy: Complex64,
}

impl ResonancePole {
    pub fn new(k1: Complex64, k2: Complex64) -> Self {
        Self {
            k1,
            k2,
            energy: k1 * k1,
        }
    }

    pub fn resonance_energy(&self) -> f64 {
        self.energy.re
    }

    pub fn width(&self) -> f64 {
        -2.0 * self.energy.im
    }

    /// The mirror zero at `(−k1*, −k2*)`.
    pub fn mirror(&self) -> Self {
        Self::new(-self.k1.conj(), -self.k2.conj())
    }
}

/// Closed-form zeros of `det F̃`: the resonance and its mirror.
pub fn resonance_zeros(params: &FeshbachParams) -> (ResonancePole, ResonancePole) {
    let pole = ResonancePole::new(params.k1_zero(), params.k2_zero());
    (pole, pole.mirror())
}

/// Closed-form superpotential.
pub fn superpotential_closed_form(params: &FeshbachParams, r: f64) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    let y = params.shifted_radius(r);
    let sech = 1.0 / y.cosh();
    let tanh = y.tanh();
    let off = (params.kappa1 * params.kappa2).sqrt() * sech;
    Ok(dmatrix![
        -params.kappa1 * tanh, off;
        off, params.kappa2 * tanh
    ])
}

/// Closed-form potential matrix; `V11 ≥ 0` and `V22 ≤ 0` everywhere.
pub fn potential_matrix(params: &FeshbachParams, r: f64) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    let y = params.shifted_radius(r);
    let sech = 1.0 / y.cosh();
    let scale = 2.0 * (params.kappa2 - params.kappa1) * sech * sech;
    let off = 2.0
        * (params.kappa2 - params.kappa1)
        * (params.kappa1 * params.kappa2).sqrt()
        * y.tanh()
        * sech;
    Ok(dmatrix![
        scale * params.kappa1, off;
        off, -scale * params.kappa2
    ])
}

/// Closed-form Jost matrix of the model at arbitrary momenta.
pub fn jost_matrix(params: &FeshbachParams, momenta: &ChannelMomenta) -> Result<JostMatrix> {
    if momenta.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: momenta.len(),
        });
    }
    let i = Complex64::i();
    let (k1, k2) = (momenta.k()[0], momenta.k()[1]);
    let d1 = k1 - i * params.kappa1;
    let d2 = k2 + i * params.kappa2;
    if d1.norm() <= 1e-12 * (1.0 + params.kappa1) {
        return Err(Error::PoleOfJost { channel: 0 });
    }
    if d2.norm() <= 1e-12 * (1.0 + params.kappa2) {
        return Err(Error::PoleOfJost { channel: 1 });
    }
    let m = dmatrix![
        (k1 + i * params.alpha1) / d1, i * params.beta / d1;
        i * params.beta / d2, (k2 + i * params.alpha2) / d2
    ];
    Ok(JostMatrix::new(momenta.clone(), m))
}

/// Closed-form `det F̃` as a function of `k1`, with `k2` on the upper sheet.
pub fn det_jost_k1(params: &FeshbachParams, k1: Complex64) -> Result<Complex64> {
    let momenta = ChannelMomenta::from_k1(&params.channels(), k1);
    Ok(jost_matrix(params, &momenta)?.determinant())
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be nonnegative, got {r}")))
    }
}
