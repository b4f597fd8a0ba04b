//! Supersymmetric (Darboux) transformations of the zero potential for `N` coupled
//! channels.
//!
//! A transformation is fixed by the factorization energy `ℰ < 0` and by the symmetric
//! boundary value `U(0)` of the superpotential. The factorization solution is
//!
//! ```text
//! σ(r) = cosh(κr) + sinh(κr) κ⁻¹ U(0) = exp(κr) C + exp(−κr) D
//! ```
//!
//! with `κ_i = sqrt(Δ_i − ℰ)`, and everything else (superpotential, transformed
//! potential, Jost matrix) follows from it. Functions of the diagonal `κ` are always
//! evaluated entry by entry.
//!
//! Numerically, `σ` is never inverted directly: rows are rescaled by `exp(−κ_i r)` so
//! that only bounded quantities enter the linear solve, and the superpotential is
//! assembled from its upper triangle where the rescaling damps rounding errors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channels::{ChannelMomenta, ChannelSet};
use crate::error::{Error, Result};
use crate::jost::{to_complex, JostMatrix};

/// Tolerances used by the transformation machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusyConfig {
    /// Largest accepted condition number of the (equilibrated) factorization solution.
    pub condition_cap: f64,
    /// `det C` counts as zero below this multiple of `‖C‖ⁿ`.
    pub det_zero_tol: f64,
    /// Between `det_zero_tol` and this multiple of `‖C‖ⁿ` the branch is ambiguous.
    pub det_ambiguous_tol: f64,
}

impl Default for SusyConfig {
    fn default() -> Self {
        Self {
            condition_cap: 1e12,
            det_zero_tol: 1e-10,
            det_ambiguous_tol: 1e-6,
        }
    }
}

/// Factorization energy, the diagonal wave numbers `κ` and the boundary superpotential.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    channels: ChannelSet,
    factorization_energy: f64,
    kappa: Vec<f64>,
    u0: DMatrix<f64>,
    symmetric: bool,
}

impl TransformSpec {
    pub fn new(channels: ChannelSet, factorization_energy: f64, u0: DMatrix<f64>) -> Result<Self> {
        let spec = Self::build(channels, factorization_energy, u0)?;
        if !spec.symmetric {
            return Err(Error::InvalidArgument(
                "boundary superpotential U(0) must be symmetric".into(),
            ));
        }
        Ok(spec)
    }

    /// Builds the spec directly from the wave numbers: `ℰ = −κ_1²` and `Δ_i = κ_i² − κ_1²`.
    pub fn from_kappa(kappa: &[f64], u0: DMatrix<f64>) -> Result<Self> {
        if kappa.is_empty() {
            return Err(Error::InvalidArgument("at least one channel is required".into()));
        }
        if kappa.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidArgument("wave numbers must be positive".into()));
        }
        if kappa.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("wave numbers must be ascending".into()));
        }
        let k1sq = kappa[0] * kappa[0];
        let thresholds = kappa.iter().map(|k| k * k - k1sq).collect();
        let channels = ChannelSet::new(thresholds)?;
        let mut spec = Self::new(channels, -k1sq, u0)?;
        // keep the caller's wave numbers bit for bit
        spec.kappa = kappa.to_vec();
        Ok(spec)
    }

    /// Same as [`TransformSpec::new`] but accepts a non-symmetric `U(0)`. Such a spec has a
    /// nonzero self-Wronskian and no symmetric superpotential; only the factorization
    /// solution and its Wronskian may be evaluated.
    pub fn with_asymmetric_boundary(
        channels: ChannelSet,
        factorization_energy: f64,
        u0: DMatrix<f64>,
    ) -> Result<Self> {
        Self::build(channels, factorization_energy, u0)
    }

    fn build(channels: ChannelSet, factorization_energy: f64, u0: DMatrix<f64>) -> Result<Self> {
        if !(factorization_energy < 0.0) || !factorization_energy.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "factorization energy must be negative, got {factorization_energy}"
            )));
        }
        let n = channels.len();
        if u0.nrows() != n || u0.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u0.nrows().max(u0.ncols()),
            });
        }
        if u0.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("U(0) must be finite".into()));
        }
        let kappa = channels
            .thresholds()
            .iter()
            .map(|t| (t - factorization_energy).sqrt())
            .collect();
        let symmetric = u0 == u0.transpose();
        Ok(Self {
            channels,
            factorization_energy,
            kappa,
            u0,
            symmetric,
        })
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn factorization_energy(&self) -> f64 {
        self.factorization_energy
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn kappa_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.kappa))
    }

    pub fn u0(&self) -> &DMatrix<f64> {
        &self.u0
    }

    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `C = (I + κ⁻¹U(0))/2`.
    pub fn growing_coefficient(&self) -> DMatrix<f64> {
        self.exponential_coefficient(1.0)
    }

    /// `D = (I − κ⁻¹U(0))/2`.
    pub fn decaying_coefficient(&self) -> DMatrix<f64> {
        self.exponential_coefficient(-1.0)
    }

    fn exponential_coefficient(&self, sign: f64) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            0.5 * (id + sign * self.u0[(i, j)] / self.kappa[i])
        })
    }
}

/// A matrix-valued function sampled at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFunctionSample {
    pub r: f64,
    pub value: DMatrix<f64>,
}

/// Evaluates `f` on each radius, stopping at the first error.
pub fn sample<F>(radii: &[f64], mut f: F) -> Result<Vec<MatrixFunctionSample>>
where
    F: FnMut(f64) -> Result<DMatrix<f64>>,
{
    radii
        .iter()
        .map(|&r| f(r).map(|value| MatrixFunctionSample { r, value }))
        .collect()
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be nonnegative, got {r}")))
    }
}

/// `σ(r) = cosh(κr) + sinh(κr) κ⁻¹ U(0)`.
pub fn factorization_solution(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    Ok(raw_factorization(spec, r).0)
}

/// `σ′(r) = κ sinh(κr) + cosh(κr) U(0)`.
pub fn factorization_derivative(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    Ok(raw_factorization(spec, r).1)
}

fn raw_factorization(spec: &TransformSpec, r: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = spec.dim();
    let (ch, sh): (Vec<f64>, Vec<f64>) = spec
        .kappa
        .iter()
        .map(|k| ((k * r).cosh(), (k * r).sinh()))
        .unzip();
    let sigma = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { ch[i] } else { 0.0 };
        diag + sh[i] / spec.kappa[i] * spec.u0[(i, j)]
    });
    let dsigma = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { spec.kappa[i] * sh[i] } else { 0.0 };
        diag + ch[i] * spec.u0[(i, j)]
    });
    (sigma, dsigma)
}

/// Row-rescaled factorization solution: `σ = E M`, `σ′ = E N` with `E = diag(exp(κ_i r))`,
/// so `M = C + e D` and `N = κ(C − e D)` with `e = diag(exp(−2κ_i r))`. Entries of `M` and
/// `N` stay bounded for every `r ≥ 0`. The third value is, per row, the magnitude of the
/// terms before they are summed; cancellation against it signals a singular `σ`.
fn scaled_factorization(spec: &TransformSpec, r: f64) -> (DMatrix<f64>, DMatrix<f64>, Vec<f64>) {
    let n = spec.dim();
    let c = spec.growing_coefficient();
    let d = spec.decaying_coefficient();
    let decay: Vec<f64> = spec.kappa.iter().map(|k| (-2.0 * k * r).exp()).collect();
    let m = DMatrix::from_fn(n, n, |i, j| c[(i, j)] + decay[i] * d[(i, j)]);
    let nn = DMatrix::from_fn(n, n, |i, j| spec.kappa[i] * (c[(i, j)] - decay[i] * d[(i, j)]));
    let scale = (0..n)
        .map(|i| (0..n).map(|j| c[(i, j)].abs() + decay[i] * d[(i, j)].abs()).sum())
        .collect();
    (m, nn, scale)
}

/// `1 / σ_min` of `m` with each row divided by its term magnitude.
fn cancellation_condition(m: &DMatrix<f64>) -> f64 {
    let min = m.singular_values().min();
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        1.0 / min
    }
}

/// `X = N M⁻¹`, so that `U = E X E⁻¹`.
fn scaled_ratio(spec: &TransformSpec, r: f64, cfg: &SusyConfig) -> Result<DMatrix<f64>> {
    let (mut m, nn, scale) = scaled_factorization(spec, r);
    for (mut row, s) in m.row_iter_mut().zip(&scale) {
        row /= *s;
    }
    let condition = cancellation_condition(&m);
    if !(condition <= cfg.condition_cap) {
        return Err(Error::SingularFactorization { r, condition });
    }
    // with M = S Ms:  X = N Ms⁻¹ S⁻¹, and Y = N Ms⁻¹ solves Msᵀ Yᵀ = Nᵀ
    let yt = m
        .transpose()
        .lu()
        .solve(&nn.transpose())
        .ok_or(Error::SingularFactorization {
            r,
            condition: f64::INFINITY,
        })?;
    let mut x = yt.transpose();
    for (mut col, s) in x.column_iter_mut().zip(&scale) {
        col /= *s;
    }
    Ok(x)
}

fn superpotential_at(spec: &TransformSpec, r: f64, cfg: &SusyConfig) -> Result<DMatrix<f64>> {
    if !spec.symmetric {
        return Err(Error::InvalidArgument(
            "superpotential requires a symmetric U(0)".into(),
        ));
    }
    let x = scaled_ratio(spec, r, cfg)?;
    let n = spec.dim();
    let mut u = DMatrix::zeros(n, n);
    for i in 0..n {
        u[(i, i)] = x[(i, i)];
        for j in (i + 1)..n {
            // κ_i ≤ κ_j, so the factor is at most one
            let v = ((spec.kappa[i] - spec.kappa[j]) * r).exp() * x[(i, j)];
            u[(i, j)] = v;
            u[(j, i)] = v;
        }
    }
    Ok(u)
}

/// Full `E X E⁻¹` without using symmetry; used to test that symmetry actually holds.
#[cfg(test)]
pub(crate) fn superpotential_unsymmetrized(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    let x = scaled_ratio(spec, r, &SusyConfig::default())?;
    let n = spec.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        ((spec.kappa[i] - spec.kappa[j]) * r).exp() * x[(i, j)]
    }))
}

/// Superpotential `U(r) = σ′(r) σ(r)⁻¹`.
pub fn superpotential(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    superpotential_with(spec, r, &SusyConfig::default())
}

pub fn superpotential_with(spec: &TransformSpec, r: f64, cfg: &SusyConfig) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    if r == 0.0 {
        if !spec.symmetric {
            return Err(Error::InvalidArgument(
                "superpotential requires a symmetric U(0)".into(),
            ));
        }
        return Ok(spec.u0.clone());
    }
    superpotential_at(spec, r, cfg)
}

/// Transformed potential `Ṽ = V − 2U′` of the zero potential, with `U′ = κ² − U²` taken
/// from the Riccati equation, i.e. `Ṽ = 2U² − 2κ²`.
pub fn transformed_potential(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    transformed_potential_with(spec, r, &SusyConfig::default())
}

pub fn transformed_potential_with(
    spec: &TransformSpec,
    r: f64,
    cfg: &SusyConfig,
) -> Result<DMatrix<f64>> {
    let u = superpotential_with(spec, r, cfg)?;
    let mut v = &u * &u;
    for (i, k) in spec.kappa.iter().enumerate() {
        v[(i, i)] -= k * k;
    }
    v *= 2.0;
    // U² of a symmetric U is symmetric up to summation order
    let vt = v.transpose();
    Ok((v + vt) * 0.5)
}

/// Which asymptotic form the factorization solution takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticBranch {
    /// `det C ≠ 0`, so `U(∞) = κ`.
    Nondegenerate,
    /// `det C = 0`; `decaying_also_singular` reports whether `det D = 0` as well.
    Degenerate { decaying_also_singular: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSuperpotential {
    /// Diagonal of `U(∞)`; every entry is `±κ_i`.
    pub diagonal: Vec<f64>,
    pub branch: AsymptoticBranch,
}

impl AsymptoticSuperpotential {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal))
    }
}

fn relative_det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() as i32;
    let scale = m.norm().powi(n);
    if scale == 0.0 {
        0.0
    } else {
        m.clone().determinant().abs() / scale
    }
}

/// Limit `U(∞)` of the superpotential, classified by whether `det C` vanishes.
pub fn asymptotic_superpotential(spec: &TransformSpec) -> Result<AsymptoticSuperpotential> {
    asymptotic_superpotential_with(spec, &SusyConfig::default())
}

pub fn asymptotic_superpotential_with(
    spec: &TransformSpec,
    cfg: &SusyConfig,
) -> Result<AsymptoticSuperpotential> {
    if !spec.channels.has_distinct_thresholds() {
        return Err(Error::Unsupported(
            "U(inf) is only classified for distinct thresholds".into(),
        ));
    }
    let c = spec.growing_coefficient();
    let rel = relative_det(&c);
    if rel >= cfg.det_ambiguous_tol {
        return Ok(AsymptoticSuperpotential {
            diagonal: spec.kappa.clone(),
            branch: AsymptoticBranch::Nondegenerate,
        });
    }
    if rel >= cfg.det_zero_tol {
        return Err(Error::AmbiguousBranch { relative_det: rel });
    }
    let decaying_also_singular = relative_det(&spec.decaying_coefficient()) < cfg.det_zero_tol;
    let branch = AsymptoticBranch::Degenerate {
        decaying_also_singular,
    };
    if spec.dim() == 1 {
        // C = 0: σ = exp(−κr)
        return Ok(AsymptoticSuperpotential {
            diagonal: vec![-spec.kappa[0]],
            branch,
        });
    }
    if spec.dim() != 2 {
        return Err(Error::Unsupported(
            "degenerate det C = 0 is only classified for two channels".into(),
        ));
    }
    let (k1, k2) = (spec.kappa[0], spec.kappa[1]);
    let norm = c.norm();
    let diagonal = if norm < cfg.det_zero_tol {
        vec![-k1, -k2]
    } else if c.row(1).norm() < cfg.det_zero_tol * norm {
        // second channel decays on its own, the first still grows
        vec![k1, -k2]
    } else {
        vec![-k1, k2]
    };
    Ok(AsymptoticSuperpotential { diagonal, branch })
}

/// A solution matrix and its radial derivative at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSample {
    pub r: f64,
    pub value: DMatrix<Complex64>,
    pub derivative: DMatrix<Complex64>,
}

/// Action of `A⁻ = −d/dr + U` on a solution: `ψ̃ = −ψ′ + Uψ`.
pub fn transform_solution(psi: &SolutionSample, u: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let n = u.nrows();
    for m in [&psi.value, &psi.derivative] {
        if m.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
    }
    Ok(to_complex(u) * &psi.value - &psi.derivative)
}

fn asymptotic_factor(u_inf: &[f64], momenta: &ChannelMomenta, sign: f64) -> Result<Vec<Complex64>> {
    if u_inf.len() != momenta.len() {
        return Err(Error::DimensionMismatch {
            expected: momenta.len(),
            found: u_inf.len(),
        });
    }
    let i = Complex64::i();
    u_inf
        .iter()
        .zip(momenta.k())
        .enumerate()
        .map(|(channel, (&u, &k))| {
            let f = sign * u - i * k;
            if f.norm() <= 1e-14 * (u.abs() + k.norm()) {
                Err(Error::SingularAsymptoticFactor { channel })
            } else {
                Ok(f)
            }
        })
        .collect()
}

/// General non-conservative update `F̃ = [U(∞) − ik]⁻¹ [F U(0) − f′ᵀ(k,0)]`.
pub fn nonconservative_jost_general(
    u_inf: &[f64],
    u0: &DMatrix<f64>,
    f: &JostMatrix,
    jost_derivative_t: &DMatrix<Complex64>,
) -> Result<JostMatrix> {
    let factor = asymptotic_factor(u_inf, &f.momenta, 1.0)?;
    let mut m = &f.matrix * to_complex(u0) - jost_derivative_t;
    for (i, d) in factor.iter().enumerate() {
        let mut row = m.row_mut(i);
        row /= *d;
    }
    Ok(JostMatrix::new(f.momenta.clone(), m))
}

/// Jost matrix of the transformed zero potential: `F̃ = [U(∞) − ik]⁻¹ [U(0) − ik]`.
pub fn nonconservative_jost(spec: &TransformSpec, momenta: &ChannelMomenta) -> Result<JostMatrix> {
    let asym = asymptotic_superpotential(spec)?;
    nonconservative_jost_with_asymptote(spec, &asym.diagonal, momenta)
}

pub fn nonconservative_jost_with_asymptote(
    spec: &TransformSpec,
    u_inf: &[f64],
    momenta: &ChannelMomenta,
) -> Result<JostMatrix> {
    if momenta.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: momenta.len(),
        });
    }
    let free = JostMatrix::identity(momenta.clone());
    let ik = momenta.diagonal() * Complex64::i();
    nonconservative_jost_general(u_inf, &spec.u0, &free, &ik)
}

/// Boundary behavior of the factorization solution at the origin for a conservative
/// transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservativeVariant {
    /// `σ` diverges at the origin: `F̃ = [−U(∞) − ik] F`.
    Diverging,
    /// `σ` vanishes at the origin: `F̃ = [U(∞) − ik]⁻¹ F`.
    Vanishing,
}

pub fn conservative_jost(
    f: &JostMatrix,
    u_inf: &[f64],
    variant: ConservativeVariant,
) -> Result<JostMatrix> {
    let mut m = f.matrix.clone();
    match variant {
        ConservativeVariant::Diverging => {
            // −U(∞) − ik can vanish without harm here; it is not inverted
            let i = Complex64::i();
            for (row, (&u, &k)) in u_inf.iter().zip(f.momenta.k()).enumerate() {
                let mut r = m.row_mut(row);
                r *= -u - i * k;
            }
        }
        ConservativeVariant::Vanishing => {
            let factor = asymptotic_factor(u_inf, &f.momenta, 1.0)?;
            for (row, d) in factor.iter().enumerate() {
                let mut r = m.row_mut(row);
                r /= *d;
            }
        }
    }
    Ok(JostMatrix::new(f.momenta.clone(), m))
}

/// Step of the central-difference stencil used by [`riccati_residual`].
pub const RICCATI_STEP: f64 = 1e-4;

/// `U′ + U² − V − κ²` with `U′` from a five-point central difference of the
/// superpotential; vanishes up to discretization error.
pub fn riccati_residual(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    let cfg = SusyConfig::default();
    let h = RICCATI_STEP;
    // the rescaled formula is valid slightly left of the origin as well
    let at = |x: f64| superpotential_at(spec, x, &cfg);
    let du = (at(r - 2.0 * h)? - at(r - h)? * 8.0 + at(r + h)? * 8.0 - at(r + 2.0 * h)?) / (12.0 * h);
    let u = superpotential_at(spec, r, &cfg)?;
    let mut res = du + &u * &u;
    for (i, k) in spec.kappa.iter().enumerate() {
        res[(i, i)] -= k * k;
    }
    Ok(res)
}

/// Self-Wronskian `W(σ,σ) = σᵀσ′ − σ′ᵀσ`; zero for symmetric `U(0)`.
///
/// With row `l` of `σ` written as `a C_l + b D_l` (`a = e^{κ_l r}`, `b = e^{−κ_l r}`), its
/// contribution `σ_li σ′_lj − σ′_li σ_lj` expands to `2κ_l ab (D_li C_lj − C_li D_lj)`. Summing
/// that form avoids cancelling products of size `e^{2κ_l r}`.
pub fn self_wronskian(spec: &TransformSpec, r: f64) -> Result<DMatrix<f64>> {
    check_radius(r)?;
    if r == 0.0 {
        // σ(0) = I, σ′(0) = U(0)
        return Ok(&spec.u0 - spec.u0.transpose());
    }
    let n = spec.dim();
    let c = spec.growing_coefficient();
    let d = spec.decaying_coefficient();
    let weight: Vec<f64> = spec
        .kappa
        .iter()
        .map(|k| 2.0 * k * (k * r).exp() * (-k * r).exp())
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|l| weight[l] * (d[(l, i)] * c[(l, j)] - c[(l, i)] * d[(l, j)]))
            .sum()
    }))
}
