// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Correlated complex Gaussian increments `dχ` with
//!
//! ```text
//! E[dχ dχ†] = W dt,    E[dχ dχᵀ] = S dt.
//! ```
//!
//! `S = 0` is quantum state diffusion; every other admissible `S` is another
//! diffusive unraveling of the same master equation. `S` is admissible when
//! the covariance of `(dχ, dχ̄)`,
//!
//! ```text
//! [ W  S ]
//! [ S̄  W̄ ]  ≥ 0,
//! ```
//!
//! is positive semidefinite. Sampling goes through the real embedding
//! `dχ = u + iv`:
//!
//! ```text
//! E[uuᵀ] = ½ Re(W + S) dt
//! E[vvᵀ] = ½ Re(W − S) dt
//! E[uvᵀ] = ½ (Im S − Im W) dt
//! ```

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::generators::PureState;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::{Error, Result};

/// Admissibility tolerance on the least eigenvalue of the complex covariance.
pub const NOISE_PSD_TOL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseOrigin {
    /// `S = 0`.
    QsdZero,
    Explicit,
    /// Built from an `s` matrix in a `φ_⊥` frame.
    FromS(CMatrix),
}

/// Self-correlation `S` of the diffusive noise.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    pub s: CMatrix,
    pub origin: NoiseOrigin,
}

impl NoiseSpec {
    pub fn qsd(dim: usize) -> Self {
        Self {
            s: CMatrix::zeros(dim, dim),
            origin: NoiseOrigin::QsdZero,
        }
    }

    pub fn explicit(s: CMatrix) -> Result<Self> {
        check_symmetric(&s, "S")?;
        Ok(Self {
            s,
            origin: NoiseOrigin::Explicit,
        })
    }
}

/// One sampled increment.
#[derive(Clone, Debug)]
pub struct Increment {
    pub dchi: CVector,
    pub dt: f64,
}

fn check_symmetric(m: &CMatrix, what: &'static str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{what} must be square")));
    }
    let deviation = linalg::symmetric_deviation(m);
    if deviation > SYMMETRY_TOL * m.norm().max(1.0) {
        return Err(Error::NotSymmetric { what, deviation });
    }
    Ok(())
}

/// Covariance of `(dχ, dχ̄)` per unit time.
pub fn complex_covariance(w: &CMatrix, s: &CMatrix) -> CMatrix {
    let n = w.nrows();
    let mut block = CMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(w);
    block.view_mut((0, n), (n, n)).copy_from(s);
    block.view_mut((n, 0), (n, n)).copy_from(&s.conjugate());
    block.view_mut((n, n), (n, n)).copy_from(&w.conjugate());
    block
}

/// Covariance of `(u, v)` per unit time, `dχ = u + iv`.
pub fn real_covariance(w: &CMatrix, s: &CMatrix) -> DMatrix<f64> {
    let n = w.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, i) = (i / n, i % n);
        let (bj, j) = (j / n, j % n);
        let (wij, sij) = (w[(i, j)], s[(i, j)]);
        0.5 * match (bi, bj) {
            (0, 0) => wij.re + sij.re,
            (1, 1) => wij.re - sij.re,
            (0, 1) => sij.im - wij.im,
            // E[v uᵀ] = E[u vᵀ]ᵀ
            _ => {
                let (wji, sji) = (w[(j, i)], s[(j, i)]);
                sji.im - wji.im
            }
        }
    })
}

/// Whether `S` defines a diffusive unraveling for transition rate operator
/// `W`. Asymmetric `S` is an error.
pub fn validate_noise_spec(w: &CMatrix, s: &CMatrix) -> Result<bool> {
    if w.shape() != s.shape() {
        return Err(Error::DimensionMismatch(format!(
            "W is {}x{}, S is {}x{}",
            w.nrows(),
            w.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    check_symmetric(s, "S")?;
    Ok(linalg::min_eigenvalue(&complex_covariance(w, s)) >= -NOISE_PSD_TOL)
}

/// `S = Σ_αβ s̄_αβ φ_α φ_βᵀ`, the self-correlation of `dχ = Σ_α φ_α dξ̄_α`
/// when `E[dξ dξ†] = 1 dt` and `E[dξ dξᵀ] = s dt`.
pub fn build_s_from_s(phi_perp: &[CVector], s: &CMatrix) -> Result<NoiseSpec> {
    let m = phi_perp.len();
    if s.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "s must be {m}x{m} for {m} vectors, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    check_symmetric(s, "s")?;
    let norm = linalg::spectral_norm(s);
    if norm > 1.0 + SYMMETRY_TOL {
        return Err(Error::SNormExceeded(norm));
    }
    let n = phi_perp.first().map_or(0, |v| v.len());
    if phi_perp.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(
            "phi vectors differ in length".into(),
        ));
    }
    let mut big_s = CMatrix::zeros(n, n);
    for (a, pa) in phi_perp.iter().enumerate() {
        for (b, pb) in phi_perp.iter().enumerate() {
            big_s += pa * pb.transpose() * s[(a, b)].conj();
        }
    }
    Ok(NoiseSpec {
        s: big_s,
        origin: NoiseOrigin::FromS(s.clone()),
    })
}

/// Square-root factor `A` of a real covariance, `A Aᵀ = cov`. Eigenvalues in
/// `[-floor_tol, 0)` are treated as zero.
pub(crate) fn psd_factor(cov: &DMatrix<f64>, floor_tol: f64) -> Result<DMatrix<f64>> {
    let (values, vectors) = linalg::real_symmetric_eigen(cov);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -floor_tol {
        return Err(Error::CovarianceNotPsd {
            min_eigenvalue: min,
        });
    }
    let mut factor = vectors;
    for (j, &lambda) in values.iter().enumerate() {
        factor.column_mut(j).scale_mut(lambda.max(0.0).sqrt());
    }
    Ok(factor)
}

fn standard_normal_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Complex vector `u + iv` from a real factor of the `(u, v)` covariance.
fn sample_embedded<R: Rng + ?Sized>(factor: &DMatrix<f64>, rng: &mut R) -> CVector {
    let n = factor.nrows() / 2;
    let z = standard_normal_vector(rng, factor.ncols());
    let x = factor * z;
    CVector::from_fn(n, |i, _| c(x[i], x[n + i]))
}

/// Draws `dχ` with `E[dχ dχ†] = W dt`, `E[dχ dχᵀ] = S dt`, then removes its
/// (round-off) component along ψ.
pub fn sample_increment<R: Rng + ?Sized>(
    w: &CMatrix,
    spec: &NoiseSpec,
    psi: &PureState,
    dt: f64,
    rng: &mut R,
) -> Result<Increment> {
    let n = psi.dim();
    if w.shape() != (n, n) || spec.s.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "W, S and the state must share a dimension".into(),
        ));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    // complex-block eigenvalues are twice those of the real embedding
    let factor = psd_factor(&real_covariance(w, &spec.s), 0.5 * NOISE_PSD_TOL)?;
    let mut dchi = sample_embedded(&factor, rng) * c(dt.sqrt(), 0.0);
    project_out(&mut dchi, psi.vector());
    Ok(Increment { dchi, dt })
}

/// Removes the component of `x` along the unit vector `psi`.
pub(crate) fn project_out(x: &mut CVector, psi: &CVector) {
    let along = psi.dotc(x);
    x.axpy(-along, psi, linalg::ONE);
}

/// Sampler for `ξ` with `E[ξξ†] = 1`, `E[ξξᵀ] = s` (unit time).
#[derive(Clone, Debug)]
pub struct XiSampler {
    factor: DMatrix<f64>,
}

impl XiSampler {
    pub fn new(s: &CMatrix) -> Result<Self> {
        check_symmetric(s, "s")?;
        let norm = linalg::spectral_norm(s);
        if norm > 1.0 + SYMMETRY_TOL {
            return Err(Error::SNormExceeded(norm));
        }
        let m = s.nrows();
        let factor = psd_factor(
            &real_covariance(&linalg::identity(m), s),
            0.5 * NOISE_PSD_TOL,
        )?;
        Ok(Self { factor })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows() / 2
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        sample_embedded(&self.factor, rng)
    }
}
