// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Representation-independent objects of 𝓛 at a pure state ψ.
//!
//! With `P = ψψ†` and `L = 𝓛(P)`:
//!
//! ```text
//! W     = L − {L, P} + ⟨L⟩P          transition rate operator
//! w     = Tr W = −⟨L⟩                total transition rate
//! drift = (L − ⟨L⟩)ψ = −i H_fr ψ     frictional (norm-conserving) flow
//! ```
//!
//! and `L = drift·ψ† + ψ·drift† + W − wP`. The frictional Hamiltonian is
//! only ever represented through its action on ψ.
//!
//! For every `x ⊥ ψ`, `x†Wx = x†Lx`; in fact `W = (1−P) L (1−P)`, so the
//! spectrum of `W` off the null direction ψ is that of `L` compressed to the
//! orthogonal complement.

use crate::generators::{Liouvillian, PureState};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct RateStructure {
    /// `𝓛(ψψ†)`.
    pub l: CMatrix,
    /// Transition rate operator.
    pub w_op: CMatrix,
    /// Total rate `Tr W`.
    pub rate: f64,
    /// `(L − ⟨L⟩)ψ`.
    pub drift: CVector,
}

impl RateStructure {
    /// `(L + ½w)ψ = drift − ½wψ`, the deterministic part of the diffusive
    /// increment.
    pub fn diffusive_drift(&self, psi: &PureState) -> CVector {
        &self.drift - psi.vector() * c(0.5 * self.rate, 0.0)
    }
}

fn check_state(lv: &Liouvillian, psi: &PureState) -> Result<()> {
    if psi.dim() != lv.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {}, generator {}",
            psi.dim(),
            lv.dim()
        )));
    }
    Ok(())
}

/// `L = 𝓛(ψψ†)`.
pub fn compute_l(lv: &Liouvillian, psi: &PureState) -> Result<CMatrix> {
    check_state(lv, psi)?;
    Ok(lv.apply_unchecked(&psi.density()))
}

/// `ψ†Lψ` (real for Hermitian `L`).
fn expectation(l: &CMatrix, psi: &CVector) -> f64 {
    psi.dotc(&(l * psi)).re
}

pub fn compute_rate_structure(lv: &Liouvillian, psi: &PureState) -> Result<RateStructure> {
    let l = compute_l(lv, psi)?;
    Ok(rate_structure_from_l(l, psi))
}

pub(crate) fn rate_structure_from_l(l: CMatrix, psi: &PureState) -> RateStructure {
    let v = psi.vector();
    let p = psi.density();
    let mean = expectation(&l, v);
    let w_op = &l - (&l * &p + &p * &l) + &p * c(mean, 0.0);
    let rate = w_op.trace().re;
    let drift = &l * v - v * c(mean, 0.0);
    RateStructure {
        l,
        w_op,
        rate,
        drift,
    }
}

/// Right-hand side of the master equation at `ρ = ψψ†` rebuilt from the
/// rate structure: `drift·ψ† + ψ·drift† + W − wψψ†`.
pub fn reconstruct_rhs(rs: &RateStructure, psi: &PureState) -> CMatrix {
    let v = psi.vector();
    linalg::outer(&rs.drift, v) + linalg::outer(v, &rs.drift) + &rs.w_op
        - psi.density() * c(rs.rate, 0.0)
}

/// `(ψ†Lψ, ψ_⊥†Lψ_⊥)` with `L = 𝓛(ψψ†)`. Positive dynamics needs the first
/// to be ≤ 0 and the second ≥ 0 for every orthogonal pair.
pub fn kossakowski_pair_check(
    lv: &Liouvillian,
    psi: &PureState,
    psi_perp: &PureState,
) -> Result<(f64, f64)> {
    check_state(lv, psi)?;
    check_state(lv, psi_perp)?;
    let overlap = psi.overlap(psi_perp);
    if overlap > 1e-10 {
        return Err(Error::NotOrthogonal(overlap));
    }
    let l = compute_l(lv, psi)?;
    Ok((
        expectation(&l, psi.vector()),
        expectation(&l, psi_perp.vector()),
    ))
}

/// Spectral decomposition of `W` on the orthogonal complement of ψ.
#[derive(Clone, Debug)]
pub struct TransitionSpectrum {
    /// Eigenvalues in ascending order (`N − 1` of them).
    pub rates: Vec<f64>,
    /// Matching orthonormal eigenvectors as columns (`N × (N−1)`), all
    /// orthogonal to ψ.
    pub states: CMatrix,
}

impl TransitionSpectrum {
    pub fn min_rate(&self) -> f64 {
        self.rates.first().copied().unwrap_or(0.0)
    }
}

/// `W = Σ_k λ_k φ_k φ_k†` with `φ_k ⊥ ψ`, computed by compressing `L` to the
/// complement of ψ.
pub fn transition_spectrum(lv: &Liouvillian, psi: &PureState) -> TransitionSpectrum {
    let l = lv.apply_unchecked(&psi.density());
    transition_spectrum_from_l(&l, psi)
}

pub(crate) fn transition_spectrum_from_l(l: &CMatrix, psi: &PureState) -> TransitionSpectrum {
    let b = linalg::complement_basis(psi.vector());
    let compressed = b.adjoint() * l * &b;
    let (rates, vectors) = linalg::hermitian_eigen(&compressed);
    TransitionSpectrum {
        rates,
        states: b * vectors,
    }
}
