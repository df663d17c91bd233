// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Superoperators 𝓛 of `ρ̇ = 𝓛ρ`: construction, application and
//! classification into completely positive, positive-but-not-CP and
//! non-positive generators.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{self, c, CMatrix, CVector, ONE, ZERO};
use crate::rate_structures::transition_spectrum;
use crate::{Error, Result, MAX_DIM, NEGATIVITY_TOL, STRUCTURAL_TOL};

/// Tolerance on the Hermiticity of input Hamiltonians and coefficient
/// matrices, relative to `max(1, ‖·‖_F)`.
const INPUT_HERMITIAN_TOL: f64 = 1e-12;

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    /// Normalizes `amplitudes`. Fails on a zero or non-finite vector.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegenerateState);
        }
        Ok(Self(amplitudes / c(norm, 0.0)))
    }

    /// Accepts `amplitudes` only if it is already normalized to within 1e-12.
    pub fn from_normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() {
            return Err(Error::DegenerateState);
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(amplitudes))
    }

    pub fn from_amplitudes(amplitudes: &[crate::Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self(linalg::basis_vector(dim, k))
    }

    /// Qubit state with the given Bloch vector direction.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::DegenerateState);
        }
        let theta = (z / r).clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        let v = CVector::from_vec(vec![
            c((theta / 2.0).cos(), 0.0),
            c(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
        ]);
        Self::new(v)
    }

    pub(crate) fn from_vector_unchecked(v: CVector) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    /// `ψψ†`.
    pub fn density(&self) -> CMatrix {
        linalg::projector(&self.0)
    }

    /// `|⟨ψ|φ⟩|`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.0.dotc(&other.0).norm()
    }

    /// Trace distance between the two pure states, `√(1 − |⟨ψ|φ⟩|²)`.
    pub fn distance(&self, other: &PureState) -> f64 {
        (1.0 - self.overlap(other).powi(2)).max(0.0).sqrt()
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Option<[f64; 3]> {
        (self.dim() == 2).then(|| {
            let rho01 = self.0[0] * self.0[1].conj();
            [
                2.0 * rho01.re,
                -2.0 * rho01.im,
                self.0[0].norm_sqr() - self.0[1].norm_sqr(),
            ]
        })
    }
}

/// How a [`Liouvillian`] was built.
#[derive(Clone, Debug)]
pub enum Provenance {
    /// `−i[H,ρ] + Σ_α F_α ρ F_α† − ½{F_α†F_α, ρ}`.
    Lindblad {
        hamiltonian: CMatrix,
        operators: Vec<CMatrix>,
    },
    /// `−i[H,ρ] + Σ_ij K_ij (G_i ρ G_j† − ½{G_j†G_i, ρ})`, `K` possibly
    /// indefinite.
    Kossakowski {
        hamiltonian: CMatrix,
        basis: Vec<CMatrix>,
        coefficients: CMatrix,
    },
    Raw,
}

/// A trace- and Hermiticity-preserving superoperator stored as an `N² × N²`
/// matrix acting on column-major vectorized operators.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    matrix: CMatrix,
    provenance: Provenance,
}

impl Liouvillian {
    /// Wraps a raw superoperator matrix after checking that it preserves
    /// trace and Hermiticity.
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        check_dim(dim)?;
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator of dimension {dim} must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !linalg::all_finite(&matrix) {
            return Err(Error::NonFinite("superoperator"));
        }
        let lv = Self {
            dim,
            matrix,
            provenance: Provenance::Raw,
        };
        lv.verify_structure()?;
        Ok(lv)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Hamiltonian and Lindblad operators, when the generator was built from
    /// them.
    pub fn lindblad_data(&self) -> Option<(&CMatrix, &[CMatrix])> {
        match &self.provenance {
            Provenance::Lindblad {
                hamiltonian,
                operators,
            } => Some((hamiltonian, operators)),
            _ => None,
        }
    }

    /// `𝓛(X)` without dimension checks.
    pub(crate) fn apply_unchecked(&self, x: &CMatrix) -> CMatrix {
        let n = self.dim;
        let v = CVector::from_column_slice(x.as_slice());
        let out = &self.matrix * v;
        CMatrix::from_column_slice(n, n, out.as_slice())
    }

    /// Largest violations of trace preservation and Hermiticity preservation
    /// over the matrix-unit basis `E_ij`.
    pub fn structure_deviation(&self) -> (f64, f64) {
        let n = self.dim;
        let col = |i: usize, j: usize| -> CMatrix {
            CMatrix::from_column_slice(n, n, self.matrix.column(i + n * j).as_slice())
        };
        let mut trace_dev = 0.0_f64;
        let mut herm_dev = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                let lij = col(i, j);
                trace_dev = trace_dev.max(lij.trace().norm());
                if i <= j {
                    // 𝓛(E_ji) must equal 𝓛(E_ij)†
                    let lji = col(j, i);
                    herm_dev = herm_dev.max((lji - lij.adjoint()).camax());
                }
            }
        }
        (trace_dev, herm_dev)
    }

    fn verify_structure(&self) -> Result<()> {
        let (trace_dev, herm_dev) = self.structure_deviation();
        if trace_dev > STRUCTURAL_TOL {
            return Err(Error::NotTracePreserving(trace_dev));
        }
        if herm_dev > STRUCTURAL_TOL {
            return Err(Error::NotHermiticityPreserving(herm_dev));
        }
        Ok(())
    }

    /// Choi matrix `C = Σ_ij E_ij ⊗ 𝓛(E_ij)`, indexed `(i·N + a, j·N + b)`.
    pub fn choi(&self) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n * n, n * n, |r, s| {
            let (i, a) = (r / n, r % n);
            let (j, b) = (s / n, s % n);
            self.matrix[(a + n * b, i + n * j)]
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn check_square(m: &CMatrix, dim: usize, what: &str) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be {dim}x{dim}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix, what: &'static str) -> Result<()> {
    if !linalg::all_finite(m) {
        return Err(Error::NonFinite(what));
    }
    let deviation = linalg::hermitian_deviation(m);
    if deviation > INPUT_HERMITIAN_TOL * m.norm().max(1.0) {
        return Err(Error::NotHermitian { what, deviation });
    }
    Ok(())
}

/// `vec(A X) = (I ⊗ A) vec(X)`.
fn left_mul(a: &CMatrix) -> CMatrix {
    linalg::identity(a.nrows()).kronecker(a)
}

/// `vec(X B) = (Bᵀ ⊗ I) vec(X)`.
fn right_mul(b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(&linalg::identity(b.nrows()))
}

/// `vec(A X B†) = (B̄ ⊗ A) vec(X)`.
fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.conjugate().kronecker(a)
}

fn hamiltonian_part(h: &CMatrix) -> CMatrix {
    (left_mul(h) - right_mul(h)) * c(0.0, -1.0)
}

/// Lindblad–GKS generator `−i[H,ρ] + Σ_α (F_α ρ F_α† − ½{F_α†F_α, ρ})`.
pub fn build_lindblad(hamiltonian: &CMatrix, operators: &[CMatrix]) -> Result<Liouvillian> {
    let n = hamiltonian.nrows();
    check_dim(n)?;
    check_square(hamiltonian, n, "Hamiltonian")?;
    check_hermitian(hamiltonian, "Hamiltonian")?;
    for f in operators {
        check_square(f, n, "Lindblad operator")?;
        if !linalg::all_finite(f) {
            return Err(Error::NonFinite("Lindblad operator"));
        }
    }
    let mut matrix = hamiltonian_part(hamiltonian);
    for f in operators {
        let fdf = f.adjoint() * f;
        matrix += sandwich(f, f) - (left_mul(&fdf) + right_mul(&fdf)).scale(0.5);
    }
    Ok(Liouvillian {
        dim: n,
        matrix,
        provenance: Provenance::Lindblad {
            hamiltonian: hamiltonian.clone(),
            operators: operators.to_vec(),
        },
    })
}

/// General GKS generator `−i[H,ρ] + Σ_ij K_ij (G_i ρ G_j† − ½{G_j†G_i, ρ})`
/// with Hermitian but possibly indefinite `K`.
pub fn build_kossakowski(
    hamiltonian: &CMatrix,
    basis: &[CMatrix],
    coefficients: &CMatrix,
) -> Result<Liouvillian> {
    let n = hamiltonian.nrows();
    check_dim(n)?;
    check_square(hamiltonian, n, "Hamiltonian")?;
    check_hermitian(hamiltonian, "Hamiltonian")?;
    for g in basis {
        check_square(g, n, "basis operator")?;
        if !linalg::all_finite(g) {
            return Err(Error::NonFinite("basis operator"));
        }
    }
    check_square(coefficients, basis.len(), "Kossakowski matrix")?;
    check_hermitian(coefficients, "Kossakowski matrix")?;

    let mut matrix = hamiltonian_part(hamiltonian);
    for (i, gi) in basis.iter().enumerate() {
        for (j, gj) in basis.iter().enumerate() {
            let k = coefficients[(i, j)];
            if k == ZERO {
                continue;
            }
            let gjgi = gj.adjoint() * gi;
            matrix += (sandwich(gi, gj) - (left_mul(&gjgi) + right_mul(&gjgi)).scale(0.5)) * k;
        }
    }
    Ok(Liouvillian {
        dim: n,
        matrix,
        provenance: Provenance::Kossakowski {
            hamiltonian: hamiltonian.clone(),
            basis: basis.to_vec(),
            coefficients: coefficients.clone(),
        },
    })
}

/// `𝓛(X)`.
pub fn apply(lv: &Liouvillian, x: &CMatrix) -> Result<CMatrix> {
    check_square(x, lv.dim, "operator")?;
    Ok(lv.apply_unchecked(x))
}

/// Least eigenvalue of the Choi matrix compressed to the complement of the
/// maximally entangled vector. Non-negative exactly for generators that
/// admit a Lindblad representation.
pub fn conditional_choi_min_eigenvalue(lv: &Liouvillian) -> f64 {
    let n = lv.dim;
    let mut omega = CVector::zeros(n * n);
    for i in 0..n {
        omega[i * n + i] = ONE;
    }
    omega /= c((n as f64).sqrt(), 0.0);
    let q = linalg::complement_basis(&omega);
    let compressed = q.adjoint() * lv.choi() * &q;
    linalg::min_eigenvalue(&compressed)
}

/// Whether 𝓛 is conditionally completely positive, i.e. generates a CP
/// semigroup and has a Lindblad form.
pub fn is_cp_generator(lv: &Liouvillian) -> bool {
    conditional_choi_min_eigenvalue(lv) >= -STRUCTURAL_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassTag {
    Cp,
    PositiveNotCp,
    NotPositive,
    Undetermined,
}

impl ClassTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Cp => "CP",
            ClassTag::PositiveNotCp => "positive (not CP)",
            ClassTag::NotPositive => "NOT positive",
            ClassTag::Undetermined => "undetermined",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            ClassTag::Cp => "cp",
            ClassTag::PositiveNotCp => "positive_not_cp",
            ClassTag::NotPositive => "not_positive",
            ClassTag::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of [`check_positivity`].
///
/// `NotPositive` is a proof (the witness state has a negative transition
/// rate). The other tags only record that no violation was found.
#[derive(Clone, Debug)]
pub struct GeneratorClass {
    pub tag: ClassTag,
    /// State at which the least `W` eigenvalue was found.
    pub witness: Option<PureState>,
    /// Least eigenvalue of `W(ψ)` on the complement of ψ over all states tried.
    pub min_eigenvalue: f64,
    pub choi_min_eigenvalue: f64,
    pub samples: usize,
}

/// Least eigenvalue of `W(ψ)` on the orthogonal complement of ψ.
pub fn transition_min_eigenvalue(lv: &Liouvillian, psi: &PureState) -> f64 {
    transition_spectrum(lv, psi)
        .rates
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// Searches for states with a negative transition rate.
///
/// Draws `n_samples` Haar-random states (sample `k` uses stream `k` of the
/// ChaCha generator seeded with `seed`), then optionally polishes the worst
/// one by a shrinking random local search before concluding.
pub fn check_positivity(
    lv: &Liouvillian,
    n_samples: usize,
    refine: bool,
    seed: u64,
) -> GeneratorClass {
    let n_samples = n_samples.max(1);
    let n = lv.dim;
    let (worst_value, worst_vec) = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let v = linalg::random_unit_vector(&mut rng, n);
            let value = transition_min_eigenvalue(lv, &PureState::from_vector_unchecked(v.clone()));
            (value, k, v)
        })
        .reduce_with(|a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a })
        .map(|(value, _, v)| (value, v))
        .expect("at least one sample");

    let (min_eigenvalue, witness) = if refine {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        refine_minimum(lv, worst_vec, worst_value, &mut rng)
    } else {
        (worst_value, worst_vec)
    };

    let choi_min_eigenvalue = conditional_choi_min_eigenvalue(lv);
    let tag = if min_eigenvalue < -NEGATIVITY_TOL {
        ClassTag::NotPositive
    } else if choi_min_eigenvalue >= -STRUCTURAL_TOL {
        ClassTag::Cp
    } else if min_eigenvalue > NEGATIVITY_TOL {
        ClassTag::PositiveNotCp
    } else {
        // The least rate found sits inside the tolerance band; sampling
        // cannot tell a boundary generator from a slightly non-positive one.
        ClassTag::Undetermined
    };
    GeneratorClass {
        tag,
        witness: Some(PureState::from_vector_unchecked(witness)),
        min_eigenvalue,
        choi_min_eigenvalue,
        samples: n_samples,
    }
}

/// Random local search minimizing the least transition rate.
fn refine_minimum<R: Rng>(
    lv: &Liouvillian,
    start: CVector,
    start_value: f64,
    rng: &mut R,
) -> (f64, CVector) {
    let n = start.len();
    let mut best = start;
    let mut best_value = start_value;
    let mut step = 0.1;
    let mut failures = 0;
    for _ in 0..4000 {
        if step < 1e-9 {
            break;
        }
        let direction = CVector::from_fn(n, |_, _| linalg::complex_normal(rng));
        let trial = &best + direction * c(step, 0.0);
        let trial = &trial / c(trial.norm(), 0.0);
        let value = transition_min_eigenvalue(lv, &PureState::from_vector_unchecked(trial.clone()));
        if value < best_value {
            best = trial;
            best_value = value;
            failures = 0;
        } else {
            failures += 1;
            if failures >= 25 {
                step *= 0.5;
                failures = 0;
            }
        }
    }
    (best_value, best)
}
