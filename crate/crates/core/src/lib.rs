// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Stochastic pure-state unravelings of Markovian master equations.
//!
//! The crate works directly with the superoperator 𝓛 of `ρ̇ = 𝓛ρ` and the
//! representation-independent objects it induces at a pure state ψ:
//!
//! * `L = 𝓛(ψψ†)`,
//! * the transition rate operator `W = L − {L, ψψ†} + ⟨L⟩ψψ†`,
//! * the total rate `w = Tr W = −⟨L⟩`,
//! * the frictional drift `(L − ⟨L⟩)ψ`.
//!
//! Nothing here assumes a Lindblad form. Positive but not completely positive
//! generators are first-class: they are classified by the sign of `W`, and
//! both the jump process and every diffusive unraveling (parameterized by the
//! noise self-correlation `S`) run on them unchanged.
//!
//! Operators are dense `nalgebra` matrices. Superoperators act on
//! column-major vectorized operators, `vec(X)[i + N·j] = X[i, j]`, which is
//! also nalgebra's storage order.

pub mod cli;
pub mod config;
pub mod ensemble;
mod error;
pub mod generators;
pub mod linalg;
pub mod models;
pub mod noise;
pub mod rate_structures;
pub mod trajectories;

pub use error::{Error, Result};
pub use generators::{
    apply, build_kossakowski, build_lindblad, check_positivity, is_cp_generator, ClassTag,
    GeneratorClass, Liouvillian, Provenance, PureState,
};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use rate_structures::{compute_l, compute_rate_structure, reconstruct_rhs, RateStructure};

/// Largest Hilbert-space dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 16;

/// Tolerance for structural identities (trace and Hermiticity preservation).
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// A `W` eigenvalue below `-NEGATIVITY_TOL` is a positivity violation.
pub const NEGATIVITY_TOL: f64 = 1e-8;
