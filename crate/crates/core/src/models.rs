// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Ready-made generators: completely positive, positive but not CP, and not
//! positive, plus seeded random families for property tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::generators::{build_kossakowski, build_lindblad, ClassTag, Liouvillian};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::{Error, Result, MAX_DIM};

fn positive_rate(name: &str, gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {gamma}"
        )))
    }
}

fn check_random_dim(n: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// `F = √γ σ₋` with `σ₋ = |0⟩⟨1|`, `H = 0`.
pub fn amplitude_damping(gamma: f64) -> Result<Liouvillian> {
    positive_rate("gamma", gamma)?;
    build_lindblad(
        &CMatrix::zeros(2, 2),
        &[linalg::sigma_minus() * c(gamma.sqrt(), 0.0)],
    )
}

/// `F = √γ σ_z`, `H = 0`.
pub fn dephasing(gamma: f64) -> Result<Liouvillian> {
    positive_rate("gamma", gamma)?;
    build_lindblad(
        &CMatrix::zeros(2, 2),
        &[linalg::pauli_z() * c(gamma.sqrt(), 0.0)],
    )
}

/// `𝓛ρ = Σ_i g_i (σ_i ρ σ_i − ρ)`, any signs.
///
/// The Bloch components decay at rates `Γ_x = 2(g₂+g₃)`, `Γ_y = 2(g₁+g₃)`,
/// `Γ_z = 2(g₁+g₂)`. CP iff every `g_i ≥ 0`; positive iff every pairwise sum
/// is non-negative.
pub fn pauli(g1: f64, g2: f64, g3: f64) -> Result<Liouvillian> {
    if ![g1, g2, g3].iter().all(|g| g.is_finite()) {
        return Err(Error::InvalidParameter("pauli rates must be finite".into()));
    }
    let k = CMatrix::from_diagonal(&CVector::from_vec(vec![c(g1, 0.0), c(g2, 0.0), c(g3, 0.0)]));
    build_kossakowski(
        &CMatrix::zeros(2, 2),
        &[linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()],
        &k,
    )
}

/// Class the Pauli family should fall into, from the pairwise-sum rule.
pub fn pauli_expected_class(g1: f64, g2: f64, g3: f64) -> ClassTag {
    if g1 >= 0.0 && g2 >= 0.0 && g3 >= 0.0 {
        ClassTag::Cp
    } else if g1 + g2 >= 0.0 && g1 + g3 >= 0.0 && g2 + g3 >= 0.0 {
        ClassTag::PositiveNotCp
    } else {
        ClassTag::NotPositive
    }
}

/// Random Lindblad generator: Gaussian Hamiltonian and `n_ops` Gaussian
/// operators scaled by `1/√N`. Deterministic in `seed`.
pub fn random_lindblad(n: usize, n_ops: usize, seed: u64) -> Result<Liouvillian> {
    check_random_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = c(1.0 / (n as f64).sqrt(), 0.0);
    let h = linalg::hermitian_part(&linalg::ginibre(&mut rng, n, n)) * scale;
    let ops: Vec<CMatrix> = (0..n_ops)
        .map(|_| linalg::ginibre(&mut rng, n, n) * scale)
        .collect();
    build_lindblad(&h, &ops)
}

/// Orthonormal basis of traceless `N×N` matrices (generalized Gell-Mann,
/// `Tr G_i† G_j = δ_ij`).
pub fn gell_mann_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n - 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(j, k)] = c(s, 0.0);
            sym[(k, j)] = c(s, 0.0);
            basis.push(sym);
            let mut anti = CMatrix::zeros(n, n);
            anti[(j, k)] = c(0.0, -s);
            anti[(k, j)] = c(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..n {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut d = CMatrix::zeros(n, n);
        for m in 0..l {
            d[(m, m)] = c(norm, 0.0);
        }
        d[(l, l)] = c(-(l as f64) * norm, 0.0);
        basis.push(d);
    }
    basis
}

/// Random GKS generator in a randomly rotated orthonormal traceless basis.
///
/// The Kossakowski matrix has eigenvalues drawn from `[0.2, 1.2)` except the
/// last, which is `−neg_weight`. `neg_weight = 0` gives a CP generator;
/// otherwise the class has to be determined by the classifier.
pub fn random_gks(n: usize, seed: u64, neg_weight: f64) -> Result<Liouvillian> {
    check_random_dim(n)?;
    if !(neg_weight >= 0.0 && neg_weight.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "neg_weight must be non-negative, got {neg_weight}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = linalg::random_unitary(&mut rng, n);
    let basis: Vec<CMatrix> = gell_mann_basis(n)
        .iter()
        .map(|g| &u * g * u.adjoint())
        .collect();
    let d = basis.len();
    let mut spectrum: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.2)).collect();
    spectrum[d - 1] = -neg_weight;
    let v = linalg::random_unitary(&mut rng, d);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        spectrum.iter().map(|&x| c(x, 0.0)),
    ));
    let k = linalg::hermitian_part(&(&v * diag * v.adjoint()));
    let h =
        linalg::hermitian_part(&linalg::ginibre(&mut rng, n, n)) * c(1.0 / (n as f64).sqrt(), 0.0);
    build_kossakowski(&h, &basis, &k)
}

/// Catalog entry.
#[derive(Clone, Debug)]
pub struct ModelDescriptor {
    pub name: &'static str,
    pub parameters: BTreeMap<String, f64>,
    pub expected_class: ClassTag,
    pub notes: &'static str,
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Named models with their default parameters, in a fixed order.
pub fn catalog() -> Vec<ModelDescriptor> {
    vec![
        ModelDescriptor {
            name: "amplitude_damping",
            parameters: params(&[("gamma", 1.0)]),
            expected_class: ClassTag::Cp,
            notes: "F = sqrt(gamma) sigma_-, H = 0; |1> decays to the dark state |0>",
        },
        ModelDescriptor {
            name: "dephasing",
            parameters: params(&[("gamma", 1.0)]),
            expected_class: ClassTag::Cp,
            notes: "F = sqrt(gamma) sigma_z, H = 0",
        },
        ModelDescriptor {
            name: "pauli",
            parameters: params(&[("g1", 1.0), ("g2", 1.0), ("g3", -0.4)]),
            expected_class: pauli_expected_class(1.0, 1.0, -0.4),
            notes: "sum_i g_i (s_i rho s_i - rho); CP iff all g_i >= 0, positive iff all g_i + g_j >= 0",
        },
        ModelDescriptor {
            name: "random_lindblad",
            parameters: params(&[("n", 3.0), ("n_ops", 2.0), ("seed", 0.0)]),
            expected_class: ClassTag::Cp,
            notes: "Gaussian H and Lindblad operators",
        },
        ModelDescriptor {
            name: "random_gks",
            parameters: params(&[("n", 3.0), ("seed", 0.0), ("neg_weight", 0.0)]),
            expected_class: ClassTag::Undetermined,
            notes: "rotated traceless basis, Kossakowski matrix with one eigenvalue -neg_weight; class decided at run time",
        },
    ]
}

/// Builds a catalog model by name. Missing parameters take the catalog
/// defaults; unknown names and parameters are errors.
pub fn build_model(name: &str, parameters: &BTreeMap<String, f64>) -> Result<Liouvillian> {
    let entry = catalog()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| Error::Config(format!("unknown model '{name}'")))?;
    if let Some(unknown) = parameters
        .keys()
        .find(|k| !entry.parameters.contains_key(*k))
    {
        return Err(Error::Config(format!(
            "model '{name}' has no parameter '{unknown}'"
        )));
    }
    let get = |key: &str| {
        parameters
            .get(key)
            .copied()
            .unwrap_or(entry.parameters[key])
    };
    let as_count = |key: &str| -> Result<usize> {
        let v = get(key);
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(Error::Config(format!(
                "parameter '{key}' must be a non-negative integer, got {v}"
            )))
        }
    };
    match name {
        "amplitude_damping" => amplitude_damping(get("gamma")),
        "dephasing" => dephasing(get("gamma")),
        "pauli" => pauli(get("g1"), get("g2"), get("g3")),
        "random_lindblad" => {
            random_lindblad(as_count("n")?, as_count("n_ops")?, as_count("seed")? as u64)
        }
        "random_gks" => random_gks(as_count("n")?, as_count("seed")? as u64, get("neg_weight")),
        _ => unreachable!("catalog and dispatch disagree"),
    }
}
