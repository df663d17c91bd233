// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration and generator description files.
//!
//! Complex numbers are written as `[re, im]` pairs and matrices as flat
//! row-major lists of pairs. A generator description looks like
//!
//! ```toml
//! dimension = 2
//! hamiltonian = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]
//!
//! [[lindblad]]
//! entries = [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
//! ```
//!
//! or, with a possibly indefinite Kossakowski matrix,
//!
//! ```toml
//! dimension = 2
//!
//! [kossakowski]
//! basis = [[...], [...], [...]]
//! coefficients = [[1.0, 0.0], [0.0, 0.0], ...]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::generators::{build_kossakowski, build_lindblad, Liouvillian, PureState};
use crate::linalg::{self, CMatrix, CVector};
use crate::models;
use crate::trajectories::{NoisePolicy, TrajectoryConfig, Unraveling};
use crate::{Error, Result};

pub type Pairs = Vec<[f64; 2]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntries {
    pub entries: Pairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KossakowskiData {
    pub basis: Vec<Pairs>,
    pub coefficients: Pairs,
}

/// Generator description file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDescription {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<Pairs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lindblad: Option<Vec<OperatorEntries>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kossakowski: Option<KossakowskiData>,
}

fn square_from_pairs(n: usize, pairs: &[[f64; 2]], what: &str) -> Result<CMatrix> {
    linalg::matrix_from_pairs(n, n, pairs).ok_or_else(|| {
        Error::Config(format!(
            "{what} needs {} entries, got {}",
            n * n,
            pairs.len()
        ))
    })
}

impl GeneratorDescription {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<Liouvillian> {
        let n = self.dimension;
        let h = match &self.hamiltonian {
            Some(pairs) => square_from_pairs(n, pairs, "hamiltonian")?,
            None => CMatrix::zeros(n, n),
        };
        match (&self.lindblad, &self.kossakowski) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either lindblad operators or kossakowski data, not both".into(),
            )),
            (Some(ops), None) => {
                let ops = ops
                    .iter()
                    .map(|op| square_from_pairs(n, &op.entries, "lindblad operator"))
                    .collect::<Result<Vec<_>>>()?;
                build_lindblad(&h, &ops)
            }
            (None, Some(k)) => {
                let basis = k
                    .basis
                    .iter()
                    .map(|b| square_from_pairs(n, b, "basis operator"))
                    .collect::<Result<Vec<_>>>()?;
                let coeffs = square_from_pairs(basis.len(), &k.coefficients, "coefficients")?;
                build_kossakowski(&h, &basis, &coeffs)
            }
            (None, None) => build_lindblad(&h, &[]),
        }
    }
}

/// Where the generator comes from; exactly one of `model`, `file` and
/// `description` must be set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<GeneratorDescription>,
}

impl GeneratorSource {
    pub fn model(name: &str, params: &[(&str, f64)]) -> Self {
        Self {
            model: Some(name.to_string()),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ..Self::default()
        }
    }

    /// Replaces a `file` reference with the parsed description, resolving
    /// relative paths against `base`.
    pub fn inlined(&self, base: &Path) -> Result<Self> {
        match &self.file {
            Some(path) => {
                let path = if path.is_relative() {
                    base.join(path)
                } else {
                    path.clone()
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
                Ok(Self {
                    description: Some(GeneratorDescription::from_toml(&text)?),
                    ..Self::default()
                })
            }
            None => Ok(self.clone()),
        }
    }

    pub fn build(&self, base: &Path) -> Result<Liouvillian> {
        let set = [
            self.model.is_some(),
            self.file.is_some(),
            self.description.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if set != 1 {
            return Err(Error::Config(
                "generator needs exactly one of 'model', 'file' or 'description'".into(),
            ));
        }
        if let Some(name) = &self.model {
            return models::build_model(name, &self.params);
        }
        if !self.params.is_empty() {
            return Err(Error::Config(
                "'params' only applies to catalog models".into(),
            ));
        }
        match self.inlined(base)?.description {
            Some(d) => d.build(),
            None => unreachable!("inlined source always has a description"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Pairs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<usize>,
}

impl InitialState {
    pub fn build(&self, dim: usize) -> Result<PureState> {
        match (&self.amplitudes, &self.bloch, &self.basis) {
            (Some(a), None, None) => {
                if a.len() != dim {
                    return Err(Error::Config(format!(
                        "initial state needs {dim} amplitudes, got {}",
                        a.len()
                    )));
                }
                PureState::new(CVector::from_iterator(
                    dim,
                    a.iter().map(|p| linalg::c(p[0], p[1])),
                ))
            }
            (None, Some([x, y, z]), None) => {
                if dim != 2 {
                    return Err(Error::Config(
                        "bloch initial state needs dimension 2".into(),
                    ));
                }
                PureState::from_bloch(*x, *y, *z)
            }
            (None, None, Some(k)) if *k < dim => Ok(PureState::basis(dim, *k)),
            (None, None, Some(k)) => Err(Error::Config(format!("basis state {k} out of range"))),
            _ => Err(Error::Config(
                "initial_state needs exactly one of 'amplitudes', 'bloch' or 'basis'".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnravelingKind {
    Qsd,
    DiffusiveS,
    Jump,
    CpQsd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnravelingSection {
    pub kind: UnravelingKind,
    /// Named `s` policy for `diffusive-s`: `"maximal"` (`s = 1`) or `"qsd"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    /// `(N−1)×(N−1)` s matrix for `diffusive-s`, row-major pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Pairs>,
    /// Constant `N×N` S matrix for `diffusive-s`, row-major pairs.
    #[serde(default, rename = "S", skip_serializing_if = "Option::is_none")]
    pub big_s: Option<Pairs>,
}

impl UnravelingSection {
    pub fn of(kind: UnravelingKind) -> Self {
        Self {
            kind,
            policy: None,
            s: None,
            big_s: None,
        }
    }

    pub fn build(&self, dim: usize) -> Result<Unraveling> {
        let extras = [
            self.policy.is_some(),
            self.s.is_some(),
            self.big_s.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        match self.kind {
            UnravelingKind::Qsd | UnravelingKind::Jump | UnravelingKind::CpQsd if extras > 0 => {
                Err(Error::Config(
                    "'policy', 's' and 'S' only apply to diffusive-s".into(),
                ))
            }
            UnravelingKind::Qsd => Ok(Unraveling::qsd()),
            UnravelingKind::Jump => Ok(Unraveling::Jump),
            UnravelingKind::CpQsd => Ok(Unraveling::CpQsd),
            UnravelingKind::DiffusiveS => {
                if extras != 1 {
                    return Err(Error::Config(
                        "diffusive-s needs exactly one of 'policy', 's' or 'S'".into(),
                    ));
                }
                if let Some(policy) = &self.policy {
                    return match policy.as_str() {
                        "maximal" => Ok(Unraveling::Diffusive(NoisePolicy::maximal(dim))),
                        "qsd" => Ok(Unraveling::qsd()),
                        other => Err(Error::Config(format!("unknown s policy '{other}'"))),
                    };
                }
                if let Some(s) = &self.s {
                    return Ok(Unraveling::Diffusive(NoisePolicy::SFrame(
                        square_from_pairs(dim - 1, s, "s")?,
                    )));
                }
                let big_s = self.big_s.as_ref().expect("one extra is set");
                Ok(Unraveling::Diffusive(NoisePolicy::Explicit(
                    square_from_pairs(dim, big_s, "S")?,
                )))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_true")]
    pub refine: bool,
}

impl Default for ClassifySection {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            refine: true,
        }
    }
}

fn default_samples() -> usize {
    1000
}

fn default_true() -> bool {
    true
}

fn default_stride() -> usize {
    1
}

fn default_tolerance() -> f64 {
    0.03
}

fn default_trajectories() -> usize {
    1000
}

/// A complete, serializable run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub save_trajectories: bool,
    pub generator: GeneratorSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unraveling: Option<UnravelingSection>,
    #[serde(default)]
    pub classify: ClassifySection,
    /// Directory relative paths are resolved against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Copy with file references inlined, suitable for writing next to the
    /// outputs and re-running from there.
    pub fn resolved(&self) -> Result<Self> {
        Ok(Self {
            generator: self.generator.inlined(&self.base_dir)?,
            out_dir: None,
            ..self.clone()
        })
    }

    pub fn build_generator(&self) -> Result<Liouvillian> {
        self.generator.build(&self.base_dir)
    }

    pub fn trajectory_config(&self, generator: Arc<Liouvillian>) -> Result<TrajectoryConfig> {
        let dim = generator.dim();
        let dt = self
            .dt
            .ok_or_else(|| Error::Config("missing 'dt'".into()))?;
        let t_final = self
            .t_final
            .ok_or_else(|| Error::Config("missing 't_final'".into()))?;
        let initial_state = self
            .initial_state
            .as_ref()
            .ok_or_else(|| Error::Config("missing [initial_state]".into()))?
            .build(dim)?;
        let unraveling = self
            .unraveling
            .as_ref()
            .ok_or_else(|| Error::Config("missing [unraveling]".into()))?
            .build(dim)?;
        let config = TrajectoryConfig {
            generator,
            initial_state,
            dt,
            t_final,
            unraveling,
            seed: self.seed,
            record_stride: self.record_stride,
        };
        config.validate()?;
        Ok(config)
    }
}
