// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Ground truth and validation: fixed-step RK4 integration of `ρ̇ = 𝓛ρ`,
//! ensemble averages of trajectories with Monte Carlo error bars, and the
//! trace-distance comparison between the two.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::generators::{Liouvillian, PureState};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::trajectories::{run_trajectory_indexed, TrajectoryConfig, TrajectoryRecord};
use crate::{Error, Result, NEGATIVITY_TOL, STRUCTURAL_TOL};

/// Trajectories per parallel work unit. Chunks are merged in index order so
/// results do not depend on scheduling.
const CHUNK: usize = 64;

/// Density matrices on a time grid.
#[derive(Clone, Debug)]
pub struct DensitySeries {
    pub times: Vec<f64>,
    pub matrices: Vec<CMatrix>,
}

impl DensitySeries {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    /// Bloch vectors `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)` of a qubit series.
    pub fn bloch(&self) -> Option<Vec<[f64; 3]>> {
        (self.dim() == 2).then(|| self.matrices.iter().map(bloch_of).collect())
    }
}

pub fn bloch_of(rho: &CMatrix) -> [f64; 3] {
    [
        2.0 * rho[(0, 1)].re,
        -2.0 * rho[(0, 1)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ]
}

/// `½ Σ |eig(ρ − σ)|`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    0.5 * linalg::trace_norm(&(rho - sigma))
}

fn check_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch(
            "density matrix must be square".into(),
        ));
    }
    let herm = linalg::hermitian_deviation(rho);
    if herm > STRUCTURAL_TOL {
        return Err(Error::NotHermitian {
            what: "initial density matrix",
            deviation: herm,
        });
    }
    let trace = rho.trace();
    if (trace - linalg::ONE).norm() > STRUCTURAL_TOL {
        return Err(Error::InvalidParameter(format!(
            "initial density matrix has trace {trace}"
        )));
    }
    let min = linalg::min_eigenvalue(rho);
    if min < -STRUCTURAL_TOL {
        return Err(Error::InvalidParameter(format!(
            "initial density matrix has negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// Fixed-step RK4 on the vectorized master equation, recording every
/// `record_stride` steps (the same grid as [`TrajectoryConfig::record_times`]).
pub fn integrate_master_equation(
    lv: &Liouvillian,
    rho0: &CMatrix,
    dt: f64,
    t_final: f64,
    record_stride: usize,
) -> Result<DensitySeries> {
    let n = lv.dim();
    if rho0.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "initial density matrix must be {n}x{n}"
        )));
    }
    check_density(rho0)?;
    if !(dt > 0.0 && dt.is_finite() && t_final > 0.0 && dt <= t_final) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < dt <= t_final, got dt = {dt}, t_final = {t_final}"
        )));
    }
    if record_stride == 0 {
        return Err(Error::InvalidParameter(
            "record_stride must be positive".into(),
        ));
    }
    let m = lv.matrix();
    let n_steps = (t_final / dt).round().max(1.0) as usize;
    let h = c(dt, 0.0);
    let mut x = CVector::from_column_slice(rho0.as_slice());
    let mut times = vec![0.0];
    let mut matrices = vec![rho0.clone()];
    for k in 0..n_steps {
        let k1 = m * &x;
        let k2 = m * (&x + &k1 * (h * 0.5));
        let k3 = m * (&x + &k2 * (h * 0.5));
        let k4 = m * (&x + &k3 * h);
        x += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * (h / 6.0);
        if (k + 1) % record_stride == 0 {
            let t = (k + 1) as f64 * dt;
            let rho = CMatrix::from_column_slice(n, n, x.as_slice());
            let drift = (rho.trace() - linalg::ONE)
                .norm()
                .max(linalg::hermitian_deviation(&rho));
            if !linalg::all_finite(&rho) || drift > STRUCTURAL_TOL {
                return Err(Error::Unstable { time: t, drift });
            }
            times.push(t);
            matrices.push(rho);
        }
    }
    Ok(DensitySeries { times, matrices })
}

/// Least eigenvalue over a series; used to check that positive generators
/// keep `ρ(t) ≥ 0`.
pub fn min_eigenvalue_over(series: &DensitySeries) -> f64 {
    series
        .matrices
        .iter()
        .map(linalg::min_eigenvalue)
        .fold(f64::INFINITY, f64::min)
}

/// Running sums of `ψψ†` and of the squares of its real and imaginary parts
/// at every recorded time.
#[derive(Clone, Debug)]
pub struct EnsembleAccumulator {
    times: Vec<f64>,
    count: usize,
    sum: Vec<CMatrix>,
    sum_sq_re: Vec<DMatrix<f64>>,
    sum_sq_im: Vec<DMatrix<f64>>,
}

impl EnsembleAccumulator {
    pub fn new(times: Vec<f64>, dim: usize) -> Self {
        let len = times.len();
        Self {
            times,
            count: 0,
            sum: vec![CMatrix::zeros(dim, dim); len],
            sum_sq_re: vec![DMatrix::zeros(dim, dim); len],
            sum_sq_im: vec![DMatrix::zeros(dim, dim); len],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn add(&mut self, record: &TrajectoryRecord) -> Result<()> {
        if record.times.len() != self.times.len()
            || record.times.iter().zip(&self.times).any(|(a, b)| a != b)
        {
            return Err(Error::GridMismatch);
        }
        self.add_states(&record.states);
        Ok(())
    }

    fn add_states(&mut self, states: &[PureState]) {
        for (k, psi) in states.iter().enumerate() {
            let rho = psi.density();
            for (idx, z) in rho.iter().enumerate() {
                self.sum_sq_re[k].as_mut_slice()[idx] += z.re * z.re;
                self.sum_sq_im[k].as_mut_slice()[idx] += z.im * z.im;
            }
            self.sum[k] += rho;
        }
        self.count += 1;
    }

    /// Combines two accumulators over the same grid.
    pub fn merge(mut self, other: &EnsembleAccumulator) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::GridMismatch);
        }
        for k in 0..self.times.len() {
            self.sum[k] += &other.sum[k];
            self.sum_sq_re[k] += &other.sum_sq_re[k];
            self.sum_sq_im[k] += &other.sum_sq_im[k];
        }
        self.count += other.count;
        Ok(self)
    }

    pub fn finish(&self) -> Result<EnsembleResult> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("empty ensemble".into()));
        }
        let m = self.count as f64;
        let mut matrices = Vec::with_capacity(self.times.len());
        let mut variances = Vec::with_capacity(self.times.len());
        for k in 0..self.times.len() {
            let mean = &self.sum[k] / c(m, 0.0);
            let n = mean.nrows();
            let var = DMatrix::from_fn(n, n, |i, j| {
                let z = mean[(i, j)];
                let var_re = (self.sum_sq_re[k][(i, j)] / m - z.re * z.re).max(0.0);
                let var_im = (self.sum_sq_im[k][(i, j)] / m - z.im * z.im).max(0.0);
                c(var_re / m, var_im / m)
            });
            matrices.push(mean);
            variances.push(var);
        }
        Ok(EnsembleResult {
            series: DensitySeries {
                times: self.times.clone(),
                matrices,
            },
            variances,
            count: self.count,
        })
    }
}

/// Ensemble mean with per-entry Monte Carlo variances.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub series: DensitySeries,
    /// Variance of the mean of each entry, real and imaginary parts packed as
    /// `re + i·im`.
    variances: Vec<DMatrix<crate::Complex64>>,
    pub count: usize,
}

impl EnsembleResult {
    /// Standard error of `Re ρ_ij` and `Im ρ_ij` at time index `k`.
    pub fn std_error(&self, k: usize, i: usize, j: usize) -> (f64, f64) {
        let v = self.variances[k][(i, j)];
        (v.re.sqrt(), v.im.sqrt())
    }

    /// Monte Carlo error of `ρ̂(t_k)` in trace-distance units: half the
    /// trace norm of the matrix of entrywise standard errors.
    pub fn mc_error(&self, k: usize) -> f64 {
        aggregate_error(&[&self.variances[k]])
    }

    pub fn mc_errors(&self) -> Vec<f64> {
        (0..self.series.times.len())
            .map(|k| self.mc_error(k))
            .collect()
    }

    /// Standard errors of the Bloch components at time index `k`.
    pub fn bloch_std_error(&self, k: usize) -> Option<[f64; 3]> {
        (self.series.dim() == 2).then(|| {
            let (re01, im01) = self.std_error(k, 0, 1);
            let (re00, _) = self.std_error(k, 0, 0);
            // ρ11 = 1 − ρ00, so z = 2ρ00 − 1
            [2.0 * re01, 2.0 * im01, 2.0 * re00]
        })
    }
}

/// Half the trace norm of the symmetrized entrywise standard errors of a
/// sum of independent estimates.
fn aggregate_error(variances: &[&DMatrix<crate::Complex64>]) -> f64 {
    let n = variances[0].nrows();
    let se = CMatrix::from_fn(n, n, |i, j| {
        let total: f64 = variances
            .iter()
            .map(|v| {
                let (a, b) = (v[(i, j)], v[(j, i)]);
                0.5 * (a.re + a.im + b.re + b.im)
            })
            .sum();
        c(total.sqrt(), 0.0)
    });
    0.5 * linalg::trace_norm(&se)
}

/// Monte Carlo error of the difference of two independent ensembles at time
/// index `k`, in the same units as [`EnsembleResult::mc_error`].
pub fn combined_mc_error(a: &EnsembleResult, b: &EnsembleResult, k: usize) -> f64 {
    aggregate_error(&[&a.variances[k], &b.variances[k]])
}

/// `ρ̂(t) = (1/M) Σ ψ_i(t)ψ_i(t)†` over records sharing a time grid.
pub fn ensemble_average(records: &[TrajectoryRecord]) -> Result<DensitySeries> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidParameter("no trajectories to average".into()))?;
    let dim = first.states.first().map_or(0, |s| s.dim());
    let mut acc = EnsembleAccumulator::new(first.times.clone(), dim);
    for record in records {
        acc.add(record)?;
    }
    Ok(acc.finish()?.series)
}

/// Runs trajectories `0..m` of `config` in parallel and accumulates them.
/// With `keep` set the individual records are returned too.
pub fn run_ensemble(
    config: &TrajectoryConfig,
    m: usize,
    keep: bool,
) -> Result<(EnsembleResult, Vec<TrajectoryRecord>)> {
    config.validate()?;
    if m == 0 {
        return Err(Error::InvalidParameter(
            "ensemble size must be positive".into(),
        ));
    }
    let times = config.record_times();
    let dim = config.generator.dim();
    let n_chunks = m.div_ceil(CHUNK);
    let chunks: Vec<(EnsembleAccumulator, Vec<TrajectoryRecord>, Vec<Error>)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = EnsembleAccumulator::new(times.clone(), dim);
            let mut kept = Vec::new();
            let mut errors = Vec::new();
            let end = ((chunk + 1) * CHUNK).min(m);
            for index in chunk * CHUNK..end {
                match run_trajectory_indexed(config, index as u64) {
                    Ok(record) => {
                        acc.add_states(&record.states);
                        if keep {
                            kept.push(record);
                        }
                    }
                    Err(e) => errors.push(e),
                }
            }
            (acc, kept, errors)
        })
        .collect();

    let mut total = EnsembleAccumulator::new(times, dim);
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (acc, kept, errs) in chunks {
        total = total.merge(&acc)?;
        records.extend(kept);
        errors.extend(errs);
    }
    if !errors.is_empty() {
        let failed = errors.len();
        return Err(Error::EnsembleFailed {
            failed,
            total: m,
            first: Box::new(errors.swap_remove(0)),
        });
    }
    Ok((total.finish()?, records))
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub times: Vec<f64>,
    /// Trace distance between ensemble mean and master equation per time.
    pub distances: Vec<f64>,
    /// Monte Carlo error estimate per time.
    pub mc_errors: Vec<f64>,
    pub max_trace_distance: f64,
    /// Largest Monte Carlo error over the grid.
    pub mc_error_estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub n_trajectories: usize,
}

/// Compares a trajectory ensemble with the ME solution and reports the
/// per-time distances.
pub fn compare(
    ensemble: &EnsembleResult,
    reference: &DensitySeries,
    tolerance: f64,
) -> Result<ValidationReport> {
    if ensemble.series.times.len() != reference.times.len() {
        return Err(Error::GridMismatch);
    }
    let distances: Vec<f64> = ensemble
        .series
        .matrices
        .iter()
        .zip(&reference.matrices)
        .map(|(a, b)| trace_distance(a, b))
        .collect();
    let mc_errors = ensemble.mc_errors();
    let max_trace_distance = distances.iter().copied().fold(0.0, f64::max);
    let mc_error_estimate = mc_errors.iter().copied().fold(0.0, f64::max);
    Ok(ValidationReport {
        times: reference.times.clone(),
        distances,
        mc_errors,
        max_trace_distance,
        mc_error_estimate,
        tolerance,
        pass: max_trace_distance <= tolerance,
        n_trajectories: ensemble.count,
    })
}

/// Runs `m ≥ 100` trajectories and checks that their mean tracks the master
/// equation to within `tolerance` in trace distance at every recorded time.
pub fn validate_unraveling(
    config: &TrajectoryConfig,
    m: usize,
    tolerance: f64,
) -> Result<ValidationReport> {
    if m < 100 {
        return Err(Error::InvalidParameter(format!(
            "validation needs at least 100 trajectories, got {m}"
        )));
    }
    let (ensemble, _) = run_ensemble(config, m, false)?;
    let reference = integrate_master_equation(
        &config.generator,
        &config.initial_state.density(),
        config.dt,
        config.t_final,
        config.record_stride,
    )?;
    compare(&ensemble, &reference, tolerance)
}

/// Sanity check used by validation of non-CP generators: the reference
/// solution must stay positive.
pub fn reference_is_positive(series: &DensitySeries) -> bool {
    min_eigenvalue_over(series) >= -NEGATIVITY_TOL
}
