// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Command implementations behind the `unravel` binary.
//!
//! Each command returns the process exit code: 0 on success, 2 when the
//! physics says no (generator not positive, validation failed, positivity
//! violated along a trajectory) and 1 for configuration and I/O errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::config::RunConfig;
use crate::ensemble::{self, bloch_of, DensitySeries, EnsembleResult, ValidationReport};
use crate::generators::{check_positivity, ClassTag, PureState};
use crate::models;
use crate::trajectories::TrajectoryRecord;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SCIENTIFIC: i32 = 2;

pub const DEFAULT_OUT_DIR: &str = "unravel-out";

/// Exit code for an error that escaped a command.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_scientific() {
        EXIT_SCIENTIFIC
    } else {
        EXIT_CONFIG
    }
}

/// Walks nested step and ensemble failures down to a positivity witness.
pub fn witness_of(err: &Error) -> Option<&PureState> {
    match err {
        Error::NotPositiveAtState { witness, .. } => Some(witness),
        Error::StepFailed { source, .. } => witness_of(source),
        Error::EnsembleFailed { first, .. } => witness_of(first),
        _ => None,
    }
}

pub fn format_state(psi: &PureState) -> String {
    let parts: Vec<String> = psi
        .vector()
        .iter()
        .map(|z| format!("[{}, {}]", z.re, z.im))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--workers must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn cmd_list_models(out: &mut dyn Write) -> Result<i32> {
    for model in models::catalog() {
        let params: Vec<String> = model
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        writeln!(out, "{}", model.name)?;
        writeln!(out, "  parameters: {}", params.join(", "))?;
        writeln!(out, "  default class: {}", model.expected_class)?;
        writeln!(out, "  {}", model.notes)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_classify(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let lv = config.build_generator()?;
    let class = check_positivity(
        &lv,
        config.classify.samples,
        config.classify.refine,
        config.seed,
    );
    writeln!(out, "class: {}", class.tag)?;
    writeln!(out, "min_transition_rate: {:e}", class.min_eigenvalue)?;
    writeln!(out, "choi_min_eigenvalue: {:e}", class.choi_min_eigenvalue)?;
    let verdict = if class.tag == ClassTag::Cp {
        "CP"
    } else {
        "not CP"
    };
    writeln!(out, "choi_verdict: {verdict}")?;
    if let Some(w) = &class.witness {
        writeln!(out, "witness: {}", format_state(w))?;
    }
    writeln!(out, "samples: {}", class.samples)?;
    Ok(if class.tag == ClassTag::NotPositive {
        EXIT_SCIENTIFIC
    } else {
        EXIT_OK
    })
}

/// CSV header for a density-matrix series of dimension `dim`.
pub fn ensemble_csv_header(dim: usize) -> String {
    let mut header = String::from("t");
    for i in 0..dim {
        for j in i..dim {
            let _ = write!(header, ",re_rho_{i}_{j},im_rho_{i}_{j}");
        }
    }
    if dim == 2 {
        header.push_str(",bloch_x,bloch_y,bloch_z");
    }
    header
}

pub fn ensemble_csv(series: &DensitySeries) -> String {
    let dim = series.dim();
    let mut text = ensemble_csv_header(dim);
    text.push('\n');
    for (t, rho) in series.times.iter().zip(&series.matrices) {
        let _ = write!(text, "{t}");
        for i in 0..dim {
            for j in i..dim {
                let z = rho[(i, j)];
                let _ = write!(text, ",{},{}", z.re, z.im);
            }
        }
        if dim == 2 {
            let [x, y, z] = bloch_of(rho);
            let _ = write!(text, ",{x},{y},{z}");
        }
        text.push('\n');
    }
    text
}

fn trajectories_csv(records: &[TrajectoryRecord]) -> String {
    let dim = records.first().map(|r| r.states[0].dim()).unwrap_or(0);
    let mut text = String::from("trajectory,t");
    for i in 0..dim {
        let _ = write!(text, ",re_psi_{i},im_psi_{i}");
    }
    text.push('\n');
    for record in records {
        for (t, psi) in record.times.iter().zip(&record.states) {
            let _ = write!(text, "{},{t}", record.index);
            for z in psi.vector().iter() {
                let _ = write!(text, ",{},{}", z.re, z.im);
            }
            text.push('\n');
        }
    }
    text
}

fn jumps_csv(records: &[TrajectoryRecord]) -> String {
    let mut text = String::from("trajectory,t\n");
    for record in records {
        for t in &record.jump_times {
            let _ = writeln!(text, "{},{t}", record.index);
        }
    }
    text
}

fn validation_csv(report: &ValidationReport) -> String {
    let mut text = String::from("t,trace_distance,mc_error\n");
    for ((t, d), e) in report
        .times
        .iter()
        .zip(&report.distances)
        .zip(&report.mc_errors)
    {
        let _ = writeln!(text, "{t},{d},{e}");
    }
    text
}

fn report_toml(report: &ValidationReport, seed: u64) -> String {
    format!(
        "pass = {}\nmax_trace_distance = {:?}\nmc_error_estimate = {:?}\ntolerance = {:?}\nn_trajectories = {}\nseed = {}\n",
        report.pass,
        report.max_trace_distance,
        report.mc_error_estimate,
        report.tolerance,
        report.n_trajectories,
        seed
    )
}

/// Output directory: command-line override, then config, then default.
pub fn out_dir(config: &RunConfig, cli_out: Option<&Path>) -> PathBuf {
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| config.out_dir.as_ref().map(|d| config.base_dir.join(d)))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn write_run_files(config: &RunConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config.resolved()?.to_toml()?)?;
    fs::write(dir.join("seed.txt"), format!("{}\n", config.seed))?;
    Ok(())
}

fn run(
    config: &RunConfig,
    keep: bool,
) -> Result<(
    EnsembleResult,
    Vec<TrajectoryRecord>,
    Arc<crate::Liouvillian>,
)> {
    let lv = Arc::new(config.build_generator()?);
    let traj = config.trajectory_config(lv.clone())?;
    let (result, records) = ensemble::run_ensemble(&traj, config.trajectories, keep)?;
    Ok((result, records, lv))
}

/// Simulates the configured ensemble and writes `ensemble.csv`,
/// `config.toml` and `seed.txt` (plus per-trajectory files on request).
pub fn cmd_simulate(config: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    write_run_files(config, dir)?;
    let (result, records, _) = run(config, config.save_trajectories)?;
    fs::write(dir.join("ensemble.csv"), ensemble_csv(&result.series))?;
    if config.save_trajectories {
        fs::write(dir.join("trajectories.csv"), trajectories_csv(&records))?;
        fs::write(dir.join("jumps.csv"), jumps_csv(&records))?;
    }
    let last = result.series.times.len() - 1;
    writeln!(
        out,
        "simulated {} trajectories to t = {}; final mc error {:e}; output in {}",
        result.count,
        result.series.times[last],
        result.mc_error(last),
        dir.display()
    )?;
    Ok(EXIT_OK)
}

/// Runs the ensemble, compares it with the master equation and writes
/// `validation.csv` and `report.toml`. Exit code 0 iff the check passes.
pub fn cmd_validate(config: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    if config.trajectories < 100 {
        return Err(Error::Config(format!(
            "validation needs at least 100 trajectories, got {}",
            config.trajectories
        )));
    }
    write_run_files(config, dir)?;
    let (result, _, lv) = run(config, false)?;
    let traj = config.trajectory_config(lv.clone())?;
    let reference = ensemble::integrate_master_equation(
        &lv,
        &traj.initial_state.density(),
        traj.dt,
        traj.t_final,
        traj.record_stride,
    )?;
    let report = ensemble::compare(&result, &reference, config.tolerance)?;
    fs::write(dir.join("ensemble.csv"), ensemble_csv(&result.series))?;
    fs::write(dir.join("validation.csv"), validation_csv(&report))?;
    fs::write(dir.join("report.toml"), report_toml(&report, config.seed))?;
    writeln!(
        out,
        "{}: max trace distance {:e} (tolerance {:e}, mc error {:e}, M = {})",
        if report.pass { "PASS" } else { "FAIL" },
        report.max_trace_distance,
        report.tolerance,
        report.mc_error_estimate,
        report.n_trajectories
    )?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_SCIENTIFIC
    })
}
