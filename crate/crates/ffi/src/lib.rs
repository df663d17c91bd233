// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for `unravel`.
//!
//! Generators are opaque handles created by the `unravel_*_new` functions and
//! released with [`unravel_generator_free`]. Every fallible call returns an
//! [`UnravelStatus`]; on failure a message is available from
//! [`unravel_last_error`] on the calling thread until the next failing call.
//!
//! Complex arrays are interleaved `re, im` doubles. Matrices are row-major,
//! so an `N×N` matrix occupies `2·N·N` doubles and a state `2·N`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use unravel::ensemble::validate_unraveling;
use unravel::generators::check_positivity;
use unravel::rate_structures::compute_rate_structure;
use unravel::trajectories::{NoisePolicy, TrajectoryConfig, Unraveling};
use unravel::{
    build_kossakowski, build_lindblad, models, CMatrix, CVector, ClassTag, Complex64, Error,
    Liouvillian, PureState,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnravelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Generator or state fails a structural check.
    InvalidModel = 3,
    /// Dynamics is not positive at a state reached during the call.
    NotPositive = 4,
    /// Numerical failure (non-PSD noise covariance, unstable integration).
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnravelClass {
    Cp = 0,
    PositiveNotCp = 1,
    NotPositive = 2,
    Undetermined = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnravelKind {
    /// Diffusive, `S = 0`.
    Qsd = 0,
    /// Diffusive, `s = 1` in the eigenframe of `W`.
    MaximalS = 1,
    Jump = 2,
    /// Lindblad-form QSD; needs a generator built from Lindblad operators.
    CpQsd = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct UnravelValidation {
    pub pass: bool,
    pub max_trace_distance: f64,
    pub mc_error_estimate: f64,
    pub tolerance: f64,
    pub n_trajectories: usize,
}

/// Opaque generator handle.
pub struct UnravelGenerator {
    inner: Arc<Liouvillian>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> UnravelStatus {
    match err {
        Error::NotPositiveAtState { .. } => UnravelStatus::NotPositive,
        Error::StepFailed { source, .. } => status_of(source),
        Error::EnsembleFailed { first, .. } => status_of(first),
        Error::CovarianceNotPsd { .. } | Error::Unstable { .. } => UnravelStatus::Numerical,
        Error::InvalidParameter(_) | Error::Config(_) => UnravelStatus::InvalidArgument,
        _ => UnravelStatus::InvalidModel,
    }
}

fn fail(status: UnravelStatus, message: impl Into<String>) -> UnravelStatus {
    set_last_error(message.into());
    status
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), UnravelStatus>) -> UnravelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UnravelStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(UnravelStatus::Panic, "internal panic"),
    }
}

fn lib_err(err: Error) -> UnravelStatus {
    fail(status_of(&err), err.to_string())
}

fn null(what: &str) -> UnravelStatus {
    fail(UnravelStatus::NullPointer, format!("{what} is null"))
}

unsafe fn doubles<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], UnravelStatus> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

fn complex(values: &[f64]) -> Vec<Complex64> {
    values
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect()
}

fn matrix(n: usize, values: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(n, n, &complex(values))
}

fn write_complex(out: &mut [f64], values: impl Iterator<Item = Complex64>) {
    for (slot, z) in out.chunks_exact_mut(2).zip(values) {
        slot[0] = z.re;
        slot[1] = z.im;
    }
}

fn check_dim(dim: usize) -> Result<(), UnravelStatus> {
    if (2..=unravel::MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(lib_err(Error::UnsupportedDimension(dim)))
    }
}

unsafe fn store(out: *mut *mut UnravelGenerator, lv: Liouvillian) {
    *out = Box::into_raw(Box::new(UnravelGenerator {
        inner: Arc::new(lv),
    }));
}

unsafe fn generator<'a>(
    handle: *const UnravelGenerator,
) -> Result<&'a UnravelGenerator, UnravelStatus> {
    handle.as_ref().ok_or_else(|| null("generator"))
}

unsafe fn state(handle: &UnravelGenerator, psi: *const f64) -> Result<PureState, UnravelStatus> {
    let n = handle.inner.dim();
    let values = doubles(psi, 2 * n, "state")?;
    PureState::new(CVector::from_vec(complex(values))).map_err(lib_err)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn unravel_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a catalog model (see `unravel list-models`). Parameters not given
/// take their defaults.
///
/// # Safety
/// `name` must be a NUL-terminated string; `param_names` and `param_values`
/// must each point to `n_params` valid entries (or be null when
/// `n_params == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn unravel_model_new(
    name: *const c_char,
    param_names: *const *const c_char,
    param_values: *const f64,
    n_params: usize,
    out: *mut *mut UnravelGenerator,
) -> UnravelStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| fail(UnravelStatus::InvalidArgument, "name is not UTF-8"))?;
        let mut params = std::collections::BTreeMap::new();
        if n_params > 0 {
            if param_names.is_null() {
                return Err(null("param_names"));
            }
            let names = slice::from_raw_parts(param_names, n_params);
            let values = doubles(param_values, n_params, "param_values")?;
            for (&key, &value) in names.iter().zip(values) {
                if key.is_null() {
                    return Err(null("parameter name"));
                }
                let key = CStr::from_ptr(key).to_str().map_err(|_| {
                    fail(
                        UnravelStatus::InvalidArgument,
                        "parameter name is not UTF-8",
                    )
                })?;
                params.insert(key.to_string(), value);
            }
        }
        let lv = models::build_model(name, &params).map_err(lib_err)?;
        store(out, lv);
        Ok(())
    })
}

/// Builds `−i[H,ρ] + Σ_α (F_α ρ F_α† − ½{F_α†F_α, ρ})` from `n_ops`
/// operators stored back to back in `operators`.
///
/// # Safety
/// `hamiltonian` must hold `2·dim·dim` doubles, `operators` `n_ops` times
/// that (or be null when `n_ops == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn unravel_lindblad_new(
    dim: usize,
    hamiltonian: *const f64,
    operators: *const f64,
    n_ops: usize,
    out: *mut *mut UnravelGenerator,
) -> UnravelStatus {
    guard(|| {
        check_dim(dim)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let block = 2 * dim * dim;
        let h = matrix(dim, doubles(hamiltonian, block, "hamiltonian")?);
        let ops: Vec<CMatrix> = if n_ops == 0 {
            Vec::new()
        } else {
            doubles(operators, block * n_ops, "operators")?
                .chunks_exact(block)
                .map(|m| matrix(dim, m))
                .collect()
        };
        store(out, build_lindblad(&h, &ops).map_err(lib_err)?);
        Ok(())
    })
}

/// Builds `−i[H,ρ] + Σ_ij K_ij (G_i ρ G_j† − ½{G_j†G_i, ρ})` with Hermitian,
/// possibly indefinite `K` (`n_basis × n_basis`, row-major).
///
/// # Safety
/// `hamiltonian` must hold `2·dim·dim` doubles, `basis` `n_basis` times that,
/// `coefficients` `2·n_basis·n_basis`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn unravel_kossakowski_new(
    dim: usize,
    hamiltonian: *const f64,
    basis: *const f64,
    n_basis: usize,
    coefficients: *const f64,
    out: *mut *mut UnravelGenerator,
) -> UnravelStatus {
    guard(|| {
        check_dim(dim)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if n_basis == 0 {
            return Err(fail(UnravelStatus::InvalidArgument, "basis is empty"));
        }
        let block = 2 * dim * dim;
        let h = matrix(dim, doubles(hamiltonian, block, "hamiltonian")?);
        let basis: Vec<CMatrix> = doubles(basis, block * n_basis, "basis")?
            .chunks_exact(block)
            .map(|m| matrix(dim, m))
            .collect();
        let k = matrix(
            n_basis,
            doubles(coefficients, 2 * n_basis * n_basis, "coefficients")?,
        );
        store(out, build_kossakowski(&h, &basis, &k).map_err(lib_err)?);
        Ok(())
    })
}

/// Releases a generator. Null is ignored.
///
/// # Safety
/// `handle` must come from an `unravel_*_new` call and not be used again.
#[no_mangle]
pub unsafe extern "C" fn unravel_generator_free(handle: *mut UnravelGenerator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Hilbert-space dimension, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live generator.
#[no_mangle]
pub unsafe extern "C" fn unravel_generator_dim(handle: *const UnravelGenerator) -> usize {
    handle.as_ref().map_or(0, |g| g.inner.dim())
}

/// Classifies the generator by sampling `samples` random states.
/// `witness` (nullable, `2·dim` doubles) receives the state with the least
/// transition rate found.
///
/// # Safety
/// `handle` must be live; `class_out`, `min_eigenvalue` and
/// `choi_min_eigenvalue` must be writable; `witness` null or writable.
#[no_mangle]
pub unsafe extern "C" fn unravel_classify(
    handle: *const UnravelGenerator,
    samples: usize,
    refine: bool,
    seed: u64,
    class_out: *mut UnravelClass,
    min_eigenvalue: *mut f64,
    choi_min_eigenvalue: *mut f64,
    witness: *mut f64,
) -> UnravelStatus {
    guard(|| {
        let g = generator(handle)?;
        if class_out.is_null() || min_eigenvalue.is_null() || choi_min_eigenvalue.is_null() {
            return Err(null("output pointer"));
        }
        let class = check_positivity(&g.inner, samples, refine, seed);
        *class_out = match class.tag {
            ClassTag::Cp => UnravelClass::Cp,
            ClassTag::PositiveNotCp => UnravelClass::PositiveNotCp,
            ClassTag::NotPositive => UnravelClass::NotPositive,
            ClassTag::Undetermined => UnravelClass::Undetermined,
        };
        *min_eigenvalue = class.min_eigenvalue;
        *choi_min_eigenvalue = class.choi_min_eigenvalue;
        if !witness.is_null() {
            let out = slice::from_raw_parts_mut(witness, 2 * g.inner.dim());
            match &class.witness {
                Some(psi) => write_complex(out, psi.vector().iter().copied()),
                None => out.fill(0.0),
            }
        }
        Ok(())
    })
}

/// Transition rate operator `W` (`2·dim·dim`), total rate `w` and frictional
/// drift `(L − ⟨L⟩)ψ` (`2·dim`) at the normalized state `psi`. Any output
/// pointer may be null.
///
/// # Safety
/// `handle` must be live, `psi` must hold `2·dim` doubles, non-null outputs
/// must be writable for their sizes.
#[no_mangle]
pub unsafe extern "C" fn unravel_rate_structure(
    handle: *const UnravelGenerator,
    psi: *const f64,
    w_out: *mut f64,
    rate_out: *mut f64,
    drift_out: *mut f64,
) -> UnravelStatus {
    guard(|| {
        let g = generator(handle)?;
        let n = g.inner.dim();
        let psi = state(g, psi)?;
        let rs = compute_rate_structure(&g.inner, &psi).map_err(lib_err)?;
        if !w_out.is_null() {
            let out = slice::from_raw_parts_mut(w_out, 2 * n * n);
            write_complex(out, rs.w_op.transpose().iter().copied());
        }
        if !rate_out.is_null() {
            *rate_out = rs.rate;
        }
        if !drift_out.is_null() {
            write_complex(
                slice::from_raw_parts_mut(drift_out, 2 * n),
                rs.drift.iter().copied(),
            );
        }
        Ok(())
    })
}

/// Runs `trajectories ≥ 100` trajectories of the chosen unraveling from
/// `psi0` and compares their mean with the master equation.
///
/// # Safety
/// `handle` must be live, `psi0` must hold `2·dim` doubles, `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn unravel_validate(
    handle: *const UnravelGenerator,
    psi0: *const f64,
    kind: UnravelKind,
    dt: f64,
    t_final: f64,
    trajectories: usize,
    seed: u64,
    record_stride: usize,
    tolerance: f64,
    out: *mut UnravelValidation,
) -> UnravelStatus {
    guard(|| {
        let g = generator(handle)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let psi0 = state(g, psi0)?;
        let unraveling = match kind {
            UnravelKind::Qsd => Unraveling::qsd(),
            UnravelKind::MaximalS => Unraveling::Diffusive(NoisePolicy::maximal(g.inner.dim())),
            UnravelKind::Jump => Unraveling::Jump,
            UnravelKind::CpQsd => Unraveling::CpQsd,
        };
        let config = TrajectoryConfig::new(g.inner.clone(), psi0, unraveling, dt, t_final)
            .with_seed(seed)
            .with_record_stride(record_stride);
        let report = validate_unraveling(&config, trajectories, tolerance).map_err(lib_err)?;
        *out = UnravelValidation {
            pass: report.pass,
            max_trace_distance: report.max_trace_distance,
            mc_error_estimate: report.mc_error_estimate,
            tolerance: report.tolerance,
            n_trajectories: report.n_trajectories,
        };
        Ok(())
    })
}
