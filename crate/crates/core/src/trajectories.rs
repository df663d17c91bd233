// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

//! Stochastic pure-state trajectories.
//!
//! Three unravelings are provided:
//!
//! * **diffusive**: `dψ = (L + ½w)ψ dt + dχ` with `E[dχ dχ†] = W dt` and a
//!   chosen self-correlation `E[dχ dχᵀ] = S dt` (`S = 0` is quantum state
//!   diffusion). Only `𝓛` is needed, so positive non-CP generators work.
//! * **cp-qsd**: the usual Lindblad-operator form of quantum state diffusion,
//!   available when the generator carries Lindblad data. Used as a cross
//!   check of the invariant form.
//! * **jump**: the frictional flow `dψ/dt = (L + w)ψ` interrupted, at total
//!   rate `w`, by jumps into the eigenvectors of `W` with probabilities
//!   `λ_k / w`.
//!
//! Diffusive steps are Euler–Maruyama with renormalization. The jump flow is
//! integrated with RK4 and its hazard by the trapezoid rule; jumps land on
//! step boundaries.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::generators::{Liouvillian, PureState};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::noise::{self, NoiseSpec, XiSampler};
use crate::rate_structures::{transition_spectrum_from_l, TransitionSpectrum};
use crate::{Error, Result, NEGATIVITY_TOL};

/// `dt · w` above this at the initial state triggers a warning.
pub const STIFF_STEP_WARNING: f64 = 0.1;

/// Choice of the noise self-correlation along a diffusive trajectory.
#[derive(Clone, Debug, PartialEq)]
pub enum NoisePolicy {
    /// `S = 0`.
    Qsd,
    /// A fixed `(N−1)×(N−1)` matrix `s` with `‖s‖ ≤ 1`, applied at every
    /// step in the frame `φ_α = √λ_α e_α` of `W`'s eigenvectors on the
    /// complement of ψ, ordered by decreasing rate. Gives
    /// `S = Σ s̄_αβ φ_α φ_βᵀ`.
    SFrame(CMatrix),
    /// A fixed `N×N` matrix `S`. It must stay admissible against `W` at every
    /// visited state, which generally only holds in special cases.
    Explicit(CMatrix),
}

impl NoisePolicy {
    /// `s = 1`: the largest admissible self-correlation in the `W` frame.
    pub fn maximal(dim: usize) -> Self {
        NoisePolicy::SFrame(linalg::identity(dim - 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Unraveling {
    Diffusive(NoisePolicy),
    Jump,
    CpQsd,
}

impl Unraveling {
    pub fn qsd() -> Self {
        Unraveling::Diffusive(NoisePolicy::Qsd)
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryConfig {
    pub generator: Arc<Liouvillian>,
    pub initial_state: PureState,
    pub dt: f64,
    pub t_final: f64,
    pub unraveling: Unraveling,
    /// Master seed; trajectory `k` of an ensemble uses stream `k`.
    pub seed: u64,
    pub record_stride: usize,
}

impl TrajectoryConfig {
    pub fn new(
        generator: Arc<Liouvillian>,
        initial_state: PureState,
        unraveling: Unraveling,
        dt: f64,
        t_final: f64,
    ) -> Self {
        Self {
            generator,
            initial_state,
            dt,
            t_final,
            unraveling,
            seed: 0,
            record_stride: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if self.dt > self.t_final {
            return Err(Error::InvalidParameter("dt exceeds t_final".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter(
                "record_stride must be positive".into(),
            ));
        }
        if self.initial_state.dim() != self.generator.dim() {
            return Err(Error::DimensionMismatch(format!(
                "initial state has dimension {}, generator {}",
                self.initial_state.dim(),
                self.generator.dim()
            )));
        }
        match &self.unraveling {
            Unraveling::CpQsd if self.generator.lindblad_data().is_none() => {
                return Err(Error::MissingLindbladData)
            }
            Unraveling::Diffusive(NoisePolicy::SFrame(s)) => {
                let m = self.generator.dim() - 1;
                if s.shape() != (m, m) {
                    return Err(Error::DimensionMismatch(format!("s must be {m}x{m}")));
                }
                XiSampler::new(s)?;
            }
            Unraveling::Diffusive(NoisePolicy::Explicit(s)) => {
                let n = self.generator.dim();
                if s.shape() != (n, n) {
                    return Err(Error::DimensionMismatch(format!("S must be {n}x{n}")));
                }
                NoiseSpec::explicit(s.clone())?;
            }
            _ => {}
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round().max(1.0) as usize
    }

    /// Times at which states are recorded.
    pub fn record_times(&self) -> Vec<f64> {
        (0..=self.n_steps())
            .step_by(self.record_stride)
            .map(|k| k as f64 * self.dt)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<PureState>,
    /// Times of jumps; empty for diffusive unravelings.
    pub jump_times: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

/// Independent random stream for trajectory `index` under `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normalized(v: CVector) -> PureState {
    let norm = v.norm();
    PureState::from_vector_unchecked(v / c(norm, 0.0))
}

fn not_positive(spec: &TransitionSpectrum, psi: &PureState) -> Option<Error> {
    let min = spec.min_rate();
    (min < -NEGATIVITY_TOL).then(|| Error::NotPositiveAtState {
        min_eigenvalue: min,
        witness: psi.clone(),
    })
}

/// Per-trajectory preparation of the diffusive noise.
enum DiffusiveNoise {
    Qsd,
    SFrame(XiSampler),
    Explicit(NoiseSpec),
}

impl DiffusiveNoise {
    fn new(policy: &NoisePolicy) -> Result<Self> {
        Ok(match policy {
            NoisePolicy::Qsd => DiffusiveNoise::Qsd,
            NoisePolicy::SFrame(s) => DiffusiveNoise::SFrame(XiSampler::new(s)?),
            NoisePolicy::Explicit(s) => DiffusiveNoise::Explicit(NoiseSpec::explicit(s.clone())?),
        })
    }

    fn increment<R: Rng + ?Sized>(
        &self,
        spec: &TransitionSpectrum,
        psi: &PureState,
        dt: f64,
        rng: &mut R,
    ) -> Result<CVector> {
        let n = psi.dim();
        let sqrt_dt = dt.sqrt();
        let mut dchi = CVector::zeros(n);
        match self {
            DiffusiveNoise::Qsd => {
                for (k, &rate) in spec.rates.iter().enumerate() {
                    let z = linalg::complex_normal(rng);
                    let amp = rate.max(0.0).sqrt() * sqrt_dt;
                    dchi.axpy(z * amp, &spec.states.column(k), linalg::ONE);
                }
            }
            DiffusiveNoise::SFrame(sampler) => {
                let xi = sampler.sample(rng);
                // frame ordered by decreasing rate
                let m = spec.rates.len();
                for (alpha, k) in (0..m).rev().enumerate() {
                    let amp = spec.rates[k].max(0.0).sqrt() * sqrt_dt;
                    dchi.axpy(xi[alpha].conj() * amp, &spec.states.column(k), linalg::ONE);
                }
            }
            DiffusiveNoise::Explicit(noise_spec) => {
                let w = rebuild_w(spec);
                dchi = noise::sample_increment(&w, noise_spec, psi, dt, rng)?.dchi;
            }
        }
        noise::project_out(&mut dchi, psi.vector());
        Ok(dchi)
    }
}

/// `W = Σ_k max(λ_k, 0) φ_k φ_k†`.
fn rebuild_w(spec: &TransitionSpectrum) -> CMatrix {
    let n = spec.states.nrows();
    let mut w = CMatrix::zeros(n, n);
    for (k, &rate) in spec.rates.iter().enumerate() {
        let phi = spec.states.column(k);
        w += phi * phi.adjoint() * c(rate.max(0.0), 0.0);
    }
    w
}

/// `(L + ½w)ψ = Lψ − ½⟨L⟩ψ`.
fn diffusive_drift(l: &CMatrix, psi: &CVector) -> CVector {
    let lpsi = l * psi;
    let mean = psi.dotc(&lpsi).re;
    lpsi - psi * c(0.5 * mean, 0.0)
}

fn diffusive_step_with<R: Rng + ?Sized>(
    lv: &Liouvillian,
    psi: &PureState,
    dt: f64,
    noise: &DiffusiveNoise,
    rng: &mut R,
) -> Result<PureState> {
    let l = lv.apply_unchecked(&psi.density());
    let spec = transition_spectrum_from_l(&l, psi);
    if let Some(err) = not_positive(&spec, psi) {
        return Err(err);
    }
    let drift = diffusive_drift(&l, psi.vector());
    let dchi = noise.increment(&spec, psi, dt, rng)?;
    let next = psi.vector() + drift * c(dt, 0.0) + dchi;
    Ok(normalized(next))
}

/// One Euler–Maruyama step of the diffusive unraveling selected by `policy`,
/// followed by renormalization.
pub fn diffusive_step<R: Rng + ?Sized>(
    lv: &Liouvillian,
    psi: &PureState,
    dt: f64,
    policy: &NoisePolicy,
    rng: &mut R,
) -> Result<PureState> {
    if psi.dim() != lv.dim() {
        return Err(Error::DimensionMismatch(
            "state and generator differ".into(),
        ));
    }
    diffusive_step_with(lv, psi, dt, &DiffusiveNoise::new(policy)?, rng)
}

/// Drift of the Lindblad-form QSD equation,
/// `(−iH + ⟨F_α†⟩F_α − ½F_α†F_α − ½⟨F_α†⟩⟨F_α⟩)ψ`.
pub fn cp_qsd_drift(hamiltonian: &CMatrix, operators: &[CMatrix], psi: &PureState) -> CVector {
    let v = psi.vector();
    let mut out = hamiltonian * v * c(0.0, -1.0);
    for f in operators {
        let fpsi = f * v;
        let mean = v.dotc(&fpsi);
        let fdf_psi = f.adjoint() * &fpsi;
        out += &fpsi * mean.conj() - fdf_psi * c(0.5, 0.0) - v * c(0.5 * mean.norm_sqr(), 0.0);
    }
    out
}

/// Noise directions `(F_α − ⟨F_α⟩)ψ` of the Lindblad-form QSD equation.
pub fn cp_noise_vectors(operators: &[CMatrix], psi: &PureState) -> Vec<CVector> {
    let v = psi.vector();
    operators
        .iter()
        .map(|f| {
            let fpsi = f * v;
            let mean = v.dotc(&fpsi);
            fpsi - v * mean
        })
        .collect()
}

/// One Euler–Maruyama step of Lindblad-form QSD with independent unit
/// complex noises per operator, followed by renormalization.
pub fn cp_qsd_step<R: Rng + ?Sized>(
    hamiltonian: &CMatrix,
    operators: &[CMatrix],
    psi: &PureState,
    dt: f64,
    rng: &mut R,
) -> PureState {
    let sqrt_dt = dt.sqrt();
    let mut next = psi.vector() + cp_qsd_drift(hamiltonian, operators, psi) * c(dt, 0.0);
    for g in cp_noise_vectors(operators, psi) {
        let xi = linalg::complex_normal(rng);
        next.axpy(xi.conj() * sqrt_dt, &g, linalg::ONE);
    }
    normalized(next)
}

/// Jump-clock state carried between [`jump_step`] calls: integrated hazard,
/// the exponential threshold it must reach, and the rate at the last state.
#[derive(Clone, Debug)]
pub struct JumpClock {
    hazard: f64,
    threshold: f64,
}

impl JumpClock {
    pub fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            hazard: 0.0,
            threshold: exponential_threshold(rng),
        }
    }

    pub fn hazard(&self) -> f64 {
        self.hazard
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

fn exponential_threshold<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Frictional velocity `(L̂ − ⟨L̂⟩)x` with `L̂` evaluated at the normalized `x`.
fn frictional_velocity(lv: &Liouvillian, x: &CVector) -> CVector {
    let unit = x / c(x.norm(), 0.0);
    let l = lv.apply_unchecked(&linalg::projector(&unit));
    let lx = &l * x;
    let mean = unit.dotc(&(&l * &unit)).re;
    lx - x * c(mean, 0.0)
}

/// Advances the jump process by `dt`: RK4 along the frictional flow, hazard
/// `∫w dt` by the trapezoid rule, and a jump into an eigenvector of `W` once
/// the hazard reaches the clock's exponential threshold.
pub fn jump_step<R: Rng + ?Sized>(
    lv: &Liouvillian,
    psi: &PureState,
    dt: f64,
    rng: &mut R,
    clock: &mut JumpClock,
) -> Result<(PureState, bool)> {
    if psi.dim() != lv.dim() {
        return Err(Error::DimensionMismatch(
            "state and generator differ".into(),
        ));
    }
    let l0 = lv.apply_unchecked(&psi.density());
    let spec0 = transition_spectrum_from_l(&l0, psi);
    if let Some(err) = not_positive(&spec0, psi) {
        return Err(err);
    }
    let v = psi.vector();
    let rate0 = -v.dotc(&(&l0 * v)).re;

    let k1 = &l0 * v - v * c(-rate0, 0.0);
    let half = c(0.5 * dt, 0.0);
    let k2 = frictional_velocity(lv, &(v + &k1 * half));
    let k3 = frictional_velocity(lv, &(v + &k2 * half));
    let k4 = frictional_velocity(lv, &(v + &k3 * c(dt, 0.0)));
    let next = v + (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
    let next = normalized(next);

    let l1 = lv.apply_unchecked(&next.density());
    let w = next.vector();
    let rate1 = -w.dotc(&(&l1 * w)).re;
    clock.hazard += 0.5 * (rate0.max(0.0) + rate1.max(0.0)) * dt;
    if clock.hazard < clock.threshold {
        return Ok((next, false));
    }

    let spec1 = transition_spectrum_from_l(&l1, &next);
    if let Some(err) = not_positive(&spec1, &next) {
        return Err(err);
    }
    let total: f64 = spec1.rates.iter().map(|r| r.max(0.0)).sum();
    if total <= 0.0 {
        // nowhere to jump; the hazard came from round-off
        return Ok((next, false));
    }
    let mut target = rng.random::<f64>() * total;
    let mut channel = None;
    let mut last_open = 0;
    for (k, &r) in spec1.rates.iter().enumerate() {
        if r <= 0.0 {
            continue;
        }
        last_open = k;
        if target < r {
            channel = Some(k);
            break;
        }
        target -= r;
    }
    let channel = channel.unwrap_or(last_open);
    clock.hazard = 0.0;
    clock.threshold = exponential_threshold(rng);
    Ok((normalized(spec1.states.column(channel).into_owned()), true))
}

enum Stepper<'a> {
    Diffusive(DiffusiveNoise),
    Cp(&'a CMatrix, &'a [CMatrix]),
    Jump(JumpClock),
}

/// Runs trajectory 0 of `config`.
pub fn run_trajectory(config: &TrajectoryConfig) -> Result<TrajectoryRecord> {
    run_trajectory_indexed(config, 0)
}

/// Runs trajectory `index` of `config`, drawing from stream `index` of the
/// master seed. Deterministic in `(config, index)`.
pub fn run_trajectory_indexed(config: &TrajectoryConfig, index: u64) -> Result<TrajectoryRecord> {
    config.validate()?;
    let lv = config.generator.as_ref();
    let mut rng = trajectory_rng(config.seed, index);
    let mut stepper = match &config.unraveling {
        Unraveling::Diffusive(policy) => Stepper::Diffusive(DiffusiveNoise::new(policy)?),
        Unraveling::CpQsd => {
            let (h, ops) = lv.lindblad_data().ok_or(Error::MissingLindbladData)?;
            Stepper::Cp(h, ops)
        }
        Unraveling::Jump => Stepper::Jump(JumpClock::new(&mut rng)),
    };

    if index == 0 {
        let l = lv.apply_unchecked(&config.initial_state.density());
        let v = config.initial_state.vector();
        let rate = -v.dotc(&(&l * v)).re;
        if rate * config.dt > STIFF_STEP_WARNING {
            log::warn!(
                "dt * w = {:.3} exceeds {STIFF_STEP_WARNING}; step is coarse for the initial rate",
                rate * config.dt
            );
        }
    }

    let n_steps = config.n_steps();
    let stride = config.record_stride;
    let capacity = n_steps / stride + 1;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut jump_times = Vec::new();
    let mut psi = config.initial_state.clone();
    times.push(0.0);
    states.push(psi.clone());

    for k in 0..n_steps {
        let t = k as f64 * config.dt;
        let step = match &mut stepper {
            Stepper::Diffusive(noise) => diffusive_step_with(lv, &psi, config.dt, noise, &mut rng),
            Stepper::Cp(h, ops) => Ok(cp_qsd_step(h, ops, &psi, config.dt, &mut rng)),
            Stepper::Jump(clock) => {
                jump_step(lv, &psi, config.dt, &mut rng, clock).map(|(next, jumped)| {
                    if jumped {
                        jump_times.push(t + config.dt);
                    }
                    next
                })
            }
        };
        psi = step.map_err(|source| Error::StepFailed {
            time: t,
            state: psi.clone(),
            source: Box::new(source),
        })?;
        if (k + 1) % stride == 0 {
            times.push((k + 1) as f64 * config.dt);
            states.push(psi.clone());
        }
    }

    Ok(TrajectoryRecord {
        times,
        states,
        jump_times,
        seed: config.seed,
        index,
    })
}
