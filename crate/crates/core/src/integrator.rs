//! Time integration of the moment equations, steady-state search and
//! integration-based steady-state verification.

use nalgebra::{DMatrix, DVector};

use crate::error::{IntegrationError, ModelError, SteadyStateError};
use crate::model::MomentModel;
use crate::moments::{initial_thermal_state, Moment, MomentState, PACKED_LEN};
use crate::ode::{self, FailureKind, OdeSystem, SolveStats, SolverOptions};
use crate::params::SystemParams;

/// Settings for one integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Duration in units of 1/κ.
    pub t_end: f64,
    /// Number of uniformly spaced samples, including t = 0 and t = t_end.
    pub sample_count: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    /// Relative tolerance of the physicality monitor.
    pub hermiticity_tol: f64,
    /// Hard cap on solver steps.
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            t_end: 100.0,
            sample_count: 1001,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: None,
            hermiticity_tol: 1e-8,
            max_steps: 50_000_000,
        }
    }
}

/// Absolute floor added to every physicality check.
pub const PHYSICALITY_ABS_TOL: f64 = 1e-10;

impl IntegrationConfig {
    pub fn validate(&self) -> Result<(), IntegrationError> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(IntegrationError::InvalidConfig("t_end must be positive"));
        }
        if self.sample_count < 2 {
            return Err(IntegrationError::InvalidConfig("sample_count must be at least 2"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.hermiticity_tol > 0.0) {
            return Err(IntegrationError::InvalidConfig("tolerances must be positive"));
        }
        if matches!(self.max_step, Some(h) if !(h > 0.0)) {
            return Err(IntegrationError::InvalidConfig("max_step must be positive"));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            max_steps: self.max_steps,
            stiffness_switching: true,
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        uniform_times(self.t_end, self.sample_count)
    }
}

pub(crate) fn uniform_times(t_end: f64, count: usize) -> Vec<f64> {
    let last = (count - 1) as f64;
    (0..count).map(|i| t_end * (i as f64 / last)).collect()
}

/// Bit set of physicality violations at one sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PhysicalityFlags(pub u8);

impl PhysicalityFlags {
    pub const IMAG_PHOTONS: u8 = 1 << 0;
    pub const IMAG_POPULATION: u8 = 1 << 1;
    pub const IMAG_PAIR_COHERENCE: u8 = 1 << 2;
    pub const IMAG_ZZ: u8 = 1 << 3;
    pub const POPULATION_RANGE: u8 = 1 << 4;
    pub const NEGATIVE_PHOTONS: u8 = 1 << 5;

    pub fn is_clean(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, bit: u8) -> bool {
        self.0 & bit != 0
    }
}

/// Checks the Hermiticity and range invariants of a moment state.
pub fn check_physicality(x: &MomentState, rel_tol: f64) -> PhysicalityFlags {
    let mut bits = 0u8;
    let imag_bad = |m: Moment| {
        let v = x.get(m);
        v.im.abs() > rel_tol * v.norm() + PHYSICALITY_ABS_TOL
    };
    if imag_bad(Moment::AdA) {
        bits |= PhysicalityFlags::IMAG_PHOTONS;
    }
    if imag_bad(Moment::SdS) {
        bits |= PhysicalityFlags::IMAG_POPULATION;
    }
    if imag_bad(Moment::SdS2) {
        bits |= PhysicalityFlags::IMAG_PAIR_COHERENCE;
    }
    if imag_bad(Moment::ZZ) {
        bits |= PhysicalityFlags::IMAG_ZZ;
    }
    let margin = rel_tol + PHYSICALITY_ABS_TOL;
    if x.sds.re < -margin || x.sds.re > 1.0 + margin {
        bits |= PhysicalityFlags::POPULATION_RANGE;
    }
    if x.ada.re < -margin * x.ada.norm().max(1.0) {
        bits |= PhysicalityFlags::NEGATIVE_PHOTONS;
    }
    PhysicalityFlags(bits)
}

/// Uniformly sampled solution of the moment equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    pub flags: Vec<PhysicalityFlags>,
    pub stats: SolveStats,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing.
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn last_state(&self) -> Option<&MomentState> {
        self.states.last()
    }

    pub fn flagged_count(&self) -> usize {
        self.flags.iter().filter(|f| !f.is_clean()).count()
    }
}

struct PackedModel<'a>(&'a MomentModel);

impl OdeSystem for PackedModel<'_> {
    fn dim(&self) -> usize {
        PACKED_LEN
    }
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        self.0.derivative_packed(y, dy)
    }
}

/// Integrates the default (master-equation-consistent) moment equations.
pub fn integrate_trace(
    params: &SystemParams,
    init: &MomentState,
    cfg: &IntegrationConfig,
) -> Result<Trace, IntegrationError> {
    integrate_model(&MomentModel::new(*params), init, cfg)
}

pub fn integrate_model(
    model: &MomentModel,
    init: &MomentState,
    cfg: &IntegrationConfig,
) -> Result<Trace, IntegrationError> {
    cfg.validate()?;
    model.params.validate().map_err(ModelError::from)?;
    if let Some(m) = init.first_non_finite() {
        return Err(ModelError::NonFiniteState { name: m.name() }.into());
    }
    let times = cfg.sample_times();
    let mut trace = Trace {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        flags: Vec::with_capacity(times.len()),
        stats: SolveStats::default(),
    };
    let sys = PackedModel(model);
    let y0 = init.to_packed();
    let mut non_finite = false;
    let result = ode::solve_sampled(&sys, &y0, &times, &cfg.solver_options(), |i, y| {
        let state = MomentState::unpack(y);
        if !state.is_finite() {
            non_finite = true;
            return false;
        }
        trace.times.push(times[i]);
        trace.flags.push(check_physicality(&state, cfg.hermiticity_tol));
        trace.states.push(state);
        true
    });
    match result {
        Ok(stats) => {
            trace.stats = stats;
            if non_finite {
                let t = trace.times.last().copied().unwrap_or(0.0);
                return Err(IntegrationError::NonFinite { t, partial: Box::new(trace) });
            }
            Ok(trace)
        }
        Err(fail) => {
            trace.stats = fail.stats;
            let partial = Box::new(trace);
            Err(match fail.kind {
                FailureKind::StepUnderflow => IntegrationError::StepUnderflow { t: fail.t, partial },
                FailureKind::NonFinite => IntegrationError::NonFinite { t: fail.t, partial },
                FailureKind::TooManySteps => IntegrationError::TooManySteps { t: fail.t, partial },
            })
        }
    }
}

/// Integrates and returns only the final state.
fn integrate_to_end(
    model: &MomentModel,
    init: &MomentState,
    duration: f64,
    cfg: &IntegrationConfig,
) -> Result<MomentState, IntegrationError> {
    let c = IntegrationConfig { t_end: duration, sample_count: 2, ..*cfg };
    let tr = integrate_model(model, init, &c)?;
    Ok(*tr.last_state().expect("two samples"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    RootFind,
    LongIntegration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub state: MomentState,
    /// Max-norm of the right-hand side at `state`.
    pub residual_norm: f64,
    pub verified: bool,
    pub method: SteadyMethod,
}

/// Knobs of the steady-state search beyond the integration tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Relaxation time before the Newton iteration.
    pub relax_time: f64,
    pub max_newton_iterations: usize,
    /// Budget of the fallback integration, in units of 10/slowest rate.
    pub max_integration_windows: usize,
    /// Drift tolerance of the verification run, as a multiple of `abs_tol`.
    pub drift_factor: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            relax_time: 20.0,
            max_newton_iterations: 60,
            max_integration_windows: 10,
            drift_factor: 1e3,
        }
    }
}

/// Outcome of the newton iteration.
enum NewtonOutcome {
    Converged(MomentState, f64),
    Failed,
}

fn newton(model: &MomentModel, seed: &MomentState, tol: f64, max_iter: usize) -> NewtonOutcome {
    let sys = PackedModel(model);
    let n = PACKED_LEN;
    let mut y = seed.to_packed().to_vec();
    let mut f = vec![0.0; n];
    sys.eval(&y, &mut f);
    let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut res = norm(&f);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    let mut trial = vec![0.0; n];
    let mut ftrial = vec![0.0; n];
    for _ in 0..max_iter {
        if res < tol * 1e-3 {
            break;
        }
        ode::central_difference_jacobian(&sys, &y, &mut jac);
        let lu = jac.clone().lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].abs()).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(dmax > 0.0) || dmin / dmax < 1e-13 {
            return NewtonOutcome::Failed;
        }
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let Some(step) = lu.solve(&rhs) else { return NewtonOutcome::Failed };
        if step.iter().any(|v| !v.is_finite()) {
            return NewtonOutcome::Failed;
        }
        // backtracking on the residual max-norm
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1.0 / 1024.0 {
            for i in 0..n {
                trial[i] = y[i] + lambda * step[i];
            }
            sys.eval(&trial, &mut ftrial);
            let r = norm(&ftrial);
            if r.is_finite() && r < (1.0 - 1e-4 * lambda) * res {
                y.copy_from_slice(&trial);
                f.copy_from_slice(&ftrial);
                res = r;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < tol {
        NewtonOutcome::Converged(MomentState::unpack(&y), res)
    } else {
        NewtonOutcome::Failed
    }
}

fn physically_plausible(x: &MomentState) -> bool {
    let tol = 1e-6;
    x.is_finite() && x.sds.re > -tol && x.sds.re < 1.0 + tol && x.ada.re > -tol
}

/// Duration of the verification window: ten times the inverse of the
/// slowest non-zero characteristic rate.
pub fn verification_window(params: &SystemParams) -> f64 {
    10.0 / params.slowest_rate().unwrap_or(1.0)
}

/// Result of an integration-based steady-state check.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub passed: bool,
    /// Largest max-norm deviation from the candidate over the window.
    pub drift: f64,
    pub window: f64,
    pub diagnostic: Option<String>,
}

/// Integrates from `candidate` over [`verification_window`] and checks that
/// the state never drifts by more than `drift_factor·abs_tol` in max-norm.
pub fn verify_steady(
    params: &SystemParams,
    candidate: &MomentState,
    cfg: &IntegrationConfig,
) -> Verification {
    verify_steady_with(&MomentModel::new(*params), candidate, cfg, SteadyOptions::default().drift_factor)
}

pub fn verify_steady_with(
    model: &MomentModel,
    candidate: &MomentState,
    cfg: &IntegrationConfig,
    drift_factor: f64,
) -> Verification {
    let window = verification_window(&model.params);
    let c = IntegrationConfig {
        t_end: window,
        sample_count: 401,
        rel_tol: cfg.rel_tol * 1e-2,
        abs_tol: cfg.abs_tol * 1e-4,
        ..*cfg
    };
    match integrate_model(model, candidate, &c) {
        Ok(tr) => {
            let drift = tr
                .states
                .iter()
                .map(|s| s.max_abs_diff(candidate))
                .fold(0.0, f64::max);
            Verification {
                passed: drift < drift_factor * cfg.abs_tol,
                drift,
                window,
                diagnostic: None,
            }
        }
        Err(e) => Verification {
            passed: false,
            drift: f64::INFINITY,
            window,
            diagnostic: Some(e.to_string()),
        },
    }
}

/// Damped Newton on rhs = 0 seeded by a short relaxation from the thermal
/// state, with long integration as the fallback.
pub fn find_steady_state(
    params: &SystemParams,
    cfg: &IntegrationConfig,
) -> Result<SteadyState, SteadyStateError> {
    find_steady_state_with(&MomentModel::new(*params), cfg, &SteadyOptions::default())
}

pub fn find_steady_state_with(
    model: &MomentModel,
    cfg: &IntegrationConfig,
    opts: &SteadyOptions,
) -> Result<SteadyState, SteadyStateError> {
    cfg.validate()?;
    let thermal = initial_thermal_state(&model.params);
    let seed = integrate_to_end(model, &thermal, opts.relax_time, cfg)?;

    if let NewtonOutcome::Converged(root, residual) =
        newton(model, &seed, cfg.abs_tol, opts.max_newton_iterations)
    {
        if physically_plausible(&root) {
            let v = verify_steady_with(model, &root, cfg, opts.drift_factor);
            if v.passed {
                return Ok(SteadyState {
                    state: root,
                    residual_norm: residual,
                    verified: true,
                    method: SteadyMethod::RootFind,
                });
            }
        }
    }

    let (state, residual) = long_integration(model, &seed, cfg, opts)?;
    let v = verify_steady_with(model, &state, cfg, opts.drift_factor);
    Ok(SteadyState {
        state,
        residual_norm: residual,
        verified: v.passed,
        method: SteadyMethod::LongIntegration,
    })
}

/// Integrates window by window until the residual falls below `abs_tol`,
/// or stops shrinking below `drift_factor·abs_tol`. The steps run at the tightened verification tolerances, since the
/// residual floor of an integration sits well above its own `abs_tol`.
pub fn long_integration(
    model: &MomentModel,
    seed: &MomentState,
    cfg: &IntegrationConfig,
    opts: &SteadyOptions,
) -> Result<(MomentState, f64), SteadyStateError> {
    let window = verification_window(&model.params).max(opts.relax_time);
    let tight = IntegrationConfig { rel_tol: cfg.rel_tol * 1e-2, abs_tol: cfg.abs_tol * 1e-4, ..*cfg };
    let mut x = *seed;
    let mut residual = model.derivative(&x).max_norm();
    for _ in 0..opts.max_integration_windows {
        if residual < cfg.abs_tol {
            return Ok((x, residual));
        }
        x = integrate_to_end(model, &x, window, &tight)?;
        let previous = residual;
        residual = model.derivative(&x).max_norm();
        // stalled at the integration noise floor
        if residual > 0.5 * previous && residual < opts.drift_factor * cfg.abs_tol {
            return Ok((x, residual));
        }
    }
    if residual < cfg.abs_tol {
        Ok((x, residual))
    } else {
        Err(SteadyStateError::NoSteadyState { residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn config_validation() {
        let bad = IntegrationConfig { sample_count: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegrationConfig { t_end: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegrationConfig { abs_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn flags_catch_imaginary_population() {
        let x = MomentState { sds: Complex64::new(0.5, 1e-3), ..MomentState::zero() };
        let f = check_physicality(&x, 1e-8);
        assert!(f.contains(PhysicalityFlags::IMAG_POPULATION));
        let x = MomentState { sds: c(1.2), ..MomentState::zero() };
        assert!(check_physicality(&x, 1e-8).contains(PhysicalityFlags::POPULATION_RANGE));
        assert!(check_physicality(&MomentState::zero(), 1e-8).is_clean());
    }

    #[test]
    fn cavity_decay_closed_form() {
        let p = SystemParams::default();
        let init = MomentState { ada: c(1.0), ..MomentState::zero() };
        let cfg = IntegrationConfig { t_end: 5.0, sample_count: 51, ..Default::default() };
        let tr = integrate_trace(&p, &init, &cfg).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s.ada.re - (-2.0 * t).exp()).abs() < 10.0 * cfg.rel_tol);
        }
    }

    #[test]
    fn emitter_decay_closed_form() {
        let p = SystemParams { gamma1: 0.1, ..Default::default() };
        let init = MomentState { sds: c(1.0), zz: c(1.0), ..MomentState::zero() };
        let cfg = IntegrationConfig { t_end: 30.0, sample_count: 31, ..Default::default() };
        let tr = integrate_trace(&p, &init, &cfg).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s.sds.re - (-0.1 * t).exp()).abs() < 10.0 * cfg.rel_tol);
        }
        assert_eq!(tr.flagged_count(), 0);
    }

    #[test]
    fn undriven_steady_state() {
        let p = SystemParams { g1: 0.0, omega_rabi: 0.0, n_bar: 0.0, ..Default::default() };
        let cfg = IntegrationConfig::default();
        let ss = find_steady_state(&p, &cfg).unwrap();
        assert!(ss.verified);
        assert!(ss.residual_norm < cfg.abs_tol);
        for m in Moment::ALL {
            // both emitters end up in the ground state, so ⟨σ₁zσ₂z⟩ = 1
            let want = if m == Moment::ZZ { 1.0 } else { 0.0 };
            assert!((ss.state.get(m) - c(want)).norm() < 1e-8, "{}", m.name());
        }
    }
}
