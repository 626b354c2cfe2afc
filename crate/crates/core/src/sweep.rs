//! Parameter grids, figure presets and CSV persistence of sweep results.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{CsvError, SteadyStateError, SweepError};
use crate::integrator::{check_physicality, find_steady_state, integrate_trace, IntegrationConfig, Trace};
use crate::moments::{initial_thermal_state, MomentState};
use crate::observables::{
    cavity_quadrature_variance, lasing_threshold_margin, min_cavity_quadrature,
    min_ensemble_quadrature, spin_metrics, SpinClass,
};
use crate::params::{SystemParams, PARAM_NAMES};
use crate::spectral::{
    default_segment_length, normally_ordered_variance_series, scale_spectral_density, welch_psd,
    PsdEstimate, Window,
};

/// Pseudo-axis that sets Ω through the scaled drive z = (Ω/|Γ_t|)².
pub const SCALED_DRIVE_AXIS: &str = "z";

#[derive(Debug, Clone, PartialEq)]
pub enum Spacing {
    Linear,
    Log,
    /// Explicit grid values; `min`, `max` and `count` mirror the list.
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self { name: name.into(), min, max, count, spacing: Spacing::Linear }
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self { name: name.into(), min, max, count, spacing: Spacing::Log }
    }

    pub fn list(name: &str, values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { name: name.into(), min, max, count: values.len(), spacing: Spacing::List(values.to_vec()) }
    }

    pub fn values(&self) -> Vec<f64> {
        match &self.spacing {
            Spacing::List(v) => v.clone(),
            Spacing::Linear => (0..self.count)
                .map(|i| {
                    let f = i as f64 / (self.count - 1) as f64;
                    if i + 1 == self.count {
                        self.max
                    } else {
                        self.min + f * (self.max - self.min)
                    }
                })
                .collect(),
            Spacing::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..self.count)
                    .map(|i| {
                        if i == 0 {
                            self.min
                        } else if i + 1 == self.count {
                            self.max
                        } else {
                            (a + (b - a) * i as f64 / (self.count - 1) as f64).exp()
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: &str| Err(SweepError::Invalid(format!("axis `{}`: {msg}", self.name)));
        if self.name != SCALED_DRIVE_AXIS && !PARAM_NAMES.contains(&self.name.as_str()) {
            return bad("not a parameter name");
        }
        match &self.spacing {
            Spacing::List(v) => {
                if v.is_empty() {
                    return bad("empty value list");
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return bad("non-finite value");
                }
            }
            spacing => {
                if self.count < 2 {
                    return bad("count must be at least 2");
                }
                if !self.min.is_finite() || !self.max.is_finite() {
                    return bad("bounds must be finite");
                }
                if *spacing == Spacing::Log && !(self.min > 0.0 && self.max > 0.0) {
                    return bad("log spacing requires positive bounds");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    #[default]
    Steady,
    TraceMin,
    Psd,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Steady => "steady",
            Self::TraceMin => "trace_min",
            Self::Psd => "psd",
        }
    }
}

impl FromStr for SweepMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "steady" => Ok(Self::Steady),
            "trace_min" => Ok(Self::TraceMin),
            "psd" => Ok(Self::Psd),
            other => Err(format!("unknown sweep mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ThetaPolicy {
    #[default]
    Optimized,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdSettings {
    /// `None` selects [`default_segment_length`].
    pub segment_length: Option<usize>,
    pub overlap_fraction: f64,
    pub window: Window,
    pub epsilon: f64,
    pub varrho: f64,
    /// Report ε·ϱ·(1 + power) instead of the raw periodogram.
    pub shot_noise_referenced: bool,
}

impl Default for PsdSettings {
    fn default() -> Self {
        Self {
            segment_length: None,
            overlap_fraction: 0.5,
            window: Window::Hann,
            epsilon: 1.0,
            varrho: 1.0,
            shot_noise_referenced: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: SystemParams,
    pub axes: Vec<Axis>,
    pub mode: SweepMode,
    pub integration: IntegrationConfig,
    pub theta: ThetaPolicy,
    /// Leading fraction of each trace discarded before taking minima.
    pub transient_fraction: f64,
    pub psd: PsdSettings,
    /// Hold z fixed at every grid point by recomputing Ω after the axes.
    pub fixed_scaled_drive: Option<f64>,
    /// Provenance of preset values, emitted as `#` comments.
    pub notes: Vec<String>,
}

impl SweepSpec {
    pub fn new(name: &str, base: SystemParams, axes: Vec<Axis>, mode: SweepMode) -> Self {
        Self {
            name: name.into(),
            base,
            axes,
            mode,
            integration: IntegrationConfig::default(),
            theta: ThetaPolicy::Optimized,
            transient_fraction: 0.2,
            psd: PsdSettings::default(),
            fixed_scaled_drive: None,
            notes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(SweepError::Invalid(format!("expected 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(SweepError::Invalid(format!("axis `{}` given twice", self.axes[0].name)));
        }
        for a in &self.axes {
            a.validate()?;
        }
        if self.fixed_scaled_drive.is_some()
            && self.axes.iter().any(|a| a.name == SCALED_DRIVE_AXIS || a.name == "omega_rabi")
        {
            return Err(SweepError::Invalid("fixed z conflicts with a drive axis".into()));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(SweepError::Invalid(format!(
                "transient_fraction {} outside [0, 1)",
                self.transient_fraction
            )));
        }
        self.integration.validate().map_err(|e| SweepError::Invalid(e.to_string()))?;
        self.base.validate()?;
        for p in self.grid() {
            self.params_at(&p)?.validate()?;
        }
        Ok(())
    }

    /// Grid coordinates in row-major order, first axis outermost.
    pub fn grid(&self) -> Vec<(f64, Option<f64>)> {
        let first = self.axes[0].values();
        match self.axes.get(1) {
            None => first.into_iter().map(|v| (v, None)).collect(),
            Some(second) => {
                let second = second.values();
                first
                    .iter()
                    .flat_map(|&u| second.iter().map(move |&v| (u, Some(v))))
                    .collect()
            }
        }
    }

    pub fn params_at(&self, point: &(f64, Option<f64>)) -> Result<SystemParams, SweepError> {
        let mut p = self.base;
        let mut z = self.fixed_scaled_drive;
        let coords = [Some(point.0), point.1];
        for (axis, value) in self.axes.iter().zip(coords) {
            let Some(v) = value else { continue };
            if axis.name == SCALED_DRIVE_AXIS {
                z = Some(v);
            } else {
                p.set(&axis.name, v)?;
            }
        }
        if let Some(z) = z {
            if !(z >= 0.0) {
                return Err(SweepError::Invalid(format!("scaled drive z = {z} is negative")));
            }
            p = p.with_scaled_drive(z);
        }
        Ok(p)
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# preset {}", self.name)?;
        for n in &self.notes {
            writeln!(f, "# {n}")?;
        }
        writeln!(f, "[system]")?;
        for name in PARAM_NAMES {
            writeln!(f, "{name} = {}", self.base.get(name).unwrap_or(f64::NAN))?;
        }
        if let Some(z) = self.fixed_scaled_drive {
            writeln!(f, "z = {z}")?;
        }
        writeln!(f, "[integration]")?;
        let c = &self.integration;
        writeln!(f, "t_end = {}", c.t_end)?;
        writeln!(f, "sample_count = {}", c.sample_count)?;
        writeln!(f, "rel_tol = {:e}", c.rel_tol)?;
        writeln!(f, "abs_tol = {:e}", c.abs_tol)?;
        writeln!(f, "[sweep]")?;
        writeln!(f, "mode = {}", self.mode.as_str())?;
        match self.theta {
            ThetaPolicy::Optimized => writeln!(f, "theta = optimized")?,
            ThetaPolicy::Fixed(t) => writeln!(f, "theta = {t}")?,
        }
        writeln!(f, "transient_fraction = {}", self.transient_fraction)?;
        for (i, a) in self.axes.iter().enumerate() {
            let k = i + 1;
            writeln!(f, "axis{k} = {}", a.name)?;
            match &a.spacing {
                Spacing::List(v) => {
                    let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    writeln!(f, "axis{k}_values = {}", list.join(" "))?;
                }
                s => {
                    writeln!(f, "axis{k}_min = {}", a.min)?;
                    writeln!(f, "axis{k}_max = {}", a.max)?;
                    writeln!(f, "axis{k}_count = {}", a.count)?;
                    let sp = if *s == Spacing::Log { "log" } else { "linear" };
                    writeln!(f, "axis{k}_spacing = {sp}")?;
                }
            }
        }
        Ok(())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub converged: bool,
    pub var_min_db: f64,
    pub theta_min: f64,
    pub n_photons: f64,
    pub ens_var_min_db: f64,
    pub xi2: [Option<f64>; 3],
    pub classification: SpinClass,
    pub lasing_margin: f64,
    /// `|`-separated diagnostics; empty for a clean point.
    pub flag: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_names: Vec<String>,
    pub records: Vec<SweepRecord>,
    /// PSD per grid point in `psd` mode, aligned with `records`.
    pub psd: Vec<Option<PsdEstimate>>,
}

impl SweepResult {
    /// Record with the lowest `var_min_db`, ignoring NaN.
    pub fn best(&self) -> Option<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.var_min_db.is_finite())
            .min_by(|a, b| a.var_min_db.total_cmp(&b.var_min_db))
    }
}

fn db(v: f64, shot: f64) -> f64 {
    10.0 * (v / shot).log10()
}

pub(crate) fn steady_record(state: &MomentState, p: &SystemParams, theta: ThetaPolicy) -> SweepRecord {
    let (var_min_db, theta_min) = cavity_db(state, theta);
    let spin = spin_metrics(state, p);
    let phys = check_physicality(state, IntegrationConfig::default().hermiticity_tol);
    let flag = if phys.is_clean() { String::new() } else { format!("unphysical={}", phys.0) };
    SweepRecord {
        axis1: 0.0,
        axis2: None,
        converged: true,
        var_min_db,
        theta_min,
        n_photons: state.ada.re,
        ens_var_min_db: min_ensemble_quadrature(state, p).db_min,
        xi2: spin.xi2,
        classification: spin.classification,
        lasing_margin: lasing_threshold_margin(p),
        flag,
    }
}

fn cavity_db(state: &MomentState, theta: ThetaPolicy) -> (f64, f64) {
    match theta {
        ThetaPolicy::Optimized => {
            let q = min_cavity_quadrature(state);
            (q.db_min, q.theta_min)
        }
        ThetaPolicy::Fixed(t) => (db(cavity_quadrature_variance(state, t), 1.0), t),
    }
}

pub(crate) fn failed_record(p: &SystemParams, flag: String) -> SweepRecord {
    SweepRecord {
        axis1: 0.0,
        axis2: None,
        converged: false,
        var_min_db: f64::NAN,
        theta_min: f64::NAN,
        n_photons: f64::NAN,
        ens_var_min_db: f64::NAN,
        xi2: [None; 3],
        classification: SpinClass::None,
        lasing_margin: lasing_threshold_margin(p),
        flag,
    }
}

/// Index of the first sample after the transient.
pub fn transient_start(trace: &Trace, fraction: f64) -> usize {
    let t0 = fraction * trace.times.last().copied().unwrap_or(0.0);
    trace.times.iter().position(|t| *t >= t0).unwrap_or(0)
}

/// Minima over the post-transient window of a trace.
///
/// `var_min_db`, `theta_min`, `n_photons` and the classification refer to
/// the instant of deepest cavity squeezing; `ens_var_min_db` and each ξ²
/// are minima over the window.
pub fn trace_min_record(
    trace: &Trace,
    p: &SystemParams,
    theta: ThetaPolicy,
    transient_fraction: f64,
) -> SweepRecord {
    let start = transient_start(trace, transient_fraction);
    let window = &trace.states[start..];
    let mut best: Option<(usize, f64, f64)> = None;
    let mut ens = f64::INFINITY;
    let mut xi2: [Option<f64>; 3] = [None; 3];
    for (i, s) in window.iter().enumerate() {
        let (v, th) = cavity_db(s, theta);
        if best.is_none_or(|b| v < b.1) {
            best = Some((i, v, th));
        }
        ens = ens.min(min_ensemble_quadrature(s, p).db_min);
        let m = spin_metrics(s, p);
        for (acc, x) in xi2.iter_mut().zip(m.xi2) {
            if let Some(x) = x {
                *acc = Some(acc.map_or(x, |a: f64| a.min(x)));
            }
        }
    }
    let Some((i, v, th)) = best else {
        return failed_record(p, "empty_window".into());
    };
    let at = &window[i];
    let mut flags = Vec::new();
    let bad = trace.flags[start..].iter().filter(|f| !f.is_clean()).count();
    if bad > 0 {
        flags.push(format!("unphysical_samples={bad}"));
    }
    SweepRecord {
        axis1: 0.0,
        axis2: None,
        converged: true,
        var_min_db: v,
        theta_min: th,
        n_photons: at.ada.re,
        ens_var_min_db: ens,
        xi2,
        classification: spin_metrics(at, p).classification,
        lasing_margin: lasing_threshold_margin(p),
        flag: flags.join("|"),
    }
}

/// PSD of the normally ordered variance over the post-transient window.
pub fn trace_psd(
    trace: &Trace,
    theta: f64,
    transient_fraction: f64,
    settings: &PsdSettings,
) -> Result<PsdEstimate, crate::error::SpectralError> {
    let start = transient_start(trace, transient_fraction);
    let series = normally_ordered_variance_series(trace, theta);
    let series = &series[start..];
    let len = settings.segment_length.unwrap_or_else(|| default_segment_length(series.len()));
    let dt = trace.dt();
    let fs = if dt > 0.0 { 1.0 / dt } else { 0.0 };
    let raw = welch_psd(series, fs, len, settings.overlap_fraction, settings.window)?;
    if settings.shot_noise_referenced {
        scale_spectral_density(&raw, settings.epsilon, settings.varrho)
    } else {
        Ok(raw)
    }
}

pub(crate) fn evaluate_trace(spec: &SweepSpec, p: &SystemParams, flag: Option<&str>) -> (SweepRecord, Option<PsdEstimate>) {
    let init = initial_thermal_state(p);
    match integrate_trace(p, &init, &spec.integration) {
        Ok(tr) => {
            let mut rec = trace_min_record(&tr, p, spec.theta, spec.transient_fraction);
            if let Some(f) = flag {
                rec.converged = false;
                rec.flag = if rec.flag.is_empty() { f.to_string() } else { format!("{f}|{}", rec.flag) };
            }
            let psd = if spec.mode == SweepMode::Psd {
                match trace_psd(&tr, rec.theta_min, spec.transient_fraction, &spec.psd) {
                    Ok(e) => Some(e),
                    Err(e) => {
                        rec.flag = join_flag(&rec.flag, &format!("psd_error={}", sanitize(&e.to_string())));
                        None
                    }
                }
            } else {
                None
            };
            (rec, psd)
        }
        Err(e) => {
            let mut msg = format!("integration_failure={}", sanitize(&e.to_string()));
            if let Some(f) = flag {
                msg = format!("{f}|{msg}");
            }
            (failed_record(p, msg), None)
        }
    }
}

fn join_flag(a: &str, b: &str) -> String {
    if a.is_empty() {
        b.to_string()
    } else {
        format!("{a}|{b}")
    }
}

/// Makes a diagnostic safe for a single CSV field.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c == ',' || c == '\n' || c == '\r' || c == '"' || c == '|' { ' ' } else { c })
        .collect()
}

fn evaluate_point(spec: &SweepSpec, point: (f64, Option<f64>)) -> (SweepRecord, Option<PsdEstimate>) {
    let p = match spec.params_at(&point) {
        Ok(p) => p,
        Err(e) => {
            let rec = failed_record(&spec.base, format!("invalid_point={}", sanitize(&e.to_string())));
            return (SweepRecord { axis1: point.0, axis2: point.1, ..rec }, None);
        }
    };
    let (rec, psd) = match spec.mode {
        SweepMode::Steady => match find_steady_state(&p, &spec.integration) {
            Ok(ss) if ss.verified => (steady_record(&ss.state, &p, spec.theta), None),
            Ok(_) => evaluate_trace(spec, &p, Some("unverified_steady_state")),
            Err(SteadyStateError::NoSteadyState { .. }) => evaluate_trace(spec, &p, Some("no_steady_state")),
            Err(SteadyStateError::Integration(e)) => {
                let msg = format!("integration_failure={}", sanitize(&e.to_string()));
                (failed_record(&p, msg), None)
            }
        },
        SweepMode::TraceMin | SweepMode::Psd => evaluate_trace(spec, &p, None),
    };
    (SweepRecord { axis1: point.0, axis2: point.1, ..rec }, psd)
}

/// Evaluates every grid point on the global rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let grid = spec.grid();
    let out: Vec<_> = grid.par_iter().map(|&pt| evaluate_point(spec, pt)).collect();
    let (records, psd) = out.into_iter().unzip();
    Ok(SweepResult { axis_names: spec.axes.iter().map(|a| a.name.clone()).collect(), records, psd })
}

/// [`run_sweep`] on a dedicated pool of `jobs` workers.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<SweepResult, SweepError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SweepError::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

pub const PRESET_NAMES: [&str; 12] = [
    "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8", "fig9a", "fig9b", "fig10", "fig11",
];

/// One-line description of each preset, for listings.
pub fn preset_summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig3a" => "free-space emitter: ensemble variance vs z for several pure-dephasing rates",
        "fig3b" => "single emitter in a resonant cavity: ensemble variance vs z for several g1",
        "fig4a" => "single emitter, g1 = 1: steady cavity variance map over delta_c and omega, delta0 = 0",
        "fig4b" => "as fig4a with delta0 = 25",
        "fig5" => "single emitter: steady cavity variance vs g1 for several delta_c",
        "fig6" => "N = 1e6, g1 = 1e-3: steady cavity variance map over delta_c and omega",
        "fig7" => "steady cavity variance vs z for N = 1e4 .. 1e8",
        "fig8" => "N = 1e8, z = 1e-6: steady cavity variance vs delta0 for several dephasing rates",
        "fig9a" => "N = 1e8, g1 = 5e-3: weakly driven detuned dynamics",
        "fig9b" => "N = 1e8, g1 = 5e-3: strongly driven lasing dynamics",
        "fig10" => "N = 1e4, g1 = 0.005, delta_c = 100: modulated squeezing vs omega",
        "fig11" => "as fig10 at omega = 0.02 with increasing pure dephasing",
        _ => return None,
    })
}

fn note(v: &str, source: &str) -> String {
    format!("{v}  [{source}]")
}

/// Parameter grid of a named figure preset. Rates are in units of κ.
pub fn figure_preset(name: &str) -> Result<SweepSpec, SweepError> {
    let base = SystemParams { gamma1: 0.1, ..Default::default() };
    let caption = |v: &str| note(v, "caption");
    let text = |v: &str| note(v, "text");
    let approx = |v: &str| note(v, "approximate, read from plot");
    let spec = match name {
        "fig3a" => {
            let mut s = SweepSpec::new(
                name,
                base,
                vec![
                    Axis::list("gamma2_star", &[0.0, 0.01, 0.02, 0.05, 0.1]),
                    Axis::log(SCALED_DRIVE_AXIS, 1e-3, 1e2, 101),
                ],
                SweepMode::Steady,
            );
            s.notes = vec![
                caption("g1 = 0, N = 1, gamma1 = 0.1"),
                approx("gamma2_star values and z range"),
            ];
            s
        }
        "fig3b" => {
            let mut s = SweepSpec::new(
                name,
                base,
                vec![
                    Axis::list("g1", &[0.0, 0.04, 0.06, 0.1]),
                    Axis::log(SCALED_DRIVE_AXIS, 1e-3, 1e2, 101),
                ],
                SweepMode::Steady,
            );
            s.notes = vec![
                caption("g1/gamma1 in {0, 0.4, 0.6, 1}, gamma1 = 0.1, resonant"),
                approx("z range"),
            ];
            s
        }
        "fig4a" | "fig4b" => {
            let delta0 = if name == "fig4a" { 0.0 } else { 25.0 };
            let mut s = SweepSpec::new(
                name,
                SystemParams { g1: 1.0, delta0, ..base },
                vec![Axis::linear("delta_c", -50.0, 50.0, 101), Axis::linear("omega_rabi", 0.0, 50.0, 101)],
                SweepMode::Steady,
            );
            s.notes = vec![
                caption(&format!("N = 1, gamma1 = 0.1, delta0 = {delta0}")),
                text("g1 = 1"),
                approx("101 x 101 grid over delta_c in [-50, 50], omega in [0, 50]"),
            ];
            s
        }
        "fig5" => {
            let mut s = SweepSpec::new(
                name,
                SystemParams { omega_rabi: 1.0, delta0: 25.0, ..base },
                vec![
                    Axis::list("delta_c", &[0.0, 5.0, 10.0, 25.0, 50.0]),
                    Axis::log("g1", 0.1, 50.0, 101),
                ],
                SweepMode::Steady,
            );
            s.notes = vec![
                caption("omega = 1, gamma1 = 0.1, delta0 = 25"),
                approx("delta_c values and g1 range"),
            ];
            s
        }
        "fig6" => {
            let mut s = SweepSpec::new(
                name,
                SystemParams { n_emitters: 1_000_000, g1: 1e-3, delta0: 25.0, ..base },
                vec![Axis::linear("delta_c", -50.0, 50.0, 101), Axis::linear("omega_rabi", 0.0, 50.0, 101)],
                SweepMode::Steady,
            );
            s.notes = vec![
                caption("N = 1e6, gamma1 = 0.1, delta0 = 25"),
                text("g1 = 1e-3"),
                approx("101 x 101 grid over delta_c in [-50, 50], omega in [0, 50]"),
            ];
            s
        }
        "fig7" => {
            let mut s = SweepSpec::new(
                name,
                SystemParams { g1: 1e-3, delta0: 80.0, delta_c: -5.0, ..base },
                vec![
                    Axis::list("n_emitters", &[1e4, 1e5, 1e6, 1e7, 1e8]),
                    Axis::log(SCALED_DRIVE_AXIS, 1e-8, 1.0, 25),
                ],
                SweepMode::Steady,
            );
            s.notes = vec![
                caption("gamma1 = 0.1, delta0 = 80, delta_c = -5, gamma2_star = 0"),
                caption("N in {1e4 .. 1e8}"),
                text("g1 = 1e-3"),
                approx("z range 1e-8 .. 1, 25 points"),
            ];
            s
        }
        "fig8" => {
            let mut s = SweepSpec::new(
                name,
                SystemParams { n_emitters: 100_000_000, g1: 1e-3, delta_c: -5.0, ..base },
                vec![
                    Axis::list("gamma2_star", &[0.0, 0.01, 0.1, 1.0]),
                    Axis::log("delta0", 40.0, 1000.0, 15),
                ],
                SweepMode::Steady,
            );
            s.fixed_scaled_drive = Some(1e-6);
            s.notes = vec![
                caption("N = 1e8, z = 1e-6"),
                text("gamma2_star/gamma1 in {0, 0.1, 1, 10}"),
                approx("g1 = 1e-3, delta_c = -5, delta0 range 40 .. 1000"),
            ];
            s
        }
        "fig9a" | "fig9b" => {
            let (p, omegas): (SystemParams, &[f64]) = if name == "fig9a" {
                (SystemParams { n_emitters: 100_000_000, g1: 5e-3, delta0: 100.0, delta_c: -100.0, ..base }, &[0.1, 1.0])
            } else {
                (SystemParams { n_emitters: 100_000_000, g1: 5e-3, delta0: 0.0, delta_c: 100.0, ..base }, &[1.0, 10.0])
            };
            let mut s = SweepSpec::new(name, p, vec![Axis::list("omega_rabi", omegas)], SweepMode::TraceMin);
            s.integration = IntegrationConfig { t_end: 100.0, sample_count: 20_001, ..Default::default() };
            s.notes = vec![
                caption("N = 1e8, g1 = 5e-3, gamma1 = 0.1"),
                approx("detunings and drive strengths"),
            ];
            s
        }
        "fig10" => {
            let mut s = SweepSpec::new(
                name,
                SystemParams { n_emitters: 10_000, g1: 0.005, delta0: 0.0, delta_c: 100.0, ..base },
                vec![Axis::list("omega_rabi", &[0.1, 0.05, 0.02])],
                SweepMode::TraceMin,
            );
            s.integration = IntegrationConfig { t_end: 200.0, sample_count: 40_001, ..Default::default() };
            s.notes = vec![
                caption("N = 1e4, g1 = 0.005, gamma1 = 0.1, delta0 = 0, delta_c = 100"),
                text("omega in {0.1, 0.05, 0.02}"),
                approx("t_end = 200, 200 samples per unit time"),
            ];
            s
        }
        "fig11" => {
            let mut s = SweepSpec::new(
                name,
                SystemParams { n_emitters: 10_000, g1: 0.005, omega_rabi: 0.02, delta0: 0.0, delta_c: 100.0, ..base },
                vec![Axis::list("gamma2_star", &[0.0, 0.01, 0.02, 0.05, 0.1, 0.2])],
                SweepMode::Psd,
            );
            s.integration = IntegrationConfig { t_end: 200.0, sample_count: 40_001, ..Default::default() };
            s.notes = vec![
                caption("omega = 0.02, otherwise as fig10"),
                text("gamma2_star/gamma1 in {0, 0.1, 0.2, 0.5, 1, 2}"),
            ];
            s
        }
        other => return Err(SweepError::UnknownPreset(other.to_string())),
    };
    Ok(spec)
}

pub const CSV_HEADER: [&str; 13] = [
    "axis1",
    "axis2",
    "converged",
    "var_min_db",
    "theta_min",
    "n_photons",
    "ens_var_min_db",
    "xi2_x",
    "xi2_y",
    "xi2_z",
    "classification",
    "lasing_margin",
    "flag",
];

/// 17 significant digits, so every finite value round-trips exactly.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<(), CsvError> {
    if result.records.is_empty() {
        return Err(CsvError::Empty);
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let wrap = |e: csv::Error| CsvError::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(wrap)?;
    for r in &result.records {
        let row = [
            format_f64(r.axis1),
            format_opt(r.axis2),
            r.converged.to_string(),
            format_f64(r.var_min_db),
            format_f64(r.theta_min),
            format_f64(r.n_photons),
            format_f64(r.ens_var_min_db),
            format_opt(r.xi2[0]),
            format_opt(r.xi2[1]),
            format_opt(r.xi2[2]),
            r.classification.as_str().to_string(),
            format_f64(r.lasing_margin),
            r.flag.clone(),
        ];
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(result: &SweepResult, path: &std::path::Path) -> Result<(), CsvError> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<SweepResult, CsvError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut rows = rd.records();
    let header = match rows.next() {
        None => return Err(CsvError::Empty),
        Some(h) => h.map_err(|e| csv_err(1, e))?,
    };
    for (i, expected) in CSV_HEADER.iter().enumerate() {
        let found = header.get(i).unwrap_or("");
        if found != *expected {
            return Err(CsvError::Header { line: 1, expected: expected.to_string(), found: found.to_string() });
        }
    }
    if header.len() > CSV_HEADER.len() {
        return Err(CsvError::Header {
            line: 1,
            expected: "end of header".into(),
            found: header[CSV_HEADER.len()].to_string(),
        });
    }
    let mut records = Vec::new();
    for (i, row) in rows.enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| csv_err(line, e))?;
        if row.len() != CSV_HEADER.len() {
            return Err(CsvError::Record {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
            });
        }
        let num = |col: usize| -> Result<f64, CsvError> {
            parse_f64(&row[col]).ok_or_else(|| CsvError::Field {
                line,
                column: CSV_HEADER[col],
                message: format!("not a number: `{}`", &row[col]),
            })
        };
        let opt = |col: usize| -> Result<Option<f64>, CsvError> {
            if row[col].is_empty() {
                Ok(None)
            } else {
                num(col).map(Some)
            }
        };
        let converged = match &row[2] {
            "true" => true,
            "false" => false,
            other => {
                return Err(CsvError::Field { line, column: "converged", message: format!("not a boolean: `{other}`") })
            }
        };
        let classification = row[10]
            .parse::<SpinClass>()
            .map_err(|message| CsvError::Field { line, column: "classification", message })?;
        records.push(SweepRecord {
            axis1: num(0)?,
            axis2: opt(1)?,
            converged,
            var_min_db: num(3)?,
            theta_min: num(4)?,
            n_photons: num(5)?,
            ens_var_min_db: num(6)?,
            xi2: [opt(7)?, opt(8)?, opt(9)?],
            classification,
            lasing_margin: num(11)?,
            flag: row[12].to_string(),
        });
    }
    if records.is_empty() {
        return Err(CsvError::Empty);
    }
    let psd = vec![None; records.len()];
    Ok(SweepResult { axis_names: Vec::new(), records, psd })
}

pub fn read_csv_file(path: &std::path::Path) -> Result<SweepResult, CsvError> {
    read_csv(std::fs::File::open(path)?)
}

fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

fn csv_err(line: usize, e: csv::Error) -> CsvError {
    CsvError::Record { line, message: e.to_string() }
}
