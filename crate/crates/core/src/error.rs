use thiserror::Error;

use crate::integrator::Trace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} = {value}: {rule}")]
    Range {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("{name} is not finite")]
    NonFinite { name: &'static str },
    #[error("unknown parameter `{0}`")]
    UnknownField(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("moment `{name}` is not finite")]
    NonFiniteState { name: &'static str },
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error("invalid integration config: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, partial: Box<Trace> },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, partial: Box<Trace> },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64, partial: Box<Trace> },
}

impl IntegrationError {
    /// Time at which integration stopped, when a partial trace exists.
    pub fn failure_time(&self) -> Option<f64> {
        match self {
            Self::StepUnderflow { t, .. } | Self::NonFinite { t, .. } | Self::TooManySteps { t, .. } => {
                Some(*t)
            }
            _ => None,
        }
    }

    pub fn partial_trace(&self) -> Option<&Trace> {
        match self {
            Self::StepUnderflow { partial, .. }
            | Self::NonFinite { partial, .. }
            | Self::TooManySteps { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SteadyStateError {
    #[error("no steady state found (last residual {residual:.3e}); the system may be oscillating or lasing")]
    NoSteadyState { residual: f64 },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("collective spin is unpolarized transverse to the {axis} axis; xi^2 undefined")]
    Unpolarized { axis: char },
    #[error("alpha = Gamma / 2 gamma1 is undefined for gamma1 = 0")]
    UndefinedAlpha,
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("{what} must be positive, got {value}")]
    Domain { what: &'static str, value: f64 },
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("Hilbert-space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid oracle config: {0}")]
    InvalidConfig(&'static str),
    #[error("density-matrix invariant broken at t = {t}: {what}; increase n_max (currently {n_max})")]
    TruncationTooSmall { t: f64, what: String, n_max: usize },
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("series has {len} samples; at least {min} are required")]
    TooShort { len: usize, min: usize },
    #[error("segment length must be at least 8, got {0}")]
    SegmentTooShort(usize),
    #[error("overlap fraction {0} outside [0, 0.9]")]
    Overlap(f64),
    #[error("{what} must lie in (0, 1], got {value}")]
    Efficiency { what: &'static str, value: f64 },
    #[error("sample rate must be positive")]
    SampleRate,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected column `{expected}`, found `{found}`")]
    Header {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: column `{column}`: {message}")]
    Field {
        line: usize,
        column: &'static str,
        message: String,
    },
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("empty result: no grid points")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown key `{section}.{key}`")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {second}: duplicate key `{key}` (first set on line {first})")]
    Duplicate {
        key: String,
        first: usize,
        second: usize,
    },
    #[error("{key} = {value}: {rule}")]
    Range {
        key: String,
        value: String,
        rule: String,
    },
}
