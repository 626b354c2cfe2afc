//! Run configuration: a small `[section]` / `key = value` format with
//! `#` comments, plus command-line overrides of the same keys.
//!
//! Precedence is flag over file over built-in default.

use std::collections::BTreeMap;

use crate::error::ConfigError;
use crate::integrator::IntegrationConfig;
use crate::oracle::{ComparisonTolerances, OracleConfig};
use crate::params::SystemParams;
use crate::spectral::Window;
use crate::sweep::{figure_preset, Axis, PsdSettings, Spacing, SweepMode, SweepSpec, ThetaPolicy};

pub const SECTIONS: [&str; 5] = ["system", "integration", "sweep", "psd", "oracle"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Finite real.
    Real,
    NonNegative,
    Positive,
    /// Integer ≥ the given bound.
    Count(usize),
    /// Real in [0, 1).
    Fraction,
    /// Real in [0, 0.9].
    Overlap,
    /// Real in (0, 1].
    Efficiency,
    Bool,
    /// Number or `optimized`.
    Theta,
    /// Whitespace- or comma-separated numbers.
    List,
    Text(&'static [&'static str]),
    /// Free-form identifier.
    Name,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub section: &'static str,
    pub key: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

macro_rules! keys {
    ($($s:literal $k:literal $kind:expr, $h:literal;)*) => {
        &[$(KeySpec { section: $s, key: $k, kind: $kind, help: $h }),*]
    };
}

const AXIS_NAMES: &[&str] = &[
    "n_emitters", "g1", "kappa", "gamma1", "gamma2_star", "omega_rabi", "delta0", "delta_c", "n_bar", "z",
];
const SPACINGS: &[&str] = &["linear", "log"];
const MODES: &[&str] = &["steady", "trace_min", "psd"];
const WINDOWS: &[&str] = &["hann", "rectangular"];

/// Every accepted key.
pub const KEYS: &[KeySpec] = keys! {
    "system" "n_emitters" Kind::Count(1), "number of emitters N";
    "system" "g1" Kind::NonNegative, "single-emitter coupling g1 (units of kappa)";
    "system" "kappa" Kind::Positive, "cavity decay rate";
    "system" "gamma1" Kind::NonNegative, "longitudinal relaxation rate";
    "system" "gamma2_star" Kind::NonNegative, "pure-dephasing rate";
    "system" "omega_rabi" Kind::NonNegative, "Rabi frequency of the drive";
    "system" "delta0" Kind::Real, "emitter-drive detuning";
    "system" "delta_c" Kind::Real, "cavity-drive detuning";
    "system" "n_bar" Kind::NonNegative, "thermal occupancy";
    "system" "z" Kind::NonNegative, "scaled drive (omega/|Gamma_t|)^2; overrides omega_rabi";
    "integration" "t_end" Kind::Positive, "integration time";
    "integration" "sample_count" Kind::Count(2), "number of output samples";
    "integration" "rel_tol" Kind::Positive, "relative tolerance";
    "integration" "abs_tol" Kind::Positive, "absolute tolerance";
    "integration" "max_step" Kind::Positive, "largest solver step";
    "integration" "hermiticity_tol" Kind::Positive, "tolerance of the physicality monitor";
    "integration" "max_steps" Kind::Count(1), "solver step budget";
    "sweep" "preset" Kind::Name, "figure preset to start from";
    "sweep" "mode" Kind::Text(MODES), "steady | trace_min | psd";
    "sweep" "theta" Kind::Theta, "quadrature angle or `optimized`";
    "sweep" "transient_fraction" Kind::Fraction, "leading fraction of each trace discarded";
    "sweep" "axis1" Kind::Text(AXIS_NAMES), "first axis parameter";
    "sweep" "axis1_min" Kind::Real, "first axis lower bound";
    "sweep" "axis1_max" Kind::Real, "first axis upper bound";
    "sweep" "axis1_count" Kind::Count(2), "first axis point count";
    "sweep" "axis1_spacing" Kind::Text(SPACINGS), "linear | log";
    "sweep" "axis1_values" Kind::List, "explicit first-axis values";
    "sweep" "axis2" Kind::Text(AXIS_NAMES), "second axis parameter";
    "sweep" "axis2_min" Kind::Real, "second axis lower bound";
    "sweep" "axis2_max" Kind::Real, "second axis upper bound";
    "sweep" "axis2_count" Kind::Count(2), "second axis point count";
    "sweep" "axis2_spacing" Kind::Text(SPACINGS), "linear | log";
    "sweep" "axis2_values" Kind::List, "explicit second-axis values";
    "psd" "segment_length" Kind::Count(8), "Welch segment length (default len/8 as a power of two)";
    "psd" "overlap" Kind::Overlap, "segment overlap fraction";
    "psd" "window" Kind::Text(WINDOWS), "hann | rectangular";
    "psd" "epsilon" Kind::Efficiency, "detection efficiency";
    "psd" "varrho" Kind::Efficiency, "escape efficiency";
    "psd" "shot_noise_referenced" Kind::Bool, "report epsilon*varrho*(1 + power) instead of the raw periodogram";
    "psd" "theta" Kind::Theta, "quadrature angle or `optimized`";
    "psd" "transient_fraction" Kind::Fraction, "leading fraction of the trace discarded";
    "oracle" "n_max" Kind::Count(1), "photon-number cutoff";
    "oracle" "n_spins" Kind::Count(1), "number of explicit spins (1 to 3)";
    "oracle" "t_end" Kind::Positive, "evolution time";
    "oracle" "sample_count" Kind::Count(2), "number of output samples";
    "oracle" "rel_tol" Kind::Positive, "relative tolerance";
    "oracle" "abs_tol" Kind::Positive, "absolute tolerance";
    "oracle" "dim_cap" Kind::Count(2), "largest Hilbert-space dimension";
    "oracle" "truncation_tol" Kind::Positive, "largest tolerated top-level population";
    "oracle" "tol_relative" Kind::Positive, "relative agreement tolerance";
    "oracle" "tol_absolute" Kind::Positive, "absolute agreement tolerance for small moments";
    "oracle" "tol_small" Kind::Positive, "magnitude below which the absolute tolerance applies";
};

pub fn key_spec(section: &str, key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.section == section && k.key == key)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
    Optimized,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: Value,
    /// Source line, 0 for a command-line flag.
    line: usize,
}

/// Parsed configuration file plus overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<(String, String), Entry>,
}

fn range(key: &KeySpec, raw: &str, rule: &str) -> ConfigError {
    ConfigError::Range { key: format!("{}.{}", key.section, key.key), value: raw.to_string(), rule: rule.to_string() }
}

/// Converts the text of a value according to its key's kind.
///
/// `Err(None)` means the text is not of the right shape at all, which the
/// caller reports as a syntax error.
fn convert(spec: &KeySpec, raw: &str) -> Result<Value, Option<ConfigError>> {
    let num = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
    let check = |ok: bool, v: f64, rule: &str| {
        if ok {
            Ok(Value::Number(v))
        } else {
            Err(Some(range(spec, raw, rule)))
        }
    };
    match spec.kind {
        Kind::Real => num(raw).map(Value::Number).ok_or(None),
        Kind::NonNegative => {
            let v = num(raw).ok_or(None)?;
            check(v >= 0.0, v, "must be non-negative")
        }
        Kind::Positive => {
            let v = num(raw).ok_or(None)?;
            check(v > 0.0, v, "must be positive")
        }
        Kind::Count(min) => {
            let v = num(raw).ok_or(None)?;
            if v.fract() != 0.0 {
                return Err(Some(range(spec, raw, "must be an integer")));
            }
            check(v >= min as f64, v, &format!("must be an integer >= {min}"))
        }
        Kind::Fraction => {
            let v = num(raw).ok_or(None)?;
            check((0.0..1.0).contains(&v), v, "must lie in [0, 1)")
        }
        Kind::Overlap => {
            let v = num(raw).ok_or(None)?;
            check((0.0..=0.9).contains(&v), v, "must lie in [0, 0.9]")
        }
        Kind::Efficiency => {
            let v = num(raw).ok_or(None)?;
            check(v > 0.0 && v <= 1.0, v, "must lie in (0, 1]")
        }
        Kind::Bool => match raw {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(None),
        },
        Kind::Theta => {
            if raw == "optimized" {
                Ok(Value::Optimized)
            } else {
                num(raw).map(Value::Number).ok_or(None)
            }
        }
        Kind::List => {
            let items: Vec<&str> = raw.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if items.is_empty() {
                return Err(Some(range(spec, raw, "needs at least one value")));
            }
            items.iter().map(|s| num(s)).collect::<Option<Vec<_>>>().map(Value::List).ok_or(None)
        }
        Kind::Text(allowed) => {
            if allowed.contains(&raw) {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(Some(range(spec, raw, &format!("must be one of {}", allowed.join(", ")))))
            }
        }
        Kind::Name => {
            if !raw.is_empty() && raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(None)
            }
        }
    }
}

fn kind_description(kind: Kind) -> &'static str {
    match kind {
        Kind::Bool => "expected true or false",
        Kind::Theta => "expected a number or `optimized`",
        Kind::List => "expected a list of numbers",
        Kind::Name => "expected an identifier",
        Kind::Count(_) => "expected an integer",
        _ => "expected a number",
    }
}

fn strip_quotes(s: &str) -> &str {
    s.strip_prefix('"').and_then(|t| t.strip_suffix('"')).unwrap_or(s)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section: Option<&str> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let lead = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let syntax = |column: usize, message: String| ConfigError::Syntax { line, column, message };
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(syntax(lead + trimmed.len() + 1, "expected `]`".into()));
            };
            let name = name.trim();
            match SECTIONS.iter().find(|s| **s == name) {
                Some(s) => section = Some(s),
                None => return Err(syntax(lead + 2, format!("unknown section `{name}`"))),
            }
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return Err(syntax(lead + 1, "expected `key = value`".into()));
        };
        let key = trimmed[..eq].trim();
        if key.is_empty() {
            return Err(syntax(lead + 1, "missing key".into()));
        }
        let after = &trimmed[eq + 1..];
        let value_col = lead + eq + 2 + (after.len() - after.trim_start().len());
        let value = strip_quotes(after.trim());
        if value.is_empty() {
            return Err(syntax(value_col, "missing value".into()));
        }
        let Some(sec) = section else {
            return Err(syntax(lead + 1, format!("key `{key}` outside any section")));
        };
        cfg.assign(sec, key, value, line, value_col)?;
    }
    Ok(cfg)
}

impl RunConfig {
    fn assign(&mut self, section: &str, key: &str, raw: &str, line: usize, column: usize) -> Result<(), ConfigError> {
        let Some(spec) = key_spec(section, key) else {
            return Err(ConfigError::UnknownKey { line, section: section.into(), key: key.into() });
        };
        let value = convert(spec, raw).map_err(|e| {
            e.unwrap_or_else(|| ConfigError::Syntax { line, column, message: kind_description(spec.kind).into() })
        })?;
        let slot = (section.to_string(), key.to_string());
        if line > 0 {
            if let Some(prev) = self.entries.get(&slot) {
                if prev.line > 0 {
                    return Err(ConfigError::Duplicate {
                        key: format!("{section}.{key}"),
                        first: prev.line,
                        second: line,
                    });
                }
            }
        }
        self.entries.insert(slot, Entry { value, line });
        Ok(())
    }

    /// Applies a `section.key` override from the command line.
    pub fn set_override(&mut self, dotted: &str, raw: &str) -> Result<(), ConfigError> {
        let (section, key) = dotted.split_once('.').unwrap_or(("", dotted));
        self.assign(section, key, raw.trim(), 0, 1)
    }

    pub fn is_set(&self, section: &str, key: &str) -> bool {
        self.entries.contains_key(&(section.to_string(), key.to_string()))
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.entries.get(&(section.to_string(), key.to_string())).map(|e| &e.value)
    }

    fn number(&self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    fn text(&self, section: &str, key: &str) -> Option<&str> {
        match self.get(section, key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    fn theta(&self, section: &str) -> Option<ThetaPolicy> {
        match self.get(section, "theta") {
            Some(Value::Optimized) => Some(ThetaPolicy::Optimized),
            Some(Value::Number(t)) => Some(ThetaPolicy::Fixed(*t)),
            _ => None,
        }
    }

    /// `base` with every `[system]` key that was set applied on top.
    pub fn system_over(&self, base: SystemParams) -> Result<SystemParams, ConfigError> {
        let mut p = base;
        for spec in KEYS.iter().filter(|k| k.section == "system" && k.key != "z") {
            if let Some(v) = self.number("system", spec.key) {
                p.set(spec.key, v).map_err(|e| range(spec, &v.to_string(), &e.to_string()))?;
            }
        }
        if let Some(z) = self.number("system", "z") {
            p = p.with_scaled_drive(z);
        }
        Ok(p)
    }

    pub fn system(&self) -> Result<SystemParams, ConfigError> {
        self.system_over(SystemParams::default())
    }

    pub fn integration_over(&self, base: IntegrationConfig) -> IntegrationConfig {
        let mut c = base;
        let n = |k: &str| self.number("integration", k);
        if let Some(v) = n("t_end") {
            c.t_end = v;
        }
        if let Some(v) = n("sample_count") {
            c.sample_count = v as usize;
        }
        if let Some(v) = n("rel_tol") {
            c.rel_tol = v;
        }
        if let Some(v) = n("abs_tol") {
            c.abs_tol = v;
        }
        if let Some(v) = n("max_step") {
            c.max_step = Some(v);
        }
        if let Some(v) = n("hermiticity_tol") {
            c.hermiticity_tol = v;
        }
        if let Some(v) = n("max_steps") {
            c.max_steps = v as usize;
        }
        c
    }

    pub fn integration(&self) -> IntegrationConfig {
        self.integration_over(IntegrationConfig::default())
    }

    pub fn psd_settings(&self) -> PsdSettings {
        let mut s = PsdSettings::default();
        if let Some(v) = self.number("psd", "segment_length") {
            s.segment_length = Some(v as usize);
        }
        if let Some(v) = self.number("psd", "overlap") {
            s.overlap_fraction = v;
        }
        if let Some(w) = self.text("psd", "window") {
            s.window = w.parse::<Window>().unwrap_or_default();
        }
        if let Some(v) = self.number("psd", "epsilon") {
            s.epsilon = v;
        }
        if let Some(v) = self.number("psd", "varrho") {
            s.varrho = v;
        }
        if let Some(Value::Bool(b)) = self.get("psd", "shot_noise_referenced") {
            s.shot_noise_referenced = *b;
        }
        s
    }

    pub fn psd_theta(&self) -> ThetaPolicy {
        self.theta("psd").unwrap_or_default()
    }

    pub fn psd_transient_fraction(&self) -> f64 {
        self.number("psd", "transient_fraction").unwrap_or(0.2)
    }

    pub fn oracle(&self) -> OracleConfig {
        let mut c = OracleConfig::default();
        let n = |k: &str| self.number("oracle", k);
        if let Some(v) = n("n_max") {
            c.n_max = v as usize;
        }
        if let Some(v) = n("n_spins") {
            c.n_spins = v as usize;
        }
        if let Some(v) = n("t_end") {
            c.t_end = v;
        }
        if let Some(v) = n("sample_count") {
            c.sample_count = v as usize;
        }
        if let Some(v) = n("rel_tol") {
            c.rel_tol = v;
        }
        if let Some(v) = n("abs_tol") {
            c.abs_tol = v;
        }
        if let Some(v) = n("dim_cap") {
            c.dim_cap = v as usize;
        }
        if let Some(v) = n("truncation_tol") {
            c.truncation_tol = v;
        }
        c
    }

    pub fn tolerances(&self) -> ComparisonTolerances {
        let mut t = ComparisonTolerances::default();
        if let Some(v) = self.number("oracle", "tol_relative") {
            t.relative = v;
        }
        if let Some(v) = self.number("oracle", "tol_absolute") {
            t.absolute = v;
        }
        if let Some(v) = self.number("oracle", "tol_small") {
            t.small_value = v;
        }
        t
    }

    fn axis(&self, k: usize) -> Result<Option<Axis>, ConfigError> {
        let key = |s: &str| if s.is_empty() { format!("axis{k}") } else { format!("axis{k}_{s}") };
        let Some(name) = self.text("sweep", &key("")) else {
            let stray = ["min", "max", "count", "spacing", "values"].iter().find(|s| self.is_set("sweep", &key(s)));
            return match stray {
                Some(s) => Err(ConfigError::Range {
                    key: format!("sweep.{}", key(s)),
                    value: String::new(),
                    rule: format!("requires sweep.axis{k}"),
                }),
                None => Ok(None),
            };
        };
        if let Some(Value::List(v)) = self.get("sweep", &key("values")) {
            return Ok(Some(Axis::list(name, v)));
        }
        let missing = |s: &str| ConfigError::Range {
            key: format!("sweep.{}", key(s)),
            value: String::new(),
            rule: format!("required when sweep.axis{k} has no value list"),
        };
        let min = self.number("sweep", &key("min")).ok_or_else(|| missing("min"))?;
        let max = self.number("sweep", &key("max")).ok_or_else(|| missing("max"))?;
        let count = self.number("sweep", &key("count")).ok_or_else(|| missing("count"))? as usize;
        let spacing = match self.text("sweep", &key("spacing")) {
            Some("log") => Spacing::Log,
            _ => Spacing::Linear,
        };
        Ok(Some(Axis { name: name.to_string(), min, max, count, spacing }))
    }

    /// Sweep specification: the named preset (flag or `sweep.preset`) or
    /// the configured axes, with every set key applied on top.
    pub fn sweep_spec(&self, preset: Option<&str>) -> Result<SweepSpec, ConfigError> {
        let preset = preset.or_else(|| self.text("sweep", "preset"));
        let mut spec = match preset {
            Some(name) => figure_preset(name).map_err(|e| ConfigError::Range {
                key: "sweep.preset".into(),
                value: name.into(),
                rule: e.to_string(),
            })?,
            None => SweepSpec::new("custom", SystemParams::default(), Vec::new(), SweepMode::Steady),
        };
        spec.base = self.system_over(spec.base)?;
        if self.is_set("system", "z") || self.is_set("system", "omega_rabi") {
            spec.fixed_scaled_drive = self.number("system", "z");
        }
        spec.integration = self.integration_over(spec.integration);
        let mut axes = Vec::new();
        for k in 1..=2 {
            if let Some(a) = self.axis(k)? {
                axes.push(a);
            }
        }
        if !axes.is_empty() {
            spec.axes = axes;
        }
        if let Some(m) = self.text("sweep", "mode") {
            spec.mode = m.parse().unwrap_or_default();
        }
        if let Some(t) = self.theta("sweep") {
            spec.theta = t;
        }
        if let Some(v) = self.number("sweep", "transient_fraction") {
            spec.transient_fraction = v;
        }
        spec.psd = self.psd_settings();
        if spec.axes.is_empty() {
            return Err(ConfigError::Range {
                key: "sweep.axis1".into(),
                value: String::new(),
                rule: "a sweep needs a preset or at least one axis".into(),
            });
        }
        spec.validate().map_err(|e| ConfigError::Range { key: "sweep".into(), value: spec.name.clone(), rule: e.to_string() })?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let c = parse_config("[system]\nn_emitters = 1\n").unwrap();
        let p = c.system().unwrap();
        assert_eq!(p, SystemParams::default());
        assert_eq!(c.integration(), IntegrationConfig::default());
    }

    #[test]
    fn scientific_notation_and_comments() {
        let c = parse_config("# top\n[system]\ng1 = 1e-3 # inline\nn_emitters = 1E8\n[psd]\nwindow = \"hann\"\n").unwrap();
        let p = c.system().unwrap();
        assert_eq!(p.g1, 1e-3);
        assert_eq!(p.n_emitters, 100_000_000);
    }

    #[test]
    fn negative_rate_is_range_error() {
        match parse_config("[system]\ngamma1 = -1\n") {
            Err(ConfigError::Range { key, rule, .. }) => {
                assert_eq!(key, "system.gamma1");
                assert!(rule.contains("non-negative"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_names_both_lines() {
        let err = parse_config("[system]\ng1 = 1\n\ng1 = 2\n").unwrap_err();
        assert_eq!(err, ConfigError::Duplicate { key: "system.g1".into(), first: 2, second: 4 });
        assert!(err.to_string().contains("line 2") && err.to_string().contains("line 4"));
    }

    #[test]
    fn unknown_key_and_section() {
        assert!(matches!(parse_config("[system]\nfoo = 1\n"), Err(ConfigError::UnknownKey { line: 2, .. })));
        assert!(matches!(parse_config("[bogus]\n"), Err(ConfigError::Syntax { line: 1, column: 2, .. })));
    }

    #[test]
    fn syntax_positions() {
        assert_eq!(
            parse_config("[system]\n  g1 = abc\n").unwrap_err(),
            ConfigError::Syntax { line: 2, column: 8, message: "expected a number".into() }
        );
        assert!(matches!(parse_config("[system\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_config("g1 = 1\n"), Err(ConfigError::Syntax { line: 1, column: 1, .. })));
        assert!(matches!(parse_config("[system]\njunk\n"), Err(ConfigError::Syntax { line: 2, column: 1, .. })));
    }

    #[test]
    fn flags_override_file() {
        let mut c = parse_config("[system]\ng1 = 1\n").unwrap();
        c.set_override("system.g1", "2").unwrap();
        assert_eq!(c.system().unwrap().g1, 2.0);
        assert!(c.set_override("system.nope", "2").is_err());
    }

    #[test]
    fn every_key_parses() {
        for k in KEYS {
            let v = match k.kind {
                Kind::Bool => "true",
                Kind::Theta => "optimized",
                Kind::List => "1 2 3",
                Kind::Text(a) => a[0],
                Kind::Name => "fig7",
                Kind::Count(m) => if m > 8 { "16" } else { "8" },
                Kind::Efficiency | Kind::Fraction | Kind::Overlap => "0.5",
                _ => "1",
            };
            let text = format!("[{}]\n{} = {}\n", k.section, k.key, v);
            parse_config(&text).unwrap_or_else(|e| panic!("{}.{}: {e}", k.section, k.key));
        }
    }

    #[test]
    fn sweep_from_axes() {
        let text = "[system]\ndelta0 = 80\n[sweep]\naxis1 = z\naxis1_min = 1e-6\naxis1_max = 1e-2\naxis1_count = 3\naxis1_spacing = log\n";
        let s = parse_config(text).unwrap().sweep_spec(None).unwrap();
        assert_eq!(s.axes[0].values().len(), 3);
        assert_eq!(s.base.delta0, 80.0);
        let p = parse_config("[sweep]\npreset = fig7\n").unwrap().sweep_spec(None).unwrap();
        assert_eq!(p.base.delta0, 80.0);
        assert!(parse_config("[sweep]\naxis1_min = 1\n").unwrap().sweep_spec(None).is_err());
    }
}
