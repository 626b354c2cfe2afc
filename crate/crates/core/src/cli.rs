//! Command-line front end of the `cavsim` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};

use crate::config::{parse_config, RunConfig, KEYS};
use crate::error::{ConfigError, SteadyStateError};
use crate::integrator::{find_steady_state, integrate_trace, Trace};
use crate::moments::{initial_thermal_state, Moment};
use crate::observables::{estimate_coupling, min_cavity_quadrature, min_ensemble_quadrature, spin_metrics};
use crate::oracle::compare_with_cumulant;
use crate::params::SystemParams;
use crate::spectral::PsdEstimate;
use crate::sweep::{
    evaluate_trace, figure_preset, format_f64, preset_summary, run_sweep, run_sweep_with_jobs, steady_record,
    trace_psd, write_csv, SweepMode, SweepResult, SweepSpec, ThetaPolicy, PRESET_NAMES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Failure of one CLI invocation.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self { code: EXIT_USAGE, kind: "usage", message: message.to_string() }
    }

    fn config(e: ConfigError) -> Self {
        Self { code: EXIT_USAGE, kind: "config", message: e.to_string() }
    }

    fn numerical(message: impl ToString) -> Self {
        Self { code: EXIT_NUMERICAL, kind: "numerical", message: message.to_string() }
    }

    fn io(e: impl ToString) -> Self {
        Self { code: EXIT_USAGE, kind: "io", message: e.to_string() }
    }

    /// Single `key=value` line for the end of standard error.
    pub fn diagnostic(&self) -> String {
        format!("status=error exit={} kind={} message={:?}", self.code, self.kind, self.message)
    }
}

fn common_args(cmd: Command) -> Command {
    let mut cmd = cmd
        .arg(Arg::new("config").long("config").value_name("FILE").help("configuration file"))
        .arg(Arg::new("out").long("out").value_name("FILE").help("output CSV path (standard output if omitted)"));
    for k in KEYS {
        let long = format!("{}.{}", k.section, k.key);
        cmd = cmd.arg(
            Arg::new(long.clone())
                .long(long)
                .value_name("VALUE")
                .allow_negative_numbers(true)
                .help(k.help)
                .help_heading("Configuration overrides"),
        );
    }
    cmd
}

pub fn command() -> Command {
    Command::new("cavsim")
        .about("Cumulant-expansion simulator of a driven cavity-coupled emitter ensemble")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(common_args(Command::new("trace").about("integrate from the thermal state and write every sample")))
        .subcommand(common_args(Command::new("steady").about("find the steady state and write one record")))
        .subcommand(
            common_args(Command::new("sweep").about("evaluate a parameter grid"))
                .arg(Arg::new("preset").long("preset").value_name("NAME").help("figure preset"))
                .arg(
                    Arg::new("jobs")
                        .long("jobs")
                        .value_name("N")
                        .value_parser(clap::value_parser!(usize))
                        .help("worker threads (default: $CAVSIM_JOBS, else all cores)"),
                ),
        )
        .subcommand(common_args(Command::new("psd").about("spectral density of the normally ordered variance")))
        .subcommand(
            common_args(Command::new("oracle").about("compare the moment equations with the exact master equation"))
                .arg(
                    Arg::new("n-spins")
                        .long("n-spins")
                        .value_name("N")
                        .value_parser(clap::value_parser!(usize))
                        .help("explicit spins in the oracle (1 to 3)"),
                ),
        )
        .subcommand(
            Command::new("coupling")
                .about("estimate g1, N and the collective coupling of a doped near-concentric cavity")
                .arg(num_arg("density", "1.76e23", "emitter density in m^-3"))
                .arg(num_arg("length", "1e-3", "cavity length in m"))
                .arg(num_arg("wavelength", "600e-9", "vacuum wavelength in m"))
                .arg(num_arg("gamma1", "2e8", "spontaneous emission rate in s^-1"))
                .arg(num_arg("index", "2.4", "refractive index"))
                .arg(num_arg("zeta", "0.75", "dipole overlap factor in (0, 1]")),
        )
        .subcommand(
            Command::new("preset-list")
                .about("list figure presets")
                .arg(Arg::new("show").long("show").value_name("NAME").help("print the full specification of one preset")),
        )
}

fn num_arg(name: &'static str, default: &'static str, help: &'static str) -> Arg {
    Arg::new(name)
        .long(name)
        .value_name("X")
        .allow_negative_numbers(true)
        .default_value(default)
        .value_parser(clap::value_parser!(f64))
        .help(help)
}

fn load_config(m: &ArgMatches) -> Result<RunConfig, Failure> {
    let mut cfg = match m.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{path}: {e}")))?;
            parse_config(&text).map_err(Failure::config)?
        }
        None => RunConfig::default(),
    };
    for k in KEYS {
        let long = format!("{}.{}", k.section, k.key);
        if let Some(v) = m.get_one::<String>(&long) {
            cfg.set_override(&long, v).map_err(Failure::config)?;
        }
    }
    Ok(cfg)
}

fn output(m: &ArgMatches) -> Option<PathBuf> {
    m.get_one::<String>("out").map(PathBuf::from)
}

/// Writes to `path`, or to standard output when none is given.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(Failure::io),
    }
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(Failure::io)?;
    for r in rows {
        w.write_record(r).map_err(Failure::io)?;
    }
    w.into_inner().map_err(Failure::io)
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

/// Per-sample moments and observables.
pub fn trace_csv(trace: &Trace, p: &SystemParams) -> Result<Vec<u8>, Failure> {
    let mut header = vec!["t".to_string()];
    for m in Moment::ALL {
        header.push(format!("{}_re", m.name()));
        header.push(format!("{}_im", m.name()));
    }
    for h in ["var_min_db", "theta_min", "n_photons", "ens_var_min_db", "xi2_x", "xi2_y", "xi2_z", "classification", "flags"] {
        header.push(h.into());
    }
    let rows: Vec<Vec<String>> = trace
        .times
        .iter()
        .zip(&trace.states)
        .zip(&trace.flags)
        .map(|((t, s), f)| {
            let mut row = vec![format_f64(*t)];
            for m in Moment::ALL {
                let v = s.get(m);
                row.push(format_f64(v.re));
                row.push(format_f64(v.im));
            }
            let q = min_cavity_quadrature(s);
            let spin = spin_metrics(s, p);
            row.push(format_f64(q.db_min));
            row.push(format_f64(q.theta_min));
            row.push(format_f64(s.ada.re));
            row.push(format_f64(min_ensemble_quadrature(s, p).db_min));
            row.extend(spin.xi2.iter().map(|x| opt(*x)));
            row.push(spin.classification.as_str().into());
            row.push(f.0.to_string());
            row
        })
        .collect();
    csv_bytes(&header, &rows)
}

pub fn psd_csv(psd: &PsdEstimate) -> Result<Vec<u8>, Failure> {
    let rows: Vec<Vec<String>> =
        psd.frequencies.iter().zip(&psd.power).map(|(f, p)| vec![format_f64(*f), format_f64(*p)]).collect();
    csv_bytes(&["frequency".into(), "power".into()], &rows)
}

fn sweep_bytes(result: &SweepResult) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).map_err(|e| Failure::numerical(e.to_string()))?;
    Ok(buf)
}

fn cmd_trace(m: &ArgMatches) -> Result<(), Failure> {
    let cfg = load_config(m)?;
    let p = cfg.system().map_err(Failure::config)?;
    let ic = cfg.integration();
    match integrate_trace(&p, &initial_thermal_state(&p), &ic) {
        Ok(tr) => {
            emit(output(m).as_deref(), &trace_csv(&tr, &p)?)?;
            eprintln!("samples={} flagged={} steps={}", tr.len(), tr.flagged_count(), tr.stats.accepted);
            Ok(())
        }
        Err(e) => {
            if let Some(partial) = e.partial_trace() {
                emit(output(m).as_deref(), &trace_csv(partial, &p)?)?;
            }
            Err(Failure::numerical(e))
        }
    }
}

fn cmd_steady(m: &ArgMatches) -> Result<(), Failure> {
    let cfg = load_config(m)?;
    let p = cfg.system().map_err(Failure::config)?;
    let ic = cfg.integration();
    let theta = ThetaPolicy::default();
    let single = |rec| SweepResult { axis_names: vec![], records: vec![rec], psd: vec![None] };
    let spec = SweepSpec { integration: ic, ..SweepSpec::new("steady", p, vec![], SweepMode::Steady) };
    match find_steady_state(&p, &ic) {
        Ok(ss) if ss.verified => {
            emit(output(m).as_deref(), &sweep_bytes(&single(steady_record(&ss.state, &p, theta)))?)?;
            eprintln!("residual={:e} verified=true method={:?}", ss.residual_norm, ss.method);
            Ok(())
        }
        Ok(ss) => {
            let (rec, _) = evaluate_trace(&spec, &p, Some("unverified_steady_state"));
            emit(output(m).as_deref(), &sweep_bytes(&single(rec))?)?;
            Err(Failure::numerical(format!("steady state not verified (residual {:e})", ss.residual_norm)))
        }
        Err(SteadyStateError::NoSteadyState { residual }) => {
            let (rec, _) = evaluate_trace(&spec, &p, Some("no_steady_state"));
            emit(output(m).as_deref(), &sweep_bytes(&single(rec))?)?;
            Err(Failure::numerical(format!("no steady state (residual {residual:e}); wrote trace minimum")))
        }
        Err(e) => Err(Failure::numerical(e)),
    }
}

fn jobs(m: &ArgMatches) -> Result<Option<usize>, Failure> {
    if let Some(j) = m.get_one::<usize>("jobs") {
        return Ok(Some(*j));
    }
    match std::env::var("CAVSIM_JOBS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure::usage(format!("CAVSIM_JOBS={v} is not a count"))),
        Err(_) => Ok(None),
    }
}

fn cmd_sweep(m: &ArgMatches) -> Result<(), Failure> {
    let cfg = load_config(m)?;
    let spec = cfg.sweep_spec(m.get_one::<String>("preset").map(String::as_str)).map_err(Failure::config)?;
    let result = match jobs(m)? {
        Some(j) => run_sweep_with_jobs(&spec, j),
        None => run_sweep(&spec),
    }
    .map_err(|e| Failure::usage(e))?;
    emit(output(m).as_deref(), &sweep_bytes(&result)?)?;
    let converged = result.records.iter().filter(|r| r.converged).count();
    let best = result.best().map(|r| r.var_min_db).unwrap_or(f64::NAN);
    eprintln!("points={} converged={converged} best_var_min_db={best}", result.records.len());
    Ok(())
}

fn cmd_psd(m: &ArgMatches) -> Result<(), Failure> {
    let cfg = load_config(m)?;
    let p = cfg.system().map_err(Failure::config)?;
    let tr = integrate_trace(&p, &initial_thermal_state(&p), &cfg.integration()).map_err(Failure::numerical)?;
    let frac = cfg.psd_transient_fraction();
    let theta = match cfg.psd_theta() {
        ThetaPolicy::Fixed(t) => t,
        ThetaPolicy::Optimized => crate::sweep::trace_min_record(&tr, &p, ThetaPolicy::Optimized, frac).theta_min,
    };
    let psd = trace_psd(&tr, theta, frac, &cfg.psd_settings()).map_err(Failure::numerical)?;
    emit(output(m).as_deref(), &psd_csv(&psd)?)?;
    eprintln!(
        "theta={theta} segments={} segment_length={} peak_frequency={}",
        psd.segment_count,
        psd.segment_length,
        psd.peak_frequency().unwrap_or(f64::NAN)
    );
    Ok(())
}

/// Parameters of the weak-drive comparison used when `[system]` is silent.
pub fn weak_regime() -> SystemParams {
    SystemParams { g1: 0.01, omega_rabi: 0.05, gamma1: 0.1, ..Default::default() }
}

fn cmd_oracle(m: &ArgMatches) -> Result<(), Failure> {
    let cfg = load_config(m)?;
    let p = cfg.system_over(weak_regime()).map_err(Failure::config)?;
    let mut oc = cfg.oracle();
    if let Some(n) = m.get_one::<usize>("n-spins") {
        oc.n_spins = *n;
    }
    let report = compare_with_cumulant(&p, &oc, &cfg.tolerances()).map_err(Failure::numerical)?;
    let header: Vec<String> =
        ["kind", "name", "max_abs", "max_rel", "max_abs_small", "within"].iter().map(|s| s.to_string()).collect();
    let mut rows: Vec<Vec<String>> = report
        .moments
        .iter()
        .map(|d| {
            vec![
                "moment".into(),
                d.moment.name().into(),
                format_f64(d.max_abs),
                format_f64(d.max_rel),
                format_f64(d.max_abs_small),
                d.within.to_string(),
            ]
        })
        .collect();
    rows.extend(report.observables.iter().map(|o| {
        vec!["observable".into(), o.name.into(), format_f64(o.max_abs), String::new(), String::new(), String::new()]
    }));
    emit(output(m).as_deref(), &csv_bytes(&header, &rows)?)?;
    eprintln!(
        "n_spins={} all_within={} worst_relative={:e}",
        report.n_spins,
        report.all_within(),
        report.worst_relative()
    );
    Ok(())
}

fn cmd_coupling(m: &ArgMatches) -> Result<(), Failure> {
    let f = |k: &str| *m.get_one::<f64>(k).expect("defaulted");
    let est = estimate_coupling(f("density"), f("length"), f("wavelength"), f("gamma1"), f("index"), f("zeta"))
        .map_err(Failure::usage)?;
    println!("g1={:e}", est.g1);
    println!("n_emitters={:e}", est.n_emitters);
    println!("v_eff={:e}", est.v_eff);
    println!("waist={:e}", est.waist);
    println!("collective_coupling={:e}", est.collective());
    Ok(())
}

fn cmd_preset_list(m: &ArgMatches) -> Result<(), Failure> {
    if let Some(name) = m.get_one::<String>("show") {
        let spec = figure_preset(name).map_err(Failure::usage)?;
        print!("{spec}");
        return Ok(());
    }
    for name in PRESET_NAMES {
        println!("{name}\t{}", preset_summary(name).unwrap_or(""));
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            if code != EXIT_OK {
                eprintln!("{}", Failure::usage(e.kind()).diagnostic());
            }
            return code;
        }
    };
    let result = match matches.subcommand() {
        Some(("trace", m)) => cmd_trace(m),
        Some(("steady", m)) => cmd_steady(m),
        Some(("sweep", m)) => cmd_sweep(m),
        Some(("psd", m)) => cmd_psd(m),
        Some(("oracle", m)) => cmd_oracle(m),
        Some(("coupling", m)) => cmd_coupling(m),
        Some(("preset-list", m)) => cmd_preset_list(m),
        _ => Err(Failure::usage("missing subcommand")),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            eprintln!("{}", f.diagnostic());
            f.code
        }
    }
}

/// Flag names of `--help`, for completeness checks.
pub fn flag_names(sub: &str) -> Vec<String> {
    command()
        .find_subcommand(sub)
        .map(|c| c.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect())
        .unwrap_or_default()
}
