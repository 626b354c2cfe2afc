//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! The process exits non-zero on a failed criterion only when
//! `CAVSIM_ACCEPTANCE_STRICT` is set.

use std::f64::consts::PI;
use std::time::Instant;

use cavsim::integrator::{check_physicality, integrate_trace, IntegrationConfig, Trace};
use cavsim::moments::initial_thermal_state;
use cavsim::observables::{
    analytic_free_space_variance, cavity_quadrature_variance, min_cavity_quadrature, min_ensemble_quadrature,
    spin_metrics,
};
use cavsim::oracle::{compare_with_cumulant, single_spin_steady_state, ComparisonTolerances, OracleConfig};
use cavsim::spectral::{normally_ordered_variance_series, welch_psd, Window};
use cavsim::sweep::{figure_preset, run_sweep, transient_start, Axis, SweepMode, SweepResult, SweepSpec};
use cavsim::{find_steady_state, Moment, MomentState, SystemParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

/// Unphysical samples seen on non-lasing runs, shared by the last criterion.
#[derive(Default)]
struct Monitor {
    checked: usize,
    violations: Vec<String>,
}

impl Monitor {
    fn trace(&mut self, label: &str, tr: &Trace, lasing_margin: f64) {
        self.checked += tr.len();
        let bad = tr.flagged_count();
        if bad > 0 && lasing_margin < 1.0 {
            self.violations.push(format!("{label}: {bad} flagged samples"));
        }
    }

    fn sweep(&mut self, label: &str, r: &SweepResult) {
        for rec in &r.records {
            self.checked += 1;
            if rec.flag.contains("unphysical") && rec.lasing_margin < 1.0 {
                self.violations.push(format!("{label} ({}, {:?}): {}", rec.axis1, rec.axis2, rec.flag));
            }
        }
    }
}

fn run(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t0 = Instant::now();
    let (pass, detail) = f();
    let o = Outcome { name, pass, detail, seconds: t0.elapsed().as_secs_f64() };
    eprintln!("  done: {} ({:.1}s)", o.name, o.seconds);
    o
}

fn oracle_equivalence(mon: &mut Monitor) -> (bool, String) {
    let p = SystemParams { g1: 0.01, omega_rabi: 0.05, gamma1: 0.1, ..Default::default() };
    let t0 = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1, 2] {
        let cfg = OracleConfig { n_max: 15, n_spins: n, t_end: 50.0, ..Default::default() };
        let rep = compare_with_cumulant(&p, &cfg, &ComparisonTolerances::default()).expect("oracle run");
        let failing: Vec<String> = rep
            .moments
            .iter()
            .filter(|d| !d.within)
            .map(|d| format!("{} (rel {:.2e}, abs_small {:.2e})", d.moment.name(), d.max_rel, d.max_abs_small))
            .collect();
        pass &= failing.is_empty();
        parts.push(format!(
            "N={n}: {} moments, worst rel {:.2e}, failing [{}]",
            rep.moments.len(),
            rep.worst_relative(),
            failing.join(", ")
        ));
        let cumulant = Trace { times: rep.times.clone(), flags: rep.cumulant.iter().map(|s| check_physicality(s, 1e-8)).collect(), states: rep.cumulant.clone(), stats: Default::default() };
        mon.trace(&format!("oracle N={n}"), &cumulant, 0.0);
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    (pass, format!("{}; {secs:.1}s", parts.join("; ")))
}

fn single_spin_limit() -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for omega in [0.05, 0.5, 3.0] {
        for delta0 in [0.0, 1.5, -4.0] {
            for gamma2_star in [0.0, 0.07] {
                for n_bar in [0.0, 0.3] {
                    let p = SystemParams { omega_rabi: omega, delta0, gamma2_star, n_bar, gamma1: 0.1, ..Default::default() };
                    let ss = find_steady_state(&p, &IntegrationConfig::default()).expect("steady state");
                    let (s, sds) = single_spin_steady_state(&p);
                    // g = 0: the cavity is thermal and uncorrelated with the emitter
                    let want = MomentState { s, sds: Complex64::new(sds, 0.0), ada: Complex64::new(n_bar, 0.0), ..MomentState::zero() };
                    for m in Moment::ALL.into_iter().filter(|m| !m.is_pair()) {
                        worst = worst.max((ss.state.get(m) - want.get(m)).norm());
                    }
                    count += 1;
                }
            }
        }
    }
    (worst < 1e-8, format!("{count} points, worst moment deviation {worst:.2e} (tol 1e-8)"))
}

fn free_space_benchmark() -> (bool, String) {
    let db_at = |z: f64| {
        let p = SystemParams { gamma1: 0.1, ..Default::default() }.with_scaled_drive(z);
        let (s, sds) = single_spin_steady_state(&p);
        let st = MomentState { s, sds: Complex64::new(sds, 0.0), ..MomentState::zero() };
        min_ensemble_quadrature(&st, &p).db_min
    };
    // coarse log scan, then golden-section refinement in ln z
    let grid: Vec<f64> = (0..=80).map(|i| 10f64.powf(-4.0 + 6.0 * i as f64 / 80.0)).collect();
    let k = (0..grid.len()).min_by(|&i, &j| db_at(grid[i]).total_cmp(&db_at(grid[j]))).unwrap();
    let (mut lo, mut hi) = (grid[k.saturating_sub(1)].ln(), grid[(k + 1).min(grid.len() - 1)].ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if db_at(a.exp()) < db_at(b.exp()) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let z_opt = (0.5 * (lo + hi)).exp();
    let best = db_at(z_opt);
    let literal = analytic_free_space_variance(1.0 / 6.0, 0.0, 0.1, 0.0, 0.0).unwrap();
    let pass = (best + 1.25).abs() <= 0.1 && (literal - 0.46745).abs() <= 1e-5;
    (
        pass,
        format!(
            "oracle min {best:.4} dB at z = {z_opt:.4} (target -1.25 +/- 0.1); closed form at z = 1/6: {literal:.5} (pinned 0.46745), i.e. {:.4} dB vs shot 1/2",
            10.0 * (literal / 0.5).log10()
        ),
    )
}

fn fig7(mon: &mut Monitor) -> (bool, String) {
    let mut spec = figure_preset("fig7").unwrap();
    spec.axes[0] = Axis::list("n_emitters", &[1e5, 1e6, 1e7, 1e8]);
    let t0 = Instant::now();
    let r = run_sweep(&spec).expect("valid preset");
    let secs = t0.elapsed().as_secs_f64();
    mon.sweep("fig7", &r);
    let mut best_per_n = Vec::new();
    for n in [1e5, 1e6, 1e7, 1e8] {
        let b = r
            .records
            .iter()
            .filter(|x| x.axis1 == n && x.var_min_db.is_finite())
            .map(|x| x.var_min_db)
            .fold(f64::INFINITY, f64::min);
        best_per_n.push(b);
    }
    let monotone = best_per_n.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let global = best_per_n.iter().copied().fold(f64::INFINITY, f64::min);
    let in_range = global > -3.2 && global < -2.5;
    let unconverged = r.records.iter().filter(|x| !x.converged).count();
    let pass = monotone && in_range && secs < 600.0;
    (
        pass,
        format!(
            "best per N {:?} dB; monotone {monotone}; global min {global:.3} dB (target (-3.2, -2.5)); {unconverged} unconverged; {secs:.1}s",
            best_per_n.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn fig4b(mon: &mut Monitor) -> (bool, String) {
    let mut spec = figure_preset("fig4b").unwrap();
    spec.base.omega_rabi = 1.0;
    spec.axes = vec![Axis::linear("delta_c", -50.0, 50.0, 201)];
    let r = run_sweep(&spec).unwrap();
    mon.sweep("fig4b", &r);
    let best = r.best().unwrap();
    let target = (1.0f64 + 25.0 * 25.0).sqrt();
    let near = (best.axis1.abs() - target).abs() <= 0.15 * target;
    let pass = best.var_min_db > -2.8 && best.var_min_db < -2.2 && near;
    (
        pass,
        format!(
            "min {:.4} dB at delta_c = {} (target (-2.8, -2.2) dB near |delta_c| = {target:.2})",
            best.var_min_db, best.axis1
        ),
    )
}

struct ModulationRun {
    omega: f64,
    min_db: f64,
    carrier: Option<f64>,
    envelope: Option<f64>,
    simultaneous: usize,
    min_n_xi2_z: f64,
}

fn dominant_angular_frequency(series: &[f64], dt: f64) -> Option<f64> {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let centred: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let len = (series.len() / 4).next_power_of_two().min(series.len()).max(8);
    let psd = welch_psd(&centred, 1.0 / dt, len, 0.5, Window::Hann).ok()?;
    psd.peak_frequency().map(|f| 2.0 * PI * f)
}

fn modulation_run(p: &SystemParams, cfg: &IntegrationConfig, mon: &mut Monitor) -> ModulationRun {
    let tr = integrate_trace(p, &initial_thermal_state(p), cfg).expect("fig10 trace");
    mon.trace(&format!("fig10 omega={}", p.omega_rabi), &tr, cavsim::observables::lasing_threshold_margin(p));
    let start = transient_start(&tr, 0.2);
    let window = &tr.states[start..];
    let dbs: Vec<f64> = window.iter().map(|s| min_cavity_quadrature(s).db_min).collect();
    let min_db = dbs.iter().copied().fold(f64::INFINITY, f64::min);
    let n = p.n();
    let mut simultaneous = 0;
    let mut min_n_xi2_z = f64::INFINITY;
    for (s, d) in window.iter().zip(&dbs) {
        if let Some(x) = spin_metrics(s, p).xi2[2] {
            min_n_xi2_z = min_n_xi2_z.min(n * x);
            if x < 1.0 / n && *d < 0.0 {
                simultaneous += 1;
            }
        }
    }
    // carrier from the variance at the instantaneous optimum angle of the deepest point
    let k = (0..dbs.len()).min_by(|&i, &j| dbs[i].total_cmp(&dbs[j])).unwrap();
    let theta = min_cavity_quadrature(&window[k]).theta_min;
    let series = &normally_ordered_variance_series(&tr, theta)[start..];
    let dt = tr.dt();
    let carrier = dominant_angular_frequency(series, dt);
    // envelope: running maximum of |series| over one carrier period
    let envelope = carrier.and_then(|w| {
        let period = ((2.0 * PI / w) / dt).ceil().max(1.0) as usize;
        let env: Vec<f64> = series.chunks(period).map(|c| c.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect();
        if env.len() < 16 {
            return None;
        }
        dominant_angular_frequency(&env, dt * period as f64)
    });
    ModulationRun { omega: p.omega_rabi, min_db, carrier, envelope, simultaneous, min_n_xi2_z }
}

fn fig10(runs: &[ModulationRun], delta_c: f64) -> (bool, String) {
    // runs are ordered by decreasing omega
    let deepening = runs.windows(2).all(|w| w[1].min_db < w[0].min_db);
    let last = runs.last().unwrap();
    let depth_ok = last.min_db < -8.0 && last.min_db > -14.5;
    let carrier_ok = last.carrier.is_some_and(|c| (c - delta_c).abs() <= 0.05 * delta_c);
    let envelope_ok = match (last.carrier, last.envelope) {
        (Some(c), Some(e)) => e * 10.0 <= c,
        _ => false,
    };
    let summary: Vec<String> = runs
        .iter()
        .map(|r| format!("omega={}: {:.4} dB", r.omega, r.min_db))
        .collect();
    (
        deepening && depth_ok && carrier_ok && envelope_ok,
        format!(
            "{}; deepening {deepening}; depth at 0.02 in (-14.5, -8): {depth_ok}; carrier {:?} (target {delta_c}); envelope {:?}",
            summary.join(", "),
            last.carrier,
            last.envelope
        ),
    )
}

fn simultaneous(runs: &[ModulationRun]) -> (bool, String) {
    let r = runs.last().unwrap();
    (
        r.simultaneous > 0,
        format!(
            "omega={}: {} instants with xi2_z < 1/N and cavity squeezed; min N*xi2_z = {:.4}, min cavity {:.4} dB",
            r.omega, r.simultaneous, r.min_n_xi2_z, r.min_db
        ),
    )
}

fn fig11(mon: &mut Monitor) -> (bool, String) {
    let spec = SweepSpec { mode: SweepMode::TraceMin, ..figure_preset("fig11").unwrap() };
    let mut spec = spec;
    let ratios = [0.0, 0.1, 0.2, 0.5, 1.0, 2.0];
    let gamma1 = spec.base.gamma1;
    spec.axes = vec![Axis::list("gamma2_star", &ratios.map(|r| r * gamma1))];
    let r = run_sweep(&spec).unwrap();
    mon.sweep("fig11", &r);
    let n = spec.base.n();
    let squeezed = |i: usize| {
        let rec = &r.records[i];
        rec.var_min_db < 0.0 && rec.xi2[2].is_some_and(|x| x < 1.0 / n)
    };
    let absent = |i: usize| {
        let rec = &r.records[i];
        rec.var_min_db >= -1e-3 && !rec.xi2[2].is_some_and(|x| x < 1.0 / n)
    };
    let monotone = r.records.windows(2).all(|w| w[1].var_min_db >= w[0].var_min_db - 1e-9);
    let pass = squeezed(1) && absent(5) && monotone;
    let rows: Vec<String> = r
        .records
        .iter()
        .zip(ratios)
        .map(|(x, q)| format!("{q}: {:.4} dB, N*xi2_z {:.3}", x.var_min_db, x.xi2[2].map_or(f64::NAN, |v| v * n)))
        .collect();
    (
        pass,
        format!("{}; survives at 0.1: {}; absent at 2: {}; monotone {monotone}", rows.join(", "), squeezed(1), absent(5)),
    )
}

fn fig8(mon: &mut Monitor) -> (bool, String) {
    let mut spec = figure_preset("fig8").unwrap();
    let gamma1 = spec.base.gamma1;
    spec.axes[0] = Axis::list("gamma2_star", &[1.0 * gamma1, 10.0 * gamma1]);
    let r = run_sweep(&spec).unwrap();
    mon.sweep("fig8", &r);
    let mut pass = true;
    let mut parts = Vec::new();
    for ratio in [1.0, 10.0] {
        let rows: Vec<_> = r
            .records
            .iter()
            .filter(|x| x.axis1 == ratio * gamma1 && x.converged)
            .collect();
        let squeezed = rows.iter().any(|x| x.var_min_db < 0.0);
        let decreasing = rows.windows(2).all(|w| w[1].n_photons < w[0].n_photons);
        let all = r.records.iter().filter(|x| x.axis1 == ratio * gamma1).count();
        pass &= squeezed && decreasing && rows.len() == all;
        parts.push(format!(
            "gamma2*/gamma1={ratio}: {}/{all} converged, squeezed {squeezed}, n_photons decreasing with delta0 {decreasing} ({:.3e} -> {:.3e})",
            rows.len(),
            rows.first().map_or(f64::NAN, |x| x.n_photons),
            rows.last().map_or(f64::NAN, |x| x.n_photons)
        ));
    }
    (pass, parts.join("; "))
}

fn spectral() -> (bool, String) {
    let (n, l, fs) = (8192usize, 512usize, 10.0);
    let f0 = 37.0 * fs / l as f64;
    let amp = 1.3;
    let tone: Vec<f64> = (0..n).map(|i| amp * (2.0 * PI * f0 * i as f64 / fs).cos()).collect();
    let psd = welch_psd(&tone, fs, l, 0.5, Window::Hann).unwrap();
    let near: f64 = psd.power[36..=38].iter().sum::<f64>() * psd.bin_width();
    let tone_err = (near / (amp * amp / 2.0) - 1.0).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let ms = noise.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let psd = welch_psd(&noise, fs, l, 0.5, Window::Hann).unwrap();
    let broad_err = (psd.total_power() / ms - 1.0).abs();

    // bin-to-bin relative spread for K1 and K2 independent segments
    let rel_spread = |segments: usize, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 256;
        let x: Vec<f64> = (0..len * segments).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = welch_psd(&x, 1.0, len, 0.0, Window::Hann).unwrap();
        let inner = &p.power[1..p.power.len() - 1];
        let mean = inner.iter().sum::<f64>() / inner.len() as f64;
        let var = inner.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / inner.len() as f64;
        var.sqrt() / mean
    };
    let (k1, k2) = (4usize, 64usize);
    let avg = |k: usize| (0..100).map(|s| rel_spread(k, 1000 + s)).sum::<f64>() / 100.0;
    let (s1, s2) = (avg(k1), avg(k2));
    let ratio = s1 / s2;
    let expected = ((k2 / k1) as f64).sqrt();
    let avg_err = (ratio / expected - 1.0).abs();
    (
        tone_err < 0.01 && broad_err < 0.05 && avg_err < 0.2,
        format!(
            "tone {tone_err:.2e} (tol 1%), broadband {broad_err:.2e} (tol 5%), spread ratio K={k1}/K={k2}: {ratio:.3} vs {expected:.3} ({:.1}%, tol 20%)",
            avg_err * 100.0
        ),
    )
}

fn invariants(mon: &Monitor) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_avg: f64 = 0.0;
    let mut worst_prod: f64 = 0.0;
    for _ in 0..10_000 {
        let c = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let a = c(&mut rng);
        let aa = c(&mut rng);
        let n: f64 = rng.gen_range(0.0..5.0);
        let st = MomentState { a, aa, ada: Complex64::new(n + a.norm_sqr(), 0.0), ..MomentState::zero() };
        let theta = rng.gen_range(0.0..PI);
        let avg = 0.5 * (cavity_quadrature_variance(&st, theta) + cavity_quadrature_variance(&st, theta + PI / 2.0));
        let scale = 1.0 + 2.0 * n;
        worst_avg = worst_avg.max((avg - scale).abs() / scale);
        let q = min_cavity_quadrature(&st);
        let dn = st.ada.re - a.norm_sqr();
        let want = (1.0 + 2.0 * dn).powi(2) - 4.0 * (aa - a * a).norm_sqr();
        worst_prod = worst_prod.max((q.var_min * q.var_max - want).abs() / want.abs().max(1.0) / scale);
    }
    let identities = worst_avg < 1e-12 && worst_prod < 1e-12;
    let monitors = mon.violations.is_empty();
    (
        identities && monitors,
        format!(
            "phase average {worst_avg:.1e}, product {worst_prod:.1e} (tol 1e-12, 1e4 states); monitors: {} samples/points checked, {} violations{}",
            mon.checked,
            mon.violations.len(),
            if monitors { String::new() } else { format!(" [{}]", mon.violations.join("; ")) }
        ),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut mon = Monitor::default();
    let mut out = Vec::new();
    out.push(run("oracle equivalence (weak regime)", || oracle_equivalence(&mut mon)));
    out.push(run("exact single-spin limit", single_spin_limit));
    out.push(run("free-space squeezing benchmark", free_space_benchmark));
    out.push(run("steady-state -3 dB limit (fig7)", || fig7(&mut mon)));
    out.push(run("detuned single-emitter squeezing (fig4b)", || fig4b(&mut mon)));

    let t0 = Instant::now();
    let base = figure_preset("fig10").unwrap();
    let runs: Vec<ModulationRun> = [0.1, 0.05, 0.02]
        .iter()
        .map(|&w| modulation_run(&SystemParams { omega_rabi: w, ..base.base }, &base.integration, &mut mon))
        .collect();
    let shared = t0.elapsed().as_secs_f64();
    let mut o = run("frequency-modulated squeezing (fig10)", || fig10(&runs, base.base.delta_c));
    o.seconds += shared;
    out.push(o);
    out.push(run("simultaneous entangled spin squeezing", || simultaneous(&runs)));
    out.push(run("dephasing regimes (fig11)", || fig11(&mut mon)));
    out.push(run("steady-state dephasing mitigation (fig8)", || fig8(&mut mon)));
    out.push(run("spectral module", spectral));
    out.push(run("invariant suites", || invariants(&mon)));

    let failed = out.iter().filter(|o| !o.pass).count();
    for o in &out {
        println!("{} {} ({:.1}s): {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.seconds, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", out.len() - failed);
    if failed > 0 && std::env::var_os("CAVSIM_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
