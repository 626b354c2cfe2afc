//! Collective-spin variances, Wineland parameters and the squeezing class
//! along a driven trajectory.

use cavsim::observables::{spin_metrics, AXES};
use cavsim::{initial_thermal_state, integrate_trace, IntegrationConfig, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SystemParams {
        n_emitters: 10_000,
        g1: 0.005,
        gamma1: 0.1,
        delta0: 0.0,
        delta_c: 100.0,
        omega_rabi: 0.02,
        ..Default::default()
    };
    let cfg = IntegrationConfig { t_end: 200.0, sample_count: 11, ..Default::default() };
    let trace = integrate_trace(&p, &initial_thermal_state(&p), &cfg)?;
    let n = p.n();
    for (t, s) in trace.times.iter().zip(&trace.states) {
        let m = spin_metrics(s, &p);
        let xi: Vec<String> = (0..3)
            .map(|k| match m.xi2[k] {
                Some(x) => format!("{}:{:.3}", AXES[k], n * x),
                None => format!("{}:-", AXES[k]),
            })
            .collect();
        println!("t = {t:>5.0}  N*xi2 {}  class {}", xi.join(" "), m.classification);
    }
    Ok(())
}
