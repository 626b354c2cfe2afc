//! Integrates the moment equations from the thermal state and prints the
//! photon number and optimal cavity variance along the trajectory.
//!
//! ```text
//! cargo run --release --example trace
//! ```

use cavsim::observables::{min_cavity_quadrature, photon_fluctuation};
use cavsim::{initial_thermal_state, integrate_trace, IntegrationConfig, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SystemParams {
        n_emitters: 1,
        g1: 1.0,
        gamma1: 0.1,
        omega_rabi: 1.0,
        delta0: 25.0,
        delta_c: 25.0,
        ..Default::default()
    };
    let cfg = IntegrationConfig { t_end: 60.0, sample_count: 13, ..Default::default() };
    let trace = integrate_trace(&p, &initial_thermal_state(&p), &cfg)?;

    println!("{:>6} {:>12} {:>12} {:>10}", "t", "<a+a>", "var_min", "dB");
    for (t, s) in trace.times.iter().zip(&trace.states) {
        let q = min_cavity_quadrature(s);
        println!("{t:>6.1} {:>12.4e} {:>12.6} {:>10.4}", s.ada.re, q.var_min, q.db_min);
    }
    let last = trace.last_state().unwrap();
    println!("incoherent photons at t_end: {:.3e}", photon_fluctuation(last));
    println!("steps: {} accepted, {} rejected", trace.stats.accepted, trace.stats.rejected);
    Ok(())
}
