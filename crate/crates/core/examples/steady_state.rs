//! Steady state by root finding, checked against a long integration, and
//! the squeezing it carries.

use cavsim::integrator::{long_integration, SteadyOptions};
use cavsim::observables::{lasing_threshold_margin, min_cavity_quadrature, min_ensemble_quadrature};
use cavsim::{find_steady_state, initial_thermal_state, IntegrationConfig, MomentModel, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SystemParams {
        n_emitters: 1,
        g1: 1.0,
        gamma1: 0.1,
        delta0: 25.0,
        delta_c: 0.0,
        omega_rabi: 1.0,
        ..Default::default()
    };
    let cfg = IntegrationConfig::default();
    let ss = find_steady_state(&p, &cfg)?;
    println!("method {:?}, verified {}, residual {:.2e}", ss.method, ss.verified, ss.residual_norm);

    let model = MomentModel::new(p);
    let opts = SteadyOptions { max_integration_windows: 200, ..Default::default() };
    let (long, residual) = long_integration(&model, &initial_thermal_state(&p), &cfg, &opts)?;
    println!("long integration residual {residual:.2e}, distance {:.2e}", ss.state.max_abs_diff(&long));

    let cav = min_cavity_quadrature(&ss.state);
    let ens = min_ensemble_quadrature(&ss.state, &p);
    println!("cavity   {:+.4} dB at theta = {:.4}", cav.db_min, cav.theta_min);
    println!("ensemble {:+.4} dB at phi = {:.4}", ens.db_min, ens.theta_min);
    println!("lasing margin {:.3}", lasing_threshold_margin(&p));
    Ok(())
}
