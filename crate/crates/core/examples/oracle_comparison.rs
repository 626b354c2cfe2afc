//! Compares the truncated moment equations with the exact master equation
//! for one, two and three explicit emitters.

use cavsim::oracle::{compare_with_cumulant, ComparisonTolerances, OracleConfig};
use cavsim::SystemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SystemParams { g1: 0.01, omega_rabi: 0.05, gamma1: 0.1, ..Default::default() };
    let tol = ComparisonTolerances::default();
    for n_spins in 1..=3 {
        let cfg = OracleConfig { n_spins, n_max: 6, ..Default::default() };
        let report = compare_with_cumulant(&p, &cfg, &tol)?;
        println!("N = {n_spins}: worst relative {:.2e}, all within {}", report.worst_relative(), report.all_within());
        for d in report.moments.iter().filter(|d| !d.within) {
            println!("    {:<5} rel {:.2e} abs {:.2e}", d.moment.name(), d.max_rel, d.max_abs);
        }
        for o in &report.observables {
            println!("    {:<18} {:.2e}", o.name, o.max_abs);
        }
    }
    Ok(())
}
