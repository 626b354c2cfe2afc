//! Runs a small grid in parallel and writes the CSV to standard output.
//! Set `CAVSIM_JOBS` to pin the thread count; the bytes do not change.

use cavsim::sweep::{figure_preset, run_sweep, write_csv, Axis, SweepMode, SweepSpec, PRESET_NAMES};
use cavsim::{IntegrationConfig, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("presets: {}", PRESET_NAMES.join(" "));
    let fig7 = figure_preset("fig7")?;
    println!("fig7 has {} points\n", fig7.grid().len());

    let base = SystemParams { n_emitters: 1000, g1: 0.01, gamma1: 0.1, delta0: 5.0, ..Default::default() };
    let mut spec = SweepSpec::new(
        "detuning",
        base,
        vec![Axis::linear("delta_c", -10.0, 10.0, 5), Axis::log("omega_rabi", 0.1, 3.0, 3)],
        SweepMode::Steady,
    );
    spec.integration = IntegrationConfig { t_end: 60.0, ..Default::default() };
    let result = run_sweep(&spec)?;
    write_csv(&result, std::io::stdout().lock())?;
    if let Some(best) = result.best() {
        eprintln!("best {:+.4} dB at delta_c = {}, omega = {:?}", best.var_min_db, best.axis1, best.axis2);
    }
    Ok(())
}
