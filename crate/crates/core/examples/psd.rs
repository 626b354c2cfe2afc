//! Spectral density of the normally ordered variance in the modulated
//! regime, where no steady state exists.

use cavsim::sweep::{figure_preset, trace_min_record, trace_psd, PsdSettings, ThetaPolicy};
use cavsim::{initial_thermal_state, integrate_trace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = figure_preset("fig11")?;
    let p = spec.base;
    let trace = integrate_trace(&p, &initial_thermal_state(&p), &spec.integration)?;
    let rec = trace_min_record(&trace, &p, ThetaPolicy::Optimized, 0.2);
    println!("deepest point {:+.4} dB, theta {:.4}", rec.var_min_db, rec.theta_min);

    let psd = trace_psd(&trace, rec.theta_min, 0.2, &PsdSettings::default())?;
    println!("{} segments of {} samples, peak at {:?}", psd.segment_count, psd.segment_length, psd.peak_frequency());
    let mut bins: Vec<(f64, f64)> = psd.frequencies.iter().copied().zip(psd.power.iter().copied()).collect();
    bins.sort_by(|a, b| b.1.total_cmp(&a.1));
    // shot-noise referenced, so the excess over 1 is the signal
    for (f, s) in bins.iter().take(5) {
        println!("  f = {f:>10.4}  S - 1 = {:.4e}", s - 1.0);
    }
    Ok(())
}
