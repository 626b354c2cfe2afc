//! Single-emitter coupling and emitter count of a solid-state cavity from
//! material and geometry.

use cavsim::observables::estimate_coupling;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let density = 1.76e23;
    let wavelength = 600e-9;
    for length in [0.5e-3, 1e-3, 2e-3] {
        let est = estimate_coupling(density, length, wavelength, 2e8, 2.4, 0.75)?;
        println!(
            "L = {:.1} mm: g1 = {:.4e} s^-1, N = {:.3e}, V = {:.3e} m^3, g1*sqrt(N) = {:.4e} s^-1",
            length * 1e3,
            est.g1,
            est.n_emitters,
            est.v_eff,
            est.collective()
        );
    }
    Ok(())
}
