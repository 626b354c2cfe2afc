//! Physical parameters of one simulation.
//!
//! Every rate and detuning is expressed in units of the cavity amplitude
//! decay rate κ. `kappa` is stored explicitly so that callers who prefer
//! another unit can still set it, but presets and the CLI always use κ = 1.

use num_complex::Complex64;

use crate::error::ParamError;

/// Rates and detunings defining one driven cavity–ensemble system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Number of emitters N.
    pub n_emitters: u64,
    /// Single-emitter coupling g₁.
    pub g1: f64,
    /// Cavity amplitude decay rate κ.
    pub kappa: f64,
    /// Longitudinal relaxation rate γ₁.
    pub gamma1: f64,
    /// Pure-dephasing rate γ₂*.
    pub gamma2_star: f64,
    /// Rabi frequency Ω of the off-axis drive.
    pub omega_rabi: f64,
    /// Emitter–drive detuning Δ₀ = ω₀ − ω_l.
    pub delta0: f64,
    /// Cavity–drive detuning Δ_c = ω_c − ω_l.
    pub delta_c: f64,
    /// Thermal occupancy n̄ of both baths.
    pub n_bar: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            n_emitters: 1,
            g1: 0.0,
            kappa: 1.0,
            gamma1: 0.1,
            gamma2_star: 0.0,
            omega_rabi: 0.0,
            delta0: 0.0,
            delta_c: 0.0,
            n_bar: 0.0,
        }
    }
}

/// Names accepted by [`SystemParams::set`] and [`SystemParams::get`].
pub const PARAM_NAMES: [&str; 9] = [
    "n_emitters",
    "g1",
    "kappa",
    "gamma1",
    "gamma2_star",
    "omega_rabi",
    "delta0",
    "delta_c",
    "n_bar",
];

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n_emitters == 0 {
            return Err(ParamError::Range {
                name: "n_emitters",
                value: 0.0,
                rule: "must be a positive integer",
            });
        }
        let rates = [
            ("g1", self.g1),
            ("kappa", self.kappa),
            ("gamma1", self.gamma1),
            ("gamma2_star", self.gamma2_star),
            ("omega_rabi", self.omega_rabi),
            ("n_bar", self.n_bar),
        ];
        for (name, value) in rates {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name });
            }
            if value < 0.0 {
                return Err(ParamError::Range {
                    name,
                    value,
                    rule: "rates must be non-negative",
                });
            }
        }
        for (name, value) in [("delta0", self.delta0), ("delta_c", self.delta_c)] {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name });
            }
        }
        Ok(())
    }

    /// N as a float, for use as an equation coefficient.
    pub fn n(&self) -> f64 {
        self.n_emitters as f64
    }

    /// Total transverse decay rate Γ = γ₁/2 + γ₂* + n̄γ₁.
    pub fn gamma_total(&self) -> f64 {
        0.5 * self.gamma1 + self.gamma2_star + self.n_bar * self.gamma1
    }

    /// Γ_t = Γ + iΔ₀.
    pub fn gamma_t(&self) -> Complex64 {
        Complex64::new(self.gamma_total(), self.delta0)
    }

    /// Γ_c = κ + iΔ_c.
    pub fn gamma_c(&self) -> Complex64 {
        Complex64::new(self.kappa, self.delta_c)
    }

    /// Collective coupling 𝒢 = √N·g₁.
    pub fn collective_coupling(&self) -> f64 {
        self.n().sqrt() * self.g1
    }

    /// Scaled drive z = (Ω/|Γ_t|)².
    pub fn scaled_drive(&self) -> f64 {
        let r = self.omega_rabi / self.gamma_t().norm();
        r * r
    }

    /// Sets Ω so that the scaled drive equals `z` at the current Γ_t.
    pub fn with_scaled_drive(mut self, z: f64) -> Self {
        self.omega_rabi = z.max(0.0).sqrt() * self.gamma_t().norm();
        self
    }

    /// Converts every rate from physical units to units of κ.
    pub fn from_physical(mut self, kappa_physical: f64) -> Self {
        let k = kappa_physical;
        self.g1 /= k;
        self.kappa /= k;
        self.gamma1 /= k;
        self.gamma2_star /= k;
        self.omega_rabi /= k;
        self.delta0 /= k;
        self.delta_c /= k;
        self
    }

    /// Smallest non-zero characteristic rate among κ, γ₁, γ₂*, |Γ_t|, Ω and 𝒢.
    ///
    /// Exact zeros are skipped. Returns `None` when every rate vanishes.
    pub fn slowest_rate(&self) -> Option<f64> {
        [
            self.kappa,
            self.gamma1,
            self.gamma2_star,
            self.gamma_t().norm(),
            self.omega_rabi,
            self.collective_coupling(),
        ]
        .into_iter()
        .filter(|r| *r > 0.0 && r.is_finite())
        .min_by(|a, b| a.total_cmp(b))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "n_emitters" => self.n(),
            "g1" => self.g1,
            "kappa" => self.kappa,
            "gamma1" => self.gamma1,
            "gamma2_star" => self.gamma2_star,
            "omega_rabi" => self.omega_rabi,
            "delta0" => self.delta0,
            "delta_c" => self.delta_c,
            "n_bar" => self.n_bar,
            _ => return None,
        })
    }

    /// Sets a field by name. `n_emitters` is rounded to the nearest integer.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ParamError> {
        match name {
            "n_emitters" => {
                if !(value >= 1.0) || !value.is_finite() {
                    return Err(ParamError::Range {
                        name: "n_emitters",
                        value,
                        rule: "must be a positive integer",
                    });
                }
                self.n_emitters = value.round() as u64;
            }
            "g1" => self.g1 = value,
            "kappa" => self.kappa = value,
            "gamma1" => self.gamma1 = value,
            "gamma2_star" => self.gamma2_star = value,
            "omega_rabi" => self.omega_rabi = value,
            "delta0" => self.delta0 = value,
            "delta_c" => self.delta_c = value,
            "n_bar" => self.n_bar = value,
            _ => return Err(ParamError::UnknownField(name.to_string())),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_rates() {
        let p = SystemParams {
            gamma1: 0.1,
            gamma2_star: 0.02,
            n_bar: 0.5,
            delta0: 3.0,
            delta_c: -2.0,
            ..Default::default()
        };
        assert!((p.gamma_total() - (0.05 + 0.02 + 0.05)).abs() < 1e-15);
        assert_eq!(p.gamma_t().im, 3.0);
        assert_eq!(p.gamma_c(), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn scaled_drive_round_trip() {
        let p = SystemParams { delta0: 80.0, ..Default::default() }.with_scaled_drive(1e-3);
        assert!((p.scaled_drive() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn slowest_rate_skips_zeros() {
        let p = SystemParams { gamma2_star: 0.0, omega_rabi: 0.0, g1: 0.0, ..Default::default() };
        assert_eq!(p.slowest_rate(), Some(0.05));
    }

    #[test]
    fn negative_rate_rejected() {
        let p = SystemParams { gamma1: -1.0, ..Default::default() };
        assert!(matches!(p.validate(), Err(ParamError::Range { name: "gamma1", .. })));
        let p = SystemParams { delta0: -5.0, ..Default::default() };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn physical_units_are_scaled() {
        let p = SystemParams { kappa: 2e6, gamma1: 2e5, delta_c: -1e7, ..Default::default() }
            .from_physical(2e6);
        assert_eq!(p.kappa, 1.0);
        assert!((p.gamma1 - 0.1).abs() < 1e-15);
        assert_eq!(p.delta_c, -5.0);
    }
}
