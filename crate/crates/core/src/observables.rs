//! Physical observables derived from a [`MomentState`].
//!
//! Shot-noise references: 1 for the cavity quadrature, N/2 for the
//! ensemble quadrature. Decibels are always 10·log₁₀(V/V_shot).
//!
//! Pauli convention: σx = σ + σ†, σy = i(σ† − σ), σz = σ†σ − σσ†.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::ObservableError;
use crate::moments::MomentState;
use crate::params::SystemParams;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub theta_min: f64,
    pub var_min: f64,
    pub var_max: f64,
    pub shot_noise: f64,
    pub db_min: f64,
}

impl QuadratureResult {
    fn from_parts(mean: f64, coherent: Complex64, shot_noise: f64) -> Self {
        let var_min = mean - 2.0 * coherent.norm();
        let var_max = mean + 2.0 * coherent.norm();
        Self {
            theta_min: (0.5 * coherent.arg() + FRAC_PI_2).rem_euclid(PI),
            var_min,
            var_max,
            shot_noise,
            db_min: 10.0 * (var_min / shot_noise).log10(),
        }
    }
}

/// Centered ⟨Δa†Δa⟩.
pub fn photon_fluctuation(state: &MomentState) -> f64 {
    state.ada.re - state.a.norm_sqr()
}

/// Centered ⟨Δa²⟩.
pub fn anomalous_fluctuation(state: &MomentState) -> Complex64 {
    state.aa - state.a * state.a
}

/// ⟨ΔX_θ²⟩ = 1 + 2(⟨Δa†Δa⟩ + Re{e^(−2iθ)⟨Δa²⟩}).
pub fn cavity_quadrature_variance(state: &MomentState, theta: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, -2.0 * theta);
    2.0 * (photon_fluctuation(state) + (rot * anomalous_fluctuation(state)).re) + 1.0
}

pub fn min_cavity_quadrature(state: &MomentState) -> QuadratureResult {
    QuadratureResult::from_parts(
        1.0 + 2.0 * photon_fluctuation(state),
        anomalous_fluctuation(state),
        1.0,
    )
}

/// Incoherent and coherent sums (Σ_inc, Σ_coh) of the ensemble fluctuations.
fn ensemble_sums(state: &MomentState, n: f64) -> (f64, Complex64) {
    let s = state.s;
    let s2 = s * s;
    let inc_self = state.sds.re - s.norm_sqr();
    let inc_pair = state.sds2.re - s.norm_sqr();
    let coh_self = -s2;
    let coh_pair = state.ss - s2;
    (n * inc_self + (n - 1.0) * inc_pair, n * coh_self + (n - 1.0) * coh_pair)
}

/// ⟨ΔU_φ²⟩ summed over the ensemble, shot-noise level N/2.
pub fn ensemble_quadrature_variance(state: &MomentState, params: &SystemParams, phi: f64) -> f64 {
    let n = params.n();
    let (inc, coh) = ensemble_sums(state, n);
    let rot = Complex64::from_polar(1.0, -2.0 * phi);
    2.0 * (inc + (rot * coh).re) + 0.5 * n
}

pub fn min_ensemble_quadrature(state: &MomentState, params: &SystemParams) -> QuadratureResult {
    let n = params.n();
    let (inc, coh) = ensemble_sums(state, n);
    QuadratureResult::from_parts(2.0 * inc + 0.5 * n, coh, 0.5 * n)
}

/// Shorthand for the optimal ensemble variance with N given directly.
pub fn ensemble_min_variance(state: &MomentState, n: f64) -> f64 {
    let (inc, coh) = ensemble_sums(state, n);
    2.0 * inc + 0.5 * n - 2.0 * coh.norm()
}

/// Closed-form steady-state variance of a single driven emitter in free
/// space as a function of the scaled drive z = (Ω/|Γ_t|)².
///
/// Δ₀ enters only through z.
pub fn analytic_free_space_variance(
    z: f64,
    phi: f64,
    gamma1: f64,
    gamma2_star: f64,
    n_bar: f64,
) -> Result<f64, ObservableError> {
    if gamma1 == 0.0 {
        return Err(ObservableError::UndefinedAlpha);
    }
    if !(z >= 0.0) {
        return Err(ObservableError::Domain { what: "z", value: z });
    }
    let gamma = 0.5 * gamma1 + gamma2_star + n_bar * gamma1;
    let alpha = gamma / (2.0 * gamma1);
    let d = 2.0 * z * alpha + 1.0;
    let phase = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -2.0 * phi);
    Ok(z * alpha / d - (phase * z / (4.0 * d * d)).re + 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinClass {
    None,
    Standard,
    Planar,
    DickeLike,
}

impl SpinClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Standard => "standard",
            Self::Planar => "planar",
            Self::DickeLike => "dicke_like",
        }
    }
}

impl std::str::FromStr for SpinClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "none" => Self::None,
            "standard" => Self::Standard,
            "planar" => Self::Planar,
            "dicke_like" => Self::DickeLike,
            other => return Err(format!("unknown spin class `{other}`")),
        })
    }
}

impl std::fmt::Display for SpinClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Axis order used by every array in [`SpinMetrics`]: x, y, z.
pub const AXES: [char; 3] = ['x', 'y', 'z'];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMetrics {
    pub n: f64,
    pub j_mean: [f64; 3],
    pub j_var: [f64; 3],
    /// ξ² per axis; `None` where both complementary means vanish.
    pub xi2: [Option<f64>; 3],
    pub entangled: [bool; 3],
    /// Squeezing condition ⟨ΔJj²⟩ < ¼√(⟨Jk⟩² + ⟨Jl⟩²) per axis.
    pub squeezed: [bool; 3],
    pub classification: SpinClass,
}

impl SpinMetrics {
    pub fn xi2_axis(&self, axis: usize) -> Result<f64, ObservableError> {
        self.xi2[axis].ok_or(ObservableError::Unpolarized { axis: AXES[axis] })
    }

    /// ξ² in dB relative to the entanglement bound 1/N; negative means entangled.
    pub fn xi2_db(&self, axis: usize) -> Option<f64> {
        self.xi2[axis].filter(|x| *x > 0.0).map(|x| 10.0 * (x * self.n).log10())
    }
}

/// Collective-spin means, variances and squeezing parameters.
pub fn spin_metrics(state: &MomentState, params: &SystemParams) -> SpinMetrics {
    let n = params.n();
    let s = state.s;
    let single = [2.0 * s.re, 2.0 * s.im, 2.0 * state.sds.re - 1.0];
    let pair = [
        2.0 * state.ss.re + 2.0 * state.sds2.re,
        -2.0 * state.ss.re + 2.0 * state.sds2.re,
        state.zz.re,
    ];
    let j_mean = single.map(|v| 0.5 * n * v);
    let mut j_var = [0.0; 3];
    for l in 0..3 {
        j_var[l] = 0.25 * n * (1.0 + (n - 1.0) * pair[l]) - j_mean[l] * j_mean[l];
    }
    let mut xi2 = [None; 3];
    let mut squeezed = [false; 3];
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let den = j_mean[k] * j_mean[k] + j_mean[l] * j_mean[l];
        if den > 1e-24 * n * n {
            xi2[j] = Some(j_var[j] / den);
        }
        squeezed[j] = j_var[j] < 0.25 * den.sqrt();
    }
    let entangled = xi2.map(|x| x.is_some_and(|v| v < 1.0 / n));

    let [sx, sy, sz] = squeezed;
    let equatorial = sx as u8 + sy as u8;
    let both_polarized = xi2[0].is_some() && xi2[1].is_some();
    let classification = if sz && equatorial == 0 {
        SpinClass::DickeLike
    } else if equatorial == 2 || (sz && equatorial == 1 && both_polarized) {
        SpinClass::Planar
    } else if equatorial == 1 {
        SpinClass::Standard
    } else {
        SpinClass::None
    };

    SpinMetrics { n, j_mean, j_var, xi2, entangled, squeezed, classification }
}

/// |g₁²N / (Γ_c Γ_t)|².
pub fn transfer_factor(params: &SystemParams) -> Result<f64, ObservableError> {
    let (gc, gt) = (params.gamma_c(), params.gamma_t());
    if gc.norm() == 0.0 {
        return Err(ObservableError::ZeroDenominator("Gamma_c"));
    }
    if gt.norm() == 0.0 {
        return Err(ObservableError::ZeroDenominator("Gamma_t"));
    }
    let r = params.g1 * params.g1 * params.n() / (gc * gt).norm();
    Ok(r * r)
}

/// g₁²N / (½|Γ_cΓ_t|); values of order one and above indicate lasing.
pub fn lasing_threshold_margin(params: &SystemParams) -> f64 {
    let num = params.g1 * params.g1 * params.n();
    if num == 0.0 {
        return 0.0;
    }
    num / (0.5 * (params.gamma_c() * params.gamma_t()).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingEstimate {
    /// Single-emitter coupling, in the same unit as the γ₁ input.
    pub g1: f64,
    pub n_emitters: f64,
    /// Effective mode volume in m³.
    pub v_eff: f64,
    pub waist: f64,
}

impl CouplingEstimate {
    pub fn collective(&self) -> f64 {
        self.n_emitters.sqrt() * self.g1
    }
}

/// Coupling of a uniformly doped near-concentric cavity.
///
/// `density` in m⁻³, lengths in m, `gamma1` as an angular rate.
pub fn estimate_coupling(
    density: f64,
    cavity_length: f64,
    wavelength: f64,
    gamma1: f64,
    refractive_index: f64,
    zeta: f64,
) -> Result<CouplingEstimate, ObservableError> {
    for (what, value) in [
        ("density", density),
        ("cavity_length", cavity_length),
        ("wavelength", wavelength),
        ("gamma1", gamma1),
        ("refractive_index", refractive_index),
        ("zeta", zeta),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ObservableError::Domain { what, value });
        }
    }
    if zeta > 1.0 {
        return Err(ObservableError::Domain { what: "zeta", value: zeta });
    }
    let waist = (cavity_length * wavelength / (2.0 * PI)).sqrt();
    let v_eff = PI * cavity_length * waist * waist / 4.0;
    let omega = 2.0 * PI * SPEED_OF_LIGHT / wavelength;
    let c3 = SPEED_OF_LIGHT.powi(3);
    let g1 = zeta
        * (3.0 * PI * c3 * gamma1 / (2.0 * omega * omega * refractive_index.powi(3) * v_eff)).sqrt();
    Ok(CouplingEstimate { g1, n_emitters: density * v_eff, v_eff, waist })
}

pub fn to_db(variance: f64, shot_noise: f64) -> Result<f64, ObservableError> {
    if !(variance > 0.0) {
        return Err(ObservableError::Domain { what: "variance", value: variance });
    }
    if !(shot_noise > 0.0) {
        return Err(ObservableError::Domain { what: "shot_noise", value: shot_noise });
    }
    Ok(10.0 * (variance / shot_noise).log10())
}
