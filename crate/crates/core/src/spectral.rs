//! Welch-averaged periodograms of quadrature-variance time series.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::SpectralError;
use crate::integrator::Trace;
use crate::observables::{anomalous_fluctuation, photon_fluctuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hann => "hann",
            Self::Rectangular => "rectangular",
        }
    }

    /// Periodic window of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Self::Hann => (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect(),
            Self::Rectangular => vec![1.0; n],
        }
    }
}

impl std::str::FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hann" => Ok(Self::Hann),
            "rectangular" | "rect" => Ok(Self::Rectangular),
            other => Err(format!("unknown window `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Bin frequencies in cycles per unit time (κ/2π when time is in 1/κ).
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub segment_count: usize,
    pub segment_length: usize,
    pub overlap_fraction: f64,
    pub window_name: &'static str,
    pub epsilon: f64,
    pub varrho: f64,
    /// Set once [`scale_spectral_density`] has mapped power to 1 + power.
    pub shot_noise_referenced: bool,
}

impl PsdEstimate {
    pub fn bin_width(&self) -> f64 {
        if self.frequencies.len() > 1 {
            self.frequencies[1] - self.frequencies[0]
        } else {
            0.0
        }
    }

    /// Σ power·Δν.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.bin_width()
    }

    /// Frequency of the largest bin, skipping DC.
    pub fn peak_frequency(&self) -> Option<f64> {
        self.power
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| self.frequencies[i])
    }
}

/// ⟨:ΔX_θ²:⟩ per sample, i.e. the cavity variance minus the vacuum level.
pub fn normally_ordered_variance_series(trace: &Trace, theta: f64) -> Vec<f64> {
    let rot = Complex64::from_polar(1.0, -2.0 * theta);
    trace
        .states
        .iter()
        .map(|s| 2.0 * (photon_fluctuation(s) + (rot * anomalous_fluctuation(s)).re))
        .collect()
}

/// Largest power of two not above `len / 8`, floored at 8.
pub fn default_segment_length(len: usize) -> usize {
    let target = (len / 8).max(8);
    let lower = 1usize << (usize::BITS - 1 - target.leading_zeros());
    let upper = lower << 1;
    let nearest = if target - lower <= upper - target { lower } else { upper };
    if nearest <= len {
        nearest
    } else {
        lower
    }
}

/// One-sided power spectral density by averaged windowed periodograms.
///
/// Normalised so that Σ power·Δν equals the window-weighted mean square
/// of the input.
pub fn welch_psd(
    series: &[f64],
    sample_rate: f64,
    segment_length: usize,
    overlap_fraction: f64,
    window: Window,
) -> Result<PsdEstimate, SpectralError> {
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(SpectralError::SampleRate);
    }
    if segment_length < 8 {
        return Err(SpectralError::SegmentTooShort(segment_length));
    }
    if !(0.0..=0.9).contains(&overlap_fraction) {
        return Err(SpectralError::Overlap(overlap_fraction));
    }
    if series.len() < segment_length {
        return Err(SpectralError::TooShort { len: series.len(), min: segment_length });
    }
    let l = segment_length;
    let step = (l - (overlap_fraction * l as f64).round() as usize).max(1);
    let segments = 1 + (series.len() - l) / step;
    let w = window.coefficients(l);
    let w_energy: f64 = w.iter().map(|x| x * x).sum();
    let fft = FftPlanner::new().plan_fft_forward(l);

    let bins = l / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for seg in 0..segments {
        let chunk = &series[seg * step..seg * step + l];
        for ((b, x), wi) in buf.iter_mut().zip(chunk).zip(&w) {
            *b = Complex64::new(x * wi, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = 1.0 / (sample_rate * w_energy * segments as f64);
    let nyquist = if l % 2 == 0 { Some(l / 2) } else { None };
    let power = acc
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let fold = if k == 0 || Some(k) == nyquist { 1.0 } else { 2.0 };
            fold * p * scale
        })
        .collect();
    let frequencies = (0..bins).map(|k| k as f64 * sample_rate / l as f64).collect();
    Ok(PsdEstimate {
        frequencies,
        power,
        segment_count: segments,
        segment_length: l,
        overlap_fraction,
        window_name: window.name(),
        epsilon: 1.0,
        varrho: 1.0,
        shot_noise_referenced: false,
    })
}

/// Detected spectrum ε·ϱ·(1 + power), referenced to shot noise.
pub fn scale_spectral_density(
    psd: &PsdEstimate,
    epsilon: f64,
    varrho: f64,
) -> Result<PsdEstimate, SpectralError> {
    for (what, value) in [("epsilon", epsilon), ("varrho", varrho)] {
        if !(value > 0.0 && value <= 1.0) {
            return Err(SpectralError::Efficiency { what, value });
        }
    }
    Ok(PsdEstimate {
        power: psd.power.iter().map(|p| epsilon * varrho * (1.0 + p)).collect(),
        epsilon,
        varrho,
        shot_noise_referenced: true,
        ..psd.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tone_power_near_its_bin() {
        let (n, l, fs) = (4096, 256, 10.0);
        let f0 = 20.0 * fs / l as f64;
        let amp = 0.7;
        let x: Vec<f64> = (0..n).map(|i| amp * (2.0 * PI * f0 * i as f64 / fs).sin()).collect();
        let psd = welch_psd(&x, fs, l, 0.5, Window::Hann).unwrap();
        let dv = psd.bin_width();
        let near: f64 = psd.power[19..=21].iter().sum::<f64>() * dv;
        assert!((near / (amp * amp / 2.0) - 1.0).abs() < 0.01);
        assert_eq!(psd.peak_frequency(), Some(f0));
    }

    #[test]
    fn dc_lands_in_zero_bin() {
        let x = vec![1.5; 512];
        let psd = welch_psd(&x, 1.0, 64, 0.5, Window::Hann).unwrap();
        assert!((psd.total_power() - 2.25).abs() < 1e-12);
        let dc_share = psd.power[0] * psd.bin_width() / psd.total_power();
        // a periodic Hann leaks a quarter of the DC power into the first bin
        assert!(dc_share > 0.6);
        let rect = welch_psd(&x, 1.0, 64, 0.5, Window::Rectangular).unwrap();
        assert!((rect.power[0] * rect.bin_width() - 2.25).abs() < 1e-12);
        assert!(rect.power[1..].iter().all(|p| p.abs() < 1e-20));
    }

    #[test]
    fn argument_checks() {
        let x = vec![0.0; 100];
        assert_eq!(
            welch_psd(&x, 1.0, 128, 0.5, Window::Hann),
            Err(SpectralError::TooShort { len: 100, min: 128 })
        );
        assert!(welch_psd(&x, 1.0, 4, 0.5, Window::Hann).is_err());
        assert!(welch_psd(&x, 1.0, 16, 0.95, Window::Hann).is_err());
        assert!(welch_psd(&x, 0.0, 16, 0.5, Window::Hann).is_err());
    }

    #[test]
    fn shot_noise_scaling() {
        let x = vec![0.0; 64];
        let psd = welch_psd(&x, 1.0, 16, 0.5, Window::Hann).unwrap();
        let s = scale_spectral_density(&psd, 1.0, 1.0).unwrap();
        assert!(s.power.iter().all(|p| *p == 1.0));
        let s = scale_spectral_density(&psd, 0.5, 0.8).unwrap();
        assert!(s.power.iter().all(|p| (p - 0.4).abs() < 1e-15));
        assert!(scale_spectral_density(&psd, 0.0, 1.0).is_err());
        assert!(scale_spectral_density(&psd, 1.0, 1.5).is_err());
    }

    #[test]
    fn segment_default() {
        assert_eq!(default_segment_length(8001), 1024);
        assert_eq!(default_segment_length(10), 8);
        assert_eq!(default_segment_length(4096), 512);
    }
}
