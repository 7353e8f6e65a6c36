//! Exponential sine sweep excitation and deconvolution.
//!
//! The sweep is `sin(2π f0 T/R (e^{tR/T} - 1))` with `R = ln(f1/f0)`, faded in
//! and out with raised-cosine ramps. The inverse filter is the time-reversed
//! sweep with an `e^{-tR/T}` envelope that compensates the sweep's pink
//! spectrum, scaled so that `sweep * inverse` has unit gain at the geometric
//! centre of the band.
//!
//! In `sweep * inverse` the linear response has lag zero at
//! `len(inverse) - 1` and harmonic distortion products arrive earlier.
//! [`EssTrim::Linear`] keeps a short pre-roll before lag zero, because the
//! band-limited deconvolution pulse is two-sided, and discards the rest.
//! [`deconvolve_ess`] uses a 5 ms pre-roll, so lag zero sits at sample
//! `round(0.005 * fs)`.

use core::f64::consts::PI;

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use super::convolve::convolve_fft;
use crate::error::{Error, Result};
use crate::signal::MonoIr;

/// Sweep parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EssParams {
    pub sample_rate: u32,
    pub f_start: f64,
    pub f_end: f64,
    pub duration: f64,
    pub fade: f64,
}

impl Default for EssParams {
    fn default() -> Self {
        EssParams { sample_rate: 48_000, f_start: 20.0, f_end: 20_000.0, duration: 20.0, fade: 0.01 }
    }
}

/// Portion of the deconvolved signal to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EssTrim {
    /// Linear response with `pre_roll` samples before lag zero, as long as
    /// the recording.
    Linear { pre_roll: usize },
    /// The complete linear convolution, distortion products included.
    Full,
}

pub fn generate_ess(
    sample_rate: u32,
    f_start: f64,
    f_end: f64,
    duration: f64,
    fade: f64,
) -> Result<(MonoIr, MonoIr)> {
    let fs = sample_rate as f64;
    if sample_rate == 0 {
        return Err(Error::invalid("sample rate must be positive"));
    }
    if !(f_start > 0.0 && f_start < f_end && f_end <= fs / 2.0) {
        return Err(Error::invalid("sweep needs 0 < f_start < f_end <= Nyquist"));
    }
    if !(fade >= 0.0 && duration > 2.0 * fade) {
        return Err(Error::invalid("sweep duration must exceed both fades"));
    }
    let n = (duration * fs).round() as usize;
    let fade_n = (fade * fs).round() as usize;
    if n < 2 || 2 * fade_n >= n {
        return Err(Error::invalid("sweep too short"));
    }
    let rate = (f_end / f_start).ln();
    let k = 2.0 * PI * f_start * duration / rate;
    let mut sweep: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            (k * ((t * rate / duration).exp() - 1.0)).sin()
        })
        .collect();
    for i in 0..fade_n {
        let g = 0.5 * (1.0 - (PI * i as f64 / fade_n as f64).cos());
        sweep[i] *= g;
        sweep[n - 1 - i] *= g;
    }
    let mut inverse: Vec<f64> = (0..n)
        .map(|i| sweep[n - 1 - i] * (-(i as f64 / fs) * rate / duration).exp())
        .collect();

    let centre = (f_start * f_end).sqrt();
    let gain = (dft_at(&sweep, centre, fs) * dft_at(&inverse, centre, fs)).norm();
    if !(gain > 0.0) {
        return Err(Error::DegenerateInput("sweep has no in-band energy".into()));
    }
    inverse.iter_mut().for_each(|v| *v /= gain);
    Ok((MonoIr::from_parts(sweep, sample_rate), MonoIr::from_parts(inverse, sample_rate)))
}

pub fn generate_ess_with(params: &EssParams) -> Result<(MonoIr, MonoIr)> {
    generate_ess(params.sample_rate, params.f_start, params.f_end, params.duration, params.fade)
}

/// Single-bin DFT at an arbitrary frequency.
fn dft_at(x: &[f64], freq: f64, fs: f64) -> Complex64 {
    let w = -2.0 * PI * freq / fs;
    let step = Complex64::from_polar(1.0, w);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        if i % 4096 == 0 {
            phasor = Complex64::from_polar(1.0, w * i as f64);
        }
        acc += phasor * v;
        phasor *= step;
    }
    acc
}

/// Pre-roll used by [`deconvolve_ess`].
pub const DEFAULT_PRE_ROLL_S: f64 = 0.005;

pub fn default_pre_roll(sample_rate: u32) -> usize {
    (DEFAULT_PRE_ROLL_S * sample_rate as f64).round() as usize
}

pub fn deconvolve_ess(recorded: &MonoIr, inverse: &MonoIr) -> Result<MonoIr> {
    let pre_roll = default_pre_roll(recorded.sample_rate());
    deconvolve_ess_with(recorded, inverse, EssTrim::Linear { pre_roll })
}

pub fn deconvolve_ess_with(recorded: &MonoIr, inverse: &MonoIr, trim: EssTrim) -> Result<MonoIr> {
    if recorded.sample_rate() != inverse.sample_rate() {
        return Err(Error::invalid("recording and inverse filter have different sample rates"));
    }
    let mut full = convolve_fft(recorded.samples(), inverse.samples());
    if let EssTrim::Linear { pre_roll } = trim {
        let start = (inverse.len() - 1).saturating_sub(pre_roll);
        full.drain(..start);
        full.truncate(recorded.len());
    }
    Ok(MonoIr::from_parts(full, recorded.sample_rate()))
}

/// Peak magnitude of a deconvolved response relative to the largest value
/// more than `exclusion` samples away from the peak, in dB.
pub fn main_to_sidelobe_db(response: &[f64], exclusion: usize) -> f64 {
    let (peak_idx, peak) = response
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
    let side = response
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(peak_idx) > exclusion)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if side == 0.0 {
        return f64::INFINITY;
    }
    20.0 * (peak / side).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use crate::dsp::filters::butterworth_bandpass;
    use alloc::vec;

    #[test]
    fn paper_parameters_accepted() {
        let (sweep, inverse) = generate_ess_with(&EssParams::default()).unwrap();
        assert_eq!(sweep.len(), 960_000);
        assert_eq!(inverse.len(), 960_000);
        assert!(sweep.samples().iter().all(|v| v.abs() <= 1.0));
        assert_eq!(sweep.samples()[0], 0.0);
    }

    #[test]
    fn instantaneous_frequency_is_exponential() {
        let (fs, f0, f1, t_len) = (48_000.0, 20.0, 20_000.0, 20.0);
        let (sweep, _) = generate_ess(48_000, f0, f1, t_len, 0.01).unwrap();
        let x = sweep.samples();
        for probe in 0..10 {
            let t = t_len * (probe as f64 + 0.5) / 10.0;
            let expect = f0 * (f1 / f0).powf(t / t_len);
            // Upward zero crossings over a span of roughly 0.7% frequency
            // change, located by linear interpolation.
            let span = ((0.0035 * t_len / (f1 / f0).ln()) * fs).max(3.0 * fs / expect) as usize;
            let centre = (t * fs) as usize;
            let mut crossings = Vec::new();
            for i in centre - span / 2..centre + span / 2 {
                if x[i] <= 0.0 && x[i + 1] > 0.0 {
                    crossings.push(i as f64 + x[i] / (x[i] - x[i + 1]));
                }
            }
            let periods = (crossings.len() - 1) as f64;
            let measured = periods * fs / (crossings[crossings.len() - 1] - crossings[0]);
            assert!((measured / expect - 1.0).abs() < 0.01, "t={t}: {measured} vs {expect}");
        }
    }

    #[test]
    fn self_deconvolution_is_impulsive() {
        let (sweep, inverse) = generate_ess(48_000, 20.0, 20_000.0, 2.0, 0.01).unwrap();
        let full = deconvolve_ess_with(&sweep, &inverse, EssTrim::Full).unwrap();
        let peak = full
            .samples()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        assert_eq!(peak, inverse.len() - 1);
        // Outside one period of the lowest swept frequency.
        let ratio = main_to_sidelobe_db(full.samples(), 48_000 / 20);
        assert!(ratio >= 60.0, "main-to-sidelobe {ratio:.1} dB");
        let linear = deconvolve_ess(&sweep, &inverse).unwrap();
        assert_eq!(linear.len(), sweep.len());
        let centre_gain = linear.samples()[default_pre_roll(48_000)];
        assert!(centre_gain > 0.5 && centre_gain <= 1.0, "{centre_gain}");
    }

    #[test]
    fn recovers_known_response() {
        let (sweep, inverse) = generate_ess(48_000, 20.0, 20_000.0, 2.0, 0.01).unwrap();
        // Band-limited test response well inside the swept band.
        let mut h = vec![0.0; 4800];
        h[600] = 1.0;
        h[800] = -0.5;
        h[2100] = 0.25;
        let bp = butterworth_bandpass(4, 200.0, 8000.0, 48_000.0).unwrap();
        let h = bp.filtfilt(&h, 0);
        let recorded = MonoIr::new(convolve_fft(sweep.samples(), &h), 48_000).unwrap();
        let out = deconvolve_ess(&recorded, &inverse).unwrap();
        let out = &out.samples()[default_pre_roll(48_000)..];
        let err: f64 = h.iter().zip(out).map(|(a, b)| (a - b) * (a - b)).sum();
        let energy: f64 = h.iter().map(|v| v * v).sum();
        let floor_db = 10.0 * (err / energy).log10();
        assert!(floor_db <= -40.0, "error floor {floor_db:.1} dB");
    }

    #[test]
    fn zero_recording_gives_zero() {
        let (_, inverse) = generate_ess(8_000, 50.0, 3_000.0, 0.5, 0.01).unwrap();
        let rec = MonoIr::zeros(6000, 8_000).unwrap();
        assert!(deconvolve_ess(&rec, &inverse).unwrap().samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn parameter_errors() {
        assert!(generate_ess(48_000, 0.0, 100.0, 1.0, 0.01).is_err());
        assert!(generate_ess(48_000, 200.0, 100.0, 1.0, 0.01).is_err());
        assert!(generate_ess(48_000, 20.0, 30_000.0, 1.0, 0.01).is_err());
        assert!(generate_ess(48_000, 20.0, 20_000.0, 0.01, 0.01).is_err());
        let a = MonoIr::zeros(10, 48_000).unwrap();
        let b = MonoIr::zeros(10, 44_100).unwrap();
        assert!(deconvolve_ess(&a, &b).is_err());
        
    }
}
