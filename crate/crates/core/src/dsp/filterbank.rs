//! ERB and octave band analysis.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use super::fft::FftPlan;
use super::filters::{butterworth_bandpass, ringing_pad};
use crate::error::{Error, Result};
use crate::signal::MonoIr;

pub const DEFAULT_ERB_BANDS: usize = 39;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FilterbankKind {
    Erb,
    Octave,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterbankSpec {
    pub kind: FilterbankKind,
    pub center_frequencies: Vec<f64>,
}

/// Glasberg–Moore ERB bandwidth in Hz at `freq`.
pub fn erb_bandwidth(freq: f64) -> f64 {
    24.7 * (4.37e-3 * freq + 1.0)
}

/// Glasberg–Moore ERB-rate (ERB number) of `freq`.
pub fn erb_number(freq: f64) -> f64 {
    21.4 * (1.0 + 4.37e-3 * freq).log10()
}

pub fn erb_number_to_hz(number: f64) -> f64 {
    (10.0.powf(number / 21.4) - 1.0) / 4.37e-3
}

impl FilterbankSpec {
    /// Bands centered on the integer ERB numbers `1..=bands`.
    pub fn erb(bands: usize) -> Self {
        FilterbankSpec {
            kind: FilterbankKind::Erb,
            center_frequencies: (1..=bands).map(|e| erb_number_to_hz(e as f64)).collect(),
        }
    }

    /// The default 39-band ERB layout (about 26 Hz to 15 kHz).
    pub fn erb_default() -> Self {
        FilterbankSpec::erb(DEFAULT_ERB_BANDS)
    }

    pub fn octave(centers: &[f64]) -> Self {
        FilterbankSpec { kind: FilterbankKind::Octave, center_frequencies: centers.to_vec() }
    }

    pub fn band_count(&self) -> usize {
        self.center_frequencies.len()
    }

    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        if self.center_frequencies.is_empty() {
            return Err(Error::invalid("filterbank has no bands"));
        }
        for (i, &f) in self.center_frequencies.iter().enumerate() {
            if !(f > 0.0 && f < nyquist) {
                return Err(Error::invalid(format!("band {i} center {f} Hz is not below Nyquist")));
            }
            if i > 0 && f <= self.center_frequencies[i - 1] {
                return Err(Error::invalid("band centers must be strictly increasing"));
            }
        }
        Ok(())
    }
}

/// Magnitude of a fourth-order gammatone-shaped band centered on `center`
/// with the ERB-matched bandwidth parameter `1.019·ERB(center)`.
pub fn erb_band_magnitude(freq: f64, center: f64) -> f64 {
    let b = 1.019 * erb_bandwidth(center);
    let r = (freq - center) / b;
    1.0 / ((1.0 + r * r) * (1.0 + r * r))
}

/// Splits `signal` into ERB bands with zero-phase fourth-order gammatone
/// magnitude responses, applied in the frequency domain.
pub fn erb_filterbank(signal: &MonoIr, spec: &FilterbankSpec) -> Result<Vec<MonoIr>> {
    if spec.kind != FilterbankKind::Erb {
        return Err(Error::invalid("erb_filterbank needs an ERB filterbank spec"));
    }
    spec.validate(signal.sample_rate())?;
    let fs = signal.sample_rate() as f64;
    let narrowest = 1.019 * erb_bandwidth(spec.center_frequencies[0]);
    // The zero-phase kernel decays like (1 + 2πb|t|)·exp(-2πb|t|); 17 time
    // constants bring it below -120 dB.
    let guard = (17.0 * fs / (2.0 * core::f64::consts::PI * narrowest)).ceil() as usize;
    let n = signal.len();
    let plan = FftPlan::new((n + 2 * guard).next_power_of_two());
    let spectrum = plan.forward_real(signal.samples());
    let df = fs / plan.len() as f64;
    let bands = spec
        .center_frequencies
        .iter()
        .map(|&fc| {
            let shaped: Vec<_> = spectrum
                .iter()
                .enumerate()
                .map(|(k, c)| c * erb_band_magnitude(k as f64 * df, fc))
                .collect();
            let mut y = plan.inverse_real(&shaped);
            y.truncate(n);
            MonoIr::from_parts(y, signal.sample_rate())
        })
        .collect();
    Ok(bands)
}

/// Zero-phase octave band-pass (fourth-order Butterworth applied forward and
/// backward) with edges `center/√2 .. center·√2`.
pub fn octave_filter(signal: &MonoIr, center: f64) -> Result<MonoIr> {
    let fs = signal.sample_rate() as f64;
    let (lo, hi) = (center / 2f64.sqrt(), center * 2f64.sqrt());
    if !(center > 0.0) || hi >= fs / 2.0 {
        return Err(Error::invalid(format!("octave center {center} Hz: upper edge reaches Nyquist")));
    }
    let sos = butterworth_bandpass(2, lo, hi, fs)?;
    let y = sos.filtfilt(signal.samples(), ringing_pad(lo, fs));
    Ok(MonoIr::from_parts(y, signal.sample_rate()))
}
