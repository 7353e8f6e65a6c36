//! Interaural metrics: ILD over ERB bands, ITD and IACC from the
//! interaural cross-correlation, and early/late octave-band IACC.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::dsp::correlate::{correlate_slices, peak_lag};
use crate::dsp::filterbank::{erb_filterbank, octave_filter, FilterbankSpec};
use crate::dsp::onset::{detect_onset, direct_segment_len};
use crate::error::{Error, Result};
use crate::math::rms;
use crate::signal::{BinauralIr, MonoIr};

/// ERB bands centered below this frequency form the low ILD aggregate.
pub const ILD_SPLIT_HZ: f64 = 1500.0;
/// Interaural lag search range.
pub const MAX_INTERAURAL_LAG_S: f64 = 0.001;
pub const IACC_OCTAVES_HZ: [f64; 3] = [500.0, 1000.0, 2000.0];
pub const DEFAULT_EARLY_LATE_BOUNDARY_S: f64 = 0.080;

/// Which part of the BRIR the ITD is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ItdSegment {
    /// The 2.5 ms after the onset.
    #[default]
    Direct,
    Full,
}

fn max_lag(sample_rate: u32) -> usize {
    (MAX_INTERAURAL_LAG_S * sample_rate as f64).floor() as usize
}

fn direct_segment(brir: &BinauralIr) -> Result<BinauralIr> {
    let onset = detect_onset(brir)?;
    let len = direct_segment_len(brir.sample_rate());
    if onset + len > brir.len() {
        return Err(Error::invalid("less than 2.5 ms of response after the onset"));
    }
    brir.segment(onset, len)
}

/// Mean ILD in dB over the ERB bands below and above 1.5 kHz, measured on
/// the 2.5 ms direct segment. Positive means the left ear is louder.
pub fn ild_avg(brir: &BinauralIr) -> Result<(f64, f64)> {
    ild_avg_with(brir, &FilterbankSpec::erb_default())
}

pub fn ild_avg_with(brir: &BinauralIr, bank: &FilterbankSpec) -> Result<(f64, f64)> {
    let seg = direct_segment(brir)?;
    let left = erb_filterbank(seg.left(), bank)?;
    let right = erb_filterbank(seg.right(), bank)?;
    let (mut low, mut high) = (Vec::new(), Vec::new());
    for (band, (&fc, (l, r))) in bank.center_frequencies.iter().zip(left.iter().zip(&right)).enumerate() {
        let (rl, rr) = (rms(l.samples()), rms(r.samples()));
        if !(rl > 0.0 && rr > 0.0) {
            return Err(Error::DegenerateBand { band, center_hz: fc });
        }
        let ild = 20.0 * (rl / rr).log10();
        if fc < ILD_SPLIT_HZ {
            low.push(ild);
        } else {
            high.push(ild);
        }
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    Ok((mean(&low), mean(&high)))
}

/// Lag of the largest |IACF| within ±1 ms, in microseconds, with parabolic
/// refinement. Positive means the left ear leads.
pub fn itd(brir: &BinauralIr) -> Result<f64> {
    itd_with(brir, ItdSegment::Direct)
}

pub fn itd_with(brir: &BinauralIr, segment: ItdSegment) -> Result<f64> {
    let seg = match segment {
        ItdSegment::Direct => direct_segment(brir)?,
        ItdSegment::Full => brir.clone(),
    };
    let (l, r) = (seg.left().samples(), seg.right().samples());
    if l.iter().all(|v| *v == 0.0) || r.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateInput("silent ITD segment".into()));
    }
    let lag = max_lag(brir.sample_rate());
    let corr = correlate_slices(l, r, lag);
    let tau = peak_lag(&corr, lag, true, true);
    let limit = lag as f64;
    Ok(tau.clamp(-limit, limit) / brir.sample_rate() as f64 * 1e6)
}

/// Maximum of the normalized |IACF| over ±1 ms.
pub fn iacc(left: &MonoIr, right: &MonoIr) -> Result<f64> {
    if left.len() != right.len() || left.sample_rate() != right.sample_rate() {
        return Err(Error::invalid("IACC segments differ in length or sample rate"));
    }
    if (left.len() as f64) <= 0.002 * left.sample_rate() as f64 {
        return Err(Error::invalid("IACC segment must be longer than 2 ms"));
    }
    let (el, er) = (left.energy(), right.energy());
    if !(el > 0.0 && er > 0.0) {
        return Err(Error::DegenerateInput("IACC channel without energy".into()));
    }
    let corr = correlate_slices(left.samples(), right.samples(), max_lag(left.sample_rate()));
    let peak = corr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((peak / (el * er).sqrt()).min(1.0))
}

/// `(1 − IACC_E3, 1 − IACC_L3)`: IACC averaged over the 500 Hz, 1 kHz and
/// 2 kHz octaves, on the windows before and after `boundary_s` past onset.
pub fn iacc_e3_l3(brir: &BinauralIr) -> Result<(f64, f64)> {
    iacc_e3_l3_with(brir, DEFAULT_EARLY_LATE_BOUNDARY_S)
}

pub fn iacc_e3_l3_with(brir: &BinauralIr, boundary_s: f64) -> Result<(f64, f64)> {
    let fs = brir.sample_rate();
    let onset = detect_onset(brir)?;
    let split = onset + (boundary_s * fs as f64).round() as usize;
    let min_late = (0.002 * fs as f64).floor() as usize + 1;
    if split + min_late > brir.len() {
        return Err(Error::invalid(format!(
            "BRIR of {} samples is shorter than the early window plus a late window",
            brir.len()
        )));
    }
    let (mut early, mut late) = (0.0, 0.0);
    for &fc in &IACC_OCTAVES_HZ {
        let l = octave_filter(brir.left(), fc)?;
        let r = octave_filter(brir.right(), fc)?;
        let window = |start: usize, len: usize| -> Result<f64> {
            iacc(&l.segment(start, len)?, &r.segment(start, len)?)
        };
        early += window(onset, split - onset)?;
        late += window(split, brir.len() - split)?;
    }
    let n = IACC_OCTAVES_HZ.len() as f64;
    Ok(((1.0 - early / n).clamp(0.0, 1.0), (1.0 - late / n).clamp(0.0, 1.0)))
}
