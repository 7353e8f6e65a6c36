//! Direct-sound onset detection and direct-energy normalization.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::db_to_amplitude;
use crate::signal::BinauralIr;

/// Onset threshold relative to the global peak magnitude.
pub const DEFAULT_ONSET_THRESHOLD_DB: f64 = -20.0;
/// Length of the direct-sound segment used for normalization and for the
/// interaural metrics.
pub const DIRECT_SEGMENT_S: f64 = 0.0025;

pub fn direct_segment_len(sample_rate: u32) -> usize {
    (DIRECT_SEGMENT_S * sample_rate as f64).round() as usize
}

pub fn detect_onset(brir: &BinauralIr) -> Result<usize> {
    detect_onset_with(brir, DEFAULT_ONSET_THRESHOLD_DB)
}

/// First index at which either channel reaches `threshold_db` relative to
/// the larger of the two channel peaks.
pub fn detect_onset_with(brir: &BinauralIr, threshold_db: f64) -> Result<usize> {
    let (l, r) = (brir.left().samples(), brir.right().samples());
    let peak = l.iter().chain(r).fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::NoOnset);
    }
    let threshold = peak * db_to_amplitude(threshold_db);
    let first = |x: &[f64]| x.iter().position(|v| v.abs() >= threshold);
    match (first(l), first(r)) {
        (Some(a), Some(b)) => Ok(a.min(b)),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(Error::NoOnset),
    }
}

/// Joint RMS over both channels of the direct segment starting at onset.
pub fn direct_rms(brir: &BinauralIr, onset: usize) -> Result<f64> {
    let len = direct_segment_len(brir.sample_rate());
    if onset + len > brir.len() {
        return Err(Error::invalid("less than 2.5 ms of response after the onset"));
    }
    let seg = |x: &[f64]| x[onset..onset + len].iter().map(|v| v * v).sum::<f64>();
    let energy = seg(brir.left().samples()) + seg(brir.right().samples());
    Ok((energy / (2 * len) as f64).sqrt())
}

/// Scales both channels so the joint RMS of the 2.5 ms segment after onset
/// is one. A common gain keeps interaural level differences intact.
pub fn normalize_direct_energy(brir: &BinauralIr) -> Result<BinauralIr> {
    let onset = detect_onset(brir)?;
    let rms = direct_rms(brir, onset)?;
    if rms == 0.0 || !rms.is_finite() {
        return Err(Error::DegenerateInput("direct segment has no energy".into()));
    }
    Ok(brir.scaled(1.0 / rms))
}
