//! Reverberation time from Schroeder backward integration.

use alloc::vec::Vec;

use num_traits::Float;

use crate::dsp::filterbank::octave_filter;
use crate::error::{Error, Result};
use crate::signal::{BinauralIr, MonoIr};

pub const T30_OCTAVES_HZ: [f64; 2] = [500.0, 1000.0];
/// Level range of the decay fit, in dB below the integrated total.
pub const T30_FIT_RANGE_DB: (f64, f64) = (-5.0, -35.0);
/// Required distance between the peak and the noise floor.
pub const MIN_DECAY_RANGE_DB: f64 = 35.0;

/// Schroeder energy decay curve in dB relative to the total energy.
pub fn schroeder_db(x: &[f64]) -> Vec<f64> {
    let mut edc = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for v in x.iter().rev() {
        acc += v * v;
        edc.push(acc);
    }
    edc.reverse();
    let total = edc.first().copied().unwrap_or(0.0);
    edc.iter().map(|e| if *e > 0.0 { 10.0 * (e / total).log10() } else { f64::NEG_INFINITY }).collect()
}

/// Level of the 10 ms window after the largest sample above the mean square
/// of the final tenth of the response.
pub fn decay_range_db(x: &[f64], sample_rate: u32) -> f64 {
    let tail = &x[x.len() - (x.len() / 10).max(1)..];
    let floor = tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64;
    let peak_at = x.iter().enumerate().fold(0, |b, (i, v)| if v.abs() > x[b].abs() { i } else { b });
    let win = ((0.010 * sample_rate as f64) as usize).max(1);
    let head = &x[peak_at..(peak_at + win).min(x.len())];
    let level = head.iter().map(|v| v * v).sum::<f64>() / head.len() as f64;
    if floor == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (level / floor).log10()
    }
}

/// Broadband T30 of `x`: line fit to the decay curve between -5 and -35 dB,
/// extrapolated to 60 dB.
pub fn t30_broadband(x: &[f64], sample_rate: u32, band_hz: f64) -> Result<f64> {
    if x.len() < 16 {
        return Err(Error::invalid("response too short for a decay fit"));
    }
    let range = decay_range_db(x, sample_rate);
    if !(range >= MIN_DECAY_RANGE_DB) {
        return Err(Error::InsufficientDecay { band_hz, range_db: range });
    }
    let edc = schroeder_db(x);
    let (hi, lo) = T30_FIT_RANGE_DB;
    let start = edc.iter().position(|d| *d <= hi);
    let end = edc.iter().position(|d| *d <= lo);
    let (start, end) = match (start, end) {
        (Some(s), Some(e)) if e > s + 2 => (s, e),
        _ => return Err(Error::InsufficientDecay { band_hz, range_db: range }),
    };
    let fs = sample_rate as f64;
    let n = (end - start + 1) as f64;
    let (mut st, mut sd, mut stt, mut std) = (0.0, 0.0, 0.0, 0.0);
    for (i, d) in edc[start..=end].iter().enumerate() {
        let t = (start + i) as f64 / fs;
        st += t;
        sd += d;
        stt += t * t;
        std += t * d;
    }
    let slope = (n * std - st * sd) / (n * stt - st * st);
    if !(slope < 0.0) {
        return Err(Error::InsufficientDecay { band_hz, range_db: range });
    }
    Ok(-60.0 / slope)
}

/// T30 of one octave band of `ir`.
pub fn t30_band(ir: &MonoIr, center_hz: f64) -> Result<f64> {
    let band = octave_filter(ir, center_hz)?;
    t30_broadband(band.samples(), ir.sample_rate(), center_hz)
}

/// T30 averaged over the 500 Hz and 1 kHz octaves.
pub fn t30_mid(ir: &MonoIr) -> Result<f64> {
    let mut sum = 0.0;
    for &fc in &T30_OCTAVES_HZ {
        sum += t30_band(ir, fc)?;
    }
    Ok(sum / T30_OCTAVES_HZ.len() as f64)
}

/// [`t30_mid`] averaged over both ears.
pub fn t30_mid_binaural(brir: &BinauralIr) -> Result<f64> {
    Ok(0.5 * (t30_mid(brir.left())? + t30_mid(brir.right())?))
}
