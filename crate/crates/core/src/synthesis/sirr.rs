//! First-order SIRR: per-bin split into a VBAP-panned direct stream and a
//! decorrelated diffuse stream shared equally by all loudspeakers.
//!
//! Higher-order variants repeat the same split per spatial sector; this
//! module is the single-sector case.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::decorrelate::decorrelate;
use super::vls::{ChannelBuffer, VirtualLoudspeakerSignals};
use crate::doa::TfDoaField;
use crate::dsp::stft::{istft, StftFrames};
use crate::error::{Error, Result};
use crate::geometry::grid::LoudspeakerGrid;
use crate::geometry::vbap::vbap_gains;

/// Time-frequency streams before the inverse STFT and decorrelation.
#[derive(Debug, Clone)]
pub struct SirrStreams {
    /// Direct stream per loudspeaker, `√(1-ψ)·P·g_l`.
    pub direct: Vec<StftFrames>,
    /// Diffuse stream before distribution, `√ψ·P`.
    pub diffuse: StftFrames,
}

impl SirrStreams {
    /// Energy of bin `(t, k)` over all direct feeds plus the diffuse stream
    /// as distributed with `1/√L` weights to `L` loudspeakers.
    pub fn bin_energy(&self, t: usize, k: usize) -> (f64, f64) {
        let direct = self.direct.iter().map(|f| f.frames()[t][k].norm_sqr()).sum();
        let l = self.direct.len() as f64;
        let per = self.diffuse.frames()[t][k] / l.sqrt();
        (direct, per.norm_sqr() * l)
    }
}

pub fn sirr_streams(pressure_frames: &StftFrames, field: &TfDoaField, grid: &LoudspeakerGrid) -> Result<SirrStreams> {
    if !field.matches(pressure_frames) {
        return Err(Error::invalid("diffuseness field does not match the pressure STFT"));
    }
    let mut direct: Vec<StftFrames> = (0..grid.len()).map(|_| pressure_frames.zeros_like()).collect();
    let mut diffuse = pressure_frames.zeros_like();
    for (t, frame) in pressure_frames.frames().iter().enumerate() {
        for (k, &p) in frame.iter().enumerate() {
            let psi = field.psi()[t][k];
            diffuse.frames_mut()[t][k] = p * psi.sqrt();
            if psi >= 1.0 || p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let a = p * (1.0 - psi).sqrt();
            let gains = vbap_gains(field.directions()[t][k], grid)?;
            for &(l, g) in &gains.entries {
                direct[l].frames_mut()[t][k] = a * g;
            }
        }
    }
    Ok(SirrStreams { direct, diffuse })
}

/// Streams summed per loudspeaker after the inverse STFT; the diffuse part
/// of loudspeaker `l` is `decorrelate(istft(√ψ·P), seed, l)/√L`, cut to the
/// pressure length.
pub fn sirr_synthesize(
    pressure_frames: &StftFrames,
    field: &TfDoaField,
    grid: &LoudspeakerGrid,
    seed: u64,
) -> Result<VirtualLoudspeakerSignals> {
    let streams = sirr_streams(pressure_frames, field, grid)?;
    let len = pressure_frames.signal_len();
    let diffuse = istft(&streams.diffuse)?;
    let has_diffuse = diffuse.samples().iter().any(|v| *v != 0.0);
    let scale = 1.0 / (grid.len() as f64).sqrt();
    let mut channels = Vec::with_capacity(grid.len());
    for (l, frames) in streams.direct.iter().enumerate() {
        let mut out = istft(frames)?.into_samples();
        if has_diffuse {
            let d = decorrelate(&diffuse, seed, l);
            for (o, v) in out.iter_mut().zip(d.samples()) {
                *o += v * scale;
            }
        }
        channels.push(if out.iter().all(|v| *v == 0.0) { ChannelBuffer::Silent } else { ChannelBuffer::Dense(out) });
    }
    VirtualLoudspeakerSignals::new(grid.clone(), channels, len, pressure_frames.sample_rate())
}
