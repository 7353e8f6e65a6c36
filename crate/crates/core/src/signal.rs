//! Sampled impulse-response containers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sum_squares;

/// A single-channel impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoIr {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl MonoIr {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("impulse response must hold at least one sample"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(MonoIr { samples, sample_rate })
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Result<Self> {
        MonoIr::new(vec![0.0; len], sample_rate)
    }

    /// Unit impulse at `index`.
    pub fn impulse(len: usize, index: usize, sample_rate: u32) -> Result<Self> {
        if index >= len {
            return Err(Error::invalid("impulse index outside the response"));
        }
        let mut s = vec![0.0; len];
        s[index] = 1.0;
        MonoIr::new(s, sample_rate)
    }

    // Internal constructor for buffers that are finite by construction.
    pub(crate) fn from_parts(samples: Vec<f64>, sample_rate: u32) -> Self {
        debug_assert!(!samples.is_empty() && sample_rate > 0);
        MonoIr { samples, sample_rate }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn energy(&self) -> f64 {
        sum_squares(&self.samples)
    }

    pub fn scaled(&self, gain: f64) -> MonoIr {
        MonoIr::from_parts(self.samples.iter().map(|v| v * gain).collect(), self.sample_rate)
    }

    /// Copy of `[start, start + len)`, zero-padded past the end.
    pub fn segment(&self, start: usize, len: usize) -> Result<MonoIr> {
        if len == 0 {
            return Err(Error::invalid("segment length must be positive"));
        }
        let mut out = vec![0.0; len];
        for (i, o) in out.iter_mut().enumerate() {
            if let Some(v) = self.samples.get(start + i) {
                *o = *v;
            }
        }
        Ok(MonoIr::from_parts(out, self.sample_rate))
    }

    /// Response truncated or zero-padded to `len` samples.
    pub fn resized(&self, len: usize) -> Result<MonoIr> {
        self.segment(0, len)
    }
}

/// One impulse response per microphone capsule.
#[derive(Debug, Clone, PartialEq)]
pub struct MultichannelIr {
    channels: Vec<MonoIr>,
    geometry_id: Option<String>,
}

impl MultichannelIr {
    pub fn new(channels: Vec<MonoIr>, geometry_id: Option<String>) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::invalid("at least one channel is required"))?;
        let (len, rate) = (first.len(), first.sample_rate());
        if channels.iter().any(|c| c.len() != len || c.sample_rate() != rate) {
            return Err(Error::invalid("channels must share length and sample rate"));
        }
        Ok(MultichannelIr { channels, geometry_id })
    }

    pub fn channels(&self) -> &[MonoIr] {
        &self.channels
    }

    pub fn channel(&self, i: usize) -> &MonoIr {
        &self.channels[i]
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn geometry_id(&self) -> Option<&str> {
        self.geometry_id.as_deref()
    }

    pub fn sample_rate(&self) -> u32 {
        self.channels[0].sample_rate()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample-wise mean over all channels.
    pub fn channel_average(&self) -> MonoIr {
        let n = self.channels.len() as f64;
        let mut out = vec![0.0; self.len()];
        for ch in &self.channels {
            for (o, v) in out.iter_mut().zip(ch.samples()) {
                *o += v;
            }
        }
        for o in &mut out {
            *o /= n;
        }
        MonoIr::from_parts(out, self.sample_rate())
    }

    pub fn scaled(&self, gain: f64) -> MultichannelIr {
        MultichannelIr {
            channels: self.channels.iter().map(|c| c.scaled(gain)).collect(),
            geometry_id: self.geometry_id.clone(),
        }
    }
}

/// Left/right impulse response pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BinauralIr {
    left: MonoIr,
    right: MonoIr,
}

impl BinauralIr {
    pub fn new(left: MonoIr, right: MonoIr) -> Result<Self> {
        if left.len() != right.len() || left.sample_rate() != right.sample_rate() {
            return Err(Error::invalid("binaural channels must share length and sample rate"));
        }
        Ok(BinauralIr { left, right })
    }

    pub fn left(&self) -> &MonoIr {
        &self.left
    }

    pub fn right(&self) -> &MonoIr {
        &self.right
    }

    pub fn sample_rate(&self) -> u32 {
        self.left.sample_rate()
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scaled(&self, gain: f64) -> BinauralIr {
        BinauralIr { left: self.left.scaled(gain), right: self.right.scaled(gain) }
    }

    /// Left and right exchanged.
    pub fn swapped(&self) -> BinauralIr {
        BinauralIr { left: self.right.clone(), right: self.left.clone() }
    }

    pub fn segment(&self, start: usize, len: usize) -> Result<BinauralIr> {
        BinauralIr::new(self.left.segment(start, len)?, self.right.segment(start, len)?)
    }

    pub fn into_parts(self) -> (MonoIr, MonoIr) {
        (self.left, self.right)
    }
}
