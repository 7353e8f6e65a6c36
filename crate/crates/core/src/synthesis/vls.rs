//! Virtual loudspeaker signal container.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::grid::LoudspeakerGrid;
use crate::signal::MonoIr;

/// One loudspeaker feed. SDM feeds on dense grids are mostly empty, so
/// they are kept as sorted `(sample, value)` lists.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelBuffer {
    Silent,
    Sparse(Vec<(usize, f64)>),
    Dense(Vec<f64>),
}

impl ChannelBuffer {
    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        match self {
            ChannelBuffer::Silent => vec![0.0; len],
            ChannelBuffer::Sparse(e) => {
                let mut out = vec![0.0; len];
                for &(i, v) in e {
                    out[i] += v;
                }
                out
            }
            ChannelBuffer::Dense(d) => d.clone(),
        }
    }

    pub fn energy(&self) -> f64 {
        match self {
            ChannelBuffer::Silent => 0.0,
            ChannelBuffer::Sparse(e) => e.iter().map(|x| x.1 * x.1).sum(),
            ChannelBuffer::Dense(d) => d.iter().map(|x| x * x).sum(),
        }
    }

    pub fn is_silent(&self) -> bool {
        match self {
            ChannelBuffer::Silent => true,
            ChannelBuffer::Sparse(e) => e.iter().all(|x| x.1 == 0.0),
            ChannelBuffer::Dense(d) => d.iter().all(|x| *x == 0.0),
        }
    }
}

/// One signal per grid direction, uniform length and rate.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualLoudspeakerSignals {
    grid: LoudspeakerGrid,
    channels: Vec<ChannelBuffer>,
    len: usize,
    sample_rate: u32,
}

impl VirtualLoudspeakerSignals {
    pub fn new(grid: LoudspeakerGrid, channels: Vec<ChannelBuffer>, len: usize, sample_rate: u32) -> Result<Self> {
        if channels.len() != grid.len() {
            return Err(Error::invalid("one signal per loudspeaker required"));
        }
        if len == 0 || sample_rate == 0 {
            return Err(Error::invalid("loudspeaker signals need a length and a sample rate"));
        }
        for c in &channels {
            let ok = match c {
                ChannelBuffer::Silent => true,
                ChannelBuffer::Sparse(e) => {
                    e.windows(2).all(|w| w[0].0 < w[1].0) && e.last().map_or(true, |x| x.0 < len)
                        && e.iter().all(|x| x.1.is_finite())
                }
                ChannelBuffer::Dense(d) => d.len() == len && d.iter().all(|x| x.is_finite()),
            };
            if !ok {
                return Err(Error::invalid("loudspeaker signal does not match the common length"));
            }
        }
        Ok(VirtualLoudspeakerSignals { grid, channels, len, sample_rate })
    }

    /// Dense signals, one per loudspeaker.
    pub fn from_signals(grid: LoudspeakerGrid, signals: Vec<MonoIr>) -> Result<Self> {
        let first = signals.first().ok_or_else(|| Error::invalid("no loudspeaker signals"))?;
        let (len, rate) = (first.len(), first.sample_rate());
        if signals.iter().any(|s| s.len() != len || s.sample_rate() != rate) {
            return Err(Error::invalid("loudspeaker signals differ in length or rate"));
        }
        let channels = signals.into_iter().map(|s| ChannelBuffer::Dense(s.into_samples())).collect();
        VirtualLoudspeakerSignals::new(grid, channels, len, rate)
    }

    pub fn grid(&self) -> &LoudspeakerGrid {
        &self.grid
    }

    pub fn channels(&self) -> &[ChannelBuffer] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn signal(&self, i: usize) -> MonoIr {
        MonoIr::from_parts(self.channels[i].to_dense(self.len), self.sample_rate)
    }

    pub fn total_energy(&self) -> f64 {
        self.channels.iter().map(|c| c.energy()).sum()
    }

    /// Sample-wise sum of two signal sets on the same grid.
    pub fn add(&self, other: &VirtualLoudspeakerSignals) -> Result<VirtualLoudspeakerSignals> {
        if self.grid != other.grid || self.len != other.len || self.sample_rate != other.sample_rate {
            return Err(Error::invalid("loudspeaker signal sets are not compatible"));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| {
                let mut d = a.to_dense(self.len);
                for (x, y) in d.iter_mut().zip(b.to_dense(self.len)) {
                    *x += y;
                }
                ChannelBuffer::Dense(d)
            })
            .collect();
        Ok(VirtualLoudspeakerSignals { grid: self.grid.clone(), channels, len: self.len, sample_rate: self.sample_rate })
    }

    /// All signals delayed by `m` samples, length grown by `m`.
    pub fn delayed(&self, m: usize) -> VirtualLoudspeakerSignals {
        let channels = self
            .channels
            .iter()
            .map(|c| match c {
                ChannelBuffer::Silent => ChannelBuffer::Silent,
                ChannelBuffer::Sparse(e) => ChannelBuffer::Sparse(e.iter().map(|&(i, v)| (i + m, v)).collect()),
                ChannelBuffer::Dense(d) => {
                    let mut out = vec![0.0; m];
                    out.extend_from_slice(d);
                    ChannelBuffer::Dense(out)
                }
            })
            .collect();
        VirtualLoudspeakerSignals { grid: self.grid.clone(), channels, len: self.len + m, sample_rate: self.sample_rate }
    }
}
