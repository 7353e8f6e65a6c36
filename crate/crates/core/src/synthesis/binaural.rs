//! Binaural rendering of virtual loudspeaker feeds through an HRIR set.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::vls::{ChannelBuffer, VirtualLoudspeakerSignals};
use crate::error::{Error, Result};
use crate::geometry::grid::LoudspeakerGrid;
use crate::geometry::hrir::HrirSet;
use crate::signal::{BinauralIr, MonoIr};

/// A loudspeaker must have an HRIR measured within this angle.
pub const HRIR_MATCH_TOLERANCE_DEG: f64 = 1.0;

/// HRIR index for every grid direction, or the loudspeakers without one.
pub fn match_hrirs(grid: &LoudspeakerGrid, hrirs: &HrirSet) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut missing = Vec::new();
    for (l, &d) in grid.directions().iter().enumerate() {
        let (i, angle) = hrirs.nearest(d);
        if angle.to_degrees() > HRIR_MATCH_TOLERANCE_DEG {
            missing.push(l);
        }
        out.push(i);
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(Error::MissingHrir { loudspeakers: missing })
    }
}

fn accumulate(out: &mut [f64], signal: &ChannelBuffer, h: &[f64]) {
    let mut add = |n: usize, v: f64| {
        if v != 0.0 {
            for (o, &x) in out[n..n + h.len()].iter_mut().zip(h) {
                *o += v * x;
            }
        }
    };
    match signal {
        ChannelBuffer::Silent => {}
        ChannelBuffer::Sparse(e) => e.iter().for_each(|&(n, v)| add(n, v)),
        ChannelBuffer::Dense(d) => d.iter().enumerate().for_each(|(n, &v)| add(n, v)),
    }
}

/// `Σ_l signal_l * hrir_l` per ear, summed in ascending loudspeaker order.
/// Direct-form accumulation keeps the result exactly shift-covariant.
pub fn binaural_render(vls: &VirtualLoudspeakerSignals, hrirs: &HrirSet) -> Result<BinauralIr> {
    if vls.sample_rate() != hrirs.sample_rate() {
        return Err(Error::invalid("loudspeaker signals and HRIRs have different sample rates"));
    }
    let matched = match_hrirs(vls.grid(), hrirs)?;
    let out_len = vls.len() + hrirs.length() - 1;
    let mut left = vec![0.0; out_len];
    let mut right = vec![0.0; out_len];
    for (l, signal) in vls.channels().iter().enumerate() {
        let pair = hrirs.pair(matched[l]);
        accumulate(&mut left, signal, pair.left().samples());
        accumulate(&mut right, signal, pair.right().samples());
    }
    let rate = vls.sample_rate();
    BinauralIr::new(MonoIr::from_parts(left, rate), MonoIr::from_parts(right, rate))
}
