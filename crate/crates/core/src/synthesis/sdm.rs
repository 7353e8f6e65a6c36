//! Spatial decomposition: every pressure sample is a broadband image source
//! reproduced from the loudspeaker(s) nearest its direction.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::vls::{ChannelBuffer, VirtualLoudspeakerSignals};
use crate::doa::DoaTrajectory;
use crate::error::{Error, Result};
use crate::geometry::grid::{nearest_in, nearest_index, LoudspeakerGrid};
use crate::math::Vec3;
use crate::signal::MonoIr;

/// With `k = 1` each sample goes whole to the nearest loudspeaker. With
/// `k > 1` it is split over the `k` nearest with amplitude weights
/// proportional to inverse angular distance, normalized to unit energy; a
/// direction that hits a loudspeaker exactly takes it alone. Samples without
/// a valid direction reuse the last valid assignment, or the loudspeaker
/// nearest the frontal direction before any valid sample.
pub fn sdm_synthesize(
    pressure: &MonoIr,
    trajectory: &DoaTrajectory,
    grid: &LoudspeakerGrid,
    k: usize,
) -> Result<VirtualLoudspeakerSignals> {
    if trajectory.len() != pressure.len() {
        return Err(Error::invalid("trajectory and pressure lengths differ"));
    }
    if k == 0 || k > grid.len() {
        return Err(Error::invalid("k must lie in 1..=grid size"));
    }
    let dirs = grid.directions();
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); grid.len()];
    let frontal: Vec<(usize, f64)> = assignment(dirs, Vec3::FRONT, k)?;
    let mut current = frontal;
    for (n, &p) in pressure.samples().iter().enumerate() {
        if let Some(d) = trajectory.direction(n) {
            current = assignment(dirs, d, k)?;
        }
        if p == 0.0 {
            continue;
        }
        for &(l, w) in &current {
            entries[l].push((n, if k == 1 { p } else { p * w }));
        }
    }
    let channels = entries
        .into_iter()
        .map(|e| if e.is_empty() { ChannelBuffer::Silent } else { ChannelBuffer::Sparse(e) })
        .collect();
    VirtualLoudspeakerSignals::new(grid.clone(), channels, pressure.len(), pressure.sample_rate())
}

fn assignment(dirs: &[Vec3], d: Vec3, k: usize) -> Result<Vec<(usize, f64)>> {
    if k == 1 {
        return Ok(vec![(nearest_index(dirs, d), 1.0)]);
    }
    let idx = nearest_in(dirs, d, k)?;
    let angles: Vec<f64> = idx.iter().map(|&i| dirs[i].angle_to(d)).collect();
    if angles[0] < 1e-12 {
        return Ok(vec![(idx[0], 1.0)]);
    }
    let raw: Vec<f64> = angles.iter().map(|a| 1.0 / a).collect();
    let norm = raw.iter().map(|w| w * w).sum::<f64>().sqrt();
    Ok(idx.into_iter().zip(raw).map(|(i, w)| (i, w / norm)).collect())
}
