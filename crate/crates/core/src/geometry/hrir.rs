//! HRIR sets and an analytic spherical-head HRIR model.
//!
//! The model is a rigid sphere of radius 8.75 cm with ears at ±Y (+Y is the
//! left ear). Each ear gets the Woodworth ray-tracing delay and a one-pole,
//! one-zero head-shadow filter `(αs + β)/(s + β)`, `β = 2c/a`, whose
//! high-frequency gain α falls from 2 facing the source to 0.1 at 150° from
//! it. Frontal sources therefore produce identical ears, and mirror-image
//! directions produce exactly swapped ears.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::dsp::filters::{Biquad, Sos};
use crate::dsp::fractional_delay::{FractionalDelay, KERNEL_TAPS};
use crate::error::{Error, Result};
use crate::geometry::array::SPEED_OF_SOUND;
use crate::geometry::grid::{az_el_directions, nearest_index};
use crate::math::Vec3;
use crate::signal::{BinauralIr, MonoIr};

pub const HEAD_RADIUS: f64 = 0.0875;
pub const DEFAULT_HRIR_LENGTH: usize = 256;
/// Grid spacing of the built-in reference set.
pub const REFERENCE_GRID_STEP_DEG: f64 = 5.0;
const ALPHA_MIN: f64 = 0.1;
const THETA_MIN: f64 = 150.0 * PI / 180.0;

/// One HRIR pair per direction, uniform length and rate.
#[derive(Debug, Clone, PartialEq)]
pub struct HrirSet {
    directions: Vec<Vec3>,
    pairs: Vec<BinauralIr>,
    sample_rate: u32,
    length: usize,
}

impl HrirSet {
    pub fn new(directions: Vec<Vec3>, pairs: Vec<BinauralIr>) -> Result<Self> {
        if directions.is_empty() || directions.len() != pairs.len() {
            return Err(Error::invalid("HRIR set needs one pair per direction"));
        }
        let sample_rate = pairs[0].sample_rate();
        let length = pairs[0].len();
        if pairs.iter().any(|p| p.sample_rate() != sample_rate || p.len() != length) {
            return Err(Error::invalid("HRIR pairs differ in length or sample rate"));
        }
        let mut dirs = Vec::with_capacity(directions.len());
        for (i, d) in directions.iter().enumerate() {
            dirs.push(d.normalized().ok_or_else(|| Error::invalid(format!("HRIR direction {i} has zero length")))?);
        }
        // Distinctness on a sorted copy keeps this near-linear for large sets.
        let mut order: Vec<usize> = (0..dirs.len()).collect();
        order.sort_by(|&a, &b| dirs[a].z.total_cmp(&dirs[b].z));
        for (w, &i) in order.iter().enumerate() {
            for &j in &order[w + 1..] {
                if dirs[j].z - dirs[i].z > 1e-9 {
                    break;
                }
                if dirs[i].angle_to(dirs[j]) < 1e-9 {
                    return Err(Error::invalid(format!("HRIR directions {i} and {j} coincide")));
                }
            }
        }
        Ok(HrirSet { directions: dirs, pairs, sample_rate, length })
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn pairs(&self) -> &[BinauralIr] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> &BinauralIr {
        &self.pairs[i]
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Index of the closest direction and its angular distance in radians.
    pub fn nearest(&self, direction: Vec3) -> (usize, f64) {
        let i = nearest_index(&self.directions, direction);
        (i, self.directions[i].angle_to(direction))
    }
}

/// Woodworth path delay relative to the head centre, seconds.
fn woodworth_delay(theta: f64) -> f64 {
    let t = HEAD_RADIUS / SPEED_OF_SOUND;
    if theta < PI / 2.0 {
        -t * theta.cos()
    } else {
        t * (theta - PI / 2.0)
    }
}

fn shadow_filter(theta: f64, fs: f64) -> Sos {
    let alpha = (1.0 + ALPHA_MIN / 2.0) + (1.0 - ALPHA_MIN / 2.0) * (PI * theta / THETA_MIN).cos();
    let beta = 2.0 * SPEED_OF_SOUND / HEAD_RADIUS;
    let k = 2.0 * fs;
    let norm = k + beta;
    Sos {
        sections: vec![Biquad {
            b: [(alpha * k + beta) / norm, (beta - alpha * k) / norm, 0.0],
            a: [(beta - k) / norm, 0.0],
        }],
    }
}

/// Samples of bulk delay common to both ears, so the earliest possible
/// arrival still has its full interpolation kernel.
pub fn model_base_delay(sample_rate: u32) -> f64 {
    KERNEL_TAPS as f64 / 2.0 + (HEAD_RADIUS / SPEED_OF_SOUND * sample_rate as f64).ceil()
}

/// Spherical-head HRIR pair for a source in `direction`.
pub fn spherical_head_hrir(direction: Vec3, sample_rate: u32, length: usize) -> Result<BinauralIr> {
    let u = direction.normalized().ok_or_else(|| Error::invalid("HRIR direction has zero length"))?;
    let fs = sample_rate as f64;
    let base = model_base_delay(sample_rate);
    if length < base as usize + KERNEL_TAPS {
        return Err(Error::invalid("HRIR length too short for the model delay"));
    }
    let fd = FractionalDelay::default();
    let ear = |axis: Vec3| {
        let theta = u.angle_to(axis);
        let mut buf = vec![0.0; length];
        fd.add_into(&mut buf, base + woodworth_delay(theta) * fs, 1.0);
        MonoIr::from_parts(shadow_filter(theta, fs).filter(&buf), sample_rate)
    };
    BinauralIr::new(ear(Vec3::new(0.0, 1.0, 0.0)), ear(Vec3::new(0.0, -1.0, 0.0)))
}

pub fn spherical_head_set(directions: &[Vec3], sample_rate: u32, length: usize) -> Result<HrirSet> {
    let pairs = directions
        .iter()
        .map(|&d| spherical_head_hrir(d, sample_rate, length))
        .collect::<Result<Vec<_>>>()?;
    HrirSet::new(directions.to_vec(), pairs)
}

/// Spherical-head set on the 5° azimuth/elevation grid.
pub fn reference_hrir_set(sample_rate: u32) -> Result<HrirSet> {
    spherical_head_set(&az_el_directions(REFERENCE_GRID_STEP_DEG)?, sample_rate, DEFAULT_HRIR_LENGTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::correlate::{correlate_slices, peak_lag};

    #[test]
    fn frontal_ears_identical() {
        let h = spherical_head_hrir(Vec3::FRONT, 48_000, 256).unwrap();
        assert_eq!(h.left().samples(), h.right().samples());
    }

    #[test]
    fn mirror_directions_swap_ears() {
        let a = spherical_head_hrir(Vec3::from_az_el_deg(30.0, 10.0), 48_000, 256).unwrap();
        let b = spherical_head_hrir(Vec3::from_az_el_deg(-30.0, 10.0), 48_000, 256).unwrap();
        for (x, y) in a.left().samples().iter().zip(b.right().samples()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn lateral_source_cues() {
        let h = spherical_head_hrir(Vec3::from_az_el_deg(90.0, 0.0), 48_000, 256).unwrap();
        assert!(h.left().energy() > 2.0 * h.right().energy());
        let corr = correlate_slices(h.left().samples(), h.right().samples(), 48);
        let lag = peak_lag(&corr, 48, true, true);
        // Right ear lags: Woodworth ITD (a/c)(π/2 + 1) ≈ 656 µs.
        let itd = lag / 48_000.0;
        assert!(itd > 500e-6 && itd < 720e-6, "{itd}");
    }

    #[test]
    fn reference_set_shape() {
        let s = reference_hrir_set(48_000).unwrap();
        assert_eq!(s.len(), 2522);
        assert_eq!(s.length(), 256);
        let (i, ang) = s.nearest(Vec3::from_az_el_deg(135.0, 45.0));
        assert!(ang < 1e-9);
        assert!(s.pair(i).left().energy() > 0.0);
    }

    #[test]
    fn duplicate_directions_rejected() {
        let h = spherical_head_hrir(Vec3::FRONT, 48_000, 256).unwrap();
        assert!(HrirSet::new(vec![Vec3::FRONT, Vec3::FRONT], vec![h.clone(), h]).is_err());
    }
}
