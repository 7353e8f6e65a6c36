//! Direction-of-arrival analysis.
//!
//! Directions are unit vectors from the receiver toward the sound event.
//! Samples or bins where no direction can be estimated are masked, never
//! fabricated.

use alloc::vec::Vec;

use crate::dsp::correlate::Weighting;
use crate::error::{Error, Result};
use crate::math::Vec3;

mod piv;
mod smooth;
mod tdoa;

pub use piv::{piv_broadband_doa, tf_piv_analysis, tf_piv_analysis_with, TfDoaField, DEFAULT_TF_AVERAGING};
pub use smooth::smooth_doa;
pub use tdoa::tdoa_ls_doa;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DoaConfig {
    /// Analysis window, samples.
    pub window_size: usize,
    pub band_low: f64,
    pub band_high: f64,
    pub speed_of_sound: f64,
    /// Intensity smoothing length for broadband PIV, samples.
    pub smoothing_window: usize,
    pub weighting: Weighting,
    /// Parabolic sub-sample refinement of GCC peaks.
    pub refine: bool,
}

impl Default for DoaConfig {
    fn default() -> Self {
        DoaConfig {
            window_size: 64,
            band_low: 200.0,
            band_high: 2400.0,
            speed_of_sound: 343.0,
            smoothing_window: 64,
            weighting: Weighting::None,
            refine: true,
        }
    }
}

impl DoaConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        if self.window_size < 8 {
            return Err(Error::invalid("DOA window must be at least 8 samples"));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.band_low > 0.0 && self.band_low < self.band_high && self.band_high < nyquist) {
            return Err(Error::invalid("DOA band must satisfy 0 < low < high < Nyquist"));
        }
        if !(self.speed_of_sound > 0.0) {
            return Err(Error::invalid("speed of sound must be positive"));
        }
        if self.smoothing_window == 0 {
            return Err(Error::invalid("smoothing window must be at least one sample"));
        }
        Ok(())
    }
}

/// Per-sample directions aligned with a pressure signal.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaTrajectory {
    directions: Vec<Vec3>,
    valid: Vec<bool>,
}

impl DoaTrajectory {
    /// Valid entries must be unit vectors; invalid entries are stored as zero.
    pub fn new(directions: Vec<Vec3>, valid: Vec<bool>) -> Result<Self> {
        if directions.len() != valid.len() {
            return Err(Error::invalid("direction and mask lengths differ"));
        }
        let mut directions = directions;
        for (d, &v) in directions.iter_mut().zip(&valid) {
            if v {
                if !d.is_finite() || (d.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid("valid DOA entries must be unit vectors"));
                }
            } else {
                *d = Vec3::ZERO;
            }
        }
        Ok(DoaTrajectory { directions, valid })
    }

    pub fn constant(direction: Vec3, len: usize) -> Result<Self> {
        let d = direction.normalized().ok_or_else(|| Error::invalid("zero direction"))?;
        DoaTrajectory::new(alloc::vec![d; len], alloc::vec![true; len])
    }

    pub(crate) fn from_parts(directions: Vec<Vec3>, valid: Vec<bool>) -> Self {
        DoaTrajectory { directions, valid }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, n: usize) -> Option<Vec3> {
        self.valid[n].then(|| self.directions[n])
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

/// Normalizes `v`, masking zero or non-finite vectors.
pub(crate) fn unit_or_masked(v: Vec3) -> (Vec3, bool) {
    match v.normalized() {
        Some(u) if u.is_finite() => (u, true),
        _ => (Vec3::ZERO, false),
    }
}
