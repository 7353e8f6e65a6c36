//! The listening-room preset and the six tested source positions.

use alloc::format;

use num_traits::Float;

use super::render::{render_center_omni, RenderSettings};
use super::{enumerate_images, Receiver, Scene, ShoeboxRoom};
use crate::error::{Error, Result};
use crate::geometry::SPEED_OF_SOUND;
use crate::math::Vec3;
use crate::metrics::t30_mid;

pub const APL_ROOM_DIMENSIONS: [f64; 3] = [6.2, 5.6, 3.4];
/// Array centre, 1.275 m above the floor.
pub const APL_ROOM_RECEIVER: Vec3 = Vec3::new(3.0, 2.6, 1.275);
pub const APL_ROOM_MAX_ORDER: usize = 40;
pub const APL_ROOM_TARGET_T30_S: f64 = 0.25;
pub const APL_ROOM_SAMPLE_RATE: u32 = 48_000;
pub const APL_ROOM_LENGTH: usize = 24_000;
/// Uniform wall coefficient fitted by [`tune_uniform_coefficient`] to the
/// target T30 with the frontal source. Fitted, not measured.
pub const APL_ROOM_FITTED_COEFFICIENT: f64 = 0.746;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TablePosition {
    pub label: &'static str,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub distance_m: f64,
}

impl TablePosition {
    pub fn direction(&self) -> Vec3 {
        Vec3::from_az_el_deg(self.azimuth_deg, self.elevation_deg)
    }

    /// Source position relative to the preset receiver.
    pub fn source(&self) -> Vec3 {
        APL_ROOM_RECEIVER + self.direction() * self.distance_m
    }

    pub fn slug(&self) -> alloc::string::String {
        self.label.to_lowercase().replace(' ', "-")
    }
}

/// The six tested loudspeaker positions. Ear-level sources stand 2.00 m
/// from the array centre, elevated ones 1.92 m.
pub fn table_i_positions() -> [TablePosition; 6] {
    let p = |label, azimuth_deg, elevation_deg, distance_m| TablePosition { label, azimuth_deg, elevation_deg, distance_m };
    [
        p("Front center", 0.0, 0.0, 2.0),
        p("Front left", 30.0, 0.0, 2.0),
        p("Side left", 90.0, 0.0, 2.0),
        p("Back left", 135.0, 0.0, 2.0),
        p("Upper front left", 45.0, 45.0, 1.92),
        p("Upper back left", 135.0, 45.0, 1.92),
    ]
}

fn room_with(beta: f64) -> ShoeboxRoom {
    ShoeboxRoom {
        dimensions: APL_ROOM_DIMENSIONS,
        reflection_coefficients: [beta; 6],
        speed_of_sound: SPEED_OF_SOUND,
        max_order: APL_ROOM_MAX_ORDER,
    }
}

pub fn apl_room() -> ShoeboxRoom {
    room_with(APL_ROOM_FITTED_COEFFICIENT)
}

pub fn apl_room_settings() -> RenderSettings {
    RenderSettings::new(APL_ROOM_SAMPLE_RATE, APL_ROOM_LENGTH)
}

pub fn apl_room_scene(position: &TablePosition, receiver: Receiver) -> Scene {
    Scene { room: apl_room(), source: position.source(), receiver_origin: APL_ROOM_RECEIVER, receiver }
}

/// Bisects a uniform wall coefficient until the T30 of the omni response at
/// the receiver origin is within `tolerance_s` of `target_s`. Higher
/// coefficients never shorten the decay, so the search is monotone.
pub fn tune_uniform_coefficient(
    template: &Scene,
    target_s: f64,
    settings: &RenderSettings,
    tolerance_s: f64,
) -> Result<f64> {
    let t30 = |beta: f64| -> Result<f64> {
        let mut scene = template.clone();
        scene.room.reflection_coefficients = [beta; 6];
        let images = enumerate_images(&scene)?;
        t30_mid(&render_center_omni(&images, settings)?.response)
    };
    let (mut lo, mut hi) = (0.3, 0.9);
    let (t_lo, t_hi) = (t30(lo)?, t30(hi)?);
    if !(t_lo <= target_s && target_s <= t_hi) {
        return Err(Error::invalid(format!(
            "target T30 {target_s} s outside the reachable range {t_lo:.3}..{t_hi:.3} s"
        )));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let t = t30(mid)?;
        if (t - target_s).abs() <= tolerance_s {
            return Ok(mid);
        }
        if t < target_s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
