//! First-order (B-format) signals and pressure-gradient encoding from open
//! arrays.
//!
//! One convention is used throughout: SN3D-normalized ACN components with
//! unit directional gain, so a plane wave arriving from unit direction `u`
//! with pressure `p(t)` at the origin gives `w = p` and `(x, y, z) = u · p`.
//! Directions always point from the array toward the source.

use alloc::format;
use alloc::vec::Vec;

use crate::dsp::filters::{butterworth_highpass, Biquad, Sos};
use crate::error::{Error, Result};
use crate::geometry::array::{MicArrayGeometry, SPEED_OF_SOUND};
use crate::signal::{MonoIr, MultichannelIr};

/// High-pass corner of the gradient encoder.
pub const GRADIENT_HIGHPASS_HZ: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FoaConvention {
    /// ACN order (W, Y, Z, X stored here as w, x, y, z), SN3D, unit gain,
    /// direction toward the source.
    #[default]
    AcnSn3d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoaSignal {
    pub w: MonoIr,
    pub x: MonoIr,
    pub y: MonoIr,
    pub z: MonoIr,
    pub convention: FoaConvention,
}

impl FoaSignal {
    pub fn new(w: MonoIr, x: MonoIr, y: MonoIr, z: MonoIr) -> Result<Self> {
        for c in [&x, &y, &z] {
            if c.len() != w.len() || c.sample_rate() != w.sample_rate() {
                return Err(Error::invalid("FOA components differ in length or sample rate"));
            }
        }
        Ok(FoaSignal { w, x, y, z, convention: FoaConvention::AcnSn3d })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.w.sample_rate()
    }

    /// Components in (w, x, y, z) order.
    pub fn components(&self) -> [&MonoIr; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn scaled(&self, gain: f64) -> FoaSignal {
        FoaSignal {
            w: self.w.scaled(gain),
            x: self.x.scaled(gain),
            y: self.y.scaled(gain),
            z: self.z.scaled(gain),
            convention: self.convention,
        }
    }

    /// Four-channel container in (w, x, y, z) order.
    pub fn to_multichannel(&self) -> MultichannelIr {
        MultichannelIr::new(
            self.components().iter().map(|c| (*c).clone()).collect(),
            Some("foa".into()),
        )
        .expect("components share length and rate")
    }

    pub fn from_multichannel(ir: &MultichannelIr) -> Result<Self> {
        if ir.channel_count() != 4 {
            return Err(Error::invalid(format!(
                "FOA input needs 4 channels, found {}",
                ir.channel_count()
            )));
        }
        let c = ir.channels();
        FoaSignal::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
    }
}

pub fn encode_foa_open_array(srir: &MultichannelIr, geometry: &MicArrayGeometry) -> Result<FoaSignal> {
    encode_foa_open_array_with(srir, geometry, SPEED_OF_SOUND, GRADIENT_HIGHPASS_HZ)
}

/// Gradient encoding: `w` is the centre capsule (or the capsule mean), each
/// velocity component is `(c/d) ∫ (p₊ - p₋) dt` over the opposing pair on
/// that axis. The integrator is trapezoidal and shares a second-order
/// Butterworth high-pass with `w`; together they collapse into a single
/// section with numerator `k·[1, 0, -1]`.
pub fn encode_foa_open_array_with(
    srir: &MultichannelIr,
    geometry: &MicArrayGeometry,
    speed_of_sound: f64,
    highpass_hz: f64,
) -> Result<FoaSignal> {
    if srir.channel_count() != geometry.capsule_count() {
        return Err(Error::invalid(format!(
            "SRIR has {} channels, geometry '{}' has {} capsules",
            srir.channel_count(),
            geometry.id,
            geometry.capsule_count()
        )));
    }
    let pairs = geometry.axis_pairs().ok_or_else(|| {
        Error::UnsupportedGeometry(format!(
            "'{}' has no opposing capsule pairs on the coordinate axes",
            geometry.id
        ))
    })?;
    let fs = srir.sample_rate();
    let hp = butterworth_highpass(2, highpass_hz, fs as f64)?;
    let section = hp.sections[0];
    let t = 1.0 / fs as f64;

    let pressure = match geometry.center_index {
        Some(c) => srir.channel(c).clone(),
        None => srir.channel_average(),
    };
    let w = MonoIr::from_parts(hp.filter(pressure.samples()), fs);

    let mut velocity = [Vec::new(), Vec::new(), Vec::new()];
    for (axis, &(pos, neg)) in pairs.iter().enumerate() {
        let spacing = geometry.positions[pos].distance(geometry.positions[neg]);
        let k = section.b[0] * 0.5 * t * speed_of_sound / spacing;
        let integ = Sos { sections: alloc::vec![Biquad { b: [k, 0.0, -k], a: section.a }] };
        let diff: Vec<f64> = srir
            .channel(pos)
            .samples()
            .iter()
            .zip(srir.channel(neg).samples())
            .map(|(a, b)| a - b)
            .collect();
        velocity[axis] = integ.filter(&diff);
    }
    let [x, y, z] = velocity;
    FoaSignal::new(
        w,
        MonoIr::from_parts(x, fs),
        MonoIr::from_parts(y, fs),
        MonoIr::from_parts(z, fs),
    )
}
