//! Shoebox image-source simulator used as ground truth.
//!
//! Reflections are specular with frequency- and angle-independent wall
//! coefficients and no air absorption. Images are enumerated with the
//! Allen–Berkley lattice and rendered with 32-tap Kaiser fractional delays.

mod preset;
mod render;

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

pub use preset::{
    apl_room, apl_room_scene, apl_room_settings, table_i_positions, tune_uniform_coefficient, TablePosition,
    APL_ROOM_DIMENSIONS, APL_ROOM_FITTED_COEFFICIENT, APL_ROOM_MAX_ORDER, APL_ROOM_RECEIVER, APL_ROOM_TARGET_T30_S,
    APL_ROOM_LENGTH, APL_ROOM_SAMPLE_RATE,
};
pub use render::{
    render_array_srir, render_center_omni, PRESSURE_CUTOFF_FRACTION, render_ideal_foa, render_reference_brir, render_scene, Rendered,
    RenderSettings, SimulatedScene,
};

use crate::error::{Error, Result};
use crate::geometry::MicArrayGeometry;
use crate::math::Vec3;

/// Wall order in `reflection_coefficients`: x = 0, x = Lx, y = 0, y = Ly,
/// z = 0, z = Lz.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ShoeboxRoom {
    pub dimensions: [f64; 3],
    pub reflection_coefficients: [f64; 6],
    pub speed_of_sound: f64,
    pub max_order: usize,
}

impl ShoeboxRoom {
    pub fn validate(&self) -> Result<()> {
        if !self.dimensions.iter().all(|d| d.is_finite() && *d > 0.0) {
            return Err(Error::invalid("room dimensions must be positive"));
        }
        if !self.reflection_coefficients.iter().all(|b| (0.0..=1.0).contains(b)) {
            return Err(Error::invalid("reflection coefficients must lie in [0, 1]"));
        }
        if !(self.speed_of_sound.is_finite() && self.speed_of_sound > 0.0) {
            return Err(Error::invalid("speed of sound must be positive"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Vec3) -> bool {
        let [lx, ly, lz] = self.dimensions;
        p.x > 0.0 && p.x < lx && p.y > 0.0 && p.y < ly && p.z > 0.0 && p.z < lz
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Receiver {
    Array { geometry: MicArrayGeometry },
    Binaural,
    IdealFoa,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scene {
    pub room: ShoeboxRoom,
    pub source: Vec3,
    pub receiver_origin: Vec3,
    pub receiver: Receiver,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        self.room.validate()?;
        if !self.room.contains(self.source) {
            return Err(Error::invalid(format!("source {:?} is not strictly inside the room", self.source)));
        }
        if !self.room.contains(self.receiver_origin) {
            return Err(Error::invalid("receiver is not strictly inside the room"));
        }
        if let Receiver::Array { geometry } = &self.receiver {
            geometry.validate()?;
            if geometry.positions.iter().any(|p| !self.room.contains(self.receiver_origin + *p)) {
                return Err(Error::invalid("array capsule outside the room"));
            }
        }
        if self.source.distance(self.receiver_origin) < 1e-9 {
            return Err(Error::invalid("source coincides with the receiver"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImageSource {
    pub position: Vec3,
    /// Product of the wall coefficients met along the path.
    pub wall_gain: f64,
    /// `wall_gain / distance` at the receiver origin.
    pub amplitude: f64,
    pub delay: f64,
    /// Unit vector from the receiver origin towards the image.
    pub direction: Vec3,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImageSourceList {
    pub receiver_origin: Vec3,
    pub speed_of_sound: f64,
    /// Sorted by delay; the direct path comes first.
    pub images: Vec<ImageSource>,
}

impl ImageSourceList {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn direct(&self) -> &ImageSource {
        &self.images[0]
    }

    pub fn max_delay(&self) -> f64 {
        self.images.iter().fold(0.0, |m, i| m.max(i.delay))
    }
}

/// Per axis, the mirror index `(n, q)` gives the coordinate
/// `(1 - 2q)·s + 2nL`, after `|n - q|` hits on the low wall and `|n|` on the
/// high wall.
fn axis_images(source: f64, length: f64, max_order: usize) -> Vec<(f64, usize, usize)> {
    let k = max_order as i64;
    let mut out = Vec::new();
    for n in -k..=k {
        for q in 0..=1i64 {
            let (low, high) = ((n - q).unsigned_abs() as usize, n.unsigned_abs() as usize);
            if low + high <= max_order {
                let coord = (1 - 2 * q) as f64 * source + 2.0 * n as f64 * length;
                out.push((coord, low, high));
            }
        }
    }
    out
}

/// All images up to the room's maximum reflection order.
pub fn enumerate_images(scene: &Scene) -> Result<ImageSourceList> {
    scene.validate()?;
    let room = &scene.room;
    let beta = room.reflection_coefficients;
    let k = room.max_order;
    let ax = axis_images(scene.source.x, room.dimensions[0], k);
    let ay = axis_images(scene.source.y, room.dimensions[1], k);
    let az = axis_images(scene.source.z, room.dimensions[2], k);
    let origin = scene.receiver_origin;
    let mut images = Vec::new();
    for &(x, x0, x1) in &ax {
        let ox = x0 + x1;
        for &(y, y0, y1) in &ay {
            let oxy = ox + y0 + y1;
            if oxy > k {
                continue;
            }
            for &(z, z0, z1) in &az {
                let order = oxy + z0 + z1;
                if order > k {
                    continue;
                }
                let wall_gain = beta[0].powi(x0 as i32)
                    * beta[1].powi(x1 as i32)
                    * beta[2].powi(y0 as i32)
                    * beta[3].powi(y1 as i32)
                    * beta[4].powi(z0 as i32)
                    * beta[5].powi(z1 as i32);
                let position = Vec3::new(x, y, z);
                let rel = position - origin;
                let distance = rel.norm();
                images.push(ImageSource {
                    position,
                    wall_gain,
                    amplitude: wall_gain / distance,
                    delay: distance / room.speed_of_sound,
                    direction: rel * (1.0 / distance),
                    order,
                });
            }
        }
    }
    images.sort_by(|a, b| {
        a.delay.total_cmp(&b.delay).then(a.order.cmp(&b.order)).then_with(|| {
            let (pa, pb) = (a.position.to_array(), b.position.to_array());
            pa.iter().zip(&pb).fold(core::cmp::Ordering::Equal, |o, (u, v)| o.then(u.total_cmp(v)))
        })
    });
    Ok(ImageSourceList { receiver_origin: origin, speed_of_sound: room.speed_of_sound, images })
}

/// Number of images up to order `k`: each axis contributes one image with no
/// reflections and two with any positive count.
pub fn image_count(max_order: usize) -> usize {
    let w = |m: usize| if m == 0 { 1 } else { 2 };
    let mut total = 0;
    for a in 0..=max_order {
        for b in 0..=max_order - a {
            for c in 0..=max_order - a - b {
                total += w(a) * w(b) * w(c);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn room(order: usize, beta: f64) -> ShoeboxRoom {
        ShoeboxRoom {
            dimensions: [6.2, 5.6, 3.4],
            reflection_coefficients: [beta; 6],
            speed_of_sound: 343.0,
            max_order: order,
        }
    }

    fn scene(order: usize, beta: f64) -> Scene {
        Scene {
            room: room(order, beta),
            source: Vec3::new(5.0, 2.9, 1.5),
            receiver_origin: Vec3::new(3.0, 2.6, 1.275),
            receiver: Receiver::IdealFoa,
        }
    }

    #[test]
    fn order_zero_is_direct_only() {
        let s = scene(0, 0.8);
        let list = enumerate_images(&s).unwrap();
        assert_eq!(list.len(), 1);
        let r = s.source.distance(s.receiver_origin);
        let d = list.direct();
        assert_eq!(d.order, 0);
        assert!((d.delay - r / 343.0).abs() < 1e-15 && (d.amplitude - 1.0 / r).abs() < 1e-15);
    }

    #[test]
    fn first_order_mirrors() {
        let s = scene(1, 0.8);
        let list = enumerate_images(&s).unwrap();
        assert_eq!(list.len(), 7);
        let (x, y, z) = (5.0, 2.9, 1.5);
        let expect = [
            Vec3::new(-x, y, z),
            Vec3::new(2.0 * 6.2 - x, y, z),
            Vec3::new(x, -y, z),
            Vec3::new(x, 2.0 * 5.6 - y, z),
            Vec3::new(x, y, -z),
            Vec3::new(x, y, 2.0 * 3.4 - z),
        ];
        for e in expect {
            let hit = list.images.iter().find(|i| i.position.distance(e) < 1e-12).expect("mirror missing");
            assert_eq!(hit.order, 1);
            assert!((hit.wall_gain - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coefficients_leave_direct_only() {
        let list = enumerate_images(&scene(3, 0.0)).unwrap();
        let nonzero: Vec<_> = list.images.iter().filter(|i| i.amplitude != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].order, 0);
    }

    #[test]
    fn counts_match_brute_force() {
        for k in 0..=3 {
            // Brute force over every lattice entry of all three axes.
            let mut brute = 0;
            for nx in -3i64..=3 {
                for qx in 0..=1i64 {
                    for ny in -3i64..=3 {
                        for qy in 0..=1i64 {
                            for nz in -3i64..=3 {
                                for qz in 0..=1i64 {
                                    let o = |n: i64, q: i64| (n - q).abs() + n.abs();
                                    if o(nx, qx) + o(ny, qy) + o(nz, qz) <= k as i64 {
                                        brute += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            assert_eq!(image_count(k), brute);
            assert_eq!(enumerate_images(&scene(k, 0.9)).unwrap().len(), brute);
        }
    }

    #[test]
    fn sorted_and_direct_strongest() {
        let list = enumerate_images(&scene(6, 1.0)).unwrap();
        assert!(list.images.windows(2).all(|w| w[0].delay < w[1].delay));
        let d = list.direct();
        assert_eq!(d.order, 0);
        assert!(list.images[1..].iter().all(|i| i.amplitude < d.amplitude));
        assert!(list.images.iter().all(|i| (i.direction.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn invalid_scenes() {
        let mut s = scene(1, 0.5);
        s.source = Vec3::new(0.0, 2.0, 1.0);
        assert!(matches!(enumerate_images(&s), Err(Error::InvalidArgument(_))));
        let mut s = scene(1, 0.5);
        s.room.reflection_coefficients[2] = 1.5;
        assert!(enumerate_images(&s).is_err());
        let mut s = scene(1, 0.5);
        s.source = s.receiver_origin;
        assert!(enumerate_images(&s).is_err());
        let _ = vec![0];
    }
}
