//! Microphone array definitions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::Vec3;

/// Speed of sound used by built-in geometries and defaults, m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

/// Capsule layout of an open microphone array, array-centred, in metres.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MicArrayGeometry {
    pub id: String,
    pub positions: Vec<Vec3>,
    pub labels: Vec<String>,
    pub center_index: Option<usize>,
    pub aliasing_frequency: f64,
}

impl MicArrayGeometry {
    pub fn new(
        id: impl Into<String>,
        positions: Vec<Vec3>,
        labels: Vec<String>,
        center_index: Option<usize>,
        aliasing_frequency: f64,
    ) -> Result<Self> {
        let g = MicArrayGeometry { id: id.into(), positions, labels, center_index, aliasing_frequency };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        if n == 0 {
            return Err(Error::invalid("array has no capsules"));
        }
        if self.labels.len() != n {
            return Err(Error::invalid("one label per capsule required"));
        }
        if self.positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("capsule position is not finite"));
        }
        if !(self.aliasing_frequency > 0.0) {
            return Err(Error::invalid("aliasing frequency must be positive"));
        }
        if let Some(c) = self.center_index {
            if c >= n {
                return Err(Error::invalid("center capsule index out of range"));
            }
        }
        let centroid = self.centroid();
        if centroid.norm() > 1e-3 {
            return Err(Error::invalid(format!(
                "array centroid is {:.2} mm from the origin",
                centroid.norm() * 1e3
            )));
        }
        Ok(())
    }

    pub fn capsule_count(&self) -> usize {
        self.positions.len()
    }

    pub fn centroid(&self) -> Vec3 {
        let sum = self.positions.iter().fold(Vec3::ZERO, |a, &p| a + p);
        sum * (1.0 / self.positions.len() as f64)
    }

    /// True when the capsules span all three dimensions.
    pub fn is_three_dimensional(&self) -> bool {
        if self.positions.len() < 4 {
            return false;
        }
        let p0 = self.positions[0];
        let scale = self.positions.iter().map(|p| p.distance(p0)).fold(0.0, f64::max);
        if scale == 0.0 {
            return false;
        }
        let diffs: Vec<Vec3> = self.positions[1..].iter().map(|&p| (p - p0) * (1.0 / scale)).collect();
        (0..diffs.len()).any(|i| {
            (i + 1..diffs.len()).any(|j| {
                let c = diffs[i].cross(diffs[j]);
                diffs[j + 1..].iter().any(|d| c.dot(*d).abs() > 1e-9)
            })
        })
    }

    /// Opposing capsule pairs `(positive, negative)` on the X, Y and Z axes.
    pub fn axis_pairs(&self) -> Option<[(usize, usize); 3]> {
        let axes = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)];
        let mut out = [(0, 0); 3];
        for (a, axis) in axes.iter().enumerate() {
            let on_axis = |p: Vec3, sign: f64| {
                let r = p.norm();
                r > 0.0 && (p * (1.0 / r) - *axis * sign).norm() < 1e-9
            };
            let pos = self.positions.iter().position(|&p| on_axis(p, 1.0))?;
            let neg = self
                .positions
                .iter()
                .position(|&p| on_axis(p, -1.0) && (p + self.positions[pos]).norm() < 1e-9)?;
            out[a] = (pos, neg);
        }
        Some(out)
    }
}

/// Built-in arrays: `om6` (six omnis 100 mm apart on the axes) and
/// `sphere32` (32 near-uniform capsules at 42 mm radius, open-array model).
pub fn builtin_array(name: &str) -> Result<MicArrayGeometry> {
    match name {
        "om6" => {
            let d = 0.05;
            let positions = alloc::vec![
                Vec3::new(d, 0.0, 0.0),
                Vec3::new(-d, 0.0, 0.0),
                Vec3::new(0.0, d, 0.0),
                Vec3::new(0.0, -d, 0.0),
                Vec3::new(0.0, 0.0, d),
                Vec3::new(0.0, 0.0, -d),
            ];
            let labels = ["+X", "-X", "+Y", "-Y", "+Z", "-Z"].iter().map(|s| s.to_string()).collect();
            MicArrayGeometry::new("om6", positions, labels, None, 2400.0)
        }
        "sphere32" => {
            let radius = 0.042;
            let positions: Vec<Vec3> = icosahedron_dodecahedron()
                .into_iter()
                .map(|p| p.normalized().unwrap_or(Vec3::FRONT) * radius)
                .collect();
            let labels = (1..=positions.len()).map(|i| format!("c{i:02}")).collect();
            // First-order-per-ka rule of thumb with four orders.
            let aliasing = 4.0 * SPEED_OF_SOUND / (2.0 * PI * radius);
            MicArrayGeometry::new("sphere32", positions, labels, None, aliasing)
        }
        other => Err(Error::NotFound(format!("built-in array '{other}'"))),
    }
}

/// The 12 icosahedron vertices followed by the 20 dodecahedron vertices
/// (face centres of the icosahedron), unnormalized.
fn icosahedron_dodecahedron() -> Vec<Vec3> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut pts = Vec::with_capacity(32);
    for &a in &[1.0, -1.0] {
        for &b in &[phi, -phi] {
            pts.push(Vec3::new(0.0, a, b));
            pts.push(Vec3::new(a, b, 0.0));
            pts.push(Vec3::new(b, 0.0, a));
        }
    }
    for &a in &[1.0, -1.0] {
        for &b in &[1.0, -1.0] {
            for &c in &[1.0, -1.0] {
                pts.push(Vec3::new(a, b, c));
            }
        }
    }
    let inv = 1.0 / phi;
    for &a in &[phi, -phi] {
        for &b in &[inv, -inv] {
            pts.push(Vec3::new(0.0, a, b));
            pts.push(Vec3::new(a, b, 0.0));
            pts.push(Vec3::new(b, 0.0, a));
        }
    }
    pts
}
