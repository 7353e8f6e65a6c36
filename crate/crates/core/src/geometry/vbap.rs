//! Vector base amplitude panning over a triangulated loudspeaker grid.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::grid::{nearest_index, LoudspeakerGrid};
use crate::math::Vec3;

/// Gains below this are treated as lying outside the triangle.
const OUTSIDE: f64 = -1e-6;
/// Triangles with a smaller basis determinant cannot be inverted reliably.
const MIN_DETERMINANT: f64 = 1e-12;

/// Non-negative gains on at most three loudspeakers, unit Euclidean norm,
/// sorted by loudspeaker index.
#[derive(Debug, Clone, PartialEq)]
pub struct VbapGains {
    pub entries: Vec<(usize, f64)>,
}

impl VbapGains {
    pub fn gain(&self, loudspeaker: usize) -> f64 {
        self.entries.iter().find(|e| e.0 == loudspeaker).map_or(0.0, |e| e.1)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }
}

fn triangle_gains(grid: &LoudspeakerGrid, t: usize, direction: Vec3) -> Result<Vec3> {
    let basis = grid.basis(t);
    if basis.determinant().abs() < MIN_DETERMINANT {
        return Err(Error::NumericalDegeneracy { triangle: grid.triangles()[t] });
    }
    let inv = basis.inverse().ok_or(Error::NumericalDegeneracy { triangle: grid.triangles()[t] })?;
    Ok(inv.mul_vec(direction))
}

fn min3(g: Vec3) -> f64 {
    g.x.min(g.y).min(g.z)
}

pub fn vbap_gains(direction: Vec3, grid: &LoudspeakerGrid) -> Result<VbapGains> {
    let direction = direction
        .normalized()
        .ok_or_else(|| Error::invalid("panning direction has zero length"))?;
    // Triangles around the nearest loudspeaker first, then the whole hull.
    let near = nearest_index(grid.directions(), direction);
    let mut best: Option<(usize, Vec3)> = None;
    let consider = |best: &mut Option<(usize, Vec3)>, t: usize| -> Result<()> {
        let g = triangle_gains(grid, t, direction)?;
        if best.map_or(true, |(_, b)| min3(g) > min3(b)) {
            *best = Some((t, g));
        }
        Ok(())
    };
    for &t in grid.triangles_at(near) {
        consider(&mut best, t)?;
    }
    if best.map_or(true, |(_, g)| min3(g) < OUTSIDE) {
        for t in 0..grid.triangles().len() {
            consider(&mut best, t)?;
        }
    }
    let (t, g) = best.ok_or_else(|| Error::invalid("grid has no triangles"))?;
    if min3(g) < OUTSIDE {
        return Err(Error::NumericalDegeneracy { triangle: grid.triangles()[t] });
    }
    let tri = grid.triangles()[t];
    let raw = [g.x.max(0.0), g.y.max(0.0), g.z.max(0.0)];
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::NumericalDegeneracy { triangle: tri });
    }
    let mut entries: Vec<(usize, f64)> = tri
        .iter()
        .zip(raw)
        .filter(|(_, v)| *v > 0.0)
        .map(|(&i, v)| (i, v / norm))
        .collect();
    entries.sort_by_key(|e| e.0);
    Ok(VbapGains { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::fibonacci_grid;
    use crate::math::Mat3;
    use proptest::prelude::*;

    #[test]
    fn vertex_direction_selects_one_loudspeaker() {
        let g = fibonacci_grid(40).unwrap();
        for j in [0, 13, 39] {
            let gains = vbap_gains(g.directions()[j], &g).unwrap();
            assert!((gains.gain(j) - 1.0).abs() < 1e-9);
            for &(i, v) in &gains.entries {
                if i != j {
                    assert!(v < 1e-9);
                }
            }
        }
    }

    #[test]
    fn edge_midpoint_splits_equally() {
        let g = fibonacci_grid(40).unwrap();
        let [a, b, _] = g.triangles()[5];
        let mid = (g.directions()[a] + g.directions()[b]).normalized().unwrap();
        let gains = vbap_gains(mid, &g).unwrap();
        assert!((gains.gain(a) - gains.gain(b)).abs() < 1e-9);
        assert!((gains.gain(a) - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn matches_direct_solve() {
        let g = fibonacci_grid(30).unwrap();
        for t in [0, 7, 20] {
            let [a, b, c] = g.triangles()[t];
            let (da, db, dc) = (g.directions()[a], g.directions()[b], g.directions()[c]);
            let d = (da * 0.5 + db * 0.3 + dc * 0.2).normalized().unwrap();
            // Cramer's rule as the independent solve.
            let det = da.dot(db.cross(dc));
            let ga = d.dot(db.cross(dc)) / det;
            let gb = da.dot(d.cross(dc)) / det;
            let gc = da.dot(db.cross(d)) / det;
            let n = (ga * ga + gb * gb + gc * gc).sqrt();
            let gains = vbap_gains(d, &g).unwrap();
            assert!((gains.gain(a) - ga / n).abs() < 1e-9);
            assert!((gains.gain(b) - gb / n).abs() < 1e-9);
            assert!((gains.gain(c) - gc / n).abs() < 1e-9);
        }
    }

    fn unit(az: f64, el: f64) -> Vec3 {
        Vec3::from_az_el_deg(az, el)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn gains_nonnegative_unit_norm_and_reconstruct(az in -180.0f64..180.0, el in -89.9f64..89.9) {
            let g = fibonacci_grid(48).unwrap();
            let d = unit(az, el);
            let gains = vbap_gains(d, &g).unwrap();
            prop_assert!(gains.entries.len() <= 3);
            prop_assert!(gains.entries.iter().all(|e| e.1 >= 0.0));
            prop_assert!((gains.norm() - 1.0).abs() < 1e-9);
            let r = gains.entries.iter().fold(Vec3::ZERO, |acc, &(i, v)| acc + g.directions()[i] * v);
            prop_assert!(r.normalized().unwrap().angle_to(d) < 1e-6);
        }

        #[test]
        fn rotation_consistent(az in -180.0f64..180.0, el in -80.0f64..80.0,
                               ax in -180.0f64..180.0, ay in -80.0f64..80.0, angle in 0.0f64..core::f64::consts::TAU) {
            let g = fibonacci_grid(36).unwrap();
            let rot = Mat3::rotation(unit(ax, ay), angle);
            let gr = g.rotated(&rot);
            let d = unit(az, el);
            let a = vbap_gains(d, &g).unwrap();
            let b = vbap_gains(rot.mul_vec(d), &gr).unwrap();
            for i in 0..g.len() {
                prop_assert!((a.gain(i) - b.gain(i)).abs() < 1e-9);
            }
        }

        #[test]
        fn nearest_commutes_with_rotation(az in -180.0f64..180.0, el in -80.0f64..80.0,
                                          ax in -180.0f64..180.0, ay in -80.0f64..80.0, angle in 0.0f64..core::f64::consts::TAU) {
            let g = fibonacci_grid(36).unwrap();
            let rot = Mat3::rotation(unit(ax, ay), angle);
            let gr = g.rotated(&rot);
            let d = unit(az, el);
            let a = crate::geometry::grid::nearest_direction(d, &g, 1).unwrap();
            let b = crate::geometry::grid::nearest_direction(rot.mul_vec(d), &gr, 1).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
