//! Virtual loudspeaker grids: direction sets with a convex-hull
//! triangulation, generators and nearest-direction queries.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{Mat3, Vec3};

/// Directions on the unit sphere with the triangles of their convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct LoudspeakerGrid {
    directions: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    vertex_triangles: Vec<Vec<usize>>,
}

impl LoudspeakerGrid {
    /// Normalizes the directions and triangulates their convex hull.
    pub fn from_directions(directions: Vec<Vec3>) -> Result<Self> {
        if directions.len() < 4 {
            return Err(Error::invalid("a loudspeaker grid needs at least 4 directions"));
        }
        let mut dirs = Vec::with_capacity(directions.len());
        for (i, d) in directions.iter().enumerate() {
            let u = d
                .normalized()
                .ok_or_else(|| Error::invalid(format!("direction {i} has zero length")))?;
            dirs.push(u);
        }
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                if dirs[i].angle_to(dirs[j]) < 1e-9 {
                    return Err(Error::invalid(format!("directions {i} and {j} coincide")));
                }
            }
        }
        let triangles = sphere_hull(&dirs)?;
        let mut vertex_triangles = vec![Vec::new(); dirs.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }
        Ok(LoudspeakerGrid { directions: dirs, triangles, vertex_triangles })
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Triangles sharing vertex `v`.
    pub fn triangles_at(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Basis matrix whose columns are the triangle's directions.
    pub fn basis(&self, t: usize) -> Mat3 {
        let [a, b, c] = self.triangles[t];
        Mat3::from_columns(self.directions[a], self.directions[b], self.directions[c])
    }

    /// The same grid with every direction rotated.
    pub fn rotated(&self, rotation: &Mat3) -> LoudspeakerGrid {
        LoudspeakerGrid {
            directions: self.directions.iter().map(|&d| rotation.mul_vec(d)).collect(),
            triangles: self.triangles.clone(),
            vertex_triangles: self.vertex_triangles.clone(),
        }
    }
}

/// Golden-angle spiral of `n` near-uniform directions.
pub fn fibonacci_grid(n: usize) -> Result<LoudspeakerGrid> {
    if n < 4 {
        return Err(Error::invalid("fibonacci grid needs at least 4 points"));
    }
    let golden = PI * (3.0 - 5.0f64.sqrt());
    let dirs = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect();
    LoudspeakerGrid::from_directions(dirs)
}

/// Regular azimuth/elevation directions with `step_deg` spacing on both
/// axes, poles included once. Azimuth runs counter-clockwise from +X.
pub fn az_el_directions(step_deg: f64) -> Result<Vec<Vec3>> {
    let rings = (180.0 / step_deg).round() as i64;
    let per_ring = (360.0 / step_deg).round() as i64;
    if !(step_deg > 0.0) || rings < 2 || (rings as f64 * step_deg - 180.0).abs() > 1e-9 {
        return Err(Error::invalid("elevation step must divide 180 degrees"));
    }
    if (per_ring as f64 * step_deg - 360.0).abs() > 1e-9 {
        return Err(Error::invalid("azimuth step must divide 360 degrees"));
    }
    let mut dirs = vec![Vec3::new(0.0, 0.0, -1.0)];
    for r in 1..rings {
        let el = -90.0 + r as f64 * step_deg;
        for a in 0..per_ring {
            dirs.push(Vec3::from_az_el_deg(a as f64 * step_deg, el));
        }
    }
    dirs.push(Vec3::new(0.0, 0.0, 1.0));
    Ok(dirs)
}

pub fn az_el_grid(step_deg: f64) -> Result<LoudspeakerGrid> {
    LoudspeakerGrid::from_directions(az_el_directions(step_deg)?)
}

pub fn nearest_direction(direction: Vec3, grid: &LoudspeakerGrid, k: usize) -> Result<Vec<usize>> {
    nearest_in(grid.directions(), direction, k)
}

/// Indices of the `k` directions closest in angle, ties broken by index.
pub fn nearest_in(directions: &[Vec3], direction: Vec3, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > directions.len() {
        return Err(Error::invalid(format!(
            "k = {k} outside 1..={}",
            directions.len()
        )));
    }
    if k == 1 {
        return Ok(vec![nearest_index(directions, direction)]);
    }
    let mut idx: Vec<usize> = (0..directions.len()).collect();
    let angles: Vec<f64> = directions.iter().map(|d| d.angle_to(direction)).collect();
    idx.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)));
    idx.truncate(k);
    Ok(idx)
}

/// Closest direction by angle; the first index wins ties.
pub fn nearest_index(directions: &[Vec3], direction: Vec3) -> usize {
    let mut best = 0;
    let mut best_dot = f64::NEG_INFINITY;
    for (i, d) in directions.iter().enumerate() {
        let dot = d.dot(direction);
        if dot > best_dot {
            best_dot = dot;
            best = i;
        }
    }
    best
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn unit_from_bits(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Tiny deterministic tangential perturbation that breaks the cocircular
/// configurations of regular grids while keeping every point on the sphere.
fn jittered(dirs: &[Vec3]) -> Vec<Vec3> {
    const JITTER: f64 = 1e-7;
    dirs.iter()
        .enumerate()
        .map(|(i, &d)| {
            let helper = if d.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
            let t1 = d.cross(helper).normalized().unwrap_or(Vec3::new(0.0, 0.0, 1.0));
            let t2 = d.cross(t1);
            let h = splitmix(i as u64);
            let (a, b) = (unit_from_bits(h), unit_from_bits(splitmix(h)));
            (d + (t1 * a + t2 * b) * JITTER).normalized().unwrap_or(d)
        })
        .collect()
}

fn orient(p: &[Vec3], f: [usize; 3], q: Vec3) -> f64 {
    let (a, b, c) = (p[f[0]], p[f[1]], p[f[2]]);
    (b - a).cross(c - a).dot(q - a)
}

/// Incremental convex hull of points on the unit sphere; triangles are
/// oriented counter-clockwise seen from outside.
fn sphere_hull(dirs: &[Vec3]) -> Result<Vec<[usize; 3]>> {
    let p = jittered(dirs);
    let n = p.len();
    let degenerate = || Error::DegenerateInput("grid directions do not span three dimensions".into());

    let i0 = 0;
    let i1 = (1..n).max_by(|&a, &b| p[a].distance(p[i0]).total_cmp(&p[b].distance(p[i0]))).ok_or_else(degenerate)?;
    let line = p[i1] - p[i0];
    let i2 = (1..n)
        .filter(|&i| i != i1)
        .max_by(|&a, &b| line.cross(p[a] - p[i0]).norm().total_cmp(&line.cross(p[b] - p[i0]).norm()))
        .ok_or_else(degenerate)?;
    let i3 = (1..n)
        .filter(|&i| i != i1 && i != i2)
        .max_by(|&a, &b| {
            orient(&p, [i0, i1, i2], p[a]).abs().total_cmp(&orient(&p, [i0, i1, i2], p[b]).abs())
        })
        .ok_or_else(degenerate)?;
    if orient(&p, [i0, i1, i2], p[i3]).abs() < 1e-12 {
        return Err(degenerate());
    }
    let mut faces: Vec<[usize; 3]> = if orient(&p, [i0, i1, i2], p[i3]) < 0.0 {
        vec![[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
    } else {
        vec![[i0, i2, i1], [i0, i1, i3], [i1, i2, i3], [i2, i0, i3]]
    };

    for q in 0..n {
        if q == i0 || q == i1 || q == i2 || q == i3 {
            continue;
        }
        let mut visible_edges = BTreeSet::new();
        let mut keep = Vec::with_capacity(faces.len() + 2);
        for &f in &faces {
            if orient(&p, f, p[q]) > 0.0 {
                visible_edges.insert((f[0], f[1]));
                visible_edges.insert((f[1], f[2]));
                visible_edges.insert((f[2], f[0]));
            } else {
                keep.push(f);
            }
        }
        if visible_edges.is_empty() {
            return Err(Error::DegenerateInput(format!("direction {q} is not on the hull")));
        }
        for &(a, b) in &visible_edges {
            if !visible_edges.contains(&(b, a)) {
                keep.push([a, b, q]);
            }
        }
        faces = keep;
    }
    if faces.len() != 2 * n - 4 {
        return Err(Error::DegenerateInput("hull triangulation is not a closed sphere".into()));
    }
    faces.sort_unstable();
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    pub(crate) fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let v = Vec3::new(
                unit_from_bits(rng.next_u64()),
                unit_from_bits(rng.next_u64()),
                unit_from_bits(rng.next_u64()),
            );
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v * (1.0 / n);
            }
        }
    }

    fn inside(grid: &LoudspeakerGrid, t: usize, d: Vec3) -> bool {
        match grid.basis(t).inverse() {
            Some(inv) => {
                let g = inv.mul_vec(d);
                g.x >= -1e-9 && g.y >= -1e-9 && g.z >= -1e-9
            }
            None => false,
        }
    }

    #[test]
    fn fibonacci_unit_and_distinct() {
        let g = fibonacci_grid(64).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.triangles().len(), 124);
        let mut min_angle = f64::MAX;
        for (i, a) in g.directions().iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-9);
            for b in &g.directions()[i + 1..] {
                min_angle = min_angle.min(a.angle_to(*b));
            }
        }
        assert!(min_angle > 0.0);
    }

    #[test]
    fn hull_covers_random_probes() {
        let g = fibonacci_grid(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let d = random_unit(&mut rng);
            assert!((0..g.triangles().len()).any(|t| inside(&g, t, d)), "{d:?} uncovered");
        }
    }

    #[test]
    fn az_el_grid_triangulates() {
        let g = az_el_grid(5.0).unwrap();
        assert_eq!(g.len(), 2522);
        assert_eq!(g.triangles().len(), 2 * 2522 - 4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let d = random_unit(&mut rng);
            let near = nearest_index(g.directions(), d);
            let covered = g.triangles_at(near).iter().any(|&t| inside(&g, t, d))
                || (0..g.triangles().len()).any(|t| inside(&g, t, d));
            assert!(covered);
        }
        for (az, el) in [(0.0, 0.0), (30.0, 0.0), (90.0, 0.0), (135.0, 0.0), (45.0, 45.0), (135.0, 45.0)] {
            let d = Vec3::from_az_el_deg(az, el);
            let i = nearest_index(g.directions(), d);
            assert!(g.directions()[i].angle_to(d) < 1e-9);
        }
    }

    #[test]
    fn too_few_points() {
        assert!(fibonacci_grid(3).is_err());
        assert!(az_el_grid(7.0).is_err());
    }

    #[test]
    fn nearest_queries() {
        let g = fibonacci_grid(50).unwrap();
        for j in [0, 17, 49] {
            assert_eq!(nearest_direction(g.directions()[j], &g, 1).unwrap(), vec![j]);
        }
        let all = nearest_direction(Vec3::FRONT, &g, 50).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        for w in all.windows(2) {
            assert!(g.directions()[w[0]].angle_to(Vec3::FRONT) <= g.directions()[w[1]].angle_to(Vec3::FRONT));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = random_unit(&mut rng);
            let got = nearest_direction(d, &g, 3).unwrap();
            let mut brute: Vec<(f64, usize)> =
                g.directions().iter().enumerate().map(|(i, x)| (x.angle_to(d), i)).collect();
            brute.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            assert_eq!(got, brute[..3].iter().map(|x| x.1).collect::<Vec<_>>());
        }
        assert!(nearest_direction(Vec3::FRONT, &g, 0).is_err());
        assert!(nearest_direction(Vec3::FRONT, &g, 51).is_err());
    }
}
