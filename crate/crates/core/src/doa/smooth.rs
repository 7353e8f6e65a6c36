//! Sliding vector-mean smoothing of DOA trajectories.

use alloc::vec::Vec;

use super::{unit_or_masked, DoaTrajectory};
use crate::error::{Error, Result};
use crate::math::Vec3;

/// Mean of the valid unit vectors in a centred window of odd length,
/// renormalized. Invalid entries take the smoothed value of the nearest
/// valid entry inside their window (the earlier one on ties) and stay
/// invalid when there is none.
pub fn smooth_doa(trajectory: &DoaTrajectory, window: usize) -> Result<DoaTrajectory> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::invalid("smoothing window must be odd and at least 1"));
    }
    if window == 1 {
        return Ok(trajectory.clone());
    }
    let n = trajectory.len();
    let half = window / 2;
    let dirs = trajectory.directions();
    let valid = trajectory.valid();
    let mut smoothed = Vec::with_capacity(n);
    let mut ok = Vec::with_capacity(n);
    for i in 0..n {
        if !valid[i] {
            smoothed.push(Vec3::ZERO);
            ok.push(false);
            continue;
        }
        let (lo, hi) = (i.saturating_sub(half), (i + half + 1).min(n));
        let sum = (lo..hi).filter(|&k| valid[k]).fold(Vec3::ZERO, |a, k| a + dirs[k]);
        let (d, v) = unit_or_masked(sum);
        smoothed.push(d);
        ok.push(v);
    }
    let mut out = smoothed.clone();
    let mut out_ok = ok.clone();
    for i in 0..n {
        if valid[i] {
            continue;
        }
        for off in 1..=half {
            let cand = [i.checked_sub(off), Some(i + off).filter(|&k| k < n)];
            if let Some(k) = cand.into_iter().flatten().find(|&k| ok[k]) {
                out[i] = smoothed[k];
                out_ok[i] = true;
                break;
            }
        }
    }
    Ok(DoaTrajectory::from_parts(out, out_ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn window_one_is_identity() {
        let t = DoaTrajectory::new(
            vec![Vec3::FRONT, Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0)],
            vec![true, false, true],
        )
        .unwrap();
        assert_eq!(smooth_doa(&t, 1).unwrap(), t);
    }

    #[test]
    fn constant_unchanged() {
        let d = Vec3::from_az_el_deg(33.0, -12.0);
        let t = DoaTrajectory::constant(d, 100).unwrap();
        let s = smooth_doa(&t, 31).unwrap();
        for n in 0..100 {
            assert!(s.direction(n).unwrap().angle_to(d) < 1e-12);
        }
    }

    #[test]
    fn alternating_azimuth_averages_out() {
        let dirs: Vec<Vec3> =
            (0..200).map(|n| Vec3::from_az_el_deg(if n % 2 == 0 { 10.0 } else { -10.0 }, 0.0)).collect();
        let t = DoaTrajectory::new(dirs, vec![true; 200]).unwrap();
        let s = smooth_doa(&t, 15).unwrap();
        for n in 7..193 {
            let err = s.direction(n).unwrap().angle_to(Vec3::FRONT).to_degrees();
            assert!(err < 1.0, "{n}: {err}");
        }
    }

    #[test]
    fn invalid_entries_filled_from_neighbours() {
        let up = Vec3::new(0.0, 0.0, 1.0);
        let t = DoaTrajectory::new(vec![Vec3::ZERO, up, Vec3::ZERO, Vec3::ZERO, Vec3::ZERO], vec![false, true, false, false, false])
            .unwrap();
        let s = smooth_doa(&t, 3).unwrap();
        assert_eq!(s.valid(), &[true, true, true, false, false]);
        assert!(s.direction(0).unwrap().angle_to(up) < 1e-12);
        assert!(smooth_doa(&t, 4).is_err());
    }
}
