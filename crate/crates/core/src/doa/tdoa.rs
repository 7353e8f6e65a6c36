//! Least-squares DOA from pairwise time differences of arrival.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{unit_or_masked, DoaConfig, DoaTrajectory};
use crate::dsp::correlate::{correlate_slices, gcc_phat_slices, peak_lag, Weighting};
use crate::error::{Error, Result};
use crate::geometry::array::MicArrayGeometry;
use crate::math::{least_squares_3, Vec3};
use crate::signal::MultichannelIr;

struct Pair {
    i: usize,
    j: usize,
    baseline: Vec3,
    max_lag: usize,
}

/// For every sample, a window centred on it (zero-padded at the edges) gives
/// one TDOA per capsule pair from the GCC peak. A plane wave from `u`
/// satisfies `(r_j - r_i)·u = -c·τ_ij` for `τ_ij` the lag of capsule `j`
/// behind capsule `i`; the stacked system is solved by least squares and the
/// solution normalized.
pub fn tdoa_ls_doa(srir: &MultichannelIr, geometry: &MicArrayGeometry, config: &DoaConfig) -> Result<DoaTrajectory> {
    let fs = srir.sample_rate();
    config.validate(fs)?;
    if srir.channel_count() != geometry.capsule_count() {
        return Err(Error::invalid(format!(
            "SRIR has {} channels, geometry '{}' has {} capsules",
            srir.channel_count(),
            geometry.id,
            geometry.capsule_count()
        )));
    }
    if !geometry.is_three_dimensional() {
        return Err(Error::UnsupportedGeometry(format!(
            "'{}' needs at least four non-coplanar capsules",
            geometry.id
        )));
    }
    let w = config.window_size;
    if w >= srir.len() {
        return Err(Error::invalid("DOA window is not shorter than the response"));
    }
    let fsf = fs as f64;
    let mut pairs = Vec::new();
    for i in 0..geometry.capsule_count() {
        for j in i + 1..geometry.capsule_count() {
            let baseline = geometry.positions[j] - geometry.positions[i];
            let max_lag = ((baseline.norm() * fsf / config.speed_of_sound).ceil() as usize + 1).min(w - 1);
            pairs.push(Pair { i, j, baseline, max_lag });
        }
    }

    // Zero-padded copies so every window is a plain slice.
    let half = w / 2;
    let padded: Vec<Vec<f64>> = srir
        .channels()
        .iter()
        .map(|c| {
            let mut p = vec![0.0; c.len() + w];
            p[half..half + c.len()].copy_from_slice(c.samples());
            p
        })
        .collect();

    let n = srir.len();
    let mut directions = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(pairs.len());
    let mut rhs = Vec::with_capacity(pairs.len());
    for t in 0..n {
        let windows: Vec<&[f64]> = padded.iter().map(|p| &p[t..t + w]).collect();
        if windows.iter().any(|win| win.iter().all(|v| *v == 0.0)) {
            directions.push(Vec3::ZERO);
            valid.push(false);
            continue;
        }
        rows.clear();
        rhs.clear();
        for p in &pairs {
            let corr = match config.weighting {
                Weighting::None => correlate_slices(windows[p.i], windows[p.j], p.max_lag),
                Weighting::Phat => gcc_phat_slices(windows[p.i], windows[p.j], p.max_lag),
            };
            let tau = peak_lag(&corr, p.max_lag, config.refine, false) / fsf;
            rows.push(p.baseline);
            rhs.push(-config.speed_of_sound * tau);
        }
        let (d, ok) = match least_squares_3(&rows, &rhs) {
            Some(s) => unit_or_masked(s),
            None => (Vec3::ZERO, false),
        };
        directions.push(d);
        valid.push(ok);
    }
    Ok(DoaTrajectory::from_parts(directions, valid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fractional_delay::FractionalDelay;
    use crate::geometry::array::{builtin_array, SPEED_OF_SOUND};
    use crate::signal::MonoIr;

    fn plane_wave(g: &MicArrayGeometry, dir: Vec3, at: f64, len: usize) -> MultichannelIr {
        let fd = FractionalDelay::new(0.45);
        let chans = g
            .positions
            .iter()
            .map(|p| {
                let mut out = vec![0.0; len];
                fd.add_into(&mut out, at - p.dot(dir) / SPEED_OF_SOUND * 48_000.0, 1.0);
                MonoIr::new(out, 48_000).unwrap()
            })
            .collect();
        MultichannelIr::new(chans, Some(g.id.clone())).unwrap()
    }

    #[test]
    fn identical_channels_are_masked() {
        let g = builtin_array("om6").unwrap();
        let c = MonoIr::impulse(400, 200, 48_000).unwrap();
        let ir = MultichannelIr::new(vec![c; 6], None).unwrap();
        let t = tdoa_ls_doa(&ir, &g, &DoaConfig::default()).unwrap();
        assert_eq!(t.valid_count(), 0);
    }

    #[test]
    fn analytic_delay_plane_waves() {
        let g = builtin_array("om6").unwrap();
        // +X leads -X by 0.1 / 343 s ≈ 0.2915 ms for a frontal wave.
        assert!((0.1 / 343.0 * 1e3 - 0.2915).abs() < 1e-4);
        for (az, expect) in [(0.0, Vec3::new(1.0, 0.0, 0.0)), (90.0, Vec3::new(0.0, 1.0, 0.0))] {
            let ir = plane_wave(&g, Vec3::from_az_el_deg(az, 0.0), 300.0, 800);
            let t = tdoa_ls_doa(&ir, &g, &DoaConfig::default()).unwrap();
            let d = t.direction(300).unwrap();
            assert!(d.angle_to(expect).to_degrees() < 2.0, "az {az}: {d:?}");
        }
    }

    #[test]
    fn scale_and_common_delay_invariance() {
        let g = builtin_array("om6").unwrap();
        let dir = Vec3::from_az_el_deg(-60.0, 25.0);
        let ir = plane_wave(&g, dir, 300.0, 900);
        let base = tdoa_ls_doa(&ir, &g, &DoaConfig::default()).unwrap();
        let scaled = tdoa_ls_doa(&ir.scaled(7.5), &g, &DoaConfig::default()).unwrap();
        let shifted = tdoa_ls_doa(&plane_wave(&g, dir, 337.0, 900), &g, &DoaConfig::default()).unwrap();
        for n in 250..350 {
            let (a, b) = (base.direction(n), scaled.direction(n));
            match (a, b) {
                (Some(a), Some(b)) => assert!(a.angle_to(b) < 1e-9),
                (None, None) => {}
                _ => panic!("mask differs at {n}"),
            }
            let c = shifted.direction(n + 37);
            match (a, c) {
                (Some(a), Some(c)) => assert!(a.angle_to(c) < 1e-9),
                (None, None) => {}
                _ => panic!("shifted mask differs at {n}"),
            }
        }
        let d = base.direction(300).unwrap();
        assert!(d.angle_to(dir).to_degrees() < 2.0);
    }

    #[test]
    fn planar_geometry_rejected() {
        let pos = vec![
            Vec3::new(0.05, 0.0, 0.0),
            Vec3::new(-0.05, 0.0, 0.0),
            Vec3::new(0.0, 0.05, 0.0),
            Vec3::new(0.0, -0.05, 0.0),
        ];
        let labels = (0..4).map(|i| format!("{i}")).collect();
        let g = MicArrayGeometry::new("planar", pos, labels, None, 2400.0).unwrap();
        let ir = MultichannelIr::new(vec![MonoIr::impulse(200, 10, 48_000).unwrap(); 4], None).unwrap();
        assert!(matches!(tdoa_ls_doa(&ir, &g, &DoaConfig::default()), Err(Error::UnsupportedGeometry(_))));
    }
}
