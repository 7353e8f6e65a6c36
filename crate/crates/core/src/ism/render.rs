//! Receiver renderings of an image-source list.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{enumerate_images, ImageSourceList, Receiver, Scene};
use crate::dsp::fractional_delay::FractionalDelay;
use crate::error::{Error, Result};
use crate::geometry::{FoaSignal, HrirSet, MicArrayGeometry};
use crate::math::Vec3;
use crate::signal::{BinauralIr, MonoIr, MultichannelIr};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct RenderSettings {
    pub sample_rate: u32,
    pub length: usize,
    /// Band limit of the first-order receiver, for instance a sphere
    /// array's aliasing frequency. `None` renders it full-band.
    #[cfg_attr(feature = "serde", serde(default))]
    pub foa_cutoff_hz: Option<f64>,
}

impl RenderSettings {
    pub fn new(sample_rate: u32, length: usize) -> Self {
        RenderSettings { sample_rate, length, foa_cutoff_hz: None }
    }

    fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 || self.length == 0 {
            return Err(Error::invalid("render needs a positive sample rate and length"));
        }
        if let Some(fc) = self.foa_cutoff_hz {
            if !(fc > 0.0 && fc <= self.sample_rate as f64 / 2.0) {
                return Err(Error::invalid("FOA cutoff must lie in (0, Nyquist]"));
            }
        }
        Ok(())
    }
}

/// Interpolation band limit of the pressure renderings, as a fraction of
/// the sample rate. It sits below Nyquist by half the kernel's transition
/// width, so the kernel energy does not depend on the fractional delay.
pub const PRESSURE_CUTOFF_FRACTION: f64 = 0.4;

/// A rendering plus the number of image contributions cut off by the
/// buffer end.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered<T> {
    pub response: T,
    pub truncated: usize,
}

fn fill_point(images: &ImageSourceList, at: Vec3, settings: &RenderSettings, fd: &FractionalDelay) -> (Vec<f64>, usize) {
    let fs = settings.sample_rate as f64;
    let mut out = vec![0.0; settings.length];
    let mut truncated = 0;
    for img in &images.images {
        if img.wall_gain == 0.0 {
            continue;
        }
        let d = img.position.distance(at);
        if !fd.add_into(&mut out, d / images.speed_of_sound * fs, img.wall_gain / d) {
            truncated += 1;
        }
    }
    (out, truncated)
}

/// Open-array rendering: each capsule receives every image at its own
/// distance, with `1/r` spreading and no scattering.
pub fn render_array_srir(
    images: &ImageSourceList,
    geometry: &MicArrayGeometry,
    settings: &RenderSettings,
) -> Result<Rendered<MultichannelIr>> {
    settings.validate()?;
    geometry.validate()?;
    let fd = FractionalDelay::new(PRESSURE_CUTOFF_FRACTION);
    let mut truncated = 0;
    let mut channels = Vec::with_capacity(geometry.capsule_count());
    for p in &geometry.positions {
        let (x, t) = fill_point(images, images.receiver_origin + *p, settings, &fd);
        truncated += t;
        channels.push(MonoIr::from_parts(x, settings.sample_rate));
    }
    let ir = MultichannelIr::new(channels, Some(geometry.id.clone()))?;
    Ok(Rendered { response: ir, truncated })
}

/// Pressure at the receiver origin.
pub fn render_center_omni(images: &ImageSourceList, settings: &RenderSettings) -> Result<Rendered<MonoIr>> {
    settings.validate()?;
    let (x, truncated) = fill_point(images, images.receiver_origin, settings, &FractionalDelay::new(PRESSURE_CUTOFF_FRACTION));
    Ok(Rendered { response: MonoIr::from_parts(x, settings.sample_rate), truncated })
}

/// Ideal first-order receiver at the origin in the unit-gain SN3D
/// convention: a plane wave from `u` gives `w = p` and `(x, y, z) = u·p`.
/// Full-band, it uses the Nyquist kernel of the reference rendering, so
/// `w` matches the centre omni below `PRESSURE_CUTOFF_FRACTION·fs` and
/// differs above it.
pub fn render_ideal_foa(images: &ImageSourceList, settings: &RenderSettings) -> Result<Rendered<FoaSignal>> {
    settings.validate()?;
    let fs = settings.sample_rate as f64;
    let fd = match settings.foa_cutoff_hz {
        Some(fc) => FractionalDelay::with_cutoff_hz(fc, settings.sample_rate),
        None => FractionalDelay::default(),
    };
    let mut w = vec![0.0; settings.length];
    let mut truncated = 0;
    let mut axes = [vec![0.0; settings.length], vec![0.0; settings.length], vec![0.0; settings.length]];
    for img in &images.images {
        if img.wall_gain == 0.0 {
            continue;
        }
        let delay = img.delay * fs;
        if !fd.add_into(&mut w, delay, img.amplitude) {
            truncated += 1;
        }
        for (buf, g) in axes.iter_mut().zip(img.direction.to_array()) {
            if g != 0.0 {
                fd.add_into(buf, delay, img.amplitude * g);
            }
        }
    }
    let mono = |v: Vec<f64>| MonoIr::from_parts(v, settings.sample_rate);
    let [x, y, z] = axes;
    Ok(Rendered { response: FoaSignal::new(mono(w), mono(x), mono(y), mono(z))?, truncated })
}

/// Reference BRIR: each image is rendered through the HRIR pair nearest to
/// its direction, scaled by its amplitude and placed at its delay. The
/// kernel runs up to Nyquist, so integer delays reproduce the HRIR exactly.
pub fn render_reference_brir(
    images: &ImageSourceList,
    hrirs: &HrirSet,
    settings: &RenderSettings,
) -> Result<Rendered<BinauralIr>> {
    settings.validate()?;
    if hrirs.sample_rate() != settings.sample_rate {
        return Err(Error::invalid("HRIR set sample rate differs from the render rate"));
    }
    let fs = settings.sample_rate as f64;
    let fd = FractionalDelay::default();
    let (mut l, mut r) = (vec![0.0; settings.length], vec![0.0; settings.length]);
    let mut truncated = 0;
    for img in &images.images {
        if img.wall_gain == 0.0 {
            continue;
        }
        let pair = hrirs.pair(hrirs.nearest(img.direction).0);
        let delay = img.delay * fs;
        let a = fd.add_filtered_into(&mut l, pair.left().samples(), delay, img.amplitude);
        let b = fd.add_filtered_into(&mut r, pair.right().samples(), delay, img.amplitude);
        if !(a && b) {
            truncated += 1;
        }
    }
    let mono = |v: Vec<f64>| MonoIr::from_parts(v, settings.sample_rate);
    Ok(Rendered { response: BinauralIr::new(mono(l), mono(r))?, truncated })
}

/// Every rendering of one scene, as consumed by the pipelines.
#[derive(Debug, Clone)]
pub struct SimulatedScene {
    pub images: ImageSourceList,
    /// Present when the scene's receiver is an array.
    pub srir: Option<MultichannelIr>,
    pub geometry: Option<MicArrayGeometry>,
    pub center: MonoIr,
    pub foa: FoaSignal,
    pub reference: BinauralIr,
    /// Image contributions cut off by the buffer end, over all renderings.
    pub truncated: usize,
}

pub fn render_scene(scene: &Scene, settings: &RenderSettings, hrirs: &HrirSet) -> Result<SimulatedScene> {
    let images = enumerate_images(scene)?;
    let mut truncated = 0;
    let (srir, geometry) = match &scene.receiver {
        Receiver::Array { geometry } => {
            let r = render_array_srir(&images, geometry, settings)?;
            truncated += r.truncated;
            (Some(r.response), Some(geometry.clone()))
        }
        Receiver::Binaural | Receiver::IdealFoa => (None, None),
    };
    let center = render_center_omni(&images, settings)?;
    let foa = render_ideal_foa(&images, settings)?;
    let reference = render_reference_brir(&images, hrirs, settings)?;
    truncated += center.truncated + foa.truncated + reference.truncated;
    Ok(SimulatedScene {
        images,
        srir,
        geometry,
        center: center.response,
        foa: foa.response,
        reference: reference.response,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::spherical_head_set;
    use crate::ism::ImageSource;

    const FS: u32 = 48_000;

    fn list(images: Vec<ImageSource>) -> ImageSourceList {
        ImageSourceList { receiver_origin: Vec3::ZERO, speed_of_sound: 343.0, images }
    }

    fn image(position: Vec3, wall_gain: f64) -> ImageSource {
        let r = position.norm();
        ImageSource {
            position,
            wall_gain,
            amplitude: wall_gain / r,
            delay: r / 343.0,
            direction: position * (1.0 / r),
            order: 0,
        }
    }

    fn two_capsules(a: Vec3, b: Vec3) -> MicArrayGeometry {
        let c = (a + b) * 0.5;
        MicArrayGeometry::new("pair", vec![a - c, b - c], vec!["a".into(), "b".into()], None, 1000.0).unwrap()
    }

    #[test]
    fn equidistant_capsules_identical() {
        let g = two_capsules(Vec3::new(0.0, 0.05, 0.0), Vec3::new(0.0, -0.05, 0.0));
        let l = list(vec![image(Vec3::new(1.7, 0.0, 0.3), 1.0)]);
        let s = render_array_srir(&l, &g, &RenderSettings::new(FS, 1024)).unwrap().response;
        for (a, b) in s.channel(0).samples().iter().zip(s.channel(1).samples()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn per_capsule_arrival_and_spreading() {
        let g = two_capsules(Vec3::new(0.1, 0.0, 0.0), Vec3::new(-0.1, 0.0, 0.0));
        let src = Vec3::new(1.3, 0.4, 0.0);
        let l = list(vec![image(src, 1.0)]);
        let s = render_array_srir(&l, &g, &RenderSettings::new(FS, 2048)).unwrap().response;
        let mut energy = [0.0; 2];
        for (c, e) in energy.iter_mut().enumerate() {
            let x = s.channel(c).samples();
            let peak = (0..x.len()).fold(0, |b, i| if x[i].abs() > x[b].abs() { i } else { b });
            let d = src.distance(g.positions[c]);
            assert!((peak as f64 - d / 343.0 * FS as f64).abs() <= 0.5, "capsule {c}");
            *e = s.channel(c).energy();
        }
        let (d0, d1) = (src.distance(g.positions[0]), src.distance(g.positions[1]));
        assert!(((energy[0] / energy[1]) / ((d1 * d1) / (d0 * d0)) - 1.0).abs() < 0.01);
    }

    #[test]
    fn frontal_image_on_grid_gives_scaled_hrir() {
        let dirs = vec![Vec3::FRONT, Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, -1.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)];
        let hrirs = spherical_head_set(&dirs, FS, 128).unwrap();
        // 280 samples of delay exactly.
        let r = 280.0 * 343.0 / FS as f64;
        let l = list(vec![image(Vec3::new(r, 0.0, 0.0), 1.0)]);
        let b = render_reference_brir(&l, &hrirs, &RenderSettings::new(FS, 1024)).unwrap();
        assert_eq!(b.truncated, 0);
        let h = hrirs.pair(0);
        for (out, hrir) in [(b.response.left(), h.left()), (b.response.right(), h.right())] {
            for (n, v) in out.samples().iter().enumerate() {
                let want = if (280..280 + 128).contains(&n) { hrir.samples()[n - 280] / r } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "{n}");
            }
        }
    }

    #[test]
    fn rendering_is_linear() {
        let hrirs = spherical_head_set(&crate::geometry::fibonacci_grid(30).unwrap().directions().to_vec(), FS, 128).unwrap();
        let a = image(Vec3::new(1.0, 0.7, 0.2), 0.6);
        let b = image(Vec3::new(-0.4, 2.0, -0.5), 0.8);
        let st = RenderSettings::new(FS, 1024);
        let both = render_reference_brir(&list(vec![a, b]), &hrirs, &st).unwrap().response;
        let ra = render_reference_brir(&list(vec![a]), &hrirs, &st).unwrap().response;
        let rb = render_reference_brir(&list(vec![b]), &hrirs, &st).unwrap().response;
        for n in 0..1024 {
            let want = ra.left().samples()[n] + rb.left().samples()[n];
            assert!((both.left().samples()[n] - want).abs() < 1e-15);
        }
        let mut doubled = a;
        doubled.wall_gain *= 2.0;
        doubled.amplitude *= 2.0;
        let g = render_center_omni(&list(vec![doubled]), &st).unwrap().response;
        let g1 = render_center_omni(&list(vec![a]), &st).unwrap().response;
        assert!(g.samples().iter().zip(g1.samples()).all(|(u, v)| (u - 2.0 * v).abs() < 1e-15));
    }

    #[test]
    fn ideal_foa_carries_direction() {
        let u = Vec3::from_az_el_deg(60.0, 20.0);
        let l = list(vec![image(u * 1.5, 1.0)]);
        let st = RenderSettings { foa_cutoff_hz: None, ..RenderSettings::new(FS, 1024) };
        let f = render_ideal_foa(&l, &st).unwrap().response;
        for n in 0..1024 {
            let w = f.w.samples()[n];
            assert!((f.x.samples()[n] - u.x * w).abs() < 1e-15);
            assert!((f.z.samples()[n] - u.z * w).abs() < 1e-15);
        }
        // Full-band w is the centre pressure at low frequencies only.
        let omni = render_center_omni(&l, &st).unwrap().response;
        let plan = crate::dsp::fft::FftPlan::new(1024);
        let (sw, so) = (plan.forward_real(f.w.samples()), plan.forward_real(omni.samples()));
        let peak = so.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for k in 0..(0.3 * 1024.0) as usize {
            assert!((sw[k] - so[k]).norm() < 1e-2 * peak, "bin {k}");
        }
        let hf = (0.46 * 1024.0) as usize..512;
        assert!(hf.into_iter().any(|k| (sw[k] - so[k]).norm() > 0.1 * peak));
    }

    #[test]
    fn band_limited_foa_loses_high_frequencies() {
        let l = list(vec![image(Vec3::new(1.0, 0.5, 0.2), 1.0)]);
        let st = RenderSettings { foa_cutoff_hz: Some(5000.0), ..RenderSettings::new(FS, 1024) };
        let f = render_ideal_foa(&l, &st).unwrap().response;
        let s = crate::dsp::fft::FftPlan::new(1024).forward_real(f.w.samples());
        let at = |hz: f64| s[(hz / FS as f64 * 1024.0) as usize].norm();
        assert!(at(12_000.0) < 1e-2 * at(1_000.0));
    }

    #[test]
    fn truncation_is_reported() {
        let l = list(vec![image(Vec3::new(3.0, 0.0, 0.0), 1.0)]);
        let r = render_center_omni(&l, &RenderSettings::new(FS, 400)).unwrap();
        assert_eq!(r.truncated, 1);
    }
}
