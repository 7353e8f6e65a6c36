//! Pseudo-intensity vectors: broadband band-limited DOA and per-bin
//! direction with diffuseness.
//!
//! With the unit-gain first-order convention, `w·(x, y, z)` points toward the
//! source (it is the negated active intensity), so no sign flip is applied
//! to the products.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::{unit_or_masked, DoaConfig, DoaTrajectory};
use crate::dsp::filters::{butterworth_bandpass, Sos};
use crate::dsp::stft::StftFrames;
use crate::error::{Error, Result};
use crate::geometry::foa::FoaSignal;
use crate::math::Vec3;

/// Default temporal averaging length of the per-bin analysis, frames.
pub const DEFAULT_TF_AVERAGING: usize = 8;

/// Group delay of `sos` at `freq`, in samples, from a centred phase
/// difference.
fn group_delay(sos: &Sos, freq: f64, fs: f64) -> f64 {
    let df = 1e-3 * freq;
    let p1 = sos.response(freq - df, fs).arg();
    let p2 = sos.response(freq + df, fs).arg();
    let mut dphi = p2 - p1;
    while dphi > PI {
        dphi -= 2.0 * PI;
    }
    while dphi < -PI {
        dphi += 2.0 * PI;
    }
    -dphi / (2.0 * PI * 2.0 * df) * fs
}

/// Causal band-pass followed by an advance of the integer group delay at
/// the band centre. Causal filtering keeps a reflection's ringing from
/// reaching back into earlier sound, which zero-phase filtering would do.
fn band_limit(x: &[f64], sos: &Sos, advance: usize) -> Vec<f64> {
    let mut ext = x.to_vec();
    ext.extend(core::iter::repeat(0.0).take(advance));
    let y = sos.filter(&ext);
    y[advance..].to_vec()
}

/// Band-limited instantaneous intensity `w·(x, y, z)`, averaged over a
/// centred window of `smoothing_window` samples and normalized per sample.
pub fn piv_broadband_doa(foa: &FoaSignal, config: &DoaConfig) -> Result<DoaTrajectory> {
    let fs = foa.sample_rate();
    config.validate(fs)?;
    let fsf = fs as f64;
    let sos = butterworth_bandpass(2, config.band_low, config.band_high, fsf)?;
    let centre = (config.band_low * config.band_high).sqrt();
    let advance = group_delay(&sos, centre, fsf).round().max(0.0) as usize;
    let [w, x, y, z] = foa.components().map(|c| band_limit(c.samples(), &sos, advance));

    let n = foa.len();
    let intensity: Vec<Vec3> = (0..n).map(|i| Vec3::new(w[i] * x[i], w[i] * y[i], w[i] * z[i])).collect();
    let win = config.smoothing_window;
    let before = (win - 1) / 2;
    let mut directions = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = (i.saturating_sub(before), (i + win - before).min(n));
        let acc = intensity[lo..hi].iter().fold(Vec3::ZERO, |a, &v| a + v);
        let (d, ok) = unit_or_masked(acc);
        directions.push(d);
        valid.push(ok);
    }
    Ok(DoaTrajectory::from_parts(directions, valid))
}

/// Per (frame, bin) unit direction and diffuseness.
#[derive(Debug, Clone, PartialEq)]
pub struct TfDoaField {
    directions: Vec<Vec<Vec3>>,
    psi: Vec<Vec<f64>>,
    window_size: usize,
    hop: usize,
    sample_rate: u32,
    signal_len: usize,
}

impl TfDoaField {
    /// A field sharing the layout of `frames`, checked for consistency.
    pub fn new(directions: Vec<Vec<Vec3>>, psi: Vec<Vec<f64>>, frames: &StftFrames) -> Result<Self> {
        let shape_ok = directions.len() == frames.frame_count()
            && psi.len() == frames.frame_count()
            && directions.iter().all(|f| f.len() == frames.bins())
            && psi.iter().all(|f| f.len() == frames.bins());
        if !shape_ok {
            return Err(Error::invalid("field shape does not match the STFT layout"));
        }
        for (df, pf) in directions.iter().zip(&psi) {
            for (d, &p) in df.iter().zip(pf) {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid("diffuseness outside [0, 1]"));
                }
                if p < 1.0 && (d.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid("directional bins need unit directions"));
                }
            }
        }
        Ok(TfDoaField {
            directions,
            psi,
            window_size: frames.window_size(),
            hop: frames.hop(),
            sample_rate: frames.sample_rate(),
            signal_len: frames.signal_len(),
        })
    }

    pub fn directions(&self) -> &[Vec<Vec3>] {
        &self.directions
    }

    pub fn psi(&self) -> &[Vec<f64>] {
        &self.psi
    }

    pub fn psi_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.psi
    }

    pub fn frame_count(&self) -> usize {
        self.psi.len()
    }

    pub fn bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn matches(&self, frames: &StftFrames) -> bool {
        self.frame_count() == frames.frame_count()
            && self.window_size == frames.window_size()
            && self.hop == frames.hop()
            && self.sample_rate == frames.sample_rate()
            && self.signal_len == frames.signal_len()
    }

    /// Replaces every diffuseness value; directions are kept.
    pub fn with_constant_psi(&self, psi: f64) -> TfDoaField {
        let mut out = self.clone();
        let p = psi.clamp(0.0, 1.0);
        for (df, pf) in out.directions.iter_mut().zip(out.psi.iter_mut()) {
            for (d, v) in df.iter_mut().zip(pf.iter_mut()) {
                *v = p;
                if d.norm() == 0.0 {
                    *d = Vec3::FRONT;
                }
            }
        }
        out
    }
}

pub fn tf_piv_analysis(foa_frames: &[StftFrames; 4]) -> Result<TfDoaField> {
    tf_piv_analysis_with(foa_frames, DEFAULT_TF_AVERAGING)
}

/// `I = Re{W*·(X, Y, Z)}` and `E = (|W|² + |X|² + |Y|² + |Z|²)/2` per bin,
/// both averaged by an exponential moving average with time constant
/// `averaging` frames; `ψ = 1 - ‖⟨I⟩‖/⟨E⟩` (the unit-gain convention
/// absorbs the `c` factor). Bins without net intensity get ψ = 1 and the
/// frontal direction.
pub fn tf_piv_analysis_with(foa_frames: &[StftFrames; 4], averaging: usize) -> Result<TfDoaField> {
    let [w, x, y, z] = foa_frames;
    if ![x, y, z].iter().all(|f| f.same_layout(w)) {
        return Err(Error::invalid("FOA frame sets have different layouts"));
    }
    if averaging == 0 {
        return Err(Error::invalid("averaging length must be at least one frame"));
    }
    let decay = 1.0 - 1.0 / averaging as f64;
    let bins = w.bins();
    let mut acc_i = vec![Vec3::ZERO; bins];
    let mut acc_e = vec![0.0; bins];
    let mut directions = Vec::with_capacity(w.frame_count());
    let mut psi = Vec::with_capacity(w.frame_count());
    for t in 0..w.frame_count() {
        let (fw, fx, fy, fz) = (&w.frames()[t], &x.frames()[t], &y.frames()[t], &z.frames()[t]);
        let mut dirs = Vec::with_capacity(bins);
        let mut ps = Vec::with_capacity(bins);
        for k in 0..bins {
            let p: Complex64 = fw[k];
            let i = Vec3::new((p.conj() * fx[k]).re, (p.conj() * fy[k]).re, (p.conj() * fz[k]).re);
            let e = 0.5 * (p.norm_sqr() + fx[k].norm_sqr() + fy[k].norm_sqr() + fz[k].norm_sqr());
            acc_i[k] = acc_i[k] * decay + i;
            acc_e[k] = acc_e[k] * decay + e;
            let mag = acc_i[k].norm();
            let value = if acc_e[k] > 0.0 { (1.0 - mag / acc_e[k]).clamp(0.0, 1.0) } else { 1.0 };
            match acc_i[k].normalized() {
                Some(d) if mag > 0.0 && value < 1.0 => {
                    dirs.push(d);
                    ps.push(value);
                }
                _ => {
                    dirs.push(Vec3::FRONT);
                    ps.push(1.0);
                }
            }
        }
        directions.push(dirs);
        psi.push(ps);
    }
    TfDoaField::new(directions, psi, w)
}
