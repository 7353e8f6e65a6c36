//! Butterworth IIR design by bilinear transform, second-order-section
//! filtering and zero-phase (forward-backward) application.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// One second-order section, `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b[0] + z_inv * self.b[1] + z2 * self.b[2]) / (1.0 + z_inv * self.a[0] + z2 * self.a[1])
    }
}

/// Cascade of second-order sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos {
    pub sections: Vec<Biquad>,
}

impl Sos {
    /// Complex response at `freq` Hz.
    pub fn response(&self, freq: f64, sample_rate: f64) -> Complex64 {
        let w = 2.0 * PI * freq / sample_rate;
        let z_inv = Complex64::new(w.cos(), -w.sin());
        self.sections.iter().fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    pub fn magnitude(&self, freq: f64, sample_rate: f64) -> f64 {
        self.response(freq, sample_rate).norm()
    }

    /// Causal filtering (transposed direct form II).
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b[0] * input + z1;
                z1 = s.b[1] * input - s.a[0] * out + z2;
                z2 = s.b[2] * input - s.a[1] * out;
                *v = out;
            }
        }
        y
    }

    /// Zero-phase filtering: forward pass, then a pass over the reversed
    /// output. The signal is zero-extended by `pad` samples on both sides so
    /// that ringing is not folded back at the edges.
    pub fn filtfilt(&self, x: &[f64], pad: usize) -> Vec<f64> {
        let mut ext = vec![0.0; x.len() + 2 * pad];
        ext[pad..pad + x.len()].copy_from_slice(x);
        let mut y = self.filter(&ext);
        y.reverse();
        let mut y = self.filter(&y);
        y.reverse();
        y[pad..pad + x.len()].to_vec()
    }

    fn normalize_at(&mut self, freq: f64, sample_rate: f64) {
        let g = self.magnitude(freq, sample_rate);
        if g > 0.0 {
            for b in &mut self.sections[0].b {
                *b /= g;
            }
        }
    }
}

fn prototype_poles(order: usize) -> Vec<Complex64> {
    (0..order)
        .map(|k| {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn prewarp(freq: f64, fs: f64) -> f64 {
    2.0 * fs * (PI * freq / fs).tan()
}

fn bilinear(s: Complex64, fs: f64) -> Complex64 {
    (2.0 * fs + s) / (2.0 * fs - s)
}

fn section_from_poles(p1: Complex64, p2: Complex64, b: [f64; 3]) -> Biquad {
    let sum = p1 + p2;
    let prod = p1 * p2;
    Biquad { b, a: [-sum.re, prod.re] }
}

fn check_design(freqs: &[f64], fs: f64, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::invalid("filter order must be positive"));
    }
    for &f in freqs {
        if !(f > 0.0 && f < fs / 2.0) {
            return Err(Error::invalid("filter edge must lie strictly between 0 and Nyquist"));
        }
    }
    Ok(())
}

/// Butterworth low-pass of the given order.
pub fn butterworth_lowpass(order: usize, cutoff: f64, fs: f64) -> Result<Sos> {
    check_design(&[cutoff], fs, order)?;
    let wc = prewarp(cutoff, fs);
    let mut sections = Vec::new();
    for p in prototype_poles(order) {
        if p.im > 1e-12 {
            let z = bilinear(p * wc, fs);
            sections.push(section_from_poles(z, z.conj(), [1.0, 2.0, 1.0]));
        } else if p.im.abs() <= 1e-12 {
            let z = bilinear(p * wc, fs).re;
            sections.push(Biquad { b: [1.0, 1.0, 0.0], a: [-z, 0.0] });
        }
    }
    let mut sos = Sos { sections };
    sos.normalize_at(0.0, fs);
    Ok(sos)
}

/// Butterworth high-pass of the given order.
pub fn butterworth_highpass(order: usize, cutoff: f64, fs: f64) -> Result<Sos> {
    check_design(&[cutoff], fs, order)?;
    let wc = prewarp(cutoff, fs);
    let mut sections = Vec::new();
    for p in prototype_poles(order) {
        if p.im > 1e-12 {
            let z = bilinear(wc / p, fs);
            sections.push(section_from_poles(z, z.conj(), [1.0, -2.0, 1.0]));
        } else if p.im.abs() <= 1e-12 {
            let z = bilinear(Complex64::new(wc, 0.0) / p, fs).re;
            sections.push(Biquad { b: [1.0, -1.0, 0.0], a: [-z, 0.0] });
        }
    }
    let mut sos = Sos { sections };
    sos.normalize_at(fs / 2.0, fs);
    Ok(sos)
}

/// Butterworth band-pass obtained from a low-pass prototype of
/// `prototype_order`; the resulting filter has order `2 · prototype_order`.
/// Unity gain at the geometric center of the prewarped edges.
pub fn butterworth_bandpass(prototype_order: usize, low: f64, high: f64, fs: f64) -> Result<Sos> {
    check_design(&[low, high], fs, prototype_order)?;
    if low >= high {
        return Err(Error::invalid("band-pass lower edge must be below the upper edge"));
    }
    let (w1, w2) = (prewarp(low, fs), prewarp(high, fs));
    let w0 = (w1 * w2).sqrt();
    let bw = w2 - w1;
    let bp_roots = |p: Complex64| {
        // s² - p·B·s + Ω0² = 0
        let pb = p * bw;
        let disc = (pb * pb - 4.0 * w0 * w0).sqrt();
        ((pb + disc) * 0.5, (pb - disc) * 0.5)
    };
    let mut sections = Vec::new();
    for p in prototype_poles(prototype_order) {
        if p.im > 1e-12 {
            let (s1, s2) = bp_roots(p);
            for s in [s1, s2] {
                let z = bilinear(s, fs);
                sections.push(section_from_poles(z, z.conj(), [1.0, 0.0, -1.0]));
            }
        } else if p.im.abs() <= 1e-12 {
            let (s1, s2) = bp_roots(Complex64::new(p.re, 0.0));
            let (z1, z2) = (bilinear(s1, fs), bilinear(s2, fs));
            sections.push(section_from_poles(z1, z2, [1.0, 0.0, -1.0]));
        }
    }
    let mut sos = Sos { sections };
    let center = fs / PI * (w0 / (2.0 * fs)).atan();
    sos.normalize_at(center, fs);
    Ok(sos)
}

/// Zero-extension that comfortably covers the ringing of a filter whose
/// lowest edge is `low_hz`.
pub fn ringing_pad(low_hz: f64, fs: f64) -> usize {
    (8.0 * fs / low_hz).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 48_000.0;

    #[test]
    fn lowpass_shape() {
        let lp = butterworth_lowpass(4, 1000.0, FS).unwrap();
        assert!((lp.magnitude(0.0, FS) - 1.0).abs() < 1e-12);
        assert!((lp.magnitude(1000.0, FS) - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(lp.magnitude(8000.0, FS) < 1e-3);
        let lp3 = butterworth_lowpass(3, 2000.0, FS).unwrap();
        assert!((lp3.magnitude(2000.0, FS) - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn highpass_shape() {
        let hp = butterworth_highpass(2, 50.0, FS).unwrap();
        assert!((hp.magnitude(50.0, FS) - 0.5f64.sqrt()).abs() < 1e-9);
        assert!((hp.magnitude(5000.0, FS) - 1.0).abs() < 1e-3);
        assert!(hp.magnitude(5.0, FS) < 0.011);
    }

    #[test]
    fn bandpass_edges_and_center() {
        let f0 = 1000.0;
        let (lo, hi) = (f0 / 2f64.sqrt(), f0 * 2f64.sqrt());
        let bp = butterworth_bandpass(2, lo, hi, FS).unwrap();
        assert!((bp.magnitude(lo, FS) - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((bp.magnitude(hi, FS) - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(bp.magnitude(f0, FS) > 0.999);
        let bp3 = butterworth_bandpass(3, 200.0, 2400.0, FS).unwrap();
        assert!((bp3.magnitude(200.0, FS) - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn filtfilt_is_zero_phase() {
        let bp = butterworth_bandpass(2, 700.0, 1400.0, FS).unwrap();
        let mut x = vec![0.0; 4001];
        x[2000] = 1.0;
        let y = bp.filtfilt(&x, 2000);
        for k in 1..1500 {
            assert!((y[2000 - k] - y[2000 + k]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_designs_rejected() {
        assert!(butterworth_lowpass(2, 30_000.0, FS).is_err());
        assert!(butterworth_bandpass(2, 2000.0, 1000.0, FS).is_err());
        assert!(butterworth_highpass(0, 100.0, FS).is_err());
    }
}
