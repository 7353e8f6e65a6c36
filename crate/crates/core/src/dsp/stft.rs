//! Hann-windowed short-time Fourier transform with weighted overlap-add
//! resynthesis.
//!
//! Frames start `window_size - hop` samples before the signal so every
//! input sample is covered by the same number of frames; the inverse divides
//! by the accumulated squared window, so reconstruction is exact over the
//! whole signal for any hop that divides the window at least twice.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::fft::FftPlan;
use crate::error::{Error, Result};
use crate::signal::MonoIr;

/// Complex STFT frames (`frames × bins`, `bins = window_size/2 + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct StftFrames {
    data: Vec<Vec<Complex64>>,
    window_size: usize,
    hop: usize,
    sample_rate: u32,
    signal_len: usize,
}

impl StftFrames {
    /// Assembles frames, checking the shape against the metadata.
    pub fn from_parts(
        data: Vec<Vec<Complex64>>,
        window_size: usize,
        hop: usize,
        sample_rate: u32,
        signal_len: usize,
    ) -> Result<Self> {
        validate_config(window_size, hop)?;
        let bins = window_size / 2 + 1;
        let expected = frame_count(signal_len, window_size, hop);
        if data.len() != expected || data.iter().any(|f| f.len() != bins) {
            return Err(Error::invalid("frame data does not match STFT metadata"));
        }
        Ok(StftFrames { data, window_size, hop, sample_rate, signal_len })
    }

    pub fn frames(&self) -> &[Vec<Complex64>] {
        &self.data
    }

    pub fn frames_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.data
    }

    pub fn frame_count(&self) -> usize {
        self.data.len()
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

    /// Center frequency of bin `k` in Hz.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.window_size as f64
    }

    /// Same framing and rate, so per-bin quantities can be combined.
    pub fn same_layout(&self, other: &StftFrames) -> bool {
        self.window_size == other.window_size
            && self.hop == other.hop
            && self.sample_rate == other.sample_rate
            && self.signal_len == other.signal_len
    }

    /// Frames of zeros with this layout.
    pub fn zeros_like(&self) -> StftFrames {
        StftFrames {
            data: vec![vec![Complex64::new(0.0, 0.0); self.bins()]; self.data.len()],
            ..*self
        }
    }
}

/// Periodic Hann window.
pub fn hann(size: usize) -> Vec<f64> {
    (0..size)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / size as f64).cos())
        .collect()
}

fn validate_config(window_size: usize, hop: usize) -> Result<()> {
    if window_size < 2 || !window_size.is_power_of_two() {
        return Err(Error::invalid("STFT window size must be a power of two >= 2"));
    }
    if hop == 0 || window_size % hop != 0 || window_size / hop < 2 {
        return Err(Error::invalid(
            "hop must divide the window size at least twice for overlap-add",
        ));
    }
    Ok(())
}

fn frame_count(signal_len: usize, window_size: usize, hop: usize) -> usize {
    let pad = window_size - hop;
    (pad + signal_len - 1) / hop + 1
}

pub fn stft(signal: &MonoIr, window_size: usize, hop: usize) -> Result<StftFrames> {
    validate_config(window_size, hop)?;
    if signal.len() < window_size {
        return Err(Error::invalid("STFT window larger than the signal"));
    }
    let x = signal.samples();
    let pad = window_size - hop;
    let frames = frame_count(x.len(), window_size, hop);
    let window = hann(window_size);
    let plan = FftPlan::new(window_size);
    let mut data = Vec::with_capacity(frames);
    let mut buf = vec![0.0; window_size];
    for m in 0..frames {
        let start = (m * hop) as isize - pad as isize;
        for (i, b) in buf.iter_mut().enumerate() {
            let j = start + i as isize;
            *b = if j >= 0 && (j as usize) < x.len() { x[j as usize] * window[i] } else { 0.0 };
        }
        data.push(plan.forward_real(&buf));
    }
    Ok(StftFrames {
        data,
        window_size,
        hop,
        sample_rate: signal.sample_rate(),
        signal_len: x.len(),
    })
}

pub fn istft(frames: &StftFrames) -> Result<MonoIr> {
    validate_config(frames.window_size, frames.hop)?;
    let (n, hop) = (frames.window_size, frames.hop);
    if frames.data.len() != frame_count(frames.signal_len, n, hop)
        || frames.data.iter().any(|f| f.len() != n / 2 + 1)
    {
        return Err(Error::invalid("frame data does not match STFT metadata"));
    }
    let pad = n - hop;
    let total = (frames.data.len() - 1) * hop + n;
    let window = hann(n);
    let plan = FftPlan::new(n);
    let mut acc = vec![0.0; total];
    let mut wsum = vec![0.0; total];
    for (m, spec) in frames.data.iter().enumerate() {
        let time = plan.inverse_real(spec);
        let start = m * hop;
        for i in 0..n {
            acc[start + i] += time[i] * window[i];
            wsum[start + i] += window[i] * window[i];
        }
    }
    let out = (0..frames.signal_len)
        .map(|i| {
            let w = wsum[pad + i];
            if w > 1e-12 {
                acc[pad + i] / w
            } else {
                0.0
            }
        })
        .collect();
    Ok(MonoIr::from_parts(out, frames.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sum_squares;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn noise(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| (rng.next_u32() as f64 / u32::MAX as f64) * 2.0 - 1.0).collect()
    }

    #[test]
    fn zero_signal_gives_zero_frames() {
        let x = MonoIr::zeros(256, 48_000).unwrap();
        let f = stft(&x, 64, 32).unwrap();
        assert!(f.frames().iter().flatten().all(|c| c.norm() == 0.0));
        assert!(istft(&f).unwrap().samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_white_noise() {
        for hop in [32, 16] {
            let x = MonoIr::new(noise(1000, 7), 48_000).unwrap();
            let y = istft(&stft(&x, 64, hop).unwrap()).unwrap();
            let scale = x.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in x.samples().iter().zip(y.samples()) {
                assert!((a - b).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn round_trip_preserves_energy() {
        let x = MonoIr::new(noise(4096, 3), 48_000).unwrap();
        let y = istft(&stft(&x, 256, 128).unwrap()).unwrap();
        // Energy summed directly on both sides.
        let (ex, ey) = (sum_squares(x.samples()), sum_squares(y.samples()));
        assert!((ex - ey).abs() < 1e-6 * ex);
    }

    #[test]
    fn bin_center_sine_concentrates_energy() {
        let (n, k) = (64usize, 5usize);
        let fs = 48_000u32;
        let f0 = k as f64 * fs as f64 / n as f64;
        let x: Vec<f64> = (0..2048).map(|i| (2.0 * PI * f0 * i as f64 / fs as f64).sin()).collect();
        let frames = stft(&MonoIr::new(x.clone(), fs).unwrap(), n, n / 2).unwrap();
        // Interior frame, checked against a direct DFT of the windowed frame.
        let m = 10;
        let start = m * n / 2 - (n - n / 2);
        let w = hann(n);
        let direct: Vec<f64> = (0..=n / 2)
            .map(|b| {
                let (mut re, mut im) = (0.0, 0.0);
                for t in 0..n {
                    let ph = -2.0 * PI * (b * t) as f64 / n as f64;
                    re += x[start + t] * w[t] * ph.cos();
                    im += x[start + t] * w[t] * ph.sin();
                }
                re * re + im * im
            })
            .collect();
        let got: Vec<f64> = frames.frames()[m].iter().map(|c| c.norm_sqr()).collect();
        for (a, b) in got.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-8 * direct[k]);
        }
        let total: f64 = got.iter().sum();
        let near: f64 = got[k - 1..=k + 1].iter().sum();
        assert!(near >= 0.95 * total);
    }

    #[test]
    fn rejects_bad_configuration() {
        let x = MonoIr::zeros(128, 48_000).unwrap();
        assert!(stft(&x, 256, 128).is_err());
        assert!(stft(&x, 64, 64).is_err());
        assert!(stft(&x, 64, 24).is_err());
        assert!(stft(&x, 48, 24).is_err());
        let f = stft(&x, 64, 32).unwrap();
        let mut bad = f.clone();
        bad.data.pop();
        assert!(istft(&bad).is_err());
    }
}
