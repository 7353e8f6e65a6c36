//! Random-phase FIR decorrelators.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dsp::convolve::convolve;
use crate::dsp::fft::FftPlan;
use crate::signal::MonoIr;

pub const DECORRELATOR_TAPS: usize = 1024;

/// Unit-magnitude, uniformly random-phase spectrum on the FFT grid, turned
/// into a real FIR. The stream of the generator is the channel index, so
/// every `(seed, channel)` gives its own reproducible filter.
pub fn decorrelator_taps(seed: u64, channel_index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(channel_index as u64);
    let n = DECORRELATOR_TAPS;
    let mut half = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        let v = if k == 0 || k == n / 2 {
            if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 }.into()
        } else {
            let phase = 2.0 * PI * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::from_polar(1.0, phase)
        };
        half.push(v);
    }
    FftPlan::new(n).inverse_real(&half)
}

/// Filters `signal` with the decorrelator for `(seed, channel_index)`.
/// The output keeps the full convolution tail, so its energy matches the
/// input's on broadband material.
pub fn decorrelate(signal: &MonoIr, seed: u64, channel_index: usize) -> MonoIr {
    let h = decorrelator_taps(seed, channel_index);
    MonoIr::from_parts(convolve(signal.samples(), &h), signal.sample_rate())
}
