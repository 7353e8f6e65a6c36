//! Linear convolution.

use alloc::vec;
use alloc::vec::Vec;

use super::fft::FftPlan;
use crate::error::{Error, Result};
use crate::signal::MonoIr;

/// Kernels at or below this length are convolved directly.
const DIRECT_LIMIT: usize = 48;

pub fn convolve_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

pub fn convolve_fft(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let plan = FftPlan::new(out_len.next_power_of_two());
    let fa = plan.forward_real(a);
    let fb = plan.forward_real(b);
    let prod: Vec<_> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    let mut out = plan.inverse_real(&prod);
    out.truncate(out_len);
    out
}

/// Direct convolution for short operands, FFT otherwise.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.len().min(b.len()) <= DIRECT_LIMIT {
        convolve_direct(a, b)
    } else {
        convolve_fft(a, b)
    }
}

/// Linear convolution; output length `len(a) + len(b) - 1`.
pub fn fft_convolve(a: &MonoIr, b: &MonoIr) -> Result<MonoIr> {
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::invalid("convolution operands have different sample rates"));
    }
    Ok(MonoIr::from_parts(convolve(a.samples(), b.samples()), a.sample_rate()))
}
