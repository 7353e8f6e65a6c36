//! Iterative radix-2 FFT for power-of-two sizes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

/// Precomputed twiddles and bit-reversal table for one transform size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    /// Panics when `len` is not a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT size must be a power of two");
        // Each twiddle is evaluated directly; a recurrence would drift for
        // large sizes.
        let twiddles = (0..len / 2)
            .map(|k| {
                let phase = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        FftPlan { len, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform (no scaling).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place inverse transform, scaled by `1/len`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n, "buffer length does not match plan");
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }

    /// Forward transform of a real signal zero-padded to the plan size.
    /// Returns the `len/2 + 1` non-negative frequency bins.
    pub fn forward_real(&self, signal: &[f64]) -> Vec<Complex64> {
        let mut buf = self.padded(signal);
        self.forward(&mut buf);
        buf.truncate(self.len / 2 + 1);
        buf
    }

    /// Full complex spectrum of a zero-padded real signal.
    pub fn forward_real_full(&self, signal: &[f64]) -> Vec<Complex64> {
        let mut buf = self.padded(signal);
        self.forward(&mut buf);
        buf
    }

    /// Inverse of [`forward_real`](Self::forward_real): Hermitian extension
    /// of the half spectrum, real part of the inverse transform.
    pub fn inverse_real(&self, half: &[Complex64]) -> Vec<f64> {
        let n = self.len;
        assert_eq!(half.len(), n / 2 + 1, "half spectrum size does not match plan");
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        buf[..half.len()].copy_from_slice(half);
        for k in 1..n / 2 {
            buf[n - k] = half[k].conj();
        }
        if n > 1 {
            // DC and Nyquist bins of a real signal are real.
            buf[0].im = 0.0;
            buf[n / 2].im = 0.0;
        }
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    fn padded(&self, signal: &[f64]) -> Vec<Complex64> {
        assert!(signal.len() <= self.len, "signal longer than FFT size");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (b, &s) in buf.iter_mut().zip(signal) {
            b.re = s;
        }
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (t, v)| {
                    let ph = -2.0 * PI * (k * t) as f64 / n as f64;
                    acc + v * Complex64::new(ph.cos(), ph.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let plan = FftPlan::new(64);
        let mut y = x.clone();
        plan.forward(&mut y);
        for (a, b) in y.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-10);
        }
        plan.inverse(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn real_round_trip() {
        let x: Vec<f64> = (0..100).map(|i| ((i * 7) % 13) as f64 - 6.0).collect();
        let plan = FftPlan::new(128);
        let back = plan.inverse_real(&plan.forward_real(&x));
        for (i, v) in back.iter().enumerate() {
            let expect = x.get(i).copied().unwrap_or(0.0);
            assert!((v - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn size_one_is_identity() {
        let plan = FftPlan::new(1);
        let mut d = [Complex64::new(3.0, -1.0)];
        plan.forward(&mut d);
        assert_eq!(d[0], Complex64::new(3.0, -1.0));
    }
}
