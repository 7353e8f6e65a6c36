//! Kaiser-windowed sinc kernels for fractional-delay placement.

use core::f64::consts::PI;

use num_traits::Float;

use crate::math::bessel_i0;

/// Kernel length in taps.
pub const KERNEL_TAPS: usize = 32;
/// Kaiser shape parameter.
pub const KAISER_BETA: f64 = 8.0;

/// Windowed-sinc interpolation kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalDelay {
    /// Cutoff as a fraction of the sample rate (0.5 is Nyquist).
    cutoff: f64,
    i0_beta: f64,
}

impl Default for FractionalDelay {
    fn default() -> Self {
        FractionalDelay::new(0.5)
    }
}

impl FractionalDelay {
    pub fn new(cutoff: f64) -> Self {
        FractionalDelay { cutoff: cutoff.clamp(1e-6, 0.5), i0_beta: bessel_i0(KAISER_BETA) }
    }

    /// Kernel band-limited to `cutoff_hz`.
    pub fn with_cutoff_hz(cutoff_hz: f64, sample_rate: u32) -> Self {
        FractionalDelay::new(cutoff_hz / sample_rate as f64)
    }

    fn tap(&self, t: f64) -> f64 {
        let half = KERNEL_TAPS as f64 / 2.0;
        if t.abs() >= half {
            return 0.0;
        }
        let r = t / half;
        let window = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / self.i0_beta;
        let x = 2.0 * self.cutoff * t;
        let sinc = if x.abs() < 1e-12 { 1.0 } else { (PI * x).sin() / (PI * x) };
        2.0 * self.cutoff * sinc * window
    }

    /// Adds `gain · kernel(n - delay)` into `out` for the taps that fall
    /// inside the buffer. Returns false when any tap was cut off.
    pub fn add_into(&self, out: &mut [f64], delay: f64, gain: f64) -> bool {
        let half = (KERNEL_TAPS / 2) as isize;
        let base = delay.floor() as isize;
        if base - half + 1 >= out.len() as isize || base + half < 0 {
            return false;
        }
        let mut complete = true;
        for n in (base - half + 1)..=(base + half) {
            let v = self.tap(n as f64 - delay);
            if n < 0 || n as usize >= out.len() {
                if v != 0.0 {
                    complete = false;
                }
                continue;
            }
            out[n as usize] += gain * v;
        }
        complete
    }

    /// Adds `gain · (kernel(· - delay) * response)` into `out`.
    pub fn add_filtered_into(&self, out: &mut [f64], response: &[f64], delay: f64, gain: f64) -> bool {
        let half = (KERNEL_TAPS / 2) as isize;
        let base = delay.floor() as isize;
        if base - half + 1 >= out.len() as isize || base + half + response.len() as isize <= 0 {
            return false;
        }
        let mut complete = true;
        for n in (base - half + 1)..=(base + half) {
            let v = gain * self.tap(n as f64 - delay);
            if v == 0.0 {
                continue;
            }
            for (k, &h) in response.iter().enumerate() {
                let idx = n + k as isize;
                if idx < 0 || idx as usize >= out.len() {
                    if h != 0.0 {
                        complete = false;
                    }
                    continue;
                }
                out[idx as usize] += v * h;
            }
        }
        complete
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn integer_delay_is_a_unit_impulse() {
        let mut out = vec![0.0; 64];
        assert!(FractionalDelay::default().add_into(&mut out, 20.0, 2.0));
        for (i, v) in out.iter().enumerate() {
            let expect = if i == 20 { 2.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-12, "{i}: {v}");
        }
    }

    #[test]
    fn fractional_peak_location() {
        let mut out = vec![0.0; 64];
        FractionalDelay::default().add_into(&mut out, 30.4, 1.0);
        let peak = (0..64).max_by(|&a, &b| out[a].total_cmp(&out[b])).unwrap();
        assert_eq!(peak, 30);
        // DC gain of the interpolator is close to one.
        let dc: f64 = out.iter().sum();
        assert!((dc - 1.0).abs() < 1e-3);
    }

    #[test]
    fn truncation_is_reported() {
        let mut out = vec![0.0; 16];
        assert!(!FractionalDelay::default().add_into(&mut out, 14.5, 1.0));
    }
}
