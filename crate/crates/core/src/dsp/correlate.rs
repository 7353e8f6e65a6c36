//! Cross-correlation and lag estimation.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::FftPlan;
use crate::error::{Error, Result};
use crate::math::parabolic_offset;
use crate::signal::MonoIr;

/// Spectral weighting applied before lag search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Weighting {
    /// Plain cross-correlation.
    #[default]
    None,
    Phat,
}

/// Raw correlation `r[τ] = Σ a[n]·b[n+τ]` for `τ ∈ [-max_lag, max_lag]`,
/// stored at index `τ + max_lag`. A positive peak lag means `b` lags `a`.
pub fn correlate_slices(a: &[f64], b: &[f64], max_lag: usize) -> Vec<f64> {
    let n = a.len().min(b.len());
    let lag = max_lag as isize;
    (-lag..=lag)
        .map(|tau| {
            let (lo, hi) = if tau >= 0 {
                (0, n.saturating_sub(tau as usize))
            } else {
                ((-tau) as usize, n)
            };
            let mut acc = 0.0;
            for i in lo..hi {
                acc += a[i] * b[(i as isize + tau) as usize];
            }
            acc
        })
        .collect()
}

/// PHAT-weighted generalized cross-correlation with the same lag layout.
pub fn gcc_phat_slices(a: &[f64], b: &[f64], max_lag: usize) -> Vec<f64> {
    let n = a.len().min(b.len());
    let plan = FftPlan::new((2 * n).next_power_of_two().max(2));
    let fa = plan.forward_real(&a[..n]);
    let fb = plan.forward_real(&b[..n]);
    let cross: Vec<Complex64> = fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| {
            let c = x.conj() * y;
            let m = c.norm();
            if m > 1e-300 {
                c / m
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let r = plan.inverse_real(&cross);
    let len = plan.len();
    (-(max_lag as isize)..=max_lag as isize)
        .map(|tau| r[(tau.rem_euclid(len as isize)) as usize])
        .collect()
}

pub fn cross_correlate(a: &MonoIr, b: &MonoIr, max_lag: usize) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("cross-correlation of an empty signal"));
    }
    if a.len() != b.len() {
        return Err(Error::invalid("cross-correlation operands differ in length"));
    }
    if max_lag >= a.len() {
        return Err(Error::invalid("maximum lag must be shorter than the signal"));
    }
    Ok(correlate_slices(a.samples(), b.samples(), max_lag))
}

/// Lag (in samples) of the largest correlation value, optionally refined by
/// a three-point parabola. With `absolute`, the magnitude is searched.
/// Ties resolve to the smallest |lag|, then the negative side.
pub fn peak_lag(corr: &[f64], max_lag: usize, refine: bool, absolute: bool) -> f64 {
    debug_assert_eq!(corr.len(), 2 * max_lag + 1);
    let value = |i: usize| if absolute { corr[i].abs() } else { corr[i] };
    let mut best = max_lag;
    for i in 0..corr.len() {
        let (vi, vb) = (value(i), value(best));
        let closer = (i as isize - max_lag as isize).abs() < (best as isize - max_lag as isize).abs();
        if vi > vb || (vi == vb && closer) {
            best = i;
        }
    }
    let mut lag = best as f64 - max_lag as f64;
    if refine && best > 0 && best + 1 < corr.len() {
        lag += parabolic_offset(value(best - 1), value(best), value(best + 1));
    }
    lag
}
