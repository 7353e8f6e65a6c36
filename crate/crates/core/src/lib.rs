//! Spatial room impulse response analysis and binaural resynthesis.
//!
//! The crate is `no_std` and needs only `alloc`. It covers the whole signal
//! path from a measured or simulated multichannel impulse response to a
//! binaural room impulse response and its objective evaluation:
//!
//! * [`dsp`]: STFT, FFT convolution, cross-correlation, ERB and octave
//!   filterbanks, onset detection, direct-energy normalization and
//!   exponential sine sweep measurement.
//! * [`geometry`]: microphone arrays, first-order encoding, loudspeaker grids,
//!   VBAP, nearest-direction queries and a spherical-head HRIR model.
//! * [`doa`]: TDOA least-squares and pseudo-intensity direction estimation.
//! * [`synthesis`]: SDM and SIRR virtual loudspeaker synthesis and binaural
//!   rendering.
//! * [`metrics`]: ILD, ITD, IACC, T30 and error summaries.
//! * [`ism`]: a shoebox image-source simulator used as ground truth.
//! * [`pipeline`]: end-to-end system conditions and comparisons.
//!
//! IO, the command-line front end and parallel batch execution live in the
//! `srir-tools` crate.

#![no_std]
// `num_traits::Float` supplies float methods under no_std; once std is linked
// (tests, or any std dependent) its inherent methods make those imports unused.
#![allow(unused_imports)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod doa;
pub mod dsp;
pub mod error;
pub mod geometry;
pub mod ism;
pub mod math;
pub mod metrics;
pub mod pipeline;
pub mod signal;
pub mod synthesis;

pub use error::{Error, Result};
pub use math::Vec3;
pub use signal::{BinauralIr, MonoIr, MultichannelIr};
