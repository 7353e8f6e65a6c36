//! Signal-processing primitives shared by analysis, synthesis and metrics.

pub mod convolve;
pub mod correlate;
pub mod ess;
pub mod fft;
pub mod filterbank;
pub mod filters;
pub mod fractional_delay;
pub mod onset;
pub mod stft;

pub use convolve::fft_convolve;
pub use correlate::{cross_correlate, Weighting};
pub use ess::{deconvolve_ess, generate_ess};
pub use filterbank::{erb_filterbank, octave_filter, FilterbankKind, FilterbankSpec};
pub use onset::{detect_onset, normalize_direct_energy};
pub use stft::{istft, stft, StftFrames};
