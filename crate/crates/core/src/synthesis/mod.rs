//! Virtual loudspeaker synthesis (SDM, SIRR) and binaural rendering.

mod binaural;
mod decorrelate;
mod sdm;
mod sirr;
mod vls;

pub use binaural::{binaural_render, match_hrirs, HRIR_MATCH_TOLERANCE_DEG};
pub use decorrelate::{decorrelate, DECORRELATOR_TAPS};
pub use sdm::sdm_synthesize;
pub use sirr::{sirr_streams, sirr_synthesize, SirrStreams};
pub use vls::{ChannelBuffer, VirtualLoudspeakerSignals};
