use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by analysis, synthesis and evaluation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArgument(String),
    /// Input without any sample above the onset threshold.
    NoOnset,
    DegenerateInput(String),
    /// A metric band with zero energy in one channel.
    DegenerateBand { band: usize, center_hz: f64 },
    UnsupportedGeometry(String),
    NotFound(String),
    /// A loudspeaker triplet whose basis cannot be inverted.
    NumericalDegeneracy { triangle: [usize; 3] },
    /// Loudspeaker directions without an HRIR within the matching tolerance.
    MissingHrir { loudspeakers: Vec<usize> },
    InsufficientDecay { band_hz: f64, range_db: f64 },
    Configuration(String),
    /// A failure inside one pipeline condition.
    Condition { id: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn in_condition(self, id: &str) -> Self {
        Error::Condition { id: id.into(), source: Box::new(self) }
    }

    /// True for errors that stem from configuration rather than data.
    pub fn is_configuration(&self) -> bool {
        match self {
            Error::Configuration(_) => true,
            Error::Condition { source, .. } => source.is_configuration(),
            _ => false,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::NoOnset => write!(f, "no onset found: input is silent"),
            Error::DegenerateInput(m) => write!(f, "degenerate input: {m}"),
            Error::DegenerateBand { band, center_hz } => {
                write!(f, "band {band} ({center_hz:.1} Hz) has zero energy")
            }
            Error::UnsupportedGeometry(m) => write!(f, "unsupported geometry: {m}"),
            Error::NotFound(m) => write!(f, "not found: {m}"),
            Error::NumericalDegeneracy { triangle } => write!(
                f,
                "loudspeaker triplet {:?} is numerically degenerate",
                triangle
            ),
            Error::MissingHrir { loudspeakers } => {
                write!(f, "no HRIR close to loudspeakers {loudspeakers:?}")
            }
            Error::InsufficientDecay { band_hz, range_db } => write!(
                f,
                "insufficient decay range in {band_hz} Hz band: {range_db:.1} dB"
            ),
            Error::Configuration(m) => write!(f, "configuration error: {m}"),
            Error::Condition { id, source } => write!(f, "condition '{id}': {source}"),
        }
    }
}

impl core::error::Error for Error {}
