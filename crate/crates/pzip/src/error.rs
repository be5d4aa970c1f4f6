//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value was passed to the bit writer that does not fit its field.
    #[error("value {value:#x} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: u32 },

    /// A bit stream or container ended before the declared content did.
    #[error("stream ended early")]
    Truncated,

    /// The first bytes of a container did not match the expected magic.
    #[error("bad magic, expected {}", String::from_utf8_lossy(expected))]
    BadMagic { expected: [u8; 4] },

    /// A structurally invalid container (mismatched lengths, impossible
    /// field values, trailing garbage, ...).
    #[error("corrupt container: {0}")]
    Corrupt(String),

    /// Huffman construction needs at least one nonzero count.
    #[error("frequency table has no nonzero counts")]
    EmptyFrequencyTable,

    /// A byte appeared in the data that the code table cannot encode.
    #[error("symbol {0:#04x} has no code")]
    SymbolWithoutCode(u8),

    /// Code lengths whose implied codes overflow the code space.
    #[error("code lengths violate the Kraft inequality")]
    KraftViolation,

    /// A code length exceeded the cap that keeps codewords in one u64.
    #[error("code length {0} exceeds the cap")]
    CodeTooLong(u32),

    /// The decoder walked off the end of the code space.
    #[error("invalid prefix while decoding")]
    InvalidPrefix,

    /// Block transforms need at least one byte.
    #[error("empty block")]
    EmptyBlock,

    /// A transform index pointed outside its block.
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: u32, len: usize },

    /// Rejected configuration (window sizes, worker counts, budgets, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An LZSS reference reached outside the window it was scoped to.
    #[error("reference extends outside the window")]
    ReferenceOutOfWindow,

    /// Failure while processing one segment of a parallel job.
    #[error("chunk {id}: {source}")]
    Chunk {
        id: u32,
        #[source]
        source: Box<Error>,
    },

    /// Failure while encoding or decoding one audio frame.
    #[error("frame {index}: {source}")]
    Frame {
        index: u32,
        #[source]
        source: Box<Error>,
    },

    /// Stored and recomputed frame checksums disagree.
    #[error("crc mismatch (stored {stored:#06x}, computed {computed:#06x})")]
    CrcMismatch { stored: u16, computed: u16 },

    /// WAV input the reader does not handle (non-PCM, exotic layouts).
    #[error("unsupported wav: {0}")]
    UnsupportedWav(String),

    /// The frame bit budget cannot even cover fixed headers.
    #[error("bit budget {budget} below fixed cost {fixed}")]
    BudgetInfeasible { budget: u64, fixed: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the segment id it came from.
    pub(crate) fn in_chunk(self, id: u32) -> Error {
        Error::Chunk {
            id,
            source: Box::new(self),
        }
    }

    /// Wrap an error with the audio frame index it came from.
    pub(crate) fn in_frame(self, index: u32) -> Error {
        Error::Frame {
            index,
            source: Box::new(self),
        }
    }
}
