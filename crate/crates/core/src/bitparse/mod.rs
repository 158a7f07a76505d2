//! Native H.264 Annex-B parser: baseline profile, CAVLC entropy coding,
//! progressive I/P slices, down to per-macroblock motion vectors.
//!
//! The parser reconstructs final motion vectors (prediction + decoded
//! differences) and classifies macroblocks as intra, inter or skip. Residual
//! coefficient syntax is fully parsed to keep bit alignment but the
//! coefficient values are discarded; there is no pixel reconstruction.
//!
//! B slices, CABAC, interlace and multiple slice groups are out of scope for
//! the native path; streams using them are rejected with typed errors, and
//! their motion data can instead be ingested through the sidecar dump format
//! (see [`crate::ingest::mvdump`]).

pub mod bits;
pub mod cavlc;
pub mod fixture;
pub mod macroblock;
pub mod nal;
pub mod params;
pub mod predict;
pub mod slice;
pub mod stream;

pub use bits::{BitReader, BitString, BitWriter};
pub use macroblock::{MacroblockRecord, MbKind, MvDirection, PartitionMv};
pub use nal::{split_annexb, NalUnit};
pub use params::{PicParamSet, SeqParamSet};
pub use slice::{SliceHeader, SliceType};
pub use stream::{parse_stream, FrameKind, ParsedFrame, ParsedStream};

use thiserror::Error;

/// Typed failure modes of the native parser.
///
/// Errors carry enough position context to be actionable; per the module
/// contract a malformed slice is skippable (the stream-level driver reports
/// it and continues with the next NAL).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitparseError {
    #[error("bit cursor ran past end of buffer at bit {bit}")]
    OutOfBits { bit: usize },
    #[error("exp-golomb code exceeds 32 bits at bit {bit}")]
    CodeTooLong { bit: usize },
    #[error("truncated stream: start code at byte {offset} with no NAL header")]
    TruncatedStream { offset: usize },
    #[error("malformed NAL header: {reason}")]
    MalformedHeader { reason: &'static str },
    #[error("unsupported feature: {feature}")]
    UnsupportedFeature { feature: &'static str },
    #[error("malformed {what}: {reason} (bit {bit})")]
    Malformed { what: &'static str, reason: &'static str, bit: usize },
    #[error("malformed slice: {reason} at macroblock {mb_addr}")]
    MalformedSlice { reason: &'static str, mb_addr: u32 },
    #[error("bitstream desync: decoded {got} macroblocks, expected {expected}")]
    BitstreamDesync { got: u32, expected: u32 },
    #[error("missing parameter set: {what} id {id}")]
    MissingParamSet { what: &'static str, id: u32 },
    #[error("field out of range: {field} = {value}")]
    FieldOutOfRange { field: &'static str, value: i64 },
}
