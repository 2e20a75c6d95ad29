use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("invalid scheme ({n}, {m}): need 1 <= m <= n")]
    InvalidParams { n: u32, m: u32 },
    #[error("scale factor must be at least 1")]
    ZeroScale,
    #[error("scaled scheme does not fit in 32 bits")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("cell ({row}, {column}) is outside a {rows}x{columns} table")]
    OutOfRange {
        row: u32,
        column: u32,
        rows: u32,
        columns: u32,
    },
    #[error("module ordering for scheme ({n}, {m}) is not a permutation")]
    UnsupportedScheme { n: u32, m: u32 },
    #[error("element {element} is not in old row {row}; ordering and table disagree")]
    Inconsistent { element: u32, row: u32 },
    #[error("table is already optimized")]
    AlreadyOptimized,
    #[error("ordering was built for a different scheme")]
    SchemeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("element count must be at least 1")]
    ZeroElements,
    #[error("element {element} is out of range 1..={count}")]
    ElementOutOfRange { element: u32, count: u32 },
    #[error("data is {actual} bytes but the partition expects {expected}")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("element {0} is missing")]
    MissingElement(u32),
}

/// Ways a module file can fail to parse. Each is a separate kind so callers
/// can report precisely what is wrong.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("file is {0} bytes, shorter than the 24-byte header")]
    TruncatedHeader(usize),
    #[error("bad magic {0:02x?}, expected \"NSP1\"")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("header field out of range: {0}")]
    FieldRange(String),
    #[error("payload is {actual} bytes, layout requires {expected}")]
    PayloadLength { expected: u64, actual: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("no modules given")]
    Empty,
    #[error("module headers disagree on {0}")]
    InconsistentHeaders(&'static str),
    #[error("position {0} appears more than once")]
    DuplicatePosition(u16),
    #[error("cannot reconstruct, missing elements {0:?}")]
    Infeasible(BTreeSet<u32>),
    #[error("checksum mismatch: header says {expected:08x}, rebuilt data has {actual:08x}")]
    ChecksumMismatch { expected: u32, actual: u32 },
    #[error("scheme ({n}, {m}) does not fit the module header")]
    SchemeTooLarge { n: u32, m: u32 },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReliabilityError {
    #[error("probability {0} is not in [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("at least one trial is required")]
    NoTrials,
}
