//! Threshold file splitting by element placement.
//!
//! A file is cut into `R` near-equal elements and each of `n` module files
//! receives `K` of them, so that any `m` modules together hold every element.
//! No arithmetic is done on the data itself: splitting is slicing, rebuilding
//! is concatenation.
//!
//! ```
//! use nsplit::{codec, SchemeParams};
//!
//! let params = SchemeParams::new(5, 3).unwrap();
//! let modules = codec::split_file(b"some file contents", params, false).unwrap();
//! let rebuilt = codec::reconstruct_files(&[&modules[0], &modules[2], &modules[4]]).unwrap();
//! assert_eq!(rebuilt, b"some file contents");
//! ```

pub mod chunker;
pub mod cli;
pub mod codec;
pub mod container;
pub mod error;
pub mod layout;
pub mod reliability;
pub mod scheme;

pub use error::{
    CodecError, FormatError, LayoutError, PartitionError, ReliabilityError, SchemeError,
};
pub use scheme::SchemeParams;
