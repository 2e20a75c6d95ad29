//! Splitting a byte sequence into `R` contiguous, near-equal elements.
//!
//! The first `L mod R` elements get one extra byte, so every boundary follows
//! from `(L, R)` alone.

use std::collections::BTreeMap;

use crate::error::PartitionError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementPartition {
    original_length: u64,
    boundaries: Vec<u64>,
}

/// Size in bytes of element `element` (1-based) when `length` bytes are split
/// into `count` elements. No bounds checks.
pub fn element_size(length: u64, count: u32, element: u32) -> u64 {
    let count = u64::from(count);
    let base = length / count;
    if u64::from(element) <= length % count {
        base + 1
    } else {
        base
    }
}

/// Byte offset where element `element` starts.
pub fn element_start(length: u64, count: u32, element: u32) -> u64 {
    let count = u64::from(count);
    let before = u64::from(element - 1);
    before * (length / count) + before.min(length % count)
}

pub fn partition(original_length: u64, big_r: u32) -> Result<ElementPartition, PartitionError> {
    if big_r == 0 {
        return Err(PartitionError::ZeroElements);
    }
    let boundaries = (1..=big_r + 1)
        .map(|e| element_start(original_length, big_r, e))
        .collect();
    Ok(ElementPartition {
        original_length,
        boundaries,
    })
}

impl ElementPartition {
    pub fn original_length(&self) -> u64 {
        self.original_length
    }

    pub fn big_r(&self) -> u32 {
        (self.boundaries.len() - 1) as u32
    }

    /// `R + 1` offsets, starting at 0 and ending at the original length.
    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    pub fn range(&self, element: u32) -> Result<std::ops::Range<u64>, PartitionError> {
        if element == 0 || element > self.big_r() {
            return Err(PartitionError::ElementOutOfRange {
                element,
                count: self.big_r(),
            });
        }
        let e = element as usize;
        Ok(self.boundaries[e - 1]..self.boundaries[e])
    }

    pub fn size(&self, element: u32) -> Result<u64, PartitionError> {
        self.range(element).map(|r| r.end - r.start)
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn element_bytes<'a>(
    data: &'a [u8],
    partition: &ElementPartition,
    element: u32,
) -> Result<&'a [u8], PartitionError> {
    check_length(partition.original_length, data.len())?;
    let range = partition.range(element)?;
    Ok(&data[range.start as usize..range.end as usize])
}

pub fn reassemble<B: AsRef<[u8]>>(
    elements: &BTreeMap<u32, B>,
    partition: &ElementPartition,
) -> Result<Vec<u8>, PartitionError> {
    let mut out = Vec::with_capacity(partition.original_length as usize);
    for element in 1..=partition.big_r() {
        let bytes = elements
            .get(&element)
            .ok_or(PartitionError::MissingElement(element))?
            .as_ref();
        let expected = partition.size(element)?;
        check_length(expected, bytes.len())?;
        out.extend_from_slice(bytes);
    }
    Ok(out)
}

fn check_length(expected: u64, actual: usize) -> Result<(), PartitionError> {
    if expected != actual as u64 {
        return Err(PartitionError::LengthMismatch {
            expected,
            actual: actual as u64,
        });
    }
    Ok(())
}
