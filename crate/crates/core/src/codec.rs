//! Split a file into module files and rebuild it from any sufficient subset.

use std::collections::{BTreeMap, BTreeSet};

use crate::chunker::{element_bytes, element_size, partition, reassemble};
use crate::container::{parse_module, write_module, ModuleHeader, FLAG_OPTIMIZED};
use crate::error::{CodecError, FormatError};
use crate::layout::EffectiveLayout;
use crate::scheme::SchemeParams;

/// Where to read each element from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionPlan {
    pub params: SchemeParams,
    pub optimized: bool,
    pub original_length: u64,
    pub checksum: u32,
    /// element id -> (module position, byte offset within that payload)
    pub assignments: BTreeMap<u32, (u16, u64)>,
    pub missing: BTreeSet<u32>,
}

impl ReconstructionPlan {
    pub fn is_feasible(&self) -> bool {
        self.missing.is_empty()
    }
}

pub fn checksum(data: &[u8]) -> u32 {
    crc32fast::hash(data)
}

/// Produces the `n` module files, in position order.
pub fn split_file(
    data: &[u8],
    params: SchemeParams,
    optimized: bool,
) -> Result<Vec<Vec<u8>>, CodecError> {
    let too_large = || CodecError::SchemeTooLarge {
        n: params.n(),
        m: params.m(),
    };
    let n = u16::try_from(params.n()).map_err(|_| too_large())?;
    let m = u16::try_from(params.m()).map_err(|_| too_large())?;
    let layout = EffectiveLayout::new(params, optimized)?;
    let parts = partition(data.len() as u64, params.element_count())?;
    let crc = checksum(data);

    (1..=n)
        .map(|position| {
            let header = ModuleHeader {
                flags: if optimized { FLAG_OPTIMIZED } else { 0 },
                n,
                m,
                position,
                original_length: data.len() as u64,
                checksum: crc,
            };
            let mut payload = Vec::new();
            for element in layout.row(u32::from(position))? {
                payload.extend_from_slice(element_bytes(data, &parts, element)?);
            }
            Ok(write_module(&header, &payload)?)
        })
        .collect()
}

fn common_header(headers: &[ModuleHeader]) -> Result<ModuleHeader, CodecError> {
    let first = *headers.first().ok_or(CodecError::Empty)?;
    for h in &headers[1..] {
        let field = if (h.n, h.m) != (first.n, first.m) {
            Some("scheme")
        } else if h.flags != first.flags {
            Some("flags")
        } else if h.original_length != first.original_length {
            Some("original length")
        } else if h.checksum != first.checksum {
            Some("checksum")
        } else {
            None
        };
        if let Some(field) = field {
            return Err(CodecError::InconsistentHeaders(field));
        }
    }
    Ok(first)
}

/// Picks, for each element, the lowest available position holding it.
pub fn plan_reconstruction(headers: &[ModuleHeader]) -> Result<ReconstructionPlan, CodecError> {
    let first = common_header(headers)?;
    for h in headers {
        h.validate()?;
    }
    let mut positions: Vec<u16> = headers.iter().map(|h| h.position).collect();
    positions.sort_unstable();
    if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
        return Err(CodecError::DuplicatePosition(w[0]));
    }

    let params = first.params()?;
    let count = params.element_count();
    let layout = EffectiveLayout::new(params, first.is_optimized())?;
    let mut assignments = BTreeMap::new();
    for &position in &positions {
        let mut offset = 0;
        for element in layout.row(u32::from(position))? {
            assignments.entry(element).or_insert((position, offset));
            offset += element_size(first.original_length, count, element);
        }
    }
    let missing = (1..=count)
        .filter(|e| !assignments.contains_key(e))
        .collect();
    Ok(ReconstructionPlan {
        params,
        optimized: first.is_optimized(),
        original_length: first.original_length,
        checksum: first.checksum,
        assignments,
        missing,
    })
}

/// Rebuilds the original bytes from parsed modules and verifies the CRC.
pub fn reconstruct(modules: &[(ModuleHeader, &[u8])]) -> Result<Vec<u8>, CodecError> {
    let headers: Vec<ModuleHeader> = modules.iter().map(|(h, _)| *h).collect();
    let plan = plan_reconstruction(&headers)?;
    if !plan.is_feasible() {
        return Err(CodecError::Infeasible(plan.missing));
    }
    let parts = partition(plan.original_length, plan.params.element_count())?;
    let layout = EffectiveLayout::new(plan.params, plan.optimized)?;
    let payloads: BTreeMap<u16, &[u8]> = modules.iter().map(|(h, p)| (h.position, *p)).collect();
    for (&position, payload) in &payloads {
        let expected: u64 = layout
            .row(u32::from(position))?
            .iter()
            .map(|&e| parts.size(e))
            .sum::<Result<u64, _>>()?;
        if expected != payload.len() as u64 {
            return Err(FormatError::PayloadLength {
                expected,
                actual: payload.len() as u64,
            }
            .into());
        }
    }

    let mut elements = BTreeMap::new();
    for (&element, &(position, offset)) in &plan.assignments {
        let size = parts.size(element)?;
        let start = offset as usize;
        elements.insert(element, &payloads[&position][start..start + size as usize]);
    }
    let data = reassemble(&elements, &parts)?;
    let actual = checksum(&data);
    if actual != plan.checksum {
        return Err(CodecError::ChecksumMismatch {
            expected: plan.checksum,
            actual,
        });
    }
    Ok(data)
}

/// Parses raw module files and rebuilds the original.
pub fn reconstruct_files<B: AsRef<[u8]>>(files: &[B]) -> Result<Vec<u8>, CodecError> {
    let modules = files
        .iter()
        .map(|f| parse_module(f.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    reconstruct(&modules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::HEADER_LEN;

    fn s(n: u32, m: u32) -> SchemeParams {
        SchemeParams::new(n, m).unwrap()
    }

    fn headers(files: &[Vec<u8>], positions: &[u16]) -> Vec<ModuleHeader> {
        positions
            .iter()
            .map(|&p| parse_module(&files[p as usize - 1]).unwrap().0)
            .collect()
    }

    #[test]
    fn first_module_holds_elements_one_two_four() {
        let data = b"ABCDEFGHIJ";
        let files = split_file(data, s(5, 3), false).unwrap();
        assert_eq!(files.len(), 5);
        assert_eq!(&files[0][HEADER_LEN..], b"ABCDGH");
    }

    #[test]
    fn single_module_is_whole_file() {
        let data = b"hello world";
        let files = split_file(data, s(1, 1), false).unwrap();
        assert_eq!(&files[0][HEADER_LEN..], data);
        assert_eq!(reconstruct_files(&files).unwrap(), data);
    }

    #[test]
    fn total_payload_is_redundancy_times_length() {
        let data: Vec<u8> = (0..100u8).collect();
        let files = split_file(&data, s(7, 4), true).unwrap();
        let total: usize = files.iter().map(|f| f.len() - HEADER_LEN).sum();
        assert_eq!(total, 400);
    }

    #[test]
    fn plans() {
        let files = split_file(b"ABCDEFGHIJ", s(5, 3), false).unwrap();
        let plan = plan_reconstruction(&headers(&files, &[1, 4])).unwrap();
        assert!(plan.is_feasible());
        assert_eq!(plan.assignments[&3], (4, 2));
        let plan = plan_reconstruction(&headers(&files, &[3, 2, 1])).unwrap();
        assert!(plan.is_feasible());
        assert_eq!(plan.assignments[&1], (1, 0));
        let plan = plan_reconstruction(&headers(&files, &[1, 2])).unwrap();
        assert_eq!(plan.missing, BTreeSet::from([5]));

        let files = split_file(b"abcdef", s(6, 6), false).unwrap();
        let plan = plan_reconstruction(&headers(&files, &[1, 2, 3, 5, 6])).unwrap();
        assert_eq!(plan.missing, BTreeSet::from([4]));
    }

    #[test]
    fn consecutive_optimized_pair() {
        let data = b"The quick brown fox";
        let files = split_file(data, s(5, 3), true).unwrap();
        assert_eq!(reconstruct_files(&files[1..3]).unwrap(), data);
    }

    #[test]
    fn rejects_bad_sets() {
        let files = split_file(b"ABCDEFGHIJ", s(5, 3), false).unwrap();
        assert_eq!(
            reconstruct_files(&files[..2]),
            Err(CodecError::Infeasible(BTreeSet::from([5])))
        );
        assert_eq!(
            reconstruct_files(&[files[0].clone(), files[0].clone(), files[1].clone()]),
            Err(CodecError::DuplicatePosition(1))
        );
        let other = split_file(b"ABCDEFGHIJ", s(5, 3), true).unwrap();
        assert_eq!(
            reconstruct_files(&[files[0].clone(), other[1].clone(), files[2].clone()]),
            Err(CodecError::InconsistentHeaders("flags"))
        );
        let other = split_file(b"ABCDEFGHIK", s(5, 3), false).unwrap();
        assert_eq!(
            reconstruct_files(&[files[0].clone(), other[1].clone(), files[2].clone()]),
            Err(CodecError::InconsistentHeaders("checksum"))
        );
        assert_eq!(reconstruct_files::<Vec<u8>>(&[]), Err(CodecError::Empty));
    }

    #[test]
    fn payload_corruption_fails_checksum() {
        let mut files = split_file(b"ABCDEFGHIJ", s(5, 3), false).unwrap();
        files[0][HEADER_LEN] ^= 0xFF;
        assert!(matches!(
            reconstruct_files(&files[..3]),
            Err(CodecError::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn too_large_for_header() {
        assert!(matches!(
            split_file(b"", s(70_000, 1), false),
            Err(CodecError::SchemeTooLarge { .. })
        ));
    }
}
