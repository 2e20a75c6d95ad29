//! On-disk format of one module file.
//!
//! A module is a fixed 24-byte header followed by the payload: the bytes of
//! the elements in that module's layout row, concatenated in row order.
//! Element ids and sizes are never stored; they follow from the header.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "NSP1"
//!      4     1  version (1)
//!      5     1  flags (bit 0: optimized ordering; other bits must be 0)
//!      6     2  n
//!      8     2  m
//!     10     2  position, 1-based, in the ordering in effect
//!     12     8  original file length
//!     20     4  CRC-32 (IEEE) of the whole original file
//! ```
//!
//! All integers are little-endian.

use serde::Serialize;

use crate::chunker::element_size;
use crate::error::FormatError;
use crate::layout::EffectiveLayout;
use crate::scheme::SchemeParams;

pub const MAGIC: [u8; 4] = *b"NSP1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 24;
pub const FLAG_OPTIMIZED: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModuleHeader {
    pub flags: u8,
    pub n: u16,
    pub m: u16,
    pub position: u16,
    pub original_length: u64,
    pub checksum: u32,
}

impl ModuleHeader {
    pub fn is_optimized(&self) -> bool {
        self.flags & FLAG_OPTIMIZED != 0
    }

    pub fn params(&self) -> Result<SchemeParams, FormatError> {
        SchemeParams::new(u32::from(self.n), u32::from(self.m))
            .map_err(|_| FormatError::FieldRange(format!("n = {}, m = {}", self.n, self.m)))
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        self.params()?;
        if self.position == 0 || self.position > self.n {
            return Err(FormatError::FieldRange(format!(
                "position {} not in 1..={}",
                self.position, self.n
            )));
        }
        if self.flags & !FLAG_OPTIMIZED != 0 {
            return Err(FormatError::FieldRange(format!(
                "reserved flag bits set: {:#04x}",
                self.flags
            )));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = self.flags;
        out[6..8].copy_from_slice(&self.n.to_le_bytes());
        out[8..10].copy_from_slice(&self.m.to_le_bytes());
        out[10..12].copy_from_slice(&self.position.to_le_bytes());
        out[12..20].copy_from_slice(&self.original_length.to_le_bytes());
        out[20..24].copy_from_slice(&self.checksum.to_le_bytes());
        out
    }

    /// Decodes and validates a header from the first 24 bytes of `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let bytes: &[u8; HEADER_LEN] = bytes
            .get(..HEADER_LEN)
            .and_then(|b| b.try_into().ok())
            .ok_or(FormatError::TruncatedHeader(bytes.len()))?;
        let magic = [bytes[0], bytes[1], bytes[2], bytes[3]];
        if magic != MAGIC {
            return Err(FormatError::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(FormatError::UnsupportedVersion(bytes[4]));
        }
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        let header = ModuleHeader {
            flags: bytes[5],
            n: u16_at(6),
            m: u16_at(8),
            position: u16_at(10),
            original_length: u64::from_le_bytes(bytes[12..20].try_into().unwrap()),
            checksum: u32::from_le_bytes(bytes[20..24].try_into().unwrap()),
        };
        header.validate()?;
        Ok(header)
    }
}

/// Payload length required by the header: the summed sizes of the elements in
/// row `position` of the layout in effect.
pub fn expected_payload_len(header: &ModuleHeader) -> Result<u64, FormatError> {
    header.validate()?;
    let params = header.params()?;
    let layout = EffectiveLayout::new(params, header.is_optimized())
        .map_err(|e| FormatError::FieldRange(e.to_string()))?;
    let row = layout
        .row(u32::from(header.position))
        .map_err(|e| FormatError::FieldRange(e.to_string()))?;
    let count = params.element_count();
    Ok(row
        .iter()
        .map(|&e| element_size(header.original_length, count, e))
        .sum())
}

pub fn write_module(header: &ModuleHeader, payload: &[u8]) -> Result<Vec<u8>, FormatError> {
    let expected = expected_payload_len(header)?;
    if expected != payload.len() as u64 {
        return Err(FormatError::PayloadLength {
            expected,
            actual: payload.len() as u64,
        });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(payload);
    Ok(out)
}

pub fn parse_module(bytes: &[u8]) -> Result<(ModuleHeader, &[u8]), FormatError> {
    let header = ModuleHeader::from_bytes(bytes)?;
    let payload = &bytes[HEADER_LEN..];
    let expected = expected_payload_len(&header)?;
    if expected != payload.len() as u64 {
        return Err(FormatError::PayloadLength {
            expected,
            actual: payload.len() as u64,
        });
    }
    Ok((header, payload))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(position: u16) -> ModuleHeader {
        ModuleHeader {
            flags: FLAG_OPTIMIZED,
            n: 5,
            m: 3,
            position,
            original_length: 10,
            checksum: 0,
        }
    }

    #[test]
    fn header_bytes_by_hand() {
        let bytes = write_module(&header(1), &[0; 6]).unwrap();
        assert_eq!(
            &bytes[..HEADER_LEN],
            &[
                0x4E, 0x53, 0x50, 0x31, 0x01, 0x01, 0x05, 0x00, 0x03, 0x00, 0x01, 0x00, 0x0A, 0x00,
                0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00
            ]
        );
        assert_eq!(bytes.len(), HEADER_LEN + 6);
    }

    #[test]
    fn empty_file_module_is_header_only() {
        let h = ModuleHeader {
            original_length: 0,
            ..header(2)
        };
        let bytes = write_module(&h, &[]).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN);
        assert_eq!(parse_module(&bytes).unwrap(), (h, &[][..]));
    }

    #[test]
    fn payload_length_checked_on_write() {
        assert_eq!(
            write_module(&header(1), &[0; 5]),
            Err(FormatError::PayloadLength {
                expected: 6,
                actual: 5
            })
        );
    }

    #[test]
    fn distinct_error_kinds() {
        let good = write_module(&header(3), &[7; 6]).unwrap();

        assert_eq!(
            parse_module(&good[..10]),
            Err(FormatError::TruncatedHeader(10))
        );

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(parse_module(&bad), Err(FormatError::BadMagic(_))));

        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(parse_module(&bad), Err(FormatError::UnsupportedVersion(2)));

        for (offset, value) in [
            (5, 0x02),
            (6, 0x00),
            (8, 0x06),
            (8, 0x00),
            (10, 0x00),
            (10, 0x06),
        ] {
            let mut bad = good.clone();
            bad[offset] = value;
            assert!(
                matches!(parse_module(&bad), Err(FormatError::FieldRange(_))),
                "offset {offset}"
            );
        }

        assert!(matches!(
            parse_module(&good[..good.len() - 1]),
            Err(FormatError::PayloadLength { .. })
        ));
        let mut long = good.clone();
        long.push(0);
        assert!(matches!(
            parse_module(&long),
            Err(FormatError::PayloadLength { .. })
        ));
    }

    #[test]
    fn unoptimized_row_sizes() {
        // L=11, R=5 gives sizes [3,2,2,2,2]; row 1 unoptimized is {1,2,4}
        let h = ModuleHeader {
            flags: 0,
            original_length: 11,
            ..header(1)
        };
        assert_eq!(expected_payload_len(&h), Ok(7));
    }
}
