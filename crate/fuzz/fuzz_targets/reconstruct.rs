#![no_main]

use libfuzzer_sys::fuzz_target;
use nsplit::codec::{checksum, reconstruct_files};
use nsplit::container::parse_module;

// Input is a sequence of modules, each prefixed by a little-endian u16 length.
fuzz_target!(|data: &[u8]| {
    let mut files = Vec::new();
    let mut rest = data;
    while rest.len() >= 2 && files.len() < 64 {
        let len = u16::from_le_bytes([rest[0], rest[1]]) as usize;
        rest = &rest[2..];
        let take = len.min(rest.len());
        files.push(&rest[..take]);
        rest = &rest[take..];
    }
    if let Ok(out) = reconstruct_files(&files) {
        assert_eq!(checksum(&out), parse_module(files[0]).unwrap().0.checksum);
    }
});
