#![no_main]

use libfuzzer_sys::fuzz_target;
use nsplit::container::{parse_module, write_module};

fuzz_target!(|data: &[u8]| {
    // Anything that parses must re-encode to the same bytes.
    if let Ok((header, payload)) = parse_module(data) {
        let bytes = write_module(&header, payload).expect("parsed module re-encodes");
        assert_eq!(bytes, data);
    }
});
