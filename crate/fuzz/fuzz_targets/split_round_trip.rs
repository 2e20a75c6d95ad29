#![no_main]

use libfuzzer_sys::fuzz_target;
use nsplit::codec::{reconstruct_files, split_file};
use nsplit::SchemeParams;

// Bytes 0..3 pick the scheme, the layout, and which modules survive; the rest
// is the file.
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let n = u32::from(data[0] % 16) + 1;
    let m = u32::from(data[1]) % n + 1;
    let optimized = data[2] & 1 != 0;
    let params = SchemeParams::new(n, m).unwrap();
    let file = &data[3..];
    let modules = split_file(file, params, optimized).unwrap();

    // rotate the surviving window by a data-dependent offset
    let start = (data[2] >> 1) as usize % modules.len();
    let survivors: Vec<&Vec<u8>> = (0..m as usize)
        .map(|i| &modules[(start + i) % modules.len()])
        .collect();
    assert_eq!(reconstruct_files(&survivors).unwrap(), file);
});
