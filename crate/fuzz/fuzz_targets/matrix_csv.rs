#![no_main]

use helton_howe::io::parse_matrix_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = parse_matrix_csv(data);
});
