#![no_main]

use helton_howe::io::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(g) = parse_grid(data) {
        assert!(g.cell_area() > 0.0);
    }
});
