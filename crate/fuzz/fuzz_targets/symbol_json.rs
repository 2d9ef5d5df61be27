#![no_main]

use helton_howe::io::{parse_symbol_json, symbol_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(phi) = parse_symbol_json(data) {
        // anything accepted must survive a write/read cycle
        let text = symbol_to_json(&phi);
        let back = parse_symbol_json(&text).unwrap();
        assert_eq!(back.band(), phi.band());
    }
});
