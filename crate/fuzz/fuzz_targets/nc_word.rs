#![no_main]

use helton_howe::operator::NCWord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = NCWord::parse(data);
});
