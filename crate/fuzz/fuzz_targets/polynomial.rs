#![no_main]

use helton_howe::measure::{jacobian_bracket, BivariatePolynomial};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(p) = BivariatePolynomial::parse(data) {
        let _ = p.eval(0.5, -0.25);
        let _ = jacobian_bracket(&p, &p);
    }
});
