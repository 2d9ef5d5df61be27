// Stable-toolchain stand-in for the fuzz targets: parsers must reject junk
// with an error, never a panic. Seeds from the fuzz corpus are replayed too.
use helton_howe::io::{parse_grid, parse_matrix_csv, parse_symbol_json, symbol_to_json};
use helton_howe::measure::BivariatePolynomial;
use helton_howe::operator::NCWord;
use proptest::prelude::*;

fn exercise(s: &str) {
    if let Ok(phi) = parse_symbol_json(s) {
        let back = parse_symbol_json(&symbol_to_json(&phi)).unwrap();
        assert_eq!(back.band(), phi.band());
    }
    if let Ok(p) = BivariatePolynomial::parse(s) {
        let _ = p.eval(0.5, -0.25);
    }
    let _ = parse_grid(s);
    let _ = parse_matrix_csv(s);
    let _ = NCWord::parse(s);
}

#[test]
fn corpus_seeds_parse() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for dir in std::fs::read_dir(&root).unwrap() {
        for f in std::fs::read_dir(dir.unwrap().path()).unwrap() {
            let text = std::fs::read_to_string(f.unwrap().path()).unwrap();
            exercise(&text);
            seen += 1;
        }
    }
    assert!(seen >= 10);
    assert!(parse_symbol_json(&std::fs::read_to_string(root.join("symbol_json/three_term.json")).unwrap()).is_ok());
    assert!(parse_matrix_csv(&std::fs::read_to_string(root.join("matrix_csv/dim2")).unwrap()).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,64}") {
        exercise(&s);
    }

    #[test]
    fn structured_junk_never_panics(s in "[-+0-9.,eE#a-z=\\[\\]{}\":^* \n]{0,80}") {
        exercise(&s);
    }
}
