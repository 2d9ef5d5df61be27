//! File formats: symbol JSON, matrix and grid CSV dumps, and the JSON writer
//! used for reports.
//!
//! Floats are always written with 17 significant digits so that outputs are
//! byte-stable and round-trip exactly.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::degree::{GridSpec, MultiplicityGrid};
use crate::error::{Error, Result};
use crate::measure::MeasureDensity;
use crate::operator::TruncatedMatrix;
use crate::symbol::FourierSymbol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

/// On-disk symbol description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolFile {
    FiniteBand {
        coeffs: Vec<CoeffEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_bound: Option<f64>,
    },
    Samples {
        values: Vec<[f64; 2]>,
    },
}

impl SymbolFile {
    pub fn into_symbol(self) -> Result<FourierSymbol> {
        match self {
            SymbolFile::FiniteBand { coeffs, tail_bound } => {
                let s = FourierSymbol::new(coeffs.into_iter().map(|c| (c.k, Complex64::new(c.re, c.im))))?;
                match tail_bound {
                    Some(t) => s.with_tail_bound(t),
                    None => Ok(s),
                }
            }
            SymbolFile::Samples { values } => {
                let v: Vec<Complex64> = values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                FourierSymbol::from_samples(&v)
            }
        }
    }

    pub fn from_symbol(s: &FourierSymbol) -> Self {
        SymbolFile::FiniteBand {
            coeffs: s
                .coefficients()
                .into_iter()
                .map(|(k, c)| CoeffEntry { k, re: c.re, im: c.im })
                .collect(),
            tail_bound: (!s.is_exact()).then_some(s.tail_bound()),
        }
    }
}

pub fn parse_symbol_json(text: &str) -> Result<FourierSymbol> {
    let file: SymbolFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    file.into_symbol()
}

pub fn read_symbol(path: &Path) -> Result<FourierSymbol> {
    parse_symbol_json(&std::fs::read_to_string(path)?)
}

pub fn symbol_to_json(s: &FourierSymbol) -> String {
    to_json(&SymbolFile::from_symbol(s))
}

/// `x0,x1,y0,y1,nx,ny`.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(Error::Schema(format!("grid needs 6 comma-separated fields, got {}", parts.len())));
    }
    let f = |i: usize| -> Result<f64> {
        parts[i]
            .parse::<f64>()
            .map_err(|_| Error::Schema(format!("grid field {} is not a number: '{}'", i + 1, parts[i])))
    };
    let n = |i: usize| -> Result<usize> {
        parts[i]
            .parse::<usize>()
            .map_err(|_| Error::Schema(format!("grid field {} is not a count: '{}'", i + 1, parts[i])))
    };
    GridSpec::new(f(0)?, f(1)?, f(2)?, f(3)?, n(4)?, n(5)?)
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// `# dim=N provenance=TAG`, then one row per line as `re,im` pairs.
pub fn write_matrix_csv(m: &TruncatedMatrix) -> String {
    let n = m.dim();
    let mut out = format!("# dim={n} provenance={}\n", m.provenance());
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .flat_map(|j| {
                let c = m.entry(i, j);
                [fmt_f64(c.re), fmt_f64(c.im)]
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Upper limit on the dimension accepted by [`parse_matrix_csv`].
const MAX_MATRIX_DIM: usize = 4096;

pub fn parse_matrix_csv(text: &str) -> Result<TruncatedMatrix> {
    let bad = |msg: String| Error::Schema(format!("matrix csv: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
    let rest = header
        .strip_prefix("# dim=")
        .ok_or_else(|| bad("header must start with '# dim='".into()))?;
    let (dim, provenance) = rest
        .split_once(" provenance=")
        .ok_or_else(|| bad("header lacks provenance".into()))?;
    let n: usize = dim.parse().map_err(|_| bad(format!("bad dim '{dim}'")))?;
    if n == 0 || n > MAX_MATRIX_DIM {
        return Err(bad(format!("dim {n} outside 1..={MAX_MATRIX_DIM}")));
    }
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let line = lines.next().ok_or_else(|| bad(format!("missing row {i}")))?;
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != 2 * n {
            return Err(bad(format!("row {i} has {} fields, expected {}", vals.len(), 2 * n)));
        }
        for j in 0..n {
            let p = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number '{s}'")));
            entries[(i, j)] = Complex64::new(p(vals[2 * j])?, p(vals[2 * j + 1])?);
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(bad("trailing rows".into()));
    }
    TruncatedMatrix::new(entries, provenance)
}

fn grid_header(g: &GridSpec) -> String {
    format!(
        "# box={},{},{},{} nx={} ny={}\n",
        fmt_f64(g.x0),
        fmt_f64(g.x1),
        fmt_f64(g.y0),
        fmt_f64(g.y1),
        g.nx,
        g.ny
    )
}

/// Header with the box, then `x,y,value,valid` per cell; masked cells have
/// value 0 and valid 0.
pub fn write_grid_csv(m: &MultiplicityGrid) -> String {
    let g = &m.grid;
    let mut out = grid_header(g);
    out.push_str("x,y,value,valid\n");
    for (ix, iy, v) in m.cells() {
        let w = g.center(ix, iy);
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(w.re), fmt_f64(w.im), v.unwrap_or(0), v.is_some() as u8);
    }
    out
}

/// As [`write_grid_csv`] with the density `m / (2 pi i)` split into `re,im`.
pub fn write_density_csv(d: &MeasureDensity) -> String {
    let g = d.spec();
    let mut out = grid_header(g);
    let _ = writeln!(out, "# r={} tail_bound={}", fmt_f64(d.r_used), fmt_f64(d.tail_note));
    out.push_str("x,y,re,im,valid\n");
    for (ix, iy, v) in d.grid.cells() {
        let w = g.center(ix, iy);
        let val = d.value(ix, iy).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(w.re),
            fmt_f64(w.im),
            fmt_f64(val.re),
            fmt_f64(val.im),
            v.is_some() as u8
        );
    }
    out
}

/// Compact JSON with floats written by [`fmt_f64`].
struct FixedFloat;

impl serde_json::ser::Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `v` on one line followed by a newline.
pub fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    v.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::multiplicity_grid;
    use crate::operator::toeplitz_matrix;
    use proptest::prelude::*;

    #[test]
    fn symbol_json_forms() {
        let s = parse_symbol_json(r#"{"type":"finite_band","coeffs":[{"k":1,"re":1.0,"im":0.0},{"k":-2,"re":0.0,"im":0.5}]}"#)
            .unwrap();
        assert_eq!(s.coeff(1), Complex64::new(1.0, 0.0));
        assert_eq!(s.coeff(-2), Complex64::new(0.0, 0.5));
        assert!(s.is_exact());

        let s = parse_symbol_json(r#"{"type":"finite_band","coeffs":[{"k":0,"re":2,"im":0}],"tail_bound":0.01}"#).unwrap();
        assert_eq!(s.tail_bound(), 0.01);

        let s = parse_symbol_json(r#"{"type":"samples","values":[[3,0],[3,0],[3,0],[3,0]]}"#).unwrap();
        assert_eq!(s.band(), 0);
        assert!((s.coeff(0).re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn symbol_json_rejects() {
        for bad in [
            r#"{"type":"finite_band","coeffs":[],"extra":1}"#,
            r#"{"type":"finite_band","coeffs":[{"k":1,"re":1,"im":0,"x":0}]}"#,
            r#"{"type":"samples","values":[[1,0],[1,0],[1,0]]}"#,
            r#"{"type":"wavelet"}"#,
            r#"{"coeffs":[]}"#,
            r#"{"type":"finite_band","coeffs":[],"tail_bound":-1}"#,
            "not json",
        ] {
            assert!(parse_symbol_json(bad).is_err(), "{bad}");
        }
        assert!(matches!(
            parse_symbol_json(r#"{"type":"samples","values":[[1,0],[1,0],[1,0]]}"#),
            Err(Error::SampleCount(3))
        ));
    }

    #[test]
    fn grid_flag() {
        let g = parse_grid("-1.5,1.5,-2,2,10,20").unwrap();
        assert_eq!((g.x0, g.x1, g.y0, g.y1, g.nx, g.ny), (-1.5, 1.5, -2.0, 2.0, 10, 20));
        for bad in ["", "1,2,3", "0,1,0,1,0,5", "1,0,0,1,5,5", "0,1,0,1,a,5", "0,1,0,1,5,5,5", "0,1,0,1,100000,100000"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn matrix_roundtrip() {
        let phi = FourierSymbol::new([(1, Complex64::new(0.1, 0.7)), (-2, Complex64::new(-1.0 / 3.0, 0.0))]).unwrap();
        let m = toeplitz_matrix(&phi, 5);
        let text = write_matrix_csv(&m);
        let back = parse_matrix_csv(&text).unwrap();
        assert_eq!(back.entries(), m.entries());
        assert_eq!(back.provenance(), m.provenance());
        assert!(parse_matrix_csv("# dim=2 provenance=x\n1,2,3,4\n").is_err());
        assert!(parse_matrix_csv("dim=1\n1,2\n").is_err());
    }

    #[test]
    fn grid_csv_layout() {
        let z = FourierSymbol::monomial(1, Complex64::new(1.0, 0.0));
        let g = GridSpec::new(-1.5, 1.5, -1.5, 1.5, 4, 4).unwrap();
        let m = multiplicity_grid(&z, 1.0, &g, None).unwrap();
        let csv = write_grid_csv(&m);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# box="));
        assert_eq!(lines[1], "x,y,value,valid");
        assert_eq!(lines.len(), 2 + 16);
        // cell (1,1) has center (-0.375, -0.375), inside the circle
        assert!(lines[2 + 5].ends_with(",1,1"));
    }

    #[test]
    fn json_floats_have_17_digits() {
        let s = to_json(&serde_json::json!({"a": 0.1, "b": [1.0, -2.5e-300], "n": 3}));
        assert_eq!(s, "{\"a\":1.0000000000000001e-1,\"b\":[1.0000000000000000e0,-2.5000000000000000e-300],\"n\":3}\n");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }

    proptest! {
        #[test]
        fn symbol_json_roundtrip(coeffs in proptest::collection::vec((-6i64..=6, -10.0f64..10.0, -10.0f64..10.0), 0..8)) {
            let s = FourierSymbol::new(coeffs.into_iter().map(|(k, a, b)| (k, Complex64::new(a, b)))).unwrap();
            let back = parse_symbol_json(&symbol_to_json(&s)).unwrap();
            prop_assert_eq!(back.coefficients(), s.coefficients());
        }

        #[test]
        fn fmt_f64_roundtrips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
