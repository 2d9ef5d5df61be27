//! Command-line front end.
//!
//! Every subcommand reads a symbol file, runs one computation and writes a
//! report to stdout or `--out`. Failures print `{"error": kind, "message": ..}`
//! to stderr; the exit code is 2 for bad input and 3 for numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::besov::{almost_normal_sufficient, besov_membership, default_radii, jacobian_integrability};
use crate::degree::{curve_symbol, GridSpec, SampledCurve};
use crate::error::{Error, Result};
use crate::gallery::gallery_table;
use crate::io::{fmt_f64, parse_grid, read_symbol, to_json, write_density_csv};
use crate::measure::{
    hh_density, index_check, main_theorem_probe, total_variation, trace_formula_check,
};
use crate::poly::BivariatePolynomial;
use crate::symbol::FourierSymbol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Grid resolution used when `--grid` is absent.
pub const DEFAULT_GRID_CELLS: usize = 400;
/// Smoothing used for symbols with a truncation tail when `--r` is absent.
pub const DEFAULT_TAIL_R: f64 = 0.999;

#[derive(Debug, Parser)]
#[command(name = "helton-howe", version, about = "Helton-Howe measures of Toeplitz operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Symbol file (JSON).
    #[arg(long)]
    pub symbol: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct GridArg {
    /// `x0,x1,y0,y1,nx,ny`; defaults to a 400x400 box covering the symbol.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density grid of the Helton-Howe measure.
    Measure {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArg,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Operator trace against the measure integral.
    TraceCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArg,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Accepted `|lhs - rhs|`; default `max(5e-3, 3 * quad_err)`.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Winding number of the curve of `phi_r` around points.
    Winding {
        #[command(flatten)]
        common: Common,
        /// `re,im`; repeatable.
        #[arg(long, required = true, allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long)]
        r: Option<f64>,
        /// Minimum admissible distance to the curve.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Density at points against the Fredholm index.
    IndexCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true, allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Moments of the smoothed measures as `r -> 1`.
    SmoothLimit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArg,
        /// Repeatable; default 0.9, 0.99, 0.999.
        #[arg(long)]
        r: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Besov diagnostics of both halves of the symbol.
    Besov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: f64,
        /// Conjugate exponent (`inf` allowed); adds the sufficiency verdict.
        #[arg(long)]
        q: Option<f64>,
        /// Radii of the partial integrals; repeatable.
        #[arg(long)]
        r: Vec<f64>,
    },
    /// Fixed table of the non-Toeplitz examples.
    Gallery {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn cx(c: Complex64) -> Value {
    json!({"re": c.re, "im": c.im})
}

fn grid_json(g: &GridSpec) -> Value {
    json!({"x0": g.x0, "x1": g.x1, "y0": g.y0, "y1": g.y1, "nx": g.nx, "ny": g.ny})
}

fn parse_lambda(s: &str) -> Result<Complex64> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Schema(format!("lambda must be 're,im', got '{s}'")))?;
    let p = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Schema(format!("bad lambda component '{t}'")))
    };
    Ok(Complex64::new(p(a)?, p(b)?))
}

fn resolve_r(phi: &FourierSymbol, r: Option<f64>) -> Result<f64> {
    let r = r.unwrap_or(if phi.is_exact() { 1.0 } else { DEFAULT_TAIL_R });
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::range("r", r, "0 < r <= 1"));
    }
    Ok(r)
}

fn resolve_grid(phi: &FourierSymbol, g: &GridArg) -> Result<GridSpec> {
    match &g.grid {
        Some(s) => parse_grid(s),
        None => GridSpec::default_for(phi, DEFAULT_GRID_CELLS, DEFAULT_GRID_CELLS),
    }
}

fn poly(s: &str) -> Result<BivariatePolynomial> {
    BivariatePolynomial::parse(s)
}

/// `key,value` lines from a flat JSON object.
fn flat_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    flatten("", v, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Number(n) => {
            let s = match n.as_i64() {
                Some(i) if !n.is_f64() => i.to_string(),
                _ => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
            };
            out.push_str(&format!("{prefix},{s}\n"));
        }
        Value::Null => out.push_str(&format!("{prefix},\n")),
        other => out.push_str(&format!("{prefix},{}\n", other.as_str().map(str::to_owned).unwrap_or_else(|| other.to_string()))),
    }
}

fn render(v: &Value, format: Option<Format>) -> String {
    match format.unwrap_or(Format::Json) {
        Format::Json => to_json(v),
        Format::Csv => flat_csv(v),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Measure { common, grid, r } => {
            let phi = read_symbol(&common.symbol)?;
            let r = resolve_r(&phi, *r)?;
            let g = resolve_grid(&phi, grid)?;
            let d = hh_density(&phi, r, &g)?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => write_density_csv(&d),
                Format::Json => {
                    let rows: Vec<Vec<Option<i32>>> = (0..g.ny)
                        .map(|iy| (0..g.nx).map(|ix| d.grid.value(ix, iy)).collect())
                        .collect();
                    let tv = total_variation(&d);
                    to_json(&json!({
                        "grid": grid_json(&g),
                        "r": r,
                        "tail_bound": phi.tail_bound(),
                        "masked_area_fraction": tv.masked_area_fraction,
                        "total_variation": tv.value,
                        "density": "multiplicity / (2 pi i)",
                        "multiplicity": rows,
                    }))
                }
            };
            emit(&common.out, &text)
        }
        Command::TraceCheck { common, grid, r, p, q, tol } => {
            let phi = read_symbol(&common.symbol)?;
            let r = resolve_r(&phi, *r)?;
            let g = resolve_grid(&phi, grid)?;
            let rep = trace_formula_check(&phi, &poly(p)?, &poly(q)?, &g, r)?;
            let tol = tol.unwrap_or((5e-3f64).max(3.0 * rep.quad_err_estimate));
            let v = json!({
                "lhs": cx(rep.lhs),
                "rhs": cx(rep.rhs),
                "abs_err": rep.abs_err,
                "quad_err": rep.quad_err_estimate,
                "N": rep.n,
                "grid": grid_json(&rep.grid),
                "r": rep.r,
                "masked_area_fraction": rep.masked_area_fraction,
                "tail_bound": rep.tail_bound,
                "tol": tol,
                "ok": rep.abs_err <= tol,
            });
            emit(&common.out, &render(&v, common.format))
        }
        Command::Winding { common, lambda, r, tol } => {
            let phi = read_symbol(&common.symbol)?;
            let r = resolve_r(&phi, *r)?;
            let sym = curve_symbol(&phi, r)?;
            let curve = SampledCurve::from_symbol(&sym, SampledCurve::default_samples(&sym));
            let eps = tol.unwrap_or(1e-8 * sym.sup_norm_proxy().max(1.0));
            let mut rows = Vec::new();
            for s in lambda {
                let l = parse_lambda(s)?;
                let w = curve.winding(l, eps)?;
                rows.push(json!({"lambda": cx(l), "winding": w, "index": -w}));
            }
            let v = json!({"r": r, "eps": eps, "tail_bound": phi.tail_bound(), "points": rows});
            emit(&common.out, &render(&v, common.format))
        }
        Command::IndexCheck { common, lambda, r } => {
            let phi = read_symbol(&common.symbol)?;
            let r = resolve_r(&phi, *r)?;
            let mut rows = Vec::new();
            let mut all = true;
            for s in lambda {
                let l = parse_lambda(s)?;
                let c = index_check(&phi, l, r)?;
                all &= c.ok;
                rows.push(json!({
                    "lambda": cx(l),
                    "winding": c.wind,
                    "index": c.index,
                    "density": cx(c.density_value),
                    "ok": c.ok,
                }));
            }
            let v = json!({"r": r, "tail_bound": phi.tail_bound(), "ok": all, "points": rows});
            emit(&common.out, &render(&v, common.format))
        }
        Command::SmoothLimit { common, grid, r, p, q } => {
            let phi = read_symbol(&common.symbol)?;
            let g = resolve_grid(&phi, grid)?;
            let r_list = if r.is_empty() { vec![0.9, 0.99, 0.999] } else { r.clone() };
            let pr = main_theorem_probe(&phi, &poly(p)?, &poly(q)?, &r_list, &g)?;
            let rows: Vec<Value> = pr
                .rows
                .iter()
                .map(|row| {
                    json!({"r": row.r, "moment": cx(row.moment), "masked_area_fraction": row.masked_area_fraction})
                })
                .collect();
            let v = json!({
                "grid": grid_json(&g),
                "tail_bound": pr.tail_bound,
                "rows": rows,
                "differences": pr.differences,
                "lhs_truncated": cx(pr.lhs_truncated),
            });
            emit(&common.out, &render(&v, common.format))
        }
        Command::Besov { common, p, q, r } => {
            let phi = read_symbol(&common.symbol)?;
            let radii = if r.is_empty() { default_radii() } else { r.clone() };
            let (f, g) = besov_membership(&phi, *p, &radii)?;
            let mut v = json!({
                "p": p,
                "tail_bound": phi.tail_bound(),
                "f": serde_json::to_value(&f).map_err(|e| Error::Schema(e.to_string()))?,
                "g": serde_json::to_value(&g).map_err(|e| Error::Schema(e.to_string()))?,
            });
            if let Some(q) = q {
                let s = almost_normal_sufficient(&phi, *p, *q, &radii)?;
                v["sufficiency"] = json!(s.verdict);
            }
            if phi.is_exact() {
                let jr = jacobian_integrability(&phi, &[1.0])?;
                v["jacobian"] = json!({"abs_integral": jr.abs_jacobian[0], "bound": jr.bound[0], "holds": jr.holds});
            }
            emit(&common.out, &render(&v, common.format))
        }
        Command::Gallery { out, format } => {
            let rows = gallery_table()?;
            let text = match format.unwrap_or(Format::Json) {
                Format::Json => to_json(
                    &rows
                        .iter()
                        .map(|r| {
                            json!({"case": r.case, "quantity": r.quantity, "computed": r.computed, "closed_form": r.closed_form})
                        })
                        .collect::<Vec<_>>(),
                ),
                Format::Csv => {
                    let mut s = String::from("case,quantity,computed,closed_form\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{},{},{},{}\n",
                            r.case,
                            r.quantity,
                            fmt_f64(r.computed),
                            r.closed_form.map(fmt_f64).unwrap_or_default()
                        ));
                    }
                    s
                }
            };
            emit(out, &text)
        }
    }
}

fn diagnostic(kind: &str, message: &str) -> String {
    to_json(&json!({"error": kind, "message": message}))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprint!("{}", diagnostic("usage", &e.to_string()));
            return EXIT_VALIDATION;
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprint!("{}", diagnostic(e.kind(), &e.to_string()));
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_VALIDATION
            }
        }
    }
}
