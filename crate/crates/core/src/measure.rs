//! Helton-Howe measure densities and the identities they satisfy.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::degree::{
    curve_symbol, multiplicity_grid, over_two_pi_i, preimage_multiplicity, GridSpec,
    MultiplicityGrid, PreimageOptions, SampledCurve,
};
use crate::error::{Error, Result};
use crate::operator::{commutator_trace_detailed, schatten_norm, self_commutator};
use crate::symbol::FourierSymbol;

pub use crate::poly::{jacobian_bracket, BivariatePolynomial};

/// Slack in the Brown-bound comparison on top of the quadrature estimate.
pub const BROWN_TOL: f64 = 2e-3;

/// `(1/2 pi i) m` on a grid, `m` the signed multiplicity of `Phi_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDensity {
    pub grid: MultiplicityGrid,
    pub r_used: f64,
    /// Tail bound of the symbol the density was computed from.
    pub tail_note: f64,
}

impl MeasureDensity {
    pub fn spec(&self) -> &GridSpec {
        &self.grid.grid
    }

    /// Density value of a valid cell.
    pub fn value(&self, ix: usize, iy: usize) -> Option<Complex64> {
        self.grid.value(ix, iy).map(|m| over_two_pi_i(m as f64))
    }

    /// `sum f(center) density dA` over valid cells.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> Complex64 {
        over_two_pi_i(self.grid.integrate(f))
    }

    pub fn masked_area_fraction(&self) -> f64 {
        self.grid.masked_area_fraction()
    }
}

/// Density of the Helton-Howe measure of `T_{phi_r}`.
pub fn hh_density(phi: &FourierSymbol, r: f64, grid: &GridSpec) -> Result<MeasureDensity> {
    Ok(MeasureDensity {
        grid: multiplicity_grid(phi, r, grid, None)?,
        r_used: r,
        tail_note: phi.tail_bound(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFormulaReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    /// `|rhs - rhs on the grid with half the resolution|`.
    pub quad_err_estimate: f64,
    /// Block size of the operator trace.
    pub n: usize,
    pub grid: GridSpec,
    pub r: f64,
    pub masked_area_fraction: f64,
    pub tail_bound: f64,
}

fn smoothed(phi: &FourierSymbol, r: f64) -> Result<FourierSymbol> {
    if r == 1.0 {
        Ok(phi.clone())
    } else {
        phi.poisson_smooth(r)
    }
}

fn check_box(phi: &FourierSymbol, grid: &GridSpec) -> Result<()> {
    let rad = phi.sup_norm_proxy() + phi.tail_bound();
    if grid.x0 > -rad || grid.x1 < rad || grid.y0 > -rad || grid.y1 < rad {
        return Err(Error::Schema(format!(
            "grid box must contain the disk of radius {rad} around the origin"
        )));
    }
    Ok(())
}

// Worst-case mass of J * density over masked cells, assuming |m| there is at
// most one more than anywhere on the valid cells.
fn masked_mass_bound(d: &MeasureDensity, j: &BivariatePolynomial) -> f64 {
    let g = &d.grid;
    let mmax = (g.max_abs() + 1) as f64;
    let area = g.grid.cell_area();
    g.cells()
        .filter(|(_, _, v)| v.is_none())
        .map(|(ix, iy, _)| {
            let w = g.grid.center(ix, iy);
            j.eval(w.re, w.im).abs()
        })
        .sum::<f64>()
        * mmax
        * area
        / (2.0 * PI)
}

/// `tr [p(X,Y), q(X,Y)]` against `int J(p,q) dP` on a grid.
pub fn trace_formula_check(
    phi: &FourierSymbol,
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
    grid: &GridSpec,
    r: f64,
) -> Result<TraceFormulaReport> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::range("r", r, "0 < r <= 1"));
    }
    check_box(phi, grid)?;
    let sym = smoothed(phi, r)?;
    let lhs = commutator_trace_detailed(&sym, p, q)?;
    let j = jacobian_bracket(p, q);
    let fine = hh_density(phi, r, grid)?;
    let coarse = hh_density(phi, r, &grid.coarsened())?;
    let jf = |x: f64, y: f64| j.eval(x, y);
    let rhs = fine.integrate(jf);
    let rhs_coarse = coarse.integrate(jf);
    let bound = masked_mass_bound(&fine, &j);
    if bound > 0.01 * rhs.norm() + 1e-12 {
        return Err(Error::MaskCoverage {
            bound,
            rhs: rhs.norm(),
        });
    }
    Ok(TraceFormulaReport {
        lhs: lhs.value,
        rhs,
        abs_err: (lhs.value - rhs).norm(),
        quad_err_estimate: (rhs - rhs_coarse).norm(),
        n: lhs.n,
        grid: *grid,
        r,
        masked_area_fraction: fine.masked_area_fraction(),
        tail_bound: phi.tail_bound(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalVariation {
    pub value: f64,
    pub masked_area_fraction: f64,
}

/// `|P|(C)` from the valid cells.
pub fn total_variation(d: &MeasureDensity) -> TotalVariation {
    TotalVariation {
        value: d.grid.abs_mass() / (2.0 * PI),
        masked_area_fraction: d.masked_area_fraction(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownCheck {
    pub tv: f64,
    /// `||[T*, T]||_1 / 2`.
    pub bound: f64,
    pub quad_err_estimate: f64,
    pub ok: bool,
}

/// Total variation of the measure against half the trace norm of the
/// self-commutator.
pub fn brown_bound_check(phi: &FourierSymbol, r: f64, grid: &GridSpec) -> Result<BrownCheck> {
    let sym = smoothed(phi, r)?;
    if !sym.is_exact() {
        return Err(Error::Tail(sym.tail_bound()));
    }
    let tv = total_variation(&hh_density(phi, r, grid)?).value;
    let tv_coarse = total_variation(&hh_density(phi, r, &grid.coarsened())?).value;
    let bound = schatten_norm(&self_commutator(&sym, sym.band().max(1)), 1.0)?.value / 2.0;
    let quad_err_estimate = (tv - tv_coarse).abs();
    Ok(BrownCheck {
        tv,
        bound,
        quad_err_estimate,
        ok: tv <= bound + BROWN_TOL + quad_err_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexCheck {
    pub wind: i32,
    /// `m(lambda) / (2 pi i)` with `m` counted from preimages.
    pub density_value: Complex64,
    /// `ind(T_{phi_r} - lambda)`.
    pub index: i32,
    pub ok: bool,
}

/// Compares the density at `lambda` with `-(1/2 pi i) ind(T - lambda)`.
///
/// The index is minus the winding number; the density comes from counting
/// preimages, independently of the winding computation.
pub fn index_check(phi: &FourierSymbol, lambda: Complex64, r: f64) -> Result<IndexCheck> {
    let sym = curve_symbol(phi, r)?;
    let curve = SampledCurve::from_symbol(&sym, SampledCurve::default_samples(&sym));
    let eps = 1e-8 * sym.sup_norm_proxy().max(1.0);
    let wind = curve.winding(lambda, eps)?;
    let m = preimage_multiplicity(phi, r, lambda, &PreimageOptions::default())?;
    let index = -wind;
    let density_value = over_two_pi_i(m as f64);
    Ok(IndexCheck {
        wind,
        density_value,
        index,
        ok: density_value == over_two_pi_i(-index as f64),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub r: f64,
    /// `(1/2 pi i) int J(p,q) m_{Phi_r}`.
    pub moment: Complex64,
    pub masked_area_fraction: f64,
}

/// Cauchy diagnostics for `r -> 1`; no limit value is claimed.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTheoremProbe {
    pub rows: Vec<MomentRow>,
    /// `|M(r_{k+1}) - M(r_k)|`.
    pub differences: Vec<f64>,
    /// Operator trace at the stored (truncated) coefficient table.
    pub lhs_truncated: Complex64,
    pub tail_bound: f64,
}

pub fn main_theorem_probe(
    phi: &FourierSymbol,
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
    r_list: &[f64],
    grid: &GridSpec,
) -> Result<MainTheoremProbe> {
    let j = jacobian_bracket(p, q);
    let probe = crate::degree::multiplicity_limit_probe(phi, r_list, std::slice::from_ref(&j), grid)?;
    let rows = probe
        .rows
        .iter()
        .map(|row| MomentRow {
            r: row.r,
            moment: row.moments[0],
            masked_area_fraction: row.masked_area_fraction,
        })
        .collect();
    let lhs_truncated = commutator_trace_detailed(&phi.truncated(), p, q)?.value;
    Ok(MainTheoremProbe {
        rows,
        differences: probe.differences.into_iter().next().unwrap_or_default(),
        lhs_truncated,
        tail_bound: phi.tail_bound(),
    })
}
