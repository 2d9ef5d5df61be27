//! Winding numbers of symbol curves and signed multiplicity grids.
//!
//! The winding number of the boundary curve around `w` equals the signed count
//! of preimages of `w` under the harmonic extension. [`multiplicity_grid`]
//! rasterizes the first; [`preimage_multiplicity`] counts the second directly
//! with Newton iterations and serves as an independent check.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::BivariatePolynomial;
use crate::symbol::FourierSymbol;

/// Largest number of cells a grid may have.
pub const MAX_CELLS: usize = 10_000_000;
/// Default proximity mask as a multiple of the cell diagonal.
pub const DEFAULT_EPS_FACTOR: f64 = 1e-4;
/// Integrality tolerance on the accumulated turn count.
const INTEGER_TOL: f64 = 1e-6;
/// Bisection levels allowed below one base segment.
const MAX_REFINE_DEPTH: u32 = 48;
/// Masked share of the box above which a moment probe refuses to report.
pub const PROBE_MASK_BUDGET: f64 = 0.10;

/// Axis-aligned box `[x0, x1] x [y0, y1]` split into `nx x ny` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { x0, x1, y0, y1, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// Square box of half-width `sum |c(k)| + 0.5` around the origin; it holds
    /// the spectrum of `T_phi` and of every smoothing of it.
    pub fn default_for(phi: &FourierSymbol, nx: usize, ny: usize) -> Result<Self> {
        let h = phi.sup_norm_proxy() + phi.tail_bound() + 0.5;
        Self::new(-h, h, -h, h, nx, ny)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite());
        if !finite || self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(Error::Schema("grid box must be finite with x0 < x1 and y0 < y1".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Schema("grid needs at least one cell per axis".into()));
        }
        if self.nx.saturating_mul(self.ny) > MAX_CELLS {
            return Err(Error::Schema(format!("grid has more than {MAX_CELLS} cells")));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y1 - self.y0) / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn box_area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn center(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.x0 + (ix as f64 + 0.5) * self.dx(),
            self.y0 + (iy as f64 + 0.5) * self.dy(),
        )
    }

    /// Same box with half the cells per axis (at least one).
    pub fn coarsened(&self) -> Self {
        GridSpec {
            nx: (self.nx / 2).max(1),
            ny: (self.ny / 2).max(1),
            ..*self
        }
    }

    /// Cell containing `w`, if inside the box.
    pub fn cell_of(&self, w: Complex64) -> Option<(usize, usize)> {
        let fx = (w.re - self.x0) / self.dx();
        let fy = (w.im - self.y0) / self.dy();
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }
}

/// A closed curve `t -> gamma(t)` sampled on `[0, 2 pi)`.
///
/// When built from a symbol the curve can insert samples on demand, and the
/// Lipschitz bound of the symbol certifies each argument increment.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    angles: Vec<f64>,
    points: Vec<Complex64>,
    source: Option<(FourierSymbol, f64)>,
}

impl SampledCurve {
    /// Samples `phi(e^{it})` at `n` equispaced angles; refinable.
    pub fn from_symbol(phi: &FourierSymbol, n: usize) -> Self {
        let n = n.max(4);
        let angles: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let points = angles.iter().map(|&t| phi.eval_angle(t)).collect();
        SampledCurve {
            angles,
            points,
            source: Some((phi.clone(), phi.lipschitz_bound())),
        }
    }

    /// Base sample count that resolves a symbol of the given band.
    pub fn default_samples(phi: &FourierSymbol) -> usize {
        (32 * phi.band()).max(128).next_power_of_two()
    }

    /// A fixed polygon; winding fails instead of refining.
    pub fn from_points(angles: Vec<f64>, points: Vec<Complex64>) -> Result<Self> {
        if angles.len() != points.len() || angles.len() < 3 {
            return Err(Error::Schema("curve needs >= 3 samples with matching angles".into()));
        }
        let sorted = angles.windows(2).all(|w| w[0] < w[1]);
        let in_range = angles[0] >= 0.0 && *angles.last().unwrap() < 2.0 * PI;
        if !sorted || !in_range {
            return Err(Error::Schema("angles must increase strictly within [0, 2pi)".into()));
        }
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::Schema("curve points must be finite".into()));
        }
        Ok(SampledCurve {
            angles,
            points,
            source: None,
        })
    }

    pub fn is_refinable(&self) -> bool {
        self.source.is_some()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Winding number around `lambda`; samples closer than `eps` make it
    /// undefined.
    pub fn winding(&self, lambda: Complex64, eps: f64) -> Result<i32> {
        let n = self.points.len();
        let mut total = 0.0;
        for j in 0..n {
            let (t0, p0) = (self.angles[j], self.points[j]);
            let (t1, p1) = if j + 1 < n {
                (self.angles[j + 1], self.points[j + 1])
            } else {
                (self.angles[0] + 2.0 * PI, self.points[0])
            };
            total += self.segment_turn(t0, p0, t1, p1, lambda, eps, 0)?;
        }
        let turns = total / (2.0 * PI);
        let rounded = turns.round();
        if (turns - rounded).abs() > INTEGER_TOL {
            return Err(Error::NonInteger { turns });
        }
        Ok(rounded as i32)
    }

    #[allow(clippy::too_many_arguments)]
    fn segment_turn(
        &self,
        t0: f64,
        p0: Complex64,
        t1: f64,
        p1: Complex64,
        lambda: Complex64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let (a, b) = (p0 - lambda, p1 - lambda);
        let (d0, d1) = (a.norm(), b.norm());
        let dmin = d0.min(d1);
        if dmin < eps || dmin == 0.0 {
            return Err(Error::WindingUndefined { distance: dmin, eps });
        }
        let delta = (b * a.conj()).arg();
        let Some((sym, lip)) = &self.source else {
            if delta.abs() >= FRAC_PI_2 {
                return Err(Error::NonInteger { turns: delta / (2.0 * PI) });
            }
            return Ok(delta);
        };
        // the whole arc lies within lip*(t1-t0) of either endpoint
        let certified = lip * (t1 - t0) < d0.max(d1);
        if certified && delta.abs() < FRAC_PI_2 {
            return Ok(delta);
        }
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::WindingUndefined { distance: dmin, eps });
        }
        let tm = 0.5 * (t0 + t1);
        let pm = sym.eval_angle(tm);
        Ok(self.segment_turn(t0, p0, tm, pm, lambda, eps, depth + 1)?
            + self.segment_turn(tm, pm, t1, p1, lambda, eps, depth + 1)?)
    }
}

/// `wind(c, lambda)`; see [`SampledCurve::winding`].
pub fn winding(c: &SampledCurve, lambda: Complex64, eps: f64) -> Result<i32> {
    c.winding(lambda, eps)
}

/// Symbol whose boundary curve is the image of the circle of radius `r`.
pub(crate) fn curve_symbol(phi: &FourierSymbol, r: f64) -> Result<FourierSymbol> {
    if r == 1.0 {
        if !phi.is_exact() {
            return Err(Error::range("r", r, "r < 1 for symbols with a truncation tail"));
        }
        Ok(phi.clone())
    } else {
        phi.poisson_smooth(r)
    }
}

/// Integer winding numbers on cell centers, with a mask for cells too close
/// to the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityGrid {
    pub grid: GridSpec,
    pub eps: f64,
    values: Vec<i32>,
    valid: Vec<bool>,
}

impl MultiplicityGrid {
    pub fn value(&self, ix: usize, iy: usize) -> Option<i32> {
        let i = iy * self.grid.nx + ix;
        self.valid[i].then_some(self.values[i])
    }

    /// `(ix, iy, value)` for every cell in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, Option<i32>)> + '_ {
        let nx = self.grid.nx;
        (0..self.values.len()).map(move |i| (i % nx, i / nx, self.valid[i].then_some(self.values[i])))
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn masked_area_fraction(&self) -> f64 {
        1.0 - self.valid_count() as f64 / self.valid.len() as f64
    }

    pub fn masked_area(&self) -> f64 {
        self.masked_area_fraction() * self.grid.box_area()
    }

    /// Midpoint rule for `sum f(center) m(center) dA` over valid cells.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let area = self.grid.cell_area();
        self.cells()
            .filter_map(|(ix, iy, v)| {
                let m = v?;
                if m == 0 {
                    return None;
                }
                let w = self.grid.center(ix, iy);
                Some(f(w.re, w.im) * m as f64 * area)
            })
            .sum()
    }

    /// `sum |m| dA` over valid cells.
    pub fn abs_mass(&self) -> f64 {
        let area = self.grid.cell_area();
        self.cells().filter_map(|(_, _, v)| v).map(|m| m.abs() as f64 * area).sum()
    }

    pub fn max_abs(&self) -> i32 {
        self.cells().filter_map(|(_, _, v)| v).map(|m| m.abs()).max().unwrap_or(0)
    }
}

/// Winding numbers of the curve of `phi_r` around every cell center.
///
/// `eps` defaults to [`DEFAULT_EPS_FACTOR`] times the cell diagonal. Cells where
/// the winding number is undefined are masked; the grid itself never fails.
pub fn multiplicity_grid(
    phi: &FourierSymbol,
    r: f64,
    grid: &GridSpec,
    eps: Option<f64>,
) -> Result<MultiplicityGrid> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::range("r", r, "0 < r <= 1"));
    }
    grid.validate()?;
    let sym = curve_symbol(phi, r)?;
    let eps = eps.unwrap_or(DEFAULT_EPS_FACTOR * grid.cell_diagonal());
    let curve = SampledCurve::from_symbol(&sym, SampledCurve::default_samples(&sym));
    let rows: Vec<Vec<Option<i32>>> = (0..grid.ny)
        .into_par_iter()
        .map(|iy| {
            (0..grid.nx)
                .map(|ix| curve.winding(grid.center(ix, iy), eps).ok())
                .collect()
        })
        .collect();
    let cells: Vec<Option<i32>> = rows.into_iter().flatten().collect();
    Ok(MultiplicityGrid {
        grid: *grid,
        eps,
        values: cells.iter().map(|v| v.unwrap_or(0)).collect(),
        valid: cells.iter().map(|v| v.is_some()).collect(),
    })
}

/// Knobs of the preimage oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreimageOptions {
    /// Seeds come from a `2^d x 2^d` lattice; `d` runs up to this depth.
    pub max_depth: u32,
    /// Converged roots closer than this are the same root.
    pub dedup: f64,
    /// Roots with `|J| < jtol` are reported as degenerate.
    pub jtol: f64,
}

impl Default for PreimageOptions {
    fn default() -> Self {
        PreimageOptions {
            max_depth: 6,
            dedup: 1e-6,
            jtol: 1e-8,
        }
    }
}

/// A solution of `Phi_r(z) = w` in the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preimage {
    pub z: Complex64,
    pub jacobian: f64,
}

fn newton(sym: &FourierSymbol, w: Complex64, mut z: Complex64) -> Option<Complex64> {
    let scale = 1.0 + w.norm();
    for _ in 0..80 {
        let f = sym.extension_unchecked(z) - w;
        let (dz, dzb) = sym.wirtinger_unchecked(z);
        let ddx = dz + dzb;
        let ddy = Complex64::i() * (dz - dzb);
        let det = ddx.re * ddy.im - ddy.re * ddx.im;
        if det.abs() < 1e-300 {
            return None;
        }
        let sx = -(ddy.im * f.re - ddy.re * f.im) / det;
        let sy = -(-ddx.im * f.re + ddx.re * f.im) / det;
        let step = Complex64::new(sx, sy);
        z += step;
        if !(z.norm() < 1.5) {
            return None;
        }
        if step.norm() < 1e-14 && (sym.extension_unchecked(z) - w).norm() < 1e-11 * scale {
            return Some(z);
        }
    }
    let res = (sym.extension_unchecked(z) - w).norm();
    (res < 1e-11 * scale).then_some(z)
}

fn roots_at_depth(
    sym: &FourierSymbol,
    w: Complex64,
    depth: u32,
    opts: &PreimageOptions,
) -> Vec<Complex64> {
    let m = 1usize << depth;
    let h = 2.0 / m as f64;
    let mut roots: Vec<Complex64> = Vec::new();
    for iy in 0..m {
        for ix in 0..m {
            let seed = Complex64::new(-1.0 + (ix as f64 + 0.5) * h, -1.0 + (iy as f64 + 0.5) * h);
            if seed.norm() >= 1.0 {
                continue;
            }
            if let Some(z) = newton(sym, w, seed) {
                if z.norm() < 1.0 && roots.iter().all(|r| (r - z).norm() > opts.dedup) {
                    roots.push(z);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// All solutions of `Phi_r(z) = w` in the unit disk, where `Phi_r(z) = Phi(rz)`.
///
/// Seeds on successively finer lattices until two consecutive depths agree.
pub fn preimages(
    phi: &FourierSymbol,
    r: f64,
    w: Complex64,
    opts: &PreimageOptions,
) -> Result<Vec<Preimage>> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::range("r", r, "0 < r <= 1"));
    }
    let sym = curve_symbol(phi, r)?;
    let mut prev: Option<Vec<Complex64>> = None;
    for depth in 3..=opts.max_depth.max(3) {
        let roots = roots_at_depth(&sym, w, depth, opts);
        let stable = prev.as_ref().is_some_and(|p| {
            p.len() == roots.len()
                && p.iter().zip(&roots).all(|(a, b)| (a - b).norm() <= 10.0 * opts.dedup)
        });
        if stable {
            return roots
                .into_iter()
                .map(|z| {
                    let jacobian = sym.jacobian_unchecked(z);
                    if jacobian.abs() < opts.jtol {
                        Err(Error::DegenerateRoot {
                            re: z.re,
                            im: z.im,
                            jacobian,
                        })
                    } else {
                        Ok(Preimage { z, jacobian })
                    }
                })
                .collect();
        }
        prev = Some(roots);
    }
    Err(Error::NoConvergence(opts.max_depth))
}

/// `m(w) = sum sgn J(Phi_r)(z)` over disk preimages of `w`.
pub fn preimage_multiplicity(
    phi: &FourierSymbol,
    r: f64,
    w: Complex64,
    opts: &PreimageOptions,
) -> Result<i32> {
    Ok(preimages(phi, r, w, opts)?
        .iter()
        .map(|p| if p.jacobian > 0.0 { 1 } else { -1 })
        .sum())
}

/// One smoothing level of [`multiplicity_limit_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub r: f64,
    /// `(1/2 pi i) int p m_{Phi_r} dxdy`, one per test polynomial.
    pub moments: Vec<Complex64>,
    pub masked_area_fraction: f64,
}

/// Moments at each `r` and the successive differences `|M(r_{k+1}) - M(r_k)|`
/// (indexed `[poly][k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    pub rows: Vec<ProbeRow>,
    pub differences: Vec<Vec<f64>>,
}

/// `(1/2 pi i) * value`.
pub(crate) fn over_two_pi_i(v: f64) -> Complex64 {
    Complex64::new(0.0, -v / (2.0 * PI))
}

pub fn multiplicity_limit_probe(
    phi: &FourierSymbol,
    r_list: &[f64],
    test_polys: &[BivariatePolynomial],
    grid: &GridSpec,
) -> Result<LimitProbe> {
    if r_list.is_empty() {
        return Err(Error::Schema("r list must be nonempty".into()));
    }
    if r_list.windows(2).any(|w| w[0] >= w[1]) || r_list.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Schema("r list must increase strictly within (0, 1)".into()));
    }
    let mut rows = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let g = multiplicity_grid(phi, r, grid, None)?;
        let masked = g.masked_area_fraction();
        if masked > PROBE_MASK_BUDGET {
            return Err(Error::MaskBudget(masked));
        }
        let moments = test_polys
            .iter()
            .map(|p| over_two_pi_i(g.integrate(|x, y| p.eval(x, y))))
            .collect();
        rows.push(ProbeRow {
            r,
            moments,
            masked_area_fraction: masked,
        });
    }
    let differences = (0..test_polys.len())
        .map(|k| rows.windows(2).map(|w| (w[1].moments[k] - w[0].moments[k]).norm()).collect())
        .collect();
    Ok(LimitProbe { rows, differences })
}
