//! Symbols on the unit circle stored by their Fourier coefficients.
//!
//! A [`FourierSymbol`] is a finite table of coefficients `c(k)`, `|k| <= band`,
//! optionally tagged with a bound on the absolute sum of the discarded tail when
//! it was cut out of an infinite series. Everything downstream (Poisson
//! smoothing, the harmonic extension, Wirtinger derivatives, Toeplitz and Hankel
//! matrices) reads the coefficients from here.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Relative tolerance for the conjugate-symmetry check of real symbols.
const REAL_TOL: f64 = 1e-12;

/// Fourier coefficients of a symbol, kept densely in two halves.
///
/// `pos[k] = c(k)` for `k >= 0` and `neg[k] = c(-k)` for `k >= 1` (`neg[0]` is
/// always zero). Trailing zeros are trimmed, so `band()` is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol {
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
    tail_bound: f64,
    real: bool,
}

/// A point of the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1.0 {
            return Err(Error::Domain {
                re: z.re,
                im: z.im,
                reason: "|z| must not exceed 1",
            });
        }
        Ok(DiskPoint(z))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }

    fn require_interior(self) -> Result<Complex64> {
        if self.0.norm() >= 1.0 {
            return Err(Error::Domain {
                re: self.0.re,
                im: self.0.im,
                reason: "|z| < 1 required",
            });
        }
        Ok(self.0)
    }
}

impl FourierSymbol {
    /// Builds a symbol from `(k, c(k))` pairs. Repeated `k` are summed.
    pub fn new<I>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut pos: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
        let mut neg: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
        for (k, c) in coeffs {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Schema(format!("coefficient {k} is not finite")));
            }
            let idx = k.unsigned_abs() as usize;
            let side = if k >= 0 { &mut pos } else { &mut neg };
            if side.len() <= idx {
                side.resize(idx + 1, Complex64::new(0.0, 0.0));
            }
            side[idx] += c;
        }
        let mut s = FourierSymbol {
            pos,
            neg,
            tail_bound: 0.0,
            real: false,
        };
        s.trim();
        Ok(s)
    }

    /// Like [`FourierSymbol::new`] but also checks `c(-k) = conj(c(k))` and
    /// marks the symbol as real-valued.
    pub fn new_real<I>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut s = Self::new(coeffs)?;
        if !s.check_real() {
            return Err(Error::Schema(
                "coefficients are not conjugate-symmetric, symbol is not real-valued".into(),
            ));
        }
        s.real = true;
        Ok(s)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    /// `c * e^{ikt}`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::new([(k, c)]).expect("finite coefficient")
    }

    /// Attaches a bound on `sum |c(k)|` over the coefficients that were dropped
    /// when this table was cut from an infinite series.
    pub fn with_tail_bound(mut self, tail_bound: f64) -> Result<Self> {
        if !(tail_bound.is_finite() && tail_bound >= 0.0) {
            return Err(Error::range("tail_bound", tail_bound, ">= 0 and finite"));
        }
        self.tail_bound = tail_bound;
        Ok(self)
    }

    /// Discrete Fourier transform of `2^m` equispaced samples `phi(e^{2 pi i j / n})`.
    ///
    /// The Nyquist coefficient is split evenly between `k = n/2` and `k = -n/2`
    /// so that real samples give a conjugate-symmetric table.
    pub fn from_samples(values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::SampleCount(n));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Schema("sample values must be finite".into()));
        }
        let mut buf = values.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = values.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);
        let chop = 1e-13 * scale;
        let inv_n = 1.0 / n as f64;
        let half = n / 2;
        let mut coeffs = Vec::with_capacity(n + 1);
        for (j, x) in buf.iter().enumerate() {
            let c = x * inv_n;
            if c.norm() <= chop {
                continue;
            }
            if j < half {
                coeffs.push((j as i64, c));
            } else if j == half {
                coeffs.push((half as i64, c * 0.5));
                coeffs.push((-(half as i64), c * 0.5));
            } else {
                coeffs.push((j as i64 - n as i64, c));
            }
        }
        let mut s = Self::new(coeffs)?;
        s.real = s.check_real();
        Ok(s)
    }

    fn trim(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        while self.pos.len() > 1 && *self.pos.last().unwrap() == zero {
            self.pos.pop();
        }
        while self.neg.len() > 1 && *self.neg.last().unwrap() == zero {
            self.neg.pop();
        }
    }

    fn check_real(&self) -> bool {
        let tol = REAL_TOL * self.sup_norm_proxy().max(1.0);
        if self.pos[0].im.abs() > tol {
            return false;
        }
        (1..=self.band()).all(|k| (self.coeff(k as i64) - self.coeff(-(k as i64)).conj()).norm() <= tol)
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        let side = if k >= 0 { &self.pos } else { &self.neg };
        side.get(idx).copied().unwrap_or_default()
    }

    /// Smallest `K` with `c(k) = 0` for `|k| > K`.
    pub fn band(&self) -> usize {
        (self.pos.len() - 1).max(self.neg.len() - 1)
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// True when the table is the whole symbol (no discarded tail).
    pub fn is_exact(&self) -> bool {
        self.tail_bound == 0.0
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Same coefficients with the tail bound cleared; the caller accepts the
    /// truncated table as the symbol.
    pub fn truncated(&self) -> Self {
        let mut s = self.clone();
        s.tail_bound = 0.0;
        s
    }

    /// Keeps `|k| <= band` and adds the dropped mass to the tail bound.
    pub fn truncate_to(&self, band: usize) -> Self {
        let dropped: f64 = self
            .pos
            .iter()
            .chain(self.neg.iter())
            .enumerate()
            .filter(|(i, _)| {
                let k = if *i < self.pos.len() { *i } else { *i - self.pos.len() };
                k > band
            })
            .map(|(_, c)| c.norm())
            .sum();
        let mut s = self.clone();
        s.pos.truncate(band + 1);
        s.neg.truncate(band + 1);
        s.trim();
        s.tail_bound += dropped;
        s
    }

    /// Nonzero coefficients in increasing `k`.
    pub fn coefficients(&self) -> BTreeMap<i64, Complex64> {
        let mut out = BTreeMap::new();
        for (k, c) in self.pos.iter().enumerate() {
            if c.norm() > 0.0 {
                out.insert(k as i64, *c);
            }
        }
        for (k, c) in self.neg.iter().enumerate().skip(1) {
            if c.norm() > 0.0 {
                out.insert(-(k as i64), *c);
            }
        }
        out
    }

    /// `sum_k |c(k)|`, an upper bound for the sup norm.
    pub fn sup_norm_proxy(&self) -> f64 {
        self.pos.iter().chain(self.neg.iter()).map(|c| c.norm()).sum()
    }

    /// `sum_k |k| |c(k)|`, a Lipschitz constant of `t -> phi(e^{it})`.
    pub fn lipschitz_bound(&self) -> f64 {
        let side = |v: &[Complex64]| -> f64 {
            v.iter().enumerate().map(|(k, c)| k as f64 * c.norm()).sum()
        };
        side(&self.pos) + side(&self.neg)
    }

    /// `phi(e^{i theta})` from the stored coefficients.
    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, theta);
        series(&self.pos, w) + series(&self.neg, w.conj())
    }

    /// Poisson smoothing: coefficient `k` becomes `r^|k| c(k)`.
    pub fn poisson_smooth(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::range("r", r, "0 < r < 1"));
        }
        let damp = |v: &[Complex64]| -> Vec<Complex64> {
            let mut rk = 1.0;
            v.iter()
                .map(|c| {
                    let out = c * rk;
                    rk *= r;
                    out
                })
                .collect()
        };
        let mut s = FourierSymbol {
            pos: damp(&self.pos),
            neg: damp(&self.neg),
            tail_bound: self.tail_bound,
            real: self.real,
        };
        s.trim();
        Ok(s)
    }

    /// Value of the harmonic extension at `z`.
    ///
    /// Boundary points are accepted only for exact (finite-band) symbols.
    pub fn harmonic_eval(&self, z: DiskPoint) -> Result<Complex64> {
        if z.0.norm() >= 1.0 && !self.is_exact() {
            return Err(Error::Domain {
                re: z.0.re,
                im: z.0.im,
                reason: "boundary evaluation needs a finite-band symbol",
            });
        }
        Ok(self.extension_unchecked(z.0))
    }

    /// Harmonic extension without domain checks; callers guarantee `|z| <= 1`.
    pub(crate) fn extension_unchecked(&self, z: Complex64) -> Complex64 {
        series(&self.pos, z) + series(&self.neg, z.conj())
    }

    /// Splits `phi = f + conj(g)` with `f, g` analytic and `g(0) = 0`.
    pub fn analytic_split(&self) -> (FourierSymbol, FourierSymbol) {
        let zero = Complex64::new(0.0, 0.0);
        let mut f = FourierSymbol {
            pos: self.pos.clone(),
            neg: vec![zero],
            tail_bound: self.tail_bound,
            real: false,
        };
        let mut gpos: Vec<Complex64> = self.neg.iter().map(|c| c.conj()).collect();
        gpos[0] = zero;
        let mut g = FourierSymbol {
            pos: gpos,
            neg: vec![zero],
            tail_bound: self.tail_bound,
            real: false,
        };
        f.trim();
        g.trim();
        f.real = f.check_real();
        g.real = g.check_real();
        (f, g)
    }

    /// Complex conjugate symbol: `c(k) -> conj(c(-k))`.
    pub fn conj(&self) -> Self {
        let conj = |v: &[Complex64]| v.iter().map(|c| c.conj()).collect::<Vec<_>>();
        let mut pos = conj(&self.neg);
        pos[0] = self.pos[0].conj();
        let mut neg = conj(&self.pos);
        neg[0] = Complex64::new(0.0, 0.0);
        let mut s = FourierSymbol {
            pos,
            neg,
            tail_bound: self.tail_bound,
            real: self.real,
        };
        s.trim();
        s
    }

    /// `Re phi`, as a real-valued symbol.
    pub fn real_part(&self) -> Self {
        self.combine_with_conj(Complex64::new(0.5, 0.0))
    }

    /// `Im phi`, as a real-valued symbol.
    pub fn imag_part(&self) -> Self {
        self.combine_with_conj(Complex64::new(0.0, -0.5))
    }

    // a * phi + conj(a) * conj(phi); real for every a.
    fn combine_with_conj(&self, a: Complex64) -> Self {
        let c = self.conj();
        let band = self.band();
        let mut coeffs = Vec::with_capacity(2 * band + 1);
        for k in -(band as i64)..=(band as i64) {
            let v = a * self.coeff(k) + a.conj() * c.coeff(k);
            if v.norm() > 0.0 {
                coeffs.push((k, v));
            }
        }
        let mut s = Self::new(coeffs).expect("finite");
        // enforce exact symmetry; the combination is real up to rounding only
        for k in 1..s.neg.len() {
            let avg = 0.5 * (s.coeff(k as i64) + s.neg[k].conj());
            if k < s.pos.len() {
                s.pos[k] = avg;
            }
            s.neg[k] = avg.conj();
        }
        s.pos[0].im = 0.0;
        s.trim();
        s.tail_bound = self.tail_bound;
        s.real = true;
        s
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let band = self.band().max(other.band()) as i64;
        let mut s = Self::new((-band..=band).map(|k| (k, self.coeff(k) + other.coeff(k))))
            .expect("finite");
        s.tail_bound = self.tail_bound + other.tail_bound;
        s.real = self.real && other.real;
        s
    }

    /// Wirtinger derivatives `(dPhi/dz, dPhi/dzbar)` of the harmonic extension.
    pub fn wirtinger(&self, z: DiskPoint) -> Result<(Complex64, Complex64)> {
        let z = z.require_interior()?;
        Ok(self.wirtinger_unchecked(z))
    }

    pub(crate) fn wirtinger_unchecked(&self, z: Complex64) -> (Complex64, Complex64) {
        (derivative_series(&self.pos, z), derivative_series(&self.neg, z.conj()))
    }

    /// `|dPhi/dz|^2 - |dPhi/dzbar|^2`.
    pub fn jacobian(&self, z: DiskPoint) -> Result<f64> {
        let (dz, dzbar) = self.wirtinger(z)?;
        Ok(dz.norm_sqr() - dzbar.norm_sqr())
    }

    pub(crate) fn jacobian_unchecked(&self, z: Complex64) -> f64 {
        let (dz, dzbar) = self.wirtinger_unchecked(z);
        dz.norm_sqr() - dzbar.norm_sqr()
    }
}

// sum_k v[k] w^k by Horner.
fn series(v: &[Complex64], w: Complex64) -> Complex64 {
    v.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

// sum_{k>=1} k v[k] w^{k-1}
fn derivative_series(v: &[Complex64], w: Complex64) -> Complex64 {
    v.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * w + c * k as f64)
}

/// Equispaced angles `2 pi j / n`.
pub fn sample_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| 2.0 * PI * j as f64 / n as f64)
}
