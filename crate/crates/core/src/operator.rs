//! Exact corner blocks of Toeplitz, Hankel and commutator operators.
//!
//! Finite-band symbols give banded Toeplitz matrices and finite-rank Hankel
//! matrices, so the operators we care about can be computed exactly on a
//! top-left block of known size. Every [`TruncatedMatrix`] records how much of
//! it is exact.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::BivariatePolynomial;
use crate::symbol::FourierSymbol;

/// Tolerance for the self-adjointness invariant.
const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute tolerance for the N vs 2N trace stabilization check.
pub const STABILIZATION_TOL: f64 = 1e-10;

/// An `N x N` block of an operator on `l^2(N)`, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    entries: DMatrix<Complex64>,
    provenance: String,
    exact_block: Option<usize>,
    self_adjoint: bool,
}

impl TruncatedMatrix {
    pub fn new(entries: DMatrix<Complex64>, provenance: impl Into<String>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Schema(format!(
                "matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Schema("matrix entries must be finite".into()));
        }
        Ok(TruncatedMatrix {
            entries,
            provenance: provenance.into(),
            exact_block: None,
            self_adjoint: false,
        })
    }

    pub fn zeros(n: usize, provenance: impl Into<String>) -> Self {
        Self::from_fn(n, provenance, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn from_fn(
        n: usize,
        provenance: impl Into<String>,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        TruncatedMatrix {
            entries: DMatrix::from_fn(n, n, f),
            provenance: provenance.into(),
            exact_block: None,
            self_adjoint: false,
        }
    }

    /// Single nonzero entry `e_i e_j^*` scaled by `c`.
    pub fn unit(n: usize, i: usize, j: usize, c: Complex64) -> Self {
        Self::from_fn(n, format!("unit({i},{j})"), |a, b| {
            if (a, b) == (i, j) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn with_exact_block(mut self, b: usize) -> Self {
        self.exact_block = Some(b.min(self.dim()));
        self
    }

    /// Tags the matrix as self-adjoint after checking it.
    pub fn into_self_adjoint(mut self) -> Result<Self> {
        let n = self.dim();
        for m in 0..n {
            for k in 0..=m {
                if (self.entries[(m, k)] - self.entries[(k, m)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::Schema(format!(
                        "{} is not self-adjoint at ({m},{k})",
                        self.provenance
                    )));
                }
            }
        }
        self.self_adjoint = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn exact_block(&self) -> Option<usize> {
        self.exact_block
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    /// True when every entry equals the infinite operator's entry.
    pub fn is_exact(&self) -> bool {
        self.exact_block == Some(self.dim())
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `tr(self * other)` over the common top-left block.
    pub fn trace_product(&self, other: &TruncatedMatrix) -> Complex64 {
        let n = self.dim().min(other.dim());
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            for k in 0..n {
                acc += self.entries[(m, k)] * other.entries[(k, m)];
            }
        }
        acc
    }

    pub fn top_left(&self, n: usize) -> TruncatedMatrix {
        let n = n.min(self.dim());
        TruncatedMatrix {
            entries: self.entries.view((0, 0), (n, n)).into_owned(),
            provenance: self.provenance.clone(),
            exact_block: self.exact_block.map(|b| b.min(n)),
            self_adjoint: self.self_adjoint,
        }
    }
}

/// `T_phi` on the first `n` basis vectors: entry `(m, k) = c(m - k)`.
pub fn toeplitz_matrix(phi: &FourierSymbol, n: usize) -> TruncatedMatrix {
    let n = n.max(1);
    TruncatedMatrix::from_fn(n, format!("toeplitz(N={n})"), |m, k| phi.coeff(m as i64 - k as i64))
        .with_exact_block(n)
}

/// `H_phi` restricted to `e_0..e_{n-1}`, rows enumerating `e_{-1}, e_{-2}, ...`:
/// entry `(l - 1, k) = c(-l - k)`.
///
/// For band `K` all entries with `row + col >= K` vanish, so the block is the
/// whole operator once `n >= K`.
pub fn hankel_matrix(phi: &FourierSymbol, n: usize) -> TruncatedMatrix {
    let n = n.max(1);
    TruncatedMatrix::from_fn(n, format!("hankel(N={n})"), |row, k| {
        phi.coeff(-(row as i64 + 1) - k as i64)
    })
    .with_exact_block(n)
}

/// `[T_phi^*, T_phi]` on the first `n` basis vectors, from the Fourier
/// coefficients of the analytic and coanalytic halves.
pub fn self_commutator(phi: &FourierSymbol, n: usize) -> TruncatedMatrix {
    let n = n.max(1);
    let band = phi.band();
    // f(k) = c(k), g(k) = conj(c(-k)) for k >= 1
    let f = |k: usize| phi.coeff(k as i64);
    let g = |k: usize| phi.coeff(-(k as i64)).conj();
    let mut out = TruncatedMatrix::from_fn(n, format!("self_commutator(N={n})"), |m, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        if m >= band || k >= band {
            return acc;
        }
        for l in 1..=band {
            acc += f(m + l) * f(k + l).conj() - g(m + l) * g(k + l).conj();
        }
        acc
    })
    .with_exact_block(n);
    out.self_adjoint = true;
    out
}

/// Letters of a word in `X = T_{Re phi}` and `Y = T_{Im phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    X,
    Y,
}

/// A nonempty word over `{X, Y}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCWord(Vec<Letter>);

impl NCWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Schema("word must be nonempty".into()));
        }
        Ok(NCWord(letters))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'X' | 'x' => Ok(Letter::X),
                'Y' | 'y' => Ok(Letter::Y),
                other => Err(Error::Schema(format!("unknown letter '{other}' in word"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NCWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", if *l == Letter::X { 'X' } else { 'Y' })?;
        }
        Ok(())
    }
}

fn require_exact(phi: &FourierSymbol) -> Result<()> {
    if phi.is_exact() {
        Ok(())
    } else {
        Err(Error::Tail(phi.tail_bound()))
    }
}

/// Top-left `n x n` block of the word evaluated in `X, Y`, computed from
/// truncations of size `n + |w| K`.
pub fn word_matrix(phi: &FourierSymbol, w: &NCWord, n: usize) -> Result<TruncatedMatrix> {
    require_exact(phi)?;
    let n = n.max(1);
    let inner = n + w.len() * phi.band();
    let x = toeplitz_matrix(&phi.real_part(), inner);
    let y = toeplitz_matrix(&phi.imag_part(), inner);
    let mut acc = DMatrix::<Complex64>::identity(inner, inner);
    for l in w.letters() {
        acc *= match l {
            Letter::X => x.entries(),
            Letter::Y => y.entries(),
        };
    }
    let full = TruncatedMatrix {
        entries: acc,
        provenance: format!("word({w})"),
        exact_block: None,
        self_adjoint: false,
    };
    Ok(full.top_left(n).with_exact_block(n))
}

/// `p(X, Y)` with monomials ordered `X^i Y^j`, on a block of size `m`.
fn poly_block(
    p: &BivariatePolynomial,
    xpow: &[DMatrix<Complex64>],
    ypow: &[DMatrix<Complex64>],
    m: usize,
) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(m, m);
    for (i, j, c) in p.terms() {
        out += (&xpow[i as usize] * &ypow[j as usize]) * Complex64::new(c, 0.0);
    }
    out
}

fn powers(a: &DMatrix<Complex64>, deg: usize) -> Vec<DMatrix<Complex64>> {
    let m = a.nrows();
    let mut out = vec![DMatrix::<Complex64>::identity(m, m)];
    for d in 1..=deg {
        let next = &out[d - 1] * a;
        out.push(next);
    }
    out
}

/// Trace of the top-left `n x n` block of `[p(X,Y), q(X,Y)]`, exact for
/// finite band.
fn commutator_block_trace(
    phi: &FourierSymbol,
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
    n: usize,
) -> Complex64 {
    let dp = p.degree() as usize;
    let dq = q.degree() as usize;
    let m = n + (dp + dq) * phi.band();
    let x = toeplitz_matrix(&phi.real_part(), m);
    let y = toeplitz_matrix(&phi.imag_part(), m);
    let deg = dp.max(dq);
    let xp = powers(x.entries(), deg);
    let yp = powers(y.entries(), deg);
    let pm = poly_block(p, &xp, &yp, m);
    let qm = poly_block(q, &xp, &yp, m);
    let top = |a: &DMatrix<Complex64>| a.view((0, 0), (n, m)).into_owned();
    let left = |a: &DMatrix<Complex64>| a.view((0, 0), (m, n)).into_owned();
    let pq = top(&pm) * left(&qm);
    let qp = top(&qm) * left(&pm);
    (pq - qp).trace()
}

/// Result of [`commutator_trace_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorTrace {
    pub value: Complex64,
    /// Block size whose trace is reported.
    pub n: usize,
}

/// `tr [p(X,Y), q(X,Y)]` for `X = T_{Re phi}`, `Y = T_{Im phi}`.
pub fn commutator_trace(
    phi: &FourierSymbol,
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
) -> Result<Complex64> {
    commutator_trace_detailed(phi, p, q).map(|t| t.value)
}

/// As [`commutator_trace`], also returning the block size used.
///
/// A word of length `L` in band-`K` Toeplitz operators is a Toeplitz operator
/// plus a correction living in the top-left `LK x LK` corner, so the commutator
/// is supported in a `(deg p + deg q + 1) K` corner. The block
/// `N = (deg p + deg q + 2) K` covers it; `2N` must give the same trace.
pub fn commutator_trace_detailed(
    phi: &FourierSymbol,
    p: &BivariatePolynomial,
    q: &BivariatePolynomial,
) -> Result<CommutatorTrace> {
    require_exact(phi)?;
    let band = phi.band();
    let n = ((p.degree() + q.degree()) as usize + 2).saturating_mul(band).max(1);
    let at_n = commutator_block_trace(phi, p, q, n);
    let at_2n = commutator_block_trace(phi, p, q, 2 * n);
    let diff = (at_n - at_2n).norm();
    if !(diff <= STABILIZATION_TOL) {
        return Err(Error::Stabilization {
            n,
            n2: 2 * n,
            at_n: at_n.to_string(),
            at_2n: at_2n.to_string(),
            diff,
        });
    }
    Ok(CommutatorTrace { value: at_n, n })
}

/// Schatten norm of a block with a flag for blocks that are not exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchattenNorm {
    pub value: f64,
    /// Set when the block is a truncation; the value is then only a lower bound.
    pub lower_bound: bool,
}

/// `(sum sigma_i^p)^{1/p}` over the singular values of the block.
pub fn schatten_norm(a: &TruncatedMatrix, p: f64) -> Result<SchattenNorm> {
    if !(p >= 1.0) {
        return Err(Error::range("p", p, "p >= 1"));
    }
    let sv = singular_values(a);
    let value = if p.is_infinite() {
        sv.iter().copied().fold(0.0, f64::max)
    } else {
        sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
    };
    Ok(SchattenNorm {
        value,
        lower_bound: !a.is_exact(),
    })
}

/// Singular values in decreasing order.
pub fn singular_values(a: &TruncatedMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = if a.is_self_adjoint() {
        a.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .collect()
    } else {
        a.entries.clone().svd(false, false).singular_values.iter().copied().collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// `R = diag(1, r, r^2, ...)` on the first `n` basis vectors.
pub fn diag_r(r: f64, n: usize) -> Result<TruncatedMatrix> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::range("r", r, "0 < r < 1"));
    }
    let n = n.max(1);
    let mut out = TruncatedMatrix::from_fn(n, format!("R(r={r})"), |m, k| {
        if m == k {
            Complex64::new(r.powi(m as i32), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .with_exact_block(n);
    out.self_adjoint = true;
    Ok(out)
}

/// Moves the block `a` down the diagonal by `l - 1` places; the result has
/// dimension `dim(a) + l - 1`.
pub fn shift_conjugate(a: &TruncatedMatrix, l: usize) -> Result<TruncatedMatrix> {
    if l < 2 {
        return Err(Error::range("l", l as f64, "l >= 2"));
    }
    let s = l - 1;
    let n = a.dim() + s;
    let mut out = TruncatedMatrix::from_fn(n, format!("shift{l}({})", a.provenance), |m, k| {
        if m >= s && k >= s {
            a.entries[(m - s, k - s)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    out.exact_block = a.exact_block.map(|b| b + s);
    out.self_adjoint = a.self_adjoint;
    Ok(out)
}

/// Both sides of the identity that pulls the smoothing parameter out of the
/// symbol:
///
/// `tr(C_r X) = r^2 tr(C R X R) - sum_{l>=2} r^{2l-2} (1 - r^2) tr(C shift_l(R X R))`
///
/// where `C = [T_phi^*, T_phi]`, `C_r` is the same for the smoothed symbol, and
/// `shift_l` moves a block down by `l - 1`. Finite band `K` makes the sum stop
/// at `l = K`.
pub fn extracting_r_check(
    phi: &FourierSymbol,
    xm: &TruncatedMatrix,
    r: f64,
) -> Result<(Complex64, Complex64)> {
    require_exact(phi)?;
    let rr = diag_r(r, xm.dim())?;
    let d = xm.dim();
    let band = phi.band();

    let smoothed = phi.poisson_smooth(r)?;
    let lhs = self_commutator(&smoothed, d).trace_product(xm);

    let rxr = rr.entries() * xm.entries() * rr.entries();
    let rxr = TruncatedMatrix {
        entries: rxr,
        provenance: "RXR".into(),
        exact_block: xm.exact_block,
        self_adjoint: false,
    };
    let c = self_commutator(phi, d + band);
    let mut rhs = r * r * c.trace_product(&rxr);
    for l in 2..=band {
        let shifted = shift_conjugate(&rxr, l)?;
        let w = r.powi(2 * l as i32 - 2) * (1.0 - r * r);
        rhs -= c.trace_product(&shifted) * w;
    }
    Ok((lhs, rhs))
}
