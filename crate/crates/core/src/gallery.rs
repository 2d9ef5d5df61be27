//! Worked examples outside the Toeplitz class: bilateral weighted shifts, the
//! Cesàro operator and finite-rank tails of a Hilbert-Schmidt matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{schatten_norm, singular_values, TruncatedMatrix};

/// Weights `alpha_n` on `[-W, W]`, continued by `alpha_minus` to the left and
/// `alpha_plus` to the right.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedShiftSpec {
    weights: Vec<f64>,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

impl WeightedShiftSpec {
    /// `weights` must have odd length `2W + 1`; all values nonnegative.
    pub fn new(weights: Vec<f64>, alpha_minus: f64, alpha_plus: f64) -> Result<Self> {
        if weights.len().is_multiple_of(2) {
            return Err(Error::Schema("weight window must have odd length 2W+1".into()));
        }
        for &a in weights.iter().chain([&alpha_minus, &alpha_plus]) {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::range("weight", a, ">= 0 and finite"));
            }
        }
        Ok(WeightedShiftSpec {
            weights,
            alpha_minus,
            alpha_plus,
        })
    }

    /// Constant weights `a`.
    pub fn constant(a: f64) -> Result<Self> {
        Self::new(vec![a], a, a)
    }

    pub fn window(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn alpha(&self, n: i64) -> f64 {
        let w = self.window() as i64;
        if n < -w {
            self.alpha_minus
        } else if n > w {
            self.alpha_plus
        } else {
            self.weights[(n + w) as usize]
        }
    }
}

/// `sum_n |alpha_n^2 - alpha_{n+1}^2|`.
pub fn shift_almost_normality(spec: &WeightedShiftSpec) -> f64 {
    let w = spec.window() as i64;
    (-w - 1..=w)
        .map(|n| (spec.alpha(n).powi(2) - spec.alpha(n + 1).powi(2)).abs())
        .sum()
}

/// `(alpha_+^2 - alpha_-^2) / 2`, the mass of the annulus measure.
pub fn shift_hh_total_variation(spec: &WeightedShiftSpec) -> Result<f64> {
    if spec.alpha_minus > spec.alpha_plus {
        return Err(Error::Order {
            minus: spec.alpha_minus,
            plus: spec.alpha_plus,
        });
    }
    Ok((spec.alpha_plus.powi(2) - spec.alpha_minus.powi(2)) / 2.0)
}

/// `[W^*, W]` of the shift with weights `beta` restricted to `[lo, hi]`, from an
/// explicit matrix on `[lo - 1, hi + 1]`; the outer rows carry edge effects.
fn windowed_commutator(beta: impl Fn(i64) -> f64, lo: i64, hi: i64) -> TruncatedMatrix {
    let base = lo - 1;
    let dim = (hi - lo + 3) as usize;
    let mut w = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim - 1 {
        w[(j + 1, j)] = Complex64::new(beta(base + j as i64), 0.0);
    }
    let wa = w.adjoint();
    let comm = &wa * &w - &w * &wa;
    let inner = comm.view((1, 1), (dim - 2, dim - 2)).into_owned();
    TruncatedMatrix::new(inner, format!("shift_commutator[{lo},{hi}]"))
        .expect("finite weights")
        .into_self_adjoint()
        .expect("commutator is self-adjoint")
}

/// `[W_alpha^*, W_alpha]` on `[-W-2, W+2]`; diagonal entries `alpha_n^2 - alpha_{n-1}^2`.
pub fn shift_commutator(spec: &WeightedShiftSpec) -> TruncatedMatrix {
    let w = spec.window() as i64;
    windowed_commutator(|n| spec.alpha(n), -w - 2, w + 2)
}

/// Weights of `W_alpha + T_k`: `alpha_+` on `[0, k]`, `alpha_-` on `[-k, -1]`.
pub fn beta_weight(spec: &WeightedShiftSpec, k: usize, n: i64) -> f64 {
    let k = k as i64;
    if (0..=k).contains(&n) {
        spec.alpha_plus
    } else if (-k..0).contains(&n) {
        spec.alpha_minus
    } else {
        spec.alpha(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationNorm {
    pub closed_form: f64,
    pub matrix_value: f64,
}

/// `||[(W_alpha + T_k)^*, W_alpha + T_k]||_1` in closed form and from the
/// windowed matrix on `[-k-2, k+2]`.
pub fn perturbation_family_norm(spec: &WeightedShiftSpec, k: usize) -> Result<PerturbationNorm> {
    let w = spec.window();
    if k < w {
        return Err(Error::Window { k, window: w });
    }
    let sq = |x: f64| x * x;
    let (am, ap) = (spec.alpha_minus, spec.alpha_plus);
    let ki = k as i64;
    let jump = |n: i64| (sq(spec.alpha(n)) - sq(spec.alpha(n + 1))).abs();
    // untouched pairs (n, n+1) lie entirely outside [-k, k]
    let outer: f64 = (-(w as i64) - 1..=-ki - 2).map(jump).sum::<f64>()
        + (ki + 1..=w as i64).map(jump).sum::<f64>();
    let closed_form = (sq(ap) - sq(am)).abs()
        + (sq(ap) - sq(spec.alpha(ki + 1))).abs()
        + (sq(am) - sq(spec.alpha(-ki - 1))).abs()
        + outer;
    let comm = windowed_commutator(|n| beta_weight(spec, k, n), -ki - 2, ki + 2);
    let matrix_value = schatten_norm(&comm, 1.0)?.value;
    Ok(PerturbationNorm {
        closed_form,
        matrix_value,
    })
}

/// `psi'(x)` for `x > 0`: recurrence up to `x >= 20`, then the asymptotic series.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        + inv2 / 2.0
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesaroReport {
    pub n: usize,
    /// Trace of the inner `(N/2) x (N/2)` block of `[C^*, C]`.
    pub trace_partial: f64,
    pub min_eigenvalue: f64,
    pub psd_check: bool,
    pub inner: TruncatedMatrix,
}

/// Inner block of `[C_0^*, C_0]` from the `N x N` truncation of the Cesàro
/// matrix `C_{mn} = 1/(m+1)`, `n <= m`.
///
/// Columns of `C_0` extend past row `N`, so `C^* C` gets the column tail
/// `sum_{m >= N} 1/(m+1)^2 = psi'(N+1)` added; the inner block is then exact.
pub fn cesaro_commutator(n: usize) -> Result<CesaroReport> {
    if n < 4 {
        return Err(Error::range("N", n as f64, "N >= 4"));
    }
    let c = DMatrix::<f64>::from_fn(n, n, |m, k| if k <= m { 1.0 / (m + 1) as f64 } else { 0.0 });
    let tail = trigamma(n as f64 + 1.0);
    let mut ctc = c.transpose() * &c;
    ctc.add_scalar_mut(tail);
    let cct = &c * c.transpose();
    let h = n / 2;
    let inner = (ctc - cct).view((0, 0), (h, h)).into_owned();
    let trace_partial = inner.trace();
    let min_eigenvalue = inner
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let inner = TruncatedMatrix::new(inner.map(|v| Complex64::new(v, 0.0)), format!("cesaro(N={n})"))?
        .with_exact_block(h)
        .into_self_adjoint()?;
    Ok(CesaroReport {
        n,
        trace_partial,
        min_eigenvalue,
        psd_check: min_eigenvalue >= -1e-10,
        inner,
    })
}

/// `||[(T(1-P_n))^*, T(1-P_n)]||_1` for `n = 0..=d`, `P_n` the projection on
/// the first `n` coordinates. Vanishes at `n = d`.
pub fn hilbert_schmidt_tails(t: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if !t.is_square() {
        return Err(Error::Schema("matrix must be square".into()));
    }
    let d = t.nrows();
    (0..=d)
        .map(|n| {
            let mut a = t.clone();
            a.columns_mut(0, n).fill(Complex64::new(0.0, 0.0));
            let aa = a.adjoint();
            let comm = TruncatedMatrix::new(&aa * &a - &a * &aa, "hs_tail")?.into_self_adjoint()?;
            Ok(singular_values(&comm).iter().sum())
        })
        .collect()
}

/// One line of the fixed example table.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryRow {
    pub case: &'static str,
    pub quantity: String,
    pub computed: f64,
    /// `None` where no closed form exists.
    pub closed_form: Option<f64>,
}

/// Hilbert-Schmidt tails, Cesàro partial traces and weighted-shift norms.
pub fn gallery_table() -> Result<Vec<GalleryRow>> {
    let mut rows = Vec::new();
    let t = DMatrix::<Complex64>::from_fn(6, 6, |i, j| {
        Complex64::new(1.0 / (1 + i + 2 * j) as f64, 0.1 * (i as f64 - j as f64))
    });
    for (n, v) in hilbert_schmidt_tails(&t)?.into_iter().enumerate() {
        rows.push(GalleryRow {
            case: "hilbert_schmidt",
            quantity: format!("tail_trace_norm(n={n})"),
            computed: v,
            closed_form: (n == 6).then_some(0.0),
        });
    }
    for n in [64, 128, 256] {
        let c = cesaro_commutator(n)?;
        rows.push(GalleryRow {
            case: "cesaro",
            quantity: format!("trace_partial(N={n})"),
            computed: c.trace_partial,
            closed_form: None,
        });
        rows.push(GalleryRow {
            case: "cesaro",
            quantity: format!("min_eigenvalue(N={n})"),
            computed: c.min_eigenvalue,
            closed_form: None,
        });
    }
    let specs = [
        ("jump_0_1", WeightedShiftSpec::new(vec![1.0], 0.0, 1.0)?),
        ("bump_1_2", WeightedShiftSpec::new(vec![1.0, 2.0, 1.5], 1.0, 2.0)?),
    ];
    for (name, spec) in specs {
        let tv = shift_hh_total_variation(&spec)?;
        let ap2 = spec.alpha_plus.powi(2);
        let am2 = spec.alpha_minus.powi(2);
        rows.push(GalleryRow {
            case: "weighted_shift",
            quantity: format!("{name}:almost_normality_sum"),
            computed: schatten_norm(&shift_commutator(&spec), 1.0)?.value,
            closed_form: Some(shift_almost_normality(&spec)),
        });
        rows.push(GalleryRow {
            case: "weighted_shift",
            quantity: format!("{name}:total_variation"),
            computed: tv,
            closed_form: Some((ap2 - am2) / 2.0),
        });
        let k = spec.window() + 2;
        let pn = perturbation_family_norm(&spec, k)?;
        rows.push(GalleryRow {
            case: "weighted_shift",
            quantity: format!("{name}:perturbation_norm(k={k})"),
            computed: pn.matrix_value,
            closed_form: Some(pn.closed_form),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn almost_normality_examples() {
        assert_eq!(shift_almost_normality(&WeightedShiftSpec::constant(0.7).unwrap()), 0.0);
        let jump = WeightedShiftSpec::new(vec![1.0], 0.0, 1.0).unwrap();
        assert_eq!(shift_almost_normality(&jump), 1.0);
        let bump = WeightedShiftSpec::new(vec![1.0, 2.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(shift_almost_normality(&bump), 6.0);
    }

    #[test]
    fn total_variation_examples() {
        let s = WeightedShiftSpec::new(vec![1.0], 0.0, 1.0).unwrap();
        assert_eq!(shift_hh_total_variation(&s).unwrap(), 0.5);
        let s = WeightedShiftSpec::new(vec![1.5], 1.0, 2.0).unwrap();
        assert_eq!(shift_hh_total_variation(&s).unwrap(), 1.5);
        assert_eq!(shift_hh_total_variation(&WeightedShiftSpec::constant(2.0).unwrap()).unwrap(), 0.0);
        let s = WeightedShiftSpec::new(vec![1.0], 2.0, 1.0).unwrap();
        assert!(matches!(shift_hh_total_variation(&s), Err(Error::Order { .. })));
    }

    #[test]
    fn commutator_is_diagonal_with_direct_entries() {
        let s = WeightedShiftSpec::new(vec![0.5, 2.0, 1.0], 0.3, 1.2).unwrap();
        let c = shift_commutator(&s);
        let (lo, dim) = (-3i64, c.dim());
        for i in 0..dim {
            for j in 0..dim {
                let n = lo + i as i64;
                let want = if i == j { s.alpha(n).powi(2) - s.alpha(n - 1).powi(2) } else { 0.0 };
                assert!((c.entry(i, j).re - want).abs() < 1e-14 && c.entry(i, j).im == 0.0);
            }
        }
    }

    #[test]
    fn perturbation_examples() {
        let jump = WeightedShiftSpec::new(vec![1.0], 0.0, 1.0).unwrap();
        let pn = perturbation_family_norm(&jump, 3).unwrap();
        assert!((pn.closed_form - 1.0).abs() < 1e-12 && (pn.matrix_value - 1.0).abs() < 1e-12);
        assert_eq!(pn.closed_form, 2.0 * shift_hh_total_variation(&jump).unwrap());
        let k = WeightedShiftSpec::constant(1.3).unwrap();
        assert_eq!(perturbation_family_norm(&k, 0).unwrap().closed_form, 0.0);
        let wide = WeightedShiftSpec::new(vec![1.0; 5], 1.0, 1.0).unwrap();
        assert_eq!(perturbation_family_norm(&wide, 1), Err(Error::Window { k: 1, window: 2 }));
    }

    #[test]
    fn trigamma_values() {
        // psi'(1) = pi^2 / 6, psi'(1/2) = pi^2 / 2
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((trigamma(1.0) - pi2 / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - pi2 / 2.0).abs() < 1e-12);
        let direct: f64 = (0..200_000).map(|m| 1.0 / (m as f64 + 65.0).powi(2)).sum();
        assert!((trigamma(65.0) - direct).abs() < 1e-5);
    }

    #[test]
    fn cesaro_small_blocks() {
        let c = cesaro_commutator(4).unwrap();
        assert_eq!(c.inner.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let v = c.inner.entry(i, j);
                assert!(v.re.is_finite() && v.im == 0.0);
                assert_eq!(v, c.inner.entry(j, i));
            }
        }
        // diagonal (0,0) = psi'(1) - 1 = pi^2/6 - 1
        assert!((c.inner.entry(0, 0).re - (std::f64::consts::PI.powi(2) / 6.0 - 1.0)).abs() < 1e-13);
        assert!(cesaro_commutator(3).is_err());
    }

    #[test]
    fn cesaro_monotone_and_psd() {
        // oracle: sum_{i < N/2} (psi'(i+1) - 1/(i+1)) by direct summation
        let direct = |n: usize| -> f64 {
            (0..n / 2)
                .map(|i| {
                    let col: f64 = (i..400_000).map(|m| 1.0 / ((m + 1) as f64).powi(2)).sum();
                    col - 1.0 / (i + 1) as f64
                })
                .sum()
        };
        let mut prev = f64::NEG_INFINITY;
        for n in [64, 128] {
            let c = cesaro_commutator(n).unwrap();
            assert!(c.psd_check, "N={n} min eig {}", c.min_eigenvalue);
            assert!(c.trace_partial > prev);
            assert!((c.trace_partial - direct(n)).abs() < 1e-3);
            prev = c.trace_partial;
        }
    }

    #[test]
    fn hilbert_schmidt_tail_vanishes() {
        let t = DMatrix::<Complex64>::from_fn(5, 5, |i, j| Complex64::new((i * j) as f64 * 0.1, i as f64 * 0.05));
        let tails = hilbert_schmidt_tails(&t).unwrap();
        assert_eq!(tails.len(), 6);
        assert_eq!(*tails.last().unwrap(), 0.0);
        assert!(tails[0] > 0.0);
    }

    #[test]
    fn gallery_rows_agree() {
        for row in gallery_table().unwrap() {
            if let Some(cf) = row.closed_form {
                assert!((row.computed - cf).abs() < 1e-12, "{row:?}");
            }
        }
    }

    fn spec_strategy() -> impl Strategy<Value = WeightedShiftSpec> {
        (0usize..4, 0.0f64..3.0, 0.0f64..3.0).prop_flat_map(|(w, am, ap)| {
            proptest::collection::vec(0.0f64..3.0, 2 * w + 1)
                .prop_map(move |ws| WeightedShiftSpec::new(ws, am.min(ap), am.max(ap)).unwrap())
        })
    }

    proptest! {
        #[test]
        fn trace_norm_equals_almost_normality(spec in spec_strategy()) {
            let tn = schatten_norm(&shift_commutator(&spec), 1.0).unwrap().value;
            prop_assert!((tn - shift_almost_normality(&spec)).abs() < 1e-12);
        }

        #[test]
        fn perturbation_closed_form_matches_matrix(spec in spec_strategy(), extra in 0usize..4) {
            let pn = perturbation_family_norm(&spec, spec.window() + extra).unwrap();
            prop_assert!((pn.closed_form - pn.matrix_value).abs() < 1e-12);
            prop_assert!(pn.closed_form >= 2.0 * shift_hh_total_variation(&spec).unwrap() - 1e-12);
        }
    }
}
