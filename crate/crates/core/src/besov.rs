//! Besov-space diagnostics for symbols given by finitely many coefficients.
//!
//! Membership in `B_p` cannot be decided from a finite table, so every report
//! carries a trend of partial integrals and a rule-based verdict rather than a
//! yes/no answer.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{hankel_matrix, schatten_norm, SchattenNorm};
use crate::quad::DiskQuadrature;
use crate::symbol::FourierSymbol;

/// Radii `1 - 4^-j`, `j = 1..=5`.
pub fn default_radii() -> Vec<f64> {
    (1..=5).map(|j| 1.0 - 0.25f64.powi(j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

/// What the trend was taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendAxis {
    Radius,
    Band,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovReport {
    pub p: f64,
    /// Last entry of `trend`.
    pub seminorm_partial: f64,
    pub trend: Vec<f64>,
    pub axis: TrendAxis,
    /// Radius or band of each trend entry.
    pub levels: Vec<f64>,
    pub verdict: Verdict,
    pub tail_bound: f64,
}

/// Classifies a nondecreasing sequence of partial integrals.
///
/// With `d1, d2` the last two increments: converging when `d2 <= d1 / 2`,
/// diverging when `d2 >= 0.9 d1` (growing or flat), inconclusive otherwise or
/// with fewer than three values.
pub fn classify(trend: &[f64]) -> Verdict {
    let n = trend.len();
    if n < 3 {
        return Verdict::Inconclusive;
    }
    let d1 = trend[n - 2] - trend[n - 3];
    let d2 = trend[n - 1] - trend[n - 2];
    if d2 <= 0.5 * d1 || (d1 <= 0.0 && d2 <= 0.0) {
        Verdict::Converging
    } else if d2 >= 0.9 * d1 {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::range("p", p, "1 <= p < infinity"));
    }
    Ok(())
}

fn check_analytic(f: &FourierSymbol) -> Result<()> {
    if (1..=f.band() as i64).any(|k| f.coeff(-k) != Complex64::new(0.0, 0.0)) {
        return Err(Error::Schema("symbol has negative frequencies, not analytic".into()));
    }
    Ok(())
}

fn check_radius(f: &FourierSymbol, rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::range("radius", rho, "0 < radius <= 1"));
    }
    if rho == 1.0 && !f.is_exact() {
        return Err(Error::Tail(f.tail_bound()));
    }
    Ok(())
}

// sum k (k-1) c_k z^{k-2}
fn second_derivative(f: &FourierSymbol, z: Complex64) -> Complex64 {
    (2..=f.band())
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, k| {
            acc * z + f.coeff(k as i64) * (k * (k - 1)) as f64
        })
}

/// Besov integral of an analytic `f` over the disk of radius `rho`: the
/// weighted `int (1-|z|^2)^{p-2} |f'|^p` for `p > 1`, `int |f''|` for `p = 1`.
fn seminorm_at(f: &FourierSymbol, p: f64, rho: f64) -> f64 {
    let q = DiskQuadrature::new(8 * f.band() + 64, 20, 2);
    if p == 1.0 {
        q.integrate(rho, |_, _| 1.0, |z| second_derivative(f, z).norm())
    } else {
        q.integrate(
            rho,
            |s, u| (u * (1.0 + s)).powf(p - 2.0),
            |z| f.wirtinger_unchecked(z).0.norm().powf(p),
        )
    }
}

/// Partial Besov integrals of an analytic symbol over disks of the given radii.
pub fn analytic_besov_seminorm(f: &FourierSymbol, p: f64, radii: &[f64]) -> Result<BesovReport> {
    check_p(p)?;
    check_analytic(f)?;
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Schema("radii must be nonempty and strictly increasing".into()));
    }
    for &rho in radii {
        check_radius(f, rho)?;
    }
    let trend: Vec<f64> = radii.iter().map(|&rho| seminorm_at(f, p, rho)).collect();
    Ok(report(p, trend, TrendAxis::Radius, radii.to_vec(), f.tail_bound()))
}

/// Full-disk Besov integrals of the truncations of `f` to increasing bands.
pub fn analytic_besov_band_trend(f: &FourierSymbol, p: f64, bands: &[usize]) -> Result<BesovReport> {
    check_p(p)?;
    check_analytic(f)?;
    if bands.is_empty() || bands.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Schema("bands must be nonempty and strictly increasing".into()));
    }
    let trend: Vec<f64> = bands
        .iter()
        .map(|&b| seminorm_at(&f.truncate_to(b).truncated(), p, 1.0))
        .collect();
    let levels = bands.iter().map(|&b| b as f64).collect();
    Ok(report(p, trend, TrendAxis::Band, levels, f.tail_bound()))
}

fn report(p: f64, trend: Vec<f64>, axis: TrendAxis, levels: Vec<f64>, tail_bound: f64) -> BesovReport {
    BesovReport {
        p,
        seminorm_partial: *trend.last().unwrap(),
        verdict: classify(&trend),
        trend,
        axis,
        levels,
        tail_bound,
    }
}

/// Bands `K/8, K/4, K/2, K` (deduplicated, at least 1).
fn band_ladder(band: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [band / 8, band / 4, band / 2, band]
        .into_iter()
        .map(|b| b.max(1))
        .collect();
    v.dedup();
    v
}

fn half_report(h: &FourierSymbol, p: f64, radii: &[f64]) -> Result<BesovReport> {
    if h.is_exact() {
        analytic_besov_seminorm(h, p, radii)
    } else {
        analytic_besov_band_trend(h, p, &band_ladder(h.band()))
    }
}

/// Reports for both halves of `phi = f + conj(g)`.
///
/// Exact symbols are probed over `radii`; symbols with a truncation tail over
/// their own truncations to increasing bands.
pub fn besov_membership(
    phi: &FourierSymbol,
    p: f64,
    radii: &[f64],
) -> Result<(BesovReport, BesovReport)> {
    let (f, g) = phi.analytic_split();
    Ok((half_report(&f, p, radii)?, half_report(&g, p, radii)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sufficiency {
    Met,
    NotMet,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub p: f64,
    /// `None` encodes `q = infinity`.
    pub q: Option<f64>,
    pub verdict: Sufficiency,
    pub re_reports: (BesovReport, BesovReport),
    /// Absent for the `L^infinity` variant, where boundedness is automatic.
    pub im_reports: Option<(BesovReport, BesovReport)>,
}

/// Checks `Re phi in B_p`, `Im phi in B_q` for Hölder conjugate `p, q`, or
/// `Re phi in B_1` with `q = infinity`.
pub fn almost_normal_sufficient(
    phi: &FourierSymbol,
    p: f64,
    q: f64,
    radii: &[f64],
) -> Result<SufficiencyReport> {
    let conj_err = Error::Conjugate { p, q };
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(conj_err);
    }
    let q_opt = if q.is_infinite() {
        if p != 1.0 {
            return Err(conj_err);
        }
        None
    } else {
        if p.is_infinite() || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
            return Err(conj_err);
        }
        Some(q)
    };
    let re_reports = besov_membership(&phi.real_part(), p, radii)?;
    let im_reports = match q_opt {
        Some(q) => Some(besov_membership(&phi.imag_part(), q, radii)?),
        None => None,
    };
    let verdict = if phi.is_exact() {
        Sufficiency::Met
    } else {
        let mut all = vec![re_reports.0.verdict, re_reports.1.verdict];
        if let Some((a, b)) = &im_reports {
            all.extend([a.verdict, b.verdict]);
        }
        if all.contains(&Verdict::Diverging) {
            Sufficiency::NotMet
        } else if all.iter().all(|v| *v == Verdict::Converging) {
            Sufficiency::Met
        } else {
            Sufficiency::Inconclusive
        }
    };
    Ok(SufficiencyReport {
        p,
        q: q_opt,
        verdict,
        re_reports,
        im_reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianReport {
    pub radii: Vec<f64>,
    /// `int_{|z| < rho} |J(Phi)|` for each radius.
    pub abs_jacobian: Vec<f64>,
    /// `4 ||F_z|| ||G_z||` over the same disk, `F`, `G` the harmonic
    /// extensions of `Re phi` and `Im phi`.
    pub bound: Vec<f64>,
    pub holds: bool,
}

/// Partial `int |J(Phi)|` against the Cauchy-Schwarz bound built from the
/// real and imaginary parts, `|J| = 2 |G_z conj(F_z) - F_z conj(G_z)|`.
pub fn jacobian_integrability(phi: &FourierSymbol, radii: &[f64]) -> Result<JacobianReport> {
    if radii.is_empty() {
        return Err(Error::Schema("radii must be nonempty".into()));
    }
    for &rho in radii {
        check_radius(phi, rho)?;
    }
    let re = phi.real_part();
    let im = phi.imag_part();
    let q = DiskQuadrature::new(16 * phi.band() + 256, 20, 8);
    let mut abs_jacobian = Vec::with_capacity(radii.len());
    let mut bound = Vec::with_capacity(radii.len());
    for &rho in radii {
        abs_jacobian.push(q.integrate(rho, |_, _| 1.0, |z| phi.jacobian_unchecked(z).abs()));
        let fz = q.integrate(rho, |_, _| 1.0, |z| re.wirtinger_unchecked(z).0.norm_sqr());
        let gz = q.integrate(rho, |_, _| 1.0, |z| im.wirtinger_unchecked(z).0.norm_sqr());
        bound.push(4.0 * (fz * gz).sqrt());
    }
    let holds = abs_jacobian
        .iter()
        .zip(&bound)
        .all(|(a, b)| *a <= b * (1.0 + 1e-9) + 1e-12);
    Ok(JacobianReport {
        radii: radii.to_vec(),
        abs_jacobian,
        bound,
        holds,
    })
}

/// Schatten-`p` norm of the `n x n` Hankel block.
pub fn hankel_schatten_probe(phi: &FourierSymbol, p: f64, n: usize) -> Result<SchattenNorm> {
    schatten_norm(&hankel_matrix(phi, n), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn harmonic_tail(n: usize, s: f64) -> FourierSymbol {
        FourierSymbol::new((1..=n).map(|k| (k as i64, c((k as f64).powf(-s))))).unwrap()
    }

    #[test]
    fn monomial_identity() {
        for k in 1..=10 {
            let f = FourierSymbol::monomial(k, c(1.0));
            let r = analytic_besov_seminorm(&f, 2.0, &[1.0]).unwrap();
            assert!((r.seminorm_partial - PI * k as f64).abs() < 1e-6, "k={k}");
        }
        let r = analytic_besov_seminorm(&FourierSymbol::constant(c(2.0)), 2.0, &default_radii()).unwrap();
        assert_eq!(r.seminorm_partial, 0.0);
        assert_eq!(r.verdict, Verdict::Converging);
    }

    #[test]
    fn termwise_identity_oracle() {
        // int |F'|^2 = pi sum k |c_k|^2 over the full disk
        let f = harmonic_tail(12, 1.0);
        let oracle: f64 = PI * (1..=12).map(|k| 1.0 / k as f64).sum::<f64>();
        let r = analytic_besov_seminorm(&f, 2.0, &[1.0]).unwrap();
        assert!((r.seminorm_partial - oracle).abs() < 1e-9);
    }

    #[test]
    fn p_one_uses_second_derivative() {
        // f = z^2: f'' = 2, int_D 2 = 2 pi
        let f = FourierSymbol::monomial(2, c(1.0));
        let r = analytic_besov_seminorm(&f, 1.0, &[1.0]).unwrap();
        assert!((r.seminorm_partial - 2.0 * PI).abs() < 1e-10);
        assert!(analytic_besov_seminorm(&f, 0.5, &[1.0]).is_err());
        assert!(analytic_besov_seminorm(&FourierSymbol::monomial(-1, c(1.0)), 2.0, &[1.0]).is_err());
    }

    #[test]
    fn weighted_seminorm_for_p_three() {
        // f = z, p = 3: int (1-s^2) ds-area = 2 pi (1/2 - 1/4) = pi/2
        let f = FourierSymbol::monomial(1, c(1.0));
        let r = analytic_besov_seminorm(&f, 3.0, &[1.0]).unwrap();
        assert!((r.seminorm_partial - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify(&[1.0, 2.0]), Verdict::Inconclusive);
        assert_eq!(classify(&[1.0, 2.0, 2.4]), Verdict::Converging);
        assert_eq!(classify(&[1.0, 2.0, 3.0]), Verdict::Diverging);
        assert_eq!(classify(&[1.0, 2.0, 2.7]), Verdict::Inconclusive);
        assert_eq!(classify(&[0.0, 0.0, 0.0]), Verdict::Converging);
    }

    #[test]
    fn harmonic_family_diverges_over_bands() {
        let f = harmonic_tail(40, 1.0).with_tail_bound(1.0).unwrap();
        let r = analytic_besov_band_trend(&f, 2.0, &[5, 10, 20, 40]).unwrap();
        assert_eq!(r.verdict, Verdict::Diverging);
        let h40: f64 = (1..=40).map(|k| 1.0 / k as f64).sum();
        assert!((r.seminorm_partial - PI * h40).abs() < 1e-8);

        let g = harmonic_tail(40, 3.0).with_tail_bound(1e-4).unwrap();
        let r = analytic_besov_band_trend(&g, 2.0, &[5, 10, 20, 40]).unwrap();
        assert_eq!(r.verdict, Verdict::Converging);
    }

    #[test]
    fn membership_of_cosine() {
        let phi = FourierSymbol::new_real([(1, c(1.0)), (-1, c(1.0))]).unwrap();
        let (f, g) = besov_membership(&phi, 2.0, &[0.5, 0.9, 1.0]).unwrap();
        assert!((f.seminorm_partial - PI).abs() < 1e-10);
        assert!((g.seminorm_partial - PI).abs() < 1e-10);
        let (_, g) = besov_membership(&FourierSymbol::monomial(2, c(1.0)), 2.0, &[1.0]).unwrap();
        assert_eq!(g.seminorm_partial, 0.0);
    }

    #[test]
    fn sufficiency() {
        let phi = FourierSymbol::new([(1, c(1.0)), (-2, c(0.3))]).unwrap();
        let rep = almost_normal_sufficient(&phi, 2.0, 2.0, &default_radii()).unwrap();
        assert_eq!(rep.verdict, Sufficiency::Met);
        let rep = almost_normal_sufficient(&phi, 1.0, f64::INFINITY, &default_radii()).unwrap();
        assert_eq!(rep.verdict, Sufficiency::Met);
        assert!(rep.im_reports.is_none());
        assert_eq!(
            almost_normal_sufficient(&phi, 3.0, 1.4, &default_radii()),
            Err(Error::Conjugate { p: 3.0, q: 1.4 })
        );
        assert!(almost_normal_sufficient(&phi, 3.0, 1.5, &default_radii()).is_ok());

        let tail = FourierSymbol::new((1..=40).flat_map(|k| {
            let a = c(0.5 / k as f64);
            [(k as i64, a), (-(k as i64), a)]
        }))
        .unwrap()
        .with_tail_bound(1.0)
        .unwrap();
        let rep = almost_normal_sufficient(&tail, 2.0, 2.0, &default_radii()).unwrap();
        assert_eq!(rep.verdict, Sufficiency::NotMet);
    }

    #[test]
    fn jacobian_bound() {
        let phi = FourierSymbol::new([(1, c(1.0)), (-1, c(0.5))]).unwrap();
        let rep = jacobian_integrability(&phi, &[0.5, 1.0]).unwrap();
        assert!((rep.abs_jacobian[1] - 0.75 * PI).abs() < 1e-10);
        assert!((rep.bound[1] - 0.75 * PI).abs() < 1e-10);
        assert!(rep.holds);

        let z = FourierSymbol::monomial(1, c(1.0));
        let rep = jacobian_integrability(&z, &[1.0]).unwrap();
        assert!((rep.abs_jacobian[0] - PI).abs() < 1e-10);
        assert!(rep.holds);

        let k = FourierSymbol::constant(c(3.0));
        let rep = jacobian_integrability(&k, &[1.0]).unwrap();
        assert_eq!(rep.abs_jacobian[0], 0.0);

        let mixed = FourierSymbol::new([(1, c(1.0)), (2, Complex64::new(0.2, 0.4)), (-1, c(0.3))]).unwrap();
        assert!(jacobian_integrability(&mixed, &default_radii()).unwrap().holds);
    }

    #[test]
    fn hankel_probe() {
        let z = FourierSymbol::monomial(1, c(1.0));
        assert_eq!(hankel_schatten_probe(&z, 2.0, 8).unwrap().value, 0.0);
        let zbar = FourierSymbol::monomial(-1, c(1.0));
        for p in [1.0, 2.0, 3.0] {
            assert!((hankel_schatten_probe(&zbar, p, 8).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hankel_hilbert_schmidt_identity() {
        let phi = FourierSymbol::new([(-1, c(0.5)), (-3, Complex64::new(0.1, -0.2)), (2, c(1.0))]).unwrap();
        let oracle: f64 = (1..=3).map(|k| k as f64 * phi.coeff(-k).norm_sqr()).sum();
        let hs = hankel_schatten_probe(&phi, 2.0, 6).unwrap().value;
        assert!((hs * hs - oracle).abs() < 1e-12);
    }

    #[test]
    fn hankel_family_growth() {
        let fam = |s: f64, n: usize| {
            FourierSymbol::new((1..=n).map(|k| (-(k as i64), c((k as f64).powf(-s))))).unwrap()
        };
        let norms = |s: f64| -> Vec<f64> {
            [16, 32, 64]
                .iter()
                .map(|&n| hankel_schatten_probe(&fam(s, n), 2.0, n).unwrap().value.powi(2))
                .collect()
        };
        let slow = norms(0.6);
        let fast = norms(1.5);
        // sum k^{1-2s}: grows like n^{0.8} for s = 0.6, converges for s = 1.5
        assert!(slow[2] - slow[1] > slow[1] - slow[0]);
        assert!((fast[2] - fast[1]) < 0.6 * (fast[1] - fast[0]));
        let oracle: f64 = (1..=64).map(|k| (k as f64).powf(-2.0)).sum();
        assert!((fast[2] - oracle).abs() < 1e-10);
    }
}
