//! Polar quadrature on disks centered at the origin.
//!
//! Angular integrals use the trapezoid rule, which is exact for trigonometric
//! polynomials of degree below the sample count. Radial integrals use
//! Gauss-Legendre panels whose breakpoints `1 - 2^-j` crowd toward the unit
//! circle, where the Besov weights `(1 - |z|^2)^(p-2)` blow up or vanish.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Deepest breakpoint below 1 is `1 - 2^-MAX_LEVEL`.
const MAX_LEVEL: i32 = 48;

pub struct DiskQuadrature {
    rule: GaussLegendre,
    n_theta: usize,
    subpanels: usize,
}

impl DiskQuadrature {
    /// `n_theta` angular samples, `order`-point Gauss-Legendre per panel, each
    /// geometric panel split into `subpanels` equal pieces.
    pub fn new(n_theta: usize, order: usize, subpanels: usize) -> Self {
        DiskQuadrature {
            rule: GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap()),
            n_theta: n_theta.max(8),
            subpanels: subpanels.max(1),
        }
    }

    /// Exact for smooth integrands built from a symbol of band `band`.
    pub fn for_band(band: usize) -> Self {
        Self::new(8 * band + 64, 20, 1)
    }

    /// Radial breakpoints `0, 1/2, 3/4, ...` cut at `rho`.
    fn breakpoints(rho: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        for j in 1..=MAX_LEVEL {
            let b = 1.0 - 0.5f64.powi(j);
            if b >= rho {
                break;
            }
            pts.push(b);
        }
        pts.push(rho);
        pts
    }

    /// `int_0^rho weight(s, 1 - s) s ds int_0^{2 pi} f(s e^{i theta}) d theta`.
    ///
    /// The weight also receives `1 - s` computed without cancellation, so
    /// endpoint singularities at `s = 1` can be evaluated accurately.
    pub fn integrate(
        &self,
        rho: f64,
        weight: impl Fn(f64, f64) -> f64,
        f: impl Fn(Complex64) -> f64,
    ) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let dtheta = 2.0 * PI / self.n_theta as f64;
        let ring: Vec<Complex64> = (0..self.n_theta)
            .map(|j| Complex64::from_polar(1.0, j as f64 * dtheta))
            .collect();
        let angular = |s: f64| -> f64 { ring.iter().map(|u| f(u * s)).sum::<f64>() * dtheta };
        let pts = Self::breakpoints(rho);
        let mut total = 0.0;
        for w in pts.windows(2) {
            let h = (w[1] - w[0]) / self.subpanels as f64;
            for k in 0..self.subpanels {
                let a = w[0] + k as f64 * h;
                // integrate in u = 1 - s so nodes never round onto s = 1
                let (u0, u1) = (1.0 - (a + h), 1.0 - a);
                total += self.rule.integrate(u0, u1, |u| {
                    let s = 1.0 - u;
                    weight(s, u) * s * angular(s)
                });
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn disk_area_and_moments() {
        let q = DiskQuadrature::new(64, 16, 1);
        assert_abs_diff_eq!(q.integrate(1.0, |_, _| 1.0, |_| 1.0), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(q.integrate(0.5, |_, _| 1.0, |_| 1.0), PI * 0.25, epsilon = 1e-12);
        // int |z|^4 = 2 pi / 6
        assert_abs_diff_eq!(q.integrate(1.0, |_, _| 1.0, |z| z.norm_sqr().powi(2)), PI / 3.0, epsilon = 1e-12);
        assert_eq!(q.integrate(0.0, |_, _| 1.0, |_| 1.0), 0.0);
    }

    #[test]
    fn singular_weight() {
        // int_D (1-|z|^2)^{-1/2} = 2 pi int_0^1 s (1-s^2)^{-1/2} ds = 2 pi
        let q = DiskQuadrature::new(16, 20, 1);
        let v = q.integrate(1.0, |s, u| (u * (1.0 + s)).powf(-0.5), |_| 1.0);
        assert!((v - 2.0 * PI).abs() < 1e-5, "{v}");
    }
}
