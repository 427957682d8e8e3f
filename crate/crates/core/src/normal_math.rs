//! Standard normal numerics: density, distribution function, quantile and the
//! bivariate distribution function.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// 1 / sqrt(2 pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

const BIVARIATE_TOL: f64 = 1e-14;

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function, accurate to about one ulp of the
/// smaller tail.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - cdf(x)` without cancellation.
#[inline]
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Inverse of [`cdf`] on the open unit interval.
pub fn quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("quantile level must lie in (0, 1)", p));
    }
    Ok(quantile_unchecked(p))
}

/// [`quantile`] without the domain check. `p` must be in (0, 1).
#[inline]
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact here
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

/// Quantile for p <= 1/2: rational starting point plus one Halley step.
#[inline]
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let x = acklam(p);
    let e = cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Acklam's rational approximation, relative error below 1.15e-9.
#[inline]
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e+01,
        2.209_460_984_245_205e+02,
        -2.759_285_104_469_687e+02,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e+01,
        2.506_628_277_459_239e+00,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e+01,
        1.615_858_368_580_409e+02,
        -1.556_989_798_598_866e+02,
        6.680_131_188_771_972e+01,
        -1.328_068_155_288_572e+01,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-03,
        -3.223_964_580_411_365e-01,
        -2.400_758_277_161_838e+00,
        -2.549_732_539_343_734e+00,
        4.374_664_141_464_968e+00,
        2.938_163_982_698_783e+00,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-03,
        3.224_671_290_700_398e-01,
        2.445_134_137_142_996e+00,
        3.754_408_661_907_416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Arguments of the standard bivariate normal distribution function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateArgs {
    pub h: f64,
    pub k: f64,
    pub rho: f64,
}

impl BivariateArgs {
    pub fn new(h: f64, k: f64, rho: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::domain("correlation must lie in [-1, 1]", rho));
        }
        if h.is_nan() || k.is_nan() {
            return Err(Error::domain("bivariate threshold is NaN", f64::NAN));
        }
        Ok(Self { h, k, rho })
    }
}

/// `P(Z1 <= h, Z2 <= k)` for standard normals with correlation `rho`.
pub fn bivariate_cdf(args: BivariateArgs) -> f64 {
    let BivariateArgs { h, k, rho } = args;
    if rho == 1.0 {
        return cdf(h.min(k));
    }
    if rho == -1.0 {
        return (cdf(h) - cdf(-k)).max(0.0);
    }
    let p = cdf(h) * cdf(k) + bivariate_cdf_excess(h, k, rho);
    p.clamp(0.0, cdf(h).min(cdf(k)))
}

/// `bivariate_cdf(h, k, rho) - cdf(h) * cdf(k)`, computed directly so that
/// tiny correlations do not cancel.
///
/// Integrates the density over the correlation path `r = sin(theta)`, which
/// removes the `1 / sqrt(1 - r^2)` singularity at `|rho| = 1`. The integrand
/// is symmetric in `(h, k)`, so the result is too.
pub fn bivariate_cdf_excess(h: f64, k: f64, rho: f64) -> f64 {
    if rho == 0.0 || h.is_infinite() || k.is_infinite() {
        return 0.0;
    }
    if rho.abs() >= 1.0 {
        let r = rho.signum();
        let p = if r > 0.0 { cdf(h.min(k)) } else { (cdf(h) - cdf(-k)).max(0.0) };
        return p - cdf(h) * cdf(k);
    }
    let hk = h * k;
    let d2 = (h - k) * (h - k);
    let s2 = (h + k) * (h + k);
    let integrand = |theta: f64| {
        let s = theta.sin();
        // h^2 - 2hks + k^2, written to stay accurate as s -> +1 or -1
        let num = if s >= 0.0 {
            d2 + 2.0 * hk * (1.0 - s)
        } else {
            s2 - 2.0 * hk * (1.0 + s)
        };
        let c2 = (1.0 - s) * (1.0 + s);
        if c2 <= 0.0 {
            return 0.0;
        }
        (-0.5 * num / c2).exp()
    };
    quadrature::integrate(integrand, 0.0, rho.asin(), BIVARIATE_TOL * 2.0 * PI) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive quadrature of the density from 0, an oracle for `cdf`.
    fn quadrature_cdf(x: f64) -> f64 {
        0.5 + quadrature::integrate(pdf, 0.0, x, 1e-16)
    }

    /// Bisection on the smaller tail, an oracle for `quantile`.
    fn bisect_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let below = if p <= 0.5 { cdf(mid) < p } else { sf(mid) > 1.0 - p };
            if below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Tensor Gauss-Legendre integration of the bivariate density over
    /// [-9, h] x [-9, k], an oracle for `bivariate_cdf`.
    fn grid_bivariate(h: f64, k: f64, rho: f64) -> f64 {
        let det = 1.0 - rho * rho;
        let dens = |x: f64, y: f64| {
            (-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * det)).exp() / (2.0 * PI * det.sqrt())
        };
        let lo = -9.0;
        quadrature::integrate(
            |x| quadrature::integrate(|y| dens(x, y), lo, k, 1e-13),
            lo,
            h,
            1e-12,
        )
    }

    #[test]
    fn pdf_values() {
        assert_eq!(pdf(0.0), INV_SQRT_2PI);
        assert_eq!(pdf(1.0), pdf(-1.0));
        assert!((pdf(2.0) - 0.053_990_966_513_188_06).abs() < 1e-17);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(cdf(0.0), 0.5);
        assert_eq!(cdf(f64::INFINITY), 1.0);
        assert_eq!(cdf(f64::NEG_INFINITY), 0.0);
        assert!((cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-15);
    }

    #[test]
    fn cdf_matches_quadrature_oracle() {
        for &x in &[-6.0, -3.3, -1.0, -0.2, 0.7, 1.96, 2.5, 4.0] {
            let oracle = quadrature_cdf(x);
            assert!((cdf(x) - oracle).abs() < 1e-14, "x={x}: {} vs {oracle}", cdf(x));
        }
    }

    #[test]
    fn cdf_symmetry_and_monotonicity() {
        let mut prev = 0.0;
        for i in -4000..=4000 {
            let x = i as f64 * 0.002;
            assert!((cdf(x) + cdf(-x) - 1.0).abs() <= 1e-15, "x={x}");
            assert!(cdf(x) >= prev);
            prev = cdf(x);
        }
    }

    #[test]
    fn quantile_values() {
        assert_eq!(quantile(0.5).unwrap(), 0.0);
        assert!((quantile(0.2).unwrap() + 0.841_621_233_572_914_3).abs() < 1e-14);
        assert!((quantile(0.7).unwrap() - 0.524_400_512_708_040_7).abs() < 1e-14);
        for &p in &[1e-12, 1e-6, 0.01, 0.2, 0.7, 0.975, 1.0 - 1e-9] {
            assert!((quantile(p).unwrap() - bisect_quantile(p)).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(quantile(p), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn quantile_round_trip_grid() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = quantile(p).unwrap();
            assert!((cdf(x) - p).abs() <= 1e-12, "p={p}");
            assert!((quantile(1.0 - p).unwrap() + x).abs() <= 1e-12, "p={p}");
        }
    }

    #[test]
    fn bivariate_special_cases() {
        let b = |h, k, r| bivariate_cdf(BivariateArgs::new(h, k, r).unwrap());
        assert!((b(0.0, 0.0, 0.0) - 0.25).abs() < 1e-15);
        assert!((b(0.0, 0.0, 0.5) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(b(0.3, -1.1, 1.0), cdf(-1.1));
        assert_eq!(b(1.3, 0.2, -1.0), cdf(1.3) - cdf(-0.2));
        assert_eq!(b(-1.3, 0.2, -1.0), 0.0);
        assert!(BivariateArgs::new(0.0, 0.0, 1.0 + 1e-9).is_err());
    }

    #[test]
    fn bivariate_high_precision_values() {
        // 40-digit reference values
        let b = |h, k, r| bivariate_cdf(BivariateArgs::new(h, k, r).unwrap());
        assert!((b(0.3, -1.2, 0.6) - 0.108_425_504_246_807_14).abs() < 1e-13);
        assert!((b(1.0, 2.0, -0.9) - 0.818_594_614_120_589_8).abs() < 1e-13);
        assert!((b(-2.0, -2.0, 0.99) - 0.019_711_642_648_668_95).abs() < 1e-13);
    }

    #[test]
    fn bivariate_matches_arcsine_form() {
        for i in 0..=20 {
            let rho = -1.0 + 0.1 * i as f64;
            let got = bivariate_cdf(BivariateArgs::new(0.0, 0.0, rho).unwrap());
            let want = 0.25 + rho.clamp(-1.0, 1.0).asin() / (2.0 * PI);
            assert!((got - want).abs() < 1e-12, "rho={rho}");
        }
    }

    #[test]
    fn bivariate_matches_grid_oracle() {
        for &(h, k, rho) in &[(0.5, -0.3, 0.4), (-1.0, 1.5, -0.7), (2.0, 0.1, 0.95), (-0.8, -0.8, 0.2)]
        {
            let got = bivariate_cdf(BivariateArgs::new(h, k, rho).unwrap());
            let want = grid_bivariate(h, k, rho);
            assert!((got - want).abs() < 1e-10, "({h},{k},{rho}): {got} vs {want}");
        }
    }

    #[test]
    fn excess_for_tiny_correlation_is_linear() {
        // first-order term: rho * pdf(h) * pdf(k)
        let (h, k, rho) = (0.4, -0.9, 1e-30);
        let e = bivariate_cdf_excess(h, k, rho);
        assert!((e / (rho * pdf(h) * pdf(k)) - 1.0).abs() < 1e-10);
    }
}
