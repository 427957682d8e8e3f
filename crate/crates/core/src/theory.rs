//! Exact theoretical quantities for the Gaussian moving-average model.
//!
//! Marginals are standard normal, so `F = Phi` and `f = phi`. Indicator
//! covariances come from the bivariate normal distribution at the model's
//! lag correlations. The model has finite memory, so every long-run series
//! is a finite sum over lags `1..m-1`.

use serde::{Deserialize, Serialize};

use crate::assoc_model::MovingAverageModel;
use crate::error::{Error, Result};
use crate::normal_math::{self, bivariate_cdf_excess};

const DEGENERATE_VARIANCE: f64 = 1e-12;

/// Quantile level with the model quantities needed to standardize the
/// sample quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileSpec {
    pub p: f64,
    pub x_p: f64,
    pub f_xp: f64,
    pub sigma2_xp: f64,
    /// `sigma(x_p) / f(x_p)`
    pub a_p: f64,
}

impl QuantileSpec {
    /// Threshold `x_p + t a_p / sqrt(n)`.
    pub fn shifted_threshold(&self, n: usize, t: f64) -> f64 {
        self.x_p + t * self.a_p / (n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedVariance {
    pub n: usize,
    pub t: f64,
    pub threshold: f64,
    pub sigma2_nt: f64,
}

/// `Cov(I(X_1 <= x), I(X_j <= y))` for `j >= 2`.
pub fn indicator_cov(model: &MovingAverageModel, j: usize, x: f64, y: f64) -> Result<f64> {
    if j < 2 {
        return Err(Error::domain("indicator covariance lag index must be >= 2", j as f64));
    }
    Ok(bivariate_cdf_excess(x, y, model.autocov(j - 1)))
}

/// Autocovariance at lag `k` of the indicator sequence `I(X_i <= c)`.
pub fn indicator_autocov(model: &MovingAverageModel, c: f64, k: usize) -> f64 {
    if k == 0 {
        let f = normal_math::cdf(c);
        f * normal_math::sf(c)
    } else {
        bivariate_cdf_excess(c, c, model.autocov(k))
    }
}

/// Long-run variance of `I(X_i <= c)`:
/// `Var(I(X_1 <= c)) + 2 sum_{j>=2} Cov(I(X_1 <= c), I(X_j <= c))`.
pub fn long_run_variance(model: &MovingAverageModel, threshold: f64) -> f64 {
    let cross = compensated_sum((1..model.order()).map(|k| indicator_autocov(model, threshold, k)));
    indicator_autocov(model, threshold, 0) + 2.0 * cross
}

/// `Var(sum_{i=1..n} I(X_i <= c))`, exact by stationarity.
pub fn partial_sum_variance(model: &MovingAverageModel, threshold: f64, n: usize) -> f64 {
    let nf = n as f64;
    let cross = compensated_sum(
        (1..model.order().min(n)).map(|k| (nf - k as f64) * indicator_autocov(model, threshold, k)),
    );
    nf * indicator_autocov(model, threshold, 0) + 2.0 * cross
}

/// Neumaier summation.
pub(crate) fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for x in terms {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

pub fn make_quantile_spec(model: &MovingAverageModel, p: f64) -> Result<QuantileSpec> {
    let x_p = normal_math::quantile(p)?;
    let f_xp = normal_math::pdf(x_p);
    let sigma2_xp = long_run_variance(model, x_p);
    if sigma2_xp.is_nan() || sigma2_xp <= DEGENERATE_VARIANCE {
        return Err(Error::DegenerateVariance { threshold: x_p, value: sigma2_xp });
    }
    Ok(QuantileSpec { p, x_p, f_xp, sigma2_xp, a_p: sigma2_xp.sqrt() / f_xp })
}

/// `sigma^2_(n,t)`: long-run variance at the shifted threshold.
pub fn shifted_variance(
    model: &MovingAverageModel,
    spec: &QuantileSpec,
    n: usize,
    t: f64,
) -> ShiftedVariance {
    let threshold = spec.shifted_threshold(n, t);
    let sigma2_nt = if t == 0.0 { spec.sigma2_xp } else { long_run_variance(model, threshold) };
    ShiftedVariance { n, t, threshold, sigma2_nt }
}

/// `b_n(t) = sqrt(n) (F(x_p + t a_p n^-1/2) - p) / sigma_(n,t)`.
pub fn b_n_t(model: &MovingAverageModel, spec: &QuantileSpec, n: usize, t: f64) -> Result<f64> {
    let sv = shifted_variance(model, spec, n, t);
    if sv.sigma2_nt.is_nan() || sv.sigma2_nt <= 0.0 {
        return Err(Error::DegenerateVariance { threshold: sv.threshold, value: sv.sigma2_nt });
    }
    // F(x_p) = p; differencing two cdf values keeps b_n(0) = 0 and the sign of t
    let lift = normal_math::cdf(sv.threshold) - normal_math::cdf(spec.x_p);
    Ok((n as f64).sqrt() * lift / sv.sigma2_nt.sqrt())
}

/// Leading term `t sigma(x_p) / sigma_(n,t)` of the expansion of `b_n(t)`.
pub fn b_n_t_first_order(model: &MovingAverageModel, spec: &QuantileSpec, n: usize, t: f64) -> f64 {
    let sv = shifted_variance(model, spec, n, t);
    t * spec.sigma2_xp.sqrt() / sv.sigma2_nt.sqrt()
}

/// Rate constants used under polynomial covariance decay `k^-beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParameters {
    pub beta: f64,
    /// `2 floor((beta - 3) / 3)`
    pub q: u32,
    /// `1 / (4 + q)`
    pub b: f64,
    /// Coefficient of `L_n = b0 log n`.
    pub b0: f64,
}

impl RateParameters {
    pub fn new(beta: f64, b0: f64) -> Result<Self> {
        if !(beta > 6.0 && beta.is_finite()) {
            return Err(Error::domain("polynomial decay exponent must exceed 6", beta));
        }
        if b0.is_nan() || b0 <= 0.0 {
            return Err(Error::domain("L_n coefficient must be positive", b0));
        }
        let q = 2 * ((beta - 3.0) / 3.0).floor() as u32;
        Ok(Self { beta, q, b: 1.0 / (4.0 + f64::from(q)), b0 })
    }

    /// Truncation level `K_n = n^b`.
    pub fn k_n(&self, n: f64) -> f64 {
        n.powf(self.b)
    }

    /// Truncation level `L_n = b0 log n`.
    pub fn l_n(&self, n: f64) -> f64 {
        self.b0 * n.ln()
    }

    /// `n^(-q/(8+2q)) + n^(-1/3)`
    pub fn polynomial_rate(&self, n: f64) -> f64 {
        let q = f64::from(self.q);
        n.powf(-q / (8.0 + 2.0 * q)) + n.powf(-1.0 / 3.0)
    }
}

/// `n^(-1/2) log^2 n`
pub fn exponential_rate(n: f64) -> f64 {
    let l = n.ln();
    l * l / n.sqrt()
}
