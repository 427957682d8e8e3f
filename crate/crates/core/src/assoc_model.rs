//! Associated Gaussian moving averages `X_k = sum_{j=1..m} a_j e_{k+j}` with
//! positive weights and innovation variance chosen so that `Var(X_k) = 1`.
//!
//! Positive weights on independent innovations make `(X_k)` associated, so
//! every nondecreasing transform of the path is positively correlated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Weight sequence of a moving-average model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientScheme {
    /// `a_j = rho^j`
    Exponential { rho: f64 },
    /// `a_j = j^(-s)`
    Polynomial { s: f64 },
}

impl CoefficientScheme {
    fn validate(&self) -> Result<()> {
        match *self {
            CoefficientScheme::Exponential { rho } if !(rho > 0.0 && rho < 1.0) => {
                Err(Error::domain("exponential weight base must lie in (0, 1)", rho))
            }
            CoefficientScheme::Polynomial { s } if !(s > 0.0 && s.is_finite()) => {
                Err(Error::domain("polynomial weight exponent must be positive", s))
            }
            _ => Ok(()),
        }
    }

    /// Weight `a_j` for `j >= 1`.
    pub fn weight(&self, j: usize) -> f64 {
        match *self {
            CoefficientScheme::Exponential { rho } => rho.powi(j as i32),
            CoefficientScheme::Polynomial { s } => (j as f64).powf(-s),
        }
    }
}

/// Serializable description of a model; the weights are derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub scheme: CoefficientScheme,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct MovingAverageModel {
    scheme: CoefficientScheme,
    weights: Vec<f64>,
    innovation_variance: f64,
    autocov: Vec<f64>,
}

impl TryFrom<ModelSpec> for MovingAverageModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        build_model(spec.scheme, spec.m)
    }
}

impl From<MovingAverageModel> for ModelSpec {
    fn from(model: MovingAverageModel) -> Self {
        model.spec()
    }
}

/// Builds the order-`m` model for `scheme`, normalized to unit marginal variance.
pub fn build_model(scheme: CoefficientScheme, m: usize) -> Result<MovingAverageModel> {
    scheme.validate()?;
    if m == 0 {
        return Err(Error::domain("moving-average order must be at least 1", 0.0));
    }
    let weights: Vec<f64> = (1..=m).map(|j| scheme.weight(j)).collect();
    if let Some(&w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::domain("weights must be positive and finite", w));
    }
    let innovation_variance = 1.0 / weights.iter().map(|a| a * a).sum::<f64>();
    let autocov = (0..m)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let s: f64 = weights[..m - k]
                .iter()
                .zip(&weights[k..])
                .map(|(a, b)| a * b)
                .sum();
            innovation_variance * s
        })
        .collect();
    Ok(MovingAverageModel { scheme, weights, innovation_variance, autocov })
}

impl MovingAverageModel {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec { scheme: self.scheme, m: self.order() }
    }

    pub fn scheme(&self) -> CoefficientScheme {
        self.scheme
    }

    /// MA order `m`.
    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn innovation_variance(&self) -> f64 {
        self.innovation_variance
    }

    /// `Cov(X_1, X_{1+k})`; zero for `k >= m`.
    #[inline]
    pub fn autocov(&self, k: usize) -> f64 {
        self.autocov.get(k).copied().unwrap_or(0.0)
    }

    /// Simulates `X_1..X_n` into a fresh vector.
    pub fn simulate_path(&self, n: usize, stream: &mut RandomStream) -> Vec<f64> {
        let mut scratch = PathScratch::default();
        self.simulate_into(n, stream, &mut scratch);
        scratch.path
    }

    /// Simulates `X_1..X_n` into `scratch.path`, reusing its buffers.
    ///
    /// Draws exactly `n + m - 1` innovations `e_2..e_{n+m}` in index order.
    pub fn simulate_into<'a>(
        &self,
        n: usize,
        stream: &mut RandomStream,
        scratch: &'a mut PathScratch,
    ) -> &'a mut [f64] {
        let m = self.order();
        let PathScratch { innovations, path } = scratch;
        innovations.resize(n + m - 1, 0.0);
        stream.fill_gaussian(innovations, self.innovation_variance.sqrt());
        path.clear();
        path.resize(n, 0.0);
        for (j, &a) in self.weights.iter().enumerate() {
            for (x, e) in path.iter_mut().zip(&innovations[j..j + n]) {
                *x += a * e;
            }
        }
        path
    }
}

/// Reusable buffers for repeated path simulation.
#[derive(Debug, Default, Clone)]
pub struct PathScratch {
    innovations: Vec<f64>,
    pub path: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayKind {
    /// `c(k) <= coefficient * exp(-rate * k)`
    Exponential,
    /// `c(k) <= coefficient * k^(-rate)`
    Polynomial,
}

/// Envelope dominating a covariance sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub kind: DecayKind,
    /// `a_0` (exponential) or `a_1` (polynomial).
    pub coefficient: f64,
    /// `a` (exponential) or `beta` (polynomial).
    pub rate: f64,
    /// Largest `c(k) - bound(k)` over the fitted lags.
    pub max_violation: f64,
    pub lags_used: usize,
    /// Lags whose covariance was zero and could not be log-transformed.
    pub skipped_lags: Vec<usize>,
}

impl DecayFit {
    pub fn bound(&self, lag: f64) -> f64 {
        match self.kind {
            DecayKind::Exponential => self.coefficient * (-self.rate * lag).exp(),
            DecayKind::Polynomial => self.coefficient * lag.powf(-self.rate),
        }
    }
}

/// Fits a `kind` envelope to the autocovariances at lags `1..m-1`.
pub fn fit_decay(model: &MovingAverageModel, kind: DecayKind) -> Result<DecayFit> {
    let points: Vec<(usize, f64)> = (1..model.order()).map(|k| (k, model.autocov(k))).collect();
    fit_envelope(&points, kind)
}

/// Least-squares slope on the log scale, then the smallest coefficient that
/// makes the envelope dominate every point.
///
/// Nonpositive values are skipped. With a single usable point the rate
/// defaults to 1.
pub fn fit_envelope(points: &[(usize, f64)], kind: DecayKind) -> Result<DecayFit> {
    let mut skipped_lags = Vec::new();
    let mut used = Vec::with_capacity(points.len());
    for &(lag, c) in points {
        if !c.is_finite() {
            return Err(Error::FitFailure(format!("non-finite covariance at lag {lag}")));
        }
        if kind == DecayKind::Polynomial && lag == 0 {
            return Err(Error::FitFailure("polynomial envelope needs lags >= 1".into()));
        }
        if c > 0.0 {
            used.push((lag, c));
        } else {
            skipped_lags.push(lag);
        }
    }
    let abscissa = |lag: usize| match kind {
        DecayKind::Exponential => lag as f64,
        DecayKind::Polynomial => (lag as f64).ln(),
    };
    if used.is_empty() {
        return Ok(DecayFit {
            kind,
            coefficient: 0.0,
            rate: 1.0,
            max_violation: 0.0,
            lags_used: 0,
            skipped_lags,
        });
    }
    let rate = if used.len() == 1 {
        1.0
    } else {
        let xs: Vec<f64> = used.iter().map(|&(l, _)| abscissa(l)).collect();
        let ys: Vec<f64> = used.iter().map(|&(_, c)| c.ln()).collect();
        -least_squares(&xs, &ys).0
    };
    // log-scale comparison keeps tiny covariances (1e-100 and below) meaningful
    let log_coef = used
        .iter()
        .map(|&(l, c)| c.ln() + rate * abscissa(l))
        .fold(f64::NEG_INFINITY, f64::max);
    let coefficient = log_coef.exp() * (1.0 + 1e-12);
    let mut fit = DecayFit {
        kind,
        coefficient,
        rate,
        max_violation: 0.0,
        lags_used: used.len(),
        skipped_lags,
    };
    fit.max_violation = used
        .iter()
        .map(|&(l, c)| c - fit.bound(l as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(fit)
}

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, r_squared)`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_id;

    fn case1() -> MovingAverageModel {
        build_model(CoefficientScheme::Exponential { rho: 0.1 }, 100).unwrap()
    }

    fn case2() -> MovingAverageModel {
        build_model(CoefficientScheme::Polynomial { s: 7.0 }, 100).unwrap()
    }

    #[test]
    fn single_term_normalization() {
        let m = build_model(CoefficientScheme::Exponential { rho: 0.1 }, 1).unwrap();
        assert_eq!(m.weights(), &[0.1]);
        assert!((m.innovation_variance() - 100.0).abs() < 1e-12);
        assert_eq!(m.autocov(0), 1.0);
        assert_eq!(m.autocov(1), 0.0);
    }

    #[test]
    fn geometric_normalization() {
        let m = case1();
        let want = 1.0 / (0.01 * (1.0 - 0.01f64.powi(100)) / 0.99);
        assert!((m.innovation_variance() / want - 1.0).abs() < 1e-13);
        let p = build_model(CoefficientScheme::Polynomial { s: 7.0 }, 2).unwrap();
        assert_eq!(p.weights(), &[1.0, 2f64.powi(-7)]);
        assert!((p.innovation_variance() - 1.0 / (1.0 + 2f64.powi(-14))).abs() < 1e-15);
    }

    #[test]
    fn exponential_autocov_matches_closed_form() {
        for &(rho, m) in &[(0.1, 100usize), (0.5, 20), (0.9, 37)] {
            let model = build_model(CoefficientScheme::Exponential { rho }, m).unwrap();
            for k in 0..m + 3 {
                let closed = if k >= m {
                    0.0
                } else {
                    rho.powi(k as i32) * (1.0 - rho.powi(2 * (m - k) as i32))
                        / (1.0 - rho.powi(2 * m as i32))
                };
                assert!((model.autocov(k) - closed).abs() < 1e-12, "rho={rho} k={k}");
            }
        }
        let lag1 = 0.1 * (1.0 - 0.01f64.powi(99)) / (1.0 - 0.01f64.powi(100));
        assert!((case1().autocov(1) - lag1).abs() < 1e-15);
    }

    #[test]
    fn autocov_nonnegative_nonincreasing() {
        for model in [case1(), case2()] {
            assert!((model.autocov(0) - 1.0).abs() < 1e-12);
            let weights_sq: f64 = model.weights().iter().map(|a| a * a).sum();
            assert!((model.innovation_variance() * weights_sq - 1.0).abs() < 1e-12);
            for k in 1..=model.order() {
                assert!(model.autocov(k) >= 0.0);
                assert!(model.autocov(k) <= model.autocov(k - 1));
            }
            assert_eq!(model.autocov(model.order()), 0.0);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_model(CoefficientScheme::Exponential { rho: 1.0 }, 5).is_err());
        assert!(build_model(CoefficientScheme::Exponential { rho: 0.0 }, 5).is_err());
        assert!(build_model(CoefficientScheme::Polynomial { s: -1.0 }, 5).is_err());
        assert!(build_model(CoefficientScheme::Polynomial { s: 2.0 }, 0).is_err());
    }

    #[test]
    fn path_uses_weights_in_order() {
        let model = build_model(CoefficientScheme::Exponential { rho: 0.5 }, 3).unwrap();
        let mut s1 = RandomStream::new(3, stream_id(0, 0));
        let path = model.simulate_path(5, &mut s1);
        let mut s2 = RandomStream::new(3, stream_id(0, 0));
        let sd = model.innovation_variance().sqrt();
        let eps: Vec<f64> = (0..7).map(|_| sd * s2.next_gaussian()).collect();
        for k in 0..5 {
            let want = 0.5 * eps[k] + 0.25 * eps[k + 1] + 0.125 * eps[k + 2];
            assert!((path[k] - want).abs() < 1e-15);
        }
        // the stream is left exactly n + m - 1 draws further on
        assert_eq!(s1.next_uniform(), s2.next_uniform());
    }

    #[test]
    fn order_one_path_is_the_innovations() {
        let model = build_model(CoefficientScheme::Polynomial { s: 7.0 }, 1).unwrap();
        let mut s1 = RandomStream::new(9, 4);
        let mut s2 = RandomStream::new(9, 4);
        let path = model.simulate_path(100, &mut s1);
        for x in path {
            assert_eq!(x, s2.next_gaussian());
        }
    }

    #[test]
    fn sample_moments_match_model() {
        let model = case1();
        let n = 1_000_000;
        let mut s = RandomStream::new(2024, 0);
        let x = model.simulate_path(n, &mut s);
        let mean = x.iter().sum::<f64>() / n as f64;
        let lag1 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>() / (n - 1) as f64;
        // long-run variance of X is sum of all autocovariances
        let lrv: f64 = 1.0 + 2.0 * (1..100).map(|k| model.autocov(k)).sum::<f64>();
        assert!(mean.abs() < 4.0 * (lrv / n as f64).sqrt(), "mean {mean}");
        assert!(mean.abs() < 4e-3);
        // var(X_k X_{k+1}) = 1 + rho^2 for Gaussian pairs; the products are
        // 2-dependent-ish, so allow the lag-2 inflation too
        let r1 = model.autocov(1);
        let se = ((1.0 + r1 * r1) * (1.0 + 2.0 * r1 * r1 + 0.1) / n as f64).sqrt();
        assert!((lag1 - r1).abs() < 4.0 * se, "lag1 {lag1} vs {r1}");
    }

    #[test]
    fn exponential_decay_fit() {
        let fit = fit_decay(&case1(), DecayKind::Exponential).unwrap();
        assert!((fit.rate - 10f64.ln()).abs() < 1e-3, "rate {}", fit.rate);
        assert!(fit.max_violation <= 0.0);
        assert!(fit.skipped_lags.is_empty());
        // direct search: no lag exceeds the envelope
        for k in 1..100 {
            assert!(case1().autocov(k) <= fit.bound(k as f64));
        }
    }

    #[test]
    fn polynomial_decay_fit() {
        let fit = fit_decay(&case2(), DecayKind::Polynomial).unwrap();
        assert!(fit.rate > 6.0, "beta {}", fit.rate);
        assert!(fit.max_violation <= 0.0);
    }

    #[test]
    fn order_one_decay_fit_is_trivial() {
        let m = build_model(CoefficientScheme::Exponential { rho: 0.3 }, 1).unwrap();
        let fit = fit_decay(&m, DecayKind::Exponential).unwrap();
        assert_eq!(fit.coefficient, 0.0);
        assert_eq!(fit.lags_used, 0);
        assert!(fit.max_violation <= 0.0);
    }

    #[test]
    fn zero_lags_are_skipped() {
        let pts = [(1, 0.5), (2, 0.0), (3, 0.125)];
        let fit = fit_envelope(&pts, DecayKind::Exponential).unwrap();
        assert_eq!(fit.skipped_lags, vec![2]);
        assert!((fit.rate - 2f64.ln() * 1.0).abs() < 1e-12);
    }

    #[test]
    fn model_serde_round_trip() {
        let json = serde_json::to_string(&case2()).unwrap();
        assert_eq!(json, r#"{"scheme":{"kind":"polynomial","s":7.0},"m":100}"#);
        let back: MovingAverageModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, case2());
        let bad = r#"{"scheme":{"kind":"exponential","rho":1.5},"m":3}"#;
        assert!(serde_json::from_str::<MovingAverageModel>(bad).is_err());
    }
}
