//! Empirical distribution function and the generalized-inverse sample quantile.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Nonempty sample of finite values, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    sorted: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("sample must be nonempty".into()));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain("sample values must be finite", v));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `F_n(x)`: fraction of values `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `inf { x : F_n(x) >= p }`, the `ceil(n p)`-th order statistic.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let r = quantile_rank(self.len(), p)?;
        Ok(self.sorted[r - 1])
    }
}

pub fn ecdf(sample: &Sample, x: f64) -> f64 {
    sample.ecdf(x)
}

pub fn sample_quantile(sample: &Sample, p: f64) -> Result<f64> {
    sample.quantile(p)
}

/// One-based rank `ceil(n p)` of the order statistic returned as the sample
/// `p`-quantile. Products within 1e-9 of an integer snap to it, so `0.2 * 100`
/// gives rank 20 and not 21.
pub fn quantile_rank(n: usize, p: f64) -> Result<usize> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("quantile level must lie in (0, 1)", p));
    }
    if n == 0 {
        return Err(Error::InsufficientData("sample must be nonempty".into()));
    }
    let np = n as f64 * p;
    let nearest = np.round();
    let rank = if (np - nearest).abs() <= 1e-9 { nearest } else { np.ceil() };
    Ok((rank as usize).clamp(1, n))
}

/// Sample quantile of `values` by selection, reordering the slice.
///
/// Expected linear time; for a single level this beats sorting.
pub fn select_quantile(values: &mut [f64], p: f64) -> Result<f64> {
    let r = quantile_rank(values.len(), p)?;
    let (_, v, _) = values.select_nth_unstable_by(r - 1, |a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(*v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ecdf_counts() {
        assert!((s(&[1.0, 2.0, 3.0]).ecdf(2.0) - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(s(&[1.0, 2.0, 3.0]).ecdf(0.5), 0.0);
        assert_eq!(s(&[1.0, 1.0, 1.0]).ecdf(1.0), 1.0);
        assert_eq!(s(&[1.0, 2.0, 3.0]).ecdf(3.0), 1.0);
    }

    #[test]
    fn quantile_order_statistics() {
        let x = s(&[5.0, 1.0, 3.0, 2.0, 4.0]);
        assert_eq!(x.quantile(0.5).unwrap(), 3.0);
        assert_eq!(x.quantile(0.2).unwrap(), 1.0);
        assert_eq!(x.quantile(0.21).unwrap(), 2.0);
        assert_eq!(x.quantile(0.999).unwrap(), 5.0);
        assert_eq!(x.quantile(1e-9).unwrap(), 1.0);
    }

    #[test]
    fn rank_snaps_near_integers() {
        assert_eq!(quantile_rank(100, 0.2).unwrap(), 20);
        assert_eq!(quantile_rank(100, 0.7).unwrap(), 70);
        assert_eq!(quantile_rank(1000, 0.7).unwrap(), 700);
        assert_eq!(quantile_rank(500, 0.2).unwrap(), 100);
        assert_eq!(quantile_rank(3, 0.5).unwrap(), 2);
        assert_eq!(quantile_rank(10, 0.2000001).unwrap(), 3);
    }

    #[test]
    fn domain_errors() {
        let x = s(&[1.0]);
        for p in [0.0, 1.0, -1.0, f64::NAN] {
            assert!(x.quantile(p).is_err());
        }
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn selection_agrees_with_sorting() {
        let mut v = vec![0.3, -1.0, 2.5, 0.3, 7.0, -4.0, 1.1];
        let sorted = s(&v);
        for i in 1..100 {
            let p = i as f64 / 100.0;
            assert_eq!(select_quantile(&mut v, p).unwrap(), sorted.quantile(p).unwrap());
        }
    }
}
