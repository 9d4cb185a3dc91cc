//! Small statistical helpers shared across modules.

use crate::error::{Error, Result};

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (n-1) sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    debug_assert!(n >= 2);
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Population (divisor n) variance.
pub fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Linear-interpolation quantile on a sorted slice (R type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Quantile of an unsorted slice (sorts a copy).
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("quantile: NaN in input"));
    quantile_sorted(&v, p)
}

/// Sample skewness m3 / m2^(3/2) with population moments.
pub fn sample_skewness(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::Estimation("skewness requires at least 2 observations".into()));
    }
    let m = mean(xs);
    let (mut m2, mut m3) = (0.0, 0.0);
    for x in xs {
        let d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    let n = xs.len() as f64;
    m2 /= n;
    m3 /= n;
    if m2 <= 0.0 {
        return Err(Error::Score("skewness undefined for zero-variance series".into()));
    }
    Ok(m3 / m2.powf(1.5))
}

/// Running mean/variance accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct StreamingMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl StreamingMoments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population (divisor n) variance of the pushed values.
    pub fn population_variance(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.m2 / self.n as f64
        }
    }
}

/// Chi-squared goodness-of-fit p-value against equal cell probabilities.
pub fn chi2_uniform_gof_pvalue(counts: &[u64]) -> Result<f64> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let k = counts.len();
    if k < 2 {
        return Err(Error::Parameter("goodness-of-fit needs at least 2 cells".into()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::Parameter("goodness-of-fit needs observations".into()));
    }
    let expected = n as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((k - 1) as f64)
        .map_err(|e| Error::Numeric(format!("chi-squared dof: {e}")))?;
    Ok(1.0 - dist.cdf(stat))
}

/// 1-alpha quantile of the chi-squared distribution with `dof` degrees of freedom.
pub fn chi2_quantile(dof: usize, one_minus_alpha: f64) -> Result<f64> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Numeric(format!("chi-squared dof: {e}")))?;
    Ok(dist.inverse_cdf(one_minus_alpha))
}

/// Upper-tail chi-squared probability P(X > x).
pub fn chi2_sf(dof: usize, x: f64) -> Result<f64> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Numeric(format!("chi-squared dof: {e}")))?;
    Ok(1.0 - dist.cdf(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quantile_matches_hand_cases() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(quantile(&xs, 0.0), 1.0);
        assert_relative_eq!(quantile(&xs, 1.0), 4.0);
        assert_relative_eq!(quantile(&xs, 0.5), 2.5);
        // Type-7: h = 3 * 0.99 = 2.97 -> 3.0 + 0.97 * 1.0
        assert_relative_eq!(quantile(&xs, 0.99), 3.97);
        assert_relative_eq!(quantile(&[5.0], 0.3), 5.0);
    }

    #[test]
    fn skewness_zero_for_symmetric() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        assert_relative_eq!(sample_skewness(&xs).unwrap(), 0.0, epsilon = 1e-14);
        assert!(sample_skewness(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn streaming_moments_match_batch() {
        let xs = [0.3, -1.2, 4.5, 2.2, -0.7];
        let mut acc = StreamingMoments::default();
        for &x in &xs {
            acc.push(x);
        }
        assert_relative_eq!(acc.mean(), mean(&xs), epsilon = 1e-12);
        assert_relative_eq!(acc.population_variance(), population_variance(&xs), epsilon = 1e-12);
    }

    #[test]
    fn chi2_quantile_matches_reference() {
        // Well-known value: q_{0.95}(chi2_1) = 3.8415 (4 d.p.)
        assert_relative_eq!(chi2_quantile(1, 0.95).unwrap(), 3.841459, epsilon = 1e-4);
        // Uniform counts give p-value 1.
        assert_relative_eq!(chi2_uniform_gof_pvalue(&[10, 10, 10, 10]).unwrap(), 1.0);
    }
}
