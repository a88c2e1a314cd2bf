//! Object catalogs with Zipf popularities.
//!
//! Objects are indexed `1..=N` in nonincreasing order of request probability.
//! The catalog precomputes everything the exact models re-read for every
//! object: the probabilities themselves, `ln(1 - p_i)` for the survival powers
//! `(1 - p_i)^L`, and the cumulative distribution used for sampling and for
//! the top-C hit rate.

use crate::error::{invalid, Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577215664901533;

/// Catalog of `N` objects with request probabilities `p_1 >= p_2 >= ... >= p_N`.
#[derive(Debug, Clone)]
pub struct ZipfCatalog {
    alpha: Option<f64>,
    omega: f64,
    probs: Vec<f64>,
    log_survival: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ZipfCatalog {
    /// Zipf(`alpha`) catalog with `p_i = 1 / (i^alpha * omega)`.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("catalog needs at least one object"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("zipf exponent must be >= 0, got {alpha}")));
        }
        let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-alpha)).collect();
        let omega = weights.iter().sum::<f64>();
        let probs = weights.into_iter().map(|w| w / omega).collect();
        Ok(Self::build(Some(alpha), omega, probs))
    }

    /// Catalog from arbitrary popularity weights, sorted into nonincreasing
    /// order and normalized. Only the exact models apply to such catalogs.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("catalog needs at least one object"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("popularity weights must be positive and finite"));
        }
        let mut sorted = weights.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let omega = sorted.iter().sum::<f64>();
        let probs = sorted.into_iter().map(|w| w / omega).collect();
        Ok(Self::build(None, omega, probs))
    }

    fn build(alpha: Option<f64>, omega: f64, probs: Vec<f64>) -> Self {
        let log_survival = probs.iter().map(|&p| (-p).ln_1p()).collect();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            alpha,
            omega,
            probs,
            log_survival,
            cumulative,
        }
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    /// Zipf exponent, `None` for catalogs built from explicit weights.
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// Normalization constant (`sum 1/i^alpha` for Zipf catalogs).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// `ln(1 - p_i)` for every object.
    pub fn log_survival(&self) -> &[f64] {
        &self.log_survival
    }

    /// Running sums `p_1 + ... + p_i`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Request probability of object `i` (1-based).
    pub fn probability(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(self.probs[i - 1])
    }

    /// Hit rate of a cache permanently holding the `floor(c)` most popular
    /// objects.
    pub fn head_sum(&self, c: f64) -> f64 {
        if !(c >= 1.0) {
            return 0.0;
        }
        let m = (c.floor() as usize).min(self.n());
        self.cumulative[m - 1].min(1.0)
    }

    /// `(sum (1-p_i)^l, sum p_i (1-p_i)^l)`.
    ///
    /// `l` counts requests; it may be fractional when it comes from an
    /// expected request volume.
    pub fn survival_sums(&self, l: f64) -> (f64, f64) {
        let mut plain = 0.0;
        let mut weighted = 0.0;
        for (&p, &ls) in self.probs.iter().zip(&self.log_survival) {
            let s = survival_power(ls, l);
            plain += s;
            weighted += p * s;
        }
        (plain, weighted)
    }
}

/// `(1-p)^l` from `ln(1-p)`; `l = 0` gives exactly one even when `p = 1`.
#[inline]
pub(crate) fn survival_power(log_survival: f64, l: f64) -> f64 {
    if l == 0.0 {
        1.0
    } else {
        (l * log_survival).exp()
    }
}

/// `1 - (1-p)^l` without cancellation for small `p * l`.
#[inline]
pub(crate) fn coverage(log_survival: f64, l: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else {
        -(l * log_survival).exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn single_object_has_probability_one() {
        for alpha in [0.0, 0.5, 1.0, 2.3] {
            let cat = ZipfCatalog::new(1, alpha).unwrap();
            assert_eq!(cat.probability(1).unwrap(), 1.0);
        }
    }

    #[test]
    fn two_objects_alpha_one() {
        let cat = ZipfCatalog::new(2, 1.0).unwrap();
        assert!(close(cat.omega(), 1.5, 1e-15));
        assert!(close(cat.probability(1).unwrap(), 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn four_objects_alpha_half() {
        let omega = 1.0 + 0.5f64.sqrt() + (1.0 / 3.0f64).sqrt() + 0.5;
        let expected = (1.0 / 2.0f64.sqrt()) / omega;
        let cat = ZipfCatalog::new(4, 0.5).unwrap();
        assert!(close(cat.probability(2).unwrap(), expected, 1e-14));
        assert!((expected - 0.2539).abs() < 1e-4);
    }

    #[test]
    fn index_out_of_range() {
        let cat = ZipfCatalog::new(3, 1.0).unwrap();
        assert_eq!(
            cat.probability(0),
            Err(Error::IndexOutOfRange { index: 0, n: 3 })
        );
        assert!(cat.probability(4).is_err());
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ZipfCatalog::new(0, 1.0).is_err());
        assert!(ZipfCatalog::new(10, -0.1).is_err());
        assert!(ZipfCatalog::new(10, f64::NAN).is_err());
        assert!(ZipfCatalog::from_weights(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn probabilities_normalized_and_sorted() {
        for (n, alpha) in [(1000, 1.0), (1000, 0.5), (77, 1.7), (5, 0.0)] {
            let cat = ZipfCatalog::new(n, alpha).unwrap();
            let total: f64 = cat.probabilities().iter().sum();
            assert!((total - 1.0).abs() <= 1e-10);
            assert!(cat.probabilities().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn normalization_asymptotics() {
        let n = 100_000;
        let one = ZipfCatalog::new(n, 1.0).unwrap();
        let approx = (n as f64).ln() + EULER_GAMMA;
        assert!((one.omega() - approx).abs() / one.omega() <= 1e-3);
        let half = ZipfCatalog::new(n, 0.5).unwrap();
        let approx = 2.0 * (n as f64).sqrt();
        assert!((half.omega() - approx).abs() / half.omega() <= 0.05);
    }

    #[test]
    fn weights_catalog_sorts() {
        let cat = ZipfCatalog::from_weights(&[1.0, 3.0, 2.0]).unwrap();
        assert_eq!(cat.alpha(), None);
        assert!(close(cat.probability(1).unwrap(), 0.5, 1e-15));
        assert!(close(cat.probability(3).unwrap(), 1.0 / 6.0, 1e-15));
    }

    #[test]
    fn head_sum_edges() {
        let cat = ZipfCatalog::new(50, 1.0).unwrap();
        assert_eq!(cat.head_sum(0.0), 0.0);
        assert_eq!(cat.head_sum(0.7), 0.0);
        assert!((cat.head_sum(50.0) - 1.0).abs() < 1e-12);
        assert!((cat.head_sum(1e9) - 1.0).abs() < 1e-12);
        // floor, no interpolation
        assert_eq!(cat.head_sum(3.99), cat.head_sum(3.0));
    }

    #[test]
    fn head_sum_tracks_log_ratio() {
        let n = 100_000usize;
        let cat = ZipfCatalog::new(n, 1.0).unwrap();
        let c = (n as f64).sqrt();
        let direct: f64 = (1..=c.floor() as usize)
            .map(|i| 1.0 / i as f64)
            .sum::<f64>()
            / (1..=n).map(|i| 1.0 / i as f64).sum::<f64>();
        assert!(close(cat.head_sum(c), direct, 1e-12));
        let reference = (c.ln() + EULER_GAMMA) / ((n as f64).ln() + EULER_GAMMA);
        assert!((cat.head_sum(c) - reference).abs() / reference <= 0.02);
    }

    #[test]
    fn survival_sums_examples() {
        let cat = ZipfCatalog::new(7, 1.0).unwrap();
        let (a, b) = cat.survival_sums(0.0);
        assert_eq!(a, 7.0);
        assert!((b - 1.0).abs() < 1e-15);

        let one = ZipfCatalog::new(1, 1.0).unwrap();
        for l in [1.0, 2.0, 1000.0] {
            assert_eq!(one.survival_sums(l), (0.0, 0.0));
        }

        let two = ZipfCatalog::new(2, 1.0).unwrap();
        let (a, b) = two.survival_sums(1.0);
        assert!(close(a, 1.0, 1e-15));
        assert!(close(b, 4.0 / 9.0, 1e-15));
    }

    #[test]
    fn survival_power_is_stable_for_tiny_probabilities() {
        let p: f64 = 1e-9;
        let ls = (-p).ln_1p();
        let l: f64 = 1e6;
        // (1-p)^l = exp(-l p - l p^2 / 2 - ...)
        let reference = (-l * p - l * p * p / 2.0).exp();
        assert!(close(survival_power(ls, l), reference, 1e-14));
        assert!(close(
            coverage(ls, l),
            -(-l * p - l * p * p / 2.0).exp_m1(),
            1e-12
        ));
    }
}
