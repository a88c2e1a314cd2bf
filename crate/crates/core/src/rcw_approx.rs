//! Closed-form approximations for Zipf catalogs with exponent 1 or 0.5.
//!
//! All formulas assume `W = L` and use the asymptotic normalization
//! (`ln N + gamma` for exponent 1, `2 sqrt(N)` for exponent 0.5) rather than
//! the exact sum. They are cheap enough to be evaluated at every optimizer
//! grid point but only track the exact model inside a validity window, which
//! is enforced: evaluations outside it return [`Error::OutOfValidity`].

use crate::error::{invalid, Error, Result};
use crate::popularity::{ZipfCatalog, EULER_GAMMA};
use crate::rcw_exact::SteadyMetrics;

/// Largest insertion threshold accepted; the alternating binomial sums lose
/// precision quickly beyond it.
pub const MAX_K: u32 = 20;

/// Zipf exponents with closed-form approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZipfCase {
    /// Exponent 1 (high skew).
    One,
    /// Exponent 0.5 (low skew).
    Half,
}

impl ZipfCase {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(ZipfCase::One)
        } else if alpha == 0.5 {
            Ok(ZipfCase::Half)
        } else {
            Err(Error::Unsupported(format!(
                "closed-form approximations exist only for zipf exponents 1 and 0.5, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        match self {
            ZipfCase::One => 1.0,
            ZipfCase::Half => 0.5,
        }
    }
}

/// Catalog shape seen by the approximations: exponent case and size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxRegime {
    pub case: ZipfCase,
    pub n: usize,
}

impl ApproxRegime {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("approximations need at least two objects"));
        }
        Ok(Self {
            case: ZipfCase::from_alpha(alpha)?,
            n,
        })
    }

    pub fn for_catalog(catalog: &ZipfCatalog) -> Result<Self> {
        match catalog.alpha() {
            Some(alpha) => Self::new(alpha, catalog.n()),
            None => Err(Error::Unsupported(
                "closed-form approximations need a zipf catalog".into(),
            )),
        }
    }

    /// `ln N + gamma`, the asymptotic normalization for exponent 1.
    pub fn log_norm(&self) -> f64 {
        (self.n as f64).ln() + EULER_GAMMA
    }

    /// Capacity exponent `beta` with `C = N^beta`.
    pub fn beta(&self, capacity: f64) -> f64 {
        capacity.ln() / (self.n as f64).ln()
    }

    /// Capacity fraction `f = C / N`.
    pub fn capacity_fraction(&self, capacity: f64) -> f64 {
        capacity / self.n as f64
    }

    /// Range of `L` over which the approximations for threshold `k` are
    /// accepted.
    pub fn validity_window(&self, k: u32) -> (f64, f64) {
        let n = self.n as f64;
        let kf = k as f64;
        match self.case {
            ZipfCase::One => {
                let ln = self.log_norm();
                let upper = if k == 1 { 0.2 } else { 0.4 / kf };
                (4.0 * kf * ln, upper * n * ln)
            }
            ZipfCase::Half => {
                let upper = match k {
                    1 => 1.3,
                    2 => 0.6,
                    3 => 0.35,
                    _ => 0.4,
                };
                (12.0 * kf * n.sqrt(), upper * n)
            }
        }
    }

    fn check_k(&self, k: u32) -> Result<()> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if k > MAX_K {
            return Err(Error::OutOfValidity {
                quantity: "k",
                value: k as f64,
                bound: "k <= MAX_K",
                limit: MAX_K as f64,
            });
        }
        Ok(())
    }

    fn check_lifetime(&self, k: u32, l: f64) -> Result<()> {
        let (lo, hi) = self.validity_window(k);
        if !(l >= lo) {
            return Err(Error::OutOfValidity {
                quantity: "L",
                value: l,
                bound: "L at or above the lower validity limit",
                limit: lo,
            });
        }
        if !(l <= hi) {
            return Err(Error::OutOfValidity {
                quantity: "L",
                value: l,
                bound: "L at or below the upper validity limit",
                limit: hi,
            });
        }
        Ok(())
    }
}

/// Approximate steady metrics for threshold `k` and lifetime `l` (`W = L`).
pub fn approx_steady(regime: &ApproxRegime, k: u32, l: f64) -> Result<SteadyMetrics> {
    regime.check_k(k)?;
    regime.check_lifetime(k, l)?;
    Ok(closed_form(regime, k, l))
}

/// The closed forms without the validity check. Callers must ensure the
/// arguments are at least inside the algebraic domain (`0 < L`, and
/// `L < N (ln N + gamma)` for exponent 1).
pub(crate) fn closed_form(regime: &ApproxRegime, k: u32, l: f64) -> SteadyMetrics {
    let n = regime.n as f64;
    let (a, h, i) = match regime.case {
        ZipfCase::One => {
            let ln = regime.log_norm();
            let x = l / ln;
            let t = l / (n * ln);
            match k {
                1 => {
                    let a = x * (n.ln() - x.ln() + 1.0 - EULER_GAMMA + t / 2.0);
                    let i = 1.0 - (x.ln() + 2.0 * EULER_GAMMA - t) / ln;
                    (a, 1.0 - i, i)
                }
                2 => {
                    let ln2 = 2f64.ln();
                    let a = (2.0 * ln2 - t) * x;
                    let h = (x.ln() + 2.0 * EULER_GAMMA - ln2) / ln;
                    let i = (ln2 - t) / ln;
                    (a, h, i)
                }
                _ => {
                    let a = occupancy_sum(k) * x;
                    let h = (x.ln() + 2.0 * EULER_GAMMA - hit_sum(k)) / ln;
                    let i = insertion_sum(k) / ln;
                    (a, h, i)
                }
            }
        }
        ZipfCase::Half => {
            let r = l / n;
            let ln2 = 2f64.ln();
            let ln3 = 3f64.ln();
            match k {
                1 => {
                    let a = l * (1.0 - (r / 4.0) * ((2.0 / r).ln() + r / 6.0 + 1.5 - EULER_GAMMA));
                    let i = 1.0 - (r / 2.0) * ((2.0 / r).ln() + r / 4.0 + 1.0 - EULER_GAMMA);
                    (a, 1.0 - i, i)
                }
                2 => {
                    let lg = (1.0 / (2.0 * r)).ln();
                    let a = (l * l / (2.0 * n)) * (lg + r / 2.0 + 1.5 - EULER_GAMMA);
                    let h = r * (ln2 - r / 4.0);
                    let i = (r / 2.0) * (lg + 0.75 * r + 1.0 - EULER_GAMMA);
                    (a, h, i)
                }
                3 => {
                    let a = (9.0 * ln3 - 12.0 * ln2 - r) * l * l / (4.0 * n);
                    let h = (r / 2.0) * occupancy_sum(3);
                    let i = (r / 2.0) * (3.0 * ln3 - 4.0 * ln2 - r / 2.0);
                    (a, h, i)
                }
                _ => {
                    let a = square_sum(k) * l * l / (4.0 * n);
                    let h = (r / 2.0) * occupancy_sum(k);
                    let i = (r / 2.0) * shifted_sum(k);
                    (a, h, i)
                }
            }
        }
    };
    SteadyMetrics {
        occupancy: a,
        hit_rate: h,
        insertion_rate: i,
    }
}

/// Closed-form `L` whose approximate occupancy equals `capacity`, rounded to
/// the nearest integer and at least 1.
pub fn invert_lifetime(regime: &ApproxRegime, k: u32, capacity: f64) -> Result<u64> {
    regime.check_k(k)?;
    let l = lifetime_real(regime, k, capacity)?;
    regime.check_lifetime(k, l)?;
    Ok(l.round().max(1.0) as u64)
}

fn lifetime_real(regime: &ApproxRegime, k: u32, c: f64) -> Result<f64> {
    let n = regime.n as f64;
    if !(c > 1.0 && c < n) {
        return Err(Error::OutOfValidity {
            quantity: "C",
            value: c,
            bound: "1 < C < N",
            limit: if c >= n { n } else { 1.0 },
        });
    }
    let l = match regime.case {
        ZipfCase::One => {
            let ln = regime.log_norm();
            match k {
                1 => {
                    let u = n.ln() - c.ln();
                    let g = EULER_GAMMA;
                    c * ln * (u + g - 1.0) / ((u + g) * (u - g + (u + g).ln()))
                }
                2 => {
                    let ln2 = 2f64.ln();
                    c * ln * (1.0 + c / (4.0 * ln2 * ln2 * n)) / (2.0 * ln2)
                }
                _ => c * ln / occupancy_sum(k),
            }
        }
        ZipfCase::Half => {
            let f = c / n;
            let s = f.sqrt();
            let g = EULER_GAMMA;
            match k {
                1 => {
                    let disc = (1.0 + f / 4.0).powi(2) - f * ((2.0 / f).ln() + 1.5 - g);
                    2.0 * f * n / (1.0 - f / 4.0 + disc.sqrt())
                }
                2 => {
                    let disc = (3.0 + s / 2.0).powi(2) - 8.0 * ((2.0 * s).ln() - s / 2.0 + 0.5 + g);
                    4.0 * s * n / (1.0 - s / 2.0 + disc.sqrt())
                }
                3 => {
                    let q = 1.0 + 2.0 * s;
                    let k3 = 9.0 * 3f64.ln() - 12.0 * 2f64.ln();
                    let disc = (s - 1.0).powi(2) - q * (q - k3);
                    2.0 * s * q * n / (3.0 * s + disc.sqrt())
                }
                _ => 2.0 * s * n / square_sum(k).sqrt(),
            }
        }
    };
    if l.is_finite() && l > 0.0 {
        Ok(l)
    } else {
        Err(Error::OutOfValidity {
            quantity: "C",
            value: c,
            bound: "capacity inside the domain of the lifetime inversion",
            limit: n,
        })
    }
}

/// Coarse one-line hit-rate estimates for a given capacity. Advisory only.
///
/// Exponent 1, `k = 1`: `beta - (1/3)(1-beta)/(2-beta)`.
/// Exponent 0.5, `k = 1`: `(f/2) ln(4.5/f)`; `k >= 2`: `0.7 sqrt(f)`.
pub fn simple_hit_rate(regime: &ApproxRegime, k: u32, capacity: f64) -> Result<f64> {
    regime.check_k(k)?;
    let n = regime.n as f64;
    if !(capacity > 0.0 && capacity <= n) {
        return Err(invalid(format!("capacity {capacity} outside (0, N]")));
    }
    match (regime.case, k) {
        (ZipfCase::One, 1) => {
            let beta = regime.beta(capacity);
            Ok(beta - (1.0 / 3.0) * (1.0 - beta) / (2.0 - beta))
        }
        (ZipfCase::Half, 1) => {
            let f = regime.capacity_fraction(capacity);
            Ok(f / 2.0 * (4.5 / f).ln())
        }
        (ZipfCase::Half, _) => Ok(0.7 * regime.capacity_fraction(capacity).sqrt()),
        (ZipfCase::One, _) => Err(Error::Unsupported(format!(
            "no simple hit-rate form for exponent 1 with k = {k}"
        ))),
    }
}

fn binomial(n: u32, r: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..r {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

fn sign(j: u32) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sums the terms pairwise in index order so positive and negative
/// neighbours cancel before accumulation.
fn alternating(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    v.chunks(2).map(|c| c.iter().sum::<f64>()).sum()
}

/// `sum_{j=2}^{k} (-1)^j C(k,j) j ln j`.
pub(crate) fn occupancy_sum(k: u32) -> f64 {
    alternating((2..=k).map(|j| sign(j) * binomial(k, j) * j as f64 * (j as f64).ln()))
}

/// `sum_{j=2}^{k} (-1)^j C(k,j) ln j`.
pub(crate) fn hit_sum(k: u32) -> f64 {
    alternating((2..=k).map(|j| sign(j) * binomial(k, j) * (j as f64).ln()))
}

/// `sum_{j=2}^{k} (-1)^j C(k-1,j-1) ln j`.
pub(crate) fn insertion_sum(k: u32) -> f64 {
    alternating((2..=k).map(|j| sign(j) * binomial(k - 1, j - 1) * (j as f64).ln()))
}

/// `sum_{j=2}^{k} (-1)^(j+1) C(k,j) j^2 ln j`.
pub(crate) fn square_sum(k: u32) -> f64 {
    alternating((2..=k).map(|j| -sign(j) * binomial(k, j) * (j * j) as f64 * (j as f64).ln()))
}

/// `sum_{j=1}^{k-1} (-1)^j C(k-1,j) (j+1) ln(j+1)`.
pub(crate) fn shifted_sum(k: u32) -> f64 {
    alternating(
        (1..k).map(|j| sign(j) * binomial(k - 1, j) * (j + 1) as f64 * ((j + 1) as f64).ln()),
    )
}
