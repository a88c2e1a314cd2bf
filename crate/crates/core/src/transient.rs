//! Cache-filling transient after instantiation.
//!
//! A freshly allocated RCW cache evicts nothing during its first `L`
//! requests, so every object inserted in that period is still present at its
//! end: the average insertion rate over the fill is exactly `A / L`. For
//! `k >= 2` the candidate counters are assumed to survive while the cache is
//! deallocated, so the fill differs from steady state only by those extra
//! insertions, which turn steady-state hits into misses.

use crate::error::{invalid, Error, Result};
use crate::popularity::ZipfCatalog;
use crate::rcw_approx::{closed_form, ApproxRegime, ZipfCase};
use crate::rcw_exact::{steady_k, PolicyConfig, SteadyMetrics};

/// Averages over the fill period and over a whole instantiation interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientMetrics {
    /// Average hit rate over the first `L` requests.
    pub h_transient: f64,
    /// Average insertion rate over the first `L` requests.
    pub i_transient: f64,
    /// Average hit rate over the whole interval.
    pub h_interval: f64,
    /// Average insertion rate over the whole interval.
    pub i_interval: f64,
    /// Expected number of requests in the interval.
    pub r_total: f64,
}

/// Fill-period `(hit rate, insertion rate)` from steady metrics and the
/// lifetime: `(H + I - A/L, A/L)`.
pub fn fill_rates(steady: &SteadyMetrics, l: f64) -> (f64, f64) {
    let i_tr = steady.occupancy / l;
    (steady.hit_rate + steady.insertion_rate - i_tr, i_tr)
}

/// Exact fill-period `(hit rate, insertion rate)` for an RCW policy.
pub fn transient_metrics(catalog: &ZipfCatalog, policy: &PolicyConfig) -> Result<(f64, f64)> {
    let steady = steady_k(catalog, policy)?;
    Ok(fill_rates(&steady, policy.lifetime as f64))
}

impl TransientMetrics {
    /// Combines fill-period and steady-state rates over `r_total` requests.
    pub fn from_steady(steady: &SteadyMetrics, l: f64, r_total: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(invalid("lifetime L must be positive"));
        }
        if !(r_total >= l) {
            return Err(Error::IntervalTooShort {
                volume: r_total,
                lifetime: l,
            });
        }
        let (h_tr, i_tr) = fill_rates(steady, l);
        let rest = r_total - l;
        Ok(Self {
            h_transient: h_tr,
            i_transient: i_tr,
            h_interval: (l * h_tr + rest * steady.hit_rate) / r_total,
            i_interval: (l * i_tr + rest * steady.insertion_rate) / r_total,
            r_total,
        })
    }
}

/// Exact interval averages for an RCW policy over `r_total` requests.
pub fn interval_averages(
    catalog: &ZipfCatalog,
    policy: &PolicyConfig,
    r_total: f64,
) -> Result<TransientMetrics> {
    let steady = steady_k(catalog, policy)?;
    TransientMetrics::from_steady(&steady, policy.lifetime as f64, r_total)
}

/// Exact ratio of fill-period hit rate to steady hit rate (`W = L`).
pub fn transient_ratio_exact(catalog: &ZipfCatalog, k: u32, l: u64) -> Result<f64> {
    let steady = steady_k(catalog, &PolicyConfig::equal_windows(k, l)?)?;
    Ok(fill_rates(&steady, l as f64).0 / steady.hit_rate)
}

/// Approximate ratio of fill-period hit rate to steady hit rate, from the
/// closed forms.
///
/// Accepted lifetimes follow the algebraic domain of the closed forms, which
/// is wider than their accuracy window: `L < 2N` (exponent 0.5, `k = 1`),
/// `L < N` (exponent 0.5, `k >= 2`), `ln N + gamma < L <= N (ln N + gamma) / 2`
/// (exponent 1).
pub fn transient_ratio_approx(regime: &ApproxRegime, k: u32, l: f64) -> Result<f64> {
    if k == 0 || k > crate::rcw_approx::MAX_K {
        return Err(invalid(format!(
            "k = {k} outside 1..={}",
            crate::rcw_approx::MAX_K
        )));
    }
    let n = regime.n as f64;
    let (lo, hi, strict_hi) = match regime.case {
        ZipfCase::One => (regime.log_norm(), 0.5 * n * regime.log_norm(), false),
        ZipfCase::Half if k == 1 => (0.0, 2.0 * n, true),
        ZipfCase::Half => (0.0, n, true),
    };
    if !(l > lo) {
        return Err(Error::OutOfValidity {
            quantity: "L",
            value: l,
            bound: "L above the lower domain limit",
            limit: lo,
        });
    }
    if !(l < hi || (!strict_hi && l == hi)) {
        return Err(Error::OutOfValidity {
            quantity: "L",
            value: l,
            bound: "L below the upper domain limit",
            limit: hi,
        });
    }
    let steady = closed_form(regime, k, l);
    Ok(fill_rates(&steady, l).0 / steady.hit_rate)
}
