//! Exact steady-state metrics of request-count-window (RCW) caches.
//!
//! An RCW cache evicts every object that has not been requested within the
//! most recent `L` requests. Under *cache on k-th request* an object is only
//! inserted on its k-th consecutive request, each arriving within `W`
//! requests of the previous one. Requests follow the independent reference
//! model, so every object alternates between an in-cache period and an
//! out-of-cache period whose means have closed forms; the metrics below are
//! plain `O(N)` sums over those per-object cycles.

use crate::error::{invalid, Error, Result};
use crate::popularity::{coverage, survival_power, ZipfCatalog, EULER_GAMMA};

/// Insertion policy of an RCW cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyConfig {
    /// Insertion threshold: an object is cached on its k-th qualifying request.
    pub k: u32,
    /// Lifetime window `L` in requests.
    pub lifetime: u64,
    /// Candidate window `W` in requests; ignored when `k == 1`.
    pub window: u64,
}

impl PolicyConfig {
    pub fn new(k: u32, lifetime: u64, window: u64) -> Result<Self> {
        let policy = Self {
            k,
            lifetime,
            window,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Policy with the candidate window equal to the lifetime.
    pub fn equal_windows(k: u32, lifetime: u64) -> Result<Self> {
        Self::new(k, lifetime, lifetime)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if self.lifetime == 0 {
            return Err(invalid("lifetime L must be at least 1"));
        }
        if self.k >= 2 && self.window == 0 {
            return Err(invalid("candidate window W must be at least 1 when k >= 2"));
        }
        Ok(())
    }
}

/// Steady-state occupancy, hit rate and insertion rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyMetrics {
    /// Average number of cached objects seen by a random request.
    pub occupancy: f64,
    pub hit_rate: f64,
    pub insertion_rate: f64,
}

impl SteadyMetrics {
    /// Insertions per hit-or-insertion operation, `I / (H + I)`.
    pub fn insertion_fraction(&self) -> f64 {
        let total = self.hit_rate + self.insertion_rate;
        if total > 0.0 {
            self.insertion_rate / total
        } else {
            0.0
        }
    }
}

/// Exact metrics for `k = 1` with lifetime `l` (`l = 0` is an empty cache).
pub fn steady_k1(catalog: &ZipfCatalog, l: u64) -> SteadyMetrics {
    if l == 0 {
        return SteadyMetrics {
            occupancy: 0.0,
            hit_rate: 0.0,
            insertion_rate: 1.0,
        };
    }
    let l = l as f64;
    let (mut occupancy, mut hit_rate, mut insertion_rate) = (0.0, 0.0, 0.0);
    for (&p, &ls) in catalog.probabilities().iter().zip(catalog.log_survival()) {
        let covered = coverage(ls, l);
        occupancy += covered;
        hit_rate += p * covered;
        insertion_rate += p * survival_power(ls, l);
    }
    SteadyMetrics {
        occupancy,
        hit_rate,
        insertion_rate,
    }
}

/// Exact metrics for any `k`; `k = 1` dispatches to [`steady_k1`].
pub fn steady_k(catalog: &ZipfCatalog, policy: &PolicyConfig) -> Result<SteadyMetrics> {
    policy.validate()?;
    if policy.k == 1 {
        return Ok(steady_k1(catalog, policy.lifetime));
    }
    Ok(general_sums(
        catalog,
        policy.k,
        policy.lifetime as f64,
        policy.window as f64,
    ))
}

/// Exact metrics from the per-object cycle sums for every `k`, without the
/// `k = 1` shortcut taken by [`steady_k`].
pub fn steady_general(catalog: &ZipfCatalog, policy: &PolicyConfig) -> Result<SteadyMetrics> {
    policy.validate()?;
    let w = if policy.k == 1 {
        policy.lifetime
    } else {
        policy.window
    };
    Ok(general_sums(
        catalog,
        policy.k,
        policy.lifetime as f64,
        w as f64,
    ))
}

/// Closed forms for `W = L`:
/// `A = sum u^k`, `H = sum p u^k`, `I = sum p (1-u) u^(k-1)` with
/// `u = 1 - (1-p)^L`.
pub fn steady_k_equal_windows(catalog: &ZipfCatalog, k: u32, l: u64) -> Result<SteadyMetrics> {
    PolicyConfig::equal_windows(k, l)?;
    let l = l as f64;
    let mut a = 0.0;
    let mut h = 0.0;
    let mut ins = 0.0;
    for (&p, &ls) in catalog.probabilities().iter().zip(catalog.log_survival()) {
        let u = coverage(ls, l);
        let head = u.powi(k as i32 - 1);
        a += head * u;
        h += p * head * u;
        ins += p * (1.0 - u) * head;
    }
    Ok(SteadyMetrics {
        occupancy: a,
        hit_rate: h,
        insertion_rate: ins,
    })
}

/// Per-object cycle sums for arbitrary `k`, `L` and `W`.
///
/// With `s = (1-p)^L` and `u = 1 - (1-p)^W` the mean in-cache period is
/// `(1-s)/(p s)` and the mean out-of-cache period is `R/p`, where
/// `R = sum_{m=0}^{k-1} u^(-m)`. The cached fraction of time is therefore
/// `(1-s) / ((1-s) + s R)` and an object is inserted once per cycle.
pub(crate) fn general_sums(catalog: &ZipfCatalog, k: u32, l: f64, w: f64) -> SteadyMetrics {
    let mut a = 0.0;
    let mut h = 0.0;
    let mut ins = 0.0;
    for (&p, &ls) in catalog.probabilities().iter().zip(catalog.log_survival()) {
        let (occ, rate) = object_cycle(p, ls, k, l, w);
        a += occ;
        h += p * occ;
        ins += rate;
    }
    SteadyMetrics {
        occupancy: a,
        hit_rate: h,
        insertion_rate: ins,
    }
}

/// Cached fraction and insertions per request for one object.
#[inline]
fn object_cycle(p: f64, log_survival: f64, k: u32, l: f64, w: f64) -> (f64, f64) {
    let s = survival_power(log_survival, l);
    if s == 0.0 {
        // Never leaves the cache once inserted.
        return (1.0, 0.0);
    }
    let u = coverage(log_survival, w);
    if k >= 2 && u == 0.0 {
        // Never accumulates k requests inside the candidate window.
        return (0.0, 0.0);
    }
    let inv = 1.0 / u;
    let mut r = 1.0;
    for _ in 1..k {
        r = r * inv + 1.0;
    }
    let stay = 1.0 - s;
    let cycle = stay + s * r;
    if !cycle.is_finite() {
        return (0.0, 0.0);
    }
    (stay / cycle, p * s / cycle)
}

/// Mean number of requests an object stays cached, `(1 - (1-p)^L) / (p (1-p)^L)`.
pub fn expected_theta(p: f64, l: u64) -> Result<f64> {
    check_probability(p)?;
    if l == 0 {
        return Err(invalid("lifetime L must be at least 1"));
    }
    let ls = (-p).ln_1p();
    let s = survival_power(ls, l as f64);
    Ok(coverage(ls, l as f64) / (p * s))
}

/// Mean number of requests from eviction until the k-th qualifying request
/// re-inserts the object.
pub fn expected_delta(p: f64, k: u32, w: u64) -> Result<f64> {
    check_probability(p)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if k == 1 {
        return Ok(1.0 / p);
    }
    if w == 0 {
        return Err(invalid("candidate window W must be at least 1 when k >= 2"));
    }
    let ls = (-p).ln_1p();
    let q = survival_power(ls, w as f64);
    let u = coverage(ls, w as f64);
    // (1 - (1-q)^k) / (q (1-q)^(k-1)) with 1 - q = u
    let numer = -(k as f64 * (-q).ln_1p()).exp_m1();
    Ok(numer / (p * q * u.powi(k as i32 - 1)))
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// Upper end of the lifetime search range, `10 N (ln N + gamma)`.
pub fn lifetime_search_limit(catalog: &ZipfCatalog) -> u64 {
    let n = catalog.n() as f64;
    (10.0 * n * (n.ln() + EULER_GAMMA)).ceil().max(2.0) as u64
}

/// Smallest lifetime `L` (with `W = L`) whose exact occupancy reaches
/// `target`. `None` if the search range cannot reach it.
pub fn lifetime_for_occupancy(catalog: &ZipfCatalog, k: u32, target: f64) -> Result<Option<u64>> {
    smallest_lifetime(catalog, k, |m| m.occupancy >= target)
}

/// Smallest lifetime `L` (with `W = L`) whose exact hit rate reaches `target`.
pub fn lifetime_for_hit_rate(catalog: &ZipfCatalog, k: u32, target: f64) -> Result<Option<u64>> {
    smallest_lifetime(catalog, k, |m| m.hit_rate >= target)
}

fn smallest_lifetime(
    catalog: &ZipfCatalog,
    k: u32,
    reached: impl Fn(&SteadyMetrics) -> bool,
) -> Result<Option<u64>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let eval = |l: u64| steady_k_equal(catalog, k, l);
    let mut lo = 1u64;
    let mut hi = lifetime_search_limit(catalog);
    if reached(&eval(lo)) {
        return Ok(Some(lo));
    }
    if !reached(&eval(hi)) {
        return Ok(None);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reached(&eval(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Exact metrics with `W = L` using the cheapest exact form.
pub(crate) fn steady_k_equal(catalog: &ZipfCatalog, k: u32, l: u64) -> SteadyMetrics {
    if k == 1 {
        steady_k1(catalog, l)
    } else {
        general_sums(catalog, k, l as f64, l as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn policy_validation() {
        assert!(PolicyConfig::new(0, 5, 5).is_err());
        assert!(PolicyConfig::new(1, 0, 5).is_err());
        assert!(PolicyConfig::new(2, 5, 0).is_err());
        assert!(PolicyConfig::new(1, 5, 0).is_ok());
    }

    #[test]
    fn k1_examples() {
        let cat = ZipfCatalog::new(10, 1.0).unwrap();
        let m = steady_k1(&cat, 0);
        assert_eq!((m.occupancy, m.hit_rate), (0.0, 0.0));
        assert!((m.insertion_rate - 1.0).abs() < 1e-15);

        let one = ZipfCatalog::new(1, 1.0).unwrap();
        let m = steady_k1(&one, 1);
        assert_eq!((m.occupancy, m.hit_rate, m.insertion_rate), (1.0, 1.0, 0.0));

        let two = ZipfCatalog::new(2, 1.0).unwrap();
        let m = steady_k1(&two, 1);
        assert!(rel(m.occupancy, 1.0) < 1e-15);
        assert!(rel(m.hit_rate, 5.0 / 9.0) < 1e-15);
        assert!(rel(m.insertion_rate, 4.0 / 9.0) < 1e-15);
    }

    #[test]
    fn theta_examples() {
        assert!(rel(expected_theta(0.5, 1).unwrap(), 2.0) < 1e-14);
        assert!(rel(expected_theta(0.5, 2).unwrap(), 6.0) < 1e-14);
        assert!(rel(expected_theta(0.1, 2).unwrap(), 0.19 / (0.1 * 0.81)) < 1e-14);
        assert!(matches!(
            expected_theta(0.0, 2),
            Err(Error::ProbabilityOutOfRange(_))
        ));
        assert!(expected_theta(1.0, 2).is_err());
    }

    #[test]
    fn delta_examples() {
        assert!(rel(expected_delta(0.25, 1, 7).unwrap(), 4.0) < 1e-15);
        assert!(rel(expected_delta(0.5, 2, 1).unwrap(), 6.0) < 1e-14);
        assert!(expected_delta(1.5, 2, 1).is_err());
    }

    fn delta_by_recurrence(p: f64, k: u32, w: u64) -> f64 {
        let u = 1.0 - (1.0 - p).powf(w as f64);
        let mut e = 1.0 / p;
        for _ in 2..=k {
            e = e / u + 1.0 / p;
        }
        e
    }

    #[test]
    fn delta_matches_recurrence() {
        for &p in &[0.5, 0.1, 0.01, 1e-4] {
            for &w in &[1u64, 3, 50, 1000] {
                for k in 1..=10 {
                    let closed = expected_delta(p, k, w).unwrap();
                    let rec = delta_by_recurrence(p, k, w);
                    assert!(rel(closed, rec) < 1e-10, "p={p} w={w} k={k}");
                }
            }
        }
    }

    #[test]
    fn k2_two_objects() {
        let two = ZipfCatalog::new(2, 1.0).unwrap();
        let p = PolicyConfig::equal_windows(2, 1).unwrap();
        let m = steady_k(&two, &p).unwrap();
        assert!(rel(m.occupancy, 5.0 / 9.0) < 1e-12);
        assert!(rel(m.hit_rate, 1.0 / 3.0) < 1e-12);
        assert!(rel(m.insertion_rate, 2.0 / 9.0) < 1e-12);
    }

    #[test]
    fn general_k1_reduces_to_k1() {
        let cat = ZipfCatalog::new(20_000, 1.0).unwrap();
        for &l in &[1u64, 17, 500, 20_000, 300_000] {
            for &w in &[1.0, 99.0, 1e5] {
                let g = general_sums(&cat, 1, l as f64, w);
                let e = steady_k1(&cat, l);
                assert!(rel(g.occupancy, e.occupancy) < 1e-10);
                assert!(rel(g.hit_rate, e.hit_rate) < 1e-10);
                assert!(rel(g.insertion_rate, e.insertion_rate) < 1e-10);
            }
        }
    }

    #[test]
    fn equal_windows_match_reduced_sums() {
        for alpha in [1.0, 0.5] {
            let cat = ZipfCatalog::new(20_000, alpha).unwrap();
            for k in 1..=6 {
                for &l in &[1u64, 40, 2_000, 50_000] {
                    let g = general_sums(&cat, k, l as f64, l as f64);
                    let r = steady_k_equal_windows(&cat, k, l).unwrap();
                    assert!(rel(g.occupancy, r.occupancy) < 1e-10, "A k={k} l={l}");
                    assert!(rel(g.hit_rate, r.hit_rate) < 1e-10, "H k={k} l={l}");
                    assert!(
                        rel(g.insertion_rate, r.insertion_rate) < 1e-10,
                        "I k={k} l={l}"
                    );
                }
            }
        }
    }

    #[test]
    fn single_object_is_always_cached() {
        let one = ZipfCatalog::new(1, 0.5).unwrap();
        for k in 1..=4 {
            let m = steady_k(&one, &PolicyConfig::new(k, 3, 2).unwrap()).unwrap();
            assert_eq!((m.occupancy, m.hit_rate, m.insertion_rate), (1.0, 1.0, 0.0));
        }
    }

    #[test]
    fn tiny_probabilities_never_qualify() {
        let cat = ZipfCatalog::from_weights(&[1.0, 1e-300]).unwrap();
        let m = steady_k(&cat, &PolicyConfig::new(3, 10, 10).unwrap()).unwrap();
        assert!(m.occupancy.is_finite() && m.hit_rate.is_finite());
        assert!(m.occupancy <= 1.0 + 1e-12);
    }

    #[test]
    fn occupancy_inversion_is_tight() {
        let cat = ZipfCatalog::new(10_000, 1.0).unwrap();
        for k in [1, 2, 4] {
            let target = 800.0;
            let l = lifetime_for_occupancy(&cat, k, target).unwrap().unwrap();
            assert!(steady_k_equal(&cat, k, l).occupancy >= target);
            assert!(steady_k_equal(&cat, k, l - 1).occupancy < target);
        }
        assert_eq!(lifetime_for_occupancy(&cat, 1, 20_000.0).unwrap(), None);
        assert_eq!(lifetime_for_hit_rate(&cat, 2, 0.0).unwrap(), Some(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn metrics_bounds_and_monotonicity(
            n in 1usize..400,
            alpha in prop_oneof![Just(0.5), Just(1.0), 0.0f64..2.0],
            l in 1u64..5_000,
            w in 1u64..5_000,
        ) {
            let cat = ZipfCatalog::new(n, alpha).unwrap();
            let base = steady_k1(&cat, l);
            prop_assert!((base.hit_rate + base.insertion_rate - 1.0).abs() < 1e-12);
            let mut prev = base;
            for k in 1..=5u32 {
                let m = steady_k(&cat, &PolicyConfig::new(k, l, w).unwrap()).unwrap();
                prop_assert!(m.occupancy >= -1e-12);
                prop_assert!(m.occupancy <= (n as f64).min(l as f64) + 1e-9);
                prop_assert!(m.hit_rate + m.insertion_rate <= 1.0 + 1e-12);
                prop_assert!(m.occupancy <= base.occupancy * (1.0 + 1e-12) + 1e-12);
                let top = cat.head_sum(m.occupancy.ceil()) + cat.probabilities()[0];
                prop_assert!(m.hit_rate <= top + 1e-12);
                if w == l {
                    prop_assert!(m.occupancy <= prev.occupancy * (1.0 + 1e-12) + 1e-12);
                    prop_assert!(m.hit_rate <= prev.hit_rate * (1.0 + 1e-12) + 1e-12);
                    prop_assert!(m.insertion_rate <= prev.insertion_rate * (1.0 + 1e-12) + 1e-12);
                }
                prev = m;
            }
        }

        #[test]
        fn equal_window_metrics_grow_with_lifetime(
            n in 2usize..300,
            k in 1u32..5,
            l in 1u64..3_000,
        ) {
            let cat = ZipfCatalog::new(n, 1.0).unwrap();
            let a = steady_k_equal(&cat, k, l);
            let b = steady_k_equal(&cat, k, l + 1 + l / 3);
            prop_assert!(b.occupancy >= a.occupancy * (1.0 - 1e-12));
            prop_assert!(b.hit_rate >= a.hit_rate * (1.0 - 1e-12));
        }
    }
}
