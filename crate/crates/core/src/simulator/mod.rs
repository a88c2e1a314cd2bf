//! Request-level simulation of RCW and LRU caches under the independent
//! reference model.
//!
//! Request streams come from a seeded ChaCha8 generator, so a run is fully
//! determined by its catalog, policy and [`SimConfig`].

mod lru;
mod rcw;
mod sampler;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::popularity::ZipfCatalog;
use crate::rcw_exact::PolicyConfig;

pub use sampler::PopularitySampler;

use lru::LruEngine;
use rcw::RcwEngine;

/// Name of the pseudo-random generator recorded in every report.
pub const GENERATOR: &str = "ChaCha8";

pub(crate) const NEVER: u64 = u64::MAX;

/// Length and seed of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    /// Requests in a steady-state run, warmup included.
    pub total_requests: u64,
    /// Requests discarded before measuring.
    pub warmup_requests: u64,
    /// Budget for the transient protocol; required by [`simulate_transient`].
    pub transient: Option<TransientBudget>,
}

/// Stopping rule of the transient protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransientBudget {
    pub max_periods: u64,
    /// Requests available for measured periods, warmup excluded.
    pub max_requests: u64,
}

impl Default for TransientBudget {
    fn default() -> Self {
        Self {
            max_periods: 2_000,
            max_requests: 6_000_000,
        }
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            total_requests: 6_000_000,
            warmup_requests: 2_000_000,
            transient: None,
        }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.warmup_requests >= self.total_requests {
            return Err(invalid(format!(
                "warmup ({}) must be shorter than the run ({})",
                self.warmup_requests, self.total_requests
            )));
        }
        if let Some(b) = self.transient {
            if b.max_periods == 0 || b.max_requests == 0 {
                return Err(invalid("transient budget must allow at least one period"));
            }
        }
        Ok(())
    }
}

/// Cache simulated by [`simulate_transient`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimPolicy {
    Rcw(PolicyConfig),
    Lru { capacity: usize, k: u32 },
}

/// Measured rates of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub hit_rate: f64,
    pub insertion_rate: f64,
    /// Cached objects seen by the average measured request.
    pub mean_occupancy: f64,
    pub requests_counted: u64,
    /// Completed fill periods; zero for steady-state runs.
    pub periods_completed: u64,
    pub seed: u64,
    pub generator: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Hit,
    Insert,
    Miss,
}

pub(crate) trait Engine {
    /// Applies evictions due before request `t`.
    fn prepare(&mut self, t: u64);
    fn request(&mut self, obj: usize, t: u64) -> Outcome;
    fn occupancy(&self) -> usize;
    /// Drops every cached object while keeping admission counters.
    fn empty(&mut self);
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    requests: u64,
    hits: u64,
    inserts: u64,
    occupancy: u64,
}

impl Tally {
    fn add(&mut self, other: &Tally) {
        self.requests += other.requests;
        self.hits += other.hits;
        self.inserts += other.inserts;
        self.occupancy += other.occupancy;
    }

    fn report(&self, periods: u64, seed: u64) -> SimReport {
        let n = self.requests.max(1) as f64;
        SimReport {
            hit_rate: self.hits as f64 / n,
            insertion_rate: self.inserts as f64 / n,
            mean_occupancy: self.occupancy as f64 / n,
            requests_counted: self.requests,
            periods_completed: periods,
            seed,
            generator: GENERATOR,
        }
    }
}

struct Driver<'a, E> {
    engine: E,
    sampler: PopularitySampler<'a>,
    rng: ChaCha8Rng,
    t: u64,
}

impl<'a, E: Engine> Driver<'a, E> {
    fn new(engine: E, catalog: &'a ZipfCatalog, seed: u64) -> Self {
        Self {
            engine,
            sampler: PopularitySampler::new(catalog),
            rng: ChaCha8Rng::seed_from_u64(seed),
            t: 0,
        }
    }

    fn step(&mut self, tally: &mut Tally) {
        self.engine.prepare(self.t);
        let occ = self.engine.occupancy() as u64;
        let obj = self.sampler.sample(&mut self.rng);
        match self.engine.request(obj, self.t) {
            Outcome::Hit => tally.hits += 1,
            Outcome::Insert => tally.inserts += 1,
            Outcome::Miss => {}
        }
        tally.requests += 1;
        tally.occupancy += occ;
        self.t += 1;
    }

    fn skip(&mut self, requests: u64) {
        let mut scratch = Tally::default();
        for _ in 0..requests {
            self.step(&mut scratch);
        }
    }
}

fn check_catalog(catalog: &ZipfCatalog) -> Result<()> {
    if catalog.n() >= u32::MAX as usize {
        return Err(invalid("catalog too large for the simulator"));
    }
    Ok(())
}

fn steady<E: Engine>(engine: E, catalog: &ZipfCatalog, config: &SimConfig) -> SimReport {
    let mut driver = Driver::new(engine, catalog, config.seed);
    driver.skip(config.warmup_requests);
    let mut tally = Tally::default();
    for _ in config.warmup_requests..config.total_requests {
        driver.step(&mut tally);
    }
    tally.report(0, config.seed)
}

/// Steady-state run of an RCW cache.
pub fn simulate_rcw_steady(
    catalog: &ZipfCatalog,
    policy: &PolicyConfig,
    config: &SimConfig,
) -> Result<SimReport> {
    policy.validate()?;
    config.validate()?;
    check_catalog(catalog)?;
    let engine = RcwEngine::new(catalog.n(), policy.k, policy.lifetime, policy.window);
    Ok(steady(engine, catalog, config))
}

/// Steady-state run of an LRU cache holding `capacity` objects.
pub fn simulate_lru_steady(
    catalog: &ZipfCatalog,
    capacity: usize,
    k: u32,
    config: &SimConfig,
) -> Result<SimReport> {
    check_lru(capacity, k)?;
    config.validate()?;
    check_catalog(catalog)?;
    Ok(steady(
        LruEngine::new(catalog.n(), capacity, k),
        catalog,
        config,
    ))
}

fn check_lru(capacity: usize, k: u32) -> Result<()> {
    if capacity == 0 {
        return Err(invalid("LRU capacity must be at least 1"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(())
}

/// Repeated fill periods: after `warmup_requests` requests the cache is
/// emptied (admission counters are kept) and the requests that refill it are
/// measured, back to back. An RCW fill lasts `L` requests; an LRU fill lasts
/// until the cache is full. Only completed periods are reported.
pub fn simulate_transient(
    catalog: &ZipfCatalog,
    policy: &SimPolicy,
    config: &SimConfig,
) -> Result<SimReport> {
    let budget = config
        .transient
        .ok_or_else(|| invalid("transient run needs a transient budget"))?;
    config.validate()?;
    check_catalog(catalog)?;
    match *policy {
        SimPolicy::Rcw(p) => {
            p.validate()?;
            let engine = RcwEngine::new(catalog.n(), p.k, p.lifetime, p.window);
            let l = p.lifetime;
            transient(engine, catalog, config, budget, move |_, len| len >= l)
        }
        SimPolicy::Lru { capacity, k } => {
            check_lru(capacity, k)?;
            if capacity > catalog.n() {
                return Err(invalid(
                    "LRU capacity exceeds the catalog; the cache never fills",
                ));
            }
            let engine = LruEngine::new(catalog.n(), capacity, k);
            transient(engine, catalog, config, budget, |e: &LruEngine, _| {
                e.is_full()
            })
        }
    }
}

fn transient<E: Engine>(
    engine: E,
    catalog: &ZipfCatalog,
    config: &SimConfig,
    budget: TransientBudget,
    done: impl Fn(&E, u64) -> bool,
) -> Result<SimReport> {
    let mut driver = Driver::new(engine, catalog, config.seed);
    driver.skip(config.warmup_requests);
    let mut total = Tally::default();
    let mut used = 0u64;
    let mut periods = 0u64;
    'outer: while periods < budget.max_periods {
        driver.engine.empty();
        let mut period = Tally::default();
        loop {
            if used >= budget.max_requests {
                break 'outer;
            }
            driver.step(&mut period);
            used += 1;
            if done(&driver.engine, period.requests) {
                break;
            }
        }
        total.add(&period);
        periods += 1;
    }
    if periods == 0 {
        return Err(Error::UnderSampled { requests: used });
    }
    Ok(total.report(periods, config.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(seed: u64) -> SimConfig {
        SimConfig {
            seed,
            total_requests: 200_000,
            warmup_requests: 50_000,
            transient: Some(TransientBudget {
                max_periods: 2_000,
                max_requests: 200_000,
            }),
        }
    }

    #[test]
    fn config_validation() {
        let mut c = short(1);
        c.warmup_requests = c.total_requests;
        assert!(c.validate().is_err());
        let cat = ZipfCatalog::new(10, 1.0).unwrap();
        assert!(simulate_lru_steady(&cat, 0, 1, &short(1)).is_err());
        let mut c = short(1);
        c.transient = None;
        let p = SimPolicy::Rcw(PolicyConfig::new(1, 5, 5).unwrap());
        assert!(simulate_transient(&cat, &p, &c).is_err());
    }

    #[test]
    fn single_object_always_hits() {
        let cat = ZipfCatalog::new(1, 1.0).unwrap();
        let r = simulate_rcw_steady(&cat, &PolicyConfig::new(1, 3, 3).unwrap(), &short(4)).unwrap();
        assert_eq!(r.hit_rate, 1.0);
        assert_eq!(r.generator, GENERATOR);
    }

    #[test]
    fn k1_every_miss_inserts() {
        let cat = ZipfCatalog::new(500, 0.8).unwrap();
        let r =
            simulate_rcw_steady(&cat, &PolicyConfig::new(1, 300, 300).unwrap(), &short(9)).unwrap();
        assert_eq!(r.hit_rate + r.insertion_rate, 1.0);
        let r = simulate_lru_steady(&cat, 40, 1, &short(9)).unwrap();
        assert_eq!(r.hit_rate + r.insertion_rate, 1.0);
        assert!(r.mean_occupancy <= 40.0);
    }

    #[test]
    fn deterministic_under_seed() {
        let cat = ZipfCatalog::new(1_000, 1.0).unwrap();
        let p = PolicyConfig::new(2, 400, 400).unwrap();
        let a = simulate_rcw_steady(&cat, &p, &short(77)).unwrap();
        let b = simulate_rcw_steady(&cat, &p, &short(77)).unwrap();
        assert_eq!(a, b);
        let c = simulate_rcw_steady(&cat, &p, &short(78)).unwrap();
        assert_ne!(a.hit_rate, c.hit_rate);
    }

    #[test]
    fn full_lru_hits_nearly_always() {
        let cat = ZipfCatalog::new(200, 1.0).unwrap();
        let r = simulate_lru_steady(&cat, 200, 1, &short(5)).unwrap();
        assert!(r.hit_rate > 0.999);
    }

    #[test]
    fn single_request_fill_misses() {
        let cat = ZipfCatalog::new(100, 1.0).unwrap();
        let p = SimPolicy::Rcw(PolicyConfig::new(1, 1, 1).unwrap());
        let r = simulate_transient(&cat, &p, &short(2)).unwrap();
        assert_eq!(r.hit_rate, 0.0);
        assert_eq!(r.periods_completed, 2_000);
    }

    #[test]
    fn budget_too_small_is_undersampled() {
        let cat = ZipfCatalog::new(1_000, 1.0).unwrap();
        let mut c = short(2);
        c.transient = Some(TransientBudget {
            max_periods: 10,
            max_requests: 50,
        });
        let p = SimPolicy::Rcw(PolicyConfig::new(1, 100, 100).unwrap());
        assert_eq!(
            simulate_transient(&cat, &p, &c),
            Err(Error::UnderSampled { requests: 50 })
        );
    }
}
