use dyncache::rcw_exact::{lifetime_for_occupancy, steady_k, steady_k1};
use dyncache::simulator::{simulate_lru_steady, simulate_rcw_steady, simulate_transient};
use dyncache::transient::transient_metrics;
use dyncache::{Error, PolicyConfig, SimConfig, SimPolicy, TransientBudget, ZipfCatalog};

fn short_run(seed: u64) -> SimConfig {
    SimConfig {
        total_requests: 1_500_000,
        warmup_requests: 500_000,
        ..SimConfig::with_seed(seed)
    }
}

#[test]
fn rcw_k1_tracks_exact_model() {
    let cat = ZipfCatalog::new(100_000, 1.0).unwrap();
    let exact = steady_k1(&cat, 10_000);
    let sim = simulate_rcw_steady(
        &cat,
        &PolicyConfig::new(1, 10_000, 10_000).unwrap(),
        &short_run(1),
    )
    .unwrap();
    assert!((sim.hit_rate - exact.hit_rate).abs() <= 0.02);
    assert!(rel(sim.mean_occupancy, exact.occupancy) <= 0.02);
    assert!((sim.hit_rate + sim.insertion_rate - 1.0).abs() < 1e-12);
}

#[test]
fn rcw_k2_occupancy_within_two_percent() {
    let cat = ZipfCatalog::new(20_000, 0.5).unwrap();
    let policy = PolicyConfig::equal_windows(2, 30_000).unwrap();
    let exact = steady_k(&cat, &policy).unwrap();
    let sim = simulate_rcw_steady(&cat, &policy, &short_run(2)).unwrap();
    assert!(rel(sim.mean_occupancy, exact.occupancy) <= 0.02);
    assert!((sim.insertion_rate - exact.insertion_rate).abs() <= 0.01);
}

#[test]
fn lru_k2_matches_rcw_at_equal_occupancy() {
    let cat = ZipfCatalog::new(100_000, 1.0).unwrap();
    let l = lifetime_for_occupancy(&cat, 2, 5_000.0).unwrap().unwrap();
    let exact = steady_k(&cat, &PolicyConfig::equal_windows(2, l).unwrap()).unwrap();
    let sim = simulate_lru_steady(&cat, 5_000, 2, &short_run(3)).unwrap();
    assert!((sim.hit_rate - exact.hit_rate).abs() <= 0.02);
    assert!(sim.mean_occupancy <= 5_000.0);
}

#[test]
fn transient_k2_tracks_fill_model() {
    let cat = ZipfCatalog::new(100_000, 1.0).unwrap();
    let policy = PolicyConfig::equal_windows(2, 20_000).unwrap();
    let (h_analytic, _) = transient_metrics(&cat, &policy).unwrap();
    let cfg = SimConfig {
        warmup_requests: 500_000,
        transient: Some(TransientBudget {
            max_periods: 2000,
            max_requests: 3_000_000,
        }),
        ..SimConfig::with_seed(4)
    };
    let sim = simulate_transient(&cat, &SimPolicy::Rcw(policy), &cfg).unwrap();
    assert!(sim.periods_completed > 50);
    assert!((sim.hit_rate - h_analytic).abs() <= 0.01);
}

#[test]
fn transient_requires_budget() {
    let cat = ZipfCatalog::new(100, 1.0).unwrap();
    let policy = SimPolicy::Rcw(PolicyConfig::equal_windows(1, 10).unwrap());
    assert!(simulate_transient(&cat, &policy, &SimConfig::with_seed(0)).is_err());
    let cfg = SimConfig {
        transient: Some(TransientBudget {
            max_periods: 10,
            max_requests: 5,
        }),
        ..SimConfig::with_seed(0)
    };
    assert!(matches!(
        simulate_transient(&cat, &policy, &cfg),
        Err(Error::UnderSampled { .. })
    ));
}

#[test]
fn reports_record_seed() {
    let cat = ZipfCatalog::new(1000, 1.0).unwrap();
    let cfg = SimConfig {
        total_requests: 20_000,
        warmup_requests: 1_000,
        ..SimConfig::with_seed(99)
    };
    let a = simulate_lru_steady(&cat, 50, 1, &cfg).unwrap();
    let b = simulate_lru_steady(&cat, 50, 1, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seed, 99);
    assert_eq!(a.requests_counted, 19_000);
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
