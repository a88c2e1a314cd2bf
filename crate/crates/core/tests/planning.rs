use proptest::prelude::*;

use dyncache::optimizer::{always_on_baseline, lower_bound_cost, optimize, optimize_with_curve};
use dyncache::transient::interval_averages;
use dyncache::{
    Infeasibility, Mode, OptimizationProblem, PolicyConfig, PolicyCurve, RateProfile, SearchGrid,
    ZipfCatalog,
};

fn setup() -> (ZipfCatalog, RateProfile) {
    (
        ZipfCatalog::new(5_000, 1.0).unwrap(),
        RateProfile::triangular(1440.0, 20.0).unwrap(),
    )
}

fn problem<'a>(
    cat: &'a ZipfCatalog,
    profile: &'a RateProfile,
    k: u32,
    b: f64,
    h: f64,
) -> OptimizationProblem<'a> {
    let mut p = OptimizationProblem::new(cat, profile, k, b, h, Mode::Exact);
    p.grid = SearchGrid::log_spaced(cat.n(), 60, 10.0);
    p
}

#[test]
fn plan_is_consistent_with_interval_model() {
    let (cat, profile) = setup();
    for k in 1..=3 {
        let p = problem(&cat, &profile, k, 200.0, 0.3);
        let r = optimize(&p).unwrap();
        assert!(r.feasible);
        assert!(r.window.volume >= r.lifetime as f64);
        let policy = PolicyConfig::equal_windows(k, r.lifetime).unwrap();
        let t = interval_averages(&cat, &policy, r.window.volume).unwrap();
        let served = t.h_interval * r.window.volume / profile.total_volume();
        assert!((served - r.served_fraction).abs() < 1e-9);
        assert!(served >= 0.3 - 1e-12);
        assert!((r.cost - r.duration() * (r.capacity + 200.0)).abs() < 1e-6 * r.cost);
    }
}

#[test]
fn curve_reuse_matches_fresh_search() {
    let (cat, profile) = setup();
    let p = problem(&cat, &profile, 2, 500.0, 0.35);
    let curve = PolicyCurve::build(&cat, 2, Mode::Exact, &p.grid.capacities).unwrap();
    assert_eq!(
        optimize(&p).unwrap(),
        optimize_with_curve(&p, &curve).unwrap()
    );
}

#[test]
fn unreachable_target_reports_reason() {
    let (cat, profile) = setup();
    let r = optimize(&problem(&cat, &profile, 1, 500.0, 0.999)).unwrap();
    assert!(!r.feasible);
    assert_eq!(r.reason, Some(Infeasibility::TargetTooHigh));
}

#[test]
fn flat_profile_limits_agree() {
    let cat = ZipfCatalog::new(5_000, 1.0).unwrap();
    let plus = RateProfile::plateau_valley(1440.0, 20.0, 2.0, 1.0)
        .unwrap()
        .scale_for_constant_volume(14_400.0)
        .unwrap();
    let minus = RateProfile::plateau_valley(1440.0, 20.0, 2.0, -1.0)
        .unwrap()
        .scale_for_constant_volume(14_400.0)
        .unwrap();
    let a = optimize(&problem(&cat, &plus, 2, 500.0, 0.3)).unwrap();
    let b = optimize(&problem(&cat, &minus, 2, 500.0, 0.3)).unwrap();
    assert!((a.cost - b.cost).abs() <= 1e-9 * a.cost);
}

#[test]
fn baseline_cost_is_full_period() {
    let (cat, profile) = setup();
    let r = always_on_baseline(&cat, 2, 500.0, 0.4, &profile).unwrap();
    assert!(r.feasible);
    assert_eq!(r.duration(), 1440.0);
    assert!((r.cost - 1440.0 * (r.capacity + 500.0)).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_never_exceeds_plan(b in 50.0f64..5000.0, h in 0.05f64..0.45, k in 1u32..=3) {
        let (cat, profile) = setup();
        let p = problem(&cat, &profile, k, b, h);
        let plan = optimize(&p).unwrap();
        let bound = lower_bound_cost(&p).unwrap();
        if plan.feasible {
            prop_assert!(bound.feasible);
            prop_assert!(plan.cost >= bound.cost);
        }
    }

    #[test]
    fn cost_monotone_in_target(b in 50.0f64..2000.0, h in 0.05f64..0.4, dh in 0.01f64..0.1) {
        let (cat, profile) = setup();
        let low = optimize(&problem(&cat, &profile, 2, b, h)).unwrap();
        let high = optimize(&problem(&cat, &profile, 2, b, h + dh)).unwrap();
        if high.feasible {
            prop_assert!(low.feasible);
            prop_assert!(low.cost <= high.cost);
        }
    }
}
