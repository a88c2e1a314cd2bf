//! Choosing when to allocate a cache and how large to make it.
//!
//! A cache of capacity `C` allocated for `D` minutes costs `D (C + b)`. The
//! optimizer searches a grid of capacities and durations for the cheapest
//! plan whose expected fraction of the period's requests served from cache
//! reaches `h_min`, always placing the allocation on the busiest window of
//! the chosen duration. The lower bound replaces the policy model by the
//! best any policy could do: no hit on the first request to an object, and
//! no more hits than a cache pinned to the `C` most popular objects.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::popularity::{ZipfCatalog, EULER_GAMMA};
use crate::rcw_approx::{approx_steady, invert_lifetime, ApproxRegime, ZipfCase};
use crate::rcw_exact::{
    lifetime_for_hit_rate, lifetime_for_occupancy, steady_k_equal, SteadyMetrics,
};
use crate::transient::fill_rates;
use crate::workload::{InstantiationWindow, RateProfile};

/// Which cache model drives the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exact sums; `L` found by bisection on the exact occupancy.
    Exact,
    /// Closed-form approximations; `L` from the closed-form inversion.
    Approx,
}

/// Why no plan satisfied the constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Infeasibility {
    /// The requested served fraction is not reachable on the grid.
    TargetTooHigh,
    /// Every candidate cache needs more requests to fill than the period has.
    TransientTooLong,
    /// No capacity on the grid lies inside the approximation validity window.
    RegimeViolation,
}

impl Infeasibility {
    pub fn code(self) -> &'static str {
        match self {
            Infeasibility::TargetTooHigh => "target_too_high",
            Infeasibility::TransientTooLong => "transient_too_long",
            Infeasibility::RegimeViolation => "regime_violation",
        }
    }
}

/// Capacities and duration granularity searched by the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub capacities: Vec<f64>,
    /// Duration step in minutes.
    pub duration_step: f64,
}

impl SearchGrid {
    /// `points` log-spaced capacities in `[1, n]` and the given duration step.
    pub fn log_spaced(n: usize, points: usize, duration_step: f64) -> Self {
        let top = (n as f64).ln();
        let capacities = match points {
            0 => Vec::new(),
            1 => vec![1.0],
            _ => (0..points)
                .map(|i| (top * i as f64 / (points - 1) as f64).exp())
                .collect(),
        };
        Self {
            capacities,
            duration_step,
        }
    }

    /// 200 log-spaced capacities and 1-minute duration steps.
    pub fn default_for(n: usize) -> Self {
        Self::log_spaced(n, 200, 1.0)
    }

    /// Candidate durations `step, 2 step, ...`, ending exactly at `period`.
    pub fn durations(&self, period: f64) -> Vec<f64> {
        let m = (period / self.duration_step + 1e-9).floor() as usize;
        let mut out: Vec<f64> = (1..=m).map(|i| i as f64 * self.duration_step).collect();
        if out.last().is_none_or(|&d| period - d > 1e-9 * period) {
            out.push(period);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.capacities.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if !(self.duration_step > 0.0 && self.duration_step.is_finite()) {
            return Err(invalid("duration step must be positive"));
        }
        if self.capacities.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(invalid("grid capacities must be positive"));
        }
        Ok(())
    }
}

/// One cost-minimization problem.
#[derive(Debug, Clone)]
pub struct OptimizationProblem<'a> {
    pub catalog: &'a ZipfCatalog,
    pub profile: &'a RateProfile,
    pub k: u32,
    /// Size-independent cost per unit time.
    pub b: f64,
    /// Target fraction of the period's requests served from cache.
    pub h_min: f64,
    pub mode: Mode,
    pub grid: SearchGrid,
}

impl<'a> OptimizationProblem<'a> {
    /// Problem with the default grid for the catalog size.
    pub fn new(
        catalog: &'a ZipfCatalog,
        profile: &'a RateProfile,
        k: u32,
        b: f64,
        h_min: f64,
        mode: Mode,
    ) -> Self {
        Self {
            catalog,
            profile,
            k,
            b,
            h_min,
            mode,
            grid: SearchGrid::default_for(catalog.n()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(invalid(format!("b = {} must be nonnegative", self.b)));
        }
        if !(self.h_min > 0.0 && self.h_min < 1.0) {
            return Err(invalid(format!("h_min = {} outside (0, 1)", self.h_min)));
        }
        self.grid.validate()
    }
}

/// Outcome of a search: a plan or the reason none exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub feasible: bool,
    pub reason: Option<Infeasibility>,
    pub window: InstantiationWindow,
    pub capacity: f64,
    /// Lifetime of the RCW cache; zero for bounds, which have no policy.
    pub lifetime: u64,
    pub cost: f64,
    pub served_fraction: f64,
}

impl OptimizationResult {
    pub fn infeasible(reason: Infeasibility) -> Self {
        Self {
            feasible: false,
            reason: Some(reason),
            window: InstantiationWindow {
                start: 0.0,
                end: 0.0,
                volume: 0.0,
            },
            capacity: f64::NAN,
            lifetime: 0,
            cost: f64::INFINITY,
            served_fraction: 0.0,
        }
    }

    pub fn duration(&self) -> f64 {
        self.window.duration()
    }

    /// Deterministic preference: lower cost, then shorter, then smaller.
    fn better_than(&self, other: &Self) -> bool {
        (self.cost, self.duration(), self.capacity) < (other.cost, other.duration(), other.capacity)
    }
}

/// Steady-state model of one capacity on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub capacity: f64,
    pub lifetime: u64,
    pub steady: SteadyMetrics,
}

/// Policy model evaluated at every grid capacity. Independent of the rate
/// profile, `b` and `h_min`, so one curve serves a whole parameter sweep.
#[derive(Debug, Clone)]
pub struct PolicyCurve {
    pub k: u32,
    pub mode: Mode,
    pub points: Vec<std::result::Result<CurvePoint, Infeasibility>>,
}

impl PolicyCurve {
    pub fn build(catalog: &ZipfCatalog, k: u32, mode: Mode, capacities: &[f64]) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let regime = match mode {
            Mode::Approx => Some(ApproxRegime::for_catalog(catalog)?),
            Mode::Exact => None,
        };
        let points = capacities
            .par_iter()
            .map(|&c| match &regime {
                Some(regime) => approx_point(regime, k, c),
                None => exact_point(catalog, k, c),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { k, mode, points })
    }
}

fn exact_point(
    catalog: &ZipfCatalog,
    k: u32,
    c: f64,
) -> Result<std::result::Result<CurvePoint, Infeasibility>> {
    Ok(match lifetime_for_occupancy(catalog, k, c)? {
        Some(l) => Ok(CurvePoint {
            capacity: c,
            lifetime: l,
            steady: steady_k_equal(catalog, k, l),
        }),
        None => Err(Infeasibility::TargetTooHigh),
    })
}

fn approx_point(
    regime: &ApproxRegime,
    k: u32,
    c: f64,
) -> Result<std::result::Result<CurvePoint, Infeasibility>> {
    let point = invert_lifetime(regime, k, c).and_then(|l| {
        approx_steady(regime, k, l as f64).map(|steady| CurvePoint {
            capacity: c,
            lifetime: l,
            steady,
        })
    });
    match point {
        Ok(p) => Ok(Ok(p)),
        Err(Error::OutOfValidity { .. }) => Ok(Err(Infeasibility::RegimeViolation)),
        Err(e) => Err(e),
    }
}

/// Fraction of the period's requests served from cache by a policy point
/// allocated over a window holding `volume` requests.
fn served(point: &CurvePoint, volume: f64, total: f64) -> f64 {
    let l = point.lifetime as f64;
    let (h_tr, _) = fill_rates(&point.steady, l);
    (l * h_tr + (volume - l) * point.steady.hit_rate) / total
}

/// Index of the first element of `0..len` satisfying a monotone predicate.
fn first_true(len: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (lo < len).then_some(lo)
}

/// Cheapest plan for the problem's policy.
pub fn optimize(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    problem.validate()?;
    let curve = PolicyCurve::build(
        problem.catalog,
        problem.k,
        problem.mode,
        &problem.grid.capacities,
    )?;
    optimize_with_curve(problem, &curve)
}

/// Cheapest plan using a precomputed curve for the problem's `k` and mode.
pub fn optimize_with_curve(
    problem: &OptimizationProblem,
    curve: &PolicyCurve,
) -> Result<OptimizationResult> {
    problem.validate()?;
    if curve.k != problem.k || curve.mode != problem.mode {
        return Err(invalid(
            "policy curve does not match the problem's k and mode",
        ));
    }
    let profile = problem.profile;
    let total = profile.total_volume();
    let durations = problem.grid.durations(profile.period());
    let windows = durations
        .iter()
        .map(|&d| profile.best_window(d))
        .collect::<Result<Vec<_>>>()?;
    let full = windows.last().expect("durations are never empty").volume;

    let mut best: Option<OptimizationResult> = None;
    let mut reasons = Vec::with_capacity(curve.points.len());
    for point in &curve.points {
        let point = match point {
            Ok(p) => p,
            Err(reason) => {
                reasons.push(*reason);
                continue;
            }
        };
        let l = point.lifetime as f64;
        let ok = |i: usize| {
            let v = windows[i].volume;
            v >= l && served(point, v, total) >= problem.h_min
        };
        let Some(i) = first_true(windows.len(), ok) else {
            reasons.push(if full < l {
                Infeasibility::TransientTooLong
            } else {
                Infeasibility::TargetTooHigh
            });
            continue;
        };
        let window = windows[i];
        let candidate = OptimizationResult {
            feasible: true,
            reason: None,
            window,
            capacity: point.capacity,
            lifetime: point.lifetime,
            cost: window.duration() * (point.capacity + problem.b),
            served_fraction: served(point, window.volume, total),
        };
        if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
            best = Some(candidate);
        }
    }
    Ok(best.unwrap_or_else(|| OptimizationResult::infeasible(dominant_reason(&reasons))))
}

fn dominant_reason(reasons: &[Infeasibility]) -> Infeasibility {
    let all = |r: Infeasibility| !reasons.is_empty() && reasons.iter().all(|&x| x == r);
    if all(Infeasibility::RegimeViolation) {
        Infeasibility::RegimeViolation
    } else if all(Infeasibility::TransientTooLong) {
        Infeasibility::TransientTooLong
    } else {
        Infeasibility::TargetTooHigh
    }
}

/// Best possible hit rate over `r` requests for a cache that starts empty:
/// `1 - (N - sum (1-p_i)^r) / r`.
pub fn hitrate_upper_bound(catalog: &ZipfCatalog, r: f64) -> Result<f64> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(invalid(format!("request count {r} must be at least 1")));
    }
    let (plain, _) = catalog.survival_sums(r);
    Ok(1.0 - (catalog.n() as f64 - plain) / r)
}

/// Smallest duration whose busiest window could, under any policy, serve
/// `h_min` of the period's requests. `None` if even the whole period cannot.
pub fn lower_bound_duration(problem: &OptimizationProblem) -> Result<Option<f64>> {
    problem.validate()?;
    let catalog = problem.catalog;
    let profile = problem.profile;
    let n = catalog.n() as f64;
    let needed = profile.total_volume() * problem.h_min;

    // R + sum (1-p_i)^R >= total h_min + N
    let generic = |r: f64| r + catalog.survival_sums(r).0 >= needed + n;
    let mut best = smallest_duration(profile, generic)?;

    let special = match (problem.mode, catalog.alpha().map(ZipfCase::from_alpha)) {
        (Mode::Approx, Some(Ok(case))) => Some(case),
        _ => None,
    };
    if let Some(case) = special {
        let n1 = n + 1.0;
        let d2 = match case {
            ZipfCase::One => {
                let omega = n1.ln() + EULER_GAMMA;
                let cutoff = n1 * omega;
                smallest_duration(profile, |r| {
                    r < cutoff && {
                        let x = r / omega;
                        x * (x.ln() + 2.0 * EULER_GAMMA - 1.0) >= needed - 1.0
                    }
                })?
            }
            ZipfCase::Half => {
                let cutoff = 2.0 * n1;
                smallest_duration(profile, |r| {
                    r < cutoff && {
                        let g = r * r / (4.0 * n1)
                            * ((2.0 * n1 / r).ln() + r / (6.0 * n1) + 1.5 - EULER_GAMMA);
                        g >= needed - 1.0
                    }
                })?
            }
        };
        best = match (best, d2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    Ok(best)
}

/// Bisection for the smallest duration whose best-window volume satisfies
/// `holds`. The relation must switch from false to true at most once; for
/// the capped relations the satisfied region is an interval, so a sampled
/// scan locates a satisfied duration before bisecting.
fn smallest_duration(profile: &RateProfile, holds: impl Fn(f64) -> bool) -> Result<Option<f64>> {
    let period = profile.period();
    let at = |d: f64| -> Result<bool> { Ok(holds(profile.best_window(d)?.volume)) };
    const SAMPLES: usize = 512;
    let mut hi = None;
    for i in 1..=SAMPLES {
        let d = period * i as f64 / SAMPLES as f64;
        if at(d)? {
            hi = Some(d);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(None);
    };
    let mut lo = hi - period / SAMPLES as f64;
    if lo <= 0.0 {
        lo = 0.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 {
            break;
        }
        if at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Best-case hit rate of a cache holding `c` objects, used by the lower
/// bound: closed forms for exponents 1 and 0.5 in approximate mode, the
/// exact top-`floor(c)` sum otherwise.
pub fn top_capacity_hit_rate(catalog: &ZipfCatalog, mode: Mode, c: f64) -> f64 {
    let n = catalog.n() as f64;
    let special = match (mode, catalog.alpha().map(ZipfCase::from_alpha)) {
        (Mode::Approx, Some(Ok(case))) => Some(case),
        _ => None,
    };
    let h = match special {
        Some(ZipfCase::One) => ((c + 1.0).ln() + EULER_GAMMA) / (n.ln() + EULER_GAMMA),
        Some(ZipfCase::Half) => {
            ((c + 0.5).sqrt() - std::f64::consts::FRAC_1_SQRT_2) / ((n + 1.0).sqrt() - 1.0)
        }
        None => catalog.head_sum(c),
    };
    h.min(1.0)
}

/// Cheapest plan any policy could achieve: capacity and duration on the
/// grid, duration at least [`lower_bound_duration`], and served fraction
/// bounded by the top-capacity hit rate.
pub fn lower_bound_cost(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    problem.validate()?;
    let Some(d_min) = lower_bound_duration(problem)? else {
        return Ok(OptimizationResult::infeasible(Infeasibility::TargetTooHigh));
    };
    let profile = problem.profile;
    let total = profile.total_volume();
    let windows = problem
        .grid
        .durations(profile.period())
        .into_iter()
        .filter(|&d| d >= d_min * (1.0 - 1e-12))
        .map(|d| profile.best_window(d))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<OptimizationResult> = None;
    for &c in &problem.grid.capacities {
        let top = top_capacity_hit_rate(problem.catalog, problem.mode, c);
        let Some(i) = first_true(windows.len(), |i| {
            windows[i].volume * top >= total * problem.h_min
        }) else {
            continue;
        };
        let window = windows[i];
        let candidate = OptimizationResult {
            feasible: true,
            reason: None,
            window,
            capacity: c,
            lifetime: 0,
            cost: window.duration() * (c + problem.b),
            served_fraction: window.volume * top / total,
        };
        if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
            best = Some(candidate);
        }
    }
    Ok(best.unwrap_or_else(|| OptimizationResult::infeasible(Infeasibility::TargetTooHigh)))
}

/// Permanently allocated cache sized so its exact steady hit rate reaches
/// `h_min`; costs `T (C + b)`.
pub fn always_on_baseline(
    catalog: &ZipfCatalog,
    k: u32,
    b: f64,
    h_min: f64,
    profile: &RateProfile,
) -> Result<OptimizationResult> {
    if !(h_min > 0.0 && h_min < 1.0) {
        return Err(invalid(format!("h_min = {h_min} outside (0, 1)")));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(invalid(format!("b = {b} must be nonnegative")));
    }
    let Some(l) = lifetime_for_hit_rate(catalog, k, h_min)? else {
        return Ok(OptimizationResult::infeasible(Infeasibility::TargetTooHigh));
    };
    let steady = steady_k_equal(catalog, k, l);
    let period = profile.period();
    let c = steady.occupancy;
    Ok(OptimizationResult {
        feasible: true,
        reason: None,
        window: InstantiationWindow {
            start: 0.0,
            end: period,
            volume: profile.total_volume(),
        },
        capacity: c,
        lifetime: l,
        cost: period * (c + b),
        served_fraction: steady.hit_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_setup() -> (ZipfCatalog, RateProfile) {
        (
            ZipfCatalog::new(2_000, 1.0).unwrap(),
            RateProfile::triangular(1440.0, 20.0).unwrap(),
        )
    }

    #[test]
    fn grid_shape() {
        let g = SearchGrid::default_for(100_000);
        assert_eq!(g.capacities.len(), 200);
        assert_eq!(g.capacities[0], 1.0);
        assert!((g.capacities[199] - 100_000.0).abs() < 1e-6);
        let d = g.durations(1440.0);
        assert_eq!(d.len(), 1440);
        assert_eq!(d[0], 1.0);
        assert_eq!(*d.last().unwrap(), 1440.0);
        let odd = SearchGrid::log_spaced(10, 3, 7.0).durations(20.0);
        assert_eq!(odd, vec![7.0, 14.0, 20.0]);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let (cat, profile) = small_setup();
        let mut p = OptimizationProblem::new(&cat, &profile, 1, 500.0, 0.4, Mode::Exact);
        p.grid.capacities.clear();
        assert_eq!(optimize(&p).unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn upper_bound_examples() {
        let cat = ZipfCatalog::new(2, 1.0).unwrap();
        assert!(hitrate_upper_bound(&cat, 1.0).unwrap().abs() < 1e-15);
        assert!((hitrate_upper_bound(&cat, 2.0).unwrap() - 5.0 / 18.0).abs() < 1e-15);
        let one = ZipfCatalog::new(1, 1.0).unwrap();
        for r in [1.0, 2.0, 7.5] {
            assert!((hitrate_upper_bound(&one, r).unwrap() - (1.0 - 1.0 / r)).abs() < 1e-15);
        }
        assert!(hitrate_upper_bound(&cat, 0.5).is_err());
    }

    #[test]
    fn upper_bound_concave() {
        let cat = ZipfCatalog::new(5_000, 1.0).unwrap();
        let h: Vec<f64> = (1..400)
            .map(|i| hitrate_upper_bound(&cat, 1.0 + 37.0 * i as f64).unwrap())
            .collect();
        for w in h.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-12);
        }
    }

    #[test]
    fn tiny_target_is_cheap() {
        let (cat, profile) = small_setup();
        let p = OptimizationProblem::new(&cat, &profile, 1, 0.0, 1e-6, Mode::Exact);
        let r = optimize(&p).unwrap();
        assert!(r.feasible);
        assert!(r.cost <= 10.0, "cost {}", r.cost);
        let d = lower_bound_duration(&p).unwrap().unwrap();
        assert!(d < 1.0);
    }

    #[test]
    fn impossible_target_is_flagged() {
        let (cat, profile) = small_setup();
        let p = OptimizationProblem::new(&cat, &profile, 2, 500.0, 0.9999, Mode::Exact);
        assert_eq!(lower_bound_duration(&p).unwrap(), None);
        let r = lower_bound_cost(&p).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.reason, Some(Infeasibility::TargetTooHigh));
        let r = optimize(&p).unwrap();
        assert!(!r.feasible);
        assert!(r.cost.is_infinite());
    }

    #[test]
    fn plan_satisfies_constraints() {
        let (cat, profile) = small_setup();
        for k in 1..=3 {
            let p = OptimizationProblem::new(&cat, &profile, k, 50.0, 0.5, Mode::Exact);
            let r = optimize(&p).unwrap();
            assert!(r.feasible);
            assert!(r.served_fraction >= 0.5);
            assert!(r.window.volume >= r.lifetime as f64);
            assert!((r.cost - r.duration() * (r.capacity + 50.0)).abs() < 1e-9);
            let lb = lower_bound_cost(&p).unwrap();
            assert!(lb.cost <= r.cost);
        }
    }

    #[test]
    fn approx_mode_reports_regime_violation() {
        let cat = ZipfCatalog::new(2_000, 1.0).unwrap();
        let profile = RateProfile::triangular(1440.0, 20.0).unwrap();
        let mut p = OptimizationProblem::new(&cat, &profile, 2, 500.0, 0.4, Mode::Approx);
        p.grid.capacities = vec![1.0, 1.5];
        let r = optimize(&p).unwrap();
        assert_eq!(r.reason, Some(Infeasibility::RegimeViolation));
        let weights = ZipfCatalog::from_weights(&[3.0, 2.0, 1.0]).unwrap();
        let p = OptimizationProblem::new(&weights, &profile, 1, 500.0, 0.4, Mode::Approx);
        assert!(matches!(optimize(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn lower_bound_duration_matches_scan() {
        let cat = ZipfCatalog::new(100_000, 1.0).unwrap();
        let profile = RateProfile::triangular(1440.0, 20.0).unwrap();
        let p = OptimizationProblem::new(&cat, &profile, 1, 500.0, 0.4, Mode::Exact);
        let d = lower_bound_duration(&p).unwrap().unwrap();
        let needed = profile.total_volume() * 0.4;
        let scan = (1..=1440)
            .map(|m| m as f64)
            .find(|&m| {
                let r = profile.best_window(m).unwrap().volume;
                r * hitrate_upper_bound(&cat, r).unwrap() >= needed
            })
            .unwrap();
        assert!(d <= scan && scan - d <= 1.0, "bisection {d} vs scan {scan}");
        let approx = OptimizationProblem {
            mode: Mode::Approx,
            ..p.clone()
        };
        let da = lower_bound_duration(&approx).unwrap().unwrap();
        assert!(da <= d + 1e-9 && d - da <= 1.0);
    }

    #[test]
    fn baseline_sizes_to_target() {
        let (cat, profile) = small_setup();
        let r = always_on_baseline(&cat, 2, 500.0, 0.4, &profile).unwrap();
        assert!(r.feasible && r.served_fraction >= 0.4);
        assert_eq!(r.duration(), 1440.0);
        let r1 = always_on_baseline(&cat, 1, 500.0, 0.4, &profile).unwrap();
        assert!(r.capacity <= r1.capacity);
        let r = always_on_baseline(&cat, 1, 500.0, 1.0 - 1e-12, &profile).unwrap();
        assert!(!r.feasible);
    }
}
