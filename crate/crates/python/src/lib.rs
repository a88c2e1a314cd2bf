use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dyncache_core as dc;
use dyncache_core::optimizer;
use dyncache_core::rcw_exact::PolicyConfig;

create_exception!(dyncache, OutOfValidityError, PyValueError);
create_exception!(dyncache, UnderSampledError, PyRuntimeError);

fn to_py(e: dc::Error) -> PyErr {
    match e {
        dc::Error::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        dc::Error::OutOfValidity { .. } => OutOfValidityError::new_err(e.to_string()),
        dc::Error::UnderSampled { .. } => UnderSampledError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for dc::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn mode(name: &str) -> PyResult<dc::Mode> {
    match name {
        "exact" => Ok(dc::Mode::Exact),
        "approx" => Ok(dc::Mode::Approx),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'exact' or 'approx', got {other:?}"
        ))),
    }
}

/// Zipf popularity over `n` objects with exponent `alpha`.
#[pyclass(name = "ZipfCatalog", frozen)]
struct Catalog {
    inner: dc::ZipfCatalog,
}

#[pymethods]
impl Catalog {
    #[new]
    fn new(n: usize, alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: dc::ZipfCatalog::new(n, alpha).py_err()?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn alpha(&self) -> Option<f64> {
        self.inner.alpha()
    }

    /// Probability of the object with 1-based popularity rank `i`.
    fn probability(&self, i: usize) -> PyResult<f64> {
        self.inner.probability(i).py_err()
    }

    /// Total probability of the `floor(c)` most popular objects.
    fn head_sum(&self, c: f64) -> f64 {
        self.inner.head_sum(c)
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities().to_vec()
    }

    fn __repr__(&self) -> String {
        match self.inner.alpha() {
            Some(a) => format!("ZipfCatalog(n={}, alpha={a})", self.inner.n()),
            None => format!("ZipfCatalog(n={})", self.inner.n()),
        }
    }
}

#[pyclass(name = "SteadyMetrics", frozen)]
struct Metrics {
    #[pyo3(get)]
    occupancy: f64,
    #[pyo3(get)]
    hit_rate: f64,
    #[pyo3(get)]
    insertion_rate: f64,
}

#[pymethods]
impl Metrics {
    #[getter]
    fn insertion_fraction(&self) -> f64 {
        self.insertion_rate / (self.hit_rate + self.insertion_rate)
    }

    fn __repr__(&self) -> String {
        format!(
            "SteadyMetrics(occupancy={}, hit_rate={}, insertion_rate={})",
            self.occupancy, self.hit_rate, self.insertion_rate
        )
    }
}

impl From<dc::SteadyMetrics> for Metrics {
    fn from(m: dc::SteadyMetrics) -> Self {
        Self {
            occupancy: m.occupancy,
            hit_rate: m.hit_rate,
            insertion_rate: m.insertion_rate,
        }
    }
}

/// Request rate over one period.
#[pyclass(name = "RateProfile", frozen)]
struct Profile {
    inner: dc::RateProfile,
}

#[pymethods]
impl Profile {
    #[staticmethod]
    #[pyo3(signature = (period = 1440.0, lambda_high = 20.0))]
    fn triangular(period: f64, lambda_high: f64) -> PyResult<Self> {
        Ok(Self {
            inner: dc::RateProfile::triangular(period, lambda_high).py_err()?,
        })
    }

    #[staticmethod]
    fn plateau_valley(period: f64, lambda_high: f64, lambda_low: f64, h: f64) -> PyResult<Self> {
        Ok(Self {
            inner: dc::RateProfile::plateau_valley(period, lambda_high, lambda_low, h).py_err()?,
        })
    }

    /// Same shape with rates rescaled to a total volume of `reference`.
    fn scale_for_constant_volume(&self, reference: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.scale_for_constant_volume(reference).py_err()?,
        })
    }

    #[getter]
    fn period(&self) -> f64 {
        self.inner.period()
    }

    fn total_volume(&self) -> f64 {
        self.inner.total_volume()
    }

    fn rate_at(&self, t: f64) -> PyResult<f64> {
        self.inner.rate_at(t).py_err()
    }

    fn volume(&self, t1: f64, t2: f64) -> PyResult<f64> {
        self.inner.volume(t1, t2).py_err()
    }

    /// `(start, end, volume)` of the busiest window lasting `d` minutes.
    fn best_window(&self, d: f64) -> PyResult<(f64, f64, f64)> {
        let w = self.inner.best_window(d).py_err()?;
        Ok((w.start, w.end, w.volume))
    }
}

#[pyclass(name = "OptimizationResult", frozen)]
struct Plan {
    #[pyo3(get)]
    feasible: bool,
    #[pyo3(get)]
    reason: Option<&'static str>,
    #[pyo3(get)]
    start: f64,
    #[pyo3(get)]
    end: f64,
    #[pyo3(get)]
    volume: f64,
    #[pyo3(get)]
    capacity: f64,
    #[pyo3(get)]
    lifetime: u64,
    #[pyo3(get)]
    cost: f64,
    #[pyo3(get)]
    served_fraction: f64,
}

#[pymethods]
impl Plan {
    #[getter]
    fn duration(&self) -> f64 {
        self.end - self.start
    }

    fn __repr__(&self) -> String {
        match self.reason {
            Some(r) => format!("OptimizationResult(infeasible: {r})"),
            None => format!(
                "OptimizationResult(cost={}, capacity={}, window=[{}, {}], lifetime={})",
                self.cost, self.capacity, self.start, self.end, self.lifetime
            ),
        }
    }
}

impl From<dc::OptimizationResult> for Plan {
    fn from(r: dc::OptimizationResult) -> Self {
        Self {
            feasible: r.feasible,
            reason: r.reason.map(|r| r.code()),
            start: r.window.start,
            end: r.window.end,
            volume: r.window.volume,
            capacity: r.capacity,
            lifetime: r.lifetime,
            cost: r.cost,
            served_fraction: r.served_fraction,
        }
    }
}

#[pyclass(name = "SimReport", frozen)]
struct Report {
    #[pyo3(get)]
    hit_rate: f64,
    #[pyo3(get)]
    insertion_rate: f64,
    #[pyo3(get)]
    mean_occupancy: f64,
    #[pyo3(get)]
    requests_counted: u64,
    #[pyo3(get)]
    periods_completed: u64,
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    generator: &'static str,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "SimReport(hit_rate={}, insertion_rate={}, requests_counted={}, periods_completed={})",
            self.hit_rate, self.insertion_rate, self.requests_counted, self.periods_completed
        )
    }
}

/// Exact steady-state metrics of an RCW cache.
#[pyfunction]
#[pyo3(signature = (catalog, k, lifetime, window = None))]
fn steady(catalog: &Catalog, k: u32, lifetime: u64, window: Option<u64>) -> PyResult<Metrics> {
    let policy = PolicyConfig::new(k, lifetime, window.unwrap_or(lifetime)).py_err()?;
    Ok(dc::rcw_exact::steady_k(&catalog.inner, &policy)
        .py_err()?
        .into())
}

/// Closed-form steady-state metrics (`W = L`) inside the validity window.
#[pyfunction]
fn approx_steady(alpha: f64, n: usize, k: u32, lifetime: f64) -> PyResult<Metrics> {
    let reg = dc::ApproxRegime::new(alpha, n).py_err()?;
    Ok(dc::rcw_approx::approx_steady(&reg, k, lifetime)
        .py_err()?
        .into())
}

/// Closed-form lifetime giving occupancy `capacity`.
#[pyfunction]
fn invert_lifetime(alpha: f64, n: usize, k: u32, capacity: f64) -> PyResult<u64> {
    let reg = dc::ApproxRegime::new(alpha, n).py_err()?;
    dc::rcw_approx::invert_lifetime(&reg, k, capacity).py_err()
}

/// Smallest `W = L` lifetime whose exact occupancy reaches `target`.
#[pyfunction]
fn lifetime_for_occupancy(catalog: &Catalog, k: u32, target: f64) -> PyResult<Option<u64>> {
    dc::rcw_exact::lifetime_for_occupancy(&catalog.inner, k, target).py_err()
}

/// Smallest `W = L` lifetime whose exact hit rate reaches `target`.
#[pyfunction]
fn lifetime_for_hit_rate(catalog: &Catalog, k: u32, target: f64) -> PyResult<Option<u64>> {
    dc::rcw_exact::lifetime_for_hit_rate(&catalog.inner, k, target).py_err()
}

/// `(hit rate, insertion rate)` averaged over the first `lifetime` requests
/// after instantiation.
#[pyfunction]
#[pyo3(signature = (catalog, k, lifetime, window = None))]
fn transient(
    catalog: &Catalog,
    k: u32,
    lifetime: u64,
    window: Option<u64>,
) -> PyResult<(f64, f64)> {
    let policy = PolicyConfig::new(k, lifetime, window.unwrap_or(lifetime)).py_err()?;
    dc::transient::transient_metrics(&catalog.inner, &policy).py_err()
}

/// Fill-period hit rate over steady hit rate, exact, `W = L`.
#[pyfunction]
fn transient_ratio(catalog: &Catalog, k: u32, lifetime: u64) -> PyResult<f64> {
    dc::transient::transient_ratio_exact(&catalog.inner, k, lifetime).py_err()
}

/// Best possible hit rate over `r` requests into an empty cache.
#[pyfunction]
fn hitrate_upper_bound(catalog: &Catalog, r: f64) -> PyResult<f64> {
    optimizer::hitrate_upper_bound(&catalog.inner, r).py_err()
}

#[allow(clippy::too_many_arguments)]
fn problem<'a>(
    catalog: &'a Catalog,
    profile: &'a Profile,
    k: u32,
    b: f64,
    h_min: f64,
    mode_name: &str,
    capacities: usize,
    step: f64,
) -> PyResult<dc::OptimizationProblem<'a>> {
    let mut p = dc::OptimizationProblem::new(
        &catalog.inner,
        &profile.inner,
        k,
        b,
        h_min,
        mode(mode_name)?,
    );
    p.grid = dc::SearchGrid::log_spaced(catalog.inner.n(), capacities, step);
    Ok(p)
}

/// Cheapest single instantiation window meeting the served-fraction target.
#[pyfunction]
#[pyo3(signature = (catalog, profile, k, b = 500.0, h_min = 0.4, mode = "exact", capacities = 200, step = 1.0))]
#[allow(clippy::too_many_arguments)]
fn optimize(
    py: Python<'_>,
    catalog: &Catalog,
    profile: &Profile,
    k: u32,
    b: f64,
    h_min: f64,
    mode: &str,
    capacities: usize,
    step: f64,
) -> PyResult<Plan> {
    let p = problem(catalog, profile, k, b, h_min, mode, capacities, step)?;
    Ok(py.detach(|| optimizer::optimize(&p)).py_err()?.into())
}

/// Lower bound on the cost of any dynamically instantiated cache.
#[pyfunction]
#[pyo3(signature = (catalog, profile, b = 500.0, h_min = 0.4, mode = "exact", capacities = 200, step = 1.0))]
#[allow(clippy::too_many_arguments)]
fn lower_bound_cost(
    py: Python<'_>,
    catalog: &Catalog,
    profile: &Profile,
    b: f64,
    h_min: f64,
    mode: &str,
    capacities: usize,
    step: f64,
) -> PyResult<Plan> {
    let p = problem(catalog, profile, 1, b, h_min, mode, capacities, step)?;
    Ok(py
        .detach(|| optimizer::lower_bound_cost(&p))
        .py_err()?
        .into())
}

/// Permanently allocated cache sized for steady hit rate `h_min`.
#[pyfunction]
#[pyo3(signature = (catalog, profile, k, b = 500.0, h_min = 0.4))]
fn always_on(catalog: &Catalog, profile: &Profile, k: u32, b: f64, h_min: f64) -> PyResult<Plan> {
    Ok(
        optimizer::always_on_baseline(&catalog.inner, k, b, h_min, &profile.inner)
            .py_err()?
            .into(),
    )
}

/// Simulates an RCW (`lifetime`) or LRU (`capacity`) cache.
#[pyfunction]
#[pyo3(signature = (
    catalog, k = 1, lifetime = None, window = None, capacity = None, transient = false,
    seed = 0, requests = 6_000_000, warmup = 2_000_000, max_periods = 2000
))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    catalog: &Catalog,
    k: u32,
    lifetime: Option<u64>,
    window: Option<u64>,
    capacity: Option<usize>,
    transient: bool,
    seed: u64,
    requests: u64,
    warmup: u64,
    max_periods: u64,
) -> PyResult<Report> {
    let policy = match (lifetime, capacity) {
        (Some(l), None) => {
            dc::SimPolicy::Rcw(PolicyConfig::new(k, l, window.unwrap_or(l)).py_err()?)
        }
        (None, Some(capacity)) => dc::SimPolicy::Lru { capacity, k },
        _ => {
            return Err(PyValueError::new_err(
                "give exactly one of lifetime (RCW) or capacity (LRU)",
            ))
        }
    };
    let cfg = dc::SimConfig {
        seed,
        total_requests: requests,
        warmup_requests: warmup,
        transient: transient.then_some(dc::TransientBudget {
            max_periods,
            max_requests: requests,
        }),
    };
    let cat = &catalog.inner;
    let report = py
        .detach(|| match (transient, policy) {
            (true, p) => dc::simulator::simulate_transient(cat, &p, &cfg),
            (false, dc::SimPolicy::Rcw(p)) => dc::simulator::simulate_rcw_steady(cat, &p, &cfg),
            (false, dc::SimPolicy::Lru { capacity, k }) => {
                dc::simulator::simulate_lru_steady(cat, capacity, k, &cfg)
            }
        })
        .py_err()?;
    Ok(Report {
        hit_rate: report.hit_rate,
        insertion_rate: report.insertion_rate,
        mean_occupancy: report.mean_occupancy,
        requests_counted: report.requests_counted,
        periods_completed: report.periods_completed,
        seed: report.seed,
        generator: report.generator,
    })
}

#[pymodule(name = "dyncache")]
fn dyncache(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Catalog>()?;
    m.add_class::<Metrics>()?;
    m.add_class::<Profile>()?;
    m.add_class::<Plan>()?;
    m.add_class::<Report>()?;
    m.add(
        "OutOfValidityError",
        m.py().get_type::<OutOfValidityError>(),
    )?;
    m.add("UnderSampledError", m.py().get_type::<UnderSampledError>())?;
    m.add_function(wrap_pyfunction!(steady, m)?)?;
    m.add_function(wrap_pyfunction!(approx_steady, m)?)?;
    m.add_function(wrap_pyfunction!(invert_lifetime, m)?)?;
    m.add_function(wrap_pyfunction!(lifetime_for_occupancy, m)?)?;
    m.add_function(wrap_pyfunction!(lifetime_for_hit_rate, m)?)?;
    m.add_function(wrap_pyfunction!(transient, m)?)?;
    m.add_function(wrap_pyfunction!(transient_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(hitrate_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_cost, m)?)?;
    m.add_function(wrap_pyfunction!(always_on, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
