use rayon::prelude::*;

use dyncache::optimizer::{
    always_on_baseline, lower_bound_cost, lower_bound_duration, optimize_with_curve,
    top_capacity_hit_rate,
};
use dyncache::rcw_approx::approx_steady;
use dyncache::rcw_exact::{lifetime_for_hit_rate, lifetime_for_occupancy, steady_k};
use dyncache::simulator::{simulate_lru_steady, simulate_rcw_steady, simulate_transient};
use dyncache::transient::{transient_metrics, transient_ratio_approx, transient_ratio_exact};
use dyncache::{
    ApproxRegime, Error, Mode, OptimizationProblem, OptimizationResult, PolicyConfig, PolicyCurve,
    RateProfile, SearchGrid, SimConfig, SimPolicy, SteadyMetrics, TransientBudget, ZipfCatalog,
};

use crate::output::{num, opt, Table};
use crate::{CliError, Common, Output, PolicyArg, SweepParam};

type Result<T> = std::result::Result<T, CliError>;

fn catalog(c: &Common) -> Result<ZipfCatalog> {
    Ok(ZipfCatalog::new(c.n, c.alpha)?)
}

fn ks(c: &Common, default: &[u32]) -> Vec<u32> {
    c.k.clone().unwrap_or_else(|| default.to_vec())
}

fn single_k(c: &Common) -> Result<u32> {
    match c.k.as_deref() {
        None => Ok(1),
        Some([k]) => Ok(*k),
        Some(_) => Err(CliError::Usage("this command takes a single --k".into())),
    }
}

fn sim_config(c: &Common, seed: u64) -> SimConfig {
    SimConfig {
        seed,
        total_requests: c.requests,
        warmup_requests: c.warmup,
        transient: None,
    }
}

/// Approximation regime for the catalog, or a note saying why there is none.
fn regime(c: &Common) -> std::result::Result<ApproxRegime, String> {
    ApproxRegime::new(c.alpha, c.n).map_err(|e| format!("approximation columns left empty: {e}"))
}

/// Closed-form metrics at `l`, `None` outside the validity window.
fn approx_at(
    regime: &std::result::Result<ApproxRegime, String>,
    k: u32,
    l: u64,
) -> Result<Option<SteadyMetrics>> {
    let Ok(reg) = regime else {
        return Ok(None);
    };
    match approx_steady(reg, k, l as f64) {
        Ok(m) => Ok(Some(m)),
        Err(Error::OutOfValidity { .. } | Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn note(msg: impl AsRef<str>) {
    eprintln!("note: {}", msg.as_ref());
}

fn profile(c: &Common, lambda_high: f64, h: Option<f64>) -> Result<RateProfile> {
    let triangle = RateProfile::triangular(c.period, lambda_high)?;
    Ok(match h {
        None => triangle,
        Some(h) => {
            let low = c.lambda_low.unwrap_or(0.1 * c.lambda_high) * lambda_high / c.lambda_high;
            RateProfile::plateau_valley(c.period, lambda_high, low, h)?
                .scale_for_constant_volume(triangle.total_volume())?
        }
    })
}

pub fn steady_sweep(c: &Common, grid: &[f64], sim: bool) -> Result<Output> {
    let cat = catalog(c)?;
    let k = single_k(c)?;
    let reg = regime(c);
    if let Err(msg) = &reg {
        note(msg);
    }
    let mut header = vec![
        "a_over_n",
        "L",
        "A_exact",
        "H_exact",
        "H_approx",
        "insfrac_exact",
        "insfrac_approx",
        "H_topC",
    ];
    if sim {
        header.extend([
            "H_lru_sim",
            "insfrac_lru_sim",
            "H_rcw_sim",
            "insfrac_rcw_sim",
        ]);
    }
    let width = header.len();
    let rows: Vec<Result<(Vec<String>, Vec<String>)>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &f)| {
            let mut notes = Vec::new();
            let Some(l) = lifetime_for_occupancy(&cat, k, f * cat.n() as f64)? else {
                notes.push(format!("a_over_n={f}: occupancy not reachable"));
                let mut row = vec![num(f)];
                row.resize(width, String::new());
                return Ok((row, notes));
            };
            let exact = steady_k(&cat, &PolicyConfig::equal_windows(k, l)?)?;
            let approx = approx_at(&reg, k, l)?;
            if approx.is_none() && reg.is_ok() {
                notes.push(format!(
                    "a_over_n={f}: L={l} outside the approximation validity window"
                ));
            }
            let mut row = vec![
                num(f),
                l.to_string(),
                num(exact.occupancy),
                num(exact.hit_rate),
                opt(approx.map(|m| m.hit_rate)),
                num(exact.insertion_fraction()),
                opt(approx.map(|m| m.insertion_fraction())),
                num(top_capacity_hit_rate(&cat, Mode::Exact, exact.occupancy)),
            ];
            if sim {
                let capacity = (exact.occupancy.round() as usize).max(1);
                let seed = c.seed.wrapping_add(2 * i as u64);
                let lru = simulate_lru_steady(&cat, capacity, k, &sim_config(c, seed))?;
                let policy = PolicyConfig::equal_windows(k, l)?;
                let rcw = simulate_rcw_steady(&cat, &policy, &sim_config(c, seed + 1))?;
                row.extend([
                    num(lru.hit_rate),
                    num(lru.insertion_rate / (lru.hit_rate + lru.insertion_rate)),
                    num(rcw.hit_rate),
                    num(rcw.insertion_rate / (rcw.hit_rate + rcw.insertion_rate)),
                ]);
            }
            Ok((row, notes))
        })
        .collect();
    let mut table = Table::new(header);
    for r in rows {
        let (row, notes) = r?;
        notes.iter().for_each(note);
        table.push(row);
    }
    Ok(Output {
        table,
        all_infeasible: false,
    })
}

/// Smallest lifetime in the validity window whose closed-form hit rate
/// reaches `target`.
fn approx_lifetime_for_hit_rate(reg: &ApproxRegime, k: u32, target: f64) -> Result<Option<u64>> {
    let (lo, hi) = reg.validity_window(k);
    let (mut lo, mut hi) = (lo.ceil() as u64, hi.floor() as u64);
    let h = |l: u64| -> Result<f64> { Ok(approx_steady(reg, k, l as f64)?.hit_rate) };
    if lo > hi || h(lo)? > target || h(hi)? < target {
        return Ok(None);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if h(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub fn tradeoff(c: &Common, targets: &[f64]) -> Result<Output> {
    let cat = catalog(c)?;
    let ks = ks(c, &[1, 2, 3, 4]);
    let approx = c.mode == crate::ModeArg::Approx;
    let reg = if approx {
        Some(ApproxRegime::new(c.alpha, c.n)?)
    } else {
        None
    };
    let header = std::iter::once("H".to_string()).chain(ks.iter().map(|k| format!("insfrac_k{k}")));
    let mut table = Table::new(header);
    let rows: Vec<Result<Vec<String>>> = targets
        .par_iter()
        .map(|&h| {
            let mut row = vec![num(h)];
            for &k in &ks {
                let cell = match &reg {
                    None => match lifetime_for_hit_rate(&cat, k, h)? {
                        Some(l) => Some(steady_k(&cat, &PolicyConfig::equal_windows(k, l)?)?),
                        None => None,
                    },
                    Some(reg) => match approx_lifetime_for_hit_rate(reg, k, h)? {
                        Some(l) => Some(approx_steady(reg, k, l as f64)?),
                        None => None,
                    },
                };
                if cell.is_none() {
                    note(format!("H={h} k={k}: target not reachable"));
                }
                row.push(opt(cell.map(|m| m.insertion_fraction())));
            }
            Ok(row)
        })
        .collect();
    for r in rows {
        table.push(r?);
    }
    Ok(Output {
        table,
        all_infeasible: false,
    })
}

pub fn transient_sweep(c: &Common, grid: &[f64], sim: bool, max_periods: u64) -> Result<Output> {
    let cat = catalog(c)?;
    let ks = ks(c, &[1, 2, 4]);
    let reg = regime(c);
    if let Err(msg) = &reg {
        note(msg);
    }
    let mut header = vec![
        "k",
        "a_over_n",
        "L",
        "H_steady",
        "h_transient",
        "i_transient",
        "ratio_exact",
        "ratio_approx",
    ];
    if sim {
        header.extend([
            "h_transient_rcw_sim",
            "periods_rcw_sim",
            "h_transient_lru_sim",
            "periods_lru_sim",
        ]);
    }
    let width = header.len();
    let cells: Vec<(u32, f64)> = ks
        .iter()
        .flat_map(|&k| grid.iter().map(move |&f| (k, f)))
        .collect();
    let rows: Vec<Result<(Vec<String>, Vec<String>)>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(k, f))| {
            let mut notes = Vec::new();
            let Some(l) = lifetime_for_occupancy(&cat, k, f * cat.n() as f64)? else {
                notes.push(format!("k={k} a_over_n={f}: occupancy not reachable"));
                let mut row = vec![k.to_string(), num(f)];
                row.resize(width, String::new());
                return Ok((row, notes));
            };
            let policy = PolicyConfig::equal_windows(k, l)?;
            let steady = steady_k(&cat, &policy)?;
            let (h_tr, i_tr) = transient_metrics(&cat, &policy)?;
            let ratio_approx = match &reg {
                Ok(reg) => match transient_ratio_approx(reg, k, l as f64) {
                    Ok(r) => Some(r),
                    Err(Error::OutOfValidity { .. }) => {
                        notes.push(format!(
                            "k={k} a_over_n={f}: L={l} outside the closed-form domain"
                        ));
                        None
                    }
                    Err(e) => return Err(e.into()),
                },
                Err(_) => None,
            };
            let mut row = vec![
                k.to_string(),
                num(f),
                l.to_string(),
                num(steady.hit_rate),
                num(h_tr),
                num(i_tr),
                num(transient_ratio_exact(&cat, k, l)?),
                opt(ratio_approx),
            ];
            if sim {
                let budget = TransientBudget {
                    max_periods,
                    max_requests: c.requests,
                };
                let cfg = |seed| SimConfig {
                    transient: Some(budget),
                    ..sim_config(c, seed)
                };
                let seed = c.seed.wrapping_add(2 * i as u64);
                for (policy, seed) in [
                    (SimPolicy::Rcw(policy), seed),
                    (
                        SimPolicy::Lru {
                            capacity: (steady.occupancy.round() as usize).max(1),
                            k,
                        },
                        seed + 1,
                    ),
                ] {
                    match simulate_transient(&cat, &policy, &cfg(seed)) {
                        Ok(r) => row.extend([num(r.hit_rate), r.periods_completed.to_string()]),
                        Err(Error::UnderSampled { .. }) => {
                            notes.push(format!(
                                "k={k} a_over_n={f}: no complete fill period within the budget"
                            ));
                            row.extend([String::new(), "0".to_string()]);
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            Ok((row, notes))
        })
        .collect();
    let mut table = Table::new(header);
    for r in rows {
        let (row, notes) = r?;
        notes.iter().for_each(note);
        table.push(row);
    }
    Ok(Output {
        table,
        all_infeasible: false,
    })
}

fn default_values(param: SweepParam) -> Vec<f64> {
    match param {
        SweepParam::B => vec![50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0],
        SweepParam::Hmin => vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        SweepParam::LambdaHigh => vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
        SweepParam::H => vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0],
    }
}

fn param_name(param: SweepParam) -> &'static str {
    match param {
        SweepParam::B => "b",
        SweepParam::Hmin => "h_min",
        SweepParam::LambdaHigh => "lambda_high",
        SweepParam::H => "h",
    }
}

/// Cost cell and ratio-to-bound cell for one plan.
fn cost_cells(plan: &OptimizationResult, bound: &OptimizationResult) -> [String; 2] {
    match (plan.feasible, bound.feasible) {
        (false, _) => [
            plan.reason
                .map(|r| r.code())
                .unwrap_or_default()
                .to_string(),
            String::new(),
        ],
        (true, false) => [num(plan.cost), String::new()],
        (true, true) => [num(plan.cost), num(plan.cost / bound.cost)],
    }
}

pub fn optimize_sweep(
    c: &Common,
    param: SweepParam,
    values: Option<&[f64]>,
    capacities: usize,
    step: f64,
) -> Result<Output> {
    let cat = catalog(c)?;
    let values = values
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| default_values(param));
    let ks = ks(c, &[1, 2, 3, 4]);
    let mode: Mode = c.mode.into();
    let grid = SearchGrid::log_spaced(cat.n(), capacities, step);
    let curves = ks
        .par_iter()
        .map(|&k| PolicyCurve::build(&cat, k, mode, &grid.capacities))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut header = vec![param_name(param).to_string(), "bound_cost".to_string()];
    for k in &ks {
        header.extend([format!("cost_k{k}"), format!("ratio_k{k}")]);
    }
    for k in [1, 2] {
        header.extend([
            format!("cost_always_on_k{k}"),
            format!("ratio_always_on_k{k}"),
        ]);
    }
    let mut table = Table::new(header);
    let mut any_feasible = false;
    for &v in &values {
        let (mut b, mut hmin, mut lambda_high, mut h) = (c.b, c.hmin, c.lambda_high, c.h);
        match param {
            SweepParam::B => b = v,
            SweepParam::Hmin => hmin = v,
            SweepParam::LambdaHigh => lambda_high = v,
            SweepParam::H => h = Some(v),
        }
        let prof = profile(c, lambda_high, h)?;
        let mut problem = OptimizationProblem::new(&cat, &prof, 1, b, hmin, mode);
        problem.grid = grid.clone();
        let bound = lower_bound_cost(&problem)?;
        let mut row = vec![num(v)];
        if bound.feasible {
            row.push(num(bound.cost));
        } else {
            note(format!(
                "{}={v}: lower bound infeasible, ratios left empty",
                param_name(param)
            ));
            row.push(
                bound
                    .reason
                    .map(|r| r.code())
                    .unwrap_or_default()
                    .to_string(),
            );
        }
        let plans = curves
            .par_iter()
            .map(|curve| {
                let mut p = problem.clone();
                p.k = curve.k;
                optimize_with_curve(&p, curve)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for plan in &plans {
            any_feasible |= plan.feasible;
            row.extend(cost_cells(plan, &bound));
        }
        for k in [1, 2] {
            let base = always_on_baseline(&cat, k, b, hmin, &prof)?;
            row.extend(cost_cells(&base, &bound));
        }
        table.push(row);
    }
    Ok(Output {
        table,
        all_infeasible: !any_feasible,
    })
}

pub fn bound(c: &Common, hmins: Option<&[f64]>, capacities: usize, step: f64) -> Result<Output> {
    let cat = catalog(c)?;
    let prof = profile(c, c.lambda_high, c.h)?;
    let hmins = hmins.map(<[f64]>::to_vec).unwrap_or_else(|| vec![c.hmin]);
    let mut table = Table::new([
        "h_min",
        "d_lower",
        "bound_cost",
        "capacity",
        "duration",
        "t_start",
        "t_end",
        "status",
    ]);
    let mut any_feasible = false;
    for h in hmins {
        let mut problem = OptimizationProblem::new(&cat, &prof, 1, c.b, h, c.mode.into());
        problem.grid = SearchGrid::log_spaced(cat.n(), capacities, step);
        let d = lower_bound_duration(&problem)?;
        let r = lower_bound_cost(&problem)?;
        any_feasible |= r.feasible;
        let row = if r.feasible {
            vec![
                num(h),
                opt(d),
                num(r.cost),
                num(r.capacity),
                num(r.duration()),
                num(r.window.start),
                num(r.window.end),
                "feasible".to_string(),
            ]
        } else {
            let mut row = vec![num(h), opt(d)];
            row.resize(7, String::new());
            row.push(r.reason.map(|r| r.code()).unwrap_or_default().to_string());
            row
        };
        table.push(row);
    }
    Ok(Output {
        table,
        all_infeasible: !any_feasible,
    })
}

pub fn simulate(
    c: &Common,
    policy: PolicyArg,
    transient: bool,
    max_periods: u64,
) -> Result<Output> {
    let cat = catalog(c)?;
    let k = single_k(c)?;
    let mut cfg = sim_config(c, c.seed);
    if transient {
        cfg.transient = Some(TransientBudget {
            max_periods,
            max_requests: c.requests,
        });
    }
    let (sim_policy, model) = match policy {
        PolicyArg::Rcw => {
            let l =
                c.l.ok_or_else(|| CliError::Usage("--l is required for the rcw policy".into()))?;
            let p = PolicyConfig::new(k, l, c.w.unwrap_or(l))?;
            let model = if transient {
                transient_metrics(&cat, &p)?.0
            } else {
                steady_k(&cat, &p)?.hit_rate
            };
            (SimPolicy::Rcw(p), Some(model))
        }
        PolicyArg::Lru => {
            let capacity = c.capacity.ok_or_else(|| {
                CliError::Usage("--capacity is required for the lru policy".into())
            })?;
            if capacity.is_nan() || capacity < 1.0 {
                return Err(CliError::Usage("--capacity must be at least 1".into()));
            }
            (
                SimPolicy::Lru {
                    capacity: capacity as usize,
                    k,
                },
                None,
            )
        }
    };
    let report = match (transient, sim_policy) {
        (true, p) => simulate_transient(&cat, &p, &cfg)?,
        (false, SimPolicy::Rcw(p)) => simulate_rcw_steady(&cat, &p, &cfg)?,
        (false, SimPolicy::Lru { capacity, k }) => simulate_lru_steady(&cat, capacity, k, &cfg)?,
    };
    let (l, w, cap) = match sim_policy {
        SimPolicy::Rcw(p) => (p.lifetime.to_string(), p.window.to_string(), String::new()),
        SimPolicy::Lru { capacity, .. } => (String::new(), String::new(), capacity.to_string()),
    };
    let mut table = Table::new([
        "policy",
        "k",
        "L",
        "W",
        "C",
        "transient",
        "seed",
        "generator",
        "requests_counted",
        "periods_completed",
        "hit_rate",
        "insertion_rate",
        "mean_occupancy",
        "H_model",
    ]);
    table.push(vec![
        format!("{policy:?}").to_lowercase(),
        k.to_string(),
        l,
        w,
        cap,
        transient.to_string(),
        report.seed.to_string(),
        report.generator.to_string(),
        report.requests_counted.to_string(),
        report.periods_completed.to_string(),
        num(report.hit_rate),
        num(report.insertion_rate),
        num(report.mean_occupancy),
        opt(model),
    ]);
    Ok(Output {
        table,
        all_infeasible: false,
    })
}
