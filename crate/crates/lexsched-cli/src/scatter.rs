//! Initial-schedule quality against recovered quality, one point per pooled
//! initial schedule and recovery strategy.

use std::sync::Arc;

use lexsched::generators::{gen_perturbations, PerturbSpec};
use lexsched::pool::diverse_pool;
use lexsched::rational::{decimal_string, exact_string};
use lexsched::recovery::{apply_perturbations, binding_recovery, flexible_recovery, Strategy};
use lexsched::search::{Limits, Status};
use lexsched::{Instance, Q};
use serde::Serialize;

use crate::{invalid, normalized, weight_q, CliError};

#[derive(Debug, Clone)]
pub struct ScatterConfig {
    pub pool: usize,
    pub perturb: PerturbSpec,
    pub strategies: Vec<Strategy>,
    /// Flexible-recovery budget; defaults to `ceil(0.1 n)`.
    pub g: Option<usize>,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatterPoint {
    pub instance: String,
    /// Position of the initial schedule in the pool.
    pub init: usize,
    pub strategy: Strategy,
    pub weight: Q,
    pub w_n: Q,
    pub makespan: u64,
    pub c_n: Q,
    /// Whether the recovery search finished.
    pub exact: bool,
}

#[derive(Serialize)]
struct Row<'a> {
    instance: &'a str,
    init: usize,
    strategy: Strategy,
    w_n: String,
    w_n_exact: String,
    c_n: String,
    c_n_exact: String,
    weight: String,
    makespan: u64,
    exact: bool,
}

pub const HEADER: [&str; 10] =
    ["instance", "init", "strategy", "w_n", "w_n_exact", "c_n", "c_n_exact", "weight", "makespan", "exact"];

pub fn default_budget(n: usize) -> usize {
    n.div_ceil(10)
}

/// Points for one instance. Both normalizers are minima over the emitted
/// points, so the best initial weight and best recovered makespan map to 1.
/// Warnings go to `warn`.
pub fn scatter_instance(
    id: &str,
    instance: Arc<Instance>,
    cfg: &ScatterConfig,
    warn: &mut dyn FnMut(String),
) -> Result<Vec<ScatterPoint>, CliError> {
    let perts = gen_perturbations(&instance, &cfg.perturb);
    let pool = diverse_pool(instance.clone(), cfg.pool, cfg.limits);
    if pool.short() {
        warn(format!("{id}: pool holds {} of {} schedules", pool.schedules.len(), cfg.pool));
    }
    let g = cfg.g.unwrap_or_else(|| default_budget(instance.n()));
    let mut raw = Vec::new();
    for (idx, init) in pool.schedules.iter().enumerate() {
        let weight = weight_q(&init.completion_vector()).ok_or_else(|| invalid("weighted value overflows"))?;
        let scenario = match apply_perturbations(instance.clone(), init.clone(), perts.clone()) {
            Ok(s) => s,
            Err(e) => {
                warn(format!("{id}: skipped, {e}"));
                return Ok(Vec::new());
            }
        };
        if scenario.new_instance().is_err() {
            warn(format!("{id}: skipped, no machines left"));
            return Ok(Vec::new());
        }
        let mut binding_mk = None;
        for &strategy in &cfg.strategies {
            let (mk, exact) = match strategy {
                Strategy::Binding => {
                    let s = binding_recovery(&scenario).map_err(invalid)?;
                    binding_mk = Some(s.makespan());
                    (s.makespan(), true)
                }
                Strategy::Flexible => {
                    let out = flexible_recovery(&scenario, g, cfg.limits).map_err(invalid)?;
                    (out.schedule.makespan(), out.status == Status::Optimal)
                }
            };
            raw.push((idx, strategy, weight, mk, exact));
        }
        if let (Some(b), Some(&(_, _, _, f, true))) = (binding_mk, raw.iter().rev().find(|r| r.0 == idx && r.1 == Strategy::Flexible)) {
            if f > b {
                warn(format!("{id}: flexible recovery worse than binding for schedule {idx}"));
            }
        }
    }
    let Some(w_best) = raw.iter().map(|r| r.2).min() else { return Ok(Vec::new()) };
    let c_best = raw.iter().map(|r| r.3).min().unwrap_or(0);
    Ok(raw
        .into_iter()
        .map(|(init, strategy, weight, makespan, exact)| ScatterPoint {
            instance: id.to_string(),
            init,
            strategy,
            weight,
            w_n: normalized(weight, w_best),
            makespan,
            c_n: normalized(Q::from_integer(makespan as i128), Q::from_integer(c_best as i128)),
            exact,
        })
        .collect())
}

pub fn points_csv(points: &[ScatterPoint]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Row> = points
        .iter()
        .map(|p| Row {
            instance: &p.instance,
            init: p.init,
            strategy: p.strategy,
            w_n: decimal_string(&p.w_n, 6),
            w_n_exact: exact_string(&p.w_n),
            c_n: decimal_string(&p.c_n, 6),
            c_n_exact: exact_string(&p.c_n),
            weight: exact_string(&p.weight),
            makespan: p.makespan,
            exact: p.exact,
        })
        .collect();
    crate::files::csv_bytes(&HEADER, &rows)
}
