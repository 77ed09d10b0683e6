//! Performance profiles: for each solver, the share of instances on which
//! its metric is within a factor `x` of the best solver's.

use std::collections::{BTreeMap, BTreeSet};

use lexsched::rational::{decimal_string, exact_string};
use lexsched::search::Status;
use lexsched::{SolveReport, Q};
use serde::Serialize;

use crate::{invalid, weight_q, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Wall time, floored at 1 ms. Runs that timed out count as failures.
    Time,
    /// Weighted value of the returned vector with base 2.
    Weight,
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "time" => Ok(Metric::Time),
            "weight" => Ok(Metric::Weight),
            _ => Err(format!("unknown metric {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfilePoint {
    pub solver: String,
    pub instance: String,
    pub value: Option<Q>,
    /// `value` over the best value on the instance; `None` for failures.
    pub ratio: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub solver: String,
    pub x: Q,
    pub fraction: Q,
}

#[derive(Serialize)]
struct Row<'a> {
    solver: &'a str,
    x: String,
    x_exact: String,
    fraction: String,
    fraction_exact: String,
}

pub const HEADER: [&str; 5] = ["solver", "x", "x_exact", "fraction", "fraction_exact"];

fn metric_value(report: &SolveReport, metric: Metric) -> Result<Option<Q>, CliError> {
    Ok(match metric {
        Metric::Time => {
            if report.status != Status::Optimal {
                return Ok(None);
            }
            let micros = (report.elapsed_ms * 1000.0).round().max(1000.0) as i128;
            Some(Q::new(micros, 1000))
        }
        Metric::Weight => Some(weight_q(&report.vector).ok_or_else(|| invalid("weighted value overflows")).map(|w| w.max(Q::from_integer(1)))?),
    })
}

/// Ratios of every (solver, instance) pair. `reports` pairs each report with
/// the instance id to use when the report carries none.
pub fn ratios(reports: &[(String, SolveReport)], metric: Metric) -> Result<Vec<ProfilePoint>, CliError> {
    let mut table: BTreeMap<(String, String), Option<Q>> = BTreeMap::new();
    for (fallback, r) in reports {
        let instance = r.instance.clone().unwrap_or_else(|| fallback.clone());
        let solver = if r.method.is_empty() { "unknown".to_string() } else { r.method.clone() };
        let key = (solver, instance);
        if table.contains_key(&key) {
            return Err(invalid(format!("two reports for solver {} on instance {}", key.0, key.1)));
        }
        table.insert(key, metric_value(r, metric)?);
    }
    let solvers: BTreeSet<&str> = table.keys().map(|(s, _)| s.as_str()).collect();
    if solvers.len() < 2 {
        return Err(invalid("a profile needs reports from at least two solvers"));
    }
    let instances: BTreeSet<&str> = table.keys().map(|(_, i)| i.as_str()).collect();
    let shared = instances.iter().any(|i| solvers.iter().all(|s| table.contains_key(&(s.to_string(), i.to_string()))));
    if !shared {
        return Err(invalid("the solvers have no instance in common"));
    }
    let mut best: BTreeMap<&str, Q> = BTreeMap::new();
    for ((_, i), v) in &table {
        if let Some(v) = v {
            let e = best.entry(i.as_str()).or_insert(*v);
            *e = (*e).min(*v);
        }
    }
    let mut out = Vec::new();
    for s in &solvers {
        for i in &instances {
            let value = table.get(&(s.to_string(), i.to_string())).copied().flatten();
            let ratio = value.map(|v| v / best[i]);
            out.push(ProfilePoint { solver: s.to_string(), instance: i.to_string(), value, ratio });
        }
    }
    Ok(out)
}

/// Step curves evaluated at every ratio any solver attains. Missing reports
/// and failures never count as within any factor.
pub fn curves(points: &[ProfilePoint]) -> Vec<CurvePoint> {
    let instances: BTreeSet<&str> = points.iter().map(|p| p.instance.as_str()).collect();
    let n = instances.len().max(1) as i128;
    let mut xs: Vec<Q> = points.iter().filter_map(|p| p.ratio).collect();
    xs.push(Q::from_integer(1));
    xs.sort();
    xs.dedup();
    let mut by_solver: BTreeMap<&str, Vec<Q>> = BTreeMap::new();
    for p in points {
        let e = by_solver.entry(p.solver.as_str()).or_default();
        if let Some(r) = p.ratio {
            e.push(r);
        }
    }
    let mut out = Vec::new();
    for (solver, mut rs) in by_solver {
        rs.sort();
        for &x in &xs {
            let within = rs.partition_point(|r| *r <= x) as i128;
            out.push(CurvePoint { solver: solver.to_string(), x, fraction: Q::new(within, n) });
        }
    }
    out
}

pub fn curves_csv(curve: &[CurvePoint]) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Row> = curve
        .iter()
        .map(|c| Row {
            solver: &c.solver,
            x: decimal_string(&c.x, 6),
            x_exact: exact_string(&c.x),
            fraction: decimal_string(&c.fraction, 6),
            fraction_exact: exact_string(&c.fraction),
        })
        .collect();
    crate::files::csv_bytes(&HEADER, &rows)
}
