//! Pools of distinct near-optimal schedules for recovery experiments.
//!
//! Assignments are enumerated exhaustively (no symmetry reduction) under a
//! makespan threshold that starts at the optimal makespan and grows until
//! enough schedules exist. Selection cycles over the distinct completion
//! vectors in lexicographic order so that the pool spreads over many
//! weighted values instead of many relabelings of the same vector.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::baselines::min_makespan;
use crate::model::{weighted_value, CompletionVector, Instance, Schedule};
use crate::search::{Budget, Limits, SortedJobs, Status};

/// Base of the weighted value used to compare pooled schedules.
pub const POOL_BASE: u64 = 2;

#[derive(Debug, Clone)]
pub struct Pool {
    pub schedules: Vec<Schedule>,
    pub requested: usize,
    /// Makespan threshold of the final enumeration round.
    pub threshold: u64,
    pub optimal_makespan: u64,
    pub status: Status,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoolSpread {
    pub schedules: usize,
    pub distinct_vectors: usize,
    pub distinct_weights: usize,
    pub min_weight: String,
    pub max_weight: String,
}

impl Pool {
    /// True when fewer schedules exist than were requested.
    pub fn short(&self) -> bool {
        self.schedules.len() < self.requested
    }

    pub fn weights(&self) -> Vec<BigUint> {
        self.schedules
            .iter()
            .map(|s| weighted_value(&s.completion_vector(), POOL_BASE).expect("base 2 is valid"))
            .collect()
    }

    pub fn spread(&self) -> PoolSpread {
        let mut w = self.weights();
        w.sort();
        let min_weight = w.first().map(|x| x.to_string()).unwrap_or_default();
        let max_weight = w.last().map(|x| x.to_string()).unwrap_or_default();
        w.dedup();
        let mut v: Vec<_> = self.schedules.iter().map(|s| s.completion_vector()).collect();
        v.sort();
        v.dedup();
        PoolSpread {
            schedules: self.schedules.len(),
            distinct_vectors: v.len(),
            distinct_weights: w.len(),
            min_weight,
            max_weight,
        }
    }
}

struct Collector<'a> {
    jobs: &'a SortedJobs,
    threshold: u64,
    /// Per completion vector, assignments in sorted-job order.
    found: BTreeMap<CompletionVector, Vec<Vec<usize>>>,
    per_vector: usize,
    max_vectors: usize,
    budget: &'a Budget,
}

impl Collector<'_> {
    fn run(&mut self, level: usize, loads: &mut Vec<u64>, assign: &mut Vec<usize>) -> bool {
        if !self.budget.charge(1) {
            return false;
        }
        if level == self.jobs.n() {
            let v = CompletionVector::from_loads(loads);
            if let Some((last, _)) = self.found.last_key_value() {
                if self.found.len() >= self.max_vectors && v > *last && !self.found.contains_key(&v) {
                    return true;
                }
            }
            let slot = self.found.entry(v).or_default();
            if slot.len() < self.per_vector {
                slot.push(assign.clone());
            }
            if self.found.len() > self.max_vectors {
                self.found.pop_last();
            }
            return true;
        }
        let p = self.jobs.p[level];
        let slack: u64 = loads.iter().map(|&l| self.threshold - l).sum();
        if self.jobs.remaining(level) > slack {
            return true;
        }
        for i in 0..loads.len() {
            if loads[i] + p > self.threshold {
                continue;
            }
            loads[i] += p;
            assign.push(i);
            let ok = self.run(level + 1, loads, assign);
            assign.pop();
            loads[i] -= p;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Collects `count` pairwise distinct assignments, favouring small makespan
/// and distinct completion vectors. Returns fewer when fewer exist.
pub fn diverse_pool(instance: Arc<Instance>, count: usize, limits: Limits) -> Pool {
    let budget = Budget::new(limits);
    let opt = min_makespan(instance.clone(), limits);
    budget.charge(opt.nodes);
    let jobs = SortedJobs::new(&instance);
    let total = jobs.total();
    let mut threshold = opt.value;
    let mut found;
    let mut complete;
    loop {
        let mut c = Collector {
            jobs: &jobs,
            threshold,
            found: BTreeMap::new(),
            per_vector: count,
            max_vectors: count,
            budget: &budget,
        };
        complete = c.run(0, &mut vec![0; instance.m()], &mut Vec::new());
        found = c.found;
        let have: usize = found.values().map(Vec::len).sum();
        if !complete || have >= count || threshold >= total {
            break;
        }
        threshold = (threshold + threshold.div_ceil(10).max(1)).min(total);
    }
    let mut picked = Vec::new();
    let mut round = 0;
    while picked.len() < count {
        let before = picked.len();
        for list in found.values() {
            if picked.len() == count {
                break;
            }
            if let Some(a) = list.get(round) {
                picked.push(jobs.to_schedule(instance.clone(), a));
            }
        }
        if picked.len() == before {
            break;
        }
        round += 1;
    }
    if picked.is_empty() {
        picked.push(opt.schedule);
    }
    Pool {
        schedules: picked,
        requested: count,
        threshold,
        optimal_makespan: opt.value,
        status: if complete && opt.status == Status::Optimal { Status::Optimal } else { Status::Timeout },
        nodes: budget.nodes(),
    }
}
