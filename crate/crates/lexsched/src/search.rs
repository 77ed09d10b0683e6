//! Shared depth-first machinery over partial schedules of LPT-sorted jobs.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::model::{CompletionVector, Instance, Schedule};

/// Time and node budgets; `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Limits::default()
    }

    pub fn with_time(time: Duration) -> Self {
        Limits { time: Some(time), nodes: None }
    }

    pub fn with_nodes(nodes: u64) -> Self {
        Limits { time: None, nodes: Some(nodes) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Timeout,
}

/// Node counter and deadline, shareable between worker threads.
#[derive(Debug)]
pub struct Budget {
    limits: Limits,
    start: Instant,
    nodes: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    pub fn new(limits: Limits) -> Self {
        Budget { limits, start: Instant::now(), nodes: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    /// Counts `k` generated nodes; returns false once a limit is hit.
    /// The clock is read at most once per 1024 nodes.
    pub fn charge(&self, k: u64) -> bool {
        if self.exhausted() {
            return false;
        }
        let before = self.nodes.fetch_add(k, Ordering::Relaxed);
        let after = before + k;
        if let Some(cap) = self.limits.nodes {
            if after > cap {
                self.exhausted.store(true, Ordering::Relaxed);
                return false;
            }
        }
        if let Some(t) = self.limits.time {
            if (before / 1024 != after / 1024 || before == 0) && self.start.elapsed() >= t {
                self.exhausted.store(true, Ordering::Relaxed);
                return false;
            }
        }
        true
    }

    /// Remaining limits, for chaining several searches under one budget.
    pub fn remaining(&self) -> Limits {
        Limits {
            time: self.limits.time.map(|t| t.saturating_sub(self.elapsed())),
            nodes: self.limits.nodes.map(|n| n.saturating_sub(self.nodes())),
        }
    }
}

/// Jobs of an instance sorted by nonincreasing processing time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedJobs {
    pub m: usize,
    /// Processing times, nonincreasing.
    pub p: Vec<u64>,
    /// `order[k]` is the instance index of the k-th sorted job.
    pub order: Vec<usize>,
    /// `cum[k]` is the sum of the first `k` sorted times.
    pub cum: Vec<u64>,
}

impl SortedJobs {
    pub fn new(instance: &Instance) -> Self {
        let order = crate::model::lpt_order(instance);
        let p: Vec<u64> = order.iter().map(|&j| instance.jobs()[j].p).collect();
        Self::from_parts(instance.m(), p, order)
    }

    pub fn from_parts(m: usize, p: Vec<u64>, order: Vec<usize>) -> Self {
        let mut cum = Vec::with_capacity(p.len() + 1);
        cum.push(0);
        for &x in &p {
            cum.push(cum.last().unwrap() + x);
        }
        SortedJobs { m, p, order, cum }
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn total(&self) -> u64 {
        self.cum[self.n()]
    }

    /// Total time of sorted jobs `level..n`.
    pub fn remaining(&self, level: usize) -> u64 {
        self.total() - self.cum[level]
    }

    /// Time of the sorted job at `level`, zero past the end.
    pub fn next(&self, level: usize) -> u64 {
        self.p.get(level).copied().unwrap_or(0)
    }

    pub fn root(&self) -> SearchNode {
        SearchNode { level: 0, loads: vec![0; self.m], assign: Vec::new() }
    }

    /// Completes `node` with LPT; returns machines for the remaining sorted jobs and final loads.
    pub fn lpt_completion(&self, node: &SearchNode) -> (Vec<usize>, Vec<u64>) {
        crate::model::lpt_extend(&node.loads, &self.p[node.level..])
    }

    /// Machine per instance job from machines per sorted job.
    pub fn to_machine_of(&self, assign: &[usize]) -> Vec<usize> {
        let mut out = vec![0; assign.len()];
        for (k, &i) in assign.iter().enumerate() {
            out[self.order[k]] = i;
        }
        out
    }

    pub fn to_schedule(&self, instance: std::sync::Arc<Instance>, assign: &[usize]) -> Schedule {
        Schedule::new(instance, self.to_machine_of(assign)).expect("search produces valid schedules")
    }

    /// Children of `node`: one per distinct load value, lowest machine index
    /// among equals, ordered by increasing load.
    pub fn children(&self, node: &SearchNode) -> Vec<SearchNode> {
        let p = self.p[node.level];
        let mut targets: Vec<usize> = (0..self.m).collect();
        targets.sort_by_key(|&i| (node.loads[i], i));
        targets.dedup_by_key(|i| node.loads[*i]);
        targets
            .into_iter()
            .map(|i| {
                let mut loads = node.loads.clone();
                loads[i] += p;
                let mut assign = Vec::with_capacity(node.level + 1);
                assign.extend_from_slice(&node.assign);
                assign.push(i);
                SearchNode { level: node.level + 1, loads, assign }
            })
            .collect()
    }
}

/// Partial schedule: the first `level` sorted jobs are placed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchNode {
    pub level: usize,
    pub loads: Vec<u64>,
    pub assign: Vec<usize>,
}

impl SearchNode {
    pub fn vector(&self) -> CompletionVector {
        CompletionVector::from_loads(&self.loads)
    }
}

pub(crate) enum Decision {
    Prune,
    Expand,
}

pub(crate) trait Visitor {
    /// Inner node (not a leaf); decide whether to branch on it.
    fn visit(&mut self, jobs: &SortedJobs, node: &SearchNode) -> Decision;
    fn leaf(&mut self, jobs: &SortedJobs, node: &SearchNode);
}

pub(crate) struct Outcome {
    pub completed: bool,
    /// Nodes still waiting to be branched on when the budget ran out.
    pub open: Vec<SearchNode>,
}

/// Depth-first search from `start`; smallest-load child is explored first.
/// `start` itself is charged and visited.
pub(crate) fn dfs<V: Visitor>(jobs: &SortedJobs, start: SearchNode, budget: &Budget, visitor: &mut V) -> Outcome {
    let n = jobs.n();
    if !budget.charge(1) {
        return Outcome { completed: false, open: vec![start] };
    }
    if start.level == n {
        visitor.leaf(jobs, &start);
        return Outcome { completed: true, open: Vec::new() };
    }
    if let Decision::Prune = visitor.visit(jobs, &start) {
        return Outcome { completed: true, open: Vec::new() };
    }
    run_stack(jobs, vec![start], budget, visitor)
}

/// Continues a depth-first search from nodes that were already charged and
/// visited; the last element is explored first.
pub(crate) fn run_stack<V: Visitor>(
    jobs: &SortedJobs,
    mut stack: Vec<SearchNode>,
    budget: &Budget,
    visitor: &mut V,
) -> Outcome {
    let n = jobs.n();
    while let Some(node) = stack.pop() {
        let children = jobs.children(&node);
        if !budget.charge(children.len() as u64) {
            stack.push(node);
            return Outcome { completed: false, open: stack };
        }
        let mut keep = Vec::with_capacity(children.len());
        for child in children {
            if child.level == n {
                visitor.leaf(jobs, &child);
            } else if let Decision::Expand = visitor.visit(jobs, &child) {
                keep.push(child);
            }
        }
        while let Some(child) = keep.pop() {
            stack.push(child);
        }
    }
    Outcome { completed: true, open: Vec::new() }
}
