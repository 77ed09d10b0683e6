//! Exact branch and bound for the lexicographically optimal schedule.

use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::bounds::{fathom, vectorial_bounds};
use crate::model::{CompletionVector, Instance, Schedule};
use crate::rational::{qi, Q};
use crate::search::{dfs, run_stack, Budget, Decision, Limits, SearchNode, SortedJobs, Status, Visitor};

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub schedule: Schedule,
    pub nodes: u64,
    /// Lexicographic lower bound on the optimal vector; equal to the
    /// schedule's vector when the status is optimal.
    pub lower_bound: Vec<Q>,
    pub elapsed: Duration,
}

impl SolveResult {
    pub fn vector(&self) -> CompletionVector {
        self.schedule.completion_vector()
    }

    pub fn report(&self, method: &str) -> SolveReport {
        SolveReport {
            method: method.to_string(),
            instance: None,
            status: self.status,
            vector: self.vector(),
            assignment: self.schedule.to_map(),
            nodes: self.nodes,
            lower_bound: self.lower_bound.clone(),
            elapsed_ms: self.elapsed.as_secs_f64() * 1000.0,
        }
    }
}

/// Serializable summary of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(default)]
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub status: Status,
    pub vector: CompletionVector,
    pub assignment: std::collections::BTreeMap<String, usize>,
    pub nodes: u64,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub lower_bound: Vec<Q>,
    pub elapsed_ms: f64,
}

/// Search switches, mainly for testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BnbConfig {
    /// Fathom nodes using the vectorial bounds.
    pub prune: bool,
    /// Run LPT at every node to improve the incumbent.
    pub heuristic: bool,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig { prune: true, heuristic: true }
    }
}

struct LexVisitor<'s> {
    config: BnbConfig,
    best: CompletionVector,
    best_assign: Vec<usize>,
    leaves: u64,
    shared: Option<&'s Mutex<(CompletionVector, Vec<usize>)>>,
    since_sync: u32,
}

impl<'s> LexVisitor<'s> {
    fn offer(&mut self, vector: CompletionVector, assign: impl FnOnce() -> Vec<usize>) {
        if vector < self.best {
            self.best = vector;
            self.best_assign = assign();
            if let Some(shared) = self.shared {
                let mut g = shared.lock().unwrap();
                if self.best < g.0 {
                    *g = (self.best.clone(), self.best_assign.clone());
                }
            }
        }
    }

    fn sync(&mut self) {
        if let Some(shared) = self.shared {
            self.since_sync += 1;
            if self.since_sync >= 64 {
                self.since_sync = 0;
                let g = shared.lock().unwrap();
                if g.0 < self.best {
                    self.best = g.0.clone();
                    self.best_assign = g.1.clone();
                }
            }
        }
    }
}

impl Visitor for LexVisitor<'_> {
    fn visit(&mut self, jobs: &SortedJobs, node: &SearchNode) -> Decision {
        self.sync();
        if self.config.heuristic {
            let (chosen, loads) = jobs.lpt_completion(node);
            let v = CompletionVector::from_loads(&loads);
            self.offer(v, || {
                let mut a = node.assign.clone();
                a.extend(chosen);
                a
            });
        }
        if self.config.prune && fathom(jobs, node, &self.best) {
            Decision::Prune
        } else {
            Decision::Expand
        }
    }

    fn leaf(&mut self, _jobs: &SortedJobs, node: &SearchNode) {
        self.leaves += 1;
        let v = node.vector();
        self.offer(v, || node.assign.clone());
    }
}

/// Lexicographic minimum of `incumbent` and the uncapped `L` of every open node.
fn global_lower_bound(jobs: &SortedJobs, open: &[SearchNode], incumbent: &CompletionVector) -> Vec<Q> {
    let mut best: Vec<Q> = incumbent.as_slice().iter().map(|&c| qi(c)).collect();
    for node in open {
        let l = vectorial_bounds(jobs, node, None).lower;
        if l < best {
            best = l;
        }
    }
    best
}

fn initial_incumbent(jobs: &SortedJobs) -> (CompletionVector, Vec<usize>) {
    let root = jobs.root();
    let (chosen, loads) = jobs.lpt_completion(&root);
    (CompletionVector::from_loads(&loads), chosen)
}

/// Solves the instance to lexicographic optimality, or returns the best
/// schedule found when a limit is reached.
pub fn solve_lexopt(instance: Arc<Instance>, limits: Limits) -> SolveResult {
    solve_lexopt_with(instance, limits, BnbConfig::default()).0
}

/// Like [`solve_lexopt`] with explicit switches; also returns the number of leaves reached.
pub fn solve_lexopt_with(instance: Arc<Instance>, limits: Limits, config: BnbConfig) -> (SolveResult, u64) {
    let jobs = SortedJobs::new(&instance);
    let budget = Budget::new(limits);
    let (best, best_assign) = initial_incumbent(&jobs);
    let mut visitor = LexVisitor { config, best, best_assign, leaves: 0, shared: None, since_sync: 0 };
    let outcome = dfs(&jobs, jobs.root(), &budget, &mut visitor);
    let status = if outcome.completed { Status::Optimal } else { Status::Timeout };
    let lower_bound = global_lower_bound(&jobs, &outcome.open, &visitor.best);
    let schedule = jobs.to_schedule(instance, &visitor.best_assign);
    let result = SolveResult { status, schedule, nodes: budget.nodes(), lower_bound, elapsed: budget.elapsed() };
    (result, visitor.leaves)
}

/// Parallel variant: the top of the tree is expanded breadth-first until
/// there are enough subtrees, which are then searched concurrently while
/// sharing the incumbent. Falls back to a sequential loop over the
/// subtrees when built without the `parallel` feature.
pub fn solve_lexopt_parallel(instance: Arc<Instance>, limits: Limits, threads: usize) -> SolveResult {
    let jobs = SortedJobs::new(&instance);
    let budget = Budget::new(limits);
    let (best, best_assign) = initial_incumbent(&jobs);
    let shared = Mutex::new((best.clone(), best_assign.clone()));
    let target = 8 * threads.max(1);

    // breadth-first expansion of the top levels
    let mut seed = LexVisitor {
        config: BnbConfig::default(),
        best,
        best_assign,
        leaves: 0,
        shared: Some(&shared),
        since_sync: 0,
    };
    let root = jobs.root();
    let mut frontier = Vec::new();
    let mut exhausted = !budget.charge(1);
    if !exhausted {
        if root.level == jobs.n() {
            seed.leaf(&jobs, &root);
        } else if let Decision::Expand = seed.visit(&jobs, &root) {
            frontier.push(root);
        }
    }
    while !exhausted && !frontier.is_empty() && frontier.len() < target {
        let mut next = Vec::new();
        for node in frontier.drain(..) {
            let children = jobs.children(&node);
            if !budget.charge(children.len() as u64) {
                exhausted = true;
                next.push(node);
                continue;
            }
            for child in children {
                if child.level == jobs.n() {
                    seed.leaf(&jobs, &child);
                } else if let Decision::Expand = seed.visit(&jobs, &child) {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    let open: Vec<SearchNode> = if exhausted {
        frontier
    } else {
        let run = |start: SearchNode| -> Vec<SearchNode> {
            let (best, best_assign) = shared.lock().unwrap().clone();
            let mut v = LexVisitor {
                config: BnbConfig::default(),
                best,
                best_assign,
                leaves: 0,
                shared: Some(&shared),
                since_sync: 0,
            };
            run_stack(&jobs, vec![start], &budget, &mut v).open
        };
        crate::par::map_in_pool(frontier, threads, run).into_iter().flatten().collect()
    };
    let (best, best_assign) = shared.into_inner().unwrap();
    let status = if open.is_empty() && !budget.exhausted() { Status::Optimal } else { Status::Timeout };
    let lower_bound = global_lower_bound(&jobs, &open, &best);
    let schedule = jobs.to_schedule(instance, &best_assign);
    SolveResult { status, schedule, nodes: budget.nodes(), lower_bound, elapsed: budget.elapsed() }
}
