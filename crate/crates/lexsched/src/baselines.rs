//! Classical routes to the lexicographic optimum: sequential constrained
//! minimization, a single weighted objective, and a makespan-optimal pool
//! filtered lexicographically.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::bnb::SolveResult;
use crate::bounds::NodeProfile;
use crate::model::{CompletionVector, Instance, Schedule};
use crate::rational::{ceil_to_u64, qi, Q};
use crate::search::{dfs, Budget, Decision, Limits, SearchNode, SortedJobs, Status, Visitor};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("objective index {i} is outside 1..={m}")]
    BadIndex { i: usize, m: usize },
    #[error("prefix has {got} values but objective {i} needs {}", .i - 1)]
    BadPrefix { i: usize, got: usize },
    #[error("no schedule attains the given prefix")]
    Infeasible,
    #[error("limits reached before any schedule matching the prefix was found")]
    NoWitness,
    #[error("weight base must be at least 1")]
    BadBase,
    #[error("pool capacity must be at least 1")]
    ZeroCapacity,
}

/// Result of minimizing `C_i` subject to `C_q = prefix_q` for `q < i`.
#[derive(Debug, Clone)]
pub struct ConstrainedOutcome {
    pub value: u64,
    pub schedule: Schedule,
    pub status: Status,
    pub nodes: u64,
}

struct ConstrainedVisitor<'a> {
    i: usize,
    prefix: &'a [u64],
    best: Option<(u64, Vec<usize>)>,
}

impl ConstrainedVisitor<'_> {
    fn offer(&mut self, loads: &[u64], assign: impl FnOnce() -> Vec<usize>) {
        let v = CompletionVector::from_loads(loads);
        let v = v.as_slice();
        if v[..self.i - 1] != *self.prefix {
            return;
        }
        let c = v[self.i - 1];
        if self.best.as_ref().is_none_or(|(b, _)| c < *b) {
            self.best = Some((c, assign()));
        }
    }
}

impl Visitor for ConstrainedVisitor<'_> {
    fn visit(&mut self, jobs: &SortedJobs, node: &SearchNode) -> Decision {
        let profile = NodeProfile::new(jobs, node);
        let mut usum = Q::zero();
        for q in 1..self.i {
            let target = self.prefix[q - 1];
            if profile.t(q) > target || profile.lower(q, &usum) > qi(target) {
                return Decision::Prune;
            }
            usum += qi(target);
        }
        if let Some((b, _)) = &self.best {
            if ceil_to_u64(&profile.lower(self.i, &usum)) >= *b {
                return Decision::Prune;
            }
        }
        let (chosen, loads) = jobs.lpt_completion(node);
        self.offer(&loads, || {
            let mut a = node.assign.clone();
            a.extend(chosen);
            a
        });
        Decision::Expand
    }

    fn leaf(&mut self, _jobs: &SortedJobs, node: &SearchNode) {
        self.offer(&node.loads, || node.assign.clone());
    }
}

fn sorted_assign(jobs: &SortedJobs, schedule: &Schedule) -> Vec<usize> {
    jobs.order.iter().map(|&j| schedule.machine_of()[j]).collect()
}

fn check_index(m: usize, i: usize, prefix: &[u64]) -> Result<(), BaselineError> {
    if i == 0 || i > m {
        return Err(BaselineError::BadIndex { i, m });
    }
    if prefix.len() != i - 1 {
        return Err(BaselineError::BadPrefix { i, got: prefix.len() });
    }
    Ok(())
}

fn constrained_in(
    instance: &Arc<Instance>,
    jobs: &SortedJobs,
    i: usize,
    prefix: &[u64],
    warm: Option<&Schedule>,
    budget: &Budget,
) -> Result<(u64, Vec<usize>, bool), BaselineError> {
    let mut visitor = ConstrainedVisitor { i, prefix, best: None };
    if let Some(w) = warm {
        if Arc::ptr_eq(w.instance(), instance) || **w.instance() == **instance {
            let assign = sorted_assign(jobs, w);
            let mut loads = vec![0u64; jobs.m];
            for (k, &mach) in assign.iter().enumerate() {
                loads[mach] += jobs.p[k];
            }
            visitor.offer(&loads, || assign.clone());
        }
    }
    let outcome = dfs(jobs, jobs.root(), budget, &mut visitor);
    match visitor.best {
        Some((value, assign)) => Ok((value, assign, outcome.completed)),
        None if outcome.completed => Err(BaselineError::Infeasible),
        None => Err(BaselineError::NoWitness),
    }
}

/// Minimizes `C_i` over schedules whose first `i - 1` completion times equal
/// `prefix`. `warm` may hold a schedule attaining the prefix.
pub fn constrained_min(
    instance: Arc<Instance>,
    i: usize,
    prefix: &[u64],
    warm: Option<&Schedule>,
    limits: Limits,
) -> Result<ConstrainedOutcome, BaselineError> {
    check_index(instance.m(), i, prefix)?;
    let jobs = SortedJobs::new(&instance);
    let budget = Budget::new(limits);
    let (value, assign, completed) = constrained_in(&instance, &jobs, i, prefix, warm, &budget)?;
    Ok(ConstrainedOutcome {
        value,
        schedule: jobs.to_schedule(instance, &assign),
        status: if completed { Status::Optimal } else { Status::Timeout },
        nodes: budget.nodes(),
    })
}

/// Optimal makespan with a witness schedule.
pub fn min_makespan(instance: Arc<Instance>, limits: Limits) -> ConstrainedOutcome {
    constrained_min(instance, 1, &[], None, limits).expect("LPT always provides a witness")
}

/// Solves `C_1`, then `C_2` with `C_1` fixed, and so on. On timeout the
/// witness of the last completed step is returned.
pub fn sequential_method(instance: Arc<Instance>, limits: Limits) -> SolveResult {
    let jobs = SortedJobs::new(&instance);
    let budget = Budget::new(limits);
    let m = instance.m();
    let mut witness = crate::model::lpt(instance.clone());
    let mut prefix: Vec<u64> = Vec::with_capacity(m);
    let mut status = Status::Optimal;
    // the last component is fixed by the others
    for i in 1..m {
        match constrained_in(&instance, &jobs, i, &prefix, Some(&witness), &budget) {
            Ok((value, assign, true)) => {
                prefix.push(value);
                witness = jobs.to_schedule(instance.clone(), &assign);
            }
            Ok((_, _, false)) | Err(_) => {
                status = Status::Timeout;
                break;
            }
        }
    }
    let lower_bound = match status {
        Status::Optimal => witness.completion_vector().as_slice().iter().map(|&c| qi(c)).collect(),
        Status::Timeout => {
            let mut lb: Vec<Q> = prefix.iter().map(|&c| qi(c)).collect();
            lb.resize(m, Q::zero());
            lb
        }
    };
    SolveResult { status, schedule: witness, nodes: budget.nodes(), lower_bound, elapsed: budget.elapsed() }
}

/// Result of the weighted-sum baseline.
#[derive(Debug, Clone)]
pub struct WeightingOutcome {
    pub result: SolveResult,
    pub weight: BigUint,
    /// Two lexicographically different vectors reached the minimum weight;
    /// the lexicographically smaller one is returned.
    pub tie: bool,
}

struct WeightVisitor {
    powers: Vec<BigUint>,
    best_w: BigUint,
    best_vec: CompletionVector,
    best_assign: Vec<usize>,
    tie: bool,
}

impl WeightVisitor {
    fn weight(&self, v: &CompletionVector) -> BigUint {
        v.as_slice().iter().zip(&self.powers).map(|(&c, w)| w * c).sum()
    }

    fn offer(&mut self, loads: &[u64], assign: impl FnOnce() -> Vec<usize>) {
        let v = CompletionVector::from_loads(loads);
        let w = self.weight(&v);
        if w < self.best_w {
            self.best_w = w;
            self.tie = false;
            self.best_vec = v;
            self.best_assign = assign();
        } else if w == self.best_w && v != self.best_vec {
            self.tie = true;
            if v < self.best_vec {
                self.best_vec = v;
                self.best_assign = assign();
            }
        }
    }
}

impl Visitor for WeightVisitor {
    fn visit(&mut self, jobs: &SortedJobs, node: &SearchNode) -> Decision {
        let (chosen, loads) = jobs.lpt_completion(node);
        self.offer(&loads, || {
            let mut a = node.assign.clone();
            a.extend(chosen);
            a
        });
        // Every completion majorizes max(t, water level), and the weighted
        // sum with nonincreasing weights is Schur-convex. Scaled by k to
        // stay in integers; only strictly worse subtrees are cut so that
        // ties are still seen.
        let mut asc = node.loads.clone();
        asc.sort_unstable();
        let mut acc = jobs.remaining(node.level);
        let mut k = 1;
        acc += asc[0];
        while k < asc.len() && acc > asc[k] * k as u64 {
            acc += asc[k];
            k += 1;
        }
        let lb: BigUint = asc
            .iter()
            .rev()
            .zip(&self.powers)
            .map(|(&t, w)| w * (t * k as u64).max(acc))
            .sum();
        if lb > &self.best_w * BigUint::from(k as u64) {
            Decision::Prune
        } else {
            Decision::Expand
        }
    }

    fn leaf(&mut self, _jobs: &SortedJobs, node: &SearchNode) {
        self.offer(&node.loads, || node.assign.clone());
    }
}

/// Minimizes `sum B^(m-i) C_i` exactly.
pub fn weighting_method(instance: Arc<Instance>, base: u64, limits: Limits) -> Result<WeightingOutcome, BaselineError> {
    if base == 0 {
        return Err(BaselineError::BadBase);
    }
    let jobs = SortedJobs::new(&instance);
    let budget = Budget::new(limits);
    let m = instance.m();
    let b = BigUint::from(base);
    let mut powers = vec![BigUint::from(1u32); m];
    for i in (0..m.saturating_sub(1)).rev() {
        powers[i] = &powers[i + 1] * &b;
    }
    let (chosen, loads) = jobs.lpt_completion(&jobs.root());
    let start = CompletionVector::from_loads(&loads);
    let mut visitor = WeightVisitor { powers, best_w: BigUint::zero(), best_vec: start.clone(), best_assign: chosen, tie: false };
    visitor.best_w = visitor.weight(&start);
    let outcome = dfs(&jobs, jobs.root(), &budget, &mut visitor);
    let status = if outcome.completed { Status::Optimal } else { Status::Timeout };
    let lower_bound = visitor.best_vec.as_slice().iter().map(|&c| qi(c)).collect();
    let result = SolveResult {
        status,
        schedule: jobs.to_schedule(instance, &visitor.best_assign),
        nodes: budget.nodes(),
        lower_bound,
        elapsed: budget.elapsed(),
    };
    Ok(WeightingOutcome { result, weight: visitor.best_w, tie: visitor.tie })
}

/// Result of the highest-rank baseline.
#[derive(Debug, Clone)]
pub struct HighestRankOutcome {
    pub result: SolveResult,
    /// Makespan-optimal schedules kept in the pool.
    pub pool: Vec<Schedule>,
    /// More makespan-optimal schedules existed than the pool could hold.
    pub overflowed: bool,
    /// Enumeration stopped on a limit, so the answer may not be optimal.
    pub heuristic: bool,
}

struct PoolVisitor {
    makespan: u64,
    capacity: usize,
    pool: Vec<(CompletionVector, Vec<usize>)>,
    seen: u64,
}

impl PoolVisitor {
    fn insert(&mut self, v: CompletionVector, assign: Vec<usize>) {
        self.seen += 1;
        self.pool.push((v, assign));
        if self.pool.len() > self.capacity {
            let worst = (0..self.pool.len()).max_by(|&a, &b| self.pool[a].0.cmp(&self.pool[b].0)).unwrap();
            self.pool.swap_remove(worst);
        }
    }
}

impl Visitor for PoolVisitor {
    fn visit(&mut self, jobs: &SortedJobs, node: &SearchNode) -> Decision {
        let profile = NodeProfile::new(jobs, node);
        if profile.lower(1, &Q::zero()) > qi(self.makespan) {
            Decision::Prune
        } else {
            Decision::Expand
        }
    }

    fn leaf(&mut self, _jobs: &SortedJobs, node: &SearchNode) {
        let v = node.vector();
        if v.makespan() <= self.makespan {
            self.insert(v, node.assign.clone());
        }
    }
}

/// Collects makespan-optimal schedules into a pool of `capacity` (evicting
/// the lexicographically largest when full) and returns the lexicographic
/// minimum of the pool.
pub fn highest_rank(instance: Arc<Instance>, capacity: usize, limits: Limits) -> Result<HighestRankOutcome, BaselineError> {
    if capacity == 0 {
        return Err(BaselineError::ZeroCapacity);
    }
    let jobs = SortedJobs::new(&instance);
    let budget = Budget::new(limits);
    let (v1, first, completed) = constrained_in(&instance, &jobs, 1, &[], None, &budget)?;
    let mut visitor = PoolVisitor { makespan: v1, capacity, pool: Vec::new(), seen: 0 };
    let mut heuristic = !completed;
    if completed {
        let outcome = dfs(&jobs, jobs.root(), &budget, &mut visitor);
        heuristic = !outcome.completed;
    }
    if visitor.pool.is_empty() {
        let mut loads = vec![0u64; jobs.m];
        for (k, &i) in first.iter().enumerate() {
            loads[i] += jobs.p[k];
        }
        visitor.pool.push((CompletionVector::from_loads(&loads), first));
    }
    visitor.pool.sort_by(|a, b| a.0.cmp(&b.0));
    let (best_vec, best_assign) = visitor.pool[0].clone();
    let lower_bound = if heuristic {
        let mut lb = vec![Q::zero(); jobs.m];
        lb[0] = qi(v1);
        lb
    } else {
        best_vec.as_slice().iter().map(|&c| qi(c)).collect()
    };
    let pool = visitor.pool.iter().map(|(_, a)| jobs.to_schedule(instance.clone(), a)).collect();
    let result = SolveResult {
        status: if heuristic { Status::Timeout } else { Status::Optimal },
        schedule: jobs.to_schedule(instance, &best_assign),
        nodes: budget.nodes(),
        lower_bound,
        elapsed: budget.elapsed(),
    };
    Ok(HighestRankOutcome { result, pool, overflowed: visitor.seen > capacity as u64, heuristic })
}
