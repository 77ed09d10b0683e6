//! Two-stage rescheduling after the instance changes.
//!
//! A scenario holds the initial instance and schedule plus an ordered list
//! of perturbations. Jobs keep their ids across the change; machines keep a
//! stable identity too, so a failure at live position `i` removes that
//! machine and every later machine moves up one position. Activated machines
//! are appended.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::min_makespan;
use crate::model::{lpt_extend, Instance, InstanceRef, Job, ModelError, Schedule, ScheduleDoc};
use crate::rational::{qi, Q};
use crate::search::{Budget, Limits, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    Reduce { job: String, p: u64 },
    Augment { job: String, p: u64 },
    Cancel { job: String },
    Arrive { job: String, p: u64 },
    /// 1-based position among the machines alive at this point.
    MachineFail { machine: usize },
    MachineActivate,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RecoveryError {
    #[error("perturbation {index}: job {job:?} does not exist")]
    UnknownJob { index: usize, job: String },
    #[error("perturbation {index}: job id {job:?} is already in use")]
    DuplicateJob { index: usize, job: String },
    #[error("perturbation {index}: job {job:?} cannot go from {old} to {new}")]
    BadTime { index: usize, job: String, old: u64, new: u64 },
    #[error("perturbation {index}: machine {machine} does not exist ({live} machines alive)")]
    UnknownMachine { index: usize, machine: usize, live: usize },
    #[error("initial schedule does not belong to the initial instance")]
    ScheduleMismatch,
    #[error("no machines are left for {jobs} jobs")]
    NoMachines { jobs: usize },
    #[error("boundary f must be at least 1")]
    BadBoundary,
    #[error("the guarantee is undefined when k_r = {k_r} is not below m = {m}")]
    Undefined { k_r: usize, m: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where a job of the perturbed instance comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Index into the initial instance's jobs.
    Initial(usize),
    Arrived,
}

/// Initial data, perturbations, and the resulting instance.
#[derive(Debug, Clone)]
pub struct RecoveryScenario {
    init: Arc<Instance>,
    init_schedule: Schedule,
    perturbations: Vec<Perturbation>,
    new_m: usize,
    new_jobs: Vec<(Job, Origin)>,
    /// Initial machine index of each live machine; `None` for activated ones.
    machine_origin: Vec<Option<usize>>,
    new_instance: Option<Arc<Instance>>,
}

/// On-disk form of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub init: Instance,
    pub init_schedule: ScheduleDoc,
    #[serde(default)]
    pub perturbations: Vec<Perturbation>,
}

impl RecoveryScenario {
    pub fn from_doc(doc: ScenarioDoc) -> Result<Self, RecoveryError> {
        let init = Arc::new(doc.init);
        if let Some(InstanceRef::Inline(inst)) = &doc.init_schedule.instance {
            if *inst != *init {
                return Err(RecoveryError::ScheduleMismatch);
            }
        }
        let schedule = Schedule::from_entries(init.clone(), &doc.init_schedule.assignment.0)?;
        apply_perturbations(init, schedule, doc.perturbations)
    }

    pub fn to_doc(&self) -> ScenarioDoc {
        let mut sched = self.init_schedule.to_doc();
        sched.instance = None;
        ScenarioDoc { init: (*self.init).clone(), init_schedule: sched, perturbations: self.perturbations.clone() }
    }

    pub fn init(&self) -> &Arc<Instance> {
        &self.init
    }

    pub fn init_schedule(&self) -> &Schedule {
        &self.init_schedule
    }

    pub fn perturbations(&self) -> &[Perturbation] {
        &self.perturbations
    }

    /// Machines alive after all perturbations.
    pub fn new_m(&self) -> usize {
        self.new_m
    }

    pub fn new_jobs(&self) -> &[(Job, Origin)] {
        &self.new_jobs
    }

    pub fn machine_origin(&self) -> &[Option<usize>] {
        &self.machine_origin
    }

    /// The perturbed instance; an error when every machine failed.
    pub fn new_instance(&self) -> Result<Arc<Instance>, RecoveryError> {
        self.new_instance.clone().ok_or(RecoveryError::NoMachines { jobs: self.new_jobs.len() })
    }
}

/// Applies `perturbations` in order to `init` and its schedule.
pub fn apply_perturbations(
    init: Arc<Instance>,
    init_schedule: Schedule,
    perturbations: Vec<Perturbation>,
) -> Result<RecoveryScenario, RecoveryError> {
    if !Arc::ptr_eq(init_schedule.instance(), &init) && **init_schedule.instance() != *init {
        return Err(RecoveryError::ScheduleMismatch);
    }
    let mut jobs: Vec<(Job, Origin)> =
        init.jobs().iter().enumerate().map(|(j, job)| (job.clone(), Origin::Initial(j))).collect();
    let mut machines: Vec<Option<usize>> = (0..init.m()).map(Some).collect();
    let find = |jobs: &[(Job, Origin)], id: &str| jobs.iter().position(|(j, _)| j.id == id);
    for (index, pert) in perturbations.iter().enumerate() {
        match pert {
            Perturbation::Reduce { job, p } | Perturbation::Augment { job, p } => {
                let k = find(&jobs, job).ok_or_else(|| RecoveryError::UnknownJob { index, job: job.clone() })?;
                let old = jobs[k].0.p;
                let ok = match pert {
                    Perturbation::Reduce { .. } => *p >= 1 && *p < old,
                    _ => *p > old,
                };
                if !ok {
                    return Err(RecoveryError::BadTime { index, job: job.clone(), old, new: *p });
                }
                jobs[k].0.p = *p;
            }
            Perturbation::Cancel { job } => {
                let k = find(&jobs, job).ok_or_else(|| RecoveryError::UnknownJob { index, job: job.clone() })?;
                jobs.remove(k);
            }
            Perturbation::Arrive { job, p } => {
                if job.is_empty() || find(&jobs, job).is_some() || init.index_of(job).is_some() {
                    return Err(RecoveryError::DuplicateJob { index, job: job.clone() });
                }
                jobs.push((Job::new(job.clone(), *p), Origin::Arrived));
            }
            Perturbation::MachineFail { machine } => {
                if *machine == 0 || *machine > machines.len() {
                    return Err(RecoveryError::UnknownMachine { index, machine: *machine, live: machines.len() });
                }
                machines.remove(machine - 1);
            }
            Perturbation::MachineActivate => machines.push(None),
        }
    }
    let new_m = machines.len();
    let new_instance = if new_m > 0 {
        Some(Arc::new(Instance::new(new_m, jobs.iter().map(|(j, _)| j.clone()).collect())?))
    } else {
        None
    };
    Ok(RecoveryScenario { init, init_schedule, perturbations, new_m, new_jobs: jobs, machine_origin: machines, new_instance })
}

/// Binding jobs with their (1-based) machine in the perturbed instance, and free jobs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecisionSplit {
    pub binding: BTreeMap<String, usize>,
    pub free: BTreeSet<String>,
}

/// Machine in the perturbed instance for each new job, `None` for free jobs.
fn binding_machines(scenario: &RecoveryScenario) -> Vec<Option<usize>> {
    let mut new_index = HashMap::new();
    for (pos, origin) in scenario.machine_origin.iter().enumerate() {
        if let Some(i) = origin {
            new_index.insert(*i, pos);
        }
    }
    scenario
        .new_jobs
        .iter()
        .map(|(_, origin)| match origin {
            Origin::Initial(j) => new_index.get(&scenario.init_schedule.machine_of()[*j]).copied(),
            Origin::Arrived => None,
        })
        .collect()
}

pub fn classify_decisions(scenario: &RecoveryScenario) -> DecisionSplit {
    let mut split = DecisionSplit::default();
    for ((job, _), home) in scenario.new_jobs.iter().zip(binding_machines(scenario)) {
        match home {
            Some(i) => {
                split.binding.insert(job.id.clone(), i + 1);
            }
            None => {
                split.free.insert(job.id.clone());
            }
        }
    }
    split
}

/// Keeps every binding decision and places free jobs with LPT.
pub fn binding_recovery(scenario: &RecoveryScenario) -> Result<Schedule, RecoveryError> {
    let inst = scenario.new_instance()?;
    let homes = binding_machines(scenario);
    let mut loads = vec![0u64; inst.m()];
    let mut machine_of = vec![0usize; inst.n()];
    let mut free = Vec::new();
    for (j, home) in homes.iter().enumerate() {
        match home {
            Some(i) => {
                loads[*i] += inst.jobs()[j].p;
                machine_of[j] = *i;
            }
            None => free.push(j),
        }
    }
    free.sort_by_key(|&j| std::cmp::Reverse(inst.jobs()[j].p));
    let times: Vec<u64> = free.iter().map(|&j| inst.jobs()[j].p).collect();
    let (chosen, _) = lpt_extend(&loads, &times);
    for (&j, &i) in free.iter().zip(&chosen) {
        machine_of[j] = i;
    }
    Ok(Schedule::new(inst, machine_of)?)
}

#[derive(Debug, Clone)]
pub struct FlexibleOutcome {
    pub schedule: Schedule,
    pub status: Status,
    pub nodes: u64,
    /// Binding jobs moved away from their machine.
    pub migrations: usize,
}

/// Minimum makespan when at most `g` binding jobs may leave their machine.
pub fn flexible_recovery(scenario: &RecoveryScenario, g: usize, limits: Limits) -> Result<FlexibleOutcome, RecoveryError> {
    let homes = binding_machines(scenario);
    let bound = homes.iter().filter(|h| h.is_some()).count();
    if g >= bound {
        // the budget does not restrict anything
        let inst = scenario.new_instance()?;
        let r = min_makespan(inst, limits);
        let migrations = homes.iter().zip(r.schedule.machine_of()).filter(|(h, &i)| matches!(h, Some(x) if *x != i)).count();
        return Ok(FlexibleOutcome { schedule: r.schedule, status: r.status, nodes: r.nodes, migrations });
    }
    flexible_search(scenario, g, limits)
}

struct FlexSearch<'a> {
    p: &'a [u64],
    /// Items in decision order: free jobs then binding jobs.
    items: Vec<usize>,
    free_count: usize,
    homes: &'a [Option<usize>],
    m: usize,
    g: usize,
    total: u64,
    /// Undecided binding jobs per home machine, largest first.
    pending: Vec<Vec<u64>>,
    loads: Vec<u64>,
    assign: Vec<usize>,
    best: u64,
    best_assign: Vec<usize>,
    budget: Budget,
}

impl FlexSearch<'_> {
    fn lower_bound(&self, depth: usize, used: usize) -> u64 {
        let m = self.m as u64;
        let mut lb = self.total.div_ceil(m);
        let r = self.g - used;
        for i in 0..self.m {
            let relief: u64 = self.pending[i].iter().take(r).sum();
            lb = lb.max(self.loads[i] - relief);
        }
        if depth < self.free_count {
            lb = lb.max(self.p[self.items[depth]]);
        }
        lb
    }

    /// Positions worth trying for a job: one per load among machines
    /// without undecided binding jobs, every other machine individually.
    fn targets(&self, skip: Option<usize>) -> Vec<usize> {
        let mut seen_loads = Vec::new();
        let mut out = Vec::new();
        let mut order: Vec<usize> = (0..self.m).collect();
        order.sort_by_key(|&i| (self.loads[i], i));
        for i in order {
            if Some(i) == skip {
                continue;
            }
            if self.pending[i].is_empty() {
                if seen_loads.contains(&self.loads[i]) {
                    continue;
                }
                seen_loads.push(self.loads[i]);
            }
            out.push(i);
        }
        out
    }

    fn run(&mut self, depth: usize, used: usize) -> bool {
        if !self.budget.charge(1) {
            return false;
        }
        if depth == self.items.len() {
            let mk = self.loads.iter().copied().max().unwrap_or(0);
            if mk < self.best {
                self.best = mk;
                self.best_assign = self.assign.clone();
            }
            return true;
        }
        if self.lower_bound(depth, used) >= self.best {
            return true;
        }
        let j = self.items[depth];
        let p = self.p[j];
        if depth < self.free_count {
            for i in self.targets(None) {
                self.loads[i] += p;
                self.assign[j] = i;
                let ok = self.run(depth + 1, used);
                self.loads[i] -= p;
                if !ok {
                    return false;
                }
            }
            return true;
        }
        let home = self.homes[j].expect("binding job");
        let pos = self.pending[home].iter().position(|&x| x == p).expect("pending job");
        self.pending[home].remove(pos);
        // stay first
        self.assign[j] = home;
        let mut ok = self.run(depth + 1, used);
        if ok && used < self.g {
            for i in self.targets(Some(home)) {
                self.loads[home] -= p;
                self.loads[i] += p;
                self.assign[j] = i;
                ok = self.run(depth + 1, used + 1);
                self.loads[i] -= p;
                self.loads[home] += p;
                if !ok {
                    break;
                }
            }
        }
        self.assign[j] = home;
        self.pending[home].insert(pos, p);
        ok
    }
}

/// Exact search over free placements and at most `g` migrations, seeded
/// with binding recovery. Used directly by tests for budgets that do not
/// cover every binding job.
pub fn flexible_search(scenario: &RecoveryScenario, g: usize, limits: Limits) -> Result<FlexibleOutcome, RecoveryError> {
    let inst = scenario.new_instance()?;
    let seed = binding_recovery(scenario)?;
    let homes = binding_machines(scenario);
    let p = inst.times();
    let m = inst.m();
    let mut free: Vec<usize> = (0..inst.n()).filter(|&j| homes[j].is_none()).collect();
    let mut bound: Vec<usize> = (0..inst.n()).filter(|&j| homes[j].is_some()).collect();
    free.sort_by_key(|&j| std::cmp::Reverse(p[j]));
    bound.sort_by_key(|&j| std::cmp::Reverse(p[j]));
    let mut loads = vec![0u64; m];
    let mut pending = vec![Vec::new(); m];
    let mut assign = vec![0usize; inst.n()];
    for &j in &bound {
        let h = homes[j].unwrap();
        loads[h] += p[j];
        pending[h].push(p[j]);
        assign[j] = h;
    }
    let free_count = free.len();
    let mut items = free;
    items.extend(bound);
    let mut search = FlexSearch {
        p: &p,
        items,
        free_count,
        homes: &homes,
        m,
        g,
        total: inst.total_processing(),
        pending,
        loads,
        assign,
        best: seed.makespan(),
        best_assign: seed.machine_of().to_vec(),
        budget: Budget::new(limits),
    };
    let completed = search.run(0, 0);
    let migrations = homes.iter().zip(&search.best_assign).filter(|(h, &i)| matches!(h, Some(x) if *x != i)).count();
    Ok(FlexibleOutcome {
        schedule: Schedule::new(inst, search.best_assign)?,
        status: if completed { Status::Optimal } else { Status::Timeout },
        nodes: search.budget.nodes(),
        migrations,
    })
}

/// How far a scenario strays from its initial instance for a boundary `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertaintyCharacterization {
    #[serde(with = "crate::rational::serde_q")]
    pub f: Q,
    pub k: usize,
    /// Unstable reductions, cancellations included.
    pub k_r: usize,
    /// Unstable augmentations, arrivals included.
    pub k_a: usize,
    /// `f` when some stable job got shorter, 1 otherwise.
    #[serde(with = "crate::rational::serde_q")]
    pub f_r: Q,
    /// `f` when some stable job got longer, 1 otherwise.
    #[serde(with = "crate::rational::serde_q")]
    pub f_a: Q,
    pub delta: i64,
    pub delta_plus: u64,
    /// Largest processing time in the perturbed instance.
    pub max_p: u64,
    pub m: usize,
    pub unstable: Vec<String>,
    /// `k >= m`, outside the range the guarantee is stated for.
    pub k_ge_m: bool,
}

pub fn characterize_uncertainty(scenario: &RecoveryScenario, f: Q) -> Result<UncertaintyCharacterization, RecoveryError> {
    if f < Q::one() {
        return Err(RecoveryError::BadBoundary);
    }
    let init = &scenario.init;
    let mut new_p: HashMap<&str, u64> = HashMap::new();
    for (job, _) in &scenario.new_jobs {
        new_p.insert(job.id.as_str(), job.p);
    }
    let mut k_r = 0;
    let mut k_a = 0;
    let mut stable_red = false;
    let mut stable_aug = false;
    let mut unstable = Vec::new();
    for job in init.jobs() {
        match new_p.get(job.id.as_str()) {
            None => {
                k_r += 1;
                unstable.push(job.id.clone());
            }
            Some(&ph) => {
                let (p, ph_q) = (qi(job.p), qi(ph));
                if ph_q * f < p {
                    k_r += 1;
                    unstable.push(job.id.clone());
                } else if ph_q > p * f {
                    k_a += 1;
                    unstable.push(job.id.clone());
                } else if ph < job.p {
                    stable_red = true;
                } else if ph > job.p {
                    stable_aug = true;
                }
            }
        }
    }
    for (job, origin) in &scenario.new_jobs {
        if *origin == Origin::Arrived {
            k_a += 1;
            unstable.push(job.id.clone());
        }
    }
    let k = k_r + k_a;
    let delta = scenario.new_m as i64 - init.m() as i64;
    Ok(UncertaintyCharacterization {
        f,
        k,
        k_r,
        k_a,
        f_r: if stable_red { f } else { Q::one() },
        f_a: if stable_aug { f } else { Q::one() },
        delta,
        delta_plus: delta.max(0) as u64,
        max_p: scenario.new_jobs.iter().map(|(j, _)| j.p).max().unwrap_or(0),
        m: init.m(),
        unstable,
        k_ge_m: k >= init.m(),
    })
}

/// Smallest boundary that leaves at most the `k` largest deviations unstable
/// (cancellations and arrivals are always unstable). Never below 1.
pub fn tightest_boundary(scenario: &RecoveryScenario, k: usize) -> Q {
    let mut finite = Vec::new();
    let mut infinite = 0usize;
    let new_p: HashMap<&str, u64> = scenario.new_jobs.iter().map(|(j, _)| (j.id.as_str(), j.p)).collect();
    for job in scenario.init.jobs() {
        match new_p.get(job.id.as_str()) {
            None => infinite += 1,
            Some(&ph) if ph == 0 || job.p == 0 => {
                if ph != job.p {
                    infinite += 1
                }
            }
            Some(&ph) => {
                let r = Q::new(ph as i128, job.p as i128);
                finite.push(if r < Q::one() { r.recip() } else { r });
            }
        }
    }
    infinite += scenario.new_jobs.iter().filter(|(_, o)| *o == Origin::Arrived).count();
    finite.sort_by(|a, b| b.cmp(a));
    let skip = k.saturating_sub(infinite);
    finite.get(skip).copied().unwrap_or_else(Q::one).max(Q::one())
}

/// Per-type guarantees and their product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    #[serde(with = "crate::rational::serde_q")]
    pub reduction: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub augmentation: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub activation: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub combined: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub product: Q,
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub fn guarantee_bound(ch: &UncertaintyCharacterization, m: usize) -> Result<GuaranteeReport, RecoveryError> {
    if ch.k_r >= m {
        return Err(RecoveryError::Undefined { k_r: ch.k_r, m });
    }
    let mq = m as u64;
    let reduction = Q::from_integer(2) * ch.f_r * qi(1 + ceil_div(ch.k_r as u64, mq - ch.k_r as u64));
    let augmentation = ch.f_a + qi(ch.k_a as u64);
    let activation = qi(1 + ceil_div(ch.delta_plus, mq));
    let product = reduction * augmentation * activation;
    let combined = product.max(Q::from_integer(2));
    Ok(GuaranteeReport { reduction, augmentation, activation, combined, product })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeCheck {
    pub ratio: Q,
    pub bound: Q,
    pub holds: bool,
    /// The optimum is zero while the recovered makespan is not.
    pub degenerate: bool,
    pub characterization: UncertaintyCharacterization,
}

/// Compares a recovered schedule's makespan with the optimum and the
/// guarantee for boundary `f`.
pub fn verify_guarantee(
    scenario: &RecoveryScenario,
    recovered: &Schedule,
    optimal_makespan: u64,
    f: Q,
) -> Result<GuaranteeCheck, RecoveryError> {
    let ch = characterize_uncertainty(scenario, f)?;
    let bound = guarantee_bound(&ch, scenario.init.m())?.product;
    let mk = recovered.makespan();
    let (ratio, degenerate) = match (mk, optimal_makespan) {
        (0, 0) => (Q::one(), false),
        (x, 0) => (qi(x), true),
        (x, o) => (Q::new(x as i128, o as i128), false),
    };
    let holds = !degenerate && ratio <= bound;
    Ok(GuaranteeCheck { ratio, bound, holds, degenerate, characterization: ch })
}

/// Boundary among the candidates from [`tightest_boundary`] with the smallest
/// defined guarantee, with that guarantee.
pub fn best_boundary(scenario: &RecoveryScenario) -> Option<(Q, GuaranteeReport)> {
    let m = scenario.init.m();
    let mut best: Option<(Q, GuaranteeReport)> = None;
    for k in 0..=scenario.init.n() + scenario.new_jobs.len() {
        let f = tightest_boundary(scenario, k);
        let Ok(ch) = characterize_uncertainty(scenario, f) else { continue };
        let Ok(g) = guarantee_bound(&ch, m) else { continue };
        if best.as_ref().is_none_or(|(_, b)| g.product < b.product) {
            best = Some((f, g));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Binding,
    Flexible,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "binding" => Ok(Strategy::Binding),
            "flexible" => Ok(Strategy::Flexible),
            _ => Err(format!("unknown strategy {s:?}")),
        }
    }
}

/// Recovered schedule measured against the perturbed optimum and the guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub strategy: Strategy,
    pub recovered: ScheduleDoc,
    pub makespan: u64,
    /// Best makespan known for the perturbed instance.
    pub optimum: u64,
    /// Whether `optimum` is proven optimal.
    pub optimum_exact: bool,
    #[serde(with = "crate::rational::serde_q")]
    pub ratio: Q,
    /// `None` when the guarantee is undefined for the chosen boundary.
    #[serde(default, with = "opt_q")]
    pub bound: Option<Q>,
    pub holds: Option<bool>,
    pub k: usize,
    pub delta: i64,
    #[serde(with = "crate::rational::serde_q")]
    pub f: Q,
    #[serde(default)]
    pub migrations: Option<usize>,
    pub status: Status,
}

mod opt_q {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        x.map(|v| crate::rational::exact_string(&v)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| crate::rational::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Runs one recovery strategy and checks the result. `f` defaults to the
/// boundary from [`best_boundary`], or 1 when no boundary gives a defined guarantee.
pub fn recovery_report(
    scenario: &RecoveryScenario,
    strategy: Strategy,
    g: usize,
    f: Option<Q>,
    limits: Limits,
) -> Result<RecoveryReport, RecoveryError> {
    let budget = Budget::new(limits);
    let (schedule, migrations, mut status) = match strategy {
        Strategy::Binding => (binding_recovery(scenario)?, None, Status::Optimal),
        Strategy::Flexible => {
            let out = flexible_recovery(scenario, g, budget.remaining())?;
            budget.charge(out.nodes);
            (out.schedule, Some(out.migrations), out.status)
        }
    };
    let opt = min_makespan(scenario.new_instance()?, budget.remaining());
    if opt.status != Status::Optimal {
        status = Status::Timeout;
    }
    let f = match f {
        Some(f) => f,
        None => best_boundary(scenario).map(|(f, _)| f).unwrap_or_else(Q::one),
    };
    let ch = characterize_uncertainty(scenario, f)?;
    let bound = guarantee_bound(&ch, scenario.init.m()).ok().map(|g| g.product);
    let mk = schedule.makespan();
    let ratio = match (mk, opt.value) {
        (0, 0) => Q::one(),
        (x, 0) => qi(x),
        (x, o) => Q::new(x as i128, o as i128),
    };
    let holds = bound.map(|b| (opt.value > 0 || mk == 0) && ratio <= b);
    let mut recovered = schedule.to_doc();
    recovered.instance = None;
    Ok(RecoveryReport {
        strategy,
        recovered,
        makespan: mk,
        optimum: opt.value,
        optimum_exact: opt.status == Status::Optimal,
        ratio,
        bound,
        holds,
        k: ch.k,
        delta: ch.delta,
        f,
        migrations,
        status,
    })
}
