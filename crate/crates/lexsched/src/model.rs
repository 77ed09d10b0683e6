//! Instances, schedules, completion vectors and the LPT rule.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance needs at least one machine")]
    NoMachines,
    #[error("job id must not be empty")]
    EmptyJobId,
    #[error("duplicate job id {0:?}")]
    DuplicateJob(String),
    #[error("vectors have different lengths ({left} and {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("weight base must be at least 1")]
    BadBase,
    #[error("{m}^{n} assignments exceed the enumeration cap {cap}")]
    EnumerationCap { m: usize, n: usize, cap: u64 },
    #[error("invalid schedule: {}", format_violations(.0))]
    InvalidSchedule(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A constraint violation found while checking an assignment map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Unassigned(String),
    AssignedTwice(String),
    UnknownJob(String),
    MachineOutOfRange { job: String, machine: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unassigned(j) => write!(f, "job {j} is not assigned"),
            Violation::AssignedTwice(j) => write!(f, "job {j} is assigned more than once"),
            Violation::UnknownJob(j) => write!(f, "job {j} is not part of the instance"),
            Violation::MachineOutOfRange { job, machine } => {
                write!(f, "job {job} is assigned to machine {machine}, which does not exist")
            }
        }
    }
}

impl Violation {
    pub fn job(&self) -> &str {
        match self {
            Violation::Unassigned(j)
            | Violation::AssignedTwice(j)
            | Violation::UnknownJob(j)
            | Violation::MachineOutOfRange { job: j, .. } => j,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    pub p: u64,
}

impl Job {
    pub fn new(id: impl Into<String>, p: u64) -> Self {
        Job { id: id.into(), p }
    }
}

#[derive(Deserialize)]
struct RawInstance {
    m: usize,
    jobs: Vec<Job>,
}

/// `m` identical machines and a list of jobs with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    m: usize,
    jobs: Vec<Job>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = ModelError;
    fn try_from(raw: RawInstance) -> Result<Self, ModelError> {
        Instance::new(raw.m, raw.jobs)
    }
}

impl Instance {
    pub fn new(m: usize, jobs: Vec<Job>) -> Result<Self, ModelError> {
        if m == 0 {
            return Err(ModelError::NoMachines);
        }
        let mut seen = HashSet::with_capacity(jobs.len());
        for job in &jobs {
            if job.id.is_empty() {
                return Err(ModelError::EmptyJobId);
            }
            if !seen.insert(job.id.as_str()) {
                return Err(ModelError::DuplicateJob(job.id.clone()));
            }
        }
        Ok(Instance { m, jobs })
    }

    /// Jobs named `J1..Jn` with the given processing times.
    pub fn from_times(m: usize, times: &[u64]) -> Result<Self, ModelError> {
        let jobs = times
            .iter()
            .enumerate()
            .map(|(i, &p)| Job::new(format!("J{}", i + 1), p))
            .collect();
        Instance::new(m, jobs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn times(&self) -> Vec<u64> {
        self.jobs.iter().map(|j| j.p).collect()
    }

    pub fn total_processing(&self) -> u64 {
        self.jobs.iter().map(|j| j.p).sum()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }
}

/// Machine loads sorted in nonincreasing order. Derived ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompletionVector(Vec<u64>);

impl CompletionVector {
    pub fn from_loads(loads: &[u64]) -> Self {
        let mut v = loads.to_vec();
        v.sort_unstable_by(|a, b| b.cmp(a));
        CompletionVector(v)
    }

    /// Wraps values that are already sorted nonincreasingly.
    pub fn from_sorted(values: Vec<u64>) -> Option<Self> {
        if values.windows(2).all(|w| w[0] >= w[1]) {
            Some(CompletionVector(values))
        } else {
            None
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn makespan(&self) -> u64 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for CompletionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn lex_compare(a: &CompletionVector, b: &CompletionVector) -> Result<Ordering, ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.cmp(b))
}

/// `sum_i B^(m-i) c_i`, evaluated exactly.
pub fn weighted_value(v: &CompletionVector, base: u64) -> Result<BigUint, ModelError> {
    if base == 0 {
        return Err(ModelError::BadBase);
    }
    let b = BigUint::from(base);
    let mut acc = BigUint::from(0u32);
    for &c in v.as_slice() {
        acc = acc * &b + BigUint::from(c);
    }
    Ok(acc)
}

/// Assignment of every job of an instance to a machine (0-based internally).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    instance: Arc<Instance>,
    machine_of: Vec<usize>,
}

impl Schedule {
    pub fn new(instance: Arc<Instance>, machine_of: Vec<usize>) -> Result<Self, ModelError> {
        let mut violations = Vec::new();
        if machine_of.len() != instance.n() {
            return Err(ModelError::DimensionMismatch { left: machine_of.len(), right: instance.n() });
        }
        for (j, &i) in machine_of.iter().enumerate() {
            if i >= instance.m() {
                violations.push(Violation::MachineOutOfRange {
                    job: instance.jobs()[j].id.clone(),
                    machine: i + 1,
                });
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::InvalidSchedule(violations));
        }
        Ok(Schedule { instance, machine_of })
    }

    /// Builds a schedule from `(job id, 1-based machine)` pairs.
    pub fn from_entries(instance: Arc<Instance>, entries: &[(String, usize)]) -> Result<Self, ModelError> {
        validate_schedule(&instance, entries).map_err(ModelError::InvalidSchedule)?;
        let mut machine_of = vec![0; instance.n()];
        for (id, machine) in entries {
            let j = instance.index_of(id).expect("validated");
            machine_of[j] = machine - 1;
        }
        Ok(Schedule { instance, machine_of })
    }

    pub fn instance(&self) -> &Arc<Instance> {
        &self.instance
    }

    pub fn machine_of(&self) -> &[usize] {
        &self.machine_of
    }

    pub fn loads(&self) -> Vec<u64> {
        let mut loads = vec![0u64; self.instance.m()];
        for (job, &i) in self.instance.jobs().iter().zip(&self.machine_of) {
            loads[i] += job.p;
        }
        loads
    }

    pub fn completion_vector(&self) -> CompletionVector {
        CompletionVector::from_loads(&self.loads())
    }

    pub fn makespan(&self) -> u64 {
        self.loads().into_iter().max().unwrap_or(0)
    }

    /// Job id to 1-based machine number.
    pub fn to_map(&self) -> BTreeMap<String, usize> {
        self.instance
            .jobs()
            .iter()
            .zip(&self.machine_of)
            .map(|(job, &i)| (job.id.clone(), i + 1))
            .collect()
    }

    pub fn to_doc(&self) -> ScheduleDoc {
        ScheduleDoc {
            instance: Some(InstanceRef::Inline((*self.instance).clone())),
            assignment: Assignment(self.to_map().into_iter().collect()),
        }
    }
}

/// Checks a list of `(job id, 1-based machine)` pairs against an instance.
pub fn validate_schedule(instance: &Instance, entries: &[(String, usize)]) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for (id, machine) in entries {
        if instance.index_of(id).is_none() {
            violations.push(Violation::UnknownJob(id.clone()));
            continue;
        }
        if !seen.insert(id.as_str()) {
            violations.push(Violation::AssignedTwice(id.clone()));
        }
        if *machine == 0 || *machine > instance.m() {
            violations.push(Violation::MachineOutOfRange { job: id.clone(), machine: *machine });
        }
    }
    for job in instance.jobs() {
        if !seen.contains(job.id.as_str()) {
            violations.push(Violation::Unassigned(job.id.clone()));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Assignment map as ordered `(job id, machine)` pairs; keeps duplicate keys
/// so they can be reported instead of silently overwritten.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(pub Vec<(String, usize)>);

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;
        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Assignment;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from job id to machine number")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Assignment, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, usize>()? {
                    out.push((k, v));
                }
                Ok(Assignment(out))
            }
        }
        deserializer.deserialize_map(EntriesVisitor)
    }
}

/// An instance given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceRef {
    Inline(Instance),
    Path(String),
}

/// On-disk form of a schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceRef>,
    pub assignment: Assignment,
}

/// Places `times`, in the given order, each on the currently least loaded
/// machine (lowest index on ties). Returns the chosen machines and final loads.
pub fn lpt_extend(loads: &[u64], times: &[u64]) -> (Vec<usize>, Vec<u64>) {
    let mut loads = loads.to_vec();
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        loads.iter().enumerate().map(|(i, &l)| Reverse((l, i))).collect();
    let mut chosen = Vec::with_capacity(times.len());
    for &p in times {
        let Reverse((l, i)) = heap.pop().expect("at least one machine");
        loads[i] = l + p;
        chosen.push(i);
        heap.push(Reverse((l + p, i)));
    }
    (chosen, loads)
}

/// Job indices sorted by nonincreasing processing time, ties by input order.
pub fn lpt_order(instance: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by_key(|&j| Reverse(instance.jobs()[j].p));
    order
}

/// The LPT schedule of the whole instance.
pub fn lpt(instance: Arc<Instance>) -> Schedule {
    let order = lpt_order(&instance);
    let times: Vec<u64> = order.iter().map(|&j| instance.jobs()[j].p).collect();
    let (chosen, _) = lpt_extend(&vec![0; instance.m()], &times);
    let mut machine_of = vec![0; instance.n()];
    for (k, &j) in order.iter().enumerate() {
        machine_of[j] = chosen[k];
    }
    Schedule { instance, machine_of }
}

/// Enumerates every assignment and returns a lexicographically optimal
/// schedule; ties go to the assignment whose machine list (in job order)
/// is lexicographically smallest.
pub fn brute_force_lexopt(instance: Arc<Instance>, cap: u64) -> Result<Schedule, ModelError> {
    let m = instance.m();
    let n = instance.n();
    let total = (m as u64).checked_pow(n as u32);
    match total {
        Some(t) if t <= cap => {}
        _ => return Err(ModelError::EnumerationCap { m, n, cap }),
    }
    let times = instance.times();
    let mut digits = vec![0usize; n];
    let mut loads = vec![0u64; m];
    loads[0] = times.iter().sum();
    let mut best_vec = CompletionVector::from_loads(&loads);
    let mut best = digits.clone();
    loop {
        // odometer step, last job varies fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(Schedule { instance, machine_of: best });
            }
            k -= 1;
            loads[digits[k]] -= times[k];
            if digits[k] + 1 < m {
                digits[k] += 1;
                loads[digits[k]] += times[k];
                break;
            }
            digits[k] = 0;
            loads[0] += times[k];
        }
        let v = CompletionVector::from_loads(&loads);
        if v < best_vec {
            best_vec = v;
            best.copy_from_slice(&digits);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_vector_sorts() {
        let s = Schedule::new(Arc::new(Instance::from_times(3, &[3, 2, 1]).unwrap()), vec![0, 1, 1]).unwrap();
        assert_eq!(s.completion_vector().as_slice(), &[3, 3, 0]);
    }

    #[test]
    fn lex_compare_examples() {
        let a = CompletionVector::from_loads(&[3, 3]);
        let b = CompletionVector::from_loads(&[4, 2]);
        assert_eq!(lex_compare(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&a, &a).unwrap(), Ordering::Equal);
        let c = CompletionVector::from_loads(&[1, 1, 1]);
        assert!(matches!(lex_compare(&a, &c), Err(ModelError::DimensionMismatch { .. })));
    }

    #[test]
    fn weighted_values() {
        let v = |x: &[u64]| CompletionVector::from_loads(x);
        assert_eq!(weighted_value(&v(&[3, 3]), 2).unwrap(), BigUint::from(9u32));
        assert_eq!(weighted_value(&v(&[5, 5, 0]), 2).unwrap(), weighted_value(&v(&[6, 2, 2]), 2).unwrap());
        assert_eq!(weighted_value(&v(&[]), 2).unwrap(), BigUint::from(0u32));
        assert_eq!(weighted_value(&v(&[7, 1]), 0), Err(ModelError::BadBase));
    }

    #[test]
    fn instance_validation() {
        assert_eq!(Instance::from_times(0, &[1]), Err(ModelError::NoMachines));
        let dup = Instance::new(2, vec![Job::new("a", 1), Job::new("a", 2)]);
        assert_eq!(dup, Err(ModelError::DuplicateJob("a".into())));
        let json = r#"{"m": 2, "jobs": [{"id": "x", "p": 3}, {"id": "y", "p": 0}]}"#;
        let inst: Instance = serde_json::from_str(json).unwrap();
        assert_eq!(inst.total_processing(), 3);
        assert!(serde_json::from_str::<Instance>(r#"{"m": 0, "jobs": []}"#).is_err());
    }

    #[test]
    fn schedule_violations_name_jobs() {
        let inst = Instance::from_times(2, &[1, 2, 3]).unwrap();
        let doc: ScheduleDoc =
            serde_json::from_str(r#"{"assignment": {"J1": 1, "J1": 2, "J2": 3, "J9": 1}}"#).unwrap();
        let errs = validate_schedule(&inst, &doc.assignment.0).unwrap_err();
        let jobs: Vec<&str> = errs.iter().map(|e| e.job()).collect();
        assert!(errs.contains(&Violation::AssignedTwice("J1".into())));
        assert!(errs.contains(&Violation::MachineOutOfRange { job: "J2".into(), machine: 3 }));
        assert!(errs.contains(&Violation::UnknownJob("J9".into())));
        assert!(errs.contains(&Violation::Unassigned("J3".into())));
        assert!(jobs.contains(&"J3"));
    }

    #[test]
    fn lpt_examples() {
        let s = lpt(Arc::new(Instance::from_times(2, &[3, 3, 2, 2, 2]).unwrap()));
        assert_eq!(s.completion_vector().as_slice(), &[7, 5]);
        let (chosen, loads) = lpt_extend(&[0, 0, 0], &[]);
        assert!(chosen.is_empty());
        assert_eq!(loads, vec![0, 0, 0]);
        let (chosen, _) = lpt_extend(&[4, 1, 1], &[2]);
        assert_eq!(chosen, vec![1]);
    }

    #[test]
    fn brute_force_examples() {
        let s = brute_force_lexopt(Arc::new(Instance::from_times(2, &[3, 2, 1]).unwrap()), 1 << 20).unwrap();
        assert_eq!(s.completion_vector().as_slice(), &[3, 3]);
        assert_eq!(s.machine_of(), &[0, 1, 1]);
        let s = brute_force_lexopt(Arc::new(Instance::from_times(3, &[4, 4, 4]).unwrap()), 1 << 20).unwrap();
        assert_eq!(s.completion_vector().as_slice(), &[4, 4, 4]);
        let empty = brute_force_lexopt(Arc::new(Instance::from_times(2, &[]).unwrap()), 1).unwrap();
        assert_eq!(empty.completion_vector().as_slice(), &[0, 0]);
        let big = brute_force_lexopt(Arc::new(Instance::from_times(3, &[1; 30]).unwrap()), 1 << 20);
        assert!(matches!(big, Err(ModelError::EnumerationCap { .. })));
    }
}
