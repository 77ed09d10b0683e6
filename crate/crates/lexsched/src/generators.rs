//! Seeded instance and perturbation generators, and scenario families with
//! known recovery ratios.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Job, ModelError, Schedule};
use crate::rational::Q;
use crate::recovery::{apply_perturbations, Perturbation, RecoveryError, RecoveryScenario};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("q must be at least 1")]
    BadQ,
    #[error("q is computed for degenerate instances and cannot be given")]
    QGiven,
    #[error("degenerate instances need at least two machines")]
    TooFewMachines,
    #[error("exponent {exponent} for m = {m}, n = {n} exceeds 31")]
    ExponentTooLarge { m: usize, n: usize, exponent: u32 },
    #[error("invalid fixture parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Dist {
    #[default]
    Uniform,
    Normal,
    SymmetricNormal,
}

impl std::str::FromStr for Dist {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Dist::Uniform),
            "normal" => Ok(Dist::Normal),
            "symmetric-normal" => Ok(Dist::SymmetricNormal),
            _ => Err(format!("unknown distribution {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GenKind {
    #[default]
    Wellformed,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(default)]
    pub kind: GenKind,
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub q: Option<u64>,
    #[serde(default)]
    pub dist: Dist,
    #[serde(default)]
    pub seed: u64,
}

/// Named grid: (name, machines, jobs, q).
pub type Grid = (&'static str, [usize; 4], [usize; 4], [u64; 2]);

/// Parameter grids of the well-formed benchmark families.
pub const WELLFORMED_GRIDS: [Grid; 3] = [
    ("moderate", [3, 4, 5, 6], [20, 30, 40, 50], [100, 1000]),
    ("intermediate", [10, 12, 14, 16], [100, 200, 300, 400], [10_000, 100_000]),
    ("hard", [10, 15, 20, 25], [200, 300, 400, 500], [10_000, 100_000]),
];

/// Standard normal draw by Box-Muller.
fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// One processing time with parameter `q`.
pub fn sample_time(dist: Dist, q: u64, rng: &mut ChaCha8Rng) -> u64 {
    let p = match dist {
        Dist::Uniform => return rng.gen_range(1..=q),
        Dist::Normal | Dist::SymmetricNormal => {
            let x = q as f64 + (q as f64 / 3.0) * std_normal(rng);
            let x = x.clamp(0.0, 2.0 * q as f64);
            let p = ((x + 0.5).floor() as u64).min(2 * q);
            if dist == Dist::SymmetricNormal {
                if p <= q {
                    q - p
                } else {
                    3 * q - p
                }
            } else {
                p
            }
        }
    };
    p.max(1)
}

fn draw_instance(m: usize, n: usize, q: u64, dist: Dist, seed: u64) -> Result<Instance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = (0..n).map(|j| Job::new(format!("J{}", j + 1), sample_time(dist, q, &mut rng))).collect();
    Ok(Instance::new(m, jobs)?)
}

pub fn gen_wellformed(spec: &GenSpec) -> Result<Instance, GenError> {
    let q = spec.q.ok_or(GenError::BadQ)?;
    if q == 0 {
        return Err(GenError::BadQ);
    }
    draw_instance(spec.m, spec.n, q, spec.dist, spec.seed)
}

/// Largest `e` with `2^(e (m-1)) <= m^n`, i.e. `floor(n log2(m) / (m-1))`, computed exactly.
pub fn degenerate_exponent(m: usize, n: usize) -> Result<u32, GenError> {
    if m < 2 {
        return Err(GenError::TooFewMachines);
    }
    let target = BigUint::from(m).pow(n as u32);
    let bits = target.bits();
    // 2^(e (m-1)) <= target  iff  e (m-1) <= bits - 1
    let e = (bits - 1) / (m as u64 - 1);
    Ok(e as u32)
}

pub fn gen_degenerate(m: usize, n: usize, dist: Dist, seed: u64) -> Result<Instance, GenError> {
    let e = degenerate_exponent(m, n)?;
    if e > 31 {
        return Err(GenError::ExponentTooLarge { m, n, exponent: e });
    }
    draw_instance(m, n, 1u64 << e, dist, seed)
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    match spec.kind {
        GenKind::Wellformed => gen_wellformed(spec),
        GenKind::Degenerate => {
            if spec.q.is_some() {
                return Err(GenError::QGiven);
            }
            gen_degenerate(spec.m, spec.n, spec.dist, spec.seed)
        }
    }
}

/// `ceil(0.2 n)`.
pub fn default_job_disturbances(n: usize) -> usize {
    n.div_ceil(5)
}

/// `ceil(0.2 m)`.
pub fn default_machine_disturbances(m: usize) -> usize {
    m.div_ceil(5)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PerturbSpec {
    #[serde(default)]
    pub seed: u64,
    /// Job disturbances; defaults to `ceil(0.2 n)`.
    #[serde(default)]
    pub dn: Option<usize>,
    /// Machine disturbances; defaults to `ceil(0.2 m)`.
    #[serde(default)]
    pub dm: Option<usize>,
    /// Time parameter for arrivals and augmentations; defaults to the largest processing time.
    #[serde(default)]
    pub q: Option<u64>,
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random job disturbances followed by machine disturbances. Each
/// disturbance draws from its own stream, so the list is stable when counts change.
pub fn gen_perturbations(inst: &Instance, spec: &PerturbSpec) -> Vec<Perturbation> {
    let dn = spec.dn.unwrap_or_else(|| default_job_disturbances(inst.n()));
    let dm = spec.dm.unwrap_or_else(|| default_machine_disturbances(inst.m()));
    let q = spec.q.unwrap_or_else(|| inst.jobs().iter().map(|j| j.p).max().unwrap_or(1)).max(1);
    let mut jobs: Vec<(String, u64)> = inst.jobs().iter().map(|j| (j.id.clone(), j.p)).collect();
    let mut live = inst.m();
    let mut next_id = 1usize;
    let mut out = Vec::with_capacity(dn + dm);
    for k in 0..dn {
        let mut rng = stream(spec.seed, k as u64);
        loop {
            let kind = rng.gen_range(0..4);
            if kind == 0 {
                while inst.index_of(&format!("A{next_id}")).is_some() {
                    next_id += 1;
                }
                let id = format!("A{next_id}");
                next_id += 1;
                let p = rng.gen_range(1..=q);
                jobs.push((id.clone(), p));
                out.push(Perturbation::Arrive { job: id, p });
                break;
            }
            if jobs.is_empty() {
                continue;
            }
            let j = rng.gen_range(0..jobs.len());
            let (id, p) = jobs[j].clone();
            match kind {
                1 => {
                    jobs.remove(j);
                    out.push(Perturbation::Cancel { job: id });
                    break;
                }
                2 if p < 2 * q => {
                    let np = rng.gen_range(p + 1..=2 * q);
                    jobs[j].1 = np;
                    out.push(Perturbation::Augment { job: id, p: np });
                    break;
                }
                3 if p >= 2 => {
                    let np = rng.gen_range(1..p);
                    jobs[j].1 = np;
                    out.push(Perturbation::Reduce { job: id, p: np });
                    break;
                }
                _ => continue,
            }
        }
    }
    for k in 0..dm {
        let mut rng = stream(spec.seed, (dn + k) as u64);
        if rng.gen_bool(0.5) && live > 1 {
            out.push(Perturbation::MachineFail { machine: rng.gen_range(1..=live) });
            live -= 1;
        } else {
            out.push(Perturbation::MachineActivate);
            live += 1;
        }
    }
    out
}

/// Scenario families whose binding-recovery ratio has a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Arbitrary optimal start: `k m` jobs of length `p` on one machine, one
    /// long job of length `k m p` on another, then the long job is cancelled.
    /// Ratio `m`.
    CancelLong,
    /// Lexicographic start with `m + 1` jobs of length `p`; the job alone on
    /// the last machine is cancelled. Ratio 2.
    SingleCancel,
    /// Lexicographic start with one job of length `m` and `m (m-1)` unit
    /// jobs; a job of length `m` arrives. Ratio `2m / (m+1)`.
    SingleArrival,
    /// `(m-k) m` jobs of length `f` and `k` jobs of length `m f`; the short
    /// jobs on machines `2..m-k` drop to 1 and the long jobs are cancelled.
    /// Ratio `m f / (f + m - k - 1)`.
    ReduceCancel,
    /// `m^2` unit jobs; on the first machine `k` jobs grow to `F` and the
    /// other `m - k` to `f`.
    Augment,
    /// `m (m+k)` unit jobs and `k` new machines. Ratio `(m+k) / m`.
    Activate,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown family {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct FixtureParams {
    pub m: usize,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub f: Option<u64>,
    #[serde(default, rename = "F")]
    pub big_f: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub scenario: RecoveryScenario,
    /// Binding-recovery makespan over the optimal makespan, as the family predicts.
    pub closed_form: Q,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, GenError> {
    v.ok_or_else(|| GenError::BadParams(format!("missing {name}")))
}

fn bad(msg: &str) -> GenError {
    GenError::BadParams(msg.to_string())
}

fn build(
    m: usize,
    jobs: Vec<(String, u64, usize)>,
    perturbations: Vec<Perturbation>,
) -> Result<RecoveryScenario, GenError> {
    let inst = Arc::new(Instance::new(m, jobs.iter().map(|(id, p, _)| Job::new(id.clone(), *p)).collect())?);
    let schedule = Schedule::new(inst.clone(), jobs.iter().map(|(_, _, i)| *i).collect())?;
    Ok(apply_perturbations(inst, schedule, perturbations)?)
}

pub fn gen_fixture(family: Family, params: &FixtureParams) -> Result<Fixture, GenError> {
    let m = params.m;
    if m < 1 {
        return Err(bad("m must be at least 1"));
    }
    let q = |a: u64, b: u64| Q::new(a as i128, b as i128);
    match family {
        Family::CancelLong => {
            let k = params.k.unwrap_or(1);
            let p = params.p.unwrap_or(1);
            if m < 2 || k < 1 || p < 1 {
                return Err(bad("needs m >= 2, k >= 1, p >= 1"));
            }
            let mut jobs: Vec<_> = (0..k * m).map(|j| (format!("J{}", j + 1), p, 0)).collect();
            jobs.push(("L".to_string(), (k * m) as u64 * p, 1));
            let scenario = build(m, jobs, vec![Perturbation::Cancel { job: "L".into() }])?;
            Ok(Fixture { scenario, closed_form: q(m as u64, 1) })
        }
        Family::SingleCancel => {
            let p = params.p.unwrap_or(1);
            if m < 2 || p < 1 {
                return Err(bad("needs m >= 2, p >= 1"));
            }
            let jobs: Vec<_> = (0..=m).map(|j| (format!("J{}", j + 1), p, j.saturating_sub(1))).collect();
            let last = format!("J{}", m + 1);
            let scenario = build(m, jobs, vec![Perturbation::Cancel { job: last }])?;
            Ok(Fixture { scenario, closed_form: q(2, 1) })
        }
        Family::SingleArrival => {
            if m < 2 {
                return Err(bad("needs m >= 2"));
            }
            let mut jobs = vec![("J1".to_string(), m as u64, 0)];
            for i in 1..m {
                for r in 0..m {
                    jobs.push((format!("J{}", 2 + (i - 1) * m + r), 1, i));
                }
            }
            let scenario = build(m, jobs, vec![Perturbation::Arrive { job: "N".into(), p: m as u64 }])?;
            Ok(Fixture { scenario, closed_form: q(2 * m as u64, m as u64 + 1) })
        }
        Family::ReduceCancel => {
            let k = need(params.k, "k")?;
            let f = need(params.f, "f")?;
            if k < 1 || k + 2 > m || f < 2 {
                return Err(bad("needs 1 <= k <= m - 2 and f >= 2"));
            }
            let mut jobs = Vec::new();
            let mut perts = Vec::new();
            for i in 0..m - k {
                for r in 0..m {
                    let id = format!("S{}_{}", i + 1, r + 1);
                    if i >= 1 {
                        perts.push(Perturbation::Reduce { job: id.clone(), p: 1 });
                    }
                    jobs.push((id, f, i));
                }
            }
            for i in m - k..m {
                let id = format!("L{}", i + 1);
                perts.push(Perturbation::Cancel { job: id.clone() });
                jobs.push((id, m as u64 * f, i));
            }
            let scenario = build(m, jobs, perts)?;
            let closed = q(m as u64 * f, f + (m - k - 1) as u64);
            Ok(Fixture { scenario, closed_form: closed })
        }
        Family::Augment => {
            let k = need(params.k, "k")?;
            let f = need(params.f, "f")?;
            let big_f = need(params.big_f, "F")?;
            if k > m || f < 2 || big_f < 2 {
                return Err(bad("needs k <= m, f >= 2, F >= 2"));
            }
            let mut jobs = Vec::new();
            let mut perts = Vec::new();
            for i in 0..m {
                for r in 0..m {
                    let id = format!("U{}_{}", i + 1, r + 1);
                    if i == 0 {
                        let p = if r < k { big_f } else { f };
                        perts.push(Perturbation::Augment { job: id.clone(), p });
                    }
                    jobs.push((id, 1, i));
                }
            }
            let scenario = build(m, jobs, perts)?;
            let (k, m, f, big_f) = (k as i128, m as i128, f as i128, big_f as i128);
            let closed = Q::new(k * big_f, big_f + k) + Q::new((m - k) * f, f + m + k);
            Ok(Fixture { scenario, closed_form: closed })
        }
        Family::Activate => {
            let k = need(params.k, "k")?;
            if k < 1 {
                return Err(bad("needs k >= 1"));
            }
            let mut jobs = Vec::new();
            for i in 0..m {
                for r in 0..m + k {
                    jobs.push((format!("U{}_{}", i + 1, r + 1), 1, i));
                }
            }
            let scenario = build(m, jobs, vec![Perturbation::MachineActivate; k])?;
            Ok(Fixture { scenario, closed_form: q((m + k) as u64, m as u64) })
        }
    }
}
