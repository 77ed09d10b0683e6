//! End-to-end acceptance checks. Each check prints one PASS or FAIL line;
//! the test fails if any check fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use lexsched::baselines::{highest_rank, sequential_method, weighting_method};
use lexsched::generators::{
    default_job_disturbances, default_machine_disturbances, degenerate_exponent, gen_fixture, gen_perturbations,
    generate, Dist, Family, FixtureParams, GenKind, GenSpec, PerturbSpec,
};
use lexsched::model::brute_force_lexopt;
use lexsched::recovery::{
    apply_perturbations, binding_recovery, characterize_uncertainty, classify_decisions, flexible_recovery,
    flexible_search, guarantee_bound, tightest_boundary, Perturbation, RecoveryScenario,
};
use lexsched::{lpt, solve_lexopt, CompletionVector, Instance, Limits, Schedule, Status, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn fig3() -> Arc<Instance> {
    Arc::new(Instance::from_times(4, &[12, 2, 2, 2, 2, 2, 2]).unwrap())
}

/// 300 random instances with two or three machines and at most eight jobs, plus the 4-machine example.
fn oracle_suite() -> Vec<Arc<Instance>> {
    let mut v = common::suite(2024, 300, &[2, 3], 8, 20);
    v.push(fig3());
    v
}

fn ratio(num: u64, den: u64) -> Q {
    match (num, den) {
        (0, 0) => Q::from_integer(1),
        (_, 0) => Q::from_integer(i128::MAX),
        _ => Q::new(num as i128, den as i128),
    }
}

fn vector_of(v: &CompletionVector) -> Vec<u64> {
    v.as_slice().to_vec()
}

fn lexopt_scenario(inst: Arc<Instance>, perts: Vec<Perturbation>) -> RecoveryScenario {
    let init = solve_lexopt(inst.clone(), Limits::unlimited());
    apply_perturbations(inst, init.schedule, perts).unwrap()
}

/// Binding-recovery ratio against the exact perturbed optimum.
fn binding_ratio(sc: &RecoveryScenario) -> Q {
    let rec = binding_recovery(sc).unwrap();
    let new = sc.new_instance().unwrap();
    ratio(rec.makespan(), common::opt_makespan(new.m(), &new.times()))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let suite = oracle_suite();
    for inst in &suite {
        let got = solve_lexopt(inst.clone(), Limits::unlimited());
        let brute = brute_force_lexopt(inst.clone(), 1 << 24).unwrap();
        if got.status != Status::Optimal || got.vector() != brute.completion_vector() {
            return Err(format!("mismatch on {:?}: {} vs {}", inst.times(), got.vector(), brute.completion_vector()));
        }
        if vector_of(&got.vector()) != common::lexmin(inst.m(), &inst.times()) {
            return Err(format!("enumeration disagrees on {:?}", inst.times()));
        }
    }
    let fig = solve_lexopt(fig3(), Limits::unlimited()).vector();
    if vector_of(&fig) != [12, 4, 4, 4] {
        return Err(format!("4-machine example gave {fig}"));
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} instances in {:.2?}", suite.len(), elapsed))
}

fn method_agreement() -> Check {
    let mut ties = 0;
    for inst in oracle_suite() {
        let reference = solve_lexopt(inst.clone(), Limits::unlimited()).vector();
        let seq = sequential_method(inst.clone(), Limits::unlimited());
        let w = weighting_method(inst.clone(), 2, Limits::unlimited()).map_err(|e| e.to_string())?;
        let hr = highest_rank(inst.clone(), 1 << 20, Limits::unlimited()).map_err(|e| e.to_string())?;
        if hr.overflowed || hr.heuristic {
            return Err(format!("highest-rank enumeration incomplete on {:?}", inst.times()));
        }
        for (name, v) in [("sequential", seq.vector()), ("weighting", w.result.vector()), ("highest-rank", hr.result.vector())] {
            if v != reference {
                return Err(format!("{name} gave {v}, bnb gave {reference} on {:?}", inst.times()));
            }
        }
        ties += w.tie as usize;
    }
    // two vectors with equal weighted value at base 2: (38,38,31) and (39,35,33)
    let tie = Arc::new(Instance::from_times(3, &[11, 3, 12, 15, 23, 28, 15]).unwrap());
    let all = common::all_vectors(3, &tie.times());
    let wmin = all.iter().map(|(v, _)| common::weight(v, 2)).min().unwrap();
    let tied: Vec<_> = all.iter().filter(|(v, _)| common::weight(v, 2) == wmin).map(|(v, _)| v.clone()).collect();
    if tied.len() < 2 {
        return Err("constructed case has no tie".into());
    }
    let w = weighting_method(tie.clone(), 2, Limits::unlimited()).map_err(|e| e.to_string())?;
    if !w.tie || vector_of(&w.result.vector()) != [38, 38, 31] {
        return Err(format!("tie case: tie={} vector={}", w.tie, w.result.vector()));
    }
    Ok(format!("{} instances, {ties} natural ties; constructed tie {tied:?} resolved to (38, 38, 31)", oracle_suite().len()))
}

fn bound_soundness() -> Check {
    let suite: Vec<_> = {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        (0..50)
            .map(|_| {
                let p: Vec<u64> = (0..6).map(|_| rng.gen_range(1..=12)).collect();
                Arc::new(Instance::from_times(3, &p).unwrap())
            })
            .collect()
    };
    let mut checked = 0;
    for inst in &suite {
        let opt = CompletionVector::from_sorted(common::lexmin(3, &inst.times())).unwrap();
        let lpt_v = lpt(inst.clone()).completion_vector();
        for incumbent in [None, Some(&lpt_v), Some(&opt)] {
            let bad = common::bound_violations(inst, incumbent);
            if let Some(first) = bad.first() {
                return Err(format!("{} violations on {:?}, first: {first}", bad.len(), inst.times()));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} instance/incumbent pairs, every node, zero violations"))
}

/// Every single perturbation of an instance with times up to `pmax`.
fn single_perturbations(inst: &Instance, pmax: u64) -> Vec<Perturbation> {
    let mut out = Vec::new();
    for job in inst.jobs() {
        out.push(Perturbation::Cancel { job: job.id.clone() });
        for p in 1..job.p {
            out.push(Perturbation::Reduce { job: job.id.clone(), p });
        }
        for p in job.p + 1..=2 * pmax {
            out.push(Perturbation::Augment { job: job.id.clone(), p });
        }
    }
    for p in 1..=2 * pmax {
        out.push(Perturbation::Arrive { job: "new".into(), p });
    }
    for machine in 1..=inst.m() {
        out.push(Perturbation::MachineFail { machine });
    }
    out.push(Perturbation::MachineActivate);
    out
}

fn single_perturbation_bound() -> Check {
    let pmax = 9;
    let mut scenarios = 0;
    let mut worst = Q::from_integer(0);
    for inst in common::suite(404, 200, &[2, 3, 4], 7, pmax) {
        let init = solve_lexopt(inst.clone(), Limits::unlimited()).schedule;
        for pert in single_perturbations(&inst, pmax) {
            let sc = apply_perturbations(inst.clone(), init.clone(), vec![pert.clone()]).unwrap();
            let rec = binding_recovery(&sc).unwrap();
            let new = sc.new_instance().unwrap();
            let opt = common::opt_makespan(new.m(), &new.times());
            if rec.makespan() > 2 * opt {
                return Err(format!("{pert:?} on {:?}: {} > 2 * {opt}", inst.times(), rec.makespan()));
            }
            worst = worst.max(ratio(rec.makespan(), opt));
            scenarios += 1;
        }
    }
    for m in 2..=6 {
        let fx = gen_fixture(Family::SingleCancel, &FixtureParams { m, ..Default::default() }).unwrap();
        let r = binding_ratio(&fx.scenario);
        if r != Q::from_integer(2) {
            return Err(format!("single-cancel family m={m} gave {r}"));
        }
    }
    Ok(format!("{scenarios} scenarios, worst ratio {worst}; single-cancel family ratio 2 for m=2..6"))
}

fn arbitrary_optimum_gap() -> Check {
    let mut seen = Vec::new();
    for m in 2..=6 {
        for p in [1, 3] {
            let fx = gen_fixture(Family::CancelLong, &FixtureParams { m, p: Some(p), ..Default::default() }).unwrap();
            let init = fx.scenario.init();
            let init_opt = common::opt_makespan(init.m(), &init.times());
            if fx.scenario.init_schedule().makespan() != init_opt {
                return Err(format!("m={m} p={p}: initial schedule not makespan-optimal"));
            }
            let r = binding_ratio(&fx.scenario);
            if r != Q::from_integer(m as i128) || fx.closed_form != r {
                return Err(format!("m={m} p={p}: ratio {r}"));
            }
            seen.push(r.to_string());
        }
    }
    Ok(format!("ratios {}", seen.join(", ")))
}

fn multi_perturbation_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut scenarios = 0;
    let mut checks = 0;
    let mut with_failure = 0;
    let mut attempts = 0;
    while scenarios < 500 {
        attempts += 1;
        if attempts > 20_000 {
            return Err(format!("only {scenarios} scenarios with k < m generated"));
        }
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=7);
        let p: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let inst = Arc::new(Instance::from_times(m, &p).unwrap());
        let spec = PerturbSpec {
            seed: rng.gen(),
            dn: Some(rng.gen_range(1..=3)),
            dm: Some(rng.gen_range(0..=1)),
            q: None,
        };
        let sc = lexopt_scenario(inst.clone(), gen_perturbations(&inst, &spec));
        let r = binding_ratio(&sc);
        let mut any = false;
        for k in 0..=sc.init().n() + sc.new_jobs().len() {
            let f = tightest_boundary(&sc, k);
            let ch = characterize_uncertainty(&sc, f).map_err(|e| e.to_string())?;
            if ch.k >= m {
                continue;
            }
            let bound = guarantee_bound(&ch, m).map_err(|e| e.to_string())?.product;
            if r > bound {
                return Err(format!("{:?} with {:?}: ratio {r} > bound {bound} at f={f}", p, sc.perturbations()));
            }
            any = true;
            checks += 1;
        }
        if any {
            scenarios += 1;
            with_failure += sc.perturbations().iter().any(|x| matches!(x, Perturbation::MachineFail { .. })) as usize;
        }
    }
    Ok(format!("{scenarios} scenarios ({with_failure} with a machine failure), {checks} boundary choices, all within the product bound"))
}

fn tightness_families() -> Check {
    let fx = gen_fixture(Family::ReduceCancel, &FixtureParams { m: 10, k: Some(2), f: Some(2), ..Default::default() })
        .map_err(|e| e.to_string())?;
    let (reduce_ratio, reduce_opt) = exact_large_ratio(&fx.scenario)?;
    let reduce_ok = reduce_ratio == Q::new(20, 9) && fx.closed_form == reduce_ratio;

    let fx = gen_fixture(
        Family::Augment,
        &FixtureParams { m: 10, k: Some(2), f: Some(2), big_f: Some(12), ..Default::default() },
    )
    .map_err(|e| e.to_string())?;
    let (aug_ratio, aug_opt) = exact_large_ratio(&fx.scenario)?;
    let aug_ok = aug_ratio == fx.closed_form;
    let detail = format!(
        "reduce-cancel ratio {reduce_ratio} (optimum {reduce_opt}, expected 20/9); augmentation ratio {aug_ratio} (optimum {aug_opt}) vs closed form {}",
        fx.closed_form
    );
    if reduce_ok && aug_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Ratio for instances too large to enumerate: the optimum is certified by a
/// schedule meeting the trivial lower bound `max(ceil(total/m), max p)`.
fn exact_large_ratio(sc: &RecoveryScenario) -> Result<(Q, u64), String> {
    let new = sc.new_instance().map_err(|e| e.to_string())?;
    let lower = new.total_processing().div_ceil(new.m() as u64).max(new.times().into_iter().max().unwrap_or(0));
    let witness = lexsched::baselines::min_makespan(new.clone(), Limits::unlimited());
    if witness.value != lower {
        return Err(format!("optimum not certified: lower bound {lower}, best schedule {}", witness.value));
    }
    let rec = binding_recovery(sc).map_err(|e| e.to_string())?;
    Ok((ratio(rec.makespan(), lower), lower))
}

const DEGENERATE_TABLE: [(usize, [(usize, u32); 4]); 8] = [
    (3, [(20, 15), (25, 19), (30, 23), (35, 27)]),
    (4, [(25, 16), (30, 20), (35, 23), (40, 26)]),
    (5, [(30, 17), (35, 20), (40, 23), (45, 26)]),
    (6, [(35, 18), (40, 20), (45, 23), (50, 25)]),
    (10, [(40, 14), (50, 18), (60, 22), (70, 25)]),
    (12, [(45, 14), (55, 17), (65, 21), (75, 24)]),
    (14, [(55, 16), (65, 19), (75, 21), (85, 24)]),
    (16, [(60, 16), (70, 18), (80, 21), (90, 24)]),
];

fn generator_fidelity() -> Check {
    let mut checked = 0;
    for (m, row) in DEGENERATE_TABLE {
        for (n, e) in row {
            let got = degenerate_exponent(m, n).map_err(|x| x.to_string())?;
            if got != e {
                return Err(format!("m={m} n={n}: exponent {got}, table {e}"));
            }
            let inst = lexsched::generators::gen_degenerate(m, n, Dist::Uniform, 1).map_err(|x| x.to_string())?;
            if inst.jobs().iter().any(|j| j.p > 1 << e) {
                return Err(format!("m={m} n={n}: time above 2^{e}"));
            }
            checked += 1;
        }
    }
    for n in 20..=500 {
        if default_job_disturbances(n) != (2 * n).div_ceil(10) {
            return Err(format!("d_n wrong at n={n}"));
        }
    }
    for m in 3..=25 {
        if default_machine_disturbances(m) != (2 * m).div_ceil(10) {
            return Err(format!("d_m wrong at m={m}"));
        }
    }
    let mut specs = Vec::new();
    for dist in [Dist::Uniform, Dist::Normal, Dist::SymmetricNormal] {
        for seed in 0..5 {
            specs.push(GenSpec { kind: GenKind::Wellformed, m: 5, n: 40, q: Some(1000), dist, seed });
            specs.push(GenSpec { kind: GenKind::Degenerate, m: 4, n: 30, q: None, dist, seed });
        }
    }
    for spec in &specs {
        let a = serde_json::to_vec(&generate(spec).map_err(|e| e.to_string())?).unwrap();
        let b = serde_json::to_vec(&generate(spec).map_err(|e| e.to_string())?).unwrap();
        if a != b {
            return Err(format!("{spec:?} not reproducible"));
        }
        let inst = generate(spec).unwrap();
        let pa = serde_json::to_vec(&gen_perturbations(&inst, &PerturbSpec { seed: spec.seed, ..Default::default() })).unwrap();
        let pb = serde_json::to_vec(&gen_perturbations(&inst, &PerturbSpec { seed: spec.seed, ..Default::default() })).unwrap();
        if pa != pb {
            return Err(format!("{spec:?} perturbations not reproducible"));
        }
    }
    Ok(format!("{checked} degenerate exponents, disturbance counts, {} seeded specs reproducible", specs.len()))
}

fn lpt_quality() -> Check {
    let suite = oracle_suite();
    for inst in &suite {
        let l = lpt(inst.clone()).makespan();
        let opt = common::min_makespan(inst.m(), &inst.times());
        if 3 * l > 4 * opt {
            return Err(format!("{:?}: LPT {l}, optimum {opt}", inst.times()));
        }
    }
    Ok(format!("{} instances", suite.len()))
}

fn flexible_contract() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut done = 0;
    while done < 100 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=7);
        let p: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let inst = Arc::new(Instance::from_times(m, &p).unwrap());
        let spec = PerturbSpec { seed: rng.gen(), dn: Some(rng.gen_range(1..=3)), dm: Some(rng.gen_range(0..=1)), q: None };
        let sc = lexopt_scenario(inst.clone(), gen_perturbations(&inst, &spec));
        let new = sc.new_instance().unwrap();
        let opt = common::opt_makespan(new.m(), &new.times());
        let nb = classify_decisions(&sc).binding.len();
        let full = flexible_recovery(&sc, nb, Limits::unlimited()).map_err(|e| e.to_string())?;
        let searched = flexible_search(&sc, nb, Limits::unlimited()).map_err(|e| e.to_string())?;
        if full.schedule.makespan() != opt || searched.schedule.makespan() != opt {
            return Err(format!(
                "{p:?} {:?}: g=|binding| gave {} / {}, optimum {opt}",
                sc.perturbations(),
                full.schedule.makespan(),
                searched.schedule.makespan()
            ));
        }
        let mut prev = u64::MAX;
        for g in [0, 1, 2, n] {
            let out = flexible_recovery(&sc, g, Limits::unlimited()).map_err(|e| e.to_string())?;
            if out.status != Status::Optimal || out.migrations > g {
                return Err(format!("g={g}: status {:?}, {} migrations", out.status, out.migrations));
            }
            let mk = out.schedule.makespan();
            if mk > prev {
                return Err(format!("{p:?}: makespan rose to {mk} at g={g}"));
            }
            prev = mk;
        }
        done += 1;
    }
    Ok("100 scenarios".into())
}

fn property_instances(seed: u64) -> Vec<Arc<Instance>> {
    common::suite(seed, 200, &[2, 3, 4], 7, 15)
}

/// Schedules of a LexOpt solution found two ways.
fn lexopt_schedules(inst: &Arc<Instance>) -> [Schedule; 2] {
    [solve_lexopt(inst.clone(), Limits::unlimited()).schedule, brute_force_lexopt(inst.clone(), 1 << 24).unwrap()]
}

fn structural_properties() -> Check {
    // C*(m-1) <= 2 C*(m)
    for inst in property_instances(41) {
        let (m, p) = (inst.m(), inst.times());
        if common::opt_makespan(m - 1, &p) > 2 * common::opt_makespan(m, &p) {
            return Err(format!("one machine fewer more than doubles {p:?} on {m}"));
        }
    }
    // every machine subset of a LexOpt schedule is optimal for its jobs
    for inst in property_instances(51) {
        for s in lexopt_schedules(&inst) {
            let m = inst.m();
            for mask in 1u32..(1 << m) {
                let size = mask.count_ones() as usize;
                let sub: Vec<u64> =
                    s.machine_of().iter().zip(inst.times()).filter(|(&i, _)| mask >> i & 1 == 1).map(|(_, p)| p).collect();
                let loads = s.loads();
                let mk = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| loads[i]).max().unwrap();
                if mk != common::opt_makespan(size, &sub) {
                    return Err(format!("{:?}: machine subset {mask:b} not optimal", inst.times()));
                }
            }
        }
    }
    // moving any job cannot land it below its machine's load minus its time
    for inst in property_instances(52) {
        for s in lexopt_schedules(&inst) {
            let loads = s.loads();
            for (j, &i) in s.machine_of().iter().enumerate() {
                let pj = inst.jobs()[j].p;
                if (0..inst.m()).any(|l| l != i && loads[l] + pj < loads[i]) {
                    return Err(format!("{:?}: job {j} could move", inst.times()));
                }
            }
        }
    }
    // C*(m-l) <= (1 + ceil(l / (m-l))) C*(m)
    for inst in property_instances(53) {
        let (m, p) = (inst.m(), inst.times());
        let base = common::opt_makespan(m, &p);
        for l in 1..m {
            let factor = 1 + (l as u64).div_ceil((m - l) as u64);
            if common::opt_makespan(m - l, &p) > factor * base {
                return Err(format!("{p:?}: removing {l} of {m} machines"));
            }
        }
    }
    // perturbing every time within a factor f moves C* by at most f
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    for inst in property_instances(54) {
        let (m, p) = (inst.m(), inst.times());
        let (a, b) = (rng.gen_range(4..=12u64), 4u64);
        let up: Vec<u64> = p.iter().map(|&x| rng.gen_range(x..=x * a / b)).collect();
        let down: Vec<u64> = p.iter().map(|&x| rng.gen_range((x * b).div_ceil(a)..=x)).collect();
        let (c, cu, cd) = (common::opt_makespan(m, &p), common::opt_makespan(m, &up), common::opt_makespan(m, &down));
        if !(c <= cu && b * cu <= a * c) {
            return Err(format!("{p:?} -> {up:?}: {c} -> {cu} with f={a}/{b}"));
        }
        if !(cd <= c && b * c <= a * cd) {
            return Err(format!("{p:?} -> {down:?}: {c} -> {cd} with f={a}/{b}"));
        }
    }
    Ok("five properties on 200 instances each, zero violations".into())
}

type CheckFn = fn() -> Check;

#[test]
fn acceptance() {
    let checks: [(&str, CheckFn); 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("method agreement", method_agreement),
        ("vectorial bound soundness", bound_soundness),
        ("single perturbation ratio <= 2", single_perturbation_bound),
        ("arbitrary optimum ratio m", arbitrary_optimum_gap),
        ("multi-perturbation product bound", multi_perturbation_bound),
        ("tightness families", tightness_families),
        ("generator fidelity", generator_fidelity),
        ("LPT within 4/3", lpt_quality),
        ("flexible recovery contract", flexible_contract),
        ("structural properties", structural_properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
