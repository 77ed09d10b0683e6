#![allow(dead_code)]

use std::sync::Arc;

use lexsched::bounds::vectorial_bounds;
use lexsched::rational::qi;
use lexsched::search::{SearchNode, SortedJobs};
use lexsched::{CompletionVector, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every sorted completion vector reachable by some assignment, with one
/// witness assignment each.
pub fn all_vectors(m: usize, p: &[u64]) -> Vec<(Vec<u64>, Vec<usize>)> {
    let n = p.len();
    let mut out = std::collections::BTreeMap::new();
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut assign = vec![0; n];
        let mut loads = vec![0u64; m];
        for j in (0..n).rev() {
            assign[j] = (c % m as u64) as usize;
            c /= m as u64;
            loads[assign[j]] += p[j];
        }
        loads.sort_unstable_by(|a, b| b.cmp(a));
        out.entry(loads).or_insert(assign);
    }
    out.into_iter().collect()
}

/// Lexicographically smallest sorted load vector, by enumeration.
pub fn lexmin(m: usize, p: &[u64]) -> Vec<u64> {
    all_vectors(m, p).into_iter().map(|(v, _)| v).min().unwrap()
}

/// Optimal makespan, by enumeration.
pub fn min_makespan(m: usize, p: &[u64]) -> u64 {
    all_vectors(m, p).into_iter().map(|(v, _)| v[0]).min().unwrap()
}

/// `sum B^(m-i) c_i` in u128.
pub fn weight(v: &[u64], base: u128) -> u128 {
    v.iter().fold(0u128, |acc, &c| acc * base + c as u128)
}

/// Small random instances: `count` of them with `m` in `ms`, `n <= max_n`
/// and processing times in `1..=max_p`.
pub fn suite(seed: u64, count: usize, ms: &[usize], max_n: usize, max_p: u64) -> Vec<Arc<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = ms[rng.gen_range(0..ms.len())];
            let n = rng.gen_range(0..=max_n);
            let p: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_p)).collect();
            Arc::new(Instance::from_times(m, &p).unwrap())
        })
        .collect()
}

/// Optimal makespan by depth-first search over decreasing times, trying one
/// machine per distinct load.
pub fn opt_makespan(m: usize, p: &[u64]) -> u64 {
    let mut p = p.to_vec();
    p.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = p.iter().sum();
    let floor = total.div_ceil(m as u64).max(p.first().copied().unwrap_or(0));
    fn go(p: &[u64], j: usize, loads: &mut Vec<u64>, best: &mut u64, floor: u64) {
        if *best == floor {
            return;
        }
        if j == p.len() {
            *best = (*best).min(*loads.iter().max().unwrap());
            return;
        }
        let mut seen = Vec::new();
        for i in 0..loads.len() {
            if seen.contains(&loads[i]) || loads[i] + p[j] >= *best {
                continue;
            }
            seen.push(loads[i]);
            loads[i] += p[j];
            go(p, j + 1, loads, best, floor);
            loads[i] -= p[j];
        }
    }
    let mut best = total + 1;
    go(&p, 0, &mut vec![0; m], &mut best, floor);
    best.min(total)
}

/// Every partial schedule of the sorted jobs, with all its completions.
pub fn nodes_with_completions(jobs: &SortedJobs) -> Vec<(SearchNode, Vec<Vec<u64>>)> {
    let n = jobs.n();
    let m = jobs.m;
    let mut out = Vec::new();
    for level in 0..=n {
        for code in 0..(m as u64).pow(level as u32) {
            let mut c = code;
            let mut assign = vec![0; level];
            let mut loads = vec![0u64; m];
            for j in (0..level).rev() {
                assign[j] = (c % m as u64) as usize;
                c /= m as u64;
                loads[assign[j]] += jobs.p[j];
            }
            let rest = n - level;
            let mut completions = Vec::new();
            for code2 in 0..(m as u64).pow(rest as u32) {
                let mut c2 = code2;
                let mut l = loads.clone();
                for j in level..n {
                    l[(c2 % m as u64) as usize] += jobs.p[j];
                    c2 /= m as u64;
                }
                l.sort_unstable_by(|a, b| b.cmp(a));
                completions.push(l);
            }
            out.push((SearchNode { level, loads, assign }, completions));
        }
    }
    out
}

/// Checks both bounds at every node against exhaustive completions and
/// returns the violations found.
///
/// `L_i <= C_i(S)` is required for every completion `S` whose earlier
/// components stay within `U`. `U_i >= C_i(S*)` is required for the
/// lexicographically smallest completion `S*` when its earlier components
/// reach `L` and, with an incumbent, when `S*` matches the incumbent's
/// earlier components without exceeding it.
pub fn bound_violations(inst: &Instance, incumbent: Option<&CompletionVector>) -> Vec<String> {
    let jobs = SortedJobs::new(inst);
    let m = inst.m();
    let mut bad = Vec::new();
    for (node, completions) in nodes_with_completions(&jobs) {
        let b = vectorial_bounds(&jobs, &node, incumbent);
        for s in &completions {
            for i in 0..m {
                if (0..i).all(|q| qi(s[q]) <= b.upper[q]) && qi(s[i]) < b.lower[i] {
                    bad.push(format!("L_{} too high at {node:?} for {s:?}", i + 1));
                }
            }
        }
        let best = completions.iter().min().unwrap();
        for i in 0..m {
            let hyp = (0..i).all(|q| qi(best[q]) >= b.lower[q]);
            let relevant = match incumbent {
                None => true,
                Some(inc) => best.as_slice() <= inc.as_slice() && (0..i).all(|q| best[q] == inc.as_slice()[q]),
            };
            if hyp && relevant && qi(best[i]) > b.upper[i] {
                bad.push(format!("U_{} too low at {node:?} for {best:?}", i + 1));
            }
        }
    }
    bad
}
