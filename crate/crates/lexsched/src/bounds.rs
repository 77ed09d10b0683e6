//! Componentwise lower and upper bounds on the completion vector of the
//! best completion of a partial schedule.
//!
//! Let `t` be the partial loads, `R` the remaining work and `i` a position
//! in the completion vector.
//!
//! Lower bound `L_i`, assuming `C_q <= U_q` for `q < i`: the `i - 1` most
//! loaded machines can absorb at most
//! `cap = sum(U_q) - (sum of the i - 1 smallest t)` of the remaining work.
//! Let `h` be the smallest index such that the largest remaining jobs up to
//! `h` reach `cap`. Then some job of size at least `p[h+1]` lands on one of
//! the other `m - i + 1` machines, and those machines carry at least the
//! jobs after `h`. So
//! `L_i = max(t_min + p[h+1], t_(i), (smallest m-i+1 t + sum p[h+1..]) / (m-i+1))`.
//!
//! Upper bound `U_i`, assuming `C_q >= L_q` for `q < i`: the remaining
//! `m - i + 1` machines receive at most
//! `R - sum(L_q) + (sum of the i - 1 largest t)` units. In a
//! lexicographically minimal completion any machine that receives a job is
//! at most `p[l+1]` above the least loaded machine, and the least loaded
//! machine stays below the water level of that amount poured over the
//! `m - i + 1` largest partial loads. With an incumbent the bound is
//! also capped by its `i`-th completion time, and never reported below
//! `L_i`.

use num_traits::Zero;

use crate::model::CompletionVector;
use crate::rational::{qi, Q};
use crate::search::{SearchNode, SortedJobs};

/// Partial loads of a node in both sort orders with prefix sums.
#[derive(Debug, Clone)]
pub struct NodeProfile<'a> {
    jobs: &'a SortedJobs,
    level: usize,
    desc: Vec<u64>,
    /// Sums of the k smallest loads.
    small: Vec<u64>,
    /// Sums of the k largest loads.
    large: Vec<u64>,
}

impl<'a> NodeProfile<'a> {
    pub fn new(jobs: &'a SortedJobs, node: &SearchNode) -> Self {
        let mut desc = node.loads.clone();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        let m = desc.len();
        let mut large = Vec::with_capacity(m + 1);
        let mut small = Vec::with_capacity(m + 1);
        large.push(0);
        small.push(0);
        for k in 0..m {
            large.push(large[k] + desc[k]);
            small.push(small[k] + desc[m - 1 - k]);
        }
        NodeProfile { jobs, level: node.level, desc, small, large }
    }

    fn m(&self) -> usize {
        self.desc.len()
    }

    /// `i`-th largest partial load, 1-based.
    pub fn t(&self, i: usize) -> u64 {
        self.desc[i - 1]
    }

    /// `L_i` given the sum of `U_1..U_{i-1}`.
    pub fn lower(&self, i: usize, upper_sum: &Q) -> Q {
        let m = self.m();
        let jobs = self.jobs;
        let cap = upper_sum - qi(self.small[i - 1]);
        let h = if cap <= Q::zero() {
            self.level
        } else {
            let need = self.jobs.cum[self.level] + crate::rational::ceil_to_u64(&cap);
            let tail = &jobs.cum[self.level..];
            self.level + tail.partition_point(|&c| c < need)
        };
        let h = h.min(jobs.n());
        let lambda = jobs.remaining(h);
        let rest = (m - i + 1) as u64;
        let t_min = self.desc[m - 1];
        let a = qi(t_min + jobs.next(h));
        let b = qi(self.t(i));
        let c = Q::new((self.small[m - i + 1] + lambda) as i128, rest as i128);
        a.max(b).max(c)
    }

    /// Packing part of `U_i` given the sum of `L_1..L_{i-1}`.
    pub fn pack(&self, i: usize, lower_sum: &Q) -> Q {
        let m = self.m();
        let rest = m - i + 1;
        let mut amount = qi(self.jobs.remaining(self.level)) - lower_sum + qi(self.large[i - 1]);
        if amount < Q::zero() {
            amount = Q::zero();
        }
        // water level over the `rest` largest loads, poured from the lowest
        let pool = &self.desc[..rest];
        let mut acc = amount;
        let mut level = qi(pool[rest - 1]);
        for k in 1..=rest {
            acc += qi(pool[rest - k]);
            let candidate = acc / Q::from_integer(k as i128);
            let next_up = if k < rest { Some(qi(pool[rest - k - 1])) } else { None };
            match next_up {
                Some(nb) if candidate > nb => continue,
                _ => {
                    level = candidate;
                    break;
                }
            }
        }
        let lead = level + qi(self.jobs.next(self.level));
        lead.max(qi(self.t(i)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorialBounds {
    pub lower: Vec<Q>,
    pub upper: Vec<Q>,
}

/// All `m` components of `L` and `U`, computed alternately.
pub fn vectorial_bounds(jobs: &SortedJobs, node: &SearchNode, incumbent: Option<&CompletionVector>) -> VectorialBounds {
    let profile = NodeProfile::new(jobs, node);
    let m = jobs.m;
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    let mut lsum = Q::zero();
    let mut usum = Q::zero();
    for i in 1..=m {
        let l = profile.lower(i, &usum);
        let mut u = profile.pack(i, &lsum);
        if let Some(inc) = incumbent {
            u = u.min(qi(inc.as_slice()[i - 1]));
        }
        u = u.max(l);
        lsum += l;
        usum += u;
        lower.push(l);
        upper.push(u);
    }
    VectorialBounds { lower, upper }
}

/// True when no completion of `node` can be lexicographically smaller than
/// `incumbent`, i.e. `incumbent <=lex L`. Stops as soon as the comparison
/// is decided, so later components are never computed.
pub fn fathom(jobs: &SortedJobs, node: &SearchNode, incumbent: &CompletionVector) -> bool {
    let profile = NodeProfile::new(jobs, node);
    let mut usum = Q::zero();
    for (idx, &c) in incumbent.as_slice().iter().enumerate() {
        let l = profile.lower(idx + 1, &usum);
        let c = qi(c);
        if c < l {
            return true;
        }
        if c > l {
            return false;
        }
        // equal: the capped upper bound collapses to C_i(I) = L_i
        usum += c;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::rational::q;

    fn jobs(m: usize, p: &[u64]) -> SortedJobs {
        SortedJobs::new(&Instance::from_times(m, p).unwrap())
    }

    #[test]
    fn root_bounds_small_example() {
        let j = jobs(2, &[3, 2, 1]);
        let b = vectorial_bounds(&j, &j.root(), None);
        assert_eq!(b.lower[0], q(3, 1));
        assert_eq!(b.upper[0], q(6, 1));
        // without a cap on C_1 the first machine may take everything
        assert_eq!(b.lower[1], q(0, 1));
        assert_eq!(b.upper[1], q(6, 1));
    }

    #[test]
    fn incumbent_caps_upper_bound() {
        let j = jobs(2, &[3, 2, 1]);
        let inc = CompletionVector::from_loads(&[3, 3]);
        let b = vectorial_bounds(&j, &j.root(), Some(&inc));
        assert_eq!(b.upper[0], q(3, 1));
        assert_eq!(b.lower[1], q(3, 1));
        assert!(fathom(&j, &j.root(), &inc));
        let worse = CompletionVector::from_loads(&[4, 2]);
        assert!(!fathom(&j, &j.root(), &worse));
    }

    #[test]
    fn leaf_bound_is_makespan() {
        let j = jobs(2, &[3, 2, 1]);
        let leaf = SearchNode { level: 3, loads: vec![4, 2], assign: vec![0, 1, 0] };
        let b = vectorial_bounds(&j, &leaf, None);
        assert_eq!(b.lower[0], q(4, 1));
        assert_eq!(b.lower[1], q(2, 1));
    }

    #[test]
    fn zero_jobs() {
        let j = jobs(3, &[]);
        let b = vectorial_bounds(&j, &j.root(), None);
        assert!(b.lower.iter().all(|x| x.is_zero()));
        assert!(b.upper.iter().all(|x| x.is_zero()));
    }
}
