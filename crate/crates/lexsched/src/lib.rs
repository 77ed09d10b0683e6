//! Exact lexicographic makespan scheduling on identical parallel machines.
//!
//! A schedule is judged by its completion vector: machine loads sorted in
//! nonincreasing order, compared lexicographically. The crate provides an
//! exact branch and bound for the lexicographic optimum, three classical
//! baselines (sequential, weighting, highest rank), recovery strategies for
//! perturbed instances together with their worst-case guarantees, and
//! instance and perturbation generators.

pub mod baselines;
pub mod bnb;
pub mod bounds;
pub mod generators;
pub mod model;
pub mod par;
pub mod pool;
pub mod rational;
pub mod recovery;
pub mod search;

pub use bnb::{solve_lexopt, solve_lexopt_parallel, SolveReport, SolveResult};
pub use model::{lex_compare, lpt, weighted_value, CompletionVector, Instance, Job, Schedule};
pub use rational::Q;
pub use search::{Limits, Status};
