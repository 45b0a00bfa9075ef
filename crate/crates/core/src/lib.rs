//! PageRank vectors of unweighted directed graphs across the full range of
//! jumping parameters, the ladder constructions that push the 2-norm gap
//! between two such vectors towards `sqrt(67/50)`, and tools to measure and
//! search for large gaps.
//!
//! The crate is organised bottom-up:
//!
//! - [`digraph`]: the graph model, strongly connected components, and the
//!   conditions under which the pure walk (α = 1) has a unique limit.
//! - [`linalg`]: a small dense LU solver used by the exact PageRank solve.
//! - [`pagerank`]: the transition operator and three independent solvers
//!   (direct, power iteration, Monte Carlo walk).
//! - [`gamma`]: the ladder family Γ(k, m) and closed-form predictions about it.
//! - [`discrepancy`]: norms of differences, α sweeps, pair maximisation, limit
//!   tables and exhaustive search over small graphs.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod csv;
pub mod digraph;
pub mod discrepancy;
pub mod gamma;
pub mod linalg;
pub mod pagerank;

pub use digraph::{Digraph, GraphError, SccReport, Vertex};
pub use discrepancy::{norm_diff, SearchRecord, SweepResult, SweepSample};
pub use gamma::{build_gamma, build_gamma_general, GammaLabels};
pub use pagerank::{Method, PagerankVector, SolveError, TransitionMatrix};
