//! The PageRank transition operator and its stationary vector.
//!
//! For a graph on `n` vertices and jumping parameter α the operator is the
//! column-stochastic matrix
//!
//! ```text
//! R[i][j] = α / deg_out(j) · [j -> i] + (1 − α) / n   if deg_out(j) > 0
//! R[i][j] = 1 / n                                     otherwise
//! ```
//!
//! and the PageRank vector π is the probability vector with `R π = π`.
//! Column `j` is the distribution of the walker's next position given that it
//! currently sits at `j`.
//!
//! Three independent routes to π are provided: a direct linear solve
//! ([`solve_exact`]), power iteration ([`solve_power`]) and a seeded Monte
//! Carlo walk ([`simulate_walk`]). At α = 1 the limit exists only under the
//! conditions checked by [`Digraph::alpha1_violation`]; [`solve_alpha1`]
//! handles that case.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::csv;
use crate::digraph::{Alpha1Violation, Digraph, Vertex};
use crate::linalg::{neumaier_sum, DenseMatrix, LinalgError, Lu};

/// Stationarity residual every direct solve must meet.
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_POWER_TOL: f64 = 1e-12;
pub const DEFAULT_POWER_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("jumping parameter {0} outside the admissible range")]
    AlphaOutOfRange(f64),
    #[error("PageRank at alpha = 1 is not well defined: {0}")]
    Alpha1Invalid(#[from] Alpha1Violation),
    #[error("vector length {got} does not match graph order {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("walk needs at least one step")]
    NoSteps,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("stationarity residual {0:e} exceeds tolerance after refinement")]
    Residual(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_alpha(alpha: f64) -> Result<(), SolveError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(SolveError::AlphaOutOfRange(alpha))
    }
}

/// Dense column-stochastic operator `R(G, α)`, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    alpha: f64,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn build(g: &Digraph, alpha: f64) -> Result<Self, SolveError> {
        check_alpha(alpha)?;
        let n = g.n();
        let nf = n as f64;
        let mut entries = vec![0.0; n * n];
        for (j, col) in entries.chunks_exact_mut(n).enumerate() {
            let targets = g.out_neighbors(j);
            if targets.is_empty() {
                col.fill(1.0 / nf);
                continue;
            }
            col.fill((1.0 - alpha) / nf);
            let follow = alpha / targets.len() as f64;
            for &i in targets {
                col[i] += follow;
            }
        }
        Ok(Self { n, alpha, entries })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Entry `R[i][j]`: probability of moving from `j` to `i`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[j * self.n + i]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.entries[j * self.n..(j + 1) * self.n]
    }

    /// `R π`.
    pub fn apply(&self, pi: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.check_len(pi)?;
        let mut out = vec![0.0; self.n];
        for (col, &p) in self.entries.chunks_exact(self.n).zip(pi) {
            if p != 0.0 {
                for (o, &r) in out.iter_mut().zip(col) {
                    *o += r * p;
                }
            }
        }
        Ok(out)
    }

    /// `Σ_u R[v][u] π_u − π_v`: inflow minus outflow at `v`.
    pub fn delta_pi(&self, pi: &[f64], v: Vertex) -> Result<f64, SolveError> {
        self.check_len(pi)?;
        if v >= self.n {
            return Err(SolveError::VertexOutOfRange(v));
        }
        let inflow = neumaier_sum((0..self.n).map(|u| self.get(v, u) * pi[u]));
        Ok(inflow - pi[v])
    }

    /// `max_v |Δπ_v|`.
    pub fn max_residual(&self, pi: &[f64]) -> Result<f64, SolveError> {
        self.check_len(pi)?;
        let mut worst = 0.0f64;
        for v in 0..self.n {
            worst = worst.max(self.delta_pi(pi, v)?.abs());
        }
        Ok(worst)
    }

    fn check_len(&self, pi: &[f64]) -> Result<(), SolveError> {
        if pi.len() == self.n {
            Ok(())
        } else {
            Err(SolveError::LengthMismatch {
                expected: self.n,
                got: pi.len(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Power,
    Alpha1,
    Walk,
}

/// A stochastic vector indexed by vertex, tagged with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct PagerankVector {
    values: Vec<f64>,
    alpha: f64,
    method: Method,
}

impl PagerankVector {
    pub fn new(values: Vec<f64>, alpha: f64, method: Method) -> Self {
        Self {
            values,
            alpha,
            method,
        }
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn method(&self) -> Method {
        self.method
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> f64 {
        self.values[v]
    }

    pub fn sum(&self) -> f64 {
        neumaier_sum(self.values.iter().copied())
    }

    /// `‖π‖₂²`.
    pub fn norm_sq(&self) -> f64 {
        neumaier_sum(self.values.iter().map(|x| x * x))
    }

    pub fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        csv::write_header(w, &["vertex", "pi"])?;
        for (v, &p) in self.values.iter().enumerate() {
            csv::write_row(w, &[v.to_string(), csv::fmt_f64(p)])?;
        }
        Ok(())
    }
}

pub fn build_transition(g: &Digraph, alpha: f64) -> Result<TransitionMatrix, SolveError> {
    TransitionMatrix::build(g, alpha)
}

/// Solves `(I − M) x = 0, Σx = 1` for a column-stochastic `M` given row-wise
/// as `I − M`, by swapping the last equation for the normalisation row.
/// `residual` measures stationarity of a candidate; one refinement pass is
/// applied if it exceeds [`RESIDUAL_TOL`].
fn stationary_solve(
    mut system: DenseMatrix,
    residual: impl Fn(&[f64]) -> Result<f64, SolveError>,
) -> Result<Vec<f64>, SolveError> {
    let n = system.n();
    system.row_mut(n - 1).fill(1.0);
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;

    let lu = Lu::factor(system.clone())?;
    let mut x = lu.solve(&rhs)?;
    if residual(&x)? > RESIDUAL_TOL {
        let ax = system.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let d = lu.solve(&r)?;
        for (xi, di) in x.iter_mut().zip(d) {
            *xi += di;
        }
    }

    // Round-off can leave entries a hair below zero.
    for xi in x.iter_mut() {
        if *xi < 0.0 && *xi > -1e-12 {
            *xi = 0.0;
        }
    }
    let total = neumaier_sum(x.iter().copied());
    for xi in x.iter_mut() {
        *xi /= total;
    }
    let res = residual(&x)?;
    if res > RESIDUAL_TOL || x.iter().any(|&xi| xi < 0.0) {
        return Err(SolveError::Residual(res));
    }
    Ok(x)
}

/// Exact PageRank by direct linear solve. `alpha == 1` is routed to
/// [`solve_alpha1`].
pub fn solve_exact(g: &Digraph, alpha: f64) -> Result<PagerankVector, SolveError> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return solve_alpha1(g);
    }
    let r = TransitionMatrix::build(g, alpha)?;
    let n = g.n();
    let mut system = DenseMatrix::identity(n);
    for u in 0..n {
        for (v, &p) in r.column(u).iter().enumerate() {
            system[(v, u)] -= p;
        }
    }
    let values = stationary_solve(system, |x| r.max_residual(x))?;
    Ok(PagerankVector::new(values, alpha, Method::Exact))
}

/// Solves every α in `alphas` independently, in parallel; output order
/// matches input order.
pub fn solve_many(g: &Digraph, alphas: &[f64]) -> Vec<Result<PagerankVector, SolveError>> {
    alphas.par_iter().map(|&a| solve_exact(g, a)).collect()
}

/// Stationary distribution of the pure walk (α = 1), supported on the unique
/// sink strongly connected component.
pub fn solve_alpha1(g: &Digraph) -> Result<PagerankVector, SolveError> {
    if let Some(violation) = g.alpha1_violation() {
        return Err(violation.into());
    }
    let report = g.scc_report();
    let sink = report
        .sink_components()
        .next()
        .expect("validated graph has a sink");
    let members = &report.components[sink];
    let m = members.len();
    let local: std::collections::HashMap<Vertex, usize> =
        members.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut system = DenseMatrix::identity(m);
    for (j, &u) in members.iter().enumerate() {
        let targets = g.out_neighbors(u);
        let p = 1.0 / targets.len() as f64;
        for w in targets {
            system[(local[w], j)] -= p;
        }
    }
    let r = TransitionMatrix::build(g, 1.0)?;
    let embed = |x: &[f64]| {
        let mut full = vec![0.0; g.n()];
        for (&v, &xi) in members.iter().zip(x) {
            full[v] = xi;
        }
        full
    };
    let local_values = stationary_solve(system, |x| r.max_residual(&embed(x)))?;
    Ok(PagerankVector::new(
        embed(&local_values),
        1.0,
        Method::Alpha1,
    ))
}

#[derive(Debug, Clone)]
pub struct PowerOutcome {
    pub vector: PagerankVector,
    pub iterations: usize,
    pub converged: bool,
    /// ℓ₁ change of the final iteration.
    pub last_delta: f64,
}

/// Power iteration `π ← R π` from the uniform vector until the ℓ₁ change
/// drops below `tol`. Running out of iterations is reported through
/// [`PowerOutcome::converged`], not as an error.
///
/// `R` is applied through the arc lists rather than the dense matrix; the
/// operator is the same.
pub fn solve_power(
    g: &Digraph,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PowerOutcome, SolveError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(SolveError::AlphaOutOfRange(alpha));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(SolveError::BadTolerance(tol));
    }
    let n = g.n();
    let nf = n as f64;
    let mut pi = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut last_delta = f64::INFINITY;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let mut teleport = 0.0;
        next.fill(0.0);
        for (u, &p) in pi.iter().enumerate() {
            let targets = g.out_neighbors(u);
            if targets.is_empty() {
                teleport += p / nf;
            } else {
                teleport += (1.0 - alpha) * p / nf;
                let share = alpha * p / targets.len() as f64;
                for &v in targets {
                    next[v] += share;
                }
            }
        }
        for x in next.iter_mut() {
            *x += teleport;
        }
        let total = neumaier_sum(next.iter().copied());
        for x in next.iter_mut() {
            *x /= total;
        }
        last_delta = neumaier_sum(pi.iter().zip(&next).map(|(a, b)| (a - b).abs()));
        std::mem::swap(&mut pi, &mut next);
        if last_delta < tol {
            converged = true;
            break;
        }
    }
    Ok(PowerOutcome {
        vector: PagerankVector::new(pi, alpha, Method::Power),
        iterations,
        converged,
        last_delta,
    })
}

/// Visit frequencies of a seeded random walker over `steps` positions, the
/// uniformly random start included.
pub fn simulate_walk(
    g: &Digraph,
    alpha: f64,
    steps: usize,
    seed: u64,
) -> Result<PagerankVector, SolveError> {
    check_alpha(alpha)?;
    if steps == 0 {
        return Err(SolveError::NoSteps);
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; n];
    let mut v = rng.gen_range(0..n);
    counts[v] += 1;
    for _ in 1..steps {
        let targets = g.out_neighbors(v);
        v = if targets.is_empty() || !rng.gen_bool(alpha) {
            rng.gen_range(0..n)
        } else {
            targets[rng.gen_range(0..targets.len())]
        };
        counts[v] += 1;
    }
    let values = counts
        .into_iter()
        .map(|c| c as f64 / steps as f64)
        .collect();
    Ok(PagerankVector::new(values, alpha, Method::Walk))
}
