//! Gaps between PageRank vectors of one graph at two jumping parameters.

use std::cmp::Ordering;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::csv;
use crate::digraph::{Digraph, GraphError};
use crate::gamma::{build_gamma_general, GammaError};
use crate::linalg::neumaier_sum;
use crate::pagerank::{solve_exact, PagerankVector, SolveError};

/// Largest vertex count the exhaustive search accepts at all.
pub const SEARCH_HARD_CAP: usize = 5;
/// Largest vertex count searched without an explicit long-run opt-in.
pub const SEARCH_DEFAULT_CAP: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscrepancyError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("norm order must be at least 1, got {0}")]
    BadOrder(f64),
    #[error("jumping parameter {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("limit table needs k >= 2, got {0}")]
    LadderTooShort(usize),
    #[error("exhaustive search over {n} vertices refused (limit {limit})")]
    SearchTooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `‖a − b‖_p` for `p` in `[1, ∞]`; `p = f64::INFINITY` is the max norm.
pub fn norm_diff(a: &PagerankVector, b: &PagerankVector, p: f64) -> Result<f64, DiscrepancyError> {
    norm_diff_slices(a.values(), b.values(), p)
}

pub fn norm_diff_slices(a: &[f64], b: &[f64], p: f64) -> Result<f64, DiscrepancyError> {
    if a.len() != b.len() {
        return Err(DiscrepancyError::LengthMismatch(a.len(), b.len()));
    }
    if p.is_nan() || p < 1.0 {
        return Err(DiscrepancyError::BadOrder(p));
    }
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    Ok(if p == f64::INFINITY {
        diffs.fold(0.0, f64::max)
    } else if p == 1.0 {
        neumaier_sum(diffs)
    } else if p == 2.0 {
        neumaier_sum(diffs.map(|d| d * d)).sqrt()
    } else {
        neumaier_sum(diffs.map(|d| d.powf(p))).powf(1.0 / p)
    })
}

/// `(d1, d2, dinf)` between two vectors of equal length.
fn three_norms(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let n = |p| norm_diff_slices(a, b, p).expect("equal lengths");
    (n(1.0), n(2.0), n(f64::INFINITY))
}

/// `{0, 0.05, …, 0.95} ∪ {1 − 10^-j : j = 1..6} ∪ {1}`, sorted.
pub fn default_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
    grid.extend((1..=6).map(|j| 1.0 - 10f64.powi(-j)));
    grid.push(1.0);
    normalize_grid(grid)
}

/// Sorts and removes values within 1e-15 of their predecessor.
pub fn normalize_grid(mut grid: Vec<f64>) -> Vec<f64> {
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|b, a| (*b - *a).abs() <= 1e-15);
    grid
}

fn check_grid(grid: &[f64]) -> Result<(), DiscrepancyError> {
    match grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        Some(&a) => Err(DiscrepancyError::AlphaOutOfRange(a)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub alpha: f64,
    pub d1: f64,
    pub d2: f64,
    pub dinf: f64,
}

/// Discrepancies of every grid point against one reference parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub alpha_ref: f64,
    pub samples: Vec<SweepSample>,
}

impl SweepResult {
    pub fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        csv::write_header(w, &["alpha", "d1", "d2", "dinf"])?;
        for s in &self.samples {
            csv::write_row(w, &[s.alpha, s.d1, s.d2, s.dinf].map(csv::fmt_f64))?;
        }
        Ok(())
    }
}

/// Solves at `alpha_ref` and at every grid value (in parallel), reporting
/// `‖π_ref − π_α‖` in the 1-, 2- and ∞-norms. Samples keep grid order.
pub fn sweep(g: &Digraph, alpha_ref: f64, grid: &[f64]) -> Result<SweepResult, DiscrepancyError> {
    check_grid(std::slice::from_ref(&alpha_ref))?;
    check_grid(grid)?;
    let reference = solve_exact(g, alpha_ref)?;
    let samples = grid
        .par_iter()
        .map(|&alpha| {
            let pi = solve_exact(g, alpha)?;
            let (d1, d2, dinf) = three_norms(reference.values(), pi.values());
            Ok(SweepSample {
                alpha,
                d1,
                d2,
                dinf,
            })
        })
        .collect::<Result<Vec<_>, DiscrepancyError>>()?;
    Ok(SweepResult { alpha_ref, samples })
}

/// A graph and the pair of jumping parameters giving its largest observed
/// 2-norm gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRecord {
    pub graph: Digraph,
    pub alpha1: f64,
    pub alpha2: f64,
    pub d2: f64,
}

impl SearchRecord {
    /// Re-solves both parameters and recomputes the gap.
    pub fn recompute(&self) -> Result<f64, DiscrepancyError> {
        let a = solve_exact(&self.graph, self.alpha1)?;
        let b = solve_exact(&self.graph, self.alpha2)?;
        norm_diff(&a, &b, 2.0)
    }
}

/// Larger gap first; ties broken towards the lexicographically smaller pair.
fn better(cand: (f64, f64, f64), best: (f64, f64, f64)) -> bool {
    match cand.0.total_cmp(&best.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (cand.1, cand.2) < (best.1, best.2),
    }
}

struct PairSearch<'g> {
    g: &'g Digraph,
    alpha1_ok: bool,
}

impl PairSearch<'_> {
    fn admissible(&self, a: f64) -> bool {
        (0.0..1.0).contains(&a) || (a == 1.0 && self.alpha1_ok)
    }

    fn solve_all(&self, alphas: &[f64]) -> Result<Vec<Vec<f64>>, DiscrepancyError> {
        alphas
            .iter()
            .map(|&a| Ok(solve_exact(self.g, a)?.into_values()))
            .collect()
    }

    /// Best `(d2, α1, α2)` over pairs `α1 < α2` drawn from the sorted `alphas`.
    fn best_pair(&self, alphas: &[f64]) -> Result<(f64, f64, f64), DiscrepancyError> {
        let vecs = self.solve_all(alphas)?;
        let mut best = (0.0, alphas[0], alphas[0]);
        let mut seen_pair = false;
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let d2 = norm_diff_slices(&vecs[i], &vecs[j], 2.0)?;
                let cand = (d2, alphas[i], alphas[j]);
                if !seen_pair || better(cand, best) {
                    best = cand;
                    seen_pair = true;
                }
            }
        }
        Ok(best)
    }
}

/// Half the distance from `a` to its nearest neighbour in the sorted `grid`.
fn local_step(grid: &[f64], a: f64) -> f64 {
    grid.iter()
        .filter(|&&x| x != a)
        .map(|&x| (x - a).abs())
        .fold(f64::INFINITY, f64::min)
        / 2.0
}

/// Maximises `‖π_α1 − π_α2‖₂` over pairs from `grid` (α = 1 only when the
/// graph admits it), then runs `refine_rounds` rounds of local refinement
/// around the incumbent, halving the step each round; a refined pair replaces
/// the incumbent only if it strictly improves the gap. The result does not
/// depend on the order of `grid`.
pub fn max_pair(
    g: &Digraph,
    grid: &[f64],
    refine_rounds: usize,
) -> Result<SearchRecord, DiscrepancyError> {
    check_grid(grid)?;
    let search = PairSearch {
        g,
        alpha1_ok: g.alpha1_valid(),
    };
    let alphas = normalize_grid(
        grid.iter()
            .copied()
            .filter(|&a| search.admissible(a))
            .collect(),
    );
    if alphas.is_empty() {
        return Err(DiscrepancyError::EmptyGrid);
    }
    let mut best = search.best_pair(&alphas)?;

    if best.1 != best.2 {
        let mut step1 = local_step(&alphas, best.1);
        let mut step2 = local_step(&alphas, best.2);
        for _ in 0..refine_rounds {
            let around = |a: f64, h: f64| [a - h, a, a + h];
            let mut cands: Vec<f64> = around(best.1, step1)
                .into_iter()
                .chain(around(best.2, step2))
                .filter(|&a| search.admissible(a))
                .collect();
            cands = normalize_grid(cands);
            let cand = search.best_pair(&cands)?;
            if cand.0 > best.0 {
                best = cand;
            }
            step1 /= 2.0;
            step2 /= 2.0;
        }
    }
    Ok(SearchRecord {
        graph: g.clone(),
        alpha1: best.1,
        alpha2: best.2,
        d2: best.0,
    })
}

/// One row of the convergence table for Γ(k, m) at α = 1 versus α = 1 − 1/k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub k: usize,
    pub pi_a: f64,
    /// PageRank of the distinguished C vertex at α = 1 − 1/k.
    pub pi_c: f64,
    /// `‖π_{1−1/k}‖₂²`.
    pub norm_sq: f64,
    pub d1: f64,
    pub d2: f64,
    pub dinf: f64,
}

/// Builds Γ(k, m) for each `k` and tabulates the gap between α = 1 and
/// α = 1 − 1/k. Rows keep the order of `k_values`.
pub fn limit_table(k_values: &[usize], m: usize) -> Result<Vec<LimitRow>, DiscrepancyError> {
    if let Some(&k) = k_values.iter().find(|&&k| k < 2) {
        return Err(DiscrepancyError::LadderTooShort(k));
    }
    k_values
        .par_iter()
        .map(|&k| {
            let (g, labels) = build_gamma_general(k, m)?;
            let at_one = solve_exact(&g, 1.0)?;
            let near_one = solve_exact(&g, labels.critical_alpha())?;
            let (d1, d2, dinf) = three_norms(at_one.values(), near_one.values());
            Ok(LimitRow {
                k,
                pi_a: near_one.get(labels.a),
                pi_c: near_one.get(labels.distinguished_c()),
                norm_sq: near_one.norm_sq(),
                d1,
                d2,
                dinf,
            })
        })
        .collect()
}

pub fn write_limit_csv<W: Write + ?Sized>(w: &mut W, rows: &[LimitRow]) -> io::Result<()> {
    csv::write_header(w, &["k", "pi_A", "pi_C", "norm_sq", "d1", "d2", "dinf"])?;
    for r in rows {
        let mut fields = vec![r.k.to_string()];
        fields.extend([r.pi_a, r.pi_c, r.norm_sq, r.d1, r.d2, r.dinf].map(csv::fmt_f64));
        csv::write_row(w, &fields)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub grid: Vec<f64>,
    pub top: usize,
    pub refine_rounds: usize,
    /// Permit n = 5 (2^25 graphs).
    pub allow_large: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            top: 10,
            refine_rounds: 0,
            allow_large: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedRecord {
    /// 1-based.
    pub rank: usize,
    pub bitmask: u64,
    pub record: SearchRecord,
}

/// Runs [`max_pair`] on every digraph with `n` vertices (loops allowed) and
/// returns the `top` records, largest gap first. Ties go to the smaller
/// `(α1, α2)` and then the smaller adjacency bitmask.
pub fn brute_search(
    n: usize,
    config: &SearchConfig,
) -> Result<Vec<RankedRecord>, DiscrepancyError> {
    let limit = if config.allow_large {
        SEARCH_HARD_CAP
    } else {
        SEARCH_DEFAULT_CAP
    };
    if n == 0 {
        return Err(GraphError::Empty.into());
    }
    if n > limit {
        return Err(DiscrepancyError::SearchTooLarge { n, limit });
    }
    check_grid(&config.grid)?;
    if config.grid.is_empty() {
        return Err(DiscrepancyError::EmptyGrid);
    }
    let total: u64 = 1 << (n * n);
    let mut found = (0..total)
        .into_par_iter()
        .map(|mask| {
            let g = Digraph::from_bitmask(n, mask)?;
            let r = max_pair(&g, &config.grid, config.refine_rounds)?;
            Ok((r.d2, r.alpha1, r.alpha2, mask))
        })
        .collect::<Result<Vec<_>, DiscrepancyError>>()?;
    found.sort_by(|x, y| {
        y.0.total_cmp(&x.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.total_cmp(&y.2))
            .then(x.3.cmp(&y.3))
    });
    found
        .into_iter()
        .take(config.top)
        .enumerate()
        .map(|(i, (d2, alpha1, alpha2, mask))| {
            Ok(RankedRecord {
                rank: i + 1,
                bitmask: mask,
                record: SearchRecord {
                    graph: Digraph::from_bitmask(n, mask)?,
                    alpha1,
                    alpha2,
                    d2,
                },
            })
        })
        .collect()
}

/// One line per record: `rank,bitmask,alpha1,alpha2,d2`, with the bitmask as
/// a row-major string of adjacency bits.
pub fn write_search<W: Write + ?Sized>(w: &mut W, records: &[RankedRecord]) -> io::Result<()> {
    csv::write_header(w, &["rank", "bitmask", "alpha1", "alpha2", "d2"])?;
    for r in records {
        csv::write_row(
            w,
            &[
                r.rank.to_string(),
                r.record.graph.adjacency_bits(),
                csv::fmt_f64(r.record.alpha1),
                csv::fmt_f64(r.record.alpha2),
                csv::fmt_f64(r.record.d2),
            ],
        )?;
    }
    Ok(())
}
