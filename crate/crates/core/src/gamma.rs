//! The ladder family Γ(k, m) and closed-form statements about it.
//!
//! Γ(k, m) has `m` looped "C" vertices that all point at each other, a chain
//! `B_1 → … → B_k → A` whose members all fall back to every C vertex, and a
//! looped absorbing vertex `A`. Only the last C vertex feeds `B_1`. Γ(k) is
//! Γ(k, 2).
//!
//! At α = 1 every walker ends up stuck in `A`; at α = 1 − 1/k almost no mass
//! reaches `A` and the C vertices each hold about `m / (1 + m²)`. The gap
//! between the two PageRank vectors approaches
//! `f(m) = sqrt(1 + (m⁴ + 2m³ + m) / ((m + 2)(m² + 1)²))`.
//!
//! Vertex layout: `C_1..C_m` are `0..m`, `B_1..B_k` are `m..m+k`, and `A`
//! is `m + k`.

use thiserror::Error;

use crate::digraph::{Digraph, Vertex};
use crate::linalg::neumaier_sum;
use crate::pagerank::PagerankVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GammaError {
    #[error("ladder length k must be at least 1")]
    ZeroLength,
    #[error("number of C vertices m must be at least 1")]
    ZeroClique,
    #[error("vector has {got} entries but the construction has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("balance equations hold at alpha = 1 - 1/k = {expected} for k >= 2, vector was solved at alpha = {got}")]
    WrongAlpha { expected: f64, got: f64 },
    #[error("B index {i} outside 1..={k}")]
    IndexOutOfRange { i: usize, k: usize },
}

/// Role of every vertex of a constructed Γ(k, m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaLabels {
    pub k: usize,
    pub m: usize,
    pub a: Vertex,
    /// `b[i - 1]` is `B_i`.
    pub b: Vec<Vertex>,
    /// `c[i - 1]` is `C_i`; the last one feeds `B_1`.
    pub c: Vec<Vertex>,
}

impl GammaLabels {
    fn new(k: usize, m: usize) -> Self {
        Self {
            k,
            m,
            a: m + k,
            b: (m..m + k).collect(),
            c: (0..m).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.k + self.m + 1
    }

    /// The C vertex carrying the arc to `B_1`.
    pub fn distinguished_c(&self) -> Vertex {
        self.c[self.m - 1]
    }

    /// Human-readable role of `v`, e.g. `"B_3"`.
    pub fn role(&self, v: Vertex) -> String {
        if v == self.a {
            "A".to_string()
        } else if v < self.m {
            format!("C_{}", v + 1)
        } else {
            format!("B_{}", v - self.m + 1)
        }
    }

    /// The jumping parameter 1 − 1/k at which the ladder is analysed.
    pub fn critical_alpha(&self) -> f64 {
        1.0 - 1.0 / self.k as f64
    }

    fn check_vector(&self, pi: &PagerankVector) -> Result<(), GammaError> {
        if pi.len() != self.n() {
            return Err(GammaError::LengthMismatch {
                expected: self.n(),
                got: pi.len(),
            });
        }
        let expected = self.critical_alpha();
        if self.k < 2 || (pi.alpha() - expected).abs() > 1e-15 {
            return Err(GammaError::WrongAlpha {
                expected,
                got: pi.alpha(),
            });
        }
        Ok(())
    }
}

/// Γ(k): the two-C ladder on `k + 3` vertices.
pub fn build_gamma(k: usize) -> Result<(Digraph, GammaLabels), GammaError> {
    build_gamma_general(k, 2)
}

pub fn build_gamma_general(k: usize, m: usize) -> Result<(Digraph, GammaLabels), GammaError> {
    if k == 0 {
        return Err(GammaError::ZeroLength);
    }
    if m == 0 {
        return Err(GammaError::ZeroClique);
    }
    let labels = GammaLabels::new(k, m);
    let mut arcs = Vec::with_capacity(m * m + (m + 1) * k + 2);
    for &ci in &labels.c {
        arcs.extend(labels.c.iter().map(|&cj| (ci, cj)));
    }
    arcs.push((labels.distinguished_c(), labels.b[0]));
    for (i, &bi) in labels.b.iter().enumerate() {
        arcs.extend(labels.c.iter().map(|&cj| (bi, cj)));
        arcs.push((bi, labels.b.get(i + 1).copied().unwrap_or(labels.a)));
    }
    arcs.push((labels.a, labels.a));
    let g = Digraph::from_arcs(labels.n(), arcs).expect("construction arcs are distinct");
    Ok((g, labels))
}

/// Predicted limiting PageRank of each C vertex, `m / (1 + m²)`.
pub fn predict_c_mass(m: f64) -> f64 {
    m / (1.0 + m * m)
}

/// Predicted limiting 2-norm gap `f(m)`; accepts real `m > 0`.
pub fn predict_discrepancy(m: f64) -> f64 {
    let m2 = m * m;
    let num = m2 * m2 + 2.0 * m2 * m + m;
    let den = (m + 2.0) * (m2 + 1.0) * (m2 + 1.0);
    (1.0 + num / den).sqrt()
}

/// Maximises `f` on `[lo, hi]` by golden-section search. `f` has a single
/// interior maximum on `(0, ∞)`.
pub fn argmax_discrepancy(lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (predict_discrepancy(x1), predict_discrepancy(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = predict_discrepancy(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = predict_discrepancy(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, predict_discrepancy(x))
}

/// Upper bound on `π_A` of Γ(k) at α = 1 − 1/k: `k / 3^k + 3 / (2(k + 1))`.
pub fn pi_a_upper_bound(k: usize) -> f64 {
    let k = k as f64;
    k / 3f64.powf(k) + 3.0 / (2.0 * (k + 1.0))
}

/// Geometric lower bound on `π_{B_i}` of Γ(k) at α = 1 − 1/k:
/// `(1 − 1/k)^i · π_{C_2} / 3^i`.
pub fn bi_lower_bound(k: usize, i: usize, pi_c2: f64) -> Result<f64, GammaError> {
    if i == 0 || i > k {
        return Err(GammaError::IndexOutOfRange { i, k });
    }
    let ratio = (1.0 - 1.0 / k as f64) / 3.0;
    Ok(ratio.powi(i as i32) * pi_c2)
}

/// Largest residual of the chain balance equations
/// `π_{B_i} = (1 − α)/n + α · π_{B_{i−1}} / (m + 1)` with `π_{B_0} := π_{C_m}`,
/// for a vector solved at α = 1 − 1/k. For m = 2 the jump term is
/// `(1/k) / (3 + k)`.
pub fn check_b_recurrence(labels: &GammaLabels, pi: &PagerankVector) -> Result<f64, GammaError> {
    labels.check_vector(pi)?;
    let alpha = pi.alpha();
    let jump = (1.0 - alpha) / labels.n() as f64;
    let fanout = (labels.m + 1) as f64;
    let mut prev = pi.get(labels.distinguished_c());
    let mut worst = 0.0f64;
    for &b in &labels.b {
        let predicted = jump + alpha * prev / fanout;
        worst = worst.max((pi.get(b) - predicted).abs());
        prev = pi.get(b);
    }
    Ok(worst)
}

/// Residual of the balance equation at the distinguished C vertex,
/// `π_{C_m} = (1 − α)/n + α Σπ_B/(m + 1) + α π_{C_m}/(m + 1) + α Σ_{j<m} π_{C_j}/m`.
pub fn check_c_balance(labels: &GammaLabels, pi: &PagerankVector) -> Result<f64, GammaError> {
    labels.check_vector(pi)?;
    let alpha = pi.alpha();
    let m = labels.m as f64;
    let jump = (1.0 - alpha) / labels.n() as f64;
    let sum_b = neumaier_sum(labels.b.iter().map(|&b| pi.get(b)));
    let c_m = pi.get(labels.distinguished_c());
    let others = neumaier_sum(labels.c[..labels.m - 1].iter().map(|&c| pi.get(c)));
    let predicted = jump + alpha * sum_b / (m + 1.0) + alpha * c_m / (m + 1.0) + alpha * others / m;
    Ok((c_m - predicted).abs())
}
