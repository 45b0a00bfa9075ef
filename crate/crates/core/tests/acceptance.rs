//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits
//! nonzero if any fail.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pagerank_extremal::digraph::Digraph;
use pagerank_extremal::discrepancy::{
    brute_search, default_grid, limit_table, norm_diff, sweep, SearchConfig,
};
use pagerank_extremal::gamma::{
    argmax_discrepancy, bi_lower_bound, build_gamma, pi_a_upper_bound, predict_discrepancy,
};
use pagerank_extremal::pagerank::{
    build_transition, simulate_walk, solve_exact, solve_power, PagerankVector,
    DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn target() -> f64 {
    (67.0f64 / 50.0).sqrt()
}

fn critical(k: usize) -> Result<(pagerank_extremal::GammaLabels, PagerankVector), String> {
    let (g, l) = build_gamma(k).map_err(|e| e.to_string())?;
    let pi = solve_exact(&g, l.critical_alpha()).map_err(|e| e.to_string())?;
    Ok((l, pi))
}

fn ac1() -> Outcome {
    let rows = limit_table(&[10, 100, 1000], 2).map_err(|e| e.to_string())?;
    let d: Vec<f64> = rows.iter().map(|r| r.d2).collect();
    let gap = (d[2] - target()).abs();
    ensure(gap < 0.01, format!("|d2(1000) - sqrt(67/50)| = {gap:.3e}"))?;
    ensure(d[0] < d[1] && d[1] < d[2], format!("not increasing: {d:?}"))?;
    Ok(format!(
        "d2(10)={:.6} d2(100)={:.6} d2(1000)={:.6} gap={gap:.2e}",
        d[0], d[1], d[2]
    ))
}

fn ac2() -> Outcome {
    let mut ks: Vec<usize> = (2..=500).collect();
    ks.push(1000);
    let spreads = ks
        .par_iter()
        .map(|&k| {
            let (l, pi) = critical(k)?;
            Ok((k, pi.get(l.c[0]), (pi.get(l.c[0]) - pi.get(l.c[1])).abs()))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let (_, c1, _) = *spreads.last().unwrap();
    let worst = spreads.iter().map(|s| s.2).fold(0.0f64, f64::max);
    ensure((c1 - 0.4).abs() < 0.01, format!("pi_C1(1000) = {c1}"))?;
    ensure(worst < 1e-9, format!("max |pi_C1 - pi_C2| = {worst:.3e}"))?;
    Ok(format!(
        "pi_C1(1000)={c1:.6}; max |pi_C1-pi_C2| over {} k = {worst:.2e}",
        ks.len()
    ))
}

fn ac3() -> Outcome {
    let (_, pi) = critical(1000)?;
    let s = pi.norm_sq();
    ensure((s - 0.34).abs() < 0.01, format!("norm_sq = {s}"))?;
    Ok(format!("||pi||^2 = {s:.6}"))
}

fn ac4() -> Outcome {
    let worst = (2..=500usize)
        .into_par_iter()
        .map(|k| {
            let (l, pi) = critical(k)?;
            let bound = pi_a_upper_bound(k);
            let a = pi.get(l.a);
            if a < bound {
                Ok(bound - a)
            } else {
                Err(format!("k={k}: pi_A={a} >= {bound}"))
            }
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(format!("k=2..500, smallest margin {worst:.3e}"))
}

fn ac5() -> Outcome {
    let checked = (2..=200usize)
        .into_par_iter()
        .map(|k| {
            let (l, pi) = critical(k)?;
            let c2 = pi.get(l.c[1]);
            for (idx, &b) in l.b.iter().enumerate() {
                let i = idx + 1;
                let lower = bi_lower_bound(k, i, c2).map_err(|e| e.to_string())?;
                if pi.get(b) <= lower || pi.get(b).is_nan() {
                    return Err(format!("k={k} i={i}: {} <= {lower}", pi.get(b)));
                }
            }
            Ok(k)
        })
        .collect::<Result<Vec<usize>, String>>()?;
    let pairs: usize = checked.iter().sum();
    Ok(format!("{pairs} (k, i) pairs for k=2..200"))
}

fn ac6() -> Outcome {
    let r = limit_table(&[1000], 2).map_err(|e| e.to_string())?[0];
    ensure(r.d1 > 1.99, format!("d1 = {}", r.d1))?;
    ensure(r.dinf > 0.99, format!("dinf = {}", r.dinf))?;
    Ok(format!("d1={:.6} dinf={:.6}", r.d1, r.dinf))
}

fn ac7() -> Outcome {
    let f1 = predict_discrepancy(1.0);
    let f2 = predict_discrepancy(2.0);
    ensure(
        (f1 - (4.0f64 / 3.0).sqrt()).abs() <= 1e-12,
        format!("f(1) = {f1}"),
    )?;
    ensure((f2 - target()).abs() <= 1e-12, format!("f(2) = {f2}"))?;
    let (x, fx) = argmax_discrepancy(1e-3, 10.0, 1e-10);
    ensure((x - 1.445036).abs() < 1e-4, format!("argmax = {x}"))?;
    let best = (1..=10)
        .max_by(|&a, &b| predict_discrepancy(a as f64).total_cmp(&predict_discrepancy(b as f64)))
        .unwrap();
    ensure(best == 2, format!("integer maximizer = {best}"))?;
    Ok(format!(
        "f(1)={f1:.12} f(2)={f2:.12} argmax={x:.7} f*={fx:.7} integer m=2"
    ))
}

fn ac8() -> Outcome {
    let mut parts = Vec::new();
    for m in [1, 2, 3] {
        let d2 = limit_table(&[1000], m).map_err(|e| e.to_string())?[0].d2;
        let f = predict_discrepancy(m as f64);
        let gap = (d2 - f).abs();
        ensure(gap < 0.02, format!("m={m}: d2={d2} f={f}"))?;
        parts.push(format!("m={m} gap={gap:.2e}"));
    }
    Ok(parts.join(", "))
}

fn ac9() -> Outcome {
    let (g, _) = build_gamma(1000).map_err(|e| e.to_string())?;
    let res = sweep(&g, 1.0, &default_grid()).map_err(|e| e.to_string())?;
    let at = |a: f64| res.samples.iter().find(|s| s.alpha == a).map(|s| s.d2);
    let one = at(1.0).ok_or("no sample at 1")?;
    let near = at(0.999).ok_or("no sample at 0.999")?;
    ensure(one == 0.0, format!("d2 at 1 = {one}"))?;
    ensure(near > 1.1, format!("d2 at 0.999 = {near}"))?;
    Ok(format!("d2(1)={one} d2(0.999)={near:.6}"))
}

fn random_graphs(count: usize, seed: u64) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            let p: f64 = rng.gen_range(0.05..0.6);
            let mut g = Digraph::new(n).unwrap();
            for u in 0..n {
                for v in 0..n {
                    if rng.gen_bool(p) {
                        g.add_arc(u, v).unwrap();
                    }
                }
            }
            g
        })
        .collect()
}

fn random_alpha(rng: &mut ChaCha8Rng, g: &Digraph) -> f64 {
    if g.alpha1_valid() && rng.gen_bool(0.2) {
        1.0
    } else {
        rng.gen_range(0.0..1.0)
    }
}

fn ac10() -> Outcome {
    let graphs = random_graphs(200, 0xFAC7);
    let mut rng = ChaCha8Rng::seed_from_u64(0x00A1);
    let mut with_one = 0;
    let mut worst_delta = 0.0f64;
    for (idx, g) in graphs.iter().enumerate() {
        let n = g.n();
        let uniform = solve_exact(g, 0.0).map_err(|e| e.to_string())?;
        for &x in uniform.values() {
            ensure(
                (x - 1.0 / n as f64).abs() <= 1e-15,
                format!("graph {idx}: alpha=0 not uniform"),
            )?;
        }
        let (a1, a2) = (random_alpha(&mut rng, g), random_alpha(&mut rng, g));
        with_one += usize::from(a1 == 1.0 || a2 == 1.0);
        let p1 = solve_exact(g, a1).map_err(|e| e.to_string())?;
        let p2 = solve_exact(g, a2).map_err(|e| e.to_string())?;
        for (pi, a) in [(&p1, a1), (&p2, a2)] {
            ensure(
                pi.values().iter().all(|&x| x >= 0.0),
                format!("graph {idx}: negative entry"),
            )?;
            ensure(
                (pi.sum() - 1.0).abs() <= 1e-12,
                format!("graph {idx}: sum {}", pi.sum()),
            )?;
            ensure(
                pi.norm_sq().sqrt() <= 1.0 + 1e-12,
                format!("graph {idx}: 2-norm > 1"),
            )?;
            ensure(
                pi.values().iter().all(|&x| x <= 1.0 + 1e-12),
                format!("graph {idx}: entry > 1"),
            )?;
            let r = build_transition(g, a).map_err(|e| e.to_string())?;
            let delta = r.max_residual(pi.values()).map_err(|e| e.to_string())?;
            worst_delta = worst_delta.max(delta);
            ensure(
                delta <= 1e-9,
                format!("graph {idx}: max |delta pi| = {delta:.3e}"),
            )?;
        }
        let dinf = norm_diff(&p1, &p2, f64::INFINITY).map_err(|e| e.to_string())?;
        let d2 = norm_diff(&p1, &p2, 2.0).map_err(|e| e.to_string())?;
        ensure(dinf <= 1.0 + 1e-12, format!("graph {idx}: dinf = {dinf}"))?;
        ensure(d2 <= 2f64.sqrt() + 1e-12, format!("graph {idx}: d2 = {d2}"))?;
    }
    Ok(format!(
        "200 graphs, {with_one} pairs with alpha=1, max |delta pi| = {worst_delta:.2e}"
    ))
}

fn ac11() -> Outcome {
    let graphs = random_graphs(200, 0x0C1E);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A11);
    let mut worst = 0.0f64;
    for (idx, g) in graphs.iter().enumerate() {
        let a = rng.gen_range(0.0..=0.9);
        let exact = solve_exact(g, a).map_err(|e| e.to_string())?;
        let power = solve_power(g, a, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)
            .map_err(|e| e.to_string())?;
        ensure(
            power.converged,
            format!("graph {idx}: power did not converge"),
        )?;
        let d = norm_diff(&exact, &power.vector, f64::INFINITY).map_err(|e| e.to_string())?;
        worst = worst.max(d);
        ensure(
            d < 1e-8,
            format!("graph {idx} alpha={a}: exact vs power {d:.3e}"),
        )?;
    }
    let (g, _) = build_gamma(10).map_err(|e| e.to_string())?;
    let exact = solve_exact(&g, 0.85).map_err(|e| e.to_string())?;
    let walk = simulate_walk(&g, 0.85, 1_000_000, 2024).map_err(|e| e.to_string())?;
    let mc = norm_diff(&exact, &walk, f64::INFINITY).map_err(|e| e.to_string())?;
    ensure(mc < 0.01, format!("exact vs walk {mc:.3e}"))?;
    Ok(format!(
        "exact vs power max {worst:.2e}; exact vs walk {mc:.2e}"
    ))
}

fn ac12() -> Outcome {
    let config = SearchConfig {
        top: 1,
        ..SearchConfig::default()
    };
    let mut parts = Vec::new();
    for (n, frozen) in [(3usize, (2.0f64 / 3.0).sqrt()), (4, 0.75f64.sqrt())] {
        let best = brute_search(n, &config).map_err(|e| e.to_string())?;
        let top = &best[0].record;
        ensure(
            top.d2 < target(),
            format!("n={n}: max d2 {} not below target", top.d2),
        )?;
        ensure(
            (top.d2 - frozen).abs() <= 1e-12,
            format!("n={n}: max d2 {} differs from fixture {frozen}", top.d2),
        )?;
        parts.push(format!(
            "n={n} max d2={:.12} at ({}, {}) mask {}",
            top.d2, top.alpha1, top.alpha2, best[0].bitmask
        ));
    }
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("ladder 2-norm gap tends to sqrt(67/50)", ac1),
        ("C masses tend to 2/5 and agree", ac2),
        ("squared norm near 1 tends to 17/50", ac3),
        ("upper bound on pi_A", ac4),
        ("geometric lower bound on B chain", ac5),
        ("1-norm and max-norm gaps near their suprema", ac6),
        ("closed-form prediction f(m)", ac7),
        ("prediction matches wider cliques", ac8),
        ("sweep endpoint behaviour", ac9),
        ("facts over random digraphs", ac10),
        ("solver agreement", ac11),
        (
            "exhaustive small digraphs stay below the ladder limit",
            ac12,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] AC{} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] AC{} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
