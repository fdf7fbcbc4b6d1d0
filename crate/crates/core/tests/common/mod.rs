//! Brute-force reference implementations used by the integration and
//! acceptance tests. None of these share code with the library paths they
//! check.
#![allow(dead_code)]

use rand::Rng;

/// Every maximal cross pair `(a_doc, a_start, b_doc, b_start, len)` by direct
/// comparison of all position pairs. O(L^2 * len).
pub fn naive_clone_pairs(
    a: &[Vec<String>],
    b: &[Vec<String>],
    min_tokens: usize,
) -> Vec<(usize, usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for (da, ta) in a.iter().enumerate() {
        for (db, tb) in b.iter().enumerate() {
            for i in 0..ta.len() {
                for j in 0..tb.len() {
                    if i > 0 && j > 0 && ta[i - 1] == tb[j - 1] {
                        continue;
                    }
                    let mut l = 0;
                    while i + l < ta.len() && j + l < tb.len() && ta[i + l] == tb[j + l] {
                        l += 1;
                    }
                    if l >= min_tokens {
                        out.push((da, i, db, j, l));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Random documents over a small alphabet, with occasional shared runs
/// copied between sides so long matches actually occur.
pub fn random_clone_corpora(
    rng: &mut impl Rng,
    max_total_tokens: usize,
) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let alphabet = rng.gen_range(2..6);
    let n_a = rng.gen_range(0..8);
    let n_b = rng.gen_range(0..8);
    let budget = max_total_tokens / (n_a + n_b).max(1);
    let doc = |rng: &mut dyn rand::RngCore| -> Vec<String> {
        let len = rng.gen_range(0..=budget.min(120));
        (0..len)
            .map(|_| format!("t{}", rng.gen_range(0..alphabet)))
            .collect()
    };
    let a: Vec<Vec<String>> = (0..n_a).map(|_| doc(rng)).collect();
    let mut b: Vec<Vec<String>> = (0..n_b).map(|_| doc(rng)).collect();
    // plant copies of A fragments into B
    for d in b.iter_mut() {
        if a.is_empty() || !rng.gen_bool(0.6) {
            continue;
        }
        let src = &a[rng.gen_range(0..a.len())];
        if src.is_empty() || d.is_empty() {
            continue;
        }
        let s = rng.gen_range(0..src.len());
        let e = rng.gen_range(s..=src.len());
        let at = rng.gen_range(0..d.len());
        let tail = d.split_off(at);
        d.extend_from_slice(&src[s..e]);
        d.extend(tail);
        d.truncate(budget.min(120));
    }
    (a, b)
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
    let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (nu * nv)
}

/// Average cosine over all cross pairs, skipping zero vectors.
pub fn brute_mean_pairwise_cosine(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let nonzero = |v: &&Vec<f64>| v.iter().any(|x| *x != 0.0);
    let mut sum = 0.0;
    let mut n = 0usize;
    for u in a.iter().filter(nonzero) {
        for v in b.iter().filter(nonzero) {
            sum += cosine(u, v);
            n += 1;
        }
    }
    sum / n as f64
}

/// Exact two-sided Mann-Whitney p by enumerating every way to choose which
/// |a| of the pooled values form sample A. U is computed from raw pairwise
/// comparisons (ties count 1/2), independent of ranking.
pub fn exact_mwu_p(a: &[f64], b: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let na = a.len();
    let u_of = |xs: &[f64], ys: &[f64]| -> f64 {
        let mut u = 0.0;
        for x in xs {
            for y in ys {
                if x > y {
                    u += 1.0;
                } else if x == y {
                    u += 0.5;
                }
            }
        }
        u
    };
    let u_obs = u_of(a, b);
    let mean = (na * (n - na)) as f64 / 2.0;
    let obs_dev = (u_obs - mean).abs();
    let mut extreme = 0u64;
    let mut total = 0u64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (i, v) in pooled.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    xs.push(*v);
                } else {
                    ys.push(*v);
                }
            }
            (xs, ys)
        };
        total += 1;
        if (u_of(&xs, &ys) - mean).abs() >= obs_dev - 1e-9 {
            extreme += 1;
        }
    }
    (u_obs, extreme as f64 / total as f64)
}
