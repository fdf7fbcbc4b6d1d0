//! Mann-Whitney U test, two-sided.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

/// Largest combined sample size for which the exact permutation p-value is
/// also computed.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MannWhitney {
    pub u_a: f64,
    pub u_b: f64,
    pub z: f64,
    /// Normal approximation with tie-corrected variance and continuity
    /// correction.
    pub p: f64,
    pub p_exact: Option<f64>,
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("Mann-Whitney U needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite observation".into()));
    }
    Ok(())
}

/// Midranks of `values` (1-based) and the tie term `sum(t^3 - t)`.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

fn u_of(rank_sum: f64, n: usize) -> f64 {
    rank_sum - (n * (n + 1)) as f64 / 2.0
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check(a, b)?;
    let (na, nb) = (a.len(), b.len());
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&all);
    let u_a = u_of(ranks[..na].iter().sum(), na);
    let u_b = (na * nb) as f64 - u_a;
    let n = (na + nb) as f64;
    let mu = (na * nb) as f64 / 2.0;
    let var = (na * nb) as f64 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let (z, p) = if var <= 0.0 {
        (0.0, 1.0)
    } else {
        let dev = ((u_a - mu).abs() - 0.5).max(0.0);
        let z = dev / var.sqrt() * (u_a - mu).signum();
        let std = Normal::new(0.0, 1.0).expect("standard normal");
        (z, (2.0 * std.sf(dev / var.sqrt())).min(1.0))
    };
    let p_exact = if na + nb <= EXACT_LIMIT {
        Some(exact_permutation_p(a, b)?)
    } else {
        None
    };
    Ok(MannWhitney {
        u_a,
        u_b,
        z,
        p,
        p_exact,
    })
}

/// Two-sided exact p-value: the share of all relabelings of the pooled
/// midranks whose U lies at least as far from `n_a n_b / 2` as observed.
pub fn exact_permutation_p(a: &[f64], b: &[f64]) -> Result<f64> {
    check(a, b)?;
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    if n > 24 {
        return Err(Error::InvalidArgument(format!(
            "exact test over {n} observations is too large"
        )));
    }
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, _) = midranks(&all);
    let mu = (na * nb) as f64 / 2.0;
    let observed = (u_of(ranks[..na].iter().sum(), na) - mu).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if (u_of(sum, na) - mu).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}
