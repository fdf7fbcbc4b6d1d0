use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Performance of one fine-tuned model and the time it took to fine-tune.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfTimeRecord {
    pub model: String,
    pub performance: f64,
    pub fine_tune_time: f64,
}

/// Performance-to-time ratio of each model: performance normalized by the
/// best performance, divided by time normalized by the longest time.
///
/// Invariant under rescaling all performances or all times by a positive
/// constant, so units do not matter.
pub fn ptr(records: &[PerfTimeRecord]) -> Result<BTreeMap<String, f64>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("PTR needs at least one record"));
    }
    for r in records {
        if !(r.fine_tune_time.is_finite() && r.fine_tune_time > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "model {}: fine-tune time must be positive, got {}",
                r.model, r.fine_tune_time
            )));
        }
        if !(r.performance.is_finite() && r.performance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "model {}: performance must be non-negative, got {}",
                r.model, r.performance
            )));
        }
    }
    let max_perf = records.iter().map(|r| r.performance).fold(0.0, f64::max);
    if max_perf <= 0.0 {
        return Err(Error::NonPositiveMaximum(max_perf));
    }
    let max_time = records.iter().map(|r| r.fine_tune_time).fold(0.0, f64::max);
    let mut out = BTreeMap::new();
    for r in records {
        let perf = if r.performance == max_perf { 1.0 } else { r.performance / max_perf };
        let time = if r.fine_tune_time == max_time { 1.0 } else { r.fine_tune_time / max_time };
        if out.insert(r.model.clone(), perf / time).is_some() {
            return Err(Error::DuplicateId(r.model.clone()));
        }
    }
    Ok(out)
}
