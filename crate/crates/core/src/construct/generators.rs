//! Deterministic set generators for witness pools and test corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::window::{finite_sums, WindowSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSpec {
    pub start: u64,
    pub len: u64,
}

/// Runs of length `i` starting at `base^i`, for `i = 1..=count`.
pub fn geometric_runs(base: u64, count: u32) -> Vec<RunSpec> {
    (1..=count)
        .map(|i| RunSpec {
            start: base.pow(i),
            len: i as u64,
        })
        .collect()
}

pub fn gen_fs(p: &[u64], cap: u64) -> Result<WindowSet> {
    if p.is_empty() {
        return Err(invalid("p", "need at least one generator"));
    }
    finite_sums(p, cap)
}

/// Union of the given runs, truncated to `[0, cap)`.
pub fn gen_thick(runs: &[RunSpec], cap: u64) -> Result<WindowSet> {
    if runs.is_empty() {
        return Err(invalid("runs", "need at least one run"));
    }
    Ok(WindowSet::from_spans_clipped(
        runs.iter().map(|r| (r.start, r.start.saturating_add(r.len))).collect(),
        cap,
    ))
}

/// Starts at `start` and advances by the gaps in turn, cycling, until `cap`.
pub fn gen_syndetic(gaps: &[u64], start: u64, cap: u64) -> Result<WindowSet> {
    if gaps.is_empty() || gaps.contains(&0) {
        return Err(invalid("gaps", "need at least one positive gap"));
    }
    let mut out = Vec::new();
    let mut x = start;
    for &g in gaps.iter().cycle() {
        if x >= cap {
            break;
        }
        out.push(x);
        x += g;
    }
    WindowSet::new(out, cap)
}

/// `k · (union of runs)`, truncated to `[0, cap)`.
pub fn gen_dilated_thick(k: u64, runs: &[RunSpec], cap: u64) -> Result<WindowSet> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    let base = gen_thick(runs, cap.div_ceil(k))?;
    WindowSet::new(base.iter().map(|m| m * k).filter(|&v| v < cap), cap)
}

/// Each `n < cap` independently with probability `density`.
pub fn gen_random(density: f64, seed: u64, cap: u64) -> Result<WindowSet> {
    if !(0.0..=1.0).contains(&density) {
        return Err(invalid("density", "must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WindowSet::new((0..cap).filter(|_| rng.gen_bool(density)), cap)
}

/// `r·Z+` on `[0, horizon)` for `r = 1..=r_max`.
pub fn witness_pool(r_max: u64, horizon: u64) -> Result<Vec<WindowSet>> {
    if r_max == 0 {
        return Err(invalid("r_max", "must be at least 1"));
    }
    (1..=r_max)
        .map(|r| WindowSet::new((0..horizon).step_by(r as usize), horizon))
        .collect()
}

/// Weakly thick sets with dilation factors in `1..=4` and random run placements.
pub fn weakly_thick_pool(count: usize, seed: u64, horizon: u64) -> Result<Vec<WindowSet>> {
    if count == 0 {
        return Err(invalid("count", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=4u64);
            let fiber_cap = horizon.div_ceil(k).max(2);
            let mut runs = Vec::new();
            let mut start = rng.gen_range(0..fiber_cap.min(16));
            let mut len = 1;
            while start < fiber_cap {
                runs.push(RunSpec { start, len });
                start += len + rng.gen_range(1..=2 * len + 4);
                len += 1;
            }
            gen_dilated_thick(k, &runs, horizon)
        })
        .collect()
}
