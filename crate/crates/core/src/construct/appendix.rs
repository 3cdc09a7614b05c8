//! The staged point `x = 1_W` with `W = ⋃ W_n`, built block by block under the
//! separation rule `min A_i > 3 max A_j + 2` for every earlier block `A_j`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symbolic::SymbolicWord;
use crate::window::WindowSet;

/// Coordinates past this magnitude abort the build.
pub const COORDINATE_GUARD: u64 = 1 << 53;

/// Block counts `k_1, k_2, k_3` as written for the first stages.
const WRITTEN_BLOCK_COUNTS: [usize; 3] = [1, 3, 7];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockTerm {
    /// `A_0 = W_0 = {0}`.
    Base,
    /// `W_n + p_{n+1}`.
    Translate { n: usize },
    /// `W_r + p^(r)_{j,t} − j + FS({0} ∪ {p^(r)_{j,i} : 1 <= i < t})`.
    FiniteSum { r: usize, j: usize, t: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub index: usize,
    pub stage: usize,
    pub term: BlockTerm,
    pub parameter: Option<u64>,
    pub set: WindowSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub value: u64,
}

/// Generators known so far for a family `P^(r)_i`: `i = 0` is
/// `FS{p_{r+1}, p_{r+2}, …}`, `i >= 1` is `FS{p^(r)_{i,1}, p^(r)_{i,2}, …}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    pub r: usize,
    pub i: usize,
    pub generators: Vec<u64>,
}

/// A recorded inclusion `W_r + offset ⊆ W_n`, one per finite sum `s` of a family
/// prefix, with `offset = s − i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTranslate {
    pub r: usize,
    pub i: usize,
    pub sum: u64,
    pub offset: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixStage {
    pub n: usize,
    pub w: WindowSet,
    /// Highest block index after this stage.
    pub k: usize,
    /// The written value of `k_n`, for the stages where one is given.
    pub written_k: Option<usize>,
    pub parameters: Vec<Parameter>,
    pub families: Vec<GeneratorFamily>,
    pub planted: Vec<PlantedTranslate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixTrace {
    pub stages: Vec<AppendixStage>,
    pub blocks: Vec<Block>,
    pub horizon: u64,
}

fn fs_with_zero(gens: &[u64]) -> Vec<u64> {
    let mut sums = vec![0u64];
    for &g in gens {
        let more: Vec<u64> = sums.iter().map(|s| s + g).collect();
        sums.extend(more);
    }
    sums.sort_unstable();
    sums.dedup();
    sums
}

fn nonempty_sums(gens: &[u64]) -> Vec<u64> {
    let mut sums = Vec::new();
    for mask in 1u64..(1 << gens.len()) {
        sums.push(
            gens.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &g)| g)
                .sum(),
        );
    }
    sums.sort_unstable();
    sums
}

fn block_set(elements: Vec<u64>, stage: usize) -> Result<WindowSet> {
    let max = elements.iter().copied().max().unwrap_or(0);
    if max >= COORDINATE_GUARD {
        return Err(Error::Overflow {
            stage,
            detail: format!("coordinate {max} exceeds 2^53"),
        });
    }
    Ok(WindowSet::from_elements(elements))
}

/// Builds `W_0 ⊆ W_1 ⊆ … ⊆ W_stages` with every free parameter chosen as the least
/// value meeting the separation rule, in the written term order. The horizon is
/// `max(window, max W + 1)`.
pub fn build_appendix(stages: usize, window: u64) -> Result<AppendixTrace> {
    let base = WindowSet::from_elements([0]);
    let mut blocks = vec![Block {
        index: 0,
        stage: 0,
        term: BlockTerm::Base,
        parameter: None,
        set: base.clone(),
    }];
    let mut w: Vec<WindowSet> = vec![base.clone()];
    let mut p: Vec<u64> = vec![0];
    // q[r][j - 1] lists p^(r)_{j,1}, p^(r)_{j,2}, ...
    let mut q: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
    let mut max_all: u64 = 0;
    let mut stage_records = vec![AppendixStage {
        n: 0,
        w: base,
        k: 0,
        written_k: None,
        parameters: Vec::new(),
        families: Vec::new(),
        planted: Vec::new(),
    }];

    for m in 1..=stages {
        let n = m - 1;
        q.push((0..m).map(|_| Vec::new()).collect());
        let mut parameters = Vec::new();
        let mut next = w[n].iter().collect::<Vec<u64>>();

        let bound = |max_all: u64| -> Result<u64> {
            let b = 3u128 * max_all as u128 + 2;
            if b >= COORDINATE_GUARD as u128 {
                return Err(Error::Overflow {
                    stage: m,
                    detail: format!("separation bound {b} exceeds 2^53"),
                });
            }
            Ok(b as u64)
        };

        let v = bound(max_all)? + 1;
        p.push(v);
        parameters.push(Parameter {
            name: format!("p_{m}"),
            value: v,
        });
        let set = block_set(w[n].iter().map(|x| x + v).collect(), m)?;
        max_all = max_all.max(set.max().unwrap_or(0));
        next.extend(set.iter());
        blocks.push(Block {
            index: blocks.len(),
            stage: m,
            term: BlockTerm::Translate { n },
            parameter: Some(v),
            set,
        });

        for r in 1..=n {
            let t = m - r;
            for j in 1..=r {
                let v = bound(max_all)? + j as u64 + 1;
                let sums = fs_with_zero(&q[r][j - 1]);
                let offset = v - j as u64;
                let elems: Vec<u64> = w[r]
                    .iter()
                    .flat_map(|x| sums.iter().map(move |f| x + f + offset))
                    .collect();
                let set = block_set(elems, m)?;
                max_all = max_all.max(set.max().unwrap_or(0));
                next.extend(set.iter());
                q[r][j - 1].push(v);
                parameters.push(Parameter {
                    name: format!("p^({r})_{{{j},{t}}}"),
                    value: v,
                });
                blocks.push(Block {
                    index: blocks.len(),
                    stage: m,
                    term: BlockTerm::FiniteSum { r, j, t },
                    parameter: Some(v),
                    set,
                });
            }
        }

        let wm = WindowSet::from_elements(next);
        w.push(wm.clone());

        let mut families = Vec::new();
        let mut planted = Vec::new();
        for r in 1..=m {
            for i in 0..=r {
                let generators: Vec<u64> = if i == 0 {
                    p[r + 1..].to_vec()
                } else {
                    q[r].get(i - 1).cloned().unwrap_or_default()
                };
                for s in nonempty_sums(&generators) {
                    planted.push(PlantedTranslate {
                        r,
                        i,
                        sum: s,
                        offset: s - i as u64,
                    });
                }
                families.push(GeneratorFamily { r, i, generators });
            }
        }

        stage_records.push(AppendixStage {
            n: m,
            w: wm,
            k: blocks.len() - 1,
            written_k: WRITTEN_BLOCK_COUNTS.get(m - 1).copied(),
            parameters,
            families,
            planted,
        });
    }

    let top = stage_records.last().and_then(|s| s.w.max()).unwrap_or(0);
    Ok(AppendixTrace {
        stages: stage_records,
        blocks,
        horizon: window.max(top + 1),
    })
}

impl AppendixTrace {
    pub fn final_set(&self) -> WindowSet {
        self.stages
            .last()
            .expect("trace has a base stage")
            .w
            .with_horizon(self.horizon)
    }

    /// `x = 1_W` on `[0, horizon)`.
    pub fn point(&self) -> SymbolicWord {
        SymbolicWord::indicator(self.final_set()).expect("horizon is positive")
    }

    pub fn stage(&self, n: usize) -> Option<&AppendixStage> {
        self.stages.get(n)
    }

    /// Blocks `A_0 ..= A_{k_n}`.
    pub fn blocks_through(&self, n: usize) -> &[Block] {
        let k = self.stages.get(n).map_or(0, |s| s.k);
        &self.blocks[..=k.min(self.blocks.len() - 1)]
    }

    /// `⋃_{i=0}^{r} (P^(r)_i − i)` from the family prefixes known at stage `n`.
    pub fn planted_returns(&self, r: usize, n: usize) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .stages
            .get(n)
            .map(|s| {
                s.planted
                    .iter()
                    .filter(|t| t.r == r)
                    .map(|t| t.offset)
                    .collect()
            })
            .unwrap_or_default();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Stages whose block count differs from the written `k_n`.
    pub fn block_count_mismatches(&self) -> Vec<(usize, usize, usize)> {
        self.stages
            .iter()
            .filter_map(|s| s.written_k.filter(|&k| k != s.k).map(|k| (s.n, k, s.k)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub holds: bool,
    /// `(stage, i, j)` with `min A_i <= 3 max A_j + 2`.
    pub first_violation: Option<(usize, usize, usize)>,
}

/// Re-scans every ordered block pair of every stage.
pub fn verify_separation(trace: &AppendixTrace) -> SeparationReport {
    for stage in &trace.stages {
        let blocks = trace.blocks_through(stage.n);
        for i in 0..blocks.len() {
            for j in 0..i {
                let (Some(lo), Some(hi)) = (blocks[i].set.min(), blocks[j].set.max()) else {
                    continue;
                };
                if lo as u128 <= 3 * hi as u128 + 2 {
                    return SeparationReport {
                        holds: false,
                        first_violation: Some((stage.n, i, j)),
                    };
                }
            }
        }
    }
    SeparationReport {
        holds: true,
        first_violation: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim2Report {
    pub stage: usize,
    pub differences: u64,
    pub holds: bool,
    /// Distinct `a < b` in `W_n − W_n` with `b − a <= 2`, least `a` first.
    pub counterexample: Option<(u64, u64)>,
}

/// Pair-scan oracle for `|a − b| > 2` over distinct elements of `W − W`.
pub fn claim2_for_set(stage: usize, w: &WindowSet) -> Claim2Report {
    let elems = w.to_vec();
    let mut d = Vec::with_capacity(elems.len() * (elems.len() + 1) / 2);
    for (ia, &a) in elems.iter().enumerate() {
        for &b in &elems[..=ia] {
            d.push(a - b);
        }
    }
    d.sort_unstable();
    d.dedup();
    let counterexample = d
        .windows(2)
        .find(|pair| pair[1] - pair[0] <= 2)
        .map(|pair| (pair[0], pair[1]));
    Claim2Report {
        stage,
        differences: d.len() as u64,
        holds: counterexample.is_none(),
        counterexample,
    }
}

pub fn verify_claim2(trace: &AppendixTrace, n: usize) -> Result<Claim2Report> {
    let stage = trace
        .stage(n)
        .ok_or_else(|| invalid("stage", format!("trace has no stage {n}")))?;
    Ok(claim2_for_set(n, &stage.w))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim1Report {
    pub stage: usize,
    pub min_first_index: usize,
    pub checked: u64,
    pub failures: u64,
    /// `(block index, difference)` for the first failure.
    pub first_failure: Option<(usize, u64)>,
}

impl Claim1Report {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// For the blocks new at stage `n` (`n >= 2`), checks that every positive
/// difference inside one block is a difference `A_{i2} − A_{i1}` of earlier blocks
/// with `min_first_index <= i1 < i2 <= k_{n−1}`.
pub fn verify_claim1(trace: &AppendixTrace, n: usize, min_first_index: usize) -> Result<Claim1Report> {
    if n < 2 || n >= trace.stages.len() {
        return Err(invalid("stage", format!("need 2 <= n < {}", trace.stages.len())));
    }
    let earlier = trace.blocks_through(n - 1);
    let mut known: Vec<u64> = Vec::new();
    for i2 in 0..earlier.len() {
        for i1 in min_first_index..i2 {
            for b in earlier[i2].set.iter() {
                known.extend(earlier[i1].set.iter().filter(|&a| a <= b).map(|a| b - a));
            }
        }
    }
    known.sort_unstable();
    known.dedup();
    let mut checked = 0;
    let mut failures = 0;
    let mut first_failure = None;
    let k_prev = trace.stages[n - 1].k;
    for block in &trace.blocks_through(n)[k_prev + 1..] {
        let elems = block.set.to_vec();
        let mut diffs: Vec<u64> = Vec::new();
        for (ia, &a) in elems.iter().enumerate() {
            diffs.extend(elems[..ia].iter().map(|&b| a - b));
        }
        diffs.sort_unstable();
        diffs.dedup();
        for d in diffs {
            checked += 1;
            if known.binary_search(&d).is_err() {
                failures += 1;
                first_failure.get_or_insert((block.index, d));
            }
        }
    }
    Ok(Claim1Report {
        stage: n,
        min_first_index,
        checked,
        failures,
        first_failure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub monotone: bool,
    /// `(stage, r, offset)` of the first planted translate not inside `W_n`.
    pub planting_violation: Option<(usize, usize, u64)>,
}

/// Stage monotonicity and soundness of every recorded planted translate.
pub fn verify_trace(trace: &AppendixTrace) -> TraceCheck {
    let monotone = trace
        .stages
        .windows(2)
        .all(|pair| pair[0].w.is_subset(&pair[1].w));
    let mut planting_violation = None;
    'stages: for stage in &trace.stages {
        for t in &stage.planted {
            let wr = &trace.stages[t.r].w;
            if !wr.iter().all(|x| stage.w.contains(x + t.offset)) {
                planting_violation = Some((stage.n, t.r, t.offset));
                break 'stages;
            }
        }
    }
    TraceCheck {
        monotone,
        planting_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_and_first_stages() {
        let t = build_appendix(0, 1).unwrap();
        assert_eq!(t.stages.len(), 1);
        assert_eq!(t.final_set().to_vec(), vec![0]);

        let t = build_appendix(1, 1).unwrap();
        assert_eq!(t.stages[1].parameters[0].value, 3);
        assert_eq!(t.stages[1].w.to_vec(), vec![0, 3]);

        let t = build_appendix(2, 1).unwrap();
        assert_eq!(t.stages[2].w.to_vec(), vec![0, 3, 12, 15, 48, 51]);
        assert_eq!(t.stages[2].parameters[1].name, "p^(1)_{1,1}");
        assert_eq!(t.stages[2].parameters[1].value, 49);
    }

    #[test]
    fn block_counts_and_sizes() {
        let t = build_appendix(5, 1).unwrap();
        let ks: Vec<usize> = t.stages.iter().map(|s| s.k).collect();
        assert_eq!(ks, vec![0, 1, 3, 7, 14, 25]);
        assert!(t.block_count_mismatches().is_empty());
        let sizes: Vec<u64> = t.stages.iter().map(|s| s.w.len()).collect();
        assert_eq!(sizes, vec![1, 2, 6, 28, 172, 1264]);
        assert_eq!(t.stages[5].w.max(), Some(4_488_035_844_561));
        assert_eq!(t.horizon, 4_488_035_844_562);
    }

    #[test]
    fn separation_and_planting() {
        let mut t = build_appendix(4, 1).unwrap();
        assert!(verify_separation(&t).holds);
        let check = verify_trace(&t);
        assert!(check.monotone);
        assert_eq!(check.planting_violation, None);

        let lowered = t.blocks[1].set.max().unwrap() * 3 + 2;
        t.blocks[2].set = WindowSet::from_elements([lowered]);
        assert_eq!(verify_separation(&t).first_violation, Some((2, 2, 1)));
    }

    #[test]
    fn claim2_small_cases() {
        let t = build_appendix(2, 1).unwrap();
        let r = verify_claim2(&t, 1).unwrap();
        assert!(r.holds);
        assert_eq!(r.differences, 2);
        assert!(verify_claim2(&t, 2).unwrap().holds);
        let injected = claim2_for_set(0, &WindowSet::from_elements([0, 5, 6]));
        assert_eq!(injected.counterexample, Some((0, 1)));
    }

    #[test]
    fn claim2_breaks_where_translates_meet() {
        // W_3 contains p^(1)_{1,1} − 1 and p^(1)_{1,1} as differences.
        let t = build_appendix(3, 1).unwrap();
        let r = verify_claim2(&t, 3).unwrap();
        assert_eq!(r.counterexample, Some((45, 46)));
    }

    #[test]
    fn claim1_at_stage_two_needs_base_block() {
        let t = build_appendix(3, 1).unwrap();
        assert!(verify_claim1(&t, 2, 0).unwrap().holds());
        assert!(!verify_claim1(&t, 2, 1).unwrap().holds());
        assert!(verify_claim1(&t, 1, 0).is_err());
    }

    #[test]
    fn overflow_guard_reports_stage() {
        match build_appendix(6, 1) {
            Err(Error::Overflow { stage, .. }) => assert_eq!(stage, 6),
            other => panic!("{other:?}"),
        }
    }
}
