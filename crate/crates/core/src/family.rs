//! Family operators as witness-relative checks: generated family, block family,
//! difference family and its dual.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::format::read_set;
use crate::window::WindowSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "F_inf")]
    Infinite,
    #[serde(rename = "F_cf")]
    Cofinite,
    #[serde(rename = "F_t")]
    Thick,
    #[serde(rename = "F_s")]
    Syndetic,
    #[serde(rename = "F_ps")]
    PiecewiseSyndetic,
    #[serde(rename = "F_ip")]
    Ip,
    #[serde(rename = "F_pubd")]
    Pubd,
    #[serde(rename = "F_wt")]
    WeaklyThick,
    #[serde(rename = "bF_wt")]
    BlockWeaklyThick,
    #[serde(rename = "bF_ip")]
    BlockIp,
    #[serde(rename = "F_rs")]
    ResidueSuperset,
    #[serde(rename = "kappa_F_rs")]
    DualResidueSuperset,
    #[serde(rename = "Delta_of")]
    DeltaOf,
    #[serde(rename = "Delta_star_of")]
    DeltaStarOf,
}

impl FamilyKind {
    const ALL: [FamilyKind; 14] = [
        FamilyKind::Infinite,
        FamilyKind::Cofinite,
        FamilyKind::Thick,
        FamilyKind::Syndetic,
        FamilyKind::PiecewiseSyndetic,
        FamilyKind::Ip,
        FamilyKind::Pubd,
        FamilyKind::WeaklyThick,
        FamilyKind::BlockWeaklyThick,
        FamilyKind::BlockIp,
        FamilyKind::ResidueSuperset,
        FamilyKind::DualResidueSuperset,
        FamilyKind::DeltaOf,
        FamilyKind::DeltaStarOf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Infinite => "F_inf",
            FamilyKind::Cofinite => "F_cf",
            FamilyKind::Thick => "F_t",
            FamilyKind::Syndetic => "F_s",
            FamilyKind::PiecewiseSyndetic => "F_ps",
            FamilyKind::Ip => "F_ip",
            FamilyKind::Pubd => "F_pubd",
            FamilyKind::WeaklyThick => "F_wt",
            FamilyKind::BlockWeaklyThick => "bF_wt",
            FamilyKind::BlockIp => "bF_ip",
            FamilyKind::ResidueSuperset => "F_rs",
            FamilyKind::DualResidueSuperset => "kappa_F_rs",
            FamilyKind::DeltaOf => "Delta_of",
            FamilyKind::DeltaStarOf => "Delta_star_of",
        }
    }

    fn takes_parameter(&self) -> bool {
        matches!(self, FamilyKind::DeltaOf | FamilyKind::DeltaStarOf)
    }
}

/// A family name; the difference operators carry the family they act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTag")]
pub struct FamilyTag {
    tag: FamilyKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<FamilyKind>,
}

#[derive(Deserialize)]
struct RawTag {
    tag: FamilyKind,
    #[serde(default)]
    parameter: Option<FamilyKind>,
}

impl TryFrom<RawTag> for FamilyTag {
    type Error = Error;

    fn try_from(raw: RawTag) -> Result<Self> {
        FamilyTag::new(raw.tag, raw.parameter)
    }
}

impl FamilyTag {
    pub fn new(tag: FamilyKind, parameter: Option<FamilyKind>) -> Result<Self> {
        match (tag.takes_parameter(), parameter) {
            (true, Some(p)) if !p.takes_parameter() => Ok(FamilyTag { tag, parameter }),
            (true, _) => Err(invalid("family", format!("{} needs one plain inner family", tag.name()))),
            (false, None) => Ok(FamilyTag { tag, parameter }),
            (false, Some(_)) => Err(invalid("family", format!("{} takes no inner family", tag.name()))),
        }
    }

    pub fn plain(tag: FamilyKind) -> Result<Self> {
        Self::new(tag, None)
    }

    pub fn tag(&self) -> FamilyKind {
        self.tag
    }

    pub fn parameter(&self) -> Option<FamilyKind> {
        self.parameter
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter {
            Some(p) => write!(f, "{}({})", self.tag.name(), p.name()),
            None => f.write_str(self.tag.name()),
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = |name: &str| {
            FamilyKind::ALL
                .into_iter()
                .find(|k| k.name() == name)
                .ok_or_else(|| invalid("family", format!("unknown family `{name}`")))
        };
        match s.split_once('(') {
            Some((outer, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| invalid("family", format!("unbalanced `{s}`")))?;
                FamilyTag::new(kind(outer)?, Some(kind(inner)?))
            }
            None => FamilyTag::new(kind(s)?, None),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedMembership {
    /// First generator contained in F on the common horizon.
    pub index: Option<usize>,
    /// Set when some generator's horizon differs from F's, so containment was
    /// judged on the shorter window.
    pub truncated: bool,
}

impl GeneratedMembership {
    pub fn is_member(&self) -> bool {
        self.index.is_some()
    }
}

/// Whether F lies in the family generated by `generators`: some `A_i ⊆ F`.
pub fn generated_member(generators: &[WindowSet], f: &WindowSet) -> GeneratedMembership {
    let mut truncated = false;
    let mut index = None;
    for (i, a) in generators.iter().enumerate() {
        let h = a.horizon().min(f.horizon());
        truncated |= a.horizon() != f.horizon();
        if index.is_none() && a.with_horizon(h).is_subset(&f.with_horizon(h)) {
            index = Some(i);
        }
    }
    GeneratedMembership { index, truncated }
}

/// Shifts embedding growing prefixes of `source` into `target`:
/// `a_n + (source ∩ [0, n]) ⊆ target` for every `n <= depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEmbedWitness {
    pub source: WindowSet,
    pub target: WindowSet,
    /// `a_n` keyed by the values of `n` where the prefix grows; between keys the
    /// shift is unchanged.
    pub shifts: BTreeMap<u64, u64>,
    pub depth: u64,
}

impl BlockEmbedWitness {
    /// The shift used for `source ∩ [0, n]`.
    pub fn shift_at(&self, n: u64) -> Option<u64> {
        if n > self.depth {
            return None;
        }
        Some(self.shifts.range(..=n).next_back().map_or(0, |(_, &a)| a))
    }

    /// Re-checks every recorded embedding against the stored target.
    pub fn validate(&self) -> bool {
        self.validate_against(&self.target)
    }

    pub fn validate_against(&self, target: &WindowSet) -> bool {
        self.shifts.iter().all(|(&n, &a)| {
            self.source
                .prefix_through(n)
                .iter()
                .all(|s| target.contains(a + s))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BlockOutcome {
    Embedded(BlockEmbedWitness),
    /// No shift fits `source ∩ [0, at_depth]` inside the window.
    Refuted { at_depth: u64, horizon: u64 },
}

/// Least shift `>= from` placing `pattern` inside `target`.
fn least_shift(pattern: &[u64], target: &WindowSet, from: u64) -> Option<u64> {
    let last = *pattern.last()?;
    let mut a = from;
    'outer: loop {
        if a.checked_add(last)? >= target.horizon() {
            return None;
        }
        for &s in pattern {
            if !target.contains(a + s) {
                let next = target.next_at_or_after(a + s)?;
                a = next - s;
                continue 'outer;
            }
        }
        return Some(a);
    }
}

/// For each `n <= depth`, the least `a_n` with `a_n + (F′ ∩ [0, n]) ⊆ F`.
pub fn block_member(source: &WindowSet, target: &WindowSet, depth: u64) -> Result<BlockOutcome> {
    if depth == 0 {
        return Err(invalid("depth", "must be at least 1"));
    }
    if depth > source.horizon() {
        return Err(invalid("depth", "exceeds the source horizon"));
    }
    let mut shifts = BTreeMap::new();
    let mut pattern = Vec::new();
    let mut a = 0u64;
    for s in source.iter().take_while(|&s| s <= depth) {
        pattern.push(s);
        // Prefixes grow, so the least shift can only move right.
        match least_shift(&pattern, target, a) {
            Some(next) => {
                a = next;
                shifts.insert(s, a);
            }
            None => {
                return Ok(BlockOutcome::Refuted {
                    at_depth: s,
                    horizon: target.horizon(),
                })
            }
        }
    }
    Ok(BlockOutcome::Embedded(BlockEmbedWitness {
        source: source.clone(),
        target: target.clone(),
        shifts,
        depth,
    }))
}

/// Index of the first witness `F′` with `F′ − F′ ⊆ F`.
pub fn delta_member(f: &WindowSet, witnesses: &[WindowSet]) -> Option<usize> {
    witnesses
        .iter()
        .position(|w| w.difference_set().is_subset(f))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaStarOutcome {
    pub intersection: WindowSet,
    /// True when F misses `witness − witness` entirely.
    pub refuted: bool,
}

/// `F ∩ (witness − witness)`; empty refutes membership in the dual relative to
/// this witness.
pub fn delta_star_refute(f: &WindowSet, witness: &WindowSet) -> DeltaStarOutcome {
    let intersection = f.intersection(&witness.difference_set());
    DeltaStarOutcome {
        refuted: intersection.is_empty(),
        intersection,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub witness_valid: bool,
    /// `(F_2 ∩ [0, depth]) − (F_2 ∩ [0, depth]) ⊆ F_1 − F_1`.
    pub inner: bool,
    /// `F_1 − F_1 ⊆ target`.
    pub outer: bool,
    /// Least difference of the source prefix missing from `F_1 − F_1`.
    pub missing: Option<u64>,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.witness_valid && self.inner && self.outer
    }
}

/// Checks the chain `Δ(F_2 ∩ [0, depth]) ⊆ Δ(F_1) ⊆ target` for a claimed
/// block embedding of `F_2` (the witness source) into `F_1` (its target).
pub fn lemma1_check(witness: &BlockEmbedWitness, target: &WindowSet, depth: u64) -> Result<Lemma1Report> {
    if depth == 0 {
        return Err(invalid("depth", "must be at least 1"));
    }
    if depth > witness.depth {
        return Err(invalid("depth", "exceeds the witness depth"));
    }
    let witness_valid = witness.validate();
    let inner_set = witness.source.prefix_through(depth).difference_set();
    let outer_set = witness.target.difference_set();
    let missing = inner_set.iter().find(|&d| !outer_set.contains(d));
    Ok(Lemma1Report {
        witness_valid,
        inner: missing.is_none(),
        outer: outer_set.is_subset(target),
        missing,
    })
}

/// Reads every regular file in `dir` as a set file, ordered by file name.
pub fn load_witness_dir(dir: &Path) -> Result<Vec<(String, WindowSet)>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            read_set(&p).map(|s| (name, s))
        })
        .collect()
}
