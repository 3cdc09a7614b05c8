//! Subsets of the nonnegative integers observed on a finite window `[0, horizon)`.
//!
//! A [`WindowSet`] stores its elements as maximal runs of consecutive integers.
//! Sparse sets (a few thousand elements spread over `10^12` positions) and
//! co-sparse sets (everything except a few thousand positions) both stay small,
//! which is what the entering-time sets of long symbolic points look like.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A maximal run of consecutive elements, `start .. start + len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Run {
    pub start: u64,
    pub len: u64,
}

impl Run {
    pub fn end(&self) -> u64 {
        self.start + self.len
    }
}

/// Finite-horizon set of nonnegative integers in normal form: sorted, deduplicated,
/// every element below `horizon`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindowSet", into = "RawWindowSet")]
pub struct WindowSet {
    horizon: u64,
    /// Disjoint, non-adjacent half-open intervals in increasing order.
    spans: Vec<(u64, u64)>,
}

#[derive(Serialize, Deserialize)]
struct RawWindowSet {
    horizon: u64,
    /// `[start, len]` pairs.
    runs: Vec<(u64, u64)>,
}

impl TryFrom<RawWindowSet> for WindowSet {
    type Error = Error;

    fn try_from(raw: RawWindowSet) -> Result<Self> {
        WindowSet::from_spans(
            raw.runs.into_iter().map(|(s, l)| (s, s.saturating_add(l))),
            raw.horizon,
        )
    }
}

impl From<WindowSet> for RawWindowSet {
    fn from(set: WindowSet) -> Self {
        RawWindowSet {
            horizon: set.horizon,
            runs: set.spans.iter().map(|&(s, e)| (s, e - s)).collect(),
        }
    }
}

impl fmt::Debug for WindowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WindowSet[h={}]{{", self.horizon)?;
        for (i, &(s, e)) in self.spans.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if e - s == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}..{e}")?;
            }
        }
        write!(f, "}}")
    }
}

/// Largest gap between consecutive elements of a nonempty set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapProfile {
    pub max_gap: u64,
    /// Left end of the first gap attaining `max_gap`: the element before the gap,
    /// or 0 for the leading gap `[0, min F)`.
    pub start: u64,
}

/// For every interval length `L` in `1..=horizon`, the largest number of elements
/// found in a single length-`L` interval inside the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityProfile {
    horizon: u64,
    max_counts: Vec<u64>,
}

impl DensityProfile {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn max_count(&self, len: u64) -> Option<u64> {
        len.checked_sub(1)
            .and_then(|i| self.max_counts.get(i as usize).copied())
    }

    pub fn density(&self, len: u64) -> Option<f64> {
        self.max_count(len).map(|c| c as f64 / len as f64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.max_counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1, c))
    }
}

impl WindowSet {
    pub fn empty(horizon: u64) -> Self {
        WindowSet {
            horizon,
            spans: Vec::new(),
        }
    }

    /// The whole window `[0, horizon)`.
    pub fn full(horizon: u64) -> Self {
        let spans = if horizon > 0 {
            vec![(0, horizon)]
        } else {
            Vec::new()
        };
        WindowSet { horizon, spans }
    }

    /// The interval `[start, end)` observed on `[0, horizon)`.
    pub fn interval(start: u64, end: u64, horizon: u64) -> Result<Self> {
        Self::from_spans([(start, end)], horizon)
    }

    /// Builds a set from elements in any order; duplicates are tolerated.
    pub fn new(elements: impl IntoIterator<Item = u64>, horizon: u64) -> Result<Self> {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if let Some(&last) = v.last() {
            if last >= horizon {
                return Err(Error::OutOfWindow {
                    element: last,
                    horizon,
                });
            }
        }
        Ok(Self::from_sorted_unique(&v, horizon))
    }

    /// Builds a set with horizon `max + 1` (or 0 when empty).
    pub fn from_elements(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let horizon = v.last().map_or(0, |m| m + 1);
        Self::from_sorted_unique(&v, horizon)
    }

    fn from_sorted_unique(v: &[u64], horizon: u64) -> Self {
        let mut spans: Vec<(u64, u64)> = Vec::new();
        for &x in v {
            match spans.last_mut() {
                Some(last) if last.1 == x => last.1 = x + 1,
                _ => spans.push((x, x + 1)),
            }
        }
        WindowSet { horizon, spans }
    }

    /// Builds a set from half-open intervals in any order; overlaps are merged and
    /// empty intervals ignored. Fails if an interval reaches past the horizon.
    pub fn from_spans(spans: impl IntoIterator<Item = (u64, u64)>, horizon: u64) -> Result<Self> {
        let mut v: Vec<(u64, u64)> = spans.into_iter().filter(|(s, e)| s < e).collect();
        if let Some(&(_, e)) = v.iter().max_by_key(|(_, e)| *e) {
            if e > horizon {
                return Err(Error::OutOfWindow {
                    element: e - 1,
                    horizon,
                });
            }
        }
        v.sort_unstable();
        Ok(WindowSet {
            horizon,
            spans: merge_sorted(v),
        })
    }

    /// Like [`WindowSet::from_spans`] but clips every interval to the window.
    pub(crate) fn from_spans_clipped(spans: Vec<(u64, u64)>, horizon: u64) -> Self {
        let mut v: Vec<(u64, u64)> = spans
            .into_iter()
            .map(|(s, e)| (s, e.min(horizon)))
            .filter(|(s, e)| s < e)
            .collect();
        v.sort_unstable();
        WindowSet {
            horizon,
            spans: merge_sorted(v),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Number of elements.
    pub fn len(&self) -> u64 {
        self.spans.iter().map(|(s, e)| e - s).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.spans.first().map(|s| s.0)
    }

    pub fn max(&self) -> Option<u64> {
        self.spans.last().map(|s| s.1 - 1)
    }

    /// Number of maximal runs.
    pub fn run_count(&self) -> usize {
        self.spans.len()
    }

    /// The maximal runs as half-open intervals.
    pub fn spans(&self) -> &[(u64, u64)] {
        &self.spans
    }

    /// Maximal runs of consecutive integers inside the set, by increasing start.
    pub fn runs(&self) -> Vec<Run> {
        self.spans
            .iter()
            .map(|&(s, e)| Run {
                start: s,
                len: e - s,
            })
            .collect()
    }

    /// Complement of the set inside the window, as half-open intervals.
    pub fn gaps(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.spans.len() + 1);
        let mut cursor = 0;
        for &(s, e) in &self.spans {
            if s > cursor {
                out.push((cursor, s));
            }
            cursor = e;
        }
        if cursor < self.horizon {
            out.push((cursor, self.horizon));
        }
        out
    }

    pub fn complement(&self) -> WindowSet {
        WindowSet {
            horizon: self.horizon,
            spans: self.gaps(),
        }
    }

    /// Index of the span containing `v`, if any.
    fn span_of(&self, v: u64) -> Option<usize> {
        let i = self.spans.partition_point(|&(s, _)| s <= v);
        if i == 0 {
            return None;
        }
        (v < self.spans[i - 1].1).then_some(i - 1)
    }

    pub fn contains(&self, v: u64) -> bool {
        self.span_of(v).is_some()
    }

    /// True when `[start, end)` lies inside a single run.
    pub fn contains_range(&self, start: u64, end: u64) -> bool {
        if start >= end {
            return true;
        }
        self.span_of(start).is_some_and(|i| end <= self.spans[i].1)
    }

    /// Least element `>= v`.
    pub fn next_at_or_after(&self, v: u64) -> Option<u64> {
        let i = self.spans.partition_point(|&(_, e)| e <= v);
        self.spans.get(i).map(|&(s, _)| s.max(v))
    }

    /// Number of elements in `[start, end)`.
    pub fn count_in(&self, start: u64, end: u64) -> u64 {
        if start >= end {
            return 0;
        }
        let lo = self.spans.partition_point(|&(_, e)| e <= start);
        let mut total = 0;
        for &(s, e) in &self.spans[lo..] {
            if s >= end {
                break;
            }
            total += e.min(end) - s.max(start);
        }
        total
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.spans.iter().flat_map(|&(s, e)| s..e)
    }

    /// Elements `>= v` in increasing order.
    pub fn iter_from(&self, v: u64) -> impl Iterator<Item = u64> + '_ {
        let i = self.spans.partition_point(|&(_, e)| e <= v);
        self.spans[i..].iter().flat_map(move |&(s, e)| s.max(v)..e)
    }

    /// Elements collected into a vector; only sensible for small sets.
    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Containment of elements, ignoring horizons.
    pub fn is_subset(&self, other: &WindowSet) -> bool {
        self.spans
            .iter()
            .all(|&(s, e)| other.contains_range(s, e))
    }

    pub fn intersection(&self, other: &WindowSet) -> WindowSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let (a0, a1) = self.spans[i];
            let (b0, b1) = other.spans[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        WindowSet {
            horizon: self.horizon.min(other.horizon),
            spans: out,
        }
    }

    pub fn union(&self, other: &WindowSet) -> WindowSet {
        let mut v: Vec<(u64, u64)> = self.spans.iter().chain(&other.spans).copied().collect();
        v.sort_unstable();
        WindowSet {
            horizon: self.horizon.max(other.horizon),
            spans: merge_sorted(v),
        }
    }

    /// The same set observed on `[0, horizon)`: elements at or past the new
    /// horizon are dropped.
    pub fn with_horizon(&self, horizon: u64) -> WindowSet {
        Self::from_spans_clipped(self.spans.clone(), horizon)
    }

    /// `F ∩ [0, n]`, keeping the horizon.
    pub fn prefix_through(&self, n: u64) -> WindowSet {
        let mut out = Vec::new();
        for &(s, e) in &self.spans {
            if s > n {
                break;
            }
            out.push((s, e.min(n + 1)));
        }
        WindowSet {
            horizon: self.horizon,
            spans: out,
        }
    }

    /// `{f + m : f ∈ F, 0 <= f + m < horizon}`.
    pub fn shift(&self, m: i64) -> WindowSet {
        let spans = self
            .spans
            .iter()
            .filter_map(|&(s, e)| {
                let s = s as i128 + m as i128;
                let e = e as i128 + m as i128;
                let s = s.max(0);
                let e = e.min(self.horizon as i128);
                (s < e).then_some((s as u64, e as u64))
            })
            .collect();
        WindowSet {
            horizon: self.horizon,
            spans,
        }
    }

    /// `F − F`: positive differences, plus 0 exactly when `0 ∈ F`.
    /// The horizon is kept.
    pub fn difference_set(&self) -> WindowSet {
        let mut d = cross_differences(self, self);
        if !self.contains(0) && d.contains(0) {
            d = d.without(0);
        }
        WindowSet {
            horizon: self.horizon,
            spans: d.spans,
        }
    }

    fn without(&self, v: u64) -> WindowSet {
        let mut spans = Vec::with_capacity(self.spans.len() + 1);
        for &(s, e) in &self.spans {
            if s <= v && v < e {
                if s < v {
                    spans.push((s, v));
                }
                if v + 1 < e {
                    spans.push((v + 1, e));
                }
            } else {
                spans.push((s, e));
            }
        }
        WindowSet {
            horizon: self.horizon,
            spans,
        }
    }

    /// `{n : k·n ∈ F}` on the window `[0, ceil(horizon / k))`.
    pub fn dilation_fiber(&self, k: u64) -> Result<WindowSet> {
        if k == 0 {
            return Err(invalid("k", "dilation factor must be positive"));
        }
        let horizon = self.horizon.div_ceil(k);
        let spans = self
            .spans
            .iter()
            .filter_map(|&(s, e)| {
                let lo = s.div_ceil(k);
                let hi = (e - 1) / k + 1;
                (lo < hi).then_some((lo, hi))
            })
            .collect::<Vec<_>>();
        Ok(WindowSet {
            horizon,
            spans: merge_sorted(spans),
        })
    }

    /// Largest gap between consecutive elements. The leading gap `[0, min F)`
    /// counts with size `min F`; the stretch past `max F` is not observed.
    pub fn gap_profile(&self) -> Result<GapProfile> {
        let first = self.min().ok_or(Error::EmptySet)?;
        let mut best = GapProfile {
            max_gap: first,
            start: 0,
        };
        for w in self.spans.windows(2) {
            let prev = w[0].1 - 1;
            let gap = w[1].0 - prev;
            if gap > best.max_gap {
                best = GapProfile {
                    max_gap: gap,
                    start: prev,
                };
            }
        }
        // Inside a run consecutive elements differ by exactly 1.
        if best.max_gap == 0 && self.len() > 1 {
            best = GapProfile {
                max_gap: 1,
                start: first,
            };
        }
        Ok(best)
    }

    /// Largest `|F ∩ [s, s + len)|` over windows inside `[0, horizon)`, with the
    /// least start attaining it. `None` when `len` is 0 or exceeds the horizon.
    pub fn max_count(&self, len: u64) -> Option<(u64, u64)> {
        if len == 0 || len > self.horizon {
            return None;
        }
        let last_start = self.horizon - len;
        // The count is piecewise linear in the start; its maximum is attained at a
        // start aligned with a run start or with a window end aligned to a run end.
        let mut candidates: Vec<u64> = vec![0];
        for &(s, e) in &self.spans {
            candidates.push(s.min(last_start));
            candidates.push(e.saturating_sub(len).min(last_start));
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut best = (0u64, 0u64);
        let mut found = false;
        for &c in &candidates {
            let count = self.count_in(c, c + len);
            if !found || count > best.0 {
                best = (count, c);
                found = true;
            }
        }
        Some(best)
    }

    /// Maximum windowed density for every interval length `1..=horizon`.
    /// Cost is `O(horizon · runs · log runs)`; meant for desk-scale windows.
    pub fn density_profile(&self) -> Result<DensityProfile> {
        if self.horizon == 0 {
            return Err(invalid("horizon", "density profile needs a nonempty window"));
        }
        let max_counts = (1..=self.horizon)
            .map(|l| self.max_count(l).map_or(0, |(c, _)| c))
            .collect();
        Ok(DensityProfile {
            horizon: self.horizon,
            max_counts,
        })
    }
}

/// `FS{p_i}`, the sums over nonempty index subsets, truncated to `[0, cap)`.
pub fn finite_sums(p: &[u64], cap: u64) -> Result<WindowSet> {
    if cap == 0 {
        return Err(invalid("cap", "must be at least 1"));
    }
    if p.contains(&0) {
        return Err(invalid("p", "generators must be positive"));
    }
    let mut sums: Vec<u64> = Vec::new();
    for &x in p {
        let mut next: Vec<u64> = Vec::with_capacity(sums.len() * 2 + 1);
        if x < cap {
            next.push(x);
        }
        next.extend(sums.iter().filter_map(|&s| s.checked_add(x)).filter(|&s| s < cap));
        next.extend_from_slice(&sums);
        next.sort_unstable();
        next.dedup();
        sums = next;
    }
    Ok(WindowSet::from_sorted_unique(&sums, cap))
}

/// `{b − a : a ∈ from, b ∈ to, b >= a}` on the horizon of `to`.
pub fn cross_differences(from: &WindowSet, to: &WindowSet) -> WindowSet {
    let horizon = to.horizon;
    let pairs = from.spans.len() as u128 * to.spans.len() as u128;
    let bit_cost = from.len() as u128 * (horizon as u128 / 64 + 1);
    if horizon <= (1 << 26) && bit_cost < pairs {
        return cross_differences_bits(from, to);
    }
    let mut out = Vec::with_capacity(pairs.min(1 << 24) as usize);
    for &(a0, a1) in &from.spans {
        for &(b0, b1) in &to.spans {
            // b − a ranges over [b0 − (a1 − 1), (b1 − 1) − a0], clipped at 0.
            if b1 - 1 < a0 {
                continue;
            }
            let lo = b0.saturating_sub(a1 - 1);
            let hi = b1 - 1 - a0;
            out.push((lo, hi + 1));
        }
    }
    WindowSet::from_spans_clipped(out, horizon)
}

fn cross_differences_bits(from: &WindowSet, to: &WindowSet) -> WindowSet {
    let horizon = to.horizon;
    let words = (horizon as usize).div_ceil(64);
    let mut target = vec![0u64; words];
    for &(s, e) in &to.spans {
        set_range(&mut target, s, e);
    }
    let mut acc = vec![0u64; words];
    for a in from.iter() {
        if a >= horizon {
            break;
        }
        or_shifted_down(&mut acc, &target, a);
    }
    let mut spans = Vec::new();
    let mut open: Option<u64> = None;
    for i in 0..horizon {
        let bit = acc[(i / 64) as usize] >> (i % 64) & 1 == 1;
        match (bit, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                spans.push((s, i));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        spans.push((s, horizon));
    }
    WindowSet { horizon, spans }
}

fn set_range(bits: &mut [u64], s: u64, e: u64) {
    for i in s..e {
        bits[(i / 64) as usize] |= 1 << (i % 64);
    }
}

/// `acc |= src >> shift`.
fn or_shifted_down(acc: &mut [u64], src: &[u64], shift: u64) {
    let word_shift = (shift / 64) as usize;
    let bit_shift = shift % 64;
    let n = src.len();
    for i in 0..n.saturating_sub(word_shift) {
        let lo = src[i + word_shift] >> bit_shift;
        let hi = if bit_shift > 0 && i + word_shift + 1 < n {
            src[i + word_shift + 1] << (64 - bit_shift)
        } else {
            0
        };
        acc[i] |= lo | hi;
    }
}

fn merge_sorted(v: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(v.len());
    for (s, e) in v {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}
