//! Brute-force reference implementations over plain vectors. Nothing here calls
//! into the span arithmetic of the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use furstenberg_core::WindowSet;
use proptest::prelude::*;

pub fn bits(f: &WindowSet) -> Vec<bool> {
    let mut out = vec![false; f.horizon() as usize];
    for v in f.iter() {
        out[v as usize] = true;
    }
    out
}

pub fn set(elements: &[u64], horizon: u64) -> WindowSet {
    WindowSet::new(elements.iter().copied(), horizon).unwrap()
}

pub fn from_bits(b: &[bool]) -> WindowSet {
    WindowSet::new(
        b.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i as u64),
        b.len() as u64,
    )
    .unwrap()
}

pub fn differences(elements: &[u64]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for &a in elements {
        for &b in elements {
            if b >= a {
                out.insert(b - a);
            }
        }
    }
    if !elements.contains(&0) {
        out.remove(&0);
    }
    out
}

pub fn finite_sums(p: &[u64], cap: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << p.len()) {
        let s: u64 = (0..p.len()).filter(|i| mask >> i & 1 == 1).map(|i| p[i]).sum();
        if s < cap {
            out.insert(s);
        }
    }
    out
}

pub fn max_run(b: &[bool]) -> usize {
    let (mut best, mut cur) = (0, 0);
    for &x in b {
        cur = if x { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

/// Largest difference of consecutive elements, the leading gap counted as `min F`.
pub fn max_gap(elements: &[u64]) -> Option<u64> {
    let first = *elements.first()?;
    Some(
        elements
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain([first])
            .max()
            .unwrap(),
    )
}

pub fn window_meets(b: &[bool], start: usize, len: usize) -> bool {
    b[start..start + len].iter().any(|&x| x)
}

/// Some `[s, s + n)` in the window meets F and every length-`g` piece of it does.
pub fn piecewise_syndetic(b: &[bool], g: usize, n: usize) -> bool {
    if n > b.len() {
        return false;
    }
    (0..=b.len() - n).any(|s| {
        window_meets(b, s, n) && (n < g || (s..=s + n - g).all(|t| window_meets(b, t, g)))
    })
}

pub fn weakly_thick(b: &[bool], k_max: usize, n: usize) -> Option<(usize, usize)> {
    for k in 1..=k_max {
        let mut a = 0;
        while k * (a + n - 1) < b.len() {
            if (0..n).all(|i| b[k * (a + i)]) {
                return Some((k, a));
            }
            a += 1;
        }
    }
    None
}

pub fn max_count(b: &[bool], len: usize) -> Option<usize> {
    if len == 0 || len > b.len() {
        return None;
    }
    (0..=b.len() - len)
        .map(|s| b[s..s + len].iter().filter(|&&x| x).count())
        .max()
}

pub fn residue_modulus(b: &[bool], k_max: usize) -> Option<usize> {
    let h = b.len();
    (1..=k_max.min(h.saturating_sub(1))).find(|&k| (1..h).filter(|m| m % k == 0).all(|m| b[m]))
}

/// Some nondecreasing `d`-tuple of positive elements has all subset sums in F.
pub fn has_ip(b: &[bool], d: usize) -> bool {
    fn rec(b: &[bool], d: usize, gens: &mut Vec<usize>) -> bool {
        if gens.len() == d {
            return true;
        }
        let lo = gens.last().copied().unwrap_or(1).max(1);
        for c in lo..b.len() {
            gens.push(c);
            let ok = (1u32..(1 << gens.len())).all(|mask| {
                let s: usize = (0..gens.len()).filter(|i| mask >> i & 1 == 1).map(|i| gens[i]).sum();
                s < b.len() && b[s]
            });
            if ok && rec(b, d, gens) {
                return true;
            }
            gens.pop();
        }
        false
    }
    rec(b, d, &mut Vec::new())
}

pub fn arb_bits(max_len: usize) -> impl Strategy<Value = Vec<bool>> {
    (1..=max_len).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n))
}

/// Bit vectors biased toward long runs and long gaps.
pub fn arb_runny_bits(max_len: usize) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec((any::<bool>(), 1usize..12), 1..max_len / 4).prop_map(move |chunks| {
        let mut out = Vec::new();
        for (v, len) in chunks {
            out.extend(std::iter::repeat_n(v, len));
        }
        out.truncate(max_len);
        out
    })
}
