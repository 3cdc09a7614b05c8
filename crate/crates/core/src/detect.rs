//! Detectors for the set classes. Each returns a [`ClassCertificate`] whose verdict
//! only speaks about the observed window.

use num_rational::Ratio;

use crate::certificate::{ClassCertificate, ClassTag, ResidueMiss, Scale, Verdict, Witness};
use crate::error::{invalid, Result};
use crate::window::WindowSet;

/// Default node budget for [`ip_witness`].
pub const DEFAULT_IP_BUDGET: u64 = 10_000_000;

fn positive(name: &'static str, v: u64) -> Result<()> {
    if v == 0 {
        Err(invalid(name, "must be at least 1"))
    } else {
        Ok(())
    }
}

fn longest_run(f: &WindowSet) -> Witness {
    let best = f
        .spans()
        .iter()
        .fold(None::<(u64, u64)>, |best, &(s, e)| match best {
            Some((_, len)) if len >= e - s => best,
            _ => Some((s, e - s)),
        });
    Witness::LongestRun {
        start: best.map(|b| b.0),
        len: best.map_or(0, |b| b.1),
    }
}

/// A run of `n` consecutive integers inside F. The first qualifying run wins.
pub fn detect_thick(f: &WindowSet, n: u64) -> Result<ClassCertificate> {
    positive("n", n)?;
    let scale = Scale {
        n: Some(n),
        ..Scale::default()
    };
    let hit = f.spans().iter().find(|&&(s, e)| e - s >= n);
    let (verdict, witness) = match hit {
        Some(&(s, _)) => (Verdict::Witnessed, Witness::Run { start: s, len: n }),
        None if f.horizon() >= n.saturating_mul(2) => (Verdict::RefutedAtScale, longest_run(f)),
        None => (Verdict::Inconclusive, longest_run(f)),
    };
    Ok(ClassCertificate {
        class: ClassTag::Thick,
        verdict,
        scale,
        witness,
        horizon: f.horizon(),
    })
}

/// Witnessed iff every observed gap (leading gap included) is at most `g`.
pub fn detect_syndetic(f: &WindowSet, g: u64) -> Result<ClassCertificate> {
    positive("g", g)?;
    let scale = Scale {
        g: Some(g),
        ..Scale::default()
    };
    let (verdict, witness) = match f.gap_profile() {
        Ok(p) => {
            let verdict = if p.max_gap <= g {
                Verdict::Witnessed
            } else {
                Verdict::RefutedAtScale
            };
            (
                verdict,
                Witness::Gap {
                    start: p.start,
                    len: p.max_gap,
                },
            )
        }
        Err(_) => {
            let verdict = if f.horizon() > g {
                Verdict::RefutedAtScale
            } else {
                Verdict::Inconclusive
            };
            (
                verdict,
                Witness::Gap {
                    start: 0,
                    len: f.horizon(),
                },
            )
        }
    };
    Ok(ClassCertificate {
        class: ClassTag::Syndetic,
        verdict,
        scale,
        witness,
        horizon: f.horizon(),
    })
}

/// Least `s` such that `I = [s, s + n)` fits in the window, meets F, and every
/// length-`g` subinterval of `I` meets F.
pub(crate) fn dense_interval_start(f: &WindowSet, g: u64, n: u64) -> Option<u64> {
    let horizon = f.horizon();
    if n > horizon || f.is_empty() {
        return None;
    }
    // Complement runs of length >= g are the only places a length-g subinterval
    // can miss F; an admissible I overlaps each of them by at most g - 1.
    let barriers: Vec<(u64, u64)> = f.gaps().into_iter().filter(|&(a, b)| b - a >= g).collect();
    let mut seg_start = 0u64;
    let mut bi = 0usize;
    loop {
        let seg_end = match barriers.get(bi) {
            Some(&(a, _)) => (a + g - 1).min(horizon),
            None => horizon,
        };
        if let Some(first) = f.next_at_or_after(seg_start) {
            if first < seg_end {
                let s = seg_start.max((first + 1).saturating_sub(n));
                if s + n <= seg_end {
                    return Some(s);
                }
            }
        }
        let &(_, b) = barriers.get(bi)?;
        seg_start = b.saturating_sub(g - 1);
        bi += 1;
    }
}

pub fn detect_piecewise_syndetic(f: &WindowSet, g: u64, n: u64) -> Result<ClassCertificate> {
    positive("g", g)?;
    positive("n", n)?;
    let scale = Scale {
        n: Some(n),
        g: Some(g),
        ..Scale::default()
    };
    let (verdict, witness) = match dense_interval_start(f, g, n) {
        Some(start) => (
            Verdict::Witnessed,
            Witness::DenseInterval { start, len: n, g },
        ),
        None if f.horizon() >= n => (Verdict::RefutedAtScale, Witness::None),
        None => (Verdict::Inconclusive, Witness::None),
    };
    Ok(ClassCertificate {
        class: ClassTag::PiecewiseSyndetic,
        verdict,
        scale,
        witness,
        horizon: f.horizon(),
    })
}

struct IpSearch<'a> {
    f: &'a WindowSet,
    max: u64,
    depth: usize,
    budget: u64,
    nodes: u64,
    gens: Vec<u64>,
    /// Subset sums of `gens`, one layer per depth.
    sums: Vec<Vec<u64>>,
}

impl IpSearch<'_> {
    /// `Some(true)` on success, `Some(false)` when the subtree is exhausted,
    /// `None` when the budget runs out.
    fn extend(&mut self) -> Option<bool> {
        if self.gens.len() == self.depth {
            return Some(true);
        }
        let lower = self.gens.last().copied().unwrap_or(1).max(1);
        let total: u64 = self.gens.iter().sum();
        let current = self.sums.last().cloned().unwrap_or_default();
        let mut cursor = lower;
        while let Some(c) = self.f.next_at_or_after(cursor) {
            if c.saturating_add(total) > self.max {
                break;
            }
            if self.nodes >= self.budget {
                return None;
            }
            self.nodes += 1;
            cursor = c + 1;
            if current.iter().all(|&s| self.f.contains(s + c)) {
                let mut next = Vec::with_capacity(current.len() * 2 + 1);
                next.extend_from_slice(&current);
                next.push(c);
                next.extend(current.iter().map(|&s| s + c));
                self.gens.push(c);
                self.sums.push(next);
                match self.extend() {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {
                        self.gens.pop();
                        self.sums.pop();
                    }
                }
            }
        }
        Some(false)
    }
}

/// Depth-first search for a nondecreasing `(p_1, …, p_d)`, `p_i >= 1`, all of
/// whose nonempty finite sums lie in F. Each candidate generator tried counts as
/// one node.
pub fn ip_witness(f: &WindowSet, d: u64, budget: u64) -> Result<ClassCertificate> {
    positive("d", d)?;
    let scale = Scale {
        d: Some(d),
        budget: Some(budget),
        ..Scale::default()
    };
    let mut search = IpSearch {
        f,
        max: f.max().unwrap_or(0),
        depth: d as usize,
        budget,
        nodes: 0,
        gens: Vec::with_capacity(d as usize),
        sums: Vec::with_capacity(d as usize),
    };
    let (verdict, witness) = match search.extend() {
        Some(true) => (
            Verdict::Witnessed,
            Witness::Ip {
                generators: search.gens.clone(),
            },
        ),
        Some(false) => (
            Verdict::RefutedAtScale,
            Witness::IpSearch {
                nodes: search.nodes,
                exhausted: true,
            },
        ),
        None => (
            Verdict::Inconclusive,
            Witness::IpSearch {
                nodes: search.nodes,
                exhausted: false,
            },
        ),
    };
    Ok(ClassCertificate {
        class: ClassTag::Ip,
        verdict,
        scale,
        witness,
        horizon: f.horizon(),
    })
}

/// Least `k <= k_max` whose dilation fiber is thick at `n`.
pub fn detect_weakly_thick(f: &WindowSet, k_max: u64, n: u64) -> Result<ClassCertificate> {
    positive("k_max", k_max)?;
    positive("n", n)?;
    let scale = Scale {
        n: Some(n),
        k_max: Some(k_max),
        ..Scale::default()
    };
    let mut all_refuted = true;
    for k in 1..=k_max {
        let fiber = f.dilation_fiber(k)?;
        let cert = detect_thick(&fiber, n)?;
        match (cert.verdict, cert.witness) {
            (Verdict::Witnessed, Witness::Run { start, len }) => {
                return Ok(ClassCertificate {
                    class: ClassTag::WeaklyThick,
                    verdict: Verdict::Witnessed,
                    scale,
                    witness: Witness::Dilation { k, start, len },
                    horizon: f.horizon(),
                });
            }
            (Verdict::RefutedAtScale, _) => {}
            _ => all_refuted = false,
        }
    }
    Ok(ClassCertificate {
        class: ClassTag::WeaklyThick,
        verdict: if all_refuted {
            Verdict::RefutedAtScale
        } else {
            Verdict::Inconclusive
        },
        scale,
        witness: Witness::DilationSearch { k_checked: k_max },
        horizon: f.horizon(),
    })
}

/// Least `t` with `[t, horizon) ⊆ F`; `t = horizon` carries no evidence.
pub fn detect_cofinite(f: &WindowSet) -> ClassCertificate {
    let horizon = f.horizon();
    let t = match f.spans().last() {
        Some(&(s, e)) if e == horizon => s,
        _ => horizon,
    };
    ClassCertificate {
        class: ClassTag::Cofinite,
        verdict: if t < horizon {
            Verdict::Witnessed
        } else {
            Verdict::Inconclusive
        },
        scale: Scale::default(),
        witness: Witness::Tail { start: t },
        horizon,
    }
}

/// Densest length-`len` window against the threshold `delta`.
pub fn detect_pubd(f: &WindowSet, len: u64, delta: Ratio<u64>) -> Result<ClassCertificate> {
    positive("L", len)?;
    if *delta.numer() == 0 || delta > Ratio::from_integer(1) {
        return Err(invalid("delta", "must lie in (0, 1]"));
    }
    let scale = Scale {
        length: Some(len),
        delta: Some(delta),
        ..Scale::default()
    };
    let (verdict, witness) = match f.max_count(len) {
        Some((count, start)) => {
            let enough = count as u128 * *delta.denom() as u128
                >= *delta.numer() as u128 * len as u128;
            (
                if enough {
                    Verdict::Witnessed
                } else {
                    Verdict::RefutedAtScale
                },
                Witness::Density { start, len, count },
            )
        }
        None => (Verdict::Inconclusive, Witness::None),
    };
    Ok(ClassCertificate {
        class: ClassTag::Pubd,
        verdict,
        scale,
        witness,
        horizon: f.horizon(),
    })
}

/// Least positive multiple of `k` inside the window missing from F.
fn first_missing_multiple(f: &WindowSet, k: u64) -> Option<u64> {
    f.gaps().into_iter().find_map(|(a, b)| {
        let m = a.max(1).div_ceil(k) * k;
        (m < b).then_some(m)
    })
}

/// Least `k <= k_max` with every positive multiple of `k` in the window inside F.
/// Moduli at or past the horizon have no multiple to test and are skipped.
pub fn detect_residue_superset(f: &WindowSet, k_max: u64) -> Result<ClassCertificate> {
    positive("k_max", k_max)?;
    let scale = Scale {
        k_max: Some(k_max),
        ..Scale::default()
    };
    let mut misses = Vec::new();
    for k in 1..=k_max.min(f.horizon().saturating_sub(1)) {
        match first_missing_multiple(f, k) {
            None => {
                return Ok(ClassCertificate {
                    class: ClassTag::ResidueSuperset,
                    verdict: Verdict::Witnessed,
                    scale,
                    witness: Witness::Residue { k },
                    horizon: f.horizon(),
                })
            }
            Some(missing) => misses.push(ResidueMiss { k, missing }),
        }
    }
    Ok(ClassCertificate {
        class: ClassTag::ResidueSuperset,
        verdict: if misses.is_empty() {
            Verdict::Inconclusive
        } else {
            Verdict::RefutedAtScale
        },
        scale,
        witness: Witness::ResidueMisses { misses },
        horizon: f.horizon(),
    })
}

/// A detector invocation with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetectorRequest {
    Thick { n: u64 },
    Syndetic { g: u64 },
    PiecewiseSyndetic { g: u64, n: u64 },
    Ip { d: u64, budget: u64 },
    WeaklyThick { k_max: u64, n: u64 },
    Cofinite,
    Pubd { len: u64, delta: Ratio<u64> },
    ResidueSuperset { k_max: u64 },
}

impl DetectorRequest {
    pub fn class(&self) -> ClassTag {
        match self {
            DetectorRequest::Thick { .. } => ClassTag::Thick,
            DetectorRequest::Syndetic { .. } => ClassTag::Syndetic,
            DetectorRequest::PiecewiseSyndetic { .. } => ClassTag::PiecewiseSyndetic,
            DetectorRequest::Ip { .. } => ClassTag::Ip,
            DetectorRequest::WeaklyThick { .. } => ClassTag::WeaklyThick,
            DetectorRequest::Cofinite => ClassTag::Cofinite,
            DetectorRequest::Pubd { .. } => ClassTag::Pubd,
            DetectorRequest::ResidueSuperset { .. } => ClassTag::ResidueSuperset,
        }
    }

    pub fn run(&self, f: &WindowSet) -> Result<ClassCertificate> {
        match *self {
            DetectorRequest::Thick { n } => detect_thick(f, n),
            DetectorRequest::Syndetic { g } => detect_syndetic(f, g),
            DetectorRequest::PiecewiseSyndetic { g, n } => detect_piecewise_syndetic(f, g, n),
            DetectorRequest::Ip { d, budget } => ip_witness(f, d, budget),
            DetectorRequest::WeaklyThick { k_max, n } => detect_weakly_thick(f, k_max, n),
            DetectorRequest::Cofinite => Ok(detect_cofinite(f)),
            DetectorRequest::Pubd { len, delta } => detect_pubd(f, len, delta),
            DetectorRequest::ResidueSuperset { k_max } => detect_residue_superset(f, k_max),
        }
    }
}
