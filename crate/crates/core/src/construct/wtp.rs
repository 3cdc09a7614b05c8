//! The point `x = 1_A` with `A ⊆ F_0 = ⋃ k[a_n, a_n + n]`, built by planting
//! periodic copies of its own prefix blocks inside the intervals of `F_0`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::symbolic::SymbolicWord;
use crate::window::WindowSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartSpec {
    /// `a_n = n^2`.
    Quadratic,
    /// `a_1, a_2, …` given explicitly.
    Explicit(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtpSpec {
    pub k: u64,
    pub starts: StartSpec,
    pub stages: usize,
    /// Defaults to `k(a_p + p) + 1` for the second planting index `p` of the
    /// last stage.
    pub window: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedRun {
    pub p: u64,
    pub start: u64,
    /// Copies of the block written, counting a truncated last copy.
    pub copies: u64,
    /// Copies lying entirely inside the window.
    pub full_copies: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtpStage {
    pub n: usize,
    pub block_len: u64,
    pub block: String,
    pub planted: Vec<PlantedRun>,
    /// Support of the stage word `x^(n)`.
    pub ones: WindowSet,
    /// Positions written so far.
    pub defined: WindowSet,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtpTrace {
    pub k: u64,
    pub starts: Vec<u64>,
    pub f0: WindowSet,
    pub window: u64,
    pub stages: Vec<WtpStage>,
}

impl WtpTrace {
    pub fn point(&self) -> SymbolicWord {
        let last = self.stages.last().expect("at least one stage");
        SymbolicWord::new(2, digits(&last.word)).expect("binary word")
    }

    pub fn support(&self) -> &WindowSet {
        &self.stages.last().expect("at least one stage").ones
    }
}

fn digits(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

fn render(bits: &[u8]) -> String {
    bits.iter().map(|&b| char::from(b'0' + b)).collect()
}

/// Indices `2^i (2j + 1)` in increasing order.
fn partition_class(i: usize) -> impl Iterator<Item = u64> {
    (0u64..).map(move |j| (1u64 << i) * (2 * j + 1))
}

struct Starts {
    explicit: Option<Vec<u64>>,
}

impl Starts {
    fn get(&self, n: u64) -> Option<u64> {
        match &self.explicit {
            None => n.checked_mul(n),
            Some(v) => v.get(n as usize - 1).copied(),
        }
    }
}

pub fn build_wtp(spec: &WtpSpec) -> Result<WtpTrace> {
    let k = spec.k;
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if spec.stages == 0 {
        return Err(invalid("stages", "must be at least 1"));
    }
    let starts = Starts {
        explicit: match &spec.starts {
            StartSpec::Quadratic => None,
            StartSpec::Explicit(v) => {
                if v.is_empty() {
                    return Err(invalid("starts", "need at least one start"));
                }
                for (idx, pair) in v.windows(2).enumerate() {
                    let n = idx as u64 + 1;
                    if pair[1] <= pair[0] + 2 * n {
                        return Err(invalid(
                            "starts",
                            format!("a_{} = {} must exceed a_{n} + 2·{n} = {}", n + 1, pair[1], pair[0] + 2 * n),
                        ));
                    }
                }
                Some(v.clone())
            }
        },
    };
    let start = |n: u64| {
        starts
            .get(n)
            .ok_or_else(|| invalid("starts", format!("a_{n} is not given")))
    };
    let block_len = |s: usize| -> Result<u64> {
        Ok(if s == 1 {
            k * start(1)? + k
        } else {
            k * start(s as u64)?
        })
    };

    let window = match spec.window {
        Some(w) if w > 0 => w,
        Some(_) => return Err(invalid("window", "must be positive")),
        None => {
            let r = block_len(spec.stages)?;
            let p = partition_class(spec.stages)
                .filter(|&p| k * p >= r)
                .nth(1)
                .expect("partition classes are infinite");
            k * (start(p)? + p) + 1
        }
    };

    // F_0 on the window.
    let mut f0_spans = Vec::new();
    let mut n = 1u64;
    while let Some(a) = starts.get(n) {
        if k * a >= window {
            break;
        }
        f0_spans.extend((a..=a + n).map(|m| (k * m, k * m + 1)));
        n += 1;
    }
    let f0 = WindowSet::from_spans_clipped(f0_spans, window);

    let w = window as usize;
    let mut x = vec![0u8; w];
    let mut defined = vec![false; w];
    let mut stages = Vec::with_capacity(spec.stages);
    for s in 1..=spec.stages {
        let r = block_len(s)?;
        let block: Vec<u8> = if s == 1 {
            (0..r).map(|i| f0.contains(i) as u8).collect()
        } else {
            (0..r as usize).map(|i| x.get(i).copied().unwrap_or(0)).collect()
        };
        for (i, &b) in block.iter().enumerate().take(w) {
            x[i] = b;
            defined[i] = true;
        }
        let mut planted = Vec::new();
        for p in partition_class(s) {
            let Some(a) = starts.get(p) else { break };
            let base = k * a;
            if base >= window {
                break;
            }
            if k * p < r {
                continue;
            }
            let copies = k * p / r;
            let mut full = 0;
            for j in 0..copies {
                let st = base + j * r;
                if st + r <= window {
                    full += 1;
                }
                for (t, &b) in block.iter().enumerate() {
                    let pos = (st + t as u64) as usize;
                    if pos < w {
                        x[pos] = b;
                        defined[pos] = true;
                    }
                }
            }
            planted.push(PlantedRun {
                p,
                start: base,
                copies,
                full_copies: full,
            });
        }
        let ones = WindowSet::new(
            x.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i as u64),
            window,
        )?;
        let def = WindowSet::new(
            defined.iter().enumerate().filter(|(_, &d)| d).map(|(i, _)| i as u64),
            window,
        )?;
        stages.push(WtpStage {
            n: s,
            block_len: r,
            block: render(&block),
            planted,
            ones,
            defined: def,
            word: render(&x),
        });
    }

    let mut listed = Vec::new();
    let mut n = 1u64;
    while let Some(a) = starts.get(n) {
        if k * a >= window {
            break;
        }
        listed.push(a);
        n += 1;
    }
    Ok(WtpTrace {
        k,
        starts: listed,
        f0,
        window,
        stages,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtpCheck {
    /// Every stage support lies in `F_0`.
    pub containment: bool,
    pub monotone: bool,
    /// `B_{n+1}` begins with `B_n`.
    pub block_prefix: bool,
    /// `x^(n)` agrees with `x^(n−1)` on every position defined before stage n.
    pub stage_prefix: bool,
    pub normalized_starts: bool,
    /// Per stage: some planting holds at least two whole copies of `B_n`.
    pub periodic_runs: Vec<bool>,
}

impl WtpCheck {
    pub fn ok(&self) -> bool {
        self.containment
            && self.monotone
            && self.block_prefix
            && self.stage_prefix
            && self.normalized_starts
            && self.periodic_runs.iter().all(|&b| b)
    }
}

/// Scans the finished trace; shares nothing with the builder's bookkeeping beyond
/// the stored words.
pub fn verify_wtp(trace: &WtpTrace) -> WtpCheck {
    let f0 = &trace.f0;
    let containment = trace.stages.iter().all(|s| {
        s.word
            .bytes()
            .enumerate()
            .all(|(i, b)| b == b'0' || f0.contains(i as u64))
    });
    let monotone = trace
        .stages
        .windows(2)
        .all(|p| p[0].ones.is_subset(&p[1].ones));
    let block_prefix = trace
        .stages
        .windows(2)
        .all(|p| p[1].block.starts_with(&p[0].block));
    let stage_prefix = trace.stages.windows(2).all(|p| {
        let (a, b) = (p[0].word.as_bytes(), p[1].word.as_bytes());
        p[0].defined.iter().all(|i| a[i as usize] == b[i as usize])
    });
    let normalized_starts = trace
        .starts
        .windows(2)
        .enumerate()
        .all(|(i, w)| w[1] > w[0] + 2 * (i as u64 + 1));
    let last = trace.stages.last().map(|s| s.word.as_bytes()).unwrap_or_default();
    let periodic_runs = trace
        .stages
        .iter()
        .map(|s| {
            let block = s.block.as_bytes();
            let r = block.len();
            s.planted.iter().any(|run| {
                let st = run.start as usize;
                let copies = (0..run.copies as usize)
                    .take_while(|j| {
                        let a = st + j * r;
                        a + r <= last.len() && &last[a..a + r] == block
                    })
                    .count();
                copies >= 2
            })
        })
        .collect();
    WtpCheck {
        containment,
        monotone,
        block_prefix,
        stage_prefix,
        normalized_starts,
        periodic_runs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(k: u64, stages: usize) -> WtpTrace {
        build_wtp(&WtpSpec {
            k,
            starts: StartSpec::Quadratic,
            stages,
            window: None,
        })
        .unwrap()
    }

    #[test]
    fn default_windows() {
        assert_eq!(quad(1, 3).window, 1641);
        assert_eq!(quad(2, 3).window, 3281);
        assert_eq!(quad(3, 3).window, 4921);
    }

    #[test]
    fn first_blocks() {
        let t = quad(3, 3);
        assert_eq!(t.stages[0].block, "000100");
        assert_eq!(t.stages[1].block, "000100000000");
        assert_eq!(t.stages[2].block.len(), 27);
        let single = quad(3, 1);
        assert!(single.stages[0].word.starts_with(&single.stages[0].block));
    }

    #[test]
    fn support_inside_f0() {
        for k in 1..=3 {
            let t = quad(k, 3);
            let check = verify_wtp(&t);
            assert!(check.ok(), "k = {k}: {check:?}");
            assert!(t.support().is_subset(&t.f0));
            for v in t.support().iter() {
                let m = v / k;
                assert_eq!(v % k, 0);
                assert!((1..).take_while(|n| n * n <= m).any(|n| m <= n * n + n));
            }
        }
    }

    #[test]
    fn explicit_starts() {
        let spec = WtpSpec {
            k: 3,
            starts: StartSpec::Explicit(vec![1, 4, 9, 16, 25, 36, 49, 64, 81, 100, 121, 144]),
            stages: 2,
            window: Some(600),
        };
        let t = build_wtp(&spec).unwrap();
        assert!(verify_wtp(&t).containment);
        let bad = WtpSpec {
            starts: StartSpec::Explicit(vec![1, 3]),
            ..spec
        };
        assert!(build_wtp(&bad).is_err());
    }
}
