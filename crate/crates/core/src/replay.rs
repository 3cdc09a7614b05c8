//! Independent re-verification of certificates. Only membership queries and the
//! stored runs of the set are used; none of the detector code is called.

use thiserror::Error;

use crate::certificate::{ClassCertificate, ClassTag, Verdict, Witness};
use crate::window::WindowSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("certificate horizon {claimed} differs from the set's horizon {actual}")]
    HorizonMismatch { claimed: u64, actual: u64 },
    #[error("{class} certificate carries an unexpected payload")]
    Payload { class: ClassTag },
    #[error("missing scale parameter `{0}`")]
    MissingScale(&'static str),
    #[error("{class}: {detail}")]
    Failed { class: ClassTag, detail: String },
}

fn fail(class: ClassTag, detail: impl Into<String>) -> ReplayError {
    ReplayError::Failed {
        class,
        detail: detail.into(),
    }
}

fn all_in(f: &WindowSet, mut it: impl Iterator<Item = u64>) -> Option<u64> {
    it.find(|&v| !f.contains(v))
}

/// Re-checks a certificate against the set it was issued for. Witness payloads of
/// `witnessed` certificates are always replayed; refutation payloads are replayed
/// where they carry concrete evidence.
pub fn replay(cert: &ClassCertificate, f: &WindowSet) -> Result<(), ReplayError> {
    if cert.horizon != f.horizon() {
        return Err(ReplayError::HorizonMismatch {
            claimed: cert.horizon,
            actual: f.horizon(),
        });
    }
    let class = cert.class;
    let h = f.horizon();
    let scale = &cert.scale;
    let need = |v: Option<u64>, name| v.ok_or(ReplayError::MissingScale(name));
    match (class, cert.verdict, &cert.witness) {
        (ClassTag::Thick, Verdict::Witnessed, &Witness::Run { start, len }) => {
            let n = need(scale.n, "n")?;
            if len < n || start + len > h {
                return Err(fail(class, "run shorter than n or outside the window"));
            }
            if let Some(v) = all_in(f, start..start + n) {
                return Err(fail(class, format!("{v} is not in F")));
            }
        }
        (ClassTag::Thick, Verdict::RefutedAtScale, Witness::LongestRun { .. }) => {
            let n = need(scale.n, "n")?;
            if h < 2 * n {
                return Err(fail(class, "window too short to refute"));
            }
            if f.spans().iter().any(|&(s, e)| e - s >= n) {
                return Err(fail(class, "a run of length n exists"));
            }
        }
        (ClassTag::Syndetic, verdict, &Witness::Gap { start, len }) => {
            let g = need(scale.g, "g")?;
            match verdict {
                Verdict::Witnessed => {
                    if f.is_empty() {
                        return Err(fail(class, "empty set witnessed"));
                    }
                    let first = f.min().unwrap_or(0);
                    if first > g {
                        return Err(fail(class, format!("leading gap {first} exceeds {g}")));
                    }
                    for (a, b) in f.complement().spans() {
                        if *a > 0 && *b < h && b - a + 1 > g {
                            return Err(fail(class, format!("gap after {} exceeds {g}", a - 1)));
                        }
                    }
                }
                Verdict::RefutedAtScale => {
                    if len <= g {
                        return Err(fail(class, "recorded gap is within the bound"));
                    }
                    if f.is_empty() {
                        if h <= g {
                            return Err(fail(class, "window too short to refute"));
                        }
                    } else if start == 0 && f.min() == Some(len) {
                        // Leading gap.
                    } else if !f.contains(start)
                        || !f.contains(start + len)
                        || f.count_in(start + 1, start + len) > 0
                    {
                        return Err(fail(class, "recorded gap is not a gap of F"));
                    }
                }
                Verdict::Inconclusive => {}
            }
        }
        (ClassTag::PiecewiseSyndetic, Verdict::Witnessed, &Witness::DenseInterval { start, len, g }) => {
            let n = need(scale.n, "n")?;
            if len != n || scale.g != Some(g) || start + len > h {
                return Err(fail(class, "interval does not match the scale"));
            }
            if f.count_in(start, start + len) == 0 {
                return Err(fail(class, "interval misses F"));
            }
            if g <= len {
                for s in start..=start + len - g {
                    if f.count_in(s, s + g) == 0 {
                        return Err(fail(class, format!("[{s}, {}) misses F", s + g)));
                    }
                }
            }
        }
        (ClassTag::Ip, Verdict::Witnessed, Witness::Ip { generators }) => {
            let d = need(scale.d, "d")?;
            if generators.len() as u64 != d
                || generators.contains(&0)
                || generators.windows(2).any(|w| w[0] > w[1])
            {
                return Err(fail(class, "generators are not a nondecreasing positive sequence"));
            }
            let max = f.max().unwrap_or(0);
            for mask in 1u64..(1 << generators.len()) {
                let sum: u64 = generators
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .sum();
                if sum > max || !f.contains(sum) {
                    return Err(fail(class, format!("finite sum {sum} is not in F")));
                }
            }
        }
        (ClassTag::WeaklyThick, Verdict::Witnessed, &Witness::Dilation { k, start, len }) => {
            let n = need(scale.n, "n")?;
            let k_max = need(scale.k_max, "k_max")?;
            if k == 0 || k > k_max || len < n {
                return Err(fail(class, "dilation outside the scale"));
            }
            if let Some(v) = all_in(f, (start..start + n).map(|m| m * k)) {
                return Err(fail(class, format!("{v} is not in F")));
            }
        }
        (ClassTag::Cofinite, verdict, &Witness::Tail { start }) => {
            if start > h {
                return Err(fail(class, "tail past the horizon"));
            }
            if verdict == Verdict::Witnessed && start == h {
                return Err(fail(class, "empty tail witnessed"));
            }
            if verdict == Verdict::Witnessed && !f.contains_range(start, h) {
                return Err(fail(class, "tail not contained in F"));
            }
            if start > 0 && start < h && f.contains(start - 1) {
                return Err(fail(class, "tail start is not least"));
            }
        }
        (ClassTag::Pubd, verdict, &Witness::Density { start, len, count }) => {
            let l = need(scale.length, "length")?;
            let delta = scale.delta.ok_or(ReplayError::MissingScale("delta"))?;
            if len != l || start + len > h {
                return Err(fail(class, "interval does not match the scale"));
            }
            let actual = f.count_in(start, start + len);
            if actual != count {
                return Err(fail(class, format!("interval holds {actual}, not {count}")));
            }
            let enough =
                count as u128 * *delta.denom() as u128 >= *delta.numer() as u128 * len as u128;
            if enough != (verdict == Verdict::Witnessed) {
                return Err(fail(class, "density threshold disagrees with the verdict"));
            }
        }
        (ClassTag::ResidueSuperset, Verdict::Witnessed, &Witness::Residue { k }) => {
            let k_max = need(scale.k_max, "k_max")?;
            if k == 0 || k > k_max || k >= h {
                return Err(fail(class, "modulus outside the scale"));
            }
            for (a, b) in f.complement().spans() {
                let m = (*a).max(1).div_ceil(k) * k;
                if m < *b {
                    return Err(fail(class, format!("multiple {m} is not in F")));
                }
            }
        }
        (ClassTag::ResidueSuperset, Verdict::RefutedAtScale, Witness::ResidueMisses { misses }) => {
            for miss in misses {
                if miss.missing == 0 || miss.missing % miss.k != 0 || f.contains(miss.missing) {
                    return Err(fail(class, format!("{} is not a missing multiple", miss.missing)));
                }
            }
        }
        (_, Verdict::Witnessed, _) => return Err(ReplayError::Payload { class }),
        _ => {}
    }
    Ok(())
}
