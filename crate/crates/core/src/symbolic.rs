//! Finite prefixes of points in a shift space and the time sets read off them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::window::{cross_differences, WindowSet};

/// Storage for the symbols of a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Symbols {
    Dense(Vec<u8>),
    /// The binary word `1_S` on `[0, S.horizon())`. Used for very long words
    /// with few ones, such as the staged construction's point.
    Indicator(WindowSet),
}

/// A finite word over `{0, …, alphabet − 1}`, the prefix of a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicWord {
    alphabet: u16,
    symbols: Symbols,
}

impl SymbolicWord {
    pub fn new(alphabet: u16, symbols: Vec<u8>) -> Result<Self> {
        if !(2..=256).contains(&alphabet) {
            return Err(invalid("alphabet", "size must lie in 2..=256"));
        }
        if symbols.is_empty() {
            return Err(invalid("symbols", "a word needs at least one symbol"));
        }
        if let Some((position, &s)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| s as u16 >= alphabet)
        {
            return Err(Error::AlphabetMismatch {
                symbol: s as u64,
                position,
                alphabet: alphabet as u64,
            });
        }
        Ok(SymbolicWord {
            alphabet,
            symbols: Symbols::Dense(symbols),
        })
    }

    /// Binary word with the smallest alphabet holding every symbol.
    pub fn from_symbols(symbols: Vec<u8>) -> Result<Self> {
        let alphabet = symbols.iter().max().map_or(2, |&m| (m as u16 + 1).max(2));
        Self::new(alphabet, symbols)
    }

    /// The indicator word of `support` on `[0, support.horizon())`.
    pub fn indicator(support: WindowSet) -> Result<Self> {
        if support.horizon() == 0 {
            return Err(invalid("symbols", "a word needs at least one symbol"));
        }
        Ok(SymbolicWord {
            alphabet: 2,
            symbols: Symbols::Indicator(support),
        })
    }

    pub fn alphabet(&self) -> u16 {
        self.alphabet
    }

    pub fn len(&self) -> u64 {
        match &self.symbols {
            Symbols::Dense(v) => v.len() as u64,
            Symbols::Indicator(s) => s.horizon(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn symbol(&self, i: u64) -> Option<u8> {
        if i >= self.len() {
            return None;
        }
        Some(match &self.symbols {
            Symbols::Dense(v) => v[i as usize],
            Symbols::Indicator(s) => s.contains(i) as u8,
        })
    }

    /// The symbols as a vector; fails for words longer than `limit`.
    pub fn to_dense(&self, limit: u64) -> Result<Vec<u8>> {
        if self.len() > limit {
            return Err(invalid(
                "word",
                format!("length {} exceeds the dense limit {limit}", self.len()),
            ));
        }
        Ok(match &self.symbols {
            Symbols::Dense(v) => v.clone(),
            Symbols::Indicator(s) => (0..s.horizon()).map(|i| s.contains(i) as u8).collect(),
        })
    }

    /// `x[start .. start + len)`.
    pub fn factor(&self, start: u64, len: usize) -> Option<Vec<u8>> {
        if start.checked_add(len as u64)? > self.len() {
            return None;
        }
        Some(match &self.symbols {
            Symbols::Dense(v) => v[start as usize..start as usize + len].to_vec(),
            Symbols::Indicator(s) => (start..start + len as u64)
                .map(|i| s.contains(i) as u8)
                .collect(),
        })
    }

    /// The support of a binary word, when stored sparsely.
    pub fn support(&self) -> Option<&WindowSet> {
        match &self.symbols {
            Symbols::Indicator(s) => Some(s),
            Symbols::Dense(_) => None,
        }
    }
}

/// The cylinder `[u]` of points that read `u` from coordinate 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Cylinder {
    word: Vec<u8>,
}

impl Cylinder {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if word.is_empty() {
            return Err(invalid("cylinder", "defining block must be nonempty"));
        }
        Ok(Cylinder { word })
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.iter().all(|&s| s < 10) {
            for s in &self.word {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl std::str::FromStr for Cylinder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid("cylinder", format!("cannot parse `{s}`"));
        let word = if s.contains(',') {
            s.split(',')
                .map(|p| p.trim().parse::<u8>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?
        };
        Cylinder::new(word)
    }
}

impl TryFrom<String> for Cylinder {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Cylinder> for String {
    fn from(c: Cylinder) -> String {
        c.to_string()
    }
}

fn check_fits(x: &SymbolicWord, len: usize) -> Result<()> {
    if len as u64 > x.len() {
        return Err(invalid(
            "cylinder",
            format!("length {len} exceeds the word length {}", x.len()),
        ));
    }
    Ok(())
}

/// Starts of maximal all-zero stretches long enough for `len` zeros.
fn zero_block_times(support: &WindowSet, len: u64) -> WindowSet {
    let horizon = support.horizon() - len + 1;
    let spans = support
        .gaps()
        .into_iter()
        .filter(|&(a, b)| b - a >= len)
        .map(|(a, b)| (a, b - len + 1))
        .collect();
    WindowSet::from_spans_clipped(spans, horizon)
}

/// `N(x, [u]) = {n : x[n .. n + |u|) = u}` on the horizon `N − |u| + 1`.
pub fn entering_times(x: &SymbolicWord, u: &Cylinder) -> Result<WindowSet> {
    check_fits(x, u.len())?;
    let len = u.len() as u64;
    let horizon = x.len() - len + 1;
    match &x.symbols {
        Symbols::Dense(v) => {
            let hits = v
                .windows(u.len())
                .enumerate()
                .filter(|(_, w)| *w == u.word())
                .map(|(i, _)| i as u64);
            WindowSet::new(hits, horizon)
        }
        Symbols::Indicator(s) => {
            if u.word().iter().any(|&b| b > 1) {
                return Ok(WindowSet::empty(horizon));
            }
            let Some(first_one) = u.word().iter().position(|&b| b == 1) else {
                return Ok(zero_block_times(s, len));
            };
            let offset = first_one as u64;
            let hits = s
                .iter()
                .filter(|&w| w >= offset && w - offset < horizon)
                .map(|w| w - offset)
                .filter(|&i| {
                    u.word()
                        .iter()
                        .enumerate()
                        .all(|(j, &b)| s.contains(i + j as u64) == (b == 1))
                });
            WindowSet::new(hits, horizon)
        }
    }
}

/// `{n >= 0 : ∃ i, x[i..) starts with u and x[i+n..) starts with v}`, every factor
/// inside the word. The horizon is `N − |v| + 1`.
pub fn hitting_times(x: &SymbolicWord, u: &Cylinder, v: &Cylinder) -> Result<WindowSet> {
    let from = entering_times(x, u)?;
    let to = entering_times(x, v)?;
    Ok(cross_differences(&from, &to))
}

/// Hitting times of `[u_a] × [u_b]` into `[v_a] × [v_b]` in the product system.
pub fn product_hitting(
    xa: &SymbolicWord,
    ua: &Cylinder,
    va: &Cylinder,
    xb: &SymbolicWord,
    ub: &Cylinder,
    vb: &Cylinder,
) -> Result<WindowSet> {
    Ok(hitting_times(xa, ua, va)?.intersection(&hitting_times(xb, ub, vb)?))
}

/// Occurrence sets of every factor of length `1..=max_len`.
#[derive(Clone, Debug)]
pub struct FactorIndex {
    max_len: usize,
    occurrences: Vec<(Cylinder, WindowSet)>,
}

impl FactorIndex {
    pub fn build(x: &SymbolicWord, max_len: usize) -> Result<Self> {
        if max_len == 0 {
            return Err(invalid("L", "factor length must be at least 1"));
        }
        let max_len = max_len.min(x.len() as usize);
        let mut occurrences = match &x.symbols {
            Symbols::Dense(v) => dense_factors(v, max_len)?,
            Symbols::Indicator(s) => sparse_factors(s, max_len)?,
        };
        occurrences.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(FactorIndex {
            max_len,
            occurrences,
        })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Factors ordered by length, then lexicographically.
    pub fn factors(&self) -> impl Iterator<Item = (&Cylinder, &WindowSet)> {
        self.occurrences.iter().map(|(c, s)| (c, s))
    }

    pub fn of_len(&self, len: usize) -> impl Iterator<Item = (&Cylinder, &WindowSet)> {
        self.factors().filter(move |(c, _)| c.len() == len)
    }

    pub fn get(&self, u: &Cylinder) -> Option<&WindowSet> {
        self.occurrences
            .binary_search_by(|(c, _)| c.len().cmp(&u.len()).then_with(|| c.cmp(u)))
            .ok()
            .map(|i| &self.occurrences[i].1)
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }
}

fn dense_factors(v: &[u8], max_len: usize) -> Result<Vec<(Cylinder, WindowSet)>> {
    let n = v.len();
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut map: HashMap<&[u8], Vec<u64>> = HashMap::new();
        for (i, w) in v.windows(len).enumerate() {
            map.entry(w).or_default().push(i as u64);
        }
        let horizon = (n - len + 1) as u64;
        for (w, pos) in map {
            out.push((Cylinder::new(w.to_vec())?, WindowSet::new(pos, horizon)?));
        }
    }
    Ok(out)
}

fn sparse_factors(s: &WindowSet, max_len: usize) -> Result<Vec<(Cylinder, WindowSet)>> {
    let n = s.horizon();
    let mut map: HashMap<Vec<u8>, Vec<u64>> = HashMap::new();
    // A factor with a one is found exactly once, by aligning its first one.
    let mut prev: Option<u64> = None;
    for w in s.iter() {
        for offset in 0..max_len as u64 {
            if offset > w || prev.is_some_and(|p| p >= w - offset) {
                break;
            }
            let i = w - offset;
            for len in offset as usize + 1..=max_len {
                if i + len as u64 > n {
                    break;
                }
                let word: Vec<u8> = (i..i + len as u64).map(|j| s.contains(j) as u8).collect();
                map.entry(word).or_default().push(i);
            }
        }
        prev = Some(w);
    }
    let mut out = Vec::with_capacity(map.len() + max_len);
    for (word, pos) in map {
        let horizon = n - word.len() as u64 + 1;
        out.push((Cylinder::new(word)?, WindowSet::new(pos, horizon)?));
    }
    for len in 1..=max_len as u64 {
        let times = zero_block_times(s, len);
        if !times.is_empty() {
            out.push((Cylinder::new(vec![0; len as usize])?, times));
        }
    }
    Ok(out)
}

/// Factors of length `len` that never occur inside the suffix `x[N/2 .. N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub passed: bool,
    pub factor_len: u64,
    pub suffix_start: u64,
    pub factors_checked: u64,
    pub violating: Vec<Cylinder>,
}

/// Finite proxy for a transitive point: every length-`len` factor recurs in the
/// second half of the word.
pub fn transitive_point_evidence(x: &SymbolicWord, len: usize) -> Result<TransitivityReport> {
    if len == 0 || len as u64 > x.len() / 4 {
        return Err(invalid("L", "factor length must lie in 1..=N/4"));
    }
    let index = FactorIndex::build(x, len)?;
    transitivity_from_index(&index, x.len(), len)
}

pub(crate) fn transitivity_from_index(
    index: &FactorIndex,
    word_len: u64,
    len: usize,
) -> Result<TransitivityReport> {
    let suffix_start = word_len / 2;
    let mut checked = 0;
    let mut violating = Vec::new();
    for (u, times) in index.of_len(len) {
        checked += 1;
        if times.next_at_or_after(suffix_start).is_none() {
            violating.push(u.clone());
        }
    }
    Ok(TransitivityReport {
        passed: violating.is_empty(),
        factor_len: len as u64,
        suffix_start,
        factors_checked: checked,
        violating,
    })
}

/// Applies `detector` to `N(T^i x, [u])` for every occurrence `i <= N/2` of `u` and
/// keeps the best certificate; earlier starts win ties. A start after which `u`
/// never returns inside the window yields `inconclusive`.
pub fn point_center_evidence(
    x: &SymbolicWord,
    u: &Cylinder,
    detector: &crate::detect::DetectorRequest,
) -> Result<(u64, crate::certificate::ClassCertificate)> {
    let times = entering_times(x, u)?;
    if times.is_empty() {
        return Err(Error::CylinderNotFound(u.to_string()));
    }
    let half = x.len() / 2;
    let mut best: Option<(u64, crate::certificate::ClassCertificate)> = None;
    let starts: Vec<u64> = times.iter().take_while(|&i| i <= half).collect();
    if starts.is_empty() {
        let i = times.min().unwrap_or(0);
        let local = times.shift(-(i as i64)).with_horizon(times.horizon() - i);
        let mut cert = detector.run(&local)?;
        cert.verdict = crate::certificate::Verdict::Inconclusive;
        return Ok((i, cert));
    }
    for i in starts {
        let local = times.shift(-(i as i64)).with_horizon(times.horizon() - i);
        let mut cert = detector.run(&local)?;
        if local.len() < 2 {
            cert.verdict = crate::certificate::Verdict::Inconclusive;
        }
        let better = best.as_ref().is_none_or(|(_, b)| cert.verdict > b.verdict);
        if better {
            let done = cert.verdict.is_witnessed();
            best = Some((i, cert));
            if done {
                break;
            }
        }
    }
    Ok(best.expect("at least one start"))
}

/// Residue-superset detection on the return times of the initial block.
pub fn quasi_periodic_evidence(
    x: &SymbolicWord,
    len: usize,
    k_max: u64,
) -> Result<crate::certificate::ClassCertificate> {
    if len == 0 {
        return Err(invalid("L", "block length must be at least 1"));
    }
    check_fits(x, len)?;
    let head = Cylinder::new(x.factor(0, len).expect("fits"))?;
    crate::detect::detect_residue_superset(&entering_times(x, &head)?, k_max)
}

/// The lexicographically least de Bruijn cycle of order `order` over `alphabet`
/// symbols, of length `alphabet^order`.
pub fn de_bruijn(alphabet: u8, order: usize) -> Result<Vec<u8>> {
    if alphabet < 2 || order == 0 {
        return Err(invalid("de_bruijn", "need alphabet >= 2 and order >= 1"));
    }
    let k = alphabet as usize;
    if (order as f64) * (k as f64).log2() > 26.0 {
        return Err(invalid("de_bruijn", "cycle longer than 2^26 symbols"));
    }
    let mut a = vec![0u8; order + 1];
    let mut out = Vec::with_capacity(k.pow(order as u32));
    // Lyndon words of length dividing `order`, concatenated in order.
    fn db(t: usize, p: usize, n: usize, k: usize, a: &mut [u8], out: &mut Vec<u8>) {
        if t > n {
            if n.is_multiple_of(p) {
                out.extend_from_slice(&a[1..=p]);
            }
        } else {
            a[t] = a[t - p];
            db(t + 1, p, n, k, a, out);
            for j in a[t - p] as usize + 1..k {
                a[t] = j as u8;
                db(t + 1, t, n, k, a, out);
            }
        }
    }
    db(1, 1, order, k, &mut a, &mut out);
    Ok(out)
}

/// `cycle` repeated until the word reaches `len` symbols.
pub fn cycled(cycle: &[u8], len: usize) -> Vec<u8> {
    cycle.iter().copied().cycle().take(len).collect()
}
