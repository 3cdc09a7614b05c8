//! The JSON certificate envelope shared by detectors, family checks and reports.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    Thick,
    Syndetic,
    PiecewiseSyndetic,
    Ip,
    WeaklyThick,
    Cofinite,
    Pubd,
    ResidueSuperset,
}

impl ClassTag {
    pub const ALL: [ClassTag; 8] = [
        ClassTag::Thick,
        ClassTag::Syndetic,
        ClassTag::PiecewiseSyndetic,
        ClassTag::Ip,
        ClassTag::WeaklyThick,
        ClassTag::Cofinite,
        ClassTag::Pubd,
        ClassTag::ResidueSuperset,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassTag::Thick => "thick",
            ClassTag::Syndetic => "syndetic",
            ClassTag::PiecewiseSyndetic => "piecewise_syndetic",
            ClassTag::Ip => "ip",
            ClassTag::WeaklyThick => "weakly_thick",
            ClassTag::Cofinite => "cofinite",
            ClassTag::Pubd => "pubd",
            ClassTag::ResidueSuperset => "residue_superset",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a check at a stated scale. Ordered from weakest to strongest so that
/// aggregates can take the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RefutedAtScale,
    Inconclusive,
    Witnessed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::RefutedAtScale => "refuted_at_scale",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Witnessed => "witnessed",
        }
    }

    pub fn is_witnessed(&self) -> bool {
        matches!(self, Verdict::Witnessed)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters at which a verdict holds. Only the fields a class uses are set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<u64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_ratio"
    )]
    pub delta: Option<Ratio<u64>>,
}

/// Class-specific evidence. Witness payloads of `witnessed` certificates are
/// replayable; refutation payloads record where the search stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `[start, start + len) ⊆ F`.
    Run { start: u64, len: u64 },
    /// The longest run found, absent when the set is empty.
    LongestRun { start: Option<u64>, len: u64 },
    /// Largest observed gap; `start` is the element opening it, or 0 for the
    /// leading gap.
    Gap { start: u64, len: u64 },
    /// Every length-`g` subinterval of `[start, start + len)` meets F.
    DenseInterval { start: u64, len: u64, g: u64 },
    /// All nonempty finite sums of `generators` lie in F.
    Ip { generators: Vec<u64> },
    /// Search statistics for an IP search without a witness.
    IpSearch { nodes: u64, exhausted: bool },
    /// `k·[start, start + len) ⊆ F`.
    Dilation { k: u64, start: u64, len: u64 },
    /// `k` values checked without a run of the requested length.
    DilationSearch { k_checked: u64 },
    /// `[start, horizon) ⊆ F`.
    Tail { start: u64 },
    /// `|F ∩ [start, start + len)| = count`, the densest window of that length.
    Density { start: u64, len: u64, count: u64 },
    /// Every positive multiple of `k` inside the window lies in F.
    Residue { k: u64 },
    /// For each checked modulus, the least positive multiple missing from F.
    ResidueMisses { misses: Vec<ResidueMiss> },
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueMiss {
    pub k: u64,
    pub missing: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCertificate {
    pub class: ClassTag,
    pub verdict: Verdict,
    pub scale: Scale,
    pub witness: Witness,
    pub horizon: u64,
}

impl ClassCertificate {
    pub fn is_witnessed(&self) -> bool {
        self.verdict.is_witnessed()
    }
}

/// Parses `"a/b"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || invalid("delta", format!("cannot parse `{s}` as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(invalid("delta", "zero denominator"));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        return Ok(Ratio::new(num, den));
    }
    let int: u64 = s.parse().map_err(|_| bad())?;
    Ok(Ratio::from_integer(int))
}

pub(crate) fn format_ratio(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) mod ratio_str {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_ratio(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse_ratio(&raw).map_err(serde::de::Error::custom)
    }
}

mod opt_ratio {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&super::format_ratio(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Ratio<u64>>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|s| super::parse_ratio(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| invalid("class", format!("unknown class `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("1/32").unwrap(), Ratio::new(1, 32));
        assert_eq!(parse_ratio("0.5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn verdict_order() {
        assert!(Verdict::RefutedAtScale < Verdict::Inconclusive);
        assert!(Verdict::Inconclusive < Verdict::Witnessed);
    }

    #[test]
    fn envelope_field_names() {
        let cert = ClassCertificate {
            class: ClassTag::Pubd,
            verdict: Verdict::Witnessed,
            scale: Scale {
                length: Some(10),
                delta: Some(Ratio::new(1, 2)),
                ..Scale::default()
            },
            witness: Witness::Density {
                start: 0,
                len: 10,
                count: 5,
            },
            horizon: 100,
        };
        let json = serde_json::to_string(&cert).unwrap();
        assert_eq!(
            json,
            r#"{"class":"pubd","verdict":"witnessed","scale":{"length":10,"delta":"1/2"},"witness":{"kind":"density","start":0,"len":10,"count":5},"horizon":100}"#
        );
        let back: ClassCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }
}
