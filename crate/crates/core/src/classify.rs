//! Classification of a generating prefix: detectors run on the entering-time set
//! of every short factor, then aggregated per class.

use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{ClassCertificate, Verdict};
use crate::detect::{detect_piecewise_syndetic, detect_pubd, detect_thick, detect_weakly_thick, ip_witness};
use crate::error::{invalid, Error, Result};
use crate::family::{block_member, BlockOutcome};
use crate::symbolic::{
    entering_times, hitting_times, transitivity_from_index, Cylinder, FactorIndex, SymbolicWord,
    TransitivityReport,
};
use crate::window::WindowSet;

/// Detector parameters used by [`classify_point`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scales {
    /// Run length for thick-type checks and AP length for block checks.
    pub n: u64,
    /// Gap bound for piecewise syndeticity.
    pub g: u64,
    /// IP depth.
    pub d: u64,
    pub k_max: u64,
    /// Largest step in the block-embedding pool.
    pub r_max: u64,
    /// Interval length for the density check.
    pub length: u64,
    #[serde(with = "crate::certificate::ratio_str")]
    pub delta: Ratio<u64>,
    pub budget: u64,
    /// Most cylinders examined per report.
    pub cylinder_cap: usize,
}

impl Default for Scales {
    fn default() -> Self {
        Scales {
            n: 3,
            g: 32,
            d: 3,
            k_max: 8,
            r_max: 32,
            length: 64,
            delta: Ratio::new(1, 32),
            budget: crate::detect::DEFAULT_IP_BUDGET,
            cylinder_cap: 512,
        }
    }
}

impl Scales {
    /// Whether `k_max <= r_max <= g`, the nesting under which a weakly thick
    /// witness implies a block witness, which implies a piecewise syndetic one.
    pub fn nested(&self) -> bool {
        self.k_max <= self.r_max && self.r_max <= self.g
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n", self.n),
            ("g", self.g),
            ("d", self.d),
            ("k_max", self.k_max),
            ("r_max", self.r_max),
            ("L", self.length),
            ("budget", self.budget),
            ("cap", self.cylinder_cap as u64),
        ] {
            if v == 0 {
                return Err(invalid(name, "must be positive"));
            }
        }
        if *self.delta.numer() == 0 || self.delta > Ratio::from_integer(1) {
            return Err(invalid("delta", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

impl FromStr for Scales {
    type Err = Error;

    /// Comma-separated `key=value` overrides of the defaults, e.g. `n=3,g=16`.
    fn from_str(s: &str) -> Result<Self> {
        let mut scales = Scales::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid("scales", format!("expected key=value, found `{part}`")))?;
            let int = || {
                value
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| invalid("scales", format!("bad value for `{key}`: `{value}`")))
            };
            match key.trim() {
                "n" => scales.n = int()?,
                "g" => scales.g = int()?,
                "d" => scales.d = int()?,
                "k_max" => scales.k_max = int()?,
                "r_max" => scales.r_max = int()?,
                "L" | "length" => scales.length = int()?,
                "delta" => scales.delta = crate::certificate::parse_ratio(value)?,
                "budget" => scales.budget = int()?,
                "cap" => scales.cylinder_cap = int()? as usize,
                other => return Err(invalid("scales", format!("unknown key `{other}`"))),
            }
        }
        scales.validate()?;
        Ok(scales)
    }
}

/// Block-embedding evidence: the least step `r <= r_max` such that the entering
/// set contains `shift + r·{0, …, n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DspsEvidence {
    pub verdict: Verdict,
    pub step: Option<u64>,
    pub shift: Option<u64>,
    pub terms: u64,
    pub pool: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderEvidence {
    pub cylinder: Cylinder,
    pub occurrences: u64,
    pub pubd: ClassCertificate,
    pub piecewise_syndetic: ClassCertificate,
    pub dsps: DspsEvidence,
    pub weakly_thick: ClassCertificate,
    pub ip: ClassCertificate,
}

/// One return-time thickness check per symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnThickness {
    pub cylinder: Cylinder,
    pub thick: ClassCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakMixingEvidence {
    pub ip_depth: u64,
    pub ip_verdict: Verdict,
    pub returns: Vec<ReturnThickness>,
    /// Some symbol's observed return times contain no two consecutive integers.
    pub refuted_at_scale: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub e_evidence: Verdict,
    pub m_evidence: Verdict,
    pub dsps_evidence: Verdict,
    pub hy_evidence: Verdict,
    pub ip_evidence: Verdict,
    pub transitivity_evidence: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub word_len: u64,
    pub alphabet: u16,
    pub max_factor_len: u64,
    pub scales: Scales,
    pub scales_nested: bool,
    pub transitivity: Option<TransitivityReport>,
    pub cylinders_found: u64,
    pub cylinders_tested: u64,
    pub cylinder_cap_reached: bool,
    pub aggregate: Aggregate,
    pub weak_mixing: WeakMixingEvidence,
    pub cylinders: Vec<CylinderEvidence>,
}

fn dsps_evidence(times: &WindowSet, scales: &Scales) -> Result<DspsEvidence> {
    let terms = scales.n;
    let mut verdict = Verdict::RefutedAtScale;
    for r in 1..=scales.r_max {
        let depth = r * (terms - 1);
        let source = WindowSet::new((0..terms).map(|i| i * r), depth + 1)?;
        match block_member(&source, times, depth.max(1))? {
            BlockOutcome::Embedded(w) => {
                return Ok(DspsEvidence {
                    verdict: Verdict::Witnessed,
                    step: Some(r),
                    shift: w.shift_at(depth),
                    terms,
                    pool: scales.r_max,
                })
            }
            BlockOutcome::Refuted { .. } => {}
        }
        if times.horizon() <= depth {
            verdict = Verdict::Inconclusive;
        }
    }
    Ok(DspsEvidence {
        verdict,
        step: None,
        shift: None,
        terms,
        pool: scales.r_max,
    })
}

fn cylinder_evidence(u: &Cylinder, times: &WindowSet, scales: &Scales) -> Result<CylinderEvidence> {
    Ok(CylinderEvidence {
        cylinder: u.clone(),
        occurrences: times.len(),
        pubd: detect_pubd(times, scales.length, scales.delta)?,
        piecewise_syndetic: detect_piecewise_syndetic(times, scales.g, scales.n)?,
        dsps: dsps_evidence(times, scales)?,
        weakly_thick: detect_weakly_thick(times, scales.k_max, scales.n)?,
        ip: ip_witness(times, scales.d, scales.budget)?,
    })
}

fn min_verdict(it: impl Iterator<Item = Verdict>) -> Verdict {
    it.min().unwrap_or(Verdict::Inconclusive)
}

fn aggregate(cylinders: &[CylinderEvidence], transitivity: Verdict) -> Aggregate {
    Aggregate {
        e_evidence: min_verdict(cylinders.iter().map(|c| c.pubd.verdict)),
        m_evidence: min_verdict(cylinders.iter().map(|c| c.piecewise_syndetic.verdict)),
        dsps_evidence: min_verdict(cylinders.iter().map(|c| c.dsps.verdict)),
        hy_evidence: min_verdict(cylinders.iter().map(|c| c.weakly_thick.verdict)),
        ip_evidence: min_verdict(cylinders.iter().map(|c| c.ip.verdict)),
        transitivity_evidence: transitivity,
    }
}

/// Runs every detector on `N(x, [u])` for the factors `u` of length `1..=max_len`
/// (at most `scales.cylinder_cap`, shortest first).
pub fn classify_point(x: &SymbolicWord, max_len: usize, scales: &Scales) -> Result<ClassReport> {
    scales.validate()?;
    if max_len == 0 {
        return Err(invalid("L", "factor length must be at least 1"));
    }
    let index = FactorIndex::build(x, max_len)?;
    let found = index.len();
    let chosen: Vec<(Cylinder, WindowSet)> = index
        .factors()
        .take(scales.cylinder_cap)
        .map(|(c, s)| (c.clone(), s.clone()))
        .collect();

    let cylinders: Vec<CylinderEvidence> = chosen
        .par_iter()
        .map(|(u, times)| cylinder_evidence(u, times, scales))
        .collect::<Result<_>>()?;

    let t_len = (max_len as u64).min(x.len() / 4) as usize;
    let transitivity = if t_len == 0 {
        None
    } else {
        Some(transitivity_from_index(&index, x.len(), t_len)?)
    };
    let t_verdict = match &transitivity {
        None => Verdict::Inconclusive,
        Some(t) if t.passed => Verdict::Witnessed,
        Some(_) => Verdict::RefutedAtScale,
    };

    let symbols: Vec<Cylinder> = index.of_len(1).map(|(c, _)| c.clone()).collect();
    let returns: Vec<ReturnThickness> = symbols
        .par_iter()
        .map(|u| {
            let h = hitting_times(x, u, u)?;
            Ok(ReturnThickness {
                cylinder: u.clone(),
                thick: detect_thick(&h, 2)?,
            })
        })
        .collect::<Result<_>>()?;
    let agg = aggregate(&cylinders, t_verdict);
    let weak_mixing = WeakMixingEvidence {
        ip_depth: scales.d,
        ip_verdict: agg.ip_evidence,
        refuted_at_scale: returns.iter().any(|r| r.thick.verdict == Verdict::RefutedAtScale),
        returns,
    };

    Ok(ClassReport {
        word_len: x.len(),
        alphabet: x.alphabet(),
        max_factor_len: index.max_len() as u64,
        scales: scales.clone(),
        scales_nested: scales.nested(),
        transitivity,
        cylinders_found: found as u64,
        cylinders_tested: cylinders.len() as u64,
        cylinder_cap_reached: found > cylinders.len(),
        aggregate: agg,
        weak_mixing,
        cylinders,
    })
}

/// Implication and reproducibility checks on a finished report. Returns one line
/// per violation.
pub fn check_report_invariants(report: &ClassReport) -> Vec<String> {
    let mut out = Vec::new();
    let t = report.aggregate.transitivity_evidence;
    let recomputed = aggregate(&report.cylinders, t);
    if recomputed != report.aggregate {
        out.push("aggregate verdicts differ from the per-cylinder minimum".to_string());
    }
    if report.scales_nested != report.scales.nested() {
        out.push("scale nesting flag is stale".to_string());
    }
    if report.scales.nested() {
        for c in &report.cylinders {
            if c.weakly_thick.is_witnessed() && !c.dsps.verdict.is_witnessed() {
                out.push(format!("{}: weakly thick without block evidence", c.cylinder));
            }
            if c.dsps.verdict.is_witnessed() && !c.piecewise_syndetic.is_witnessed() {
                out.push(format!("{}: block evidence without piecewise syndeticity", c.cylinder));
            }
        }
        let a = &report.aggregate;
        if a.hy_evidence.is_witnessed() && !a.dsps_evidence.is_witnessed() {
            out.push("aggregate: HY without dsps".to_string());
        }
        if a.dsps_evidence.is_witnessed() && !a.m_evidence.is_witnessed() {
            out.push("aggregate: dsps without M".to_string());
        }
    }
    let refuted = report
        .weak_mixing
        .returns
        .iter()
        .any(|r| r.thick.verdict == Verdict::RefutedAtScale);
    if refuted != report.weak_mixing.refuted_at_scale {
        out.push("weak mixing flag disagrees with the return certificates".to_string());
    }
    out
}

/// Replays every certificate of the report against entering sets recomputed
/// from the word.
pub fn replay_report(x: &SymbolicWord, report: &ClassReport) -> Vec<String> {
    let mut out = Vec::new();
    for c in &report.cylinders {
        let times = match entering_times(x, &c.cylinder) {
            Ok(t) => t,
            Err(e) => {
                out.push(format!("{}: {e}", c.cylinder));
                continue;
            }
        };
        for cert in [&c.pubd, &c.piecewise_syndetic, &c.weakly_thick, &c.ip] {
            if let Err(e) = crate::replay::replay(cert, &times) {
                out.push(format!("{}: {e}", c.cylinder));
            }
        }
        if let (Some(r), Some(a)) = (c.dsps.step, c.dsps.shift) {
            if !(0..c.dsps.terms).all(|i| times.contains(a + i * r)) {
                out.push(format!("{}: block evidence does not replay", c.cylinder));
            }
        }
    }
    out
}
