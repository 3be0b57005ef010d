//! Rule-based anomaly scoring. VR-ARM flags objects that satisfy valid rare
//! rules; VF-ARM flags objects that violate valid frequent rules. Each match
//! contributes `|log2(1 − Interest)| · Length` to the object's score.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{Context, Threshold};
use crate::error::{Error, Result};
use crate::itemset::{Itemset, Tid};
use crate::miner::DEFAULT_MAX_LEN;
use crate::rules::{self, Rule, RuleKind, RuleSet};

/// Lower clamp on lift before taking the logarithm.
pub const LIFT_EPSILON: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    VrArm,
    VfArm,
    Fpof,
    Avf,
    Od,
}

impl Detector {
    pub fn as_str(self) -> &'static str {
        match self {
            Detector::VrArm => "vr-arm",
            Detector::VfArm => "vf-arm",
            Detector::Fpof => "fpof",
            Detector::Avf => "avf",
            Detector::Od => "od",
        }
    }

    pub fn is_rule_based(self) -> bool {
        matches!(self, Detector::VrArm | Detector::VfArm)
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "vr-arm" => Detector::VrArm,
            "vf-arm" => Detector::VfArm,
            "fpof" => Detector::Fpof,
            "avf" => Detector::Avf,
            "od" => Detector::Od,
            other => return Err(Error::Config(format!("unknown detector {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    HighIsAnomalous,
    LowIsAnomalous,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Sum,
    Mean,
}

/// How rule lift is turned into the `Interest` term of the weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterestMode {
    /// `Interest = 1 − 1/lift`, so the weight is `|log2 lift| · Length`.
    #[default]
    LiftNormalized,
    /// `Interest = lift`; undefined for `lift ≥ 1`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    SatisfiedRare,
    ViolatedFrequent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchRecord {
    /// Index into the rule set the ranking was scored with.
    pub rule: usize,
    pub mode: MatchMode,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredObject {
    pub tid: Tid,
    pub name: String,
    pub score: f64,
    pub matches: Vec<MatchRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    pub detector: Detector,
    pub polarity: Polarity,
    pub entries: Vec<ScoredObject>,
    /// Degenerate-run remarks, e.g. an empty pattern set.
    pub notes: Vec<String>,
}

impl Ranking {
    /// Sorts `entries` most anomalous first; ties go to the smaller tid name.
    pub fn new(detector: Detector, polarity: Polarity, mut entries: Vec<ScoredObject>) -> Self {
        entries.sort_by(|a, b| {
            let by_score = match polarity {
                Polarity::HighIsAnomalous => b.score.total_cmp(&a.score),
                Polarity::LowIsAnomalous => a.score.total_cmp(&b.score),
            };
            by_score.then_with(|| a.name.cmp(&b.name))
        });
        Self {
            detector,
            polarity,
            entries,
            notes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends every object missing from the ranking with score 0, in tid
    /// name order, so the ranking covers the whole dataset.
    pub fn complete(mut self, c: &Context) -> Self {
        let mut present = vec![false; c.m()];
        for e in &self.entries {
            present[e.tid as usize] = true;
        }
        let mut missing: Vec<ScoredObject> = (0..c.m())
            .filter(|&t| !present[t])
            .map(|t| ScoredObject {
                tid: t as Tid,
                name: c.tid_name(t as Tid).to_owned(),
                score: 0.0,
                matches: Vec::new(),
            })
            .collect();
        missing.sort_by(|a, b| a.name.cmp(&b.name));
        self.entries.extend(missing);
        self
    }

    /// Score oriented so that larger always means more anomalous.
    pub fn anomaly_score(&self, entry: &ScoredObject) -> f64 {
        match self.polarity {
            Polarity::HighIsAnomalous => entry.score,
            Polarity::LowIsAnomalous => -entry.score,
        }
    }

    /// CSV `rank,tid,score,n_matched_rules`; baselines add a `detector`
    /// column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let with_detector = !self.detector.is_rule_based();
        if with_detector {
            w.write_record(["rank", "tid", "score", "n_matched_rules", "detector"])?;
        } else {
            w.write_record(["rank", "tid", "score", "n_matched_rules"])?;
        }
        for (i, e) in self.entries.iter().enumerate() {
            let mut rec = vec![
                (i + 1).to_string(),
                e.name.clone(),
                e.score.to_string(),
                e.matches.len().to_string(),
            ];
            if with_detector {
                rec.push(self.detector.to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The rule's items are all present in the object.
pub fn matches_rare(obj: &Itemset, r: &Rule) -> Result<bool> {
    if r.kind != RuleKind::Rare {
        return Err(Error::KindMismatch {
            expected: RuleKind::Rare,
        });
    }
    Ok(r.antecedent.is_subset(obj) && r.consequent.is_subset(obj))
}

/// Antecedent present, consequent not fully present.
pub fn violates_freq(obj: &Itemset, r: &Rule) -> Result<bool> {
    if r.kind != RuleKind::Frequent {
        return Err(Error::KindMismatch {
            expected: RuleKind::Frequent,
        });
    }
    Ok(r.antecedent.is_subset(obj) && !r.consequent.is_subset(obj))
}

pub fn rule_weight(r: &Rule, mode: InterestMode) -> Result<f64> {
    let length = r.length() as f64;
    match mode {
        InterestMode::LiftNormalized => {
            let lift = r.lift.clamp(LIFT_EPSILON, 1.0 / LIFT_EPSILON);
            Ok(lift.log2().abs() * length)
        }
        InterestMode::Literal => {
            let complement = 1.0 - r.lift;
            if complement.is_nan() || complement <= 0.0 {
                return Err(Error::UndefinedWeight { lift: r.lift });
            }
            Ok(complement.log2().abs() * length)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmConfig {
    /// `max_supp` for VR-ARM, `min_supp` for VF-ARM.
    pub support: Threshold,
    /// Percent.
    pub min_conf: f64,
    pub max_len: usize,
    pub aggregation: Aggregation,
    pub interest: InterestMode,
}

impl ArmConfig {
    pub fn new(support: Threshold, min_conf: f64) -> Self {
        Self {
            support,
            min_conf,
            max_len: DEFAULT_MAX_LEN,
            aggregation: Aggregation::Sum,
            interest: InterestMode::LiftNormalized,
        }
    }
}

/// Valid rare rules, then every object scored by the rules it satisfies.
pub fn vr_arm(c: &Context, cfg: &ArmConfig) -> Result<(RuleSet, Ranking)> {
    let rules = rules::get_rare_rules(c, cfg.support, cfg.min_conf, cfg.max_len)?;
    let ranking = score_objects(c, &rules, cfg.aggregation, cfg.interest)?;
    Ok((rules, ranking))
}

/// Valid frequent rules, then every object scored by the rules it violates.
pub fn vf_arm(c: &Context, cfg: &ArmConfig) -> Result<(RuleSet, Ranking)> {
    let rules = rules::get_freq_rules(c, cfg.support, cfg.min_conf, cfg.max_len)?;
    let ranking = score_objects(c, &rules, cfg.aggregation, cfg.interest)?;
    Ok((rules, ranking))
}

/// Matches every object against every rule (rare rules by satisfaction,
/// frequent rules by violation) and ranks the flagged objects.
///
/// Matched tids are found per rule through support sets; contributions are
/// then accumulated in rule order so float sums are schedule-independent.
pub fn score_objects(
    c: &Context,
    rules: &RuleSet,
    aggregation: Aggregation,
    interest: InterestMode,
) -> Result<Ranking> {
    let per_rule: Vec<(usize, MatchMode, f64, Vec<Tid>)> = rules
        .rules()
        .par_iter()
        .enumerate()
        .map(|(idx, r)| {
            let weight = rule_weight(r, interest)?;
            let (mode, tids) = match r.kind {
                RuleKind::Rare => (
                    MatchMode::SatisfiedRare,
                    c.support_set_unchecked(&r.union()).into_vec(),
                ),
                RuleKind::Frequent => {
                    let applicable = c.support_set_unchecked(&r.antecedent);
                    let satisfied = c.support_set_unchecked(&r.union());
                    (
                        MatchMode::ViolatedFrequent,
                        applicable.difference(&satisfied).into_vec(),
                    )
                }
            };
            Ok((idx, mode, weight, tids))
        })
        .collect::<Result<_>>()?;

    let mut matches: Vec<Vec<MatchRecord>> = vec![Vec::new(); c.m()];
    for (rule, mode, weight, tids) in per_rule {
        for t in tids {
            matches[t as usize].push(MatchRecord { rule, mode, weight });
        }
    }
    let entries: Vec<ScoredObject> = matches
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(t, m)| {
            let score = aggregate(&m, aggregation);
            ScoredObject {
                tid: t as Tid,
                name: c.tid_name(t as Tid).to_owned(),
                score,
                matches: m,
            }
        })
        .collect();
    let detector = match rules.iter().next().map(|r| r.kind) {
        Some(RuleKind::Frequent) => Detector::VfArm,
        Some(RuleKind::Rare) => Detector::VrArm,
        None if rules.params.thresholds.min_supp.is_some() => Detector::VfArm,
        None => Detector::VrArm,
    };
    Ok(Ranking::new(detector, Polarity::HighIsAnomalous, entries))
}

/// Sum or mean of the match weights, accumulated in match order.
pub fn aggregate(matches: &[MatchRecord], aggregation: Aggregation) -> f64 {
    let sum: f64 = matches.iter().map(|m| m.weight).sum();
    match aggregation {
        Aggregation::Sum => sum,
        Aggregation::Mean if matches.is_empty() => 0.0,
        Aggregation::Mean => sum / matches.len() as f64,
    }
}

/// Human-readable account of why an object was ranked where it was.
pub fn explain(entry: &ScoredObject, rules: &RuleSet, c: &Context) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} score={}", entry.name, fmt_num(entry.score));
    if entry.matches.is_empty() {
        out.push_str("  no matched rules\n");
        return out;
    }
    let mut lines: Vec<(f64, String)> = entry
        .matches
        .iter()
        .map(|m| {
            let r = &rules.rules()[m.rule];
            let verb = match m.mode {
                MatchMode::SatisfiedRare => "satisfies",
                MatchMode::ViolatedFrequent => "violates",
            };
            let text = format!(
                "{} (supp={}, conf={:.4}, lift={:.4}, weight={:.4}) [{verb}]",
                r.render(c),
                r.support_abs,
                r.confidence,
                r.lift,
                m.weight
            );
            (m.weight, text)
        })
        .collect();
    lines.sort_by(|a, b| match b.0.total_cmp(&a.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        o => o,
    });
    for (_, text) in lines {
        let _ = writeln!(out, "  {text}");
    }
    out
}

fn fmt_num(x: f64) -> String {
    format!("{x:.4}")
}
