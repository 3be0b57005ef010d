//! Rule quality measures and generation of valid rare rules (from the
//! expanded rare border) and valid frequent rules (from maximal frequent
//! itemsets).

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{Context, SupportThresholds, Threshold};
use crate::error::{Error, Result};
use crate::itemset::Itemset;
use crate::miner::{self, MinerParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Frequent,
    Rare,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Frequent => "frequent",
            RuleKind::Rare => "rare",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    pub support_abs: usize,
    pub confidence: f64,
    pub lift: f64,
    pub kind: RuleKind,
}

impl Rule {
    pub fn union(&self) -> Itemset {
        self.antecedent.union(&self.consequent)
    }

    /// Items on both sides.
    pub fn length(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }

    pub fn render(&self, c: &Context) -> String {
        format!(
            "{{{}}} → {{{}}}",
            c.render(&self.antecedent, ","),
            c.render(&self.consequent, ",")
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleMetrics {
    pub support_abs: usize,
    pub confidence: f64,
    pub lift: f64,
}

/// Rules in canonical order (antecedent, then consequent), no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    rules: Vec<Rule>,
    pub params: MinerParams,
}

impl RuleSet {
    pub fn new(mut rules: Vec<Rule>, params: MinerParams) -> Self {
        rules.sort_by(|a, b| (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent)));
        rules.dedup_by(|a, b| a.antecedent == b.antecedent && a.consequent == b.consequent);
        Self { rules, params }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    /// Appends a rule, keeping canonical order.
    pub fn insert(&mut self, rule: Rule) {
        let key = (&rule.antecedent, &rule.consequent);
        match self
            .rules
            .binary_search_by(|r| (&r.antecedent, &r.consequent).cmp(&key))
        {
            Ok(_) => {}
            Err(pos) => self.rules.insert(pos, rule),
        }
    }

    /// CSV `kind,antecedent,consequent,supp_abs,confidence,lift`, itemsets as
    /// `;`-joined item names.
    pub fn write_csv<W: Write>(&self, c: &Context, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "kind",
            "antecedent",
            "consequent",
            "supp_abs",
            "confidence",
            "lift",
        ])?;
        for r in &self.rules {
            w.write_record([
                r.kind.to_string(),
                c.render(&r.antecedent, ";"),
                c.render(&r.consequent, ";"),
                r.support_abs.to_string(),
                r.confidence.to_string(),
                r.lift.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn metrics_from_counts(m: usize, s_union: usize, s_ant: usize, s_cons: usize) -> RuleMetrics {
    let mf = m as f64;
    let rel = |s: usize| s as f64 / mf;
    RuleMetrics {
        support_abs: s_union,
        confidence: s_union as f64 / s_ant as f64,
        lift: rel(s_union) / (rel(s_ant) * rel(s_cons)),
    }
}

/// Support, confidence and lift of `ant → cons`.
pub fn rule_metrics(c: &Context, ant: &Itemset, cons: &Itemset) -> Result<RuleMetrics> {
    if ant.is_empty() || cons.is_empty() {
        return Err(Error::Domain("rule sides must be non-empty".into()));
    }
    if !ant.is_disjoint(cons) {
        return Err(Error::Domain("antecedent and consequent overlap".into()));
    }
    let s_ant = c.support_set(ant)?.len();
    if s_ant == 0 {
        return Err(Error::UndefinedConfidence(c.render(ant, ",")));
    }
    let s_cons = c.support_set(cons)?.len();
    let s_union = c.support_set(&ant.union(cons))?.len();
    Ok(metrics_from_counts(c.m(), s_union, s_ant, s_cons))
}

/// `conf ≥ min_conf` with the threshold in percent, evaluated without
/// dividing.
fn confident(s_union: usize, s_ant: usize, min_conf_pct: f64) -> bool {
    s_union as f64 * 100.0 >= min_conf_pct * s_ant as f64
}

/// Splits `z` into every `X → z∖X` that reaches `min_conf_pct`.
fn confident_splits(
    c: &Context,
    z: &Itemset,
    s_z: usize,
    min_conf_pct: f64,
    kind: RuleKind,
    cache: &mut HashMap<Itemset, usize>,
) -> Vec<Rule> {
    let mut supp = |x: &Itemset| -> usize {
        if let Some(&s) = cache.get(x) {
            return s;
        }
        let s = c.support_abs_unchecked(x);
        cache.insert(x.clone(), s);
        s
    };
    let mut out = Vec::new();
    for (ant, cons) in z.splits() {
        let s_ant = supp(&ant);
        if s_ant == 0 || !confident(s_z, s_ant, min_conf_pct) {
            continue;
        }
        let s_cons = supp(&cons);
        let m = metrics_from_counts(c.m(), s_z, s_ant, s_cons);
        out.push(Rule {
            antecedent: ant,
            consequent: cons,
            support_abs: m.support_abs,
            confidence: m.confidence,
            lift: m.lift,
            kind,
        });
    }
    out
}

/// Valid rare rules: every confident split `X → Z∖X` of every rare itemset
/// `Z` reachable from the minimal rare border (`0 < supp_a(Z) < max_supp`,
/// `|Z| ≤ max_len`).
pub fn get_rare_rules(
    c: &Context,
    max_supp: Threshold,
    min_conf_pct: f64,
    max_len: usize,
) -> Result<RuleSet> {
    let max_abs = max_supp.to_absolute(c.m())?;
    let mris = miner::minimal_rare_itemsets(c, max_abs)?;
    let rare = miner::expand_rare(c, &mris, max_abs, max_len);
    let rules: Vec<Rule> = rare
        .par_iter()
        .filter(|z| z.itemset.len() >= 2)
        .map_init(HashMap::new, |cache, z| {
            confident_splits(
                c,
                &z.itemset,
                z.support_abs,
                min_conf_pct,
                RuleKind::Rare,
                cache,
            )
        })
        .flatten_iter()
        .collect();
    let params = MinerParams {
        thresholds: SupportThresholds {
            min_supp: None,
            max_supp: Some(max_supp),
            min_conf: Some(min_conf_pct),
        },
        max_len,
    };
    Ok(RuleSet::new(rules, params))
}

/// Valid frequent rules: every confident split `X → M∖X` of every maximal
/// frequent itemset `M` with `|M| ≤ max_len`.
pub fn get_freq_rules(
    c: &Context,
    min_supp: Threshold,
    min_conf_pct: f64,
    max_len: usize,
) -> Result<RuleSet> {
    let min_abs = min_supp.to_absolute(c.m())?;
    let mfis = miner::maximal_frequent_itemsets(c, min_abs)?;
    let rules: Vec<Rule> = mfis
        .par_iter()
        .filter(|m| m.itemset.len() >= 2 && m.itemset.len() <= max_len)
        .map_init(HashMap::new, |cache, m| {
            confident_splits(
                c,
                &m.itemset,
                m.support_abs,
                min_conf_pct,
                RuleKind::Frequent,
                cache,
            )
        })
        .flatten_iter()
        .collect();
    let params = MinerParams {
        thresholds: SupportThresholds {
            min_supp: Some(min_supp),
            max_supp: None,
            min_conf: Some(min_conf_pct),
        },
        max_len,
    };
    Ok(RuleSet::new(rules, params))
}
