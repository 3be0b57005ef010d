//! Ranking quality against ground-truth labels: nDCG with binary relevance
//! and the rank-statistic ROC AUC.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scorer::Ranking;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    pub attack_tids: BTreeSet<String>,
    pub total_objects: usize,
}

impl LabelSet {
    pub fn new<I, S>(attack_tids: I, total_objects: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            attack_tids: attack_tids.into_iter().map(Into::into).collect(),
            total_objects,
        }
    }

    pub fn is_attack(&self, tid: &str) -> bool {
        self.attack_tids.contains(tid)
    }

    fn require_non_empty(&self) -> Result<()> {
        if self.attack_tids.is_empty() {
            return Err(Error::UndefinedMetric("no labeled attacks".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ndcg: f64,
    pub auc: f64,
    pub n: usize,
    /// 1-based ranks of the labeled attacks, ascending.
    pub attack_positions: Vec<usize>,
}

/// DCG of a 0/1 relevance sequence: Σ rel_i / log2(i + 1), i from 1.
pub fn dcg(relevance: impl IntoIterator<Item = bool>) -> f64 {
    relevance
        .into_iter()
        .enumerate()
        .filter(|(_, rel)| *rel)
        .map(|(i, _)| 1.0 / ((i + 2) as f64).log2())
        .sum()
}

/// DCG of `p` relevant entries at the top.
pub fn ideal_dcg(p: usize) -> f64 {
    dcg(std::iter::repeat_n(true, p))
}

/// nDCG of a relevance sequence normalised by `p` relevant entries at the
/// top.
pub fn ndcg_of(relevance: &[bool], p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::UndefinedMetric(
            "nDCG needs at least one relevant entry".into(),
        ));
    }
    Ok(dcg(relevance.iter().copied()) / ideal_dcg(p))
}

/// nDCG over the full ranking. The ideal list holds every labeled attack,
/// so attacks missing from the ranking lower the score.
pub fn ndcg(ranking: &Ranking, labels: &LabelSet) -> Result<f64> {
    labels.require_non_empty()?;
    let rel: Vec<bool> = ranking
        .entries
        .iter()
        .map(|e| labels.is_attack(&e.name))
        .collect();
    ndcg_of(&rel, labels.attack_tids.len())
}

/// Mann-Whitney AUC with midranks for ties: the probability that a random
/// attack is ranked as more anomalous than a random normal object.
pub fn auc_of(scored: &[(f64, bool)]) -> Result<f64> {
    let positives = scored.iter().filter(|(_, p)| *p).count();
    let negatives = scored.len() - positives;
    if positives == 0 {
        return Err(Error::UndefinedMetric(
            "AUC needs at least one attack".into(),
        ));
    }
    if negatives == 0 {
        return Err(Error::UndefinedMetric(
            "AUC needs at least one normal object".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scored[order[j + 1]].0 == scored[order[i]].0 {
            j += 1;
        }
        // Ranks i+1..=j+1 share their mean.
        let midrank = (i + j + 2) as f64 / 2.0;
        let tied_pos = order[i..=j].iter().filter(|&&k| scored[k].1).count();
        rank_sum += midrank * tied_pos as f64;
        i = j + 1;
    }
    let p = positives as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

/// AUC over the ranked objects, using scores oriented by the ranking's
/// polarity.
pub fn auc(ranking: &Ranking, labels: &LabelSet) -> Result<f64> {
    labels.require_non_empty()?;
    let scored: Vec<(f64, bool)> = ranking
        .entries
        .iter()
        .map(|e| (ranking.anomaly_score(e), labels.is_attack(&e.name)))
        .collect();
    auc_of(&scored)
}

pub fn evaluate(ranking: &Ranking, labels: &LabelSet) -> Result<EvalReport> {
    let attack_positions = ranking
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| labels.is_attack(&e.name))
        .map(|(i, _)| i + 1)
        .collect();
    Ok(EvalReport {
        ndcg: ndcg(ranking, labels)?,
        auc: auc(ranking, labels)?,
        n: ranking.len(),
        attack_positions,
    })
}
