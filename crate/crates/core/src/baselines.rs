//! Comparison detectors over the same context model: FPOF (frequent pattern
//! outlier factor), AVF (attribute value frequency) and OD (outlier degree).

use crate::context::{Context, Threshold};
use crate::error::{Error, Result};
use crate::itemset::Tid;
use crate::miner;
use crate::rules;
use crate::scorer::{Detector, Polarity, Ranking, ScoredObject};

/// Default pattern-length cap for FPOF.
pub const FPOF_DEFAULT_MAX_LEN: usize = 5;

fn ranking_from_scores(
    c: &Context,
    detector: Detector,
    polarity: Polarity,
    scores: Vec<f64>,
) -> Ranking {
    let entries = scores
        .into_iter()
        .enumerate()
        .map(|(t, score)| ScoredObject {
            tid: t as Tid,
            name: c.tid_name(t as Tid).to_owned(),
            score,
            matches: Vec::new(),
        })
        .collect();
    Ranking::new(detector, polarity, entries)
}

/// FPOF(t) = Σ supp(X) / |F| over frequent X ⊆ t with |X| ≤ max_len.
/// Lower is more anomalous.
pub fn fpof(c: &Context, min_supp: Threshold, max_len: usize) -> Result<Ranking> {
    let min_abs = min_supp.to_absolute(c.m())?;
    let frequent = miner::frequent_itemsets_capped(c, min_abs, max_len, true)?;
    let mut sums = vec![0.0; c.m()];
    let m = c.m() as f64;
    for f in &frequent {
        let rel = f.support_abs as f64 / m;
        for t in f.support_set.as_ref().expect("tidsets kept").iter() {
            sums[t as usize] += rel;
        }
    }
    if frequent.is_empty() {
        let mut r = ranking_from_scores(c, Detector::Fpof, Polarity::LowIsAnomalous, sums);
        r.notes
            .push("no frequent patterns at this threshold; all FPOF scores are 0".into());
        return Ok(r);
    }
    let k = frequent.len() as f64;
    let scores = sums.into_iter().map(|s| s / k).collect();
    Ok(ranking_from_scores(
        c,
        Detector::Fpof,
        Polarity::LowIsAnomalous,
        scores,
    ))
}

/// AVF over the binarized matrix: the mean, across all items, of the
/// frequency of the object's value (present/absent) for that item.
/// Lower is more anomalous.
pub fn avf(c: &Context) -> Result<Ranking> {
    if c.n() == 0 {
        return Err(Error::Domain("AVF needs at least one item".into()));
    }
    let m = c.m() as f64;
    let n = c.n() as f64;
    let present: Vec<f64> = c.columns().iter().map(|col| col.len() as f64 / m).collect();
    let all_absent: f64 = present.iter().map(|p| 1.0 - p).sum();
    let scores = c
        .objects()
        .iter()
        .map(|row| {
            let shift: f64 = row.iter().map(|i| 2.0 * present[i as usize] - 1.0).sum();
            (all_absent + shift) / n
        })
        .collect();
    Ok(ranking_from_scores(
        c,
        Detector::Avf,
        Polarity::LowIsAnomalous,
        scores,
    ))
}

/// OD(t) = Σ conf(r) over valid frequent rules violated by t, divided by
/// max(1, number of rules whose antecedent t contains). Higher is more
/// anomalous.
pub fn od(c: &Context, min_supp: Threshold, min_conf_pct: f64, max_len: usize) -> Result<Ranking> {
    let rules = rules::get_freq_rules(c, min_supp, min_conf_pct, max_len)?;
    let mut violated = vec![0.0; c.m()];
    let mut applicable = vec![0usize; c.m()];
    for r in rules.iter() {
        let ant = c.support_set(&r.antecedent)?;
        let sat = c.support_set(&r.union())?;
        for t in ant.iter() {
            applicable[t as usize] += 1;
        }
        for t in ant.difference(&sat).iter() {
            violated[t as usize] += r.confidence;
        }
    }
    let scores = violated
        .into_iter()
        .zip(applicable)
        .map(|(v, a)| v / a.max(1) as f64)
        .collect();
    let mut ranking = ranking_from_scores(c, Detector::Od, Polarity::HighIsAnomalous, scores);
    if rules.is_empty() {
        ranking
            .notes
            .push("no valid frequent rules; all OD scores are 0".into());
    }
    Ok(ranking)
}
