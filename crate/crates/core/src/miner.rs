//! Itemset mining on the vertical view: frequent itemsets (depth-first tidset
//! intersection), maximal frequent itemsets, minimal rare itemsets
//! (levelwise), and the bounded upward expansion of the rare border.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{Context, SupportThresholds};
use crate::error::{Error, Result};
use crate::itemset::{ItemId, Itemset, Tidset};

/// Per-candidate output of one levelwise step: rare itemsets found, and
/// frequent ones carried to the next level.
type LevelStep = (Vec<MinedItemset>, Vec<(Itemset, Tidset)>);

/// Default cardinality cap for rare expansion and rule bodies.
pub const DEFAULT_MAX_LEN: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinedItemset {
    pub itemset: Itemset,
    pub support_abs: usize,
    pub support_set: Option<Tidset>,
}

impl MinedItemset {
    fn bare(itemset: Itemset, support_abs: usize) -> Self {
        Self {
            itemset,
            support_abs,
            support_set: None,
        }
    }

    fn with_tids(itemset: Itemset, tids: Tidset) -> Self {
        Self {
            itemset,
            support_abs: tids.len(),
            support_set: Some(tids),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinerParams {
    pub thresholds: SupportThresholds,
    pub max_len: usize,
}

impl MinerParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_len < 2 {
            return Err(Error::Config(format!("max_len {} < 2", self.max_len)));
        }
        self.thresholds.validate()
    }
}

fn check_min(threshold: usize) -> Result<()> {
    if threshold == 0 {
        return Err(Error::Config("support threshold must be ≥ 1".into()));
    }
    Ok(())
}

/// All non-empty itemsets with `supp_a ≥ min_supp_abs`.
pub fn frequent_itemsets(c: &Context, min_supp_abs: usize) -> Result<Vec<MinedItemset>> {
    frequent_itemsets_capped(c, min_supp_abs, usize::MAX, false)
}

/// Frequent itemsets of cardinality at most `max_len`, optionally keeping
/// their support sets.
pub fn frequent_itemsets_capped(
    c: &Context,
    min_supp_abs: usize,
    max_len: usize,
    keep_tidsets: bool,
) -> Result<Vec<MinedItemset>> {
    check_min(min_supp_abs)?;
    if max_len == 0 {
        return Ok(Vec::new());
    }
    let roots: Vec<(ItemId, Tidset)> = c
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, col)| col.len() >= min_supp_abs)
        .map(|(i, col)| (i as ItemId, col.clone()))
        .collect();
    let search = Eclat {
        min: min_supp_abs,
        max_len,
        keep_tidsets,
    };
    let mut out: Vec<MinedItemset> = (0..roots.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            let mut prefix = Vec::new();
            search.branch(&mut prefix, &roots[i..], &mut found);
            found
        })
        .collect();
    out.sort_by(|a, b| a.itemset.cmp(&b.itemset));
    Ok(out)
}

struct Eclat {
    min: usize,
    max_len: usize,
    keep_tidsets: bool,
}

impl Eclat {
    /// Visits `cands[0]` and everything that extends it with later candidates.
    fn branch(
        &self,
        prefix: &mut Vec<ItemId>,
        cands: &[(ItemId, Tidset)],
        out: &mut Vec<MinedItemset>,
    ) {
        let (item, tids) = &cands[0];
        prefix.push(*item);
        let itemset = Itemset::from_sorted(prefix.clone());
        out.push(if self.keep_tidsets {
            MinedItemset::with_tids(itemset, tids.clone())
        } else {
            MinedItemset::bare(itemset, tids.len())
        });
        if prefix.len() < self.max_len {
            let next: Vec<(ItemId, Tidset)> = cands[1..]
                .iter()
                .filter_map(|(j, t)| {
                    let x = tids.intersect(t);
                    (x.len() >= self.min).then_some((*j, x))
                })
                .collect();
            for k in 0..next.len() {
                self.branch(prefix, &next[k..], out);
            }
        }
        prefix.pop();
    }
}

/// Frequent itemsets with no frequent strict superset.
pub fn maximal_frequent_itemsets(c: &Context, min_supp_abs: usize) -> Result<Vec<MinedItemset>> {
    let frequent = frequent_itemsets(c, min_supp_abs)?;
    let index: HashSet<&Itemset> = frequent.iter().map(|f| &f.itemset).collect();
    let singles: Vec<ItemId> = frequent
        .iter()
        .filter(|f| f.itemset.len() == 1)
        .map(|f| f.itemset.as_slice()[0])
        .collect();
    // Anti-monotonicity: X has a frequent superset iff some X ∪ {i} is frequent.
    let maximal = frequent
        .par_iter()
        .filter(|f| {
            !singles
                .iter()
                .any(|&i| !f.itemset.contains(i) && index.contains(&f.itemset.with(i)))
        })
        .cloned()
        .collect();
    Ok(maximal)
}

/// Minimal rare itemsets: `supp_a < max_supp_abs` while every strict
/// non-empty subset has `supp_a ≥ max_supp_abs`. Zero-support itemsets are
/// included. Support sets are cached on the results.
pub fn minimal_rare_itemsets(c: &Context, max_supp_abs: usize) -> Result<Vec<MinedItemset>> {
    check_min(max_supp_abs)?;
    let mut rare = Vec::new();
    let mut level: Vec<(Itemset, Tidset)> = Vec::new();
    for (i, col) in c.columns().iter().enumerate() {
        let x = Itemset::from_sorted(vec![i as ItemId]);
        if col.len() < max_supp_abs {
            rare.push(MinedItemset::with_tids(x, col.clone()));
        } else {
            level.push((x, col.clone()));
        }
    }
    while level.len() > 1 {
        let known: HashSet<&Itemset> = level.iter().map(|(x, _)| x).collect();
        let k = level[0].0.len();
        let results: Vec<LevelStep> = (0..level.len())
            .into_par_iter()
            .map(|i| {
                let (xi, ti) = &level[i];
                let head = &xi.as_slice()[..k - 1];
                let mut found = Vec::new();
                let mut next = Vec::new();
                for (xj, tj) in level[i + 1..].iter() {
                    if &xj.as_slice()[..k - 1] != head {
                        break;
                    }
                    let cand = xi.with(xj.as_slice()[k - 1]);
                    // Both parents are frequent; check the remaining k-subsets.
                    let all_frequent = (0..k - 1).all(|drop| {
                        let sub = cand.without(cand.as_slice()[drop]);
                        known.contains(&sub)
                    });
                    if !all_frequent {
                        continue;
                    }
                    let tids = ti.intersect(tj);
                    if tids.len() < max_supp_abs {
                        found.push(MinedItemset::with_tids(cand, tids));
                    } else {
                        next.push((cand, tids));
                    }
                }
                (found, next)
            })
            .collect();
        let mut next_level = Vec::new();
        for (found, next) in results {
            rare.extend(found);
            next_level.extend(next);
        }
        level = next_level;
    }
    rare.sort_by(|a, b| a.itemset.cmp(&b.itemset));
    Ok(rare)
}

/// Every itemset `X ⊇ M` for some given minimal rare `M`, with
/// `0 < supp_a(X) < max_supp_abs` and `|X| ≤ max_len`. Support sets are
/// cached on the results.
pub fn expand_rare(
    c: &Context,
    mris: &[MinedItemset],
    max_supp_abs: usize,
    max_len: usize,
) -> Vec<MinedItemset> {
    let mut all: Vec<(Itemset, Tidset)> = mris
        .par_iter()
        .filter(|m| m.itemset.len() <= max_len)
        .flat_map_iter(|m| {
            let tids = match &m.support_set {
                Some(t) => t.clone(),
                None => c.support_set_unchecked(&m.itemset),
            };
            let mut out = Vec::new();
            if !tids.is_empty() && tids.len() < max_supp_abs {
                grow(c, m.itemset.clone(), tids, None, max_len, &mut out);
            }
            out
        })
        .collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    all.dedup_by(|a, b| a.0 == b.0);
    all.into_iter()
        .map(|(x, t)| MinedItemset::with_tids(x, t))
        .collect()
}

/// Depth-first upward closure. Items are added in ascending order so each
/// superset of the seed is produced once per seed; only items that co-occur
/// with the current support set are candidates.
fn grow(
    c: &Context,
    base: Itemset,
    tids: Tidset,
    last_added: Option<ItemId>,
    max_len: usize,
    out: &mut Vec<(Itemset, Tidset)>,
) {
    if base.len() < max_len {
        let floor = last_added.map_or(0, |i| i + 1);
        let cands: BTreeSet<ItemId> = tids
            .iter()
            .flat_map(|t| c.object(t).iter())
            .filter(|&i| i >= floor && !base.contains(i))
            .collect();
        for i in cands {
            let next: Vec<_> = tids.iter().filter(|&t| c.object(t).contains(i)).collect();
            grow(
                c,
                base.with(i),
                Tidset::from_sorted(next),
                Some(i),
                max_len,
                out,
            );
        }
    }
    out.push((base, tids));
}

/// Debug dump: one itemset per line, `supp_abs<TAB>item1;item2;...`.
pub fn write_itemsets<W: Write>(c: &Context, sets: &[MinedItemset], mut w: W) -> Result<()> {
    for s in sets {
        writeln!(w, "{}\t{}", s.support_abs, c.render(&s.itemset, ";"))?;
    }
    Ok(())
}
