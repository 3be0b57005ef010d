//! Seeded synthetic transaction databases with planted attacks.
//!
//! Background objects each draw one planted pattern and keep every item of
//! it with probability `keep_prob`. Each injected object is a background-like
//! object plus a 3-item combination that no pattern contains, so the triple
//! never co-occurs in the background. Objects are shuffled before naming so
//! tid-name tie-breaking carries no label information.

use std::collections::HashSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::context::Context;
use crate::itemset::ItemId;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub background: usize,
    pub items: usize,
    pub patterns: usize,
    pub pattern_len: (usize, usize),
    pub keep_prob: f64,
    pub injected: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            background: 10_000,
            items: 50,
            patterns: 20,
            pattern_len: (4, 6),
            keep_prob: 0.9,
            injected: 10,
            seed: 0,
        }
    }
}

pub struct SyntheticData {
    pub context: Context,
    /// Tid names of the injected objects.
    pub attacks: Vec<String>,
}

pub fn generate(cfg: &SyntheticConfig) -> SyntheticData {
    assert!(cfg.items >= 3, "need at least three items");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = cfg.pattern_len;
    let hi = hi.min(cfg.items);
    let patterns: Vec<Vec<ItemId>> = (0..cfg.patterns)
        .map(|_| {
            let len = rng.gen_range(lo.min(hi)..=hi);
            let mut p: Vec<ItemId> = (0..cfg.items as ItemId).choose_multiple(&mut rng, len);
            p.sort_unstable();
            p
        })
        .collect();

    let draw_row = |rng: &mut ChaCha8Rng| -> Vec<ItemId> {
        let p = patterns.choose(rng).expect("at least one pattern");
        p.iter()
            .copied()
            .filter(|_| rng.gen_bool(cfg.keep_prob))
            .collect()
    };

    let mut rows: Vec<(Vec<ItemId>, bool)> = (0..cfg.background)
        .map(|_| (draw_row(&mut rng), false))
        .collect();

    let covered = |t: &[ItemId; 3]| patterns.iter().any(|p| t.iter().all(|i| p.contains(i)));
    let mut used: HashSet<[ItemId; 3]> = HashSet::new();
    while used.len() < cfg.injected {
        let mut t = [0; 3];
        for (slot, v) in t
            .iter_mut()
            .zip((0..cfg.items as ItemId).choose_multiple(&mut rng, 3))
        {
            *slot = v;
        }
        t.sort_unstable();
        if covered(&t) || used.contains(&t) {
            continue;
        }
        used.insert(t);
        let mut row = draw_row(&mut rng);
        row.extend_from_slice(&t);
        rows.push((row, true));
    }
    rows.shuffle(&mut rng);

    let width = rows.len().to_string().len();
    let mut b = Context::builder();
    for i in 0..cfg.items {
        b.item(&format!("i{i:02}"), None);
    }
    let mut attacks = Vec::new();
    for (k, (row, is_attack)) in rows.iter().enumerate() {
        let name = format!("p{k:0width$}");
        b.object(&name);
        for &i in row {
            b.pair(&name, &format!("i{i:02}"));
        }
        if *is_attack {
            attacks.push(name);
        }
    }
    SyntheticData {
        context: b.build(),
        attacks,
    }
}
