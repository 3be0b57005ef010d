//! Comparison of the library against the exhaustive oracle on one context.

use std::collections::BTreeMap;

use armad_core::miner::{
    expand_rare, frequent_itemsets, frequent_itemsets_capped, maximal_frequent_itemsets,
    minimal_rare_itemsets,
};
use armad_core::rules::{get_freq_rules, get_rare_rules};
use armad_core::scorer::score_objects;
use armad_core::{Aggregation, Context, InterestMode, MinedItemset, RuleSet, Threshold};

use super::oracle::{mask_of, Brute, Mask, RuleTable, XorShift};

const CONFS: [u32; 4] = [1, 50, 80, 100];

fn as_table(sets: &[MinedItemset]) -> BTreeMap<Mask, usize> {
    sets.iter()
        .map(|s| (mask_of(&s.itemset), s.support_abs))
        .collect()
}

fn rules_table(rs: &RuleSet) -> RuleTable {
    rs.iter()
        .map(|r| {
            (
                (mask_of(&r.antecedent), mask_of(&r.consequent)),
                (r.support_abs, r.confidence, r.lift),
            )
        })
        .collect()
}

fn assert_rules_eq(got: &RuleTable, want: &RuleTable, what: &str) {
    assert_eq!(
        got.keys().collect::<Vec<_>>(),
        want.keys().collect::<Vec<_>>(),
        "{what}: rule keys"
    );
    for (k, (s, conf, lift)) in got {
        let (ws, wconf, wlift) = want[k];
        assert_eq!(*s, ws, "{what}: support of {k:?}");
        assert!((conf - wconf).abs() < 1e-12, "{what}: confidence of {k:?}");
        assert!(
            (lift - wlift).abs() <= 1e-9 * wlift,
            "{what}: lift of {k:?}"
        );
    }
}

fn assert_scores_eq(rs: &RuleSet, want: &BTreeMap<usize, f64>, c: &Context, what: &str) {
    let ranking = score_objects(c, rs, Aggregation::Sum, InterestMode::LiftNormalized).unwrap();
    let got: BTreeMap<usize, f64> = ranking
        .entries
        .iter()
        .map(|e| (e.tid as usize, e.score))
        .collect();
    assert_eq!(
        got.keys().collect::<Vec<_>>(),
        want.keys().collect::<Vec<_>>(),
        "{what}: flagged"
    );
    for (t, s) in &got {
        assert!(
            (s - want[t]).abs() <= 1e-9 * (1.0 + want[t].abs()),
            "{what}: score of t{t}"
        );
    }
}

pub fn check_context(b: &Brute, rng: &mut XorShift) {
    let c = b.to_context();
    let m = b.m();
    let thresholds = [1, 2, 1 + rng.below(m as u64 + 1) as usize, m];
    for &thr in &thresholds {
        let thr = thr.max(1);
        assert_eq!(
            as_table(&frequent_itemsets(&c, thr).unwrap()),
            b.frequent(thr),
            "F thr={thr}"
        );
        assert_eq!(
            as_table(&maximal_frequent_itemsets(&c, thr).unwrap()),
            b.maximal_frequent(thr),
            "MFI thr={thr}"
        );
        let mris = minimal_rare_itemsets(&c, thr).unwrap();
        assert_eq!(as_table(&mris), b.minimal_rare(thr), "MRI thr={thr}");
        for max_len in [2, 3, 4] {
            let capped = frequent_itemsets_capped(&c, thr, max_len, true).unwrap();
            assert_eq!(as_table(&capped), b.frequent_capped(thr, max_len));
            for s in &capped {
                let tids = s.support_set.as_ref().expect("kept tidsets");
                assert_eq!(tids, &c.support_set(&s.itemset).unwrap());
            }
            assert_eq!(
                as_table(&expand_rare(&c, &mris, thr, max_len)),
                b.expanded_rare(thr, max_len),
                "expand thr={thr} max_len={max_len}"
            );
            for conf in CONFS {
                let rare =
                    get_rare_rules(&c, Threshold::Absolute(thr), conf as f64, max_len).unwrap();
                let want = b.rare_rules(thr, conf, max_len);
                assert_rules_eq(&rules_table(&rare), &want, "rare");
                assert_scores_eq(&rare, &b.vr_scores(&want), &c, "vr");

                let freq =
                    get_freq_rules(&c, Threshold::Absolute(thr), conf as f64, max_len).unwrap();
                let want = b.freq_rules(thr, conf, max_len);
                assert_rules_eq(&rules_table(&freq), &want, "freq");
                assert_scores_eq(&freq, &b.vf_scores(&want), &c, "vf");
            }
        }
    }
}
