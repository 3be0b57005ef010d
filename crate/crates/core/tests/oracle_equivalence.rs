//! Miners, rule generators and scorers against exhaustive enumeration on
//! small random contexts.

mod support;

use armad_core::miner::minimal_rare_itemsets;
use support::equivalence::check_context;
use support::oracle::{itemset_of, mask_of, random_brute, Brute, XorShift};

const CONTEXTS: u64 = 250;

#[test]
fn random_contexts_match_exhaustive_enumeration() {
    let mut rng = XorShift(0x9e37_79b9_7f4a_7c15);
    for _ in 0..CONTEXTS {
        let b = random_brute(&mut rng);
        check_context(&b, &mut rng);
    }
}

#[test]
fn empty_rows_and_unused_items() {
    // Items 2 and 3 occur nowhere; two objects are empty.
    let b = Brute::new(vec![0b0011, 0, 0b0001, 0, 0b0010], 4);
    let mut rng = XorShift(1);
    check_context(&b, &mut rng);
    let c = b.to_context();
    let mris: Vec<_> = minimal_rare_itemsets(&c, 1)
        .unwrap()
        .into_iter()
        .map(|s| (mask_of(&s.itemset), s.support_abs))
        .collect();
    assert!(mris.contains(&(0b0100, 0)));
    assert!(mris.contains(&(0b1000, 0)));
}

#[test]
fn mask_round_trip() {
    for x in [0u32, 1, 0b1011, 0xfff] {
        assert_eq!(mask_of(&itemset_of(x)), x);
    }
}
