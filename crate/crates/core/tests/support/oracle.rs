//! Exhaustive reference implementations over bitmask contexts (n ≤ 16).
//! Nothing here calls the miners, rule generators or scorers under test.

use std::collections::BTreeMap;

use armad_core::{Context, Item, ItemId, Itemset};

#[derive(Clone, Debug)]
pub struct Brute {
    pub rows: Vec<u32>,
    pub n: usize,
}

pub type Mask = u32;

/// `(antecedent, consequent) -> (supp_abs, confidence, lift)`
pub type RuleTable = BTreeMap<(Mask, Mask), (usize, f64, f64)>;

impl Brute {
    pub fn new(rows: Vec<u32>, n: usize) -> Self {
        assert!(n <= 16);
        Self { rows, n }
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn to_context(&self) -> Context {
        let items = (0..self.n)
            .map(|i| Item {
                id: i as ItemId,
                name: format!("i{i}"),
                source_tag: None,
            })
            .collect();
        let tids = (0..self.m()).map(|t| format!("t{t:02}")).collect();
        let rows = self
            .rows
            .iter()
            .map(|&r| (0..self.n as u32).filter(|i| r & (1 << i) != 0).collect())
            .collect();
        Context::from_rows(tids, items, rows).unwrap()
    }

    pub fn supp(&self, x: Mask) -> usize {
        self.rows.iter().filter(|&&r| r & x == x).count()
    }

    fn all(&self) -> impl Iterator<Item = Mask> {
        1..(1u32 << self.n)
    }

    pub fn frequent(&self, min: usize) -> BTreeMap<Mask, usize> {
        self.all()
            .map(|x| (x, self.supp(x)))
            .filter(|&(_, s)| s >= min)
            .collect()
    }

    pub fn frequent_capped(&self, min: usize, max_len: usize) -> BTreeMap<Mask, usize> {
        self.frequent(min)
            .into_iter()
            .filter(|(x, _)| x.count_ones() as usize <= max_len)
            .collect()
    }

    pub fn maximal_frequent(&self, min: usize) -> BTreeMap<Mask, usize> {
        let f = self.frequent(min);
        f.iter()
            .filter(|(&x, _)| !f.keys().any(|&y| y != x && y & x == x))
            .map(|(&x, &s)| (x, s))
            .collect()
    }

    fn strict_nonempty_subsets(x: Mask) -> impl Iterator<Item = Mask> {
        let mut sub = x;
        std::iter::from_fn(move || {
            sub = sub.wrapping_sub(1) & x;
            (sub != 0).then_some(sub)
        })
    }

    pub fn minimal_rare(&self, thr: usize) -> BTreeMap<Mask, usize> {
        self.all()
            .map(|x| (x, self.supp(x)))
            .filter(|&(x, s)| {
                s < thr && Self::strict_nonempty_subsets(x).all(|y| self.supp(y) >= thr)
            })
            .collect()
    }

    pub fn expanded_rare(&self, thr: usize, max_len: usize) -> BTreeMap<Mask, usize> {
        let mris: Vec<Mask> = self.minimal_rare(thr).into_keys().collect();
        self.all()
            .map(|x| (x, self.supp(x)))
            .filter(|&(x, s)| {
                s > 0
                    && s < thr
                    && x.count_ones() as usize <= max_len
                    && mris.iter().any(|&m| m & !x == 0)
            })
            .collect()
    }

    fn lift(&self, z: Mask, x: Mask, y: Mask) -> f64 {
        let m = self.m() as f64;
        let r = |s: usize| s as f64 / m;
        r(self.supp(z)) / (r(self.supp(x)) * r(self.supp(y)))
    }

    fn splits_into(&self, z: Mask, sz: usize, min_conf_pct: u32, out: &mut RuleTable) {
        for x in Self::strict_nonempty_subsets(z) {
            let sx = self.supp(x);
            // conf ≥ min_conf in exact integer arithmetic.
            if sx > 0 && sz as u64 * 100 >= min_conf_pct as u64 * sx as u64 {
                let y = z & !x;
                out.insert((x, y), (sz, sz as f64 / sx as f64, self.lift(z, x, y)));
            }
        }
    }

    pub fn rare_rules(&self, thr: usize, min_conf_pct: u32, max_len: usize) -> RuleTable {
        let mut out = RuleTable::new();
        for (z, s) in self.expanded_rare(thr, max_len) {
            self.splits_into(z, s, min_conf_pct, &mut out);
        }
        out
    }

    pub fn freq_rules(&self, min: usize, min_conf_pct: u32, max_len: usize) -> RuleTable {
        let mut out = RuleTable::new();
        for (z, s) in self.maximal_frequent(min) {
            if z.count_ones() as usize <= max_len {
                self.splits_into(z, s, min_conf_pct, &mut out);
            }
        }
        out
    }

    fn weight(lift: f64, len: u32) -> f64 {
        let l = lift.clamp(2f64.powi(-30), 2f64.powi(30));
        l.log2().abs() * len as f64
    }

    /// Sum-aggregated VR-ARM scores of flagged objects, by tid.
    pub fn vr_scores(&self, rules: &RuleTable) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (t, &row) in self.rows.iter().enumerate() {
            for (&(x, y), &(_, _, lift)) in rules {
                if row & (x | y) == (x | y) {
                    *out.entry(t).or_insert(0.0) += Self::weight(lift, (x | y).count_ones());
                }
            }
        }
        out
    }

    /// Sum-aggregated VF-ARM scores of flagged objects, by tid.
    pub fn vf_scores(&self, rules: &RuleTable) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (t, &row) in self.rows.iter().enumerate() {
            for (&(x, y), &(_, _, lift)) in rules {
                if row & x == x && row & y != y {
                    *out.entry(t).or_insert(0.0) += Self::weight(lift, (x | y).count_ones());
                }
            }
        }
        out
    }
}

pub fn mask_of(x: &Itemset) -> Mask {
    x.iter().fold(0, |acc, i| acc | (1 << i))
}

pub fn itemset_of(x: Mask) -> Itemset {
    Itemset::new((0..32).filter(|i| x & (1 << i) != 0))
}

/// Deterministic xorshift so the oracle tests do not need an RNG crate.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, k: u64) -> u64 {
        self.next_u64() % k
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// A random context with `m ≤ 30`, `n ≤ 12` and cell density in 10–60 %.
pub fn random_brute(rng: &mut XorShift) -> Brute {
    let m = 1 + rng.below(30) as usize;
    let n = 1 + rng.below(12) as usize;
    let density = 0.1 + 0.5 * rng.unit();
    let rows = (0..m)
        .map(|_| {
            (0..n).fold(0u32, |acc, i| {
                if rng.unit() < density {
                    acc | (1 << i)
                } else {
                    acc
                }
            })
        })
        .collect();
    Brute::new(rows, n)
}
