//! Sorted id sets: itemsets (sets of attribute ids) and tidsets (sets of
//! object ids). Both are kept as strictly ascending `u32` vectors so that
//! equality, hashing and ordering are structural.

use std::fmt;

use serde::{Deserialize, Serialize};

pub type ItemId = u32;
pub type Tid = u32;

/// Intersection of two strictly ascending slices.
///
/// Switches to a galloping search when one side is much shorter, which is the
/// common case when a rare tidset meets a dense column.
pub fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(small.len());
    if large.len() / small.len() >= 32 {
        let mut rest = large;
        for &x in small {
            match rest.binary_search(&x) {
                Ok(pos) => {
                    out.push(x);
                    rest = &rest[pos + 1..];
                }
                Err(pos) => rest = &rest[pos..],
            }
            if rest.is_empty() {
                break;
            }
        }
        return out;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(small[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// `a ⊆ b` for strictly ascending slices.
pub fn is_subset_sorted(a: &[u32], b: &[u32]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

fn union_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn difference_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            out.push(x);
        }
    }
    out
}

macro_rules! sorted_id_set {
    ($name:ident, $elem:ty) => {
        #[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<$elem>);

        impl $name {
            pub fn empty() -> Self {
                Self(Vec::new())
            }

            /// Builds a set from ids in any order; duplicates are dropped.
            pub fn new<I: IntoIterator<Item = $elem>>(ids: I) -> Self {
                let mut v: Vec<$elem> = ids.into_iter().collect();
                v.sort_unstable();
                v.dedup();
                Self(v)
            }

            /// Caller guarantees `ids` is strictly ascending.
            pub(crate) fn from_sorted(ids: Vec<$elem>) -> Self {
                debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
                Self(ids)
            }

            pub fn as_slice(&self) -> &[$elem] {
                &self.0
            }

            pub fn into_vec(self) -> Vec<$elem> {
                self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn contains(&self, id: $elem) -> bool {
                self.0.binary_search(&id).is_ok()
            }

            pub fn iter(&self) -> impl Iterator<Item = $elem> + '_ {
                self.0.iter().copied()
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                is_subset_sorted(&self.0, &other.0)
            }

            pub fn intersect(&self, other: &Self) -> Self {
                Self(intersect_sorted(&self.0, &other.0))
            }

            pub fn union(&self, other: &Self) -> Self {
                Self(union_sorted(&self.0, &other.0))
            }

            pub fn difference(&self, other: &Self) -> Self {
                Self(difference_sorted(&self.0, &other.0))
            }

            pub fn is_disjoint(&self, other: &Self) -> bool {
                intersect_sorted(&self.0, &other.0).is_empty()
            }

            pub fn with(&self, id: $elem) -> Self {
                match self.0.binary_search(&id) {
                    Ok(_) => self.clone(),
                    Err(pos) => {
                        let mut v = self.0.clone();
                        v.insert(pos, id);
                        Self(v)
                    }
                }
            }

            pub fn without(&self, id: $elem) -> Self {
                Self(self.0.iter().copied().filter(|&x| x != id).collect())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.0.iter()).finish()
            }
        }

        impl FromIterator<$elem> for $name {
            fn from_iter<I: IntoIterator<Item = $elem>>(iter: I) -> Self {
                Self::new(iter)
            }
        }

        impl<'a> IntoIterator for &'a $name {
            type Item = &'a $elem;
            type IntoIter = std::slice::Iter<'a, $elem>;

            fn into_iter(self) -> Self::IntoIter {
                self.0.iter()
            }
        }
    };
}

sorted_id_set!(Itemset, ItemId);
sorted_id_set!(Tidset, Tid);

impl Itemset {
    /// Every non-empty strict subset, as `(subset, complement)` pairs.
    pub fn splits(&self) -> Vec<(Itemset, Itemset)> {
        let k = self.len();
        if !(2..=31).contains(&k) {
            return Vec::new();
        }
        let full = (1u32 << k) - 1;
        (1..full)
            .map(|mask| {
                let mut ant = Vec::new();
                let mut cons = Vec::new();
                for (bit, &id) in self.0.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        ant.push(id);
                    } else {
                        cons.push(id);
                    }
                }
                (Itemset(ant), Itemset(cons))
            })
            .collect()
    }
}
