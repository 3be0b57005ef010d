//! The transaction database ("context"): objects × items, with both the
//! horizontal (per-object itemset) and vertical (per-item tidset) views.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::{ItemId, Itemset, Tid, Tidset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub id: ItemId,
    pub name: String,
    pub source_tag: Option<String>,
}

/// Absolute and relative support of an itemset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Support {
    pub absolute: usize,
    pub relative: f64,
}

/// An immutable binary object × item relation.
#[derive(Clone, Debug, PartialEq)]
pub struct Context {
    items: Vec<Item>,
    tid_names: Vec<String>,
    objects: Vec<Itemset>,
    columns: Vec<Tidset>,
}

impl Context {
    pub fn builder() -> ContextBuilder {
        ContextBuilder::default()
    }

    /// Builds a context from its horizontal view. Rows may list items in any
    /// order and repeat them.
    pub fn from_rows(
        tid_names: Vec<String>,
        items: Vec<Item>,
        rows: Vec<Vec<ItemId>>,
    ) -> Result<Self> {
        if tid_names.len() != rows.len() {
            return Err(Error::Config(format!(
                "{} tid names for {} rows",
                tid_names.len(),
                rows.len()
            )));
        }
        for (i, item) in items.iter().enumerate() {
            if item.id as usize != i {
                return Err(Error::Config(format!(
                    "item ids must be contiguous; found {} at position {i}",
                    item.id
                )));
            }
        }
        check_unique(items.iter().map(|i| i.name.as_str()), "item name")?;
        check_unique(tid_names.iter().map(String::as_str), "tid name")?;
        let n = items.len();
        let objects: Vec<Itemset> = rows.into_iter().map(Itemset::new).collect();
        if let Some(bad) = objects
            .iter()
            .flat_map(|o| o.iter())
            .find(|&i| i as usize >= n)
        {
            return Err(Error::Domain(format!(
                "item id {bad} out of range (n = {n})"
            )));
        }
        let columns = vertical_view(&objects, n);
        Ok(Self {
            items,
            tid_names,
            objects,
            columns,
        })
    }

    /// Object count.
    pub fn m(&self) -> usize {
        self.objects.len()
    }

    /// Item count.
    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id as usize]
    }

    pub fn item_by_name(&self, name: &str) -> Option<ItemId> {
        self.items.iter().find(|i| i.name == name).map(|i| i.id)
    }

    pub fn tid_names(&self) -> &[String] {
        &self.tid_names
    }

    pub fn tid_name(&self, tid: Tid) -> &str {
        &self.tid_names[tid as usize]
    }

    pub fn tid_by_name(&self, name: &str) -> Option<Tid> {
        self.tid_names
            .iter()
            .position(|t| t == name)
            .map(|t| t as Tid)
    }

    pub fn objects(&self) -> &[Itemset] {
        &self.objects
    }

    pub fn object(&self, tid: Tid) -> &Itemset {
        &self.objects[tid as usize]
    }

    pub fn columns(&self) -> &[Tidset] {
        &self.columns
    }

    pub fn column(&self, id: ItemId) -> &Tidset {
        &self.columns[id as usize]
    }

    /// Parses item names into an itemset, e.g. `["a", "c"]`.
    pub fn itemset<S: AsRef<str>>(&self, names: &[S]) -> Result<Itemset> {
        names
            .iter()
            .map(|n| {
                self.item_by_name(n.as_ref())
                    .ok_or_else(|| Error::Domain(format!("unknown item {:?}", n.as_ref())))
            })
            .collect()
    }

    pub fn tidset<S: AsRef<str>>(&self, names: &[S]) -> Result<Tidset> {
        names
            .iter()
            .map(|n| {
                self.tid_by_name(n.as_ref())
                    .ok_or_else(|| Error::Domain(format!("unknown tid {:?}", n.as_ref())))
            })
            .collect()
    }

    /// Item names joined by `sep`.
    pub fn render(&self, x: &Itemset, sep: &str) -> String {
        x.iter()
            .map(|i| self.item(i).name.as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    fn check_items(&self, x: &Itemset) -> Result<()> {
        match x.iter().find(|&i| i as usize >= self.n()) {
            Some(bad) => Err(Error::Domain(format!(
                "item id {bad} out of range (n = {})",
                self.n()
            ))),
            None => Ok(()),
        }
    }

    /// τ(X): objects whose itemset contains `x`. τ(∅) is every object.
    pub fn support_set(&self, x: &Itemset) -> Result<Tidset> {
        self.check_items(x)?;
        Ok(self.support_set_unchecked(x))
    }

    pub(crate) fn support_set_unchecked(&self, x: &Itemset) -> Tidset {
        let mut cols: Vec<&Tidset> = x.iter().map(|i| self.column(i)).collect();
        cols.sort_by_key(|c| c.len());
        match cols.split_first() {
            None => Tidset::from_sorted((0..self.m() as Tid).collect()),
            Some((first, rest)) => {
                let mut acc = (*first).clone();
                for c in rest {
                    if acc.is_empty() {
                        break;
                    }
                    acc = acc.intersect(c);
                }
                acc
            }
        }
    }

    pub(crate) fn support_abs_unchecked(&self, x: &Itemset) -> usize {
        match x.len() {
            0 => self.m(),
            1 => self.column(x.as_slice()[0]).len(),
            _ => self.support_set_unchecked(x).len(),
        }
    }

    /// ι(Y): items shared by every object in `y`. ι(∅) is every item.
    pub fn image(&self, y: &Tidset) -> Result<Itemset> {
        if let Some(bad) = y.iter().find(|&t| t as usize >= self.m()) {
            return Err(Error::Domain(format!(
                "tid {bad} out of range (m = {})",
                self.m()
            )));
        }
        let mut acc = Itemset::from_sorted((0..self.n() as ItemId).collect());
        for t in y.iter() {
            acc = acc.intersect(self.object(t));
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn support(&self, x: &Itemset) -> Result<Support> {
        let absolute = self.support_set(x)?.len();
        let relative = if self.m() == 0 {
            0.0
        } else {
            absolute as f64 / self.m() as f64
        };
        Ok(Support { absolute, relative })
    }

    /// h(X) = ι(τ(X)).
    pub fn closure(&self, x: &Itemset) -> Result<Itemset> {
        self.image(&self.support_set(x)?)
    }

    /// No strict superset with identical support.
    pub fn is_closed(&self, x: &Itemset) -> Result<bool> {
        Ok(&self.closure(x)? == x)
    }

    /// No strict subset with identical support. By antitonicity it suffices to
    /// check the immediate subsets.
    pub fn is_generator(&self, x: &Itemset) -> Result<bool> {
        let s = self.support(x)?.absolute;
        for i in x.iter() {
            if self.support_abs_unchecked(&x.without(i)) == s {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recomputes the vertical view from the horizontal one.
    pub fn rebuild_vertical(&self) -> Self {
        Self {
            items: self.items.clone(),
            tid_names: self.tid_names.clone(),
            objects: self.objects.clone(),
            columns: vertical_view(&self.objects, self.n()),
        }
    }

    /// Iterates the relation as `(tid name, item name)` pairs in id order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.objects.iter().enumerate().flat_map(move |(t, row)| {
            row.iter().map(move |i| {
                (
                    self.tid_names[t].as_str(),
                    self.items[i as usize].name.as_str(),
                )
            })
        })
    }
}

fn vertical_view(objects: &[Itemset], n: usize) -> Vec<Tidset> {
    let mut cols: Vec<Vec<Tid>> = vec![Vec::new(); n];
    for (t, row) in objects.iter().enumerate() {
        for i in row.iter() {
            cols[i as usize].push(t as Tid);
        }
    }
    cols.into_iter().map(Tidset::from_sorted).collect()
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(Error::Config(format!("duplicate {what} {name:?}")));
        }
    }
    Ok(())
}

/// Incremental, name-keyed construction. Ids are assigned in first-appearance
/// order; duplicate pairs are ignored.
#[derive(Debug, Default)]
pub struct ContextBuilder {
    tid_ids: HashMap<String, Tid>,
    tid_names: Vec<String>,
    item_ids: HashMap<String, ItemId>,
    items: Vec<Item>,
    rows: Vec<Vec<ItemId>>,
}

impl ContextBuilder {
    pub fn object(&mut self, tid: &str) -> Tid {
        if let Some(&t) = self.tid_ids.get(tid) {
            return t;
        }
        let t = self.tid_names.len() as Tid;
        self.tid_ids.insert(tid.to_owned(), t);
        self.tid_names.push(tid.to_owned());
        self.rows.push(Vec::new());
        t
    }

    pub fn item(&mut self, name: &str, source_tag: Option<&str>) -> ItemId {
        if let Some(&i) = self.item_ids.get(name) {
            return i;
        }
        let id = self.items.len() as ItemId;
        self.item_ids.insert(name.to_owned(), id);
        self.items.push(Item {
            id,
            name: name.to_owned(),
            source_tag: source_tag.map(str::to_owned),
        });
        id
    }

    pub fn pair(&mut self, tid: &str, item: &str) -> &mut Self {
        let t = self.object(tid);
        let i = self.item(item, None);
        self.rows[t as usize].push(i);
        self
    }

    pub fn tagged_pair(&mut self, tid: &str, item: &str, tag: &str) -> &mut Self {
        let t = self.object(tid);
        let i = self.item(item, Some(tag));
        self.rows[t as usize].push(i);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.tid_names.is_empty() && self.items.is_empty()
    }

    pub fn build(self) -> Context {
        let objects: Vec<Itemset> = self.rows.into_iter().map(Itemset::new).collect();
        let columns = vertical_view(&objects, self.items.len());
        Context {
            items: self.items,
            tid_names: self.tid_names,
            objects,
            columns,
        }
    }
}

/// A support threshold given either as a percentage of the object count or
/// as an absolute count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Percent(f64),
    Absolute(usize),
}

impl Threshold {
    /// Absolute count for a context of `m` objects: `ceil(pct/100 · m)`,
    /// never below 1.
    pub fn to_absolute(self, m: usize) -> Result<usize> {
        match self {
            Threshold::Percent(p) => {
                if !(p > 0.0 && p <= 100.0) {
                    return Err(Error::Config(format!(
                        "support percentage {p} outside (0, 100]"
                    )));
                }
                // Guard against 0.05 * m / 100 landing a hair above an integer.
                let raw = p * m as f64 / 100.0;
                Ok(((raw - 1e-9).ceil() as usize).max(1))
            }
            Threshold::Absolute(0) => Err(Error::Config("absolute support must be ≥ 1".into())),
            Threshold::Absolute(a) => Ok(a),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SupportThresholds {
    pub min_supp: Option<Threshold>,
    pub max_supp: Option<Threshold>,
    /// Percent.
    pub min_conf: Option<f64>,
}

impl SupportThresholds {
    pub fn validate(&self) -> Result<()> {
        for t in [self.min_supp, self.max_supp].into_iter().flatten() {
            t.to_absolute(1)?;
        }
        if let Some(c) = self.min_conf {
            if !(c > 0.0 && c <= 100.0) {
                return Err(Error::Config(format!("min_conf {c} outside (0, 100]")));
            }
        }
        Ok(())
    }
}
