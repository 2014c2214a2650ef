//! Instances, configurations, integral and fractional solutions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, FLOAT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    #[serde(rename = "w")]
    pub weight: f64,
    #[serde(rename = "v")]
    pub value: f64,
}

impl Item {
    pub fn new(id: u32, weight: f64, value: f64) -> Self {
        Item {
            id: ItemId(id),
            weight,
            value,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    k: usize,
    items: Vec<Item>,
}

/// A CMK instance: items with weights in `[0,1]` and nonnegative values,
/// `m` unit-capacity bins and at most `k` items per bin.
#[derive(Debug, Clone)]
pub struct Instance {
    items: Vec<Item>,
    m: usize,
    k: usize,
    index: HashMap<ItemId, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items && self.m == other.m && self.k == other.k
    }
}

impl Instance {
    pub fn new(items: Vec<Item>, m: usize, k: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("bin count m must be at least 1"));
        }
        if k == 0 {
            return Err(Error::input("cardinality bound k must be at least 1"));
        }
        let mut index = HashMap::with_capacity(items.len());
        for (pos, item) in items.iter().enumerate() {
            if !(item.weight >= 0.0 && item.weight <= 1.0) {
                return Err(Error::input(format!(
                    "item {} has weight {} outside [0,1]",
                    item.id, item.weight
                )));
            }
            if !(item.value >= 0.0) || !item.value.is_finite() {
                return Err(Error::input(format!(
                    "item {} has invalid value {}",
                    item.id, item.value
                )));
            }
            if index.insert(item.id, pos).is_some() {
                return Err(Error::input(format!("duplicate item id {}", item.id)));
            }
        }
        Ok(Instance { items, m, k, index })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::input(format!("instance JSON: {e}")))?;
        Instance::new(file.items, file.m, file.k)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile {
            m: self.m,
            k: self.k,
            items: self.items.clone(),
        })
        .expect("instance serializes")
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.items.iter().map(|it| it.id)
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn item(&self, id: ItemId) -> Result<&Item> {
        self.index
            .get(&id)
            .map(|&pos| &self.items[pos])
            .ok_or(Error::UnknownItem(id))
    }

    /// Position of `id` in [`Instance::items`].
    pub fn position(&self, id: ItemId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn weight(&self, id: ItemId) -> Result<f64> {
        self.item(id).map(|it| it.weight)
    }

    pub fn value(&self, id: ItemId) -> Result<f64> {
        self.item(id).map(|it| it.value)
    }

    /// Same items and `k`, different bin count.
    pub fn with_bins(&self, m: usize) -> Result<Self> {
        Instance::new(self.items.clone(), m, self.k)
    }

    pub fn total_value(&self) -> f64 {
        self.items.iter().map(|it| it.value).sum()
    }

    pub fn weight_of(&self, c: &Configuration) -> Result<f64> {
        c.iter().map(|&id| self.weight(id)).sum()
    }

    pub fn value_of(&self, c: &Configuration) -> Result<f64> {
        c.iter().map(|&id| self.value(id)).sum()
    }

    /// `|c| <= k` and `w(c) <= 1 + 1e-9`.
    pub fn validate_configuration(&self, c: &Configuration) -> Result<bool> {
        let w = self.weight_of(c)?;
        Ok(c.len() <= self.k && w <= 1.0 + FLOAT_TOL)
    }

    /// Checks the bin count and every bin; the error names the offending bin.
    pub fn validate_solution(&self, s: &Solution) -> Result<()> {
        if s.bins.len() != self.m {
            return Err(Error::input(format!(
                "solution has {} bins, instance has m = {}",
                s.bins.len(),
                self.m
            )));
        }
        for (b, bin) in s.bins.iter().enumerate() {
            if !self.validate_configuration(bin)? {
                return Err(Error::input(format!(
                    "bin {b} is not a configuration (|C| = {}, w(C) = {})",
                    bin.len(),
                    self.weight_of(bin)?
                )));
            }
        }
        Ok(())
    }

    /// Value of the union of the bins; every item counts once.
    pub fn solution_value(&self, s: &Solution) -> Result<f64> {
        for bin in &s.bins {
            if !self.validate_configuration(bin)? {
                return Err(Error::input("solution contains an invalid bin"));
            }
        }
        self.union_value(s.bins.iter())
    }

    pub fn union_value<'a>(&self, bins: impl Iterator<Item = &'a Configuration>) -> Result<f64> {
        let mut seen = BTreeSet::new();
        for bin in bins {
            seen.extend(bin.iter().copied());
        }
        seen.into_iter().map(|id| self.value(id)).sum()
    }
}

/// A set of item ids, stored sorted so equal sets compare and hash equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(Vec<ItemId>);

impl Configuration {
    pub fn new(mut ids: Vec<ItemId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Configuration(ids)
    }

    pub fn empty() -> Self {
        Configuration(Vec::new())
    }

    pub fn singleton(id: ItemId) -> Self {
        Configuration(vec![id])
    }

    pub fn ids(&self) -> &[ItemId] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ItemId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn with(&self, id: ItemId) -> Self {
        let mut ids = self.0.clone();
        ids.push(id);
        Configuration::new(ids)
    }

    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.0.iter().all(|id| other.contains(*id))
    }
}

impl FromIterator<ItemId> for Configuration {
    fn from_iter<I: IntoIterator<Item = ItemId>>(iter: I) -> Self {
        Configuration::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Configuration {
    type Item = &'a ItemId;
    type IntoIter = std::slice::Iter<'a, ItemId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An integral solution: one configuration per bin. Bins may share items;
/// the value counts each item once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub bins: Vec<Configuration>,
}

impl Solution {
    pub fn empty(m: usize) -> Self {
        Solution {
            bins: vec![Configuration::empty(); m],
        }
    }

    pub fn new(bins: Vec<Configuration>) -> Self {
        Solution { bins }
    }

    pub fn packed_items(&self) -> BTreeSet<ItemId> {
        self.bins.iter().flat_map(|b| b.iter().copied()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("solution JSON: {e}")))
    }
}

/// Per-item coverage `cover(x)`; missing entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverVector<T = f64> {
    pub entries: BTreeMap<ItemId, T>,
}

impl<T: Scalar> Default for CoverVector<T> {
    fn default() -> Self {
        CoverVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> CoverVector<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (ItemId, T)>) -> Self {
        let mut cv = Self::new();
        for (id, val) in entries {
            cv.set(id, val);
        }
        cv
    }

    pub fn get(&self, id: ItemId) -> T {
        self.entries.get(&id).cloned().unwrap_or_else(T::zero)
    }

    /// Zero entries are dropped so that equality means equality of vectors.
    pub fn set(&mut self, id: ItemId, val: T) {
        if val.is_zero_tol() && T::eps().is_zero_tol() && val == T::zero() {
            self.entries.remove(&id);
        } else {
            self.entries.insert(id, val);
        }
    }

    pub fn add(&mut self, id: ItemId, val: T) {
        let cur = self.get(id);
        self.set(id, cur + val);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemId, &T)> {
        self.entries.iter()
    }

    /// `supp(y)`.
    pub fn support(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_zero_tol())
            .map(|(id, _)| *id)
    }

    /// `||y||`, the sum of entries.
    pub fn norm(&self) -> T {
        self.entries
            .values()
            .fold(T::zero(), |acc, v| acc + v.abs_val())
    }

    pub fn in_unit_box(&self) -> bool {
        self.entries
            .values()
            .all(|v| !v.is_neg() && !(v.clone() - T::one()).is_pos())
    }

    /// Entry-wise restriction `y ∧ 1_Z`.
    pub fn restrict(&self, keep: impl Fn(ItemId) -> bool) -> Self {
        CoverVector {
            entries: self
                .entries
                .iter()
                .filter(|(id, _)| keep(**id))
                .map(|(id, v)| (*id, v.clone()))
                .collect(),
        }
    }

    pub fn dot(&self, other: &CoverVector<T>) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, (id, v)| acc + v.clone() * other.get(*id))
    }

    /// Entry-wise equality within the scalar tolerance (exact for rationals).
    pub fn approx_eq(&self, other: &CoverVector<T>) -> bool {
        let keys: BTreeSet<ItemId> = self
            .entries
            .keys()
            .chain(other.entries.keys())
            .copied()
            .collect();
        keys.into_iter()
            .all(|id| (self.get(id) - other.get(id)).is_zero_tol())
    }
}

impl CoverVector<f64> {
    /// `v(y) = Σ y_i v(i)`.
    pub fn value(&self, inst: &Instance) -> Result<f64> {
        self.entries
            .iter()
            .map(|(id, y)| inst.value(*id).map(|v| v * y))
            .sum()
    }
}

/// Sparse nonnegative weighting over configurations. Equal configurations
/// share one key; the empty configuration is a legal key and its weight may
/// exceed 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution<T = f64> {
    pub weights: BTreeMap<Configuration, T>,
}

/// Serialized as a list of `{"items": [...], "x": weight}` entries.
impl<T: Serialize> Serialize for FractionalSolution<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a, T> {
            items: &'a Configuration,
            x: &'a T,
        }
        s.collect_seq(self.weights.iter().map(|(items, x)| Entry { items, x }))
    }
}

impl<T: Scalar> Default for FractionalSolution<T> {
    fn default() -> Self {
        FractionalSolution {
            weights: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> FractionalSolution<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `weight` to `x_C`, merging equal configurations.
    pub fn add(&mut self, c: Configuration, weight: T) {
        assert!(!weight.is_neg(), "configuration weights must be nonnegative");
        if weight == T::zero() {
            return;
        }
        match self.weights.get_mut(&c) {
            Some(w) => *w = w.clone() + weight,
            None => {
                self.weights.insert(c, weight);
            }
        }
    }

    pub fn merge(&mut self, other: &FractionalSolution<T>) {
        for (c, w) in &other.weights {
            self.add(c.clone(), w.clone());
        }
    }

    pub fn get(&self, c: &Configuration) -> T {
        self.weights.get(c).cloned().unwrap_or_else(T::zero)
    }

    /// `||x||`.
    pub fn size(&self) -> T {
        self.weights
            .values()
            .fold(T::zero(), |acc, w| acc + w.clone())
    }

    pub fn cover(&self) -> CoverVector<T> {
        let mut cv = CoverVector::new();
        for (c, w) in &self.weights {
            for &id in c {
                cv.add(id, w.clone());
            }
        }
        cv
    }

    pub fn is_feasible(&self) -> bool {
        self.cover().in_unit_box()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, &T)> {
        self.weights.iter()
    }
}

impl FractionalSolution<f64> {
    /// Encodes an integral solution with disjoint bins: `x_{C_b} = 1` for every
    /// nonempty bin.
    pub fn from_solution(s: &Solution) -> Self {
        let mut x = FractionalSolution::new();
        for bin in s.bins.iter().filter(|b| !b.is_empty()) {
            x.add(bin.clone(), 1.0);
        }
        x
    }

    pub fn value(&self, inst: &Instance) -> Result<f64> {
        self.cover().value(inst)
    }
}

/// Convenience alias for [`Instance::validate_configuration`].
pub fn validate_configuration(inst: &Instance, c: &Configuration) -> Result<bool> {
    inst.validate_configuration(c)
}

pub fn cover<T: Scalar>(x: &FractionalSolution<T>) -> CoverVector<T> {
    x.cover()
}

pub fn solution_value(inst: &Instance, s: &Solution) -> Result<f64> {
    inst.solution_value(s)
}
