//! Large/small split, linear grouping, types, classes and subclasses of a
//! packed item set, all over exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, Instance, ItemId};
use crate::scalar::rationalize;

/// Per-group large-item counts of a configuration.
pub type TypeVec = Vec<usize>;

/// Denominator cap used when converting float weights.
pub const RATIONAL_DEN_CAP: u64 = 1_000_000;

/// Enumerating more types than this is refused.
pub const MAX_TYPES: usize = 500_000;

pub fn q(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureContext {
    #[serde(serialize_with = "ser_rat")]
    pub delta: BigRational,
    /// `1/δ`.
    pub inv_delta: usize,
    pub k: usize,
    /// Disjoint configurations `D_1..D_ℓ` whose union is `S`.
    pub packing: Vec<Configuration>,
    pub items: BTreeSet<ItemId>,
    #[serde(skip)]
    weights: BTreeMap<ItemId, BigRational>,
    pub large: BTreeSet<ItemId>,
    /// `G_1..G_{δ^-2}`, each sorted by nonincreasing weight.
    pub groups: Vec<Vec<ItemId>>,
    pub group_size: usize,
    #[serde(skip)]
    pub rounded: Vec<BigRational>,
    /// Every type of some configuration, in lexicographic order.
    #[serde(skip)]
    pub types: Vec<TypeVec>,
    pub eta: BTreeMap<String, usize>,
    #[serde(skip)]
    pub eta_by_type: BTreeMap<TypeVec, usize>,
    #[serde(skip)]
    pub bin_types: Vec<TypeVec>,
    /// Classes of types with `η > 0`, sorted by nonincreasing weight.
    #[serde(skip)]
    pub classes: BTreeMap<TypeVec, Vec<ItemId>>,
    /// Degenerate types among those with `η > 0`; every other type has an
    /// empty class and is degenerate as well.
    #[serde(skip)]
    pub degenerate: BTreeSet<TypeVec>,
    /// `H_{p,1..δ^-2}` of non-degenerate types.
    #[serde(skip)]
    pub subclasses: BTreeMap<TypeVec, Vec<Vec<ItemId>>>,
    /// `h_{p,0..δ^-2}`.
    #[serde(skip)]
    pub boundaries: BTreeMap<TypeVec, Vec<usize>>,
}

fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn type_label(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Checks `δ = 1/d` for an integer `d >= 2` and returns `d`.
pub fn delta_inverse(delta: &BigRational) -> Result<usize> {
    if !delta.is_positive() || *delta >= BigRational::one() {
        return Err(Error::input(format!("delta {delta} not in (0,1)")));
    }
    let inv = delta.recip();
    if !inv.is_integer() {
        return Err(Error::input(format!("1/delta must be an integer, got {inv}")));
    }
    inv.to_integer()
        .to_usize()
        .ok_or_else(|| Error::input("1/delta too large"))
}

impl StructureContext {
    pub fn ell(&self) -> usize {
        self.packing.len()
    }

    pub fn num_groups(&self) -> usize {
        self.inv_delta * self.inv_delta
    }

    pub fn weight(&self, id: ItemId) -> &BigRational {
        &self.weights[&id]
    }

    /// `w̃(i) = w(i) + 1/k`.
    pub fn adjusted(&self, id: ItemId) -> BigRational {
        self.weights[&id].clone() + BigRational::new(1.into(), self.k.into())
    }

    pub fn weight_sum<'a>(&self, ids: impl IntoIterator<Item = &'a ItemId>) -> BigRational {
        ids.into_iter().fold(BigRational::zero(), |a, id| a + self.weight(*id))
    }

    pub fn adjusted_sum<'a>(&self, ids: impl IntoIterator<Item = &'a ItemId>) -> BigRational {
        ids.into_iter().fold(BigRational::zero(), |a, id| a + self.adjusted(*id))
    }

    pub fn is_large(&self, id: ItemId) -> bool {
        self.large.contains(&id)
    }

    /// Items of `S∖L`.
    pub fn small_items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.items.iter().copied().filter(|id| !self.large.contains(id))
    }

    pub fn has_item(&self, id: ItemId) -> bool {
        self.weights.contains_key(&id)
    }

    pub fn group_of(&self, id: ItemId) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&id))
    }

    /// Rational configuration test: `w(T) <= 1` and `|T| <= k`.
    pub fn is_configuration(&self, ids: &[ItemId]) -> bool {
        ids.len() <= self.k && self.weight_sum(ids) <= BigRational::one()
    }

    pub fn type_of(&self, c: &[ItemId]) -> TypeVec {
        let mut p = vec![0; self.num_groups()];
        for id in c {
            if let Some(j) = self.group_of(*id) {
                p[j] += 1;
            }
        }
        p
    }

    /// `w(p) = Σ_j p_j·w_j`.
    pub fn type_weight(&self, p: &[usize]) -> BigRational {
        p.iter()
            .zip(&self.rounded)
            .fold(BigRational::zero(), |a, (&c, w)| a + q(c) * w)
    }

    pub fn eta(&self, p: &[usize]) -> usize {
        self.eta_by_type.get(p).copied().unwrap_or(0)
    }

    pub fn class(&self, p: &[usize]) -> &[ItemId] {
        self.classes.get(p).map_or(&[], |c| c.as_slice())
    }

    pub fn class_of(&self, id: ItemId) -> Option<&TypeVec> {
        self.classes.iter().find(|(_, c)| c.contains(&id)).map(|(p, _)| p)
    }

    pub fn is_degenerate(&self, p: &[usize]) -> bool {
        !self.subclasses.contains_key(p)
    }

    /// `ℓ·δ³/|𝒫|`.
    pub fn degeneracy_threshold(&self) -> BigRational {
        q(self.ell()) * self.delta.clone() * self.delta.clone() * self.delta.clone() / q(self.types.len())
    }
}

/// Sums of the lightest `c` items of each group, for the type enumeration.
fn lightest_prefix(groups: &[Vec<ItemId>], w: &BTreeMap<ItemId, BigRational>) -> Vec<Vec<BigRational>> {
    groups
        .iter()
        .map(|g| {
            let mut acc = vec![BigRational::zero()];
            for id in g.iter().rev() {
                let next = acc.last().unwrap().clone() + &w[id];
                acc.push(next);
            }
            acc
        })
        .collect()
}

fn enumerate_types(
    prefix: &[Vec<BigRational>],
    k: usize,
    j: usize,
    cur: &mut TypeVec,
    count: usize,
    weight: BigRational,
    out: &mut Vec<TypeVec>,
) -> Result<()> {
    if j == prefix.len() {
        if out.len() >= MAX_TYPES {
            return Err(Error::Capacity {
                what: "configuration types",
                size: out.len() + 1,
                limit: MAX_TYPES,
                hint: "; use a larger delta",
            });
        }
        out.push(cur.clone());
        return Ok(());
    }
    for c in 0..prefix[j].len() {
        if count + c > k {
            break;
        }
        let wt = weight.clone() + &prefix[j][c];
        if wt > BigRational::one() {
            break;
        }
        cur[j] = c;
        enumerate_types(prefix, k, j + 1, cur, count + c, wt, out)?;
    }
    cur[j] = 0;
    Ok(())
}

/// Builds the full context of `packing` at granularity `delta`.
pub fn build_context(inst: &Instance, packing: &[Configuration], delta: &BigRational) -> Result<StructureContext> {
    let inv_delta = delta_inverse(delta)?;
    if packing.is_empty() {
        return Err(Error::input("the packing needs at least one configuration"));
    }
    let k = inst.k();
    let weights: BTreeMap<ItemId, BigRational> = inst
        .items()
        .iter()
        .map(|it| (it.id, rationalize(it.weight, RATIONAL_DEN_CAP)))
        .collect();
    let mut items = BTreeSet::new();
    for (b, c) in packing.iter().enumerate() {
        for id in c {
            if !weights.contains_key(id) {
                return Err(Error::UnknownItem(*id));
            }
            if !items.insert(*id) {
                return Err(Error::input(format!("item {id} appears in two configurations")));
            }
        }
        let w = c.iter().fold(BigRational::zero(), |a, id| a + &weights[id]);
        if c.len() > k || w > BigRational::one() {
            return Err(Error::input(format!("packing entry {b} is not a configuration")));
        }
    }
    let kinv = BigRational::new(1.into(), k.into());
    let mut large: Vec<ItemId> = items
        .iter()
        .copied()
        .filter(|id| weights[id].clone() + &kinv >= *delta)
        .collect();
    large.sort_by(|a, b| weights[b].cmp(&weights[a]).then(a.cmp(b)));

    let ngroups = inv_delta * inv_delta;
    let group_size = large.len().div_ceil(ngroups);
    let mut groups = vec![Vec::new(); ngroups];
    if group_size > 0 {
        for (p, id) in large.iter().enumerate() {
            groups[p / group_size].push(*id);
        }
    }
    let rounded: Vec<BigRational> = groups
        .iter()
        .map(|g| g.last().map_or(BigRational::zero(), |id| weights[id].clone()))
        .collect();

    let mut types = Vec::new();
    let prefix = lightest_prefix(&groups, &weights);
    enumerate_types(&prefix, k, 0, &mut vec![0; ngroups], 0, BigRational::zero(), &mut types)?;

    let large_set: BTreeSet<ItemId> = large.iter().copied().collect();
    let mut ctx = StructureContext {
        delta: delta.clone(),
        inv_delta,
        k,
        packing: packing.to_vec(),
        items,
        weights,
        large: large_set,
        groups,
        group_size,
        rounded,
        types,
        eta: BTreeMap::new(),
        eta_by_type: BTreeMap::new(),
        bin_types: Vec::new(),
        classes: BTreeMap::new(),
        degenerate: BTreeSet::new(),
        subclasses: BTreeMap::new(),
        boundaries: BTreeMap::new(),
    };

    for c in packing {
        let p = ctx.type_of(c.ids());
        *ctx.eta_by_type.entry(p.clone()).or_insert(0) += 1;
        let class = ctx.classes.entry(p.clone()).or_default();
        class.extend(c.iter().copied().filter(|id| !ctx.large.contains(id)));
        ctx.bin_types.push(p);
    }
    ctx.eta = ctx.eta_by_type.iter().map(|(p, &n)| (type_label(p), n)).collect();
    for class in ctx.classes.values_mut() {
        class.sort_by(|a, b| ctx.weights[b].cmp(&ctx.weights[a]).then(a.cmp(b)));
    }

    let threshold = ctx.degeneracy_threshold();
    let delta_sq = delta.clone() * delta.clone();
    let mut subclasses = BTreeMap::new();
    let mut boundaries = BTreeMap::new();
    let mut degenerate = BTreeSet::new();
    for (p, class) in &ctx.classes {
        let total = ctx.adjusted_sum(class);
        if total <= threshold {
            degenerate.insert(p.clone());
            continue;
        }
        let mut prefix = vec![BigRational::zero()];
        for id in class {
            let next = prefix.last().unwrap().clone() + ctx.adjusted(*id);
            prefix.push(next);
        }
        let mut h = vec![0usize];
        for j in 1..=ngroups {
            let target = q(j) * delta_sq.clone() * total.clone();
            let s = (1..=class.len()).find(|&s| prefix[s] >= target).unwrap_or(class.len());
            h.push(s);
        }
        let subs = (1..=ngroups).map(|j| class[h[j - 1]..h[j]].to_vec()).collect();
        subclasses.insert(p.clone(), subs);
        boundaries.insert(p.clone(), h);
    }
    ctx.degenerate = degenerate;
    ctx.subclasses = subclasses;
    ctx.boundaries = boundaries;
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Item;
    use crate::scalar::rat;

    fn small_ctx() -> (Instance, StructureContext) {
        let items = vec![
            Item::new(0, 0.5, 1.0),
            Item::new(1, 0.4, 1.0),
            Item::new(2, 0.1, 1.0),
            Item::new(3, 0.05, 1.0),
            Item::new(4, 0.6, 1.0),
            Item::new(5, 0.1, 1.0),
            Item::new(6, 0.2, 1.0),
        ];
        let inst = Instance::new(items, 2, 4).unwrap();
        let packing = vec![
            Configuration::new(vec![ItemId(0), ItemId(1), ItemId(2)]),
            Configuration::new(vec![ItemId(4), ItemId(5), ItemId(6), ItemId(3)]),
        ];
        let ctx = build_context(&inst, &packing, &rat(1, 2)).unwrap();
        (inst, ctx)
    }

    #[test]
    fn split_and_groups() {
        let (_, ctx) = small_ctx();
        // k = 4: large iff w >= 1/4
        let large: Vec<u32> = ctx.large.iter().map(|i| i.0).collect();
        assert_eq!(large, vec![0, 1, 4]);
        assert_eq!(ctx.group_size, 1);
        assert_eq!(ctx.groups[0], vec![ItemId(4)]);
        assert_eq!(ctx.groups[1], vec![ItemId(0)]);
        assert_eq!(ctx.groups[2], vec![ItemId(1)]);
        assert!(ctx.groups[3].is_empty());
        assert_eq!(ctx.rounded[1], rat(1, 2));
        assert_eq!(ctx.bin_types, vec![vec![0, 1, 1, 0], vec![1, 0, 0, 0]]);
        assert_eq!(ctx.class(&[1, 0, 0, 0]), &[ItemId(6), ItemId(5), ItemId(3)]);
    }

    #[test]
    fn all_large_when_k_small() {
        let inst = Instance::new(vec![Item::new(0, 0.01, 1.0), Item::new(1, 0.02, 1.0)], 1, 2).unwrap();
        let packing = vec![Configuration::new(vec![ItemId(0), ItemId(1)])];
        let ctx = build_context(&inst, &packing, &rat(1, 2)).unwrap();
        assert_eq!(ctx.large.len(), 2);
        assert_eq!(ctx.small_items().count(), 0);
        assert!(ctx.classes.values().all(|c| c.is_empty()));
    }

    #[test]
    fn types_are_exactly_the_feasible_counts() {
        let (_, ctx) = small_ctx();
        // groups hold weights 0.6, 0.5, 0.4: feasible large subsets are
        // {}, {0.6}, {0.5}, {0.4}, {0.5,0.4}, {0.6,0.4}
        assert_eq!(ctx.types.len(), 6);
        assert!(ctx.types.contains(&vec![1, 0, 1, 0]));
        assert!(!ctx.types.contains(&vec![1, 1, 0, 0]));
    }

    #[test]
    fn rejects_bad_input() {
        let (inst, _) = small_ctx();
        let overlap = vec![Configuration::new(vec![ItemId(0)]), Configuration::new(vec![ItemId(0)])];
        assert!(build_context(&inst, &overlap, &rat(1, 2)).is_err());
        let heavy = vec![Configuration::new(vec![ItemId(0), ItemId(4)])];
        assert!(build_context(&inst, &heavy, &rat(1, 2)).is_err());
        let ok = vec![Configuration::new(vec![ItemId(0)])];
        assert!(build_context(&inst, &ok, &rat(2, 5)).is_err());
    }
}
