//! Randomized checks of the structure lemmas and the certificate printed by
//! `cmk structure verify`.

use num::rational::BigRational;
use num::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::context::{build_context, q, type_label, StructureContext};
use super::fractional::{fractional_first_fit, item_per_bin};
use super::pipeline::build_structure_solution;
use super::vectors::{build_structure_vectors, check_structure_inequalities};
use super::weak::build_weak_structure_solution;
use crate::error::Result;
use crate::model::{Configuration, CoverVector, Instance, Item, ItemId};
use crate::scalar::rat;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub checked: usize,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            pass: true,
            checked: 0,
            detail: String::new(),
        }
    }

    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.pass {
            self.pass = false;
            self.detail = detail();
        }
    }
}

/// Instance with weights in hundredths and a first-fit packing into `ell`
/// bins; `k = 2/δ + 2` so both large and small items occur.
pub fn random_packing(inv_delta: usize, n: usize, ell: usize, seed: u64) -> Result<(Instance, Vec<Configuration>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 2 * inv_delta + 2;
    let items: Vec<Item> = (0..n)
        .map(|i| {
            let w = if rng.gen_bool(0.4) {
                rng.gen_range(30..=60)
            } else {
                rng.gen_range(1..=20)
            };
            Item::new(i as u32, w as f64 / 100.0, rng.gen_range(1..=100) as f64 / 100.0)
        })
        .collect();
    let inst = Instance::new(items, ell, k)?;
    let mut bins: Vec<Vec<ItemId>> = vec![Vec::new(); ell];
    let mut loads = vec![0u32; ell];
    for it in inst.items() {
        let w = (it.weight * 100.0).round() as u32;
        if let Some(b) = (0..ell).find(|&b| bins[b].len() < k && loads[b] + w <= 100) {
            bins[b].push(it.id);
            loads[b] += w;
        }
    }
    Ok((inst, bins.into_iter().map(Configuration::new).collect()))
}

/// A random configuration of the instance, grown item by item.
fn random_configuration(ctx: &StructureContext, inst: &Instance, rng: &mut ChaCha8Rng) -> Vec<ItemId> {
    let mut ids: Vec<ItemId> = inst.ids().collect();
    ids.shuffle(rng);
    let mut c = Vec::new();
    let target = rng.gen_range(0..=ctx.k);
    for id in ids {
        if c.len() == target {
            break;
        }
        c.push(id);
        if !ctx.is_configuration(&c) {
            c.pop();
        }
    }
    c
}

/// Observations and lemmas about the context itself, on the packing and on
/// `samples` random configurations.
pub fn check_context(inst: &Instance, ctx: &StructureContext, samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut configs: Vec<Vec<ItemId>> = ctx.packing.iter().map(|c| c.ids().to_vec()).collect();
    configs.extend((0..samples).map(|_| random_configuration(ctx, inst, &mut rng)));
    let two = q(2);
    let one = BigRational::one();
    let inv = ctx.inv_delta;

    let mut adjusted = CheckResult::new("config_adjusted_weight");
    let mut large_cnt = CheckResult::new("large_items_in_conf");
    let mut type_weight = CheckResult::new("type_weight");
    let mut small_items = CheckResult::new("small_items");
    for c in &configs {
        let wt = ctx.adjusted_sum(c);
        adjusted.expect(wt <= two, || format!("adjusted weight {wt} of {c:?}"));
        let in_large: Vec<ItemId> = c.iter().copied().filter(|id| ctx.is_large(*id)).collect();
        large_cnt.expect(in_large.len() <= 2 * inv, || format!("{} large items in {c:?}", in_large.len()));
        let p = ctx.type_of(c);
        let wp = ctx.type_weight(&p);
        type_weight.expect(ctx.weight_sum(&in_large) >= wp, || format!("w(C∩L) < w(p) for {c:?}"));
        let rest: Vec<ItemId> = c.iter().copied().filter(|id| !ctx.is_large(*id)).collect();
        let norm: usize = p.iter().sum();
        small_items.expect(
            ctx.weight_sum(&rest) <= one.clone() - wp.clone() && rest.len() + norm <= ctx.k,
            || format!("small part of {c:?} exceeds its type bound"),
        );
    }

    let mut set_adjusted = CheckResult::new("set_adjusted_weight");
    let all: Vec<ItemId> = inst.ids().collect();
    for _ in 0..samples {
        let size = rng.gen_range(0..=all.len().min(8));
        let mut t: Vec<ItemId> = all.choose_multiple(&mut rng, size).copied().collect();
        t.sort();
        if ctx.adjusted_sum(&t) <= one {
            set_adjusted.expect(ctx.is_configuration(&t), || format!("{t:?} has w̃ <= 1 but is no configuration"));
        }
    }

    let mut groups = CheckResult::new("groups_size");
    for j in 0..ctx.num_groups() {
        let prev = if j == 0 { ctx.group_size } else { ctx.groups[j - 1].len() };
        groups.expect(ctx.groups[j].len() <= prev, || format!("|G[{}]| grows", j + 1));
    }

    let mut num_types = CheckResult::new("num_types");
    let cap = (1.0 + 2.0 * inv as f64).powi((inv * inv) as i32);
    num_types.expect((ctx.types.len() as f64) <= cap, || format!("|P| = {} > {cap}", ctx.types.len()));
    for p in &ctx.bin_types {
        num_types.expect(ctx.types.contains(p), || format!("packing type {} missing", type_label(p)));
    }

    let mut class = CheckResult::new("class_weight_and_card");
    for (p, k_p) in &ctx.classes {
        let eta = q(ctx.eta(p));
        let norm: usize = p.iter().sum();
        class.expect(
            ctx.weight_sum(k_p) <= eta.clone() * (one.clone() - ctx.type_weight(p)),
            || format!("w(K{}) too large", type_label(p)),
        );
        class.expect(k_p.len() <= ctx.eta(p) * (ctx.k - norm), || format!("|K{}| too large", type_label(p)));
    }

    let mut eta = CheckResult::new("eta_to_groups");
    for j in 0..ctx.num_groups() {
        let total: usize = ctx.eta_by_type.iter().map(|(p, &n)| n * p[j]).sum();
        eta.expect(total == ctx.groups[j].len(), || format!("sum eta*p_{} = {total}", j + 1));
    }

    let mut subclass = CheckResult::new("adjusted_subclass_weight");
    let d2 = ctx.delta.clone() * ctx.delta.clone();
    for (p, subs) in &ctx.subclasses {
        let total = d2.clone() * ctx.adjusted_sum(ctx.class(p));
        for (j, h) in subs.iter().enumerate() {
            let wh = ctx.adjusted_sum(h);
            subclass.expect(
                total.clone() - ctx.delta.clone() <= wh && wh <= total.clone() + ctx.delta.clone(),
                || format!("w̃(H{}[{}]) = {wh} outside the band", type_label(p), j + 1),
            );
        }
    }
    vec![
        adjusted,
        set_adjusted,
        large_cnt,
        groups,
        num_types,
        type_weight,
        small_items,
        class,
        eta,
        subclass,
    ]
}

/// A cover vector over the small items with entries in `{0, 1/den, .., 1}`.
pub fn random_small_vector(ctx: &StructureContext, den: i64, rng: &mut ChaCha8Rng) -> CoverVector<BigRational> {
    CoverVector::from_entries(ctx.small_items().map(|id| (id, rat(rng.gen_range(0..=den), den))))
}

/// Fractional constructions, the structure vector set, the weak builder and
/// the full pipeline on a handful of vectors.
pub fn check_constructions(inst: &Instance, ctx: &StructureContext, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = BigRational::one();

    let mut ff = CheckResult::new("fractional_first_fit");
    let mut ipb = CheckResult::new("item_per_bin");
    for _ in 0..10 {
        let y = random_small_vector(ctx, 6, &mut rng);
        let x = fractional_first_fit(ctx, &y)?;
        let bound = y.iter().fold(one.clone(), |a, (id, v)| a + q(2) * v * ctx.adjusted(*id));
        ff.expect(x.cover() == y && x.size() <= bound, || format!("norm {} vs bound {bound}", x.size()));
        ff.expect(x.iter().all(|(c, _)| ctx.is_configuration(c.ids())), || "non-configuration".into());
        let z = item_per_bin(&y)?;
        ipb.expect(z.cover() == y && z.size() == y.norm(), || "item_per_bin cover or norm".into());
    }

    let vectors = build_structure_vectors(inst, ctx)?;
    let mut size = CheckResult::new("structure_size");
    let g = ctx.num_groups();
    size.expect(vectors.len() <= 2 * ctx.types.len() * g + g, || format!("|L| = {}", vectors.len()));
    let mut ineq = CheckResult::new("structure_inequalities");
    let zero = CoverVector::new();
    ineq.expect(check_structure_inequalities(ctx, &vectors, &zero, &rat(1, 2), &rat(1, 100)), || "y = 0 rejected".into());
    let half = CoverVector::from_entries(ctx.items.iter().map(|&id| (id, rat(1, 2))));
    ineq.expect(check_structure_inequalities(ctx, &vectors, &half, &rat(1, 2), &rat(1, 100)), || "y = 1/2 rejected".into());

    let mut weak = CheckResult::new("weak_structure");
    let ones = CoverVector::from_entries(ctx.items.iter().map(|&id| (id, one.clone())));
    let mut inputs = vec![(ones, one.clone()), (half.clone(), rat(1, 2))];
    for _ in 0..3 {
        let y = CoverVector::from_entries(ctx.items.iter().map(|&id| (id, rat(rng.gen_range(0..=2), 4))));
        inputs.push((y, rat(1, 2)));
    }
    for (y, alpha) in &inputs {
        let r = build_weak_structure_solution(ctx, y, alpha)?;
        weak.expect(r.solution.cover() == *y, || "cover differs".into());
        weak.expect(r.norm <= r.component_bound + 1e-9 && r.norm <= r.bound, || {
            format!("norm {} above {}", r.norm, r.component_bound)
        });
        weak.expect(r.solution.iter().all(|(c, _)| ctx.is_configuration(c.ids())), || "non-configuration".into());
    }

    let mut full = CheckResult::new("structure");
    let r = build_structure_solution(ctx, &vectors, &half, &rat(1, 2), &rat(1, 100))?;
    full.expect(r.solution.cover() == half && r.norm <= r.bound, || format!("norm {} bound {}", r.norm, r.bound));
    Ok(vec![ff, ipb, size, ineq, weak, full])
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub delta: String,
    pub seed: u64,
    pub items: usize,
    pub ell: usize,
    pub packed: usize,
    pub large: usize,
    pub groups: Vec<usize>,
    pub types: usize,
    pub classes: usize,
    pub degenerate: usize,
    pub vectors: usize,
    pub vector_bound: usize,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

/// Runs every check on a random packing at granularity `delta`.
pub fn structure_certificate(delta: &BigRational, seed: u64) -> Result<Certificate> {
    let inv = super::context::delta_inverse(delta)?;
    let (inst, packing) = random_packing(inv, 16, 3, seed)?;
    let ctx = build_context(&inst, &packing, delta)?;
    let mut checks = check_context(&inst, &ctx, 200, seed);
    checks.extend(check_constructions(&inst, &ctx, seed)?);
    let vectors = build_structure_vectors(&inst, &ctx)?.len();
    let g = ctx.num_groups();
    Ok(Certificate {
        delta: delta.to_string(),
        seed,
        items: inst.len(),
        ell: ctx.ell(),
        packed: ctx.items.len(),
        large: ctx.large.len(),
        groups: ctx.groups.iter().map(|g| g.len()).collect(),
        types: ctx.types.len(),
        classes: ctx.classes.len(),
        degenerate: ctx.degenerate.len(),
        vectors,
        vector_bound: 2 * ctx.types.len() * g + g,
        all_pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
