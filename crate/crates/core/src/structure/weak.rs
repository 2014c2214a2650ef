//! Fractional solution for an α-scaled cover vector: shifting over the
//! linear groups, an assignment LP for the small items, and the two simple
//! constructions for whatever is left.

use std::collections::BTreeSet;

use num::rational::BigRational;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::context::{q, type_label, StructureContext, TypeVec};
use super::fractional::{check_unit_box, common_denominator, copies, fractional_first_fit, item_per_bin};
use crate::error::{Error, Result};
use crate::model::{Configuration, CoverVector, FractionalSolution, ItemId};
use crate::simplex::{solve_vertex_lp, DenseLp, LpStatus, Sense};

/// Largest number of Assign-LP variables attempted.
pub const MAX_ASSIGN_VARS: usize = 20_000;

/// Fails with the first violated cap of the α-scaled conditions.
pub fn check_alpha_scaled(ctx: &StructureContext, y: &CoverVector<BigRational>, alpha: &BigRational) -> Result<()> {
    check_unit_box(y)?;
    if alpha.is_negative() || *alpha > BigRational::one() {
        return Err(Error::input(format!("alpha = {alpha} not in [0,1]")));
    }
    for id in y.support() {
        if !ctx.items.contains(&id) {
            return Err(Error::precondition(format!("item {id} is outside the packed set")));
        }
    }
    for (j, g) in ctx.groups.iter().enumerate() {
        let sum = g.iter().fold(BigRational::zero(), |a, id| a + y.get(*id));
        if sum > alpha.clone() * q(g.len()) {
            return Err(Error::precondition(format!(
                "group G[{}] takes {sum}, above alpha*|G| = {}",
                j + 1,
                alpha.clone() * q(g.len())
            )));
        }
    }
    for (p, class) in &ctx.classes {
        let count = class.iter().fold(BigRational::zero(), |a, id| a + y.get(*id));
        if count > alpha.clone() * q(class.len()) {
            return Err(Error::precondition(format!(
                "class K{} takes {count} items, above alpha*|K|",
                type_label(p)
            )));
        }
        let weight = class
            .iter()
            .fold(BigRational::zero(), |a, id| a + y.get(*id) * ctx.weight(*id));
        if weight > alpha.clone() * ctx.weight_sum(class) {
            return Err(Error::precondition(format!(
                "class K{} takes weight {weight}, above alpha*w(K)",
                type_label(p)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakStructureReport {
    #[serde(skip)]
    pub solution: FractionalSolution<BigRational>,
    /// Common denominator `N`.
    pub denominator: String,
    /// Number of placeholder configurations `M`.
    pub placeholders: usize,
    pub rejected: usize,
    pub rejected_per_group: Vec<usize>,
    pub fractional_entries: usize,
    pub fractional_mass: String,
    pub norm: f64,
    /// `M/N + 4δ·M/N + 1 + α·|G_1| + |R|`, the sum of the component bounds.
    pub component_bound: f64,
    /// `α(1+10δ)ℓ + exp(δ^-4)`.
    pub bound: f64,
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn build_weak_structure_solution(
    ctx: &StructureContext,
    y: &CoverVector<BigRational>,
    alpha: &BigRational,
) -> Result<WeakStructureReport> {
    check_alpha_scaled(ctx, y, alpha)?;
    let n = common_denominator(y.iter().map(|(_, v)| v).chain(std::iter::once(alpha)));
    let nr = BigRational::from_integer(n.clone());
    let alpha_n = copies(&n, alpha)?;
    let n_usize = n.to_usize().ok_or_else(|| Error::input("common denominator too large"))?;

    // ξ: consecutive blocks of αNη(p)+N indices per type with η(p) > 0
    let mut xi: Vec<&TypeVec> = Vec::new();
    for (p, &eta) in &ctx.eta_by_type {
        let size = alpha_n * eta + n_usize;
        if xi.len() + size > MAX_ASSIGN_VARS {
            return Err(Error::Capacity {
                what: "placeholder configurations",
                size: xi.len() + size,
                limit: MAX_ASSIGN_VARS,
                hint: "; use entries with smaller denominators",
            });
        }
        xi.extend(std::iter::repeat_n(p, size));
    }
    let m = xi.len();

    // shifting: items of G_j take the slots that ξ reserves for G_{j-1}
    let mut a: Vec<Vec<ItemId>> = vec![Vec::new(); m];
    let mut rejected: Vec<ItemId> = Vec::new();
    let mut rejected_per_group = vec![0; ctx.num_groups()];
    for j in 1..ctx.num_groups() {
        let mut used = vec![0usize; m];
        for &id in &ctx.groups[j] {
            let need = copies(&n, &y.get(id))?;
            let open: Vec<usize> = (0..m).filter(|&b| used[b] < xi[b][j - 1]).take(need).collect();
            if open.len() == need {
                for b in open {
                    used[b] += 1;
                    a[b].push(id);
                }
            } else {
                rejected.push(id);
                rejected_per_group[j] += 1;
            }
        }
        if rejected_per_group[j] > 2 * ctx.inv_delta {
            return Err(Error::internal(format!(
                "{} rejected items in group {}",
                rejected_per_group[j],
                j + 1
            )));
        }
    }
    for b in 0..m {
        let p = xi[b];
        if a[b].len() > p.iter().sum::<usize>() || ctx.weight_sum(&a[b]) > ctx.type_weight(p) {
            return Err(Error::internal(format!("placeholder {b} exceeds its type")));
        }
    }

    // Assign-LP over the small items in the support
    let small: Vec<ItemId> = y.support().filter(|id| !ctx.is_large(*id)).collect();
    let nvars = small.len() * m;
    if nvars > MAX_ASSIGN_VARS {
        return Err(Error::Capacity {
            what: "assignment LP variables",
            size: nvars,
            limit: MAX_ASSIGN_VARS,
            hint: "",
        });
    }
    let mut lp = DenseLp::new(vec![BigRational::one(); nvars]);
    lp.upper = vec![Some(BigRational::one()); nvars];
    for (s, &id) in small.iter().enumerate() {
        let row: Vec<(usize, BigRational)> = (0..m).map(|b| (s * m + b, BigRational::one())).collect();
        lp.add_sparse_row(&row, Sense::Le, nr.clone() * y.get(id));
    }
    for b in 0..m {
        let cnt: Vec<(usize, BigRational)> = (0..small.len()).map(|s| (s * m + b, BigRational::one())).collect();
        lp.add_sparse_row(&cnt, Sense::Le, q(ctx.k) - q(a[b].len()));
        let wt: Vec<(usize, BigRational)> = small
            .iter()
            .enumerate()
            .map(|(s, id)| (s * m + b, ctx.weight(*id).clone()))
            .collect();
        lp.add_sparse_row(&wt, Sense::Le, BigRational::one() - ctx.weight_sum(&a[b]));
    }
    let sol = solve_vertex_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::internal("assignment LP not solved to optimality"));
    }
    let target = small.iter().fold(BigRational::zero(), |acc, id| acc + nr.clone() * y.get(*id));
    if sol.objective != target {
        return Err(Error::internal(format!(
            "assignment LP optimum {} differs from N*sum(y) = {target}",
            sol.objective
        )));
    }
    let mut fractional_entries = 0;
    let mut fractional_mass = BigRational::zero();
    let mut full = vec![Vec::new(); m];
    let mut beta_copies = vec![0usize; small.len()];
    for (s, &id) in small.iter().enumerate() {
        for b in 0..m {
            let z = &sol.x[s * m + b];
            if z.is_one() {
                full[b].push(id);
                beta_copies[s] += 1;
            } else if z.is_positive() {
                fractional_entries += 1;
                fractional_mass += z;
            }
        }
    }
    if fractional_mass > q(2 * m) {
        return Err(Error::internal(format!("fractional mass {fractional_mass} above 2M")));
    }

    let mut x = FractionalSolution::new();
    let share = BigRational::one() / nr.clone();
    for b in 0..m {
        let mut ids = a[b].clone();
        ids.extend(full[b].iter().copied());
        if !ctx.is_configuration(&ids) {
            return Err(Error::internal(format!("configuration {b} overflows after the LP")));
        }
        x.add(Configuration::new(ids), share.clone());
    }

    let leftover = CoverVector::from_entries(
        small
            .iter()
            .zip(&beta_copies)
            .map(|(id, &c)| (*id, y.get(*id) - q(c) / nr.clone())),
    );
    let f = fractional_first_fit(ctx, &leftover)?;
    let rejected_set: BTreeSet<ItemId> = rejected.iter().copied().collect();
    let first_group: BTreeSet<ItemId> = ctx.groups[0].iter().copied().collect();
    let d = item_per_bin(&y.restrict(|id| first_group.contains(&id) || rejected_set.contains(&id)))?;
    x.merge(&f);
    x.merge(&d);
    if x.cover() != *y {
        return Err(Error::internal("cover of the weak structure solution differs from y"));
    }

    let delta = to_f64(&ctx.delta);
    let mn = m as f64 / to_f64(&nr);
    let af = to_f64(alpha);
    let component_bound = mn + 4.0 * delta * mn + 1.0 + af * ctx.groups[0].len() as f64 + rejected.len() as f64;
    let bound = af * (1.0 + 10.0 * delta) * ctx.ell() as f64 + delta.powi(-4).exp();
    Ok(WeakStructureReport {
        norm: to_f64(&x.size()),
        solution: x,
        denominator: BigInt::to_string(&n),
        placeholders: m,
        rejected: rejected.len(),
        rejected_per_group,
        fractional_entries,
        fractional_mass: fractional_mass.to_string(),
        component_bound,
        bound,
    })
}
