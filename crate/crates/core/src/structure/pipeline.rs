//! Full construction for vectors satisfying the structure inequalities:
//! degenerate classes, first and last subclasses and unsaturated groups are
//! split off before the weak construction runs on the rest.

use std::collections::BTreeSet;

use num::rational::BigRational;
use num::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::context::{q, StructureContext};
use super::fractional::{fractional_first_fit, item_per_bin};
use super::vectors::{check_structure_inequalities, StructureVector};
use super::weak::{build_weak_structure_solution, WeakStructureReport};
use crate::error::{Error, Result};
use crate::model::{CoverVector, FractionalSolution, ItemId};

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    #[serde(skip)]
    pub solution: FractionalSolution<BigRational>,
    pub degenerate_norm: f64,
    pub edge_subclass_norm: f64,
    pub unsaturated_norm: f64,
    /// Scaling handed to the weak construction.
    pub inner_alpha: String,
    pub weak: WeakStructureReport,
    pub norm: f64,
    /// `αℓ + 20δℓ + (t+1)·exp(δ^-5)`.
    pub bound: f64,
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn build_structure_solution(
    ctx: &StructureContext,
    vectors: &[StructureVector],
    y: &CoverVector<BigRational>,
    alpha: &BigRational,
    t: &BigRational,
) -> Result<StructureReport> {
    if !alpha.is_positive() || *alpha > BigRational::one() || !t.is_positive() {
        return Err(Error::input("need 0 < alpha <= 1 and t > 0"));
    }
    if let Some(id) = y.support().find(|id| !ctx.items.contains(id)) {
        return Err(Error::precondition(format!("item {id} is outside the packed set")));
    }
    if !check_structure_inequalities(ctx, vectors, y, alpha, t) {
        return Err(Error::precondition("y violates a structure inequality"));
    }
    let degenerate: BTreeSet<ItemId> = ctx
        .classes
        .iter()
        .filter(|(p, _)| ctx.is_degenerate(p))
        .flat_map(|(_, c)| c.iter().copied())
        .collect();
    let edge: BTreeSet<ItemId> = ctx
        .subclasses
        .values()
        .flat_map(|subs| subs[0].iter().chain(subs[subs.len() - 1].iter()).copied())
        .collect();
    let d4 = ctx.delta.clone() * ctx.delta.clone() * ctx.delta.clone() * ctx.delta.clone();
    let cutoff = d4 * q(ctx.ell());
    let unsaturated: BTreeSet<ItemId> = ctx
        .groups
        .iter()
        .filter(|g| q(g.len()) <= cutoff)
        .flat_map(|g| g.iter().copied())
        .collect();

    let d = fractional_first_fit(ctx, &y.restrict(|id| degenerate.contains(&id)))?;
    let e = fractional_first_fit(ctx, &y.restrict(|id| edge.contains(&id)))?;
    let mu = item_per_bin(&y.restrict(|id| unsaturated.contains(&id)))?;
    let rest = y.restrict(|id| !degenerate.contains(&id) && !edge.contains(&id) && !unsaturated.contains(&id));

    let inv6 = ctx.delta.recip().pow(6);
    let raised = alpha.clone() + q(2) * inv6 * q(ctx.types.len()) * t.clone() / q(ctx.ell());
    let inner_alpha = if raised > BigRational::one() { BigRational::one() } else { raised };
    let weak = build_weak_structure_solution(ctx, &rest, &inner_alpha)?;

    let mut x = weak.solution.clone();
    x.merge(&d);
    x.merge(&e);
    x.merge(&mu);
    if x.cover() != *y {
        return Err(Error::internal("cover of the structure solution differs from y"));
    }
    let delta = f(&ctx.delta);
    let ell = ctx.ell() as f64;
    let bound = f(alpha) * ell + 20.0 * delta * ell + (f(t) + 1.0) * delta.powi(-5).exp();
    let size = x.size();
    Ok(StructureReport {
        degenerate_norm: f(&d.size()),
        edge_subclass_norm: f(&e.size()),
        unsaturated_norm: f(&mu.size()),
        inner_alpha: inner_alpha.to_string(),
        weak,
        norm: f(&size),
        bound,
        solution: x,
    })
}
