//! Structure vectors, their tolerance, and the inequality check.

use num::rational::BigRational;
use num::Zero;
use serde::Serialize;

use super::context::{type_label, StructureContext};
use crate::error::Result;
use crate::knapsack::{solve_exact_capped, Candidate, PricingProblem};
use crate::model::{CoverVector, Instance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureVector {
    pub label: String,
    #[serde(skip)]
    pub entries: CoverVector<BigRational>,
    #[serde(serialize_with = "ser_rat")]
    pub tol: BigRational,
}

fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `tol(u) = max_C Σ_{i∈C} u_i`, by the exact single-bin oracle.
pub fn tolerance(inst: &Instance, u: &CoverVector<BigRational>) -> Result<BigRational> {
    let mut candidates = Vec::new();
    for id in u.support() {
        candidates.push(Candidate {
            id,
            weight: inst.weight(id)?,
            profit: u.get(id),
        });
    }
    if candidates.is_empty() {
        return Ok(BigRational::zero());
    }
    let p = PricingProblem::new(candidates, inst.k());
    Ok(solve_exact_capped(&p, usize::MAX)?.profit)
}

fn indicator(ids: &[crate::model::ItemId]) -> CoverVector<BigRational> {
    CoverVector::from_entries(ids.iter().map(|&id| (id, num::One::one())))
}

/// Group indicators plus, per non-degenerate type, the count and weight
/// vectors of every subclass.
pub fn build_structure_vectors(inst: &Instance, ctx: &StructureContext) -> Result<Vec<StructureVector>> {
    let mut out = Vec::new();
    for (p, subs) in &ctx.subclasses {
        for (j, h) in subs.iter().enumerate() {
            let count = indicator(h);
            let weight = CoverVector::from_entries(h.iter().map(|&id| (id, ctx.weight(id).clone())));
            out.push(StructureVector {
                label: format!("count H{}[{}]", type_label(p), j + 1),
                tol: tolerance(inst, &count)?,
                entries: count,
            });
            out.push(StructureVector {
                label: format!("weight H{}[{}]", type_label(p), j + 1),
                tol: tolerance(inst, &weight)?,
                entries: weight,
            });
        }
    }
    for (j, g) in ctx.groups.iter().enumerate() {
        let u = indicator(g);
        out.push(StructureVector {
            label: format!("group G[{}]", j + 1),
            tol: tolerance(inst, &u)?,
            entries: u,
        });
    }
    Ok(out)
}

/// `u·y <= α·u·1_S + t·tol(u)` for every vector, exactly.
pub fn check_structure_inequalities(
    ctx: &StructureContext,
    vectors: &[StructureVector],
    y: &CoverVector<BigRational>,
    alpha: &BigRational,
    t: &BigRational,
) -> bool {
    vectors.iter().all(|u| {
        let on_s = u
            .entries
            .iter()
            .filter(|(id, _)| ctx.items.contains(id))
            .fold(BigRational::zero(), |a, (_, v)| a + v);
        u.entries.dot(y) <= alpha.clone() * on_s + t.clone() * u.tol.clone()
    })
}
