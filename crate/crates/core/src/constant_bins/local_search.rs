//! Bin-rewrite local search, a 1/4-approximation baseline.

use std::collections::HashMap;

use crate::error::Result;
use crate::knapsack::{self, Candidate, PricingProblem};
use crate::model::{Configuration, Instance, ItemId, Solution};

/// Accuracy of the single-bin oracle inside local search.
pub const ORACLE_EPS: f64 = 5.0 / 28.0;

/// Starts from empty bins and, bin by bin, replaces the content with the best
/// single-bin answer over unassigned items and the bin's own items. A move is
/// kept when it raises the total by more than `(ε″/m)·value`; the search ends
/// after a pass without moves.
pub fn local_search(inst: &Instance) -> Result<Solution> {
    let m = inst.m();
    let theta = ORACLE_EPS / m as f64;
    let mut bins = vec![Configuration::empty(); m];
    let mut owner: HashMap<ItemId, usize> = HashMap::new();
    let mut value = 0.0;
    loop {
        let mut moved = false;
        for b in 0..m {
            let candidates = inst
                .items()
                .iter()
                .filter(|it| it.value > 0.0 && owner.get(&it.id).is_none_or(|&o| o == b))
                .map(|it| Candidate {
                    id: it.id,
                    weight: it.weight,
                    profit: it.value,
                })
                .collect();
            let problem = PricingProblem::new(candidates, inst.k());
            let (pick, _) = knapsack::solve_best(&problem, ORACLE_EPS)?;
            let current = inst.value_of(&bins[b])?;
            let gain = pick.profit - current;
            if gain > theta * value && gain > 1e-12 {
                for id in bins[b].iter() {
                    owner.remove(id);
                }
                for id in pick.config.iter() {
                    owner.insert(*id, b);
                }
                bins[b] = pick.config;
                value += gain;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(Solution::new(bins))
}
