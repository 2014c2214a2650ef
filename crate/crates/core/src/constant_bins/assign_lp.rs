//! The assignment LP that tops up guessed bins with non-valuable items:
//!
//! ```text
//! max  Σ_{i,b} x_{i,b} v(i)
//! s.t. w(U_b) + Σ_i x_{i,b} w(i) <= 1     for every bin b
//!      |U_b|  + Σ_i x_{i,b}      <= k     for every bin b
//!      Σ_b x_{i,b} <= 1                    for every non-valuable i
//!      0 <= x <= 1
//! ```

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, Instance, ItemId};
use crate::scalar::FLOAT_TOL;
use crate::simplex::{solve_vertex_lp, DenseLp, LpStatus, Sense};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignLpResult {
    pub feasible: bool,
    /// Positive entries `(item, bin, x)` of the vertex.
    pub entries: Vec<(ItemId, usize, f64)>,
    pub objective: f64,
    pub fractional_entries: usize,
}

impl AssignLpResult {
    fn infeasible() -> Self {
        AssignLpResult {
            feasible: false,
            entries: Vec::new(),
            objective: 0.0,
            fractional_entries: 0,
        }
    }

    /// Items whose entry for `bin` is exactly 1.
    pub fn integral_items(&self, bin: usize) -> impl Iterator<Item = ItemId> + '_ {
        self.entries
            .iter()
            .filter(move |(_, b, x)| *b == bin && *x >= 1.0 - FLOAT_TOL)
            .map(|(id, _, _)| *id)
    }
}

/// Solves the LP to a vertex. Items outside `valuable` are the LP's items;
/// `u[b]` is the valuable content of bin `b`. Fails with an internal error if
/// the vertex has more than `4m` fractional entries.
pub fn solve_assign_lp(inst: &Instance, valuable: &BTreeSet<ItemId>, u: &[Configuration]) -> Result<AssignLpResult> {
    let m = u.len();
    let mut room = Vec::with_capacity(m);
    let mut slots = Vec::with_capacity(m);
    for bin in u {
        if bin.iter().any(|id| !valuable.contains(id)) {
            return Err(Error::input("guessed bins may only hold valuable items"));
        }
        let w = inst.weight_of(bin)?;
        if w > 1.0 + FLOAT_TOL || bin.len() > inst.k() {
            return Ok(AssignLpResult::infeasible());
        }
        room.push((1.0 - w).max(0.0));
        slots.push((inst.k() - bin.len()) as f64);
    }
    let items: Vec<_> = inst.items().iter().filter(|it| !valuable.contains(&it.id)).collect();
    if items.is_empty() || m == 0 {
        return Ok(AssignLpResult {
            feasible: true,
            entries: Vec::new(),
            objective: 0.0,
            fractional_entries: 0,
        });
    }
    let var = |i: usize, b: usize| i * m + b;
    let mut objective = vec![0.0; items.len() * m];
    for (i, it) in items.iter().enumerate() {
        for b in 0..m {
            objective[var(i, b)] = it.value;
        }
    }
    let mut lp = DenseLp::new(objective);
    for b in 0..m {
        let row: Vec<(usize, f64)> = items.iter().enumerate().map(|(i, it)| (var(i, b), it.weight)).collect();
        lp.add_sparse_row(&row, Sense::Le, room[b]);
        let row: Vec<(usize, f64)> = (0..items.len()).map(|i| (var(i, b), 1.0)).collect();
        lp.add_sparse_row(&row, Sense::Le, slots[b]);
    }
    for i in 0..items.len() {
        let row: Vec<(usize, f64)> = (0..m).map(|b| (var(i, b), 1.0)).collect();
        lp.add_sparse_row(&row, Sense::Le, 1.0);
    }
    lp.upper = vec![Some(1.0); items.len() * m];
    let sol = solve_vertex_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::internal(format!("assignment LP ended {:?}", sol.status)));
    }
    let mut entries = Vec::new();
    let mut fractional = 0;
    for (i, it) in items.iter().enumerate() {
        for b in 0..m {
            let x = sol.x[var(i, b)];
            if x > FLOAT_TOL {
                entries.push((it.id, b, x));
                if x < 1.0 - FLOAT_TOL {
                    fractional += 1;
                }
            }
        }
    }
    if fractional > 4 * m {
        return Err(Error::internal(format!(
            "assignment LP vertex has {fractional} fractional entries, more than 4m = {}",
            4 * m
        )));
    }
    Ok(AssignLpResult {
        feasible: true,
        entries,
        objective: sol.objective,
        fractional_entries: fractional,
    })
}
