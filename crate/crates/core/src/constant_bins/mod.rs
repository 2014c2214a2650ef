//! Enumeration scheme for a constant number of bins, its local-search
//! baseline, and the dispatcher choosing between solvers.
//!
//! Valuable items (value at least `ε·LS/m`, with `LS` the local-search value)
//! are guessed explicitly; everything else is filled in by the assignment LP
//! and only its integral entries are kept.

pub mod assign_lp;
pub mod bands;
pub mod dispatch;
pub mod local_search;

use std::collections::BTreeSet;

use serde::Serialize;

pub use assign_lp::{solve_assign_lp, AssignLpResult};
pub use bands::{band_count, build_value_bands, first_items, ValueBandTable};
pub use dispatch::{dispatch, Branch, DispatchParams};
pub use local_search::local_search;

use crate::error::{Error, Result};
use crate::model::{Configuration, Instance, ItemId, Solution};
use crate::scalar::FLOAT_TOL;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// `ε = min(1/2, ε'/5)`.
pub fn refined_eps(eps_prime: f64) -> f64 {
    (eps_prime / 5.0).min(0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantBinsReport {
    pub solution: Solution,
    pub value: f64,
    pub eps: f64,
    pub local_search_value: f64,
    pub estimated_guesses: u128,
    pub evaluated_guesses: u64,
    pub lp_solves: u64,
    pub max_fractional_entries: usize,
}

pub fn constant_bins(inst: &Instance, eps_prime: f64, budget: u128) -> Result<Solution> {
    constant_bins_detailed(inst, eps_prime, budget).map(|r| r.solution)
}

/// Words over `m` bins of length `t`, each bin used at most `k` times,
/// summed over `t = 0..=len`. Saturates at `u128::MAX`.
fn band_guesses(len: usize, m: usize, k: usize) -> u128 {
    let len = len.min(m.saturating_mul(k));
    // binomials up to len
    let mut binom = vec![vec![0u128; len + 1]; len + 1];
    for t in 0..=len {
        binom[t][0] = 1;
        for c in 1..=t {
            binom[t][c] = binom[t - 1][c - 1].saturating_add(if c < t { binom[t - 1][c] } else { 0 });
        }
    }
    // f[t]: words of length t over the letters seen so far
    let mut f = vec![0u128; len + 1];
    f[0] = 1;
    for _ in 0..m {
        let mut g = vec![0u128; len + 1];
        for t in 0..=len {
            for c in 0..=t.min(k) {
                g[t] = g[t].saturating_add(binom[t][c].saturating_mul(f[t - c]));
            }
        }
        f = g;
    }
    f.iter().fold(0u128, |a, &x| a.saturating_add(x))
}

/// Upper bound on the number of guesses the enumeration visits.
pub fn estimate_guesses(table: &ValueBandTable, k: usize) -> u128 {
    table
        .bands
        .values()
        .map(|g| band_guesses(g.len(), table.m, k))
        .fold(1u128, |a, x| a.saturating_mul(x))
}

struct Enumeration<'a> {
    inst: &'a Instance,
    valuable: &'a BTreeSet<ItemId>,
    bands: Vec<Vec<(ItemId, f64, f64)>>,
    small_total: f64,
    content: Vec<Vec<ItemId>>,
    load: Vec<f64>,
    value: f64,
    best: Option<(f64, Solution)>,
    evaluated: u64,
    lp_solves: u64,
    max_fractional: usize,
}

impl Enumeration<'_> {
    /// Band `bi`, position `t`: either close the band or hand its next
    /// lightest item to a bin. Bins are labelled in order of first use.
    fn walk(&mut self, bi: usize, t: usize, used: usize) -> Result<()> {
        if bi == self.bands.len() {
            return self.leaf();
        }
        self.walk(bi + 1, 0, used)?;
        if t == self.bands[bi].len() {
            return Ok(());
        }
        let (id, w, v) = self.bands[bi][t];
        let m = self.content.len();
        for b in 0..(used + 1).min(m) {
            if self.content[b].len() < self.inst.k() && self.load[b] + w <= 1.0 + FLOAT_TOL {
                self.content[b].push(id);
                self.load[b] += w;
                self.value += v;
                self.walk(bi, t + 1, used.max(b + 1))?;
                self.value -= v;
                self.load[b] -= w;
                self.content[b].pop();
            }
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        self.evaluated += 1;
        let best = self.best.as_ref().map_or(-1.0, |b| b.0);
        if self.value + self.small_total <= best + FLOAT_TOL {
            return Ok(());
        }
        let u: Vec<Configuration> = self.content.iter().map(|c| Configuration::new(c.clone())).collect();
        let lp = solve_assign_lp(self.inst, self.valuable, &u)?;
        self.lp_solves += 1;
        if !lp.feasible {
            return Ok(());
        }
        self.max_fractional = self.max_fractional.max(lp.fractional_entries);
        let bins: Vec<Configuration> = u
            .iter()
            .enumerate()
            .map(|(b, ub)| {
                let mut ids = ub.ids().to_vec();
                ids.extend(lp.integral_items(b));
                Configuration::new(ids)
            })
            .collect();
        let s = Solution::new(bins);
        if self.inst.validate_solution(&s).is_err() {
            return Ok(());
        }
        let v = self.inst.solution_value(&s)?;
        if v > best + FLOAT_TOL {
            self.best = Some((v, s));
        }
        Ok(())
    }
}

/// Runs the enumeration and reports counters alongside the solution.
///
/// Each guess hands, for every band, a prefix of the band's items (lightest
/// first) to the bins, one item at a time; the bins' valuable contents are
/// therefore disjoint. The assignment LP then adds non-valuable items.
pub fn constant_bins_detailed(inst: &Instance, eps_prime: f64, budget: u128) -> Result<ConstantBinsReport> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::input(format!("epsilon' = {eps_prime} not in (0,1)")));
    }
    let eps = refined_eps(eps_prime);
    let ls = local_search(inst)?;
    let ls_value = inst.solution_value(&ls)?;
    let table = build_value_bands(inst, eps, ls_value);
    let estimated = estimate_guesses(&table, inst.k());
    if estimated > budget {
        return Err(Error::Budget { estimated, budget });
    }
    let mut bands = Vec::new();
    for ids in table.bands.values() {
        let band = ids
            .iter()
            .map(|&id| inst.item(id).map(|it| (id, it.weight, it.value)))
            .collect::<Result<Vec<_>>>()?;
        bands.push(band);
    }
    let small_total = inst
        .items()
        .iter()
        .filter(|it| !table.valuable.contains(&it.id))
        .map(|it| it.value)
        .sum();
    let m = inst.m();
    let mut e = Enumeration {
        inst,
        valuable: &table.valuable,
        bands,
        small_total,
        content: vec![Vec::new(); m],
        load: vec![0.0; m],
        value: 0.0,
        best: None,
        evaluated: 0,
        lp_solves: 0,
        max_fractional: 0,
    };
    e.walk(0, 0, 0)?;
    let (value, solution) = e.best.take().unwrap_or((0.0, Solution::empty(m)));
    Ok(ConstantBinsReport {
        solution,
        value,
        eps,
        local_search_value: ls_value,
        estimated_guesses: estimated,
        evaluated_guesses: e.evaluated,
        lp_solves: e.lp_solves,
        max_fractional_entries: e.max_fractional,
    })
}
