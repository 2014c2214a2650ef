//! The configuration LP over an item subset `S` with exactly `ℓ` bins:
//!
//! ```text
//! max  Σ_C v(C) x_C
//! s.t. Σ_{C ∋ i} x_C <= 1      for i in S
//!      Σ_C x_C = ℓ
//!      x >= 0,  supp(x) ⊆ configurations inside S
//! ```
//!
//! The empty configuration absorbs unused budget, so its weight may exceed 1.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::knapsack::{self, Candidate, PricingProblem};
use crate::model::{Configuration, FractionalSolution, Instance, ItemId};
use crate::scalar::FLOAT_TOL;
use crate::simplex::{self, DenseLp, LpStatus as VertexStatus, PivotRule, Sense, Simplex};

/// Largest item set [`solve_exact_small`] enumerates.
pub const EXACT_SMALL_LIMIT: usize = 14;
pub const DEFAULT_MAX_COLUMNS: usize = 10_000;
const COARSE_PRICING_EPS: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct LpProblem<'a> {
    pub instance: &'a Instance,
    pub allowed: BTreeSet<ItemId>,
    pub ell: f64,
}

impl<'a> LpProblem<'a> {
    pub fn new(instance: &'a Instance, allowed: BTreeSet<ItemId>, ell: f64) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::input(format!("bin budget ell = {ell} must be positive")));
        }
        if let Some(id) = allowed.iter().find(|id| !instance.contains(**id)) {
            return Err(Error::UnknownItem(*id));
        }
        Ok(LpProblem { instance, allowed, ell })
    }

    /// `LP(I, m)`.
    pub fn full(instance: &'a Instance) -> Self {
        LpProblem {
            instance,
            allowed: instance.ids().collect(),
            ell: instance.m() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Approx { eps: f64 },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub fractional: FractionalSolution,
    pub objective: f64,
    /// Certified bound on the LP optimum (equal to `objective` when exact).
    pub upper_bound: f64,
    /// `λ_i` per item cover row.
    pub duals: BTreeMap<ItemId, f64>,
    /// `μ`, the dual of the budget row.
    pub budget_dual: f64,
    pub status: SolveStatus,
    pub columns: usize,
}

impl LpSolution {
    /// Checks cover, size and support against the problem.
    pub fn check(&self, lp: &LpProblem) -> Result<()> {
        for (c, w) in self.fractional.iter() {
            if *w < 0.0 {
                return Err(Error::internal("negative configuration weight"));
            }
            if !c.iter().all(|id| lp.allowed.contains(id)) {
                return Err(Error::internal("configuration uses an item outside S"));
            }
            if !lp.instance.validate_configuration(c)? {
                return Err(Error::internal("LP support contains an invalid configuration"));
            }
        }
        if (self.fractional.size() - lp.ell).abs() > 1e-9 * lp.ell.max(1.0) {
            return Err(Error::internal(format!(
                "LP solution size {} differs from ell = {}",
                self.fractional.size(),
                lp.ell
            )));
        }
        if self.fractional.cover().entries.values().any(|&v| v > 1.0 + 1e-9) {
            return Err(Error::internal("LP cover exceeds 1"));
        }
        Ok(())
    }
}

/// Solves `LP(S, ℓ)` exactly by listing every configuration inside `S`.
pub fn solve_exact_small(lp: &LpProblem) -> Result<LpSolution> {
    let inst = lp.instance;
    let items: Vec<ItemId> = lp.allowed.iter().copied().collect();
    if items.len() > EXACT_SMALL_LIMIT {
        return Err(Error::Capacity {
            what: "items for configuration enumeration",
            size: items.len(),
            limit: EXACT_SMALL_LIMIT,
            hint: "; use solve_column_generation",
        });
    }
    let mut configs = Vec::new();
    for mask in 0u32..(1 << items.len()) {
        let c: Configuration = (0..items.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| items[b])
            .collect();
        if inst.validate_configuration(&c)? {
            configs.push(c);
        }
    }
    configs.sort();
    let objective: Vec<f64> = configs
        .iter()
        .map(|c| inst.value_of(c))
        .collect::<Result<_>>()?;
    let mut dense = DenseLp::new(objective);
    for &id in &items {
        let row = configs
            .iter()
            .map(|c| if c.contains(id) { 1.0 } else { 0.0 })
            .collect();
        dense.add_row(row, Sense::Le, 1.0);
    }
    dense.add_row(vec![1.0; configs.len()], Sense::Eq, lp.ell);
    let sol = simplex::solve_vertex_lp(&dense)?;
    if sol.status != VertexStatus::Optimal {
        return Err(Error::internal(format!("configuration LP ended {:?}", sol.status)));
    }
    let mut fractional = FractionalSolution::new();
    for (c, &x) in configs.iter().zip(&sol.x) {
        if x > FLOAT_TOL {
            fractional.add(c.clone(), x);
        }
    }
    let objective = fractional.value(inst)?;
    let out = LpSolution {
        fractional,
        objective,
        upper_bound: objective,
        duals: items.iter().copied().zip(sol.duals.iter().copied()).collect(),
        budget_dual: *sol.duals.last().unwrap(),
        status: SolveStatus::Optimal,
        columns: configs.len(),
    };
    out.check(lp)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub max_columns: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            max_columns: DEFAULT_MAX_COLUMNS,
        }
    }
}

/// Column generation with the default column cap.
pub fn solve_column_generation(lp: &LpProblem, eps: f64) -> Result<LpSolution> {
    solve_column_generation_with(lp, eps, &CgOptions::default())
}

/// Restricted master over a growing column pool, priced with the single-bin
/// oracle on profits `max(0, v_i - λ_i)`. Stops once
/// `master >= (1 - eps) * (master + ℓ (P - μ)⁺)`, where `P` bounds the best
/// column profit.
pub fn solve_column_generation_with(lp: &LpProblem, eps: f64, opts: &CgOptions) -> Result<LpSolution> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input(format!("LP accuracy {eps} not in (0,1)")));
    }
    let inst = lp.instance;
    let k = inst.k();
    // zero-value items never help; they get no row and a zero dual
    let mut rows: Vec<(ItemId, f64, f64)> = Vec::new();
    for &id in &lp.allowed {
        let it = inst.item(id)?;
        if it.value > 0.0 {
            rows.push((id, it.weight, it.value));
        }
    }
    let n = rows.len();
    let budget_row = n;
    let row_of: BTreeMap<ItemId, usize> = rows.iter().enumerate().map(|(r, e)| (e.0, r)).collect();
    let vmax = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let tol = FLOAT_TOL * vmax.max(1.0);

    let mut b = vec![1.0; n + 1];
    b[budget_row] = lp.ell;
    let mut sx = Simplex::new(b);
    let mut basis = Vec::with_capacity(n + 1);
    for r in 0..n {
        basis.push(sx.add_column(vec![(r, 1.0)], 0.0, None));
    }
    let mut pool: Vec<Configuration> = Vec::new();
    let mut col_of_config: Vec<usize> = Vec::new();
    let mut seen: HashSet<Configuration> = HashSet::new();
    let empty_col = sx.add_column(vec![(budget_row, 1.0)], 0.0, None);
    pool.push(Configuration::empty());
    col_of_config.push(empty_col);
    seen.insert(Configuration::empty());
    basis.push(empty_col);
    for (r, &(id, _, v)) in rows.iter().enumerate() {
        let c = Configuration::singleton(id);
        let j = sx.add_column(vec![(r, 1.0), (budget_row, 1.0)], v, None);
        seen.insert(c.clone());
        pool.push(c);
        col_of_config.push(j);
    }
    sx.set_basis(basis)?;

    let pivot_cap = 200_000 + 100 * n;
    let mut best_bound = f64::INFINITY;
    let mut generated = 0usize;
    loop {
        sx.optimize(PivotRule::Dantzig, pivot_cap)?;
        let master = sx.objective();
        let y = sx.duals();
        let mu = y[budget_row];
        let profits: Vec<f64> = rows
            .iter()
            .enumerate()
            .map(|(r, e)| (e.2 - y[r]).max(0.0))
            .collect();

        let greedy = greedy_column(&rows, &profits, k);
        let mut column: Option<Configuration> = None;
        if greedy.1 - mu > tol && !seen.contains(&greedy.0) {
            column = Some(greedy.0);
        } else {
            let cheap = cheap_bound(&rows, &profits, k);
            let bound = master + lp.ell * (cheap - mu).max(0.0);
            best_bound = best_bound.min(bound);
            if master >= (1.0 - eps) * best_bound - tol {
                return finish(lp, &sx, &pool, &col_of_config, &row_of, best_bound, eps, tol);
            }
            let problem = PricingProblem::new(
                rows.iter()
                    .zip(&profits)
                    .filter(|(_, &p)| p > tol)
                    .map(|(e, &p)| Candidate {
                        id: e.0,
                        weight: e.1,
                        profit: p,
                    })
                    .collect(),
                k,
            );
            // a coarse FPTAS pass usually finds an improving column; the
            // accurate oracle only runs when a certificate is needed
            let fine = eps / 2.0;
            let coarse = fine.max(COARSE_PRICING_EPS);
            let mut passes = vec![coarse];
            if coarse > fine || problem.useful_count() <= knapsack::EXACT_CAP {
                passes.push(fine);
            }
            for (pass, &acc) in passes.iter().enumerate() {
                let (pick, factor) = if pass + 1 == passes.len() {
                    knapsack::solve_best(&problem, acc)?
                } else {
                    (knapsack::solve_fptas(&problem, acc)?, 1.0 / (1.0 - acc))
                };
                let bound = master + lp.ell * (pick.profit * factor - mu).max(0.0);
                best_bound = best_bound.min(bound);
                if pick.profit - mu > tol && !seen.contains(&pick.config) {
                    column = Some(pick.config);
                    break;
                }
                if master >= (1.0 - eps) * best_bound - tol {
                    break;
                }
            }
            if column.is_none() || master >= (1.0 - eps) * best_bound - tol {
                return finish(lp, &sx, &pool, &col_of_config, &row_of, best_bound, eps, tol);
            }
        }
        let c = column.unwrap();
        if generated >= opts.max_columns {
            let best = finish(lp, &sx, &pool, &col_of_config, &row_of, best_bound, eps, tol)?;
            return Err(Error::Convergence {
                columns: generated,
                best: Box::new(best),
            });
        }
        let value: f64 = c.iter().map(|id| rows[row_of[id]].2).sum();
        let mut entries: Vec<(usize, f64)> = c.iter().map(|id| (row_of[id], 1.0)).collect();
        entries.push((budget_row, 1.0));
        let j = sx.add_column(entries, value, None);
        seen.insert(c.clone());
        pool.push(c);
        col_of_config.push(j);
        generated += 1;
    }
}

/// Greedy fill by profit per adjusted weight `w + 1/k`.
fn greedy_column(rows: &[(ItemId, f64, f64)], profits: &[f64], k: usize) -> (Configuration, f64) {
    let mut order: Vec<usize> = (0..rows.len()).filter(|&r| profits[r] > 0.0).collect();
    let adj = 1.0 / k as f64;
    order.sort_by(|&a, &b| {
        let da = profits[a] / (rows[a].1 + adj);
        let db = profits[b] / (rows[b].1 + adj);
        db.partial_cmp(&da).unwrap().then(a.cmp(&b))
    });
    let mut weight = 0.0;
    let mut picked = Vec::new();
    let mut profit = 0.0;
    for r in order {
        if picked.len() == k {
            break;
        }
        if weight + rows[r].1 <= 1.0 + 0.5 * FLOAT_TOL {
            weight += rows[r].1;
            profit += profits[r];
            picked.push(rows[r].0);
        }
    }
    (Configuration::new(picked), profit)
}

/// Upper bound on the best column profit: the smaller of the top `k` profits
/// and the fractional knapsack relaxation.
fn cheap_bound(rows: &[(ItemId, f64, f64)], profits: &[f64], k: usize) -> f64 {
    let mut ps: Vec<f64> = profits.iter().copied().filter(|&p| p > 0.0).collect();
    ps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top: f64 = ps.iter().take(k).sum();
    let mut order: Vec<usize> = (0..rows.len()).filter(|&r| profits[r] > 0.0).collect();
    order.sort_by(|&a, &b| {
        (profits[b] * rows[a].1)
            .partial_cmp(&(profits[a] * rows[b].1))
            .unwrap()
    });
    let mut room = 1.0;
    let mut frac = 0.0;
    for r in order {
        let w = rows[r].1;
        if w <= room {
            room -= w;
            frac += profits[r];
        } else {
            frac += profits[r] * room / w;
            break;
        }
    }
    top.min(frac)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    lp: &LpProblem,
    sx: &Simplex<f64>,
    pool: &[Configuration],
    col_of_config: &[usize],
    row_of: &BTreeMap<ItemId, usize>,
    bound: f64,
    eps: f64,
    tol: f64,
) -> Result<LpSolution> {
    let mut fractional = FractionalSolution::new();
    for (c, &j) in pool.iter().zip(col_of_config) {
        let x = sx.value(j);
        if x > 1e-12 {
            fractional.add(c.clone(), x);
        }
    }
    // pivoting round-off can push a cover a hair above 1; shrink the support
    // and hand the freed mass to the empty configuration
    let peak = fractional.cover().entries.values().fold(0.0, |a: f64, &v| a.max(v));
    if peak > 1.0 {
        if peak > 1.0 + 1e-6 {
            return Err(Error::internal(format!("master solution covers an item {peak} times")));
        }
        let empty = Configuration::empty();
        let mut freed = 0.0;
        for (c, w) in fractional.weights.iter_mut() {
            if *c != empty {
                freed += *w - *w / peak;
                *w /= peak;
            }
        }
        *fractional.weights.entry(empty).or_insert(0.0) += freed;
    }
    // scale away round-off in the budget row
    let size = fractional.size();
    if size > 0.0 && (size - lp.ell).abs() > 1e-12 {
        let empty = Configuration::empty();
        let adjust = lp.ell - size;
        let cur = fractional.get(&empty);
        if cur + adjust >= 0.0 {
            fractional.weights.insert(empty, cur + adjust);
            fractional.weights.retain(|_, w| *w > 0.0);
        }
    }
    let objective = fractional.value(lp.instance)?;
    let y = sx.duals();
    let duals = lp
        .allowed
        .iter()
        .map(|id| (*id, row_of.get(id).map_or(0.0, |&r| y[r])))
        .collect();
    let upper_bound = bound.max(objective);
    let status = if upper_bound <= objective + tol {
        SolveStatus::Optimal
    } else {
        SolveStatus::Approx { eps }
    };
    let out = LpSolution {
        fractional,
        objective,
        upper_bound,
        duals,
        budget_dual: y[row_of.len()],
        status,
        columns: pool.len(),
    };
    out.check(lp)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Item;
    use proptest::prelude::*;

    fn cfg(ids: &[u32]) -> Configuration {
        ids.iter().map(|&i| ItemId(i)).collect()
    }

    #[test]
    fn exact_small_examples() {
        let inst = Instance::new(vec![Item::new(1, 1.0, 10.0), Item::new(2, 1.0, 6.0)], 1, 1).unwrap();
        let s = solve_exact_small(&LpProblem::full(&inst)).unwrap();
        assert!((s.objective - 10.0).abs() < 1e-9);
        assert!((s.fractional.get(&cfg(&[1])) - 1.0).abs() < 1e-9);

        let inst = Instance::new(vec![Item::new(0, 0.5, 1.0)], 3, 2).unwrap();
        let lp = LpProblem::new(&inst, BTreeSet::new(), 3.0).unwrap();
        let s = solve_exact_small(&lp).unwrap();
        assert_eq!(s.objective, 0.0);
        assert!((s.fractional.get(&Configuration::empty()) - 3.0).abs() < 1e-9);

        let inst = Instance::new(vec![Item::new(0, 0.5, 7.0)], 2, 1).unwrap();
        let s = solve_exact_small(&LpProblem::full(&inst)).unwrap();
        assert!((s.objective - 7.0).abs() < 1e-9);
        assert!((s.fractional.get(&cfg(&[0])) - 1.0).abs() < 1e-9);
        assert!((s.fractional.get(&Configuration::empty()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_small_limit() {
        let items = (0..15).map(|i| Item::new(i, 0.5, 1.0)).collect();
        let inst = Instance::new(items, 2, 2).unwrap();
        assert!(matches!(
            solve_exact_small(&LpProblem::full(&inst)),
            Err(Error::Capacity { size: 15, .. })
        ));
    }

    #[test]
    fn column_generation_examples() {
        let inst = Instance::new(vec![Item::new(0, 0.5, 1.0)], 3, 2).unwrap();
        let lp = LpProblem::new(&inst, BTreeSet::new(), 3.0).unwrap();
        assert_eq!(solve_column_generation(&lp, 0.1).unwrap().objective, 0.0);

        let items: Vec<Item> = (0..6).map(|i| Item::new(i, 0.3 + 0.1 * i as f64, 1.0 + i as f64)).collect();
        let inst = Instance::new(items, 6, 2).unwrap();
        let s = solve_column_generation(&LpProblem::full(&inst), 0.05).unwrap();
        assert!((s.objective - inst.total_value()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_problems() {
        let inst = Instance::new(vec![Item::new(0, 0.5, 1.0)], 1, 1).unwrap();
        assert!(LpProblem::new(&inst, BTreeSet::new(), 0.0).is_err());
        assert!(matches!(
            LpProblem::new(&inst, [ItemId(9)].into_iter().collect(), 1.0),
            Err(Error::UnknownItem(ItemId(9)))
        ));
        assert!(solve_column_generation(&LpProblem::full(&inst), 0.0).is_err());
    }

    #[test]
    fn column_cap_returns_best_so_far() {
        let items: Vec<Item> = (0..12).map(|i| Item::new(i, 0.1 + 0.05 * i as f64, 1.0 + (i % 5) as f64)).collect();
        let inst = Instance::new(items, 3, 3).unwrap();
        let lp = LpProblem::full(&inst);
        match solve_column_generation_with(&lp, 0.001, &CgOptions { max_columns: 0 }) {
            Err(Error::Convergence { columns, best }) => {
                assert_eq!(columns, 0);
                best.check(&lp).unwrap();
            }
            Ok(s) => assert!(s.columns >= 12),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    fn small_instance() -> impl Strategy<Value = Instance> {
        (
            prop::collection::vec((0.05f64..=1.0, 0.0f64..1.0), 0..=9),
            1usize..4,
            1usize..4,
        )
            .prop_map(|(items, m, k)| {
                let items = items
                    .into_iter()
                    .enumerate()
                    .map(|(i, (w, v))| Item::new(i as u32, w, v))
                    .collect();
                Instance::new(items, m, k).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn column_generation_sandwich(inst in small_instance(), eps in 0.01f64..0.5) {
            let lp = LpProblem::full(&inst);
            let exact = solve_exact_small(&lp).unwrap();
            let cg = solve_column_generation(&lp, eps).unwrap();
            prop_assert!(cg.objective >= (1.0 - eps) * exact.objective - 1e-9);
            prop_assert!(cg.objective <= exact.objective + 1e-6);
            prop_assert!(cg.upper_bound >= exact.objective - 1e-6);
            cg.check(&lp).unwrap();
        }
    }
}
