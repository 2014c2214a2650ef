//! Iterative randomized rounding and the one-shot baseline.
//!
//! Iteration `j` solves `LP(S_{j-1}, m_j)`, draws `q_j` configurations
//! independently from the fractional solution and removes the sampled items
//! from the pool. One-shot rounding draws all `m` bins from a single solve of
//! `LP(I, m)`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config_lp::{self, LpProblem, LpSolution};
use crate::error::{Error, Result};
use crate::model::{Configuration, FractionalSolution, Instance, ItemId, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Requires `1/ε`, `ε·m` and `ε^{-1/2}` to be integers.
    Paper,
    /// Any `ε`: `q_j = ⌊ε·m⌋` and the last iteration takes the remainder.
    Practical,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "practical" => Ok(Mode::Practical),
            other => Err(Error::input(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundingParams {
    pub eps: f64,
    pub seed: u64,
    /// Accuracy of the inner LP solves; `None` means `min(eps, 0.5)`.
    pub lp_eps: Option<f64>,
    pub mode: Mode,
}

impl RoundingParams {
    pub fn new(eps: f64, seed: u64) -> Self {
        RoundingParams {
            eps,
            seed,
            lp_eps: None,
            mode: Mode::Practical,
        }
    }

    pub fn lp_accuracy(&self) -> f64 {
        self.lp_eps.unwrap_or(self.eps.min(0.5))
    }

    /// Bin counts `q_1, …, q_J` drawn per iteration; they sum to `m`.
    pub fn schedule(&self, m: usize) -> Result<Vec<usize>> {
        let eps = self.eps;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::input(format!("epsilon {eps} not in (0,1]")));
        }
        let lp_eps = self.lp_accuracy();
        if !(lp_eps > 0.0 && lp_eps < 1.0) {
            return Err(Error::input(format!("LP accuracy {lp_eps} not in (0,1)")));
        }
        match self.mode {
            Mode::Paper => {
                let inv = integral(1.0 / eps).ok_or_else(|| Error::input("paper mode needs 1/epsilon integral"))?;
                let q = integral(eps * m as f64).ok_or_else(|| Error::input("paper mode needs epsilon*m integral"))?;
                integral(1.0 / eps.sqrt())
                    .ok_or_else(|| Error::input("paper mode needs epsilon^(-1/2) integral"))?;
                if q == 0 {
                    return Err(Error::input("paper mode needs epsilon*m >= 1"));
                }
                Ok(vec![q; inv])
            }
            Mode::Practical => {
                let base = ((eps * m as f64 + 1e-9).floor() as usize).max(1);
                let rounds = ((1.0 / eps + 1e-9).floor() as usize).max(1).min(m.div_ceil(base));
                let mut q = vec![base; rounds];
                q[rounds - 1] = m - base * (rounds - 1);
                Ok(q)
            }
        }
    }
}

fn integral(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() < 1e-9 && r >= 0.0).then_some(r as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub j: usize,
    pub m_j: usize,
    pub lp_value: f64,
    pub lp_upper_bound: f64,
    pub q: usize,
    pub value_gained: f64,
    /// `lp_value / (m_j / m)`, which equals `v(x^j) / (1 - (j-1)ε)` in paper mode.
    pub ratio: f64,
    /// `m_{j+1} / m_j`, the survival bound `(1 - jε) / (1 - (j-1)ε)` in paper mode.
    pub survival_bound: f64,
    /// `Q_j = S_{j-1} \ S_j`.
    pub removed: Vec<ItemId>,
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingOutcome {
    pub solution: Solution,
    pub value: f64,
    pub trace: Vec<IterationRecord>,
}

/// Draws `C` with probability `x_C / ||x||` (inverse CDF over the sorted support).
pub fn sample_configuration<R: Rng>(x: &FractionalSolution, rng: &mut R) -> Result<Configuration> {
    let total = x.size();
    if !(total > 0.0) {
        return Err(Error::input("cannot sample from a fractional solution of size 0"));
    }
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (c, &w) in x.iter() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(c);
        if r < acc {
            return Ok(c.clone());
        }
    }
    Ok(last.expect("positive size implies a positive weight").clone())
}

/// Generator for draw `b` of iteration `j`.
fn draw_rng(seed: u64, j: usize, b: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((j as u64) << 32) | b as u64);
    rng
}

/// Column generation that degrades to the best master solution when the
/// column cap is hit.
fn solve_lp(lp: &LpProblem, eps: f64) -> Result<LpSolution> {
    match config_lp::solve_column_generation(lp, eps) {
        Err(Error::Convergence { best, columns }) => {
            log::warn!("column generation stopped at {columns} columns; using best master");
            Ok(*best)
        }
        other => other,
    }
}

pub fn iterative_rounding(inst: &Instance, p: &RoundingParams) -> Result<RoundingOutcome> {
    iterative_rounding_with(inst, p, None)
}

/// As [`iterative_rounding`], optionally reusing a solve of `LP(I, m)` at the
/// same accuracy for the first iteration (it does not depend on the seed).
pub fn iterative_rounding_with(
    inst: &Instance,
    p: &RoundingParams,
    first: Option<&LpSolution>,
) -> Result<RoundingOutcome> {
    let m = inst.m();
    let schedule = p.schedule(m)?;
    let lp_eps = p.lp_accuracy();
    let mut remaining: BTreeSet<ItemId> = inst.ids().collect();
    let mut bins = Vec::with_capacity(m);
    let mut trace = Vec::with_capacity(schedule.len());
    let mut placed = 0usize;
    let mut total = 0.0;
    for (idx, &q) in schedule.iter().enumerate() {
        let j = idx + 1;
        let m_j = m - placed;
        let lp = LpProblem::new(inst, remaining.clone(), m_j as f64)?;
        let owned;
        let sol = match first {
            Some(s) if j == 1 => s,
            _ => {
                owned = solve_lp(&lp, lp_eps)?;
                &owned
            }
        };
        let mut removed = BTreeSet::new();
        for b in 0..q {
            let c = sample_configuration(&sol.fractional, &mut draw_rng(p.seed, j, b))?;
            if !c.iter().all(|id| remaining.contains(id)) {
                return Err(Error::internal("sampled configuration uses a removed item"));
            }
            removed.extend(c.iter().copied());
            bins.push(c);
        }
        for id in &removed {
            remaining.remove(id);
        }
        let gained = removed.iter().map(|&id| inst.value(id)).sum::<Result<f64>>()?;
        total += gained;
        placed += q;
        trace.push(IterationRecord {
            j,
            m_j,
            lp_value: sol.objective,
            lp_upper_bound: sol.upper_bound,
            q,
            value_gained: gained,
            ratio: sol.objective / (m_j as f64 / m as f64),
            survival_bound: (m_j - q) as f64 / m_j as f64,
            removed: removed.into_iter().collect(),
            remaining: remaining.len(),
        });
    }
    let solution = Solution::new(bins);
    inst.validate_solution(&solution)
        .map_err(|e| Error::internal(format!("rounding produced an invalid solution: {e}")))?;
    Ok(RoundingOutcome {
        solution,
        value: total,
        trace,
    })
}

pub fn oneshot_rounding(inst: &Instance, p: &RoundingParams) -> Result<RoundingOutcome> {
    p.schedule(inst.m())?;
    let lp = solve_lp(&LpProblem::full(inst), p.lp_accuracy())?;
    oneshot_from_lp(inst, &lp, p.seed)
}

/// Samples `m` bins independently from a solution of `LP(I, m)`.
pub fn oneshot_from_lp(inst: &Instance, lp: &LpSolution, seed: u64) -> Result<RoundingOutcome> {
    let m = inst.m();
    let bins: Vec<Configuration> = (0..m)
        .map(|b| sample_configuration(&lp.fractional, &mut draw_rng(seed, 0, b)))
        .collect::<Result<_>>()?;
    let solution = Solution::new(bins);
    let value = inst.solution_value(&solution)?;
    let removed: Vec<ItemId> = solution.packed_items().into_iter().collect();
    let trace = vec![IterationRecord {
        j: 1,
        m_j: m,
        lp_value: lp.objective,
        lp_upper_bound: lp.upper_bound,
        q: m,
        value_gained: value,
        ratio: lp.objective,
        survival_bound: 0.0,
        remaining: inst.len() - removed.len(),
        removed,
    }];
    Ok(RoundingOutcome {
        solution,
        value,
        trace,
    })
}
