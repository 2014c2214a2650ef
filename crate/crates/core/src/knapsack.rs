//! Single-bin oracle: pick at most `k` items of total weight at most the
//! capacity, maximizing a nonnegative profit.

use crate::error::{Error, Result};
use crate::model::{Configuration, ItemId};
use crate::scalar::{Scalar, FLOAT_TOL};

/// Default size limit for [`solve_exact`].
pub const EXACT_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T = f64> {
    pub id: ItemId,
    pub weight: f64,
    pub profit: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingProblem<T = f64> {
    pub candidates: Vec<Candidate<T>>,
    pub capacity: f64,
    pub cardinality: usize,
}

impl<T: Scalar> PricingProblem<T> {
    pub fn new(candidates: Vec<Candidate<T>>, cardinality: usize) -> Self {
        PricingProblem {
            candidates,
            capacity: 1.0,
            cardinality,
        }
    }

    fn check(&self) -> Result<()> {
        if self.cardinality == 0 {
            return Err(Error::input("cardinality bound must be at least 1"));
        }
        for c in &self.candidates {
            if c.profit.is_neg() {
                return Err(Error::input(format!("item {} has negative profit", c.id)));
            }
            if !(c.weight >= 0.0 && c.weight <= 1.0) {
                return Err(Error::input(format!("item {} has weight outside [0,1]", c.id)));
            }
        }
        Ok(())
    }

    /// Candidates that can appear in an optimal answer: positive profit and
    /// fitting alone. Sorted by id.
    fn useful(&self) -> Vec<Candidate<T>> {
        let mut out: Vec<Candidate<T>> = self
            .candidates
            .iter()
            .filter(|c| c.profit.is_pos() && c.weight <= self.capacity + FLOAT_TOL)
            .cloned()
            .collect();
        out.sort_by_key(|c| c.id);
        out
    }

    /// Number of candidates the exact oracle would branch over.
    pub fn useful_count(&self) -> usize {
        self.candidates
            .iter()
            .filter(|c| c.profit.is_pos() && c.weight <= self.capacity + FLOAT_TOL)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pick<T = f64> {
    pub config: Configuration,
    pub profit: T,
    pub weight: f64,
}

impl<T: Scalar> Pick<T> {
    fn empty() -> Self {
        Pick {
            config: Configuration::empty(),
            profit: T::zero(),
            weight: 0.0,
        }
    }
}

/// Exact oracle with the default cap of [`EXACT_CAP`] useful candidates.
pub fn solve_exact<T: Scalar>(p: &PricingProblem<T>) -> Result<Pick<T>> {
    solve_exact_capped(p, EXACT_CAP)
}

/// Branch and bound over items in id order, include branch first. A new
/// incumbent must be strictly better, so among optimal sets the
/// lexicographically smallest id list wins.
pub fn solve_exact_capped<T: Scalar>(p: &PricingProblem<T>, cap: usize) -> Result<Pick<T>> {
    p.check()?;
    let items = p.useful();
    if items.len() > cap {
        return Err(Error::Capacity {
            what: "exact single-bin oracle candidates",
            size: items.len(),
            limit: cap,
            hint: "; use solve_fptas for larger problems",
        });
    }
    if items.is_empty() {
        return Ok(Pick::empty());
    }
    let n = items.len();
    let mut by_profit: Vec<usize> = (0..n).collect();
    by_profit.sort_by(|&a, &b| {
        items[b]
            .profit
            .partial_cmp(&items[a].profit)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut by_density: Vec<usize> = (0..n).collect();
    by_density.sort_by(|&a, &b| {
        // profit_a / w_a > profit_b / w_b  <=>  profit_a * w_b > profit_b * w_a
        let lhs = items[a].profit.to_f64() * items[b].weight;
        let rhs = items[b].profit.to_f64() * items[a].weight;
        rhs.partial_cmp(&lhs).unwrap().then(a.cmp(&b))
    });

    let mut search = Search {
        items: &items,
        by_profit,
        by_density,
        capacity: p.capacity + FLOAT_TOL,
        k: p.cardinality,
        chosen: Vec::with_capacity(n),
        best: Pick::empty(),
        best_set: Vec::new(),
    };
    search.dfs(0, T::zero(), 0.0);
    let Search { best, best_set, .. } = search;
    let config: Configuration = best_set.iter().map(|&i| items[i].id).collect();
    let weight = best_set.iter().map(|&i| items[i].weight).sum();
    Ok(Pick {
        config,
        profit: best.profit,
        weight,
    })
}

struct Search<'a, T> {
    items: &'a [Candidate<T>],
    by_profit: Vec<usize>,
    by_density: Vec<usize>,
    capacity: f64,
    k: usize,
    chosen: Vec<usize>,
    best: Pick<T>,
    best_set: Vec<usize>,
}

impl<T: Scalar> Search<'_, T> {
    /// Upper bound on the profit obtainable from items `from..` with the
    /// given residual capacity and count: the smaller of the best `count`
    /// profits and a greedy fill by density that takes the first
    /// non-fitting item whole.
    fn bound(&self, from: usize, room: f64, count: usize) -> T {
        let mut top = T::zero();
        let mut taken = 0;
        for &i in &self.by_profit {
            if taken == count {
                break;
            }
            if i >= from && self.items[i].weight <= room {
                top = top + self.items[i].profit.clone();
                taken += 1;
            }
        }
        let mut fill = T::zero();
        let mut left = room;
        for &i in &self.by_density {
            if i < from || self.items[i].weight > room {
                continue;
            }
            fill = fill + self.items[i].profit.clone();
            if self.items[i].weight > left {
                break;
            }
            left -= self.items[i].weight;
        }
        T::min_of(top, fill)
    }

    fn dfs(&mut self, idx: usize, profit: T, weight: f64) {
        if profit.clone() - self.best.profit.clone() > T::eps() {
            self.best.profit = profit.clone();
            self.best_set = self.chosen.clone();
        }
        if idx == self.items.len() || self.chosen.len() == self.k {
            return;
        }
        let room = self.capacity - weight;
        let ub = profit.clone() + self.bound(idx, room, self.k - self.chosen.len());
        if ub - self.best.profit.clone() <= T::eps() {
            return;
        }
        let it = &self.items[idx];
        if it.weight <= room {
            let (w, pr) = (it.weight, it.profit.clone());
            self.chosen.push(idx);
            self.dfs(idx + 1, profit.clone() + pr, weight + w);
            self.chosen.pop();
        }
        self.dfs(idx + 1, profit, weight);
    }
}

/// Profit-scaled dynamic program: `dp[c][q]` is the least weight of a set of
/// `c` items whose scaled profit is `q`. Profits are scaled by
/// `eps * P_max / min(n, k)`; every feasible set has at most `min(n, k)`
/// items, so the rounding loss stays below `eps * P_max <= eps * OPT`.
pub fn solve_fptas(p: &PricingProblem<f64>, eps: f64) -> Result<Pick<f64>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input(format!("FPTAS accuracy {eps} not in (0,1)")));
    }
    p.check()?;
    let items = p.useful();
    if items.is_empty() {
        return Ok(Pick::empty());
    }
    let n = items.len();
    let pmax = items.iter().map(|c| c.profit).fold(0.0, f64::max);

    // the count dimension never needs to exceed what the lightest items allow
    let mut weights: Vec<f64> = items.iter().map(|c| c.weight).collect();
    weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let limit = p.capacity + 0.5 * FLOAT_TOL;
    let mut fit = 0;
    let mut acc = 0.0;
    for w in &weights {
        if acc + w > limit {
            break;
        }
        acc += w;
        fit += 1;
    }
    let kk = p.cardinality.min(n).min(fit.max(1));

    let scale = eps * pmax / kk as f64;
    let scaled: Vec<usize> = items.iter().map(|c| (c.profit / scale).floor() as usize).collect();
    let mut by_scaled = scaled.clone();
    by_scaled.sort_unstable_by(|a, b| b.cmp(a));
    let qmax: usize = by_scaled.iter().take(kk).sum();

    let width = qmax + 1;
    let states = (kk + 1) * width;
    let mut dp = vec![f64::INFINITY; states];
    dp[0] = 0.0;
    // choice bits: item i improved state (c, q)
    let mut choice = vec![0u64; (n * states).div_ceil(64)];
    let mut reach = 0usize;
    for (i, it) in items.iter().enumerate() {
        let s = scaled[i];
        reach = (reach + s).min(qmax);
        for c in (1..=kk).rev() {
            for q in (s..=reach).rev() {
                let prev = dp[(c - 1) * width + q - s];
                if prev.is_finite() {
                    let cand = prev + it.weight;
                    let cell = c * width + q;
                    if cand <= limit && cand < dp[cell] {
                        dp[cell] = cand;
                        let bit = i * states + cell;
                        choice[bit / 64] |= 1 << (bit % 64);
                    }
                }
            }
        }
    }

    let mut best: Option<(usize, usize)> = None;
    for q in (0..width).rev() {
        if let Some(c) = (0..=kk).find(|&c| dp[c * width + q].is_finite()) {
            best = Some((c, q));
            break;
        }
    }
    let (mut c, mut q) = best.expect("empty set is always reachable");
    let mut chosen = Vec::with_capacity(c);
    for i in (0..n).rev() {
        if c == 0 {
            break;
        }
        let bit = i * states + c * width + q;
        if choice[bit / 64] >> (bit % 64) & 1 == 1 {
            chosen.push(i);
            c -= 1;
            q -= scaled[i];
        }
    }
    let config: Configuration = chosen.iter().map(|&i| items[i].id).collect();
    let profit = chosen.iter().map(|&i| items[i].profit).sum();
    let weight = chosen.iter().map(|&i| items[i].weight).sum();
    let fptas = Pick { config, profit, weight };

    // the best single item is a cheap safeguard against rounding the leader away
    let lead = items
        .iter()
        .max_by(|a, b| a.profit.partial_cmp(&b.profit).unwrap().then(b.id.cmp(&a.id)))
        .unwrap();
    if lead.profit > fptas.profit {
        return Ok(Pick {
            config: Configuration::singleton(lead.id),
            profit: lead.profit,
            weight: lead.weight,
        });
    }
    Ok(fptas)
}

/// Exact oracle when the useful candidates fit under [`EXACT_CAP`], FPTAS
/// otherwise. Returns the pick and a factor `f` with `OPT <= profit * f`.
pub fn solve_best(p: &PricingProblem<f64>, eps: f64) -> Result<(Pick<f64>, f64)> {
    if p.useful_count() <= EXACT_CAP {
        Ok((solve_exact(p)?, 1.0))
    } else {
        Ok((solve_fptas(p, eps)?, 1.0 / (1.0 - eps)))
    }
}
