//! Exact CMK optimum for tiny instances.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{Configuration, Instance, ItemId, Solution};
use crate::scalar::FLOAT_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub max_items: usize,
    pub max_bins: usize,
    pub timeout: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_items: 10,
            max_bins: 3,
            timeout: Some(Duration::from_secs(60)),
        }
    }
}

struct Node {
    id: ItemId,
    weight: f64,
    value: f64,
}

struct Search<'a> {
    items: &'a [Node],
    by_density: Vec<usize>,
    m: usize,
    k: usize,
    load: Vec<f64>,
    count: Vec<usize>,
    assign: Vec<Option<usize>>,
    best_value: f64,
    best_assign: Vec<Option<usize>>,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    /// Aggregate relaxations over items `from..`, with the open capacity and
    /// slots of all bins pooled: fractional knapsack on capacity alone, and
    /// the best values on slots alone. Each bounds the completion.
    fn bound(&self, from: usize) -> f64 {
        let room: f64 = self.load.iter().map(|l| (1.0 - l).max(0.0)).sum::<f64>() + FLOAT_TOL;
        let slots: usize = self.count.iter().map(|c| self.k - c).sum();
        let mut left = room;
        let mut total = 0.0;
        for &i in &self.by_density {
            if i < from {
                continue;
            }
            let it = &self.items[i];
            if it.weight <= left {
                left -= it.weight;
                total += it.value;
            } else {
                total += it.value * left / it.weight;
                break;
            }
        }
        // items are sorted by value, so the next `slots` values also bound
        let top: f64 = self.items[from..].iter().take(slots).map(|it| it.value).sum();
        total.min(top)
    }

    fn dfs(&mut self, idx: usize, value: f64, opened: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                    return;
                }
            }
        }
        if value > self.best_value + FLOAT_TOL {
            self.best_value = value;
            self.best_assign = self.assign.clone();
        }
        if idx == self.items.len() {
            return;
        }
        if value + self.bound(idx) <= self.best_value + FLOAT_TOL {
            return;
        }
        let (w, v) = (self.items[idx].weight, self.items[idx].value);
        // bins are opened in index order, so at most one empty bin is tried
        let limit = (opened + 1).min(self.m);
        for b in 0..limit {
            if self.count[b] < self.k && self.load[b] + w <= 1.0 + FLOAT_TOL {
                self.load[b] += w;
                self.count[b] += 1;
                self.assign[idx] = Some(b);
                self.dfs(idx + 1, value + v, opened.max(b + 1));
                self.assign[idx] = None;
                self.count[b] -= 1;
                self.load[b] -= w;
            }
        }
        self.dfs(idx + 1, value, opened);
    }
}

/// Branch and bound over item-to-bin assignments (or leaving an item out).
pub fn solve_exact_cmk(inst: &Instance, lim: &OracleLimits) -> Result<(Solution, f64)> {
    if inst.len() > lim.max_items {
        return Err(Error::Capacity {
            what: "items for the exact oracle",
            size: inst.len(),
            limit: lim.max_items,
            hint: "",
        });
    }
    if inst.m() > lim.max_bins {
        return Err(Error::Capacity {
            what: "bins for the exact oracle",
            size: inst.m(),
            limit: lim.max_bins,
            hint: "",
        });
    }
    let mut items: Vec<Node> = inst
        .items()
        .iter()
        .filter(|it| it.value > 0.0)
        .map(|it| Node {
            id: it.id,
            weight: it.weight,
            value: it.value,
        })
        .collect();
    items.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap().then(a.id.cmp(&b.id)));
    let mut by_density: Vec<usize> = (0..items.len()).collect();
    by_density.sort_by(|&a, &b| {
        (items[b].value * items[a].weight)
            .partial_cmp(&(items[a].value * items[b].weight))
            .unwrap()
            .then(a.cmp(&b))
    });
    let n = items.len();
    let mut search = Search {
        items: &items,
        by_density,
        m: inst.m(),
        k: inst.k(),
        load: vec![0.0; inst.m()],
        count: vec![0; inst.m()],
        assign: vec![None; n],
        best_value: 0.0,
        best_assign: vec![None; n],
        deadline: lim.timeout.map(|t| Instant::now() + t),
        nodes: 0,
        timed_out: false,
    };
    let started = Instant::now();
    search.dfs(0, 0.0, 0);
    if search.timed_out {
        return Err(Error::Timeout {
            elapsed_ms: started.elapsed().as_millis(),
            best_value: search.best_value,
        });
    }
    let mut bins = vec![Vec::new(); inst.m()];
    for (i, a) in search.best_assign.iter().enumerate() {
        if let Some(b) = a {
            bins[*b].push(items[i].id);
        }
    }
    let solution = Solution::new(bins.into_iter().map(Configuration::new).collect());
    let value = inst.solution_value(&solution)?;
    Ok((solution, value))
}
