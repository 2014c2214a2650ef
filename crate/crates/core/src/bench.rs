//! Single runs with LP-normalized reports, and suites of runs.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config_lp::{solve_column_generation, LpProblem, LpSolution};
use crate::constant_bins::{constant_bins, dispatch, local_search, Branch, DispatchParams, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exact::{solve_exact_cmk, OracleLimits};
use crate::generate::{generate, GeneratorSpec};
use crate::model::{Instance, Solution};
use crate::rounding::{iterative_rounding_with, oneshot_from_lp, IterationRecord, Mode, RoundingParams};

/// Accuracy of the LP solve behind every report's upper bound.
pub const BOUND_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Iterative,
    Oneshot,
    ConstantBins,
    LocalSearch,
    Exact,
    Dispatch,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Iterative,
        Algorithm::Oneshot,
        Algorithm::ConstantBins,
        Algorithm::LocalSearch,
        Algorithm::Exact,
        Algorithm::Dispatch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Iterative => "iterative",
            Algorithm::Oneshot => "oneshot",
            Algorithm::ConstantBins => "constant-bins",
            Algorithm::LocalSearch => "local-search",
            Algorithm::Exact => "exact",
            Algorithm::Dispatch => "dispatch",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::input(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub epsilon: f64,
    pub seed: u64,
    pub mode: Mode,
    pub budget: u128,
    pub m_switch: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            epsilon: 0.2,
            seed: 0,
            mode: Mode::Practical,
            budget: DEFAULT_BUDGET,
            m_switch: crate::constant_bins::dispatch::DEFAULT_M_SWITCH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance_digest: String,
    pub algorithm: Algorithm,
    pub params: RunParams,
    pub value: f64,
    pub lp_upper_bound: f64,
    pub ratio: f64,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<IterationRecord>>,
    pub solution: Solution,
}

/// SHA-256 of the canonical instance JSON.
pub fn instance_digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(inst.to_json().as_bytes()))
}

/// Solutions of `LP(I, m)` for one instance, keyed by accuracy.
#[derive(Debug, Default)]
pub struct LpCache {
    solved: HashMap<u64, LpSolution>,
}

impl LpCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, inst: &Instance, eps: f64) -> Result<&LpSolution> {
        match self.solved.entry(eps.to_bits()) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => {
                let sol = match solve_column_generation(&LpProblem::full(inst), eps) {
                    Err(Error::Convergence { best, .. }) => *best,
                    other => other?,
                };
                Ok(e.insert(sol))
            }
        }
    }
}

pub fn run(inst: &Instance, algo: Algorithm, params: &RunParams) -> Result<RunReport> {
    run_cached(inst, algo, params, &mut LpCache::new())
}

/// Runs `algo`, validates its solution and normalizes by the LP bound.
pub fn run_cached(inst: &Instance, algo: Algorithm, params: &RunParams, cache: &mut LpCache) -> Result<RunReport> {
    let upper = cache.get(inst, BOUND_EPS)?.upper_bound;
    let rp = RoundingParams {
        eps: params.epsilon,
        seed: params.seed,
        lp_eps: None,
        mode: params.mode,
    };
    let started = Instant::now();
    let mut branch = None;
    let mut trace = None;
    let solution = match algo {
        Algorithm::Iterative => {
            rp.schedule(inst.m())?;
            let first = cache.get(inst, rp.lp_accuracy())?.clone();
            let out = iterative_rounding_with(inst, &rp, Some(&first))?;
            trace = Some(out.trace);
            out.solution
        }
        Algorithm::Oneshot => {
            rp.schedule(inst.m())?;
            let lp = cache.get(inst, rp.lp_accuracy())?;
            let out = oneshot_from_lp(inst, lp, params.seed)?;
            trace = Some(out.trace);
            out.solution
        }
        Algorithm::ConstantBins => constant_bins(inst, params.epsilon, params.budget)?,
        Algorithm::LocalSearch => local_search(inst)?,
        Algorithm::Exact => solve_exact_cmk(inst, &OracleLimits::default())?.0,
        Algorithm::Dispatch => {
            let dp = DispatchParams {
                eps_prime: params.epsilon,
                mode: params.mode,
                m_switch: params.m_switch,
                budget: params.budget,
                seed: params.seed,
            };
            let (s, b) = dispatch(inst, &dp)?;
            branch = Some(b);
            s
        }
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let reparsed = Solution::from_json(&solution.to_json())?;
    inst.validate_solution(&reparsed)
        .map_err(|e| Error::internal(format!("{algo} returned an infeasible solution: {e}")))?;
    let value = inst.solution_value(&solution)?;
    let ratio = if upper > 0.0 { value / upper } else { 1.0 };
    if ratio > 1.0 + 1e-6 {
        return Err(Error::internal(format!("{algo} value {value} exceeds the LP bound {upper}")));
    }
    Ok(RunReport {
        instance_digest: instance_digest(inst),
        algorithm: algo,
        params: *params,
        value,
        lp_upper_bound: upper,
        ratio,
        wall_ms,
        branch,
        trace,
        solution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub name: String,
    pub instances: Vec<GeneratorSpec>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_budget")]
    pub budget: u128,
    #[serde(default)]
    pub parallel: bool,
}

fn default_epsilon() -> f64 {
    0.2
}

fn default_mode() -> Mode {
    Mode::Practical
}

fn default_budget() -> u128 {
    DEFAULT_BUDGET
}

impl Suite {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("suite JSON: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: usize,
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub instance_seed: u64,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub value: Option<f64>,
    pub lp_upper_bound: Option<f64>,
    pub ratio: Option<f64>,
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub runs: usize,
    pub failures: usize,
    pub mean_ratio: f64,
    pub stddev_ratio: f64,
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub per_algorithm: BTreeMap<Algorithm, Stats>,
    /// Keyed by `"<instance>/<algorithm>"`.
    pub per_cell: BTreeMap<String, Stats>,
}

fn stats(rows: &[&BenchRow]) -> Stats {
    let ok: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.ratio?, r.value?)))
        .collect();
    let n = ok.len();
    let mean = |f: fn(&(f64, f64)) -> f64| if n == 0 { 0.0 } else { ok.iter().map(f).sum::<f64>() / n as f64 };
    let mean_ratio = mean(|x| x.0);
    let var = if n < 2 {
        0.0
    } else {
        ok.iter().map(|x| (x.0 - mean_ratio).powi(2)).sum::<f64>() / (n - 1) as f64
    };
    Stats {
        runs: rows.len(),
        failures: rows.len() - n,
        mean_ratio,
        stddev_ratio: var.sqrt(),
        mean_value: mean(|x| x.1),
    }
}

/// Means and deviations per algorithm and per (instance, algorithm) cell.
/// Rows are sorted first, so the result does not depend on their order.
pub fn aggregate(rows: &[BenchRow]) -> Aggregate {
    let mut sorted: Vec<&BenchRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.instance, r.algorithm, r.seed));
    let mut by_algo: BTreeMap<Algorithm, Vec<&BenchRow>> = BTreeMap::new();
    let mut by_cell: BTreeMap<(usize, Algorithm), Vec<&BenchRow>> = BTreeMap::new();
    for r in sorted {
        by_algo.entry(r.algorithm).or_default().push(r);
        by_cell.entry((r.instance, r.algorithm)).or_default().push(r);
    }
    Aggregate {
        per_algorithm: by_algo.into_iter().map(|(a, rs)| (a, stats(&rs))).collect(),
        per_cell: by_cell
            .into_iter()
            .map(|((i, a), rs)| (format!("{i}/{a}"), stats(&rs)))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub name: String,
    pub rows: Vec<BenchRow>,
    pub aggregate: Aggregate,
}

fn run_instance(suite: &Suite, idx: usize, spec: &GeneratorSpec) -> Vec<BenchRow> {
    let base = |algorithm, seed| BenchRow {
        instance: idx,
        family: spec.family.to_string(),
        n: spec.n,
        m: spec.m,
        k: spec.k,
        instance_seed: spec.seed,
        algorithm,
        seed,
        value: None,
        lp_upper_bound: None,
        ratio: None,
        wall_ms: None,
        error: None,
    };
    let inst = match generate(spec) {
        Ok(inst) => inst,
        Err(e) => {
            return suite
                .algorithms
                .iter()
                .flat_map(|&a| suite.seeds.iter().map(move |&s| (a, s)))
                .map(|(a, s)| BenchRow {
                    error: Some(e.to_string()),
                    ..base(a, s)
                })
                .collect()
        }
    };
    let mut cache = LpCache::new();
    let mut rows = Vec::new();
    for &algo in &suite.algorithms {
        for &seed in &suite.seeds {
            let params = RunParams {
                epsilon: suite.epsilon,
                seed,
                mode: suite.mode,
                budget: suite.budget,
                ..RunParams::default()
            };
            let row = match run_cached(&inst, algo, &params, &mut cache) {
                Ok(r) => BenchRow {
                    value: Some(r.value),
                    lp_upper_bound: Some(r.lp_upper_bound),
                    ratio: Some(r.ratio),
                    wall_ms: Some(r.wall_ms),
                    ..base(algo, seed)
                },
                Err(e) => BenchRow {
                    error: Some(e.to_string()),
                    ..base(algo, seed)
                },
            };
            rows.push(row);
        }
    }
    rows
}

/// Runs every (instance, algorithm, seed) cell; failures are recorded in
/// their row and the suite continues.
pub fn bench(suite: &Suite) -> BenchResult {
    let work: Vec<(usize, &GeneratorSpec)> = suite.instances.iter().enumerate().collect();
    let mut rows: Vec<BenchRow> = if suite.parallel {
        work.par_iter().flat_map(|(i, s)| run_instance(suite, *i, s)).collect()
    } else {
        work.iter().flat_map(|(i, s)| run_instance(suite, *i, s)).collect()
    };
    rows.sort_by_key(|r| (r.instance, r.algorithm, r.seed));
    let aggregate = aggregate(&rows);
    BenchResult {
        name: suite.name.clone(),
        rows,
        aggregate,
    }
}

pub fn rows_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("UTF-8 CSV")
}

/// Writes `rows.csv` and `aggregate.json` into `dir`.
pub fn write_bench(result: &BenchResult, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("rows.csv"), rows_csv(&result.rows))?;
    let json = serde_json::to_string_pretty(result).expect("bench result serializes");
    std::fs::write(dir.join("aggregate.json"), json)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::Family;

    fn row(instance: usize, algorithm: Algorithm, seed: u64, ratio: f64) -> BenchRow {
        BenchRow {
            instance,
            family: "uniform".into(),
            n: 1,
            m: 1,
            k: 1,
            instance_seed: 0,
            algorithm,
            seed,
            value: Some(ratio),
            lp_upper_bound: Some(1.0),
            ratio: Some(ratio),
            wall_ms: Some(0.0),
            error: None,
        }
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("greedy".parse::<Algorithm>().is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut r = row(0, Algorithm::Exact, 2, 0.5);
        r.error = Some("a, \"quoted\" failure".into());
        r.ratio = None;
        let text = rows_csv(&[r]);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("instance,family,n,m,k,instance_seed,algorithm,seed"));
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rec = rd.records().next().unwrap().unwrap();
        assert_eq!(&rec[6], "exact");
        assert_eq!(&rec[10], "");
        assert_eq!(&rec[12], "a, \"quoted\" failure");
    }

    #[test]
    fn empty_suite() {
        let suite = Suite {
            name: "empty".into(),
            instances: vec![],
            algorithms: vec![Algorithm::Iterative],
            seeds: vec![0],
            epsilon: 0.2,
            mode: Mode::Practical,
            budget: 10,
            parallel: false,
        };
        let r = bench(&suite);
        assert!(r.rows.is_empty());
        assert!(r.aggregate.per_algorithm.is_empty());
    }

    #[test]
    fn aggregate_means_and_order() {
        let mut rows = vec![
            row(0, Algorithm::Oneshot, 0, 0.5),
            row(0, Algorithm::Oneshot, 1, 0.7),
            row(1, Algorithm::Oneshot, 0, 0.9),
            row(0, Algorithm::Iterative, 0, 0.8),
        ];
        let a = aggregate(&rows);
        let s = &a.per_algorithm[&Algorithm::Oneshot];
        assert_eq!(s.runs, 3);
        assert!((s.mean_ratio - 0.7).abs() < 1e-12);
        assert!((a.per_cell["0/oneshot"].mean_ratio - 0.6).abs() < 1e-12);
        rows.reverse();
        assert_eq!(aggregate(&rows), a);
    }

    #[test]
    fn seeds_make_rows() {
        let suite = Suite {
            name: "small".into(),
            instances: vec![GeneratorSpec::new(Family::Uniform, 12, 2, 3, 4)],
            algorithms: vec![Algorithm::Oneshot, Algorithm::LocalSearch],
            seeds: (0..5).collect(),
            epsilon: 0.5,
            mode: Mode::Practical,
            budget: 10,
            parallel: false,
        };
        let r = bench(&suite);
        assert_eq!(r.rows.len(), 10);
        assert_eq!(r.aggregate.per_cell["0/oneshot"].runs, 5);
        assert!(r.rows.iter().all(|row| row.error.is_none()));
        assert!(r.rows.iter().all(|row| row.ratio.unwrap() <= 1.0 + 1e-6));
    }

    #[test]
    fn reports_are_reproducible() {
        let inst = generate(&GeneratorSpec::new(Family::Correlated, 15, 2, 3, 8)).unwrap();
        for algo in [Algorithm::Iterative, Algorithm::Oneshot, Algorithm::LocalSearch, Algorithm::Dispatch] {
            let p = RunParams {
                epsilon: 0.25,
                seed: 3,
                ..RunParams::default()
            };
            let a = run(&inst, algo, &p).unwrap();
            let b = run(&inst, algo, &p).unwrap();
            assert_eq!(a.solution.to_json(), b.solution.to_json());
            assert_eq!(a.value, b.value);
            assert!(a.ratio <= 1.0 + 1e-6);
        }
    }
}
