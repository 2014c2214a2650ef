//! Chooses a solver from `m` and `ε'`.

use serde::{Deserialize, Serialize};

use super::{constant_bins, local_search, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::model::{Instance, Solution};
use crate::rounding::{iterative_rounding, Mode, RoundingParams};

pub const DEFAULT_M_SWITCH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchParams {
    pub eps_prime: f64,
    pub mode: Mode,
    pub m_switch: usize,
    pub budget: u128,
    pub seed: u64,
}

impl DispatchParams {
    pub fn new(eps_prime: f64, mode: Mode) -> Self {
        DispatchParams {
            eps_prime,
            mode,
            m_switch: DEFAULT_M_SWITCH,
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    ConstantBins,
    IterativeRounding,
    LocalSearch,
}

/// `ln(exp(exp(ε^{-160})) + ε^{-3}) >= ln m`, evaluated without overflow.
/// For `ε <= 0.6` the double exponential is infinite in `f64`.
pub fn below_paper_threshold(m: usize, eps_prime: f64) -> bool {
    let inner = eps_prime.powf(-160.0).exp();
    let cubic = 3.0 * (1.0 / eps_prime).ln();
    let log_threshold = inner.max(cubic);
    (m as f64).ln() < log_threshold
}

pub fn dispatch(inst: &Instance, p: &DispatchParams) -> Result<(Solution, Branch)> {
    if !(p.eps_prime > 0.0 && p.eps_prime < 1.0) {
        return Err(Error::input(format!("epsilon' = {} not in (0,1)", p.eps_prime)));
    }
    let m = inst.m();
    let rounding = match p.mode {
        Mode::Paper => !below_paper_threshold(m, p.eps_prime),
        Mode::Practical => m >= p.m_switch,
    };
    if rounding {
        let rp = RoundingParams::new(p.eps_prime, p.seed);
        if let Ok(out) = iterative_rounding(inst, &rp) {
            return Ok((out.solution, Branch::IterativeRounding));
        }
    } else {
        match constant_bins(inst, p.eps_prime, p.budget) {
            Ok(s) => return Ok((s, Branch::ConstantBins)),
            Err(Error::Budget { estimated, budget }) => {
                log::info!("enumeration needs {estimated} guesses (budget {budget}), using local search");
            }
            Err(e) => return Err(e),
        }
    }
    Ok((local_search(inst)?, Branch::LocalSearch))
}
