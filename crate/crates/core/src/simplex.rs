//! Bounded-variable revised simplex with an explicit basis inverse.
//!
//! The engine works on `max c·x` subject to `A x = b`, `0 <= x <= u`, with
//! `b >= 0`. [`solve_vertex_lp`] brings a general [`DenseLp`] into that form
//! and runs a two-phase method under Bland's rule, so the answer is a vertex.
//! Column generation drives [`Simplex`] directly and appends columns between
//! solves.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `max objective·x` subject to `rows[i]·x (senses[i]) rhs[i]` and
/// `0 <= x_j <= upper[j]` (`None` means unbounded above).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLp<T = f64> {
    pub objective: Vec<T>,
    pub rows: Vec<Vec<T>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<T>,
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> DenseLp<T> {
    pub fn new(objective: Vec<T>) -> Self {
        let n = objective.len();
        DenseLp {
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, row: Vec<T>, sense: Sense, rhs: T) {
        assert_eq!(row.len(), self.num_vars(), "row length must match variable count");
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    /// Adds a row given by its nonzero entries.
    pub fn add_sparse_row(&mut self, entries: &[(usize, T)], sense: Sense, rhs: T) {
        let mut row = vec![T::zero(); self.num_vars()];
        for (j, a) in entries {
            row[*j] = row[*j].clone() + a.clone();
        }
        self.add_row(row, sense, rhs);
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.upper.len() != n
            || self.senses.len() != self.rows.len()
            || self.rhs.len() != self.rows.len()
            || self.rows.iter().any(|r| r.len() != n)
        {
            return Err(Error::input("inconsistent LP dimensions"));
        }
        if self.upper.iter().flatten().any(|u| u.is_neg()) {
            return Err(Error::input("negative upper bound"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_vertex_lp`]. `basis` lists, per standard-form row, the
/// basic column: indices below `num_vars` are structural, the rest are the
/// slack of row `index - num_vars` (or an artificial left on a redundant row).
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSolution<T = f64> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    pub basis: Vec<usize>,
    /// Structural variables resting at their upper bound.
    pub at_upper: Vec<usize>,
    /// One dual per original row.
    pub duals: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest eligible index for entering and leaving; never cycles.
    Bland,
    /// Largest reduced cost, falling back to Bland on long degenerate runs.
    Dantzig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct Simplex<T> {
    rows: usize,
    b: Vec<T>,
    cols: Vec<Vec<(usize, T)>>,
    cost: Vec<T>,
    upper: Vec<Option<T>>,
    blocked: Vec<bool>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Column-major: `binv[c * rows + r]` is entry `(r, c)` of `B^{-1}`.
    binv: Vec<T>,
    xb: Vec<T>,
    y: Vec<T>,
    y_valid: bool,
    pivots_since_refactor: usize,
    pub pivots: usize,
}

impl<T: Scalar> Simplex<T> {
    /// Empty engine over `b.len()` equality rows. Requires `b >= 0`.
    pub fn new(b: Vec<T>) -> Self {
        let rows = b.len();
        Simplex {
            rows,
            b,
            cols: Vec::new(),
            cost: Vec::new(),
            upper: Vec::new(),
            blocked: Vec::new(),
            state: Vec::new(),
            basis: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            y: Vec::new(),
            y_valid: false,
            pivots_since_refactor: 0,
            pivots: 0,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// Appends a nonbasic column at its lower bound.
    pub fn add_column(&mut self, entries: Vec<(usize, T)>, cost: T, upper: Option<T>) -> usize {
        debug_assert!(entries.iter().all(|(i, _)| *i < self.rows));
        self.cols.push(entries.into_iter().filter(|(_, a)| !a.is_zero_tol()).collect());
        self.cost.push(cost);
        self.upper.push(upper);
        self.blocked.push(false);
        self.state.push(VarState::Lower);
        self.cols.len() - 1
    }

    pub fn set_cost(&mut self, j: usize, cost: T) {
        self.cost[j] = cost;
        self.y_valid = false;
    }

    /// Fixes a column at zero: it may not enter and, if basic, stays at zero.
    pub fn block(&mut self, j: usize) {
        self.blocked[j] = true;
        self.upper[j] = Some(T::zero());
    }

    /// Installs a basis (one column per row) and computes the basic values.
    /// Nonbasic columns keep their current bound.
    pub fn set_basis(&mut self, basis: Vec<usize>) -> Result<()> {
        if basis.len() != self.rows {
            return Err(Error::internal("basis size differs from row count"));
        }
        for s in self.state.iter_mut() {
            if let VarState::Basic(_) = s {
                *s = VarState::Lower;
            }
        }
        for (pos, &j) in basis.iter().enumerate() {
            self.state[j] = VarState::Basic(pos);
        }
        self.basis = basis;
        self.refactor()
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.rows;
        // Gauss-Jordan on [B | I]
        let mut a = vec![T::zero(); m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for (i, v) in &self.cols[j] {
                a[i * m + pos] = v.clone();
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for i in 0..m {
            inv[i * m + i] = T::one();
        }
        for col in 0..m {
            let mut piv = None;
            let mut best = T::zero();
            for r in col..m {
                let v = a[r * m + col].abs_val();
                if v.is_pos() && (piv.is_none() || v > best) {
                    best = v;
                    piv = Some(r);
                    if T::eps().is_zero_tol() {
                        break;
                    }
                }
            }
            let r = piv.ok_or_else(|| Error::internal("singular basis"))?;
            if r != col {
                for c in 0..m {
                    a.swap(r * m + c, col * m + c);
                    inv.swap(r * m + c, col * m + c);
                }
            }
            let p = a[col * m + col].clone();
            for c in 0..m {
                a[col * m + c] = a[col * m + c].clone() / p.clone();
                inv[col * m + c] = inv[col * m + c].clone() / p.clone();
            }
            for r2 in 0..m {
                if r2 == col {
                    continue;
                }
                let f = a[r2 * m + col].clone();
                if f == T::zero() {
                    continue;
                }
                for c in 0..m {
                    let t = a[col * m + c].clone();
                    if t != T::zero() {
                        a[r2 * m + c] = a[r2 * m + c].clone() - f.clone() * t;
                    }
                    let t = inv[col * m + c].clone();
                    if t != T::zero() {
                        inv[r2 * m + c] = inv[r2 * m + c].clone() - f.clone() * t;
                    }
                }
            }
        }
        // transpose into column-major order
        let mut cm = vec![T::zero(); m * m];
        for r in 0..m {
            for c in 0..m {
                let v = std::mem::replace(&mut inv[r * m + c], T::zero());
                if v != T::zero() {
                    cm[c * m + r] = v;
                }
            }
        }
        self.binv = cm;
        self.y_valid = false;
        self.pivots_since_refactor = 0;
        self.recompute_xb();
        Ok(())
    }

    fn recompute_xb(&mut self) {
        let m = self.rows;
        let mut rhs = self.b.clone();
        for (j, s) in self.state.iter().enumerate() {
            if *s == VarState::Upper {
                let u = self.upper[j].clone().expect("upper state needs a bound");
                for (i, a) in &self.cols[j] {
                    rhs[*i] = rhs[*i].clone() - a.clone() * u.clone();
                }
            }
        }
        let mut xb = vec![T::zero(); m];
        for (i, v) in rhs.iter().enumerate() {
            if *v == T::zero() {
                continue;
            }
            for (x, e) in xb.iter_mut().zip(&self.binv[i * m..(i + 1) * m]) {
                if *e != T::zero() {
                    *x = x.clone() + e.clone() * v.clone();
                }
            }
        }
        self.xb = xb;
    }

    /// `y = c_B B^{-1}`, one entry per row.
    pub fn duals(&self) -> Vec<T> {
        let m = self.rows;
        (0..m)
            .map(|i| {
                self.basis
                    .iter()
                    .zip(&self.binv[i * m..(i + 1) * m])
                    .fold(T::zero(), |acc, (&j, e)| {
                        if *e == T::zero() || self.cost[j] == T::zero() {
                            acc
                        } else {
                            acc + self.cost[j].clone() * e.clone()
                        }
                    })
            })
            .collect()
    }

    pub fn reduced_cost(&self, j: usize, y: &[T]) -> T {
        self.cols[j]
            .iter()
            .fold(self.cost[j].clone(), |acc, (i, a)| acc - y[*i].clone() * a.clone())
    }

    fn ftran(&self, j: usize) -> Vec<T> {
        let m = self.rows;
        let mut u = vec![T::zero(); m];
        for (i, a) in &self.cols[j] {
            for (ur, e) in u.iter_mut().zip(&self.binv[i * m..(i + 1) * m]) {
                if *e != T::zero() {
                    *ur = ur.clone() + e.clone() * a.clone();
                }
            }
        }
        u
    }

    pub fn value(&self, j: usize) -> T {
        match self.state[j] {
            VarState::Basic(pos) => self.xb[pos].clone(),
            VarState::Lower => T::zero(),
            VarState::Upper => self.upper[j].clone().unwrap(),
        }
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.cols.len()).map(|j| self.value(j)).collect()
    }

    pub fn objective(&self) -> T {
        (0..self.cols.len()).fold(T::zero(), |acc, j| {
            let v = self.value(j);
            if v == T::zero() {
                acc
            } else {
                acc + self.cost[j].clone() * v
            }
        })
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn is_at_upper(&self, j: usize) -> bool {
        self.state[j] == VarState::Upper
    }

    /// Runs primal simplex from the current (primal feasible) basis.
    pub fn optimize(&mut self, rule: PivotRule, max_pivots: usize) -> Result<Outcome> {
        let m = self.rows;
        let refactor_every = if T::eps().is_zero_tol() { usize::MAX } else { 100.max(m) };
        let mut degenerate_run = 0usize;
        let mut done = 0usize;
        loop {
            if done >= max_pivots {
                return Err(Error::internal("simplex pivot limit reached"));
            }
            if !self.y_valid {
                self.y = self.duals();
                self.y_valid = true;
            }
            let y = std::mem::take(&mut self.y);
            let bland = rule == PivotRule::Bland || degenerate_run > 50;

            // entering column
            let mut enter: Option<(usize, T)> = None;
            for j in 0..self.cols.len() {
                if self.blocked[j] {
                    continue;
                }
                let st = self.state[j];
                if let VarState::Basic(_) = st {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                let gain = match st {
                    VarState::Lower if d.is_pos() => d,
                    VarState::Upper if d.is_neg() => -d,
                    _ => continue,
                };
                if bland {
                    enter = Some((j, gain));
                    break;
                }
                if enter.as_ref().is_none_or(|(_, g)| gain > *g) {
                    enter = Some((j, gain));
                }
            }
            let Some((q, _)) = enter else {
                self.y = y;
                return Ok(Outcome::Optimal);
            };
            let d_q = self.reduced_cost(q, &y);
            self.y = y;
            let up = self.state[q] == VarState::Lower;
            let u = self.ftran(q);

            // ratio test; basic values move by -dir * t * u
            let mut best_t: Option<T> = self.upper[q].clone();
            let mut leave: Option<(usize, bool)> = None; // (row, leaves at upper)
            for (r, ur) in u.iter().enumerate() {
                if ur.is_zero_tol() {
                    continue;
                }
                let delta = if up { -ur.clone() } else { ur.clone() };
                let jb = self.basis[r];
                let (t, to_upper) = if delta.is_neg() {
                    let x = T::max_of(self.xb[r].clone(), T::zero());
                    (x / (-delta.clone()), false)
                } else {
                    match &self.upper[jb] {
                        Some(ub) => {
                            let gap = T::max_of(ub.clone() - self.xb[r].clone(), T::zero());
                            (gap / delta.clone(), true)
                        }
                        None => continue,
                    }
                };
                let better = match &best_t {
                    None => true,
                    Some(bt) => {
                        if t.clone() - bt.clone() < -T::eps() {
                            true
                        } else if (t.clone() - bt.clone()).is_zero_tol() {
                            match leave {
                                // a bound flip of the entering column wins ties
                                None => false,
                                Some((lr, _)) => {
                                    if bland {
                                        jb < self.basis[lr]
                                    } else {
                                        ur.abs_val() > u[lr].abs_val()
                                    }
                                }
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    best_t = Some(t);
                    leave = Some((r, to_upper));
                }
            }
            let Some(t) = best_t else {
                self.y_valid = false;
                return Ok(Outcome::Unbounded);
            };
            if t.is_zero_tol() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            // move basic values
            for (r, ur) in u.iter().enumerate() {
                if *ur != T::zero() {
                    let step = ur.clone() * t.clone();
                    self.xb[r] = if up {
                        self.xb[r].clone() - step
                    } else {
                        self.xb[r].clone() + step
                    };
                }
            }

            match leave {
                None => {
                    // bound flip
                    self.state[q] = if up { VarState::Upper } else { VarState::Lower };
                }
                Some((r, to_upper)) => {
                    let entering_value = if up {
                        t.clone()
                    } else {
                        self.upper[q].clone().unwrap() - t.clone()
                    };
                    let old = self.basis[r];
                    self.state[old] = if to_upper { VarState::Upper } else { VarState::Lower };
                    self.state[q] = VarState::Basic(r);
                    self.basis[r] = q;
                    self.pivot_binv(r, &u);
                    self.xb[r] = entering_value;
                    // y' = y + d_q * (row r of the new inverse)
                    for (i, yi) in self.y.iter_mut().enumerate() {
                        let e = &self.binv[i * m + r];
                        if *e != T::zero() {
                            *yi = yi.clone() + d_q.clone() * e.clone();
                        }
                    }
                    self.pivots_since_refactor += 1;
                    if self.pivots_since_refactor >= refactor_every {
                        self.refactor()?;
                    }
                }
            }
            self.pivots += 1;
            done += 1;
        }
    }

    fn pivot_binv(&mut self, r: usize, u: &[T]) {
        let m = self.rows;
        let p = u[r].clone();
        let nz: Vec<usize> = (0..m).filter(|&i| i != r && u[i] != T::zero()).collect();
        for col in self.binv.chunks_mut(m) {
            if col[r] == T::zero() {
                continue;
            }
            let pr = col[r].clone() / p.clone();
            for &i in &nz {
                col[i] = col[i].clone() - u[i].clone() * pr.clone();
            }
            col[r] = pr;
        }
    }

    /// Forces a basic column out of row `r` in favor of nonbasic `q`, keeping
    /// every nonbasic value. Used to drive artificials out after phase 1.
    fn exchange(&mut self, r: usize, q: usize) -> Result<()> {
        let old = self.basis[r];
        self.state[old] = VarState::Lower;
        self.basis[r] = q;
        self.state[q] = VarState::Basic(r);
        self.refactor()
    }
}

struct StandardForm<T> {
    sx: Simplex<T>,
    basis: Vec<usize>,
    artificials: Vec<usize>,
    flipped: Vec<bool>,
}

/// Column layout: structural `0..n`, one slack per row `n..n+rows` (fixed at
/// zero on equality rows), then artificials for rows without a usable slack.
fn standard_form<T: Scalar>(lp: &DenseLp<T>) -> StandardForm<T> {
    let n = lp.num_vars();
    let mrows = lp.rows.len();
    let mut flipped = vec![false; mrows];
    let mut senses = lp.senses.clone();
    let mut b = lp.rhs.clone();
    for i in 0..mrows {
        if b[i].is_neg() {
            flipped[i] = true;
            b[i] = -b[i].clone();
            senses[i] = match senses[i] {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        } else if b[i] < T::zero() {
            b[i] = T::zero();
        }
    }
    let mut sx = Simplex::new(b);
    for j in 0..n {
        let entries: Vec<(usize, T)> = (0..mrows)
            .filter(|&i| lp.rows[i][j] != T::zero())
            .map(|i| {
                let a = lp.rows[i][j].clone();
                (i, if flipped[i] { -a } else { a })
            })
            .collect();
        sx.add_column(entries, T::zero(), lp.upper[j].clone());
    }
    let mut basis = vec![usize::MAX; mrows];
    for i in 0..mrows {
        let coef = if senses[i] == Sense::Ge { -T::one() } else { T::one() };
        let j = sx.add_column(vec![(i, coef)], T::zero(), None);
        match senses[i] {
            Sense::Eq => sx.block(j),
            Sense::Le => basis[i] = j,
            Sense::Ge => {}
        }
    }
    let mut artificials = Vec::new();
    for (i, slot) in basis.iter_mut().enumerate() {
        if *slot == usize::MAX {
            let j = sx.add_column(vec![(i, T::one())], -T::one(), None);
            artificials.push(j);
            *slot = j;
        }
    }
    StandardForm {
        sx,
        basis,
        artificials,
        flipped,
    }
}

/// Solves a general LP to an optimal vertex with a two-phase simplex under
/// Bland's rule.
pub fn solve_vertex_lp<T: Scalar>(lp: &DenseLp<T>) -> Result<VertexSolution<T>> {
    lp.check()?;
    let n = lp.num_vars();
    let mrows = lp.rows.len();
    let StandardForm {
        mut sx,
        basis,
        artificials,
        flipped,
    } = standard_form(lp);
    sx.set_basis(basis)?;
    let limit = 50_000 + 200 * (n + mrows);
    if !artificials.is_empty() {
        sx.optimize(PivotRule::Bland, limit)?;
        let infeas = artificials
            .iter()
            .fold(T::zero(), |acc, &j| acc + sx.value(j));
        if infeas.is_pos() {
            return Ok(VertexSolution {
                status: LpStatus::Infeasible,
                x: vec![T::zero(); n],
                objective: T::zero(),
                basis: sx.basis().to_vec(),
                at_upper: Vec::new(),
                duals: vec![T::zero(); mrows],
            });
        }
        for &a in &artificials {
            sx.set_cost(a, T::zero());
            sx.block(a);
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..mrows {
            let jb = sx.basis()[r];
            if !artificials.contains(&jb) {
                continue;
            }
            let mut replacement = None;
            for q in 0..n + mrows {
                if sx.blocked[q] || matches!(sx.state[q], VarState::Basic(_)) {
                    continue;
                }
                if !sx.ftran(q)[r].is_zero_tol() {
                    replacement = Some(q);
                    break;
                }
            }
            if let Some(q) = replacement {
                sx.exchange(r, q)?;
            }
        }
    }
    for j in 0..n {
        sx.set_cost(j, lp.objective[j].clone());
    }
    let outcome = sx.optimize(PivotRule::Bland, limit)?;
    let x: Vec<T> = (0..n).map(|j| snap(sx.value(j))).collect();
    let objective = x
        .iter()
        .zip(&lp.objective)
        .fold(T::zero(), |acc, (xj, cj)| acc + xj.clone() * cj.clone());
    let y = sx.duals();
    let duals = (0..mrows)
        .map(|i| if flipped[i] { -y[i].clone() } else { y[i].clone() })
        .collect();
    Ok(VertexSolution {
        status: match outcome {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Unbounded => LpStatus::Unbounded,
        },
        x,
        objective,
        basis: sx.basis().to_vec(),
        at_upper: (0..n).filter(|&j| sx.is_at_upper(j)).collect(),
        duals,
    })
}

/// Recomputes the primal point determined by a basis returned from
/// [`solve_vertex_lp`], for checking that the basis reproduces the vertex.
pub fn point_from_basis<T: Scalar>(lp: &DenseLp<T>, sol: &VertexSolution<T>) -> Result<Vec<T>> {
    lp.check()?;
    let mut form = standard_form(lp);
    for &j in &sol.at_upper {
        form.sx.state[j] = VarState::Upper;
    }
    form.sx.set_basis(sol.basis.clone())?;
    Ok((0..lp.num_vars()).map(|j| snap(form.sx.value(j))).collect())
}

/// Rounds values within tolerance of an integer onto it (no-op for exact types).
fn snap<T: Scalar>(v: T) -> T {
    if T::eps().is_zero_tol() {
        return v;
    }
    let f = v.floor_val();
    if (v.clone() - f.clone()).is_zero_tol() {
        f
    } else if (f.clone() + T::one() - v.clone()).is_zero_tol() {
        f + T::one()
    } else {
        v
    }
}
