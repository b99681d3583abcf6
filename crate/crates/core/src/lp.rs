//! Dense simplex solver for small linear programs in inequality form:
//! maximize `c·x` subject to `A x <= b`, `x >= 0`.
//!
//! The solver keeps a Tucker-style dictionary with only the nonbasic
//! columns, enters the variable with the largest reduced cost and falls
//! back to Bland's rule during long degenerate stretches, and runs a
//! phase-one auxiliary problem when some `b_i` is negative.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-9;
const FEASIBILITY_EPS: f64 = 1e-7;
/// Degenerate pivots in a row before switching from the largest-coefficient
/// rule to Bland's rule. Any strict improvement switches back.
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpStatus::Infeasible)
    }
}

/// A linear program in inequality form. Rows are added one at a time.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, objective: vec![0.0; n_vars], rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Result<Self> {
        if c.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, found: c.len() });
        }
        self.objective = c;
        Ok(self)
    }

    /// Adds `row · x <= rhs`.
    pub fn less_eq(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        if row.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, found: row.len() });
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::LpFailure("non-finite coefficient".into()));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    /// Adds `row · x = rhs` as a pair of inequalities.
    pub fn equal(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        let neg: Vec<f64> = row.iter().map(|v| -v).collect();
        self.less_eq(row, rhs)?;
        self.less_eq(neg, -rhs)
    }

    pub fn solve(&self) -> Result<LpStatus> {
        Dictionary::new(self).solve(&self.objective)
    }
}

/// `x_B[i] = rhs[i] - sum_j a[i][j] x_N[j]`, `z = value + sum_j cost[j] x_N[j]`.
struct Dictionary {
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    value: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    n_orig: usize,
    max_iter: usize,
}

impl Dictionary {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars;
        Dictionary {
            a: lp.rows.clone(),
            rhs: lp.rhs.clone(),
            cost: vec![0.0; n],
            value: 0.0,
            basic: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            n_orig: n,
            max_iter: 50_000 + 100 * (n + m) * (n + m).max(1),
        }
    }

    fn pivot(&mut self, p: usize, e: usize) {
        let piv = self.a[p][e];
        let ncols = self.nonbasic.len();
        for j in 0..ncols {
            if j != e {
                self.a[p][j] /= piv;
            }
        }
        self.a[p][e] = 1.0 / piv;
        self.rhs[p] /= piv;
        let (row_p, rhs_p) = (self.a[p].clone(), self.rhs[p]);
        for i in 0..self.a.len() {
            if i == p {
                continue;
            }
            let f = self.a[i][e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i];
            for j in 0..ncols {
                if j != e {
                    row[j] -= f * row_p[j];
                }
            }
            row[e] = -f * row_p[e];
            self.rhs[i] -= f * rhs_p;
        }
        let f = self.cost[e];
        if f != 0.0 {
            for (j, (c, r)) in self.cost.iter_mut().zip(&row_p).enumerate().take(ncols) {
                if j != e {
                    *c -= f * r;
                }
            }
            self.cost[e] = -f * row_p[e];
            self.value += f * rhs_p;
        }
        std::mem::swap(&mut self.basic[p], &mut self.nonbasic[e]);
    }

    /// Runs the simplex loop on the current cost row. Returns false when
    /// the objective is unbounded.
    fn optimize(&mut self, banned: Option<usize>) -> Result<bool> {
        let mut stalled = 0;
        for _ in 0..self.max_iter {
            let candidates = (0..self.nonbasic.len()).filter(|&j| self.cost[j] > COST_EPS && Some(self.nonbasic[j]) != banned);
            let entering = if stalled < STALL_LIMIT {
                candidates.max_by(|&j, &k| self.cost[j].total_cmp(&self.cost[k]).then(self.nonbasic[k].cmp(&self.nonbasic[j])))
            } else {
                candidates.min_by_key(|&j| self.nonbasic[j])
            };
            let Some(e) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let aie = self.a[i][e];
                if aie > PIVOT_EPS {
                    let ratio = self.rhs[i].max(0.0) / aie;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, r)) => {
                            if ratio < r - 1e-12 || (ratio <= r + 1e-12 && self.basic[i] < self.basic[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, r))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((p, _)) => {
                    let before = self.value;
                    self.pivot(p, e);
                    stalled = if self.value > before { 0 } else { stalled + 1 };
                }
            }
        }
        Err(Error::LpFailure("simplex iteration limit reached".into()))
    }

    fn solve(mut self, objective: &[f64]) -> Result<LpStatus> {
        let m = self.a.len();
        let aux = self.n_orig + m;
        let most_negative = (0..m).filter(|&i| self.rhs[i] < 0.0).min_by(|&i, &k| self.rhs[i].total_cmp(&self.rhs[k]));
        if let Some(p) = most_negative {
            for row in &mut self.a {
                row.push(-1.0);
            }
            self.nonbasic.push(aux);
            self.cost = vec![0.0; self.nonbasic.len()];
            *self.cost.last_mut().unwrap() = -1.0;
            let e = self.nonbasic.len() - 1;
            self.pivot(p, e);
            if !self.optimize(None)? {
                return Err(Error::LpFailure("auxiliary problem unbounded".into()));
            }
            if self.value < -FEASIBILITY_EPS {
                return Ok(LpStatus::Infeasible);
            }
            if let Some(p) = self.basic.iter().position(|&v| v == aux) {
                let col = (0..self.nonbasic.len())
                    .filter(|&j| self.a[p][j].abs() > PIVOT_EPS)
                    .max_by(|&j, &k| self.a[p][j].abs().total_cmp(&self.a[p][k].abs()));
                match col {
                    Some(e) => self.pivot(p, e),
                    None => {
                        self.a.remove(p);
                        self.rhs.remove(p);
                        self.basic.remove(p);
                    }
                }
            }
            if let Some(e) = self.nonbasic.iter().position(|&v| v == aux) {
                self.nonbasic.remove(e);
                for row in &mut self.a {
                    row.remove(e);
                }
            }
        }

        self.cost = vec![0.0; self.nonbasic.len()];
        self.value = 0.0;
        for (k, &ck) in objective.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            if let Some(j) = self.nonbasic.iter().position(|&v| v == k) {
                self.cost[j] += ck;
            } else if let Some(i) = self.basic.iter().position(|&v| v == k) {
                self.value += ck * self.rhs[i];
                for j in 0..self.nonbasic.len() {
                    self.cost[j] -= ck * self.a[i][j];
                }
            }
        }
        if !self.optimize(None)? {
            return Ok(LpStatus::Unbounded);
        }
        let mut x = vec![0.0; self.n_orig];
        for (i, &v) in self.basic.iter().enumerate() {
            if v < self.n_orig {
                x[v] = self.rhs[i].max(0.0);
            }
        }
        let objective = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpStatus::Optimal { x, objective })
    }
}

/// Decides whether the labelled point sets can be strictly separated by an
/// affine hyperplane. Returns `(w, b)` with `w·x + b >= 1` on `positives`
/// and `<= -1` on `negatives` when they can.
pub fn strict_separator(positives: &[&[f64]], negatives: &[&[f64]]) -> Result<Option<(Vec<f64>, f64)>> {
    let d = positives.iter().chain(negatives).map(|x| x.len()).next().unwrap_or(0);
    if d == 0 {
        return Ok(Some((Vec::new(), 0.0)));
    }
    // Variables: w+ (d), w- (d), b+, b-.
    let mut lp = LinearProgram::new(2 * d + 2);
    for (set, sign) in [(positives, 1.0), (negatives, -1.0)] {
        for x in set.iter() {
            if x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: x.len() });
            }
            let mut row = Vec::with_capacity(2 * d + 2);
            row.extend(x.iter().map(|v| -sign * v));
            row.extend(x.iter().map(|v| sign * v));
            row.push(-sign);
            row.push(sign);
            lp.less_eq(row, -1.0)?;
        }
    }
    match lp.solve()? {
        LpStatus::Optimal { x, .. } => {
            let w = (0..d).map(|i| x[i] - x[d + i]).collect();
            Ok(Some((w, x[2 * d] - x[2 * d + 1])))
        }
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::LpFailure("feasibility problem reported unbounded".into())),
    }
}
