//! Dense revised simplex with explicit variable bounds.
//!
//! Every row gets a slack so the system reads `A·x + s = b`; the slack bounds
//! encode the row relation. Rows whose slack cannot absorb the initial
//! residual get an artificial variable, driven to zero in phase one. Pricing is
//! Dantzig's largest reduced cost until the objective stalls, after which
//! Bland's smallest-index rule takes over for the rest of the phase.

#![allow(clippy::needless_range_loop)]

use super::{LpError, LpProblem, LpSolution, LpStatus, Relation};
use crate::{FEAS_TOL, OPT_TOL};

const PIVOT_TOL: f64 = 1e-9;
const STALL_LIMIT: usize = 50;
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    FreeZero,
}

struct Tableau {
    m: usize,
    n_struct: usize,
    /// Dense row-major constraint matrix over structural columns.
    a: Vec<f64>,
    b: Vec<f64>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    /// Explicit basis inverse, row-major m×m.
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    iterations: usize,
    max_iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(p: &LpProblem) -> Self {
        let m = p.constraints.len();
        let n = p.num_vars();
        let total = n + 2 * m;
        let mut a = vec![0.0; m * n];
        let mut b = vec![0.0; m];
        let mut lower = Vec::with_capacity(total);
        let mut upper = Vec::with_capacity(total);
        for (i, con) in p.constraints.iter().enumerate() {
            for &(j, coef) in &con.coeffs {
                a[i * n + j] += coef;
            }
            b[i] = con.rhs;
        }
        for &(lo, hi) in &p.bounds {
            lower.push(lo);
            upper.push(hi);
        }
        for con in &p.constraints {
            let (lo, hi) = match con.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
        }
        for _ in 0..m {
            lower.push(0.0);
            upper.push(0.0);
        }

        let mut x = vec![0.0; total];
        let mut state = vec![VarState::AtLower; total];
        for j in 0..n {
            let (lo, hi) = (lower[j], upper[j]);
            if lo.is_finite() {
                x[j] = lo;
                state[j] = VarState::AtLower;
            } else if hi.is_finite() {
                x[j] = hi;
                state[j] = VarState::AtUpper;
            } else {
                state[j] = VarState::FreeZero;
            }
        }

        for j in n..n + m {
            if !lower[j].is_finite() {
                state[j] = VarState::AtUpper;
            }
        }

        let mut art_sign = vec![1.0; m];
        let mut head = vec![0; m];
        for i in 0..m {
            let r = b[i] - (0..n).map(|j| a[i * n + j] * x[j]).sum::<f64>();
            let slack = n + i;
            if r >= lower[slack] && r <= upper[slack] {
                head[i] = slack;
                state[slack] = VarState::Basic(i);
                x[slack] = r;
            } else {
                let art = n + m + i;
                art_sign[i] = if r >= 0.0 { 1.0 } else { -1.0 };
                upper[art] = f64::INFINITY;
                head[i] = art;
                state[art] = VarState::Basic(i);
                x[art] = r.abs();
            }
        }

        let mut t = Tableau {
            m,
            n_struct: n,
            a,
            b,
            art_sign,
            lower,
            upper,
            cost: vec![0.0; total],
            x,
            state,
            head,
            binv: vec![0.0; m * m],
            pivots_since_refactor: 0,
            iterations: 0,
            max_iterations: 20_000 + 50 * (n + m),
        };
        t.refactor();
        t
    }

    fn total_vars(&self) -> usize {
        self.n_struct + 2 * self.m
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct + self.m
    }

    /// Writes column `j` of `[A | I | diag(sign)]` into `out`.
    fn column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = self.n_struct;
        if j < n {
            for (i, v) in out.iter_mut().enumerate() {
                *v = self.a[i * n + j];
            }
        } else if j < n + self.m {
            out[j - n] = 1.0;
        } else {
            let i = j - n - self.m;
            out[i] = self.art_sign[i];
        }
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        let n = self.n_struct;
        if j < n {
            (0..self.m).map(|i| self.a[i * n + j] * y[i]).sum()
        } else if j < n + self.m {
            y[j - n]
        } else {
            let i = j - n - self.m;
            self.art_sign[i] * y[i]
        }
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination and recomputes
    /// the basic values from the nonbasic ones.
    fn refactor(&mut self) {
        let m = self.m;
        if m == 0 {
            return;
        }
        let mut basis = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.head.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                basis[i * m + k] = col[i];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let piv = (c..m)
                .max_by(|&r1, &r2| basis[r1 * m + c].abs().total_cmp(&basis[r2 * m + c].abs()))
                .unwrap();
            if piv != c {
                for k in 0..m {
                    basis.swap(c * m + k, piv * m + k);
                    inv.swap(c * m + k, piv * m + k);
                }
            }
            let d = basis[c * m + c];
            debug_assert!(d.abs() > 1e-14, "singular basis during refactor");
            for k in 0..m {
                basis[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = basis[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            basis[r * m + k] -= f * basis[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
        self.recompute_basic_values();
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut rhs = self.b.clone();
        let mut col = vec![0.0; m];
        for j in 0..self.total_vars() {
            if !matches!(self.state[j], VarState::Basic(_)) && self.x[j] != 0.0 {
                self.column(j, &mut col);
                for i in 0..m {
                    rhs[i] -= col[i] * self.x[j];
                }
            }
        }
        for i in 0..m {
            let v: f64 = (0..m).map(|k| self.binv[i * m + k] * rhs[k]).sum();
            self.x[self.head[i]] = v;
        }
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &j) in self.head.iter().enumerate() {
            let cb = self.cost[j];
            if cb != 0.0 {
                for k in 0..m {
                    y[k] += cb * self.binv[i * m + k];
                }
            }
        }
        y
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Picks an entering variable and its direction (+1 increase, -1 decrease).
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.total_vars() {
            let dir = match self.state[j] {
                VarState::Basic(_) => continue,
                _ if self.upper[j] - self.lower[j] <= 0.0 => continue,
                VarState::AtLower => {
                    let d = self.cost[j] - self.col_dot(j, y);
                    if d < -OPT_TOL {
                        (1.0, -d)
                    } else {
                        continue;
                    }
                }
                VarState::AtUpper => {
                    let d = self.cost[j] - self.col_dot(j, y);
                    if d > OPT_TOL {
                        (-1.0, d)
                    } else {
                        continue;
                    }
                }
                VarState::FreeZero => {
                    let d = self.cost[j] - self.col_dot(j, y);
                    if d.abs() > OPT_TOL {
                        (-d.signum(), d.abs())
                    } else {
                        continue;
                    }
                }
            };
            if bland {
                return Some((j, dir.0));
            }
            if best.is_none_or(|(_, _, score)| dir.1 > score) {
                best = Some((j, dir.0, dir.1));
            }
        }
        best.map(|(j, d, _)| (j, d))
    }

    fn run_phase(&mut self) -> Result<PhaseOutcome, LpError> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        let mut stalled = 0usize;
        let mut bland = false;
        loop {
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(LpError::IterationLimit(self.max_iterations));
            }
            let y = self.duals();
            let Some((enter, dir)) = self.price(&y, bland) else {
                return Ok(PhaseOutcome::Optimal);
            };

            self.column(enter, &mut alpha);
            let col = alpha.clone();
            for i in 0..m {
                alpha[i] = (0..m).map(|k| self.binv[i * m + k] * col[k]).sum();
            }

            // Ratio test over basic variables; basic i moves at rate -dir·alpha_i.
            let mut theta = f64::INFINITY;
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..m {
                let rate = -dir * alpha[i];
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let bv = self.head[i];
                let (limit, to_upper) = if rate < 0.0 {
                    (self.lower[bv], false)
                } else {
                    (self.upper[bv], true)
                };
                if !limit.is_finite() {
                    continue;
                }
                let t = ((limit - self.x[bv]) / rate).max(0.0);
                let better = match leave {
                    None => true,
                    Some((r, _)) => {
                        if t < theta - 1e-12 {
                            true
                        } else if t <= theta + 1e-12 {
                            if bland {
                                bv < self.head[r]
                            } else {
                                alpha[i].abs() > alpha[r].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = t;
                    leave = Some((i, to_upper));
                }
            }

            let flip = self.upper[enter] - self.lower[enter];
            let flip = if flip.is_finite() { flip } else { f64::INFINITY };
            if theta.is_infinite() && flip.is_infinite() {
                return Ok(PhaseOutcome::Unbounded);
            }

            let before = self.objective();
            if flip <= theta {
                self.x[enter] += dir * flip;
                for i in 0..m {
                    let bv = self.head[i];
                    self.x[bv] -= dir * flip * alpha[i];
                }
                self.state[enter] = if dir > 0.0 {
                    self.x[enter] = self.upper[enter];
                    VarState::AtUpper
                } else {
                    self.x[enter] = self.lower[enter];
                    VarState::AtLower
                };
            } else {
                let (r, to_upper) = leave.expect("finite ratio implies a leaving row");
                self.x[enter] += dir * theta;
                for i in 0..m {
                    let bv = self.head[i];
                    self.x[bv] -= dir * theta * alpha[i];
                }
                let out = self.head[r];
                if to_upper {
                    self.x[out] = self.upper[out];
                    self.state[out] = VarState::AtUpper;
                } else {
                    self.x[out] = self.lower[out];
                    self.state[out] = VarState::AtLower;
                }
                self.head[r] = enter;
                self.state[enter] = VarState::Basic(r);

                let piv = alpha[r];
                for k in 0..m {
                    self.binv[r * m + k] /= piv;
                }
                for i in 0..m {
                    if i != r && alpha[i] != 0.0 {
                        let f = alpha[i];
                        for k in 0..m {
                            self.binv[i * m + k] -= f * self.binv[r * m + k];
                        }
                    }
                }
                self.pivots_since_refactor += 1;
                if self.pivots_since_refactor >= REFACTOR_EVERY {
                    self.refactor();
                }
            }

            if self.objective() < before - 1e-12 * (1.0 + before.abs()) {
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    bland = true;
                }
            }
        }
    }
}

/// Clamps into the bounds and removes round-off residue next to a bound.
fn snap(x: f64, lo: f64, hi: f64) -> f64 {
    let x = x.clamp(lo, hi);
    let near = |b: f64| b.is_finite() && (x - b).abs() <= 1e-12 * (1.0 + b.abs());
    if near(lo) {
        lo
    } else if near(hi) {
        hi
    } else {
        x
    }
}

/// Solves `problem` to optimality, or classifies it as infeasible or unbounded.
///
/// The result is deterministic for identical input.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let mut t = Tableau::new(problem);
    let n = t.n_struct;

    // Phase one: minimise the artificial mass.
    let has_artificials = t.head.iter().any(|&j| t.is_artificial(j));
    if has_artificials {
        for j in 0..t.total_vars() {
            t.cost[j] = if t.is_artificial(j) { 1.0 } else { 0.0 };
        }
        t.run_phase()?;
        t.refactor();
        let infeas: f64 = (0..t.total_vars())
            .filter(|&j| t.is_artificial(j))
            .map(|j| t.x[j].abs())
            .sum();
        if infeas > FEAS_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective_value: f64::INFINITY,
            });
        }
    }
    for j in 0..t.total_vars() {
        if t.is_artificial(j) {
            t.upper[j] = 0.0;
            t.cost[j] = 0.0;
            if !matches!(t.state[j], VarState::Basic(_)) {
                t.x[j] = 0.0;
                t.state[j] = VarState::AtLower;
            }
        } else {
            t.cost[j] = if j < n { problem.objective[j] } else { 0.0 };
        }
    }

    match t.run_phase()? {
        PhaseOutcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective_value: f64::NEG_INFINITY,
        }),
        PhaseOutcome::Optimal => {
            t.refactor();
            let values: Vec<f64> = (0..n)
                .map(|j| snap(t.x[j], t.lower[j], t.upper[j]))
                .collect();
            let objective_value = problem.objective_at(&values);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                values,
                objective_value,
            })
        }
    }
}
