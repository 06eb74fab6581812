//! Linear programs with bounded variables and a self-contained solver.
//!
//! Problems are always minimisations. Variables carry explicit (possibly
//! infinite) bounds; constraints are sparse rows with a relation and a finite
//! right-hand side.

mod simplex;

use std::fmt::{self, Write as _};

use thiserror::Error;

pub use simplex::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// One linear row: `Σ coeff·x  relation  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    /// Cost per variable (minimised).
    pub objective: Vec<f64>,
    /// `(lower, upper)` per variable; either side may be infinite.
    pub bounds: Vec<(f64, f64)>,
    pub constraints: Vec<Constraint>,
    /// Optional variable names, only used by [`LpProblem::dump`].
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; empty unless `status` is `Optimal`.
    pub values: Vec<f64>,
    /// `+inf` when infeasible, `-inf` when unbounded.
    pub objective_value: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("variable {var}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { var: usize, lower: f64, upper: f64 },
    #[error("variable {var}: NaN bound or objective coefficient")]
    NanVariable { var: usize },
    #[error("constraint {row} references undeclared variable {var}")]
    UnknownVariable { row: usize, var: usize },
    #[error("constraint {row}: coefficient is not finite")]
    NonFiniteCoefficient { row: usize },
    #[error("constraint {row}: right-hand side is not finite")]
    NonFiniteRhs { row: usize },
    #[error("objective and bounds disagree on the variable count ({objective} vs {bounds})")]
    ShapeMismatch { objective: usize, bounds: usize },
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lower, upper));
        self.names.push(name.into());
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    /// Checks the structural invariants the solver relies on.
    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.bounds.len() {
            return Err(LpError::ShapeMismatch {
                objective: self.objective.len(),
                bounds: self.bounds.len(),
            });
        }
        for (var, (&(lower, upper), &c)) in self.bounds.iter().zip(&self.objective).enumerate() {
            if lower.is_nan() || upper.is_nan() || !c.is_finite() {
                return Err(LpError::NanVariable { var });
            }
            if lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
                return Err(LpError::InvertedBounds { var, lower, upper });
            }
        }
        for (row, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(LpError::NonFiniteRhs { row });
            }
            for &(var, a) in &con.coeffs {
                if var >= self.num_vars() {
                    return Err(LpError::UnknownVariable { row, var });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFiniteCoefficient { row });
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any bound or constraint at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (&x, &(lo, hi)) in values.iter().zip(&self.bounds) {
            worst = worst.max(lo - x).max(x - hi);
        }
        for con in &self.constraints {
            let lhs: f64 = con.coeffs.iter().map(|&(j, a)| a * values[j]).sum();
            let v = match con.relation {
                Relation::Le => lhs - con.rhs,
                Relation::Ge => con.rhs - lhs,
                Relation::Eq => (lhs - con.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn objective_at(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    fn var_name(&self, j: usize) -> String {
        match self.names.get(j) {
            Some(n) if !n.is_empty() => n.clone(),
            _ => format!("x{j}"),
        }
    }

    /// Plain-text LP-style listing for debugging. Not a stable format.
    pub fn dump(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(out, " {:+} {}", c, self.var_name(j));
            }
        }
        out.push_str("\nSubject To\n");
        for (i, con) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            for &(j, a) in &con.coeffs {
                let _ = write!(out, " {:+} {}", a, self.var_name(j));
            }
            let _ = writeln!(out, " {} {}", con.relation, con.rhs);
        }
        out.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(out, " {} <= {} <= {}", lo, self.var_name(j), hi);
        }
        out.push_str("End\n");
        out
    }
}
