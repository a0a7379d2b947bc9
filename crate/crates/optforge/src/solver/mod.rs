//! Built-in LP/MILP solving: bounded-variable primal simplex, best-bound
//! branch and bound, secant linearization of separable quadratic objectives,
//! and a subprocess adapter contract for external solvers.

mod adapter;
mod branch;
mod quad;
mod simplex;

pub use adapter::{external_solve, result_from_wire_json, result_to_wire_json, ExecCause, ExecError, SolverAdapter};
pub use quad::{linearize_quadratic, Linearization, TermBound};

use crate::model::{Point, StandardFormModel, VarType};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    #[serde(rename = "OPTIMAL")]
    Optimal,
    #[serde(rename = "INFEASIBLE")]
    Infeasible,
    #[serde(rename = "UNBOUNDED")]
    Unbounded,
    #[serde(rename = "ITER_LIMIT")]
    IterLimit,
}

/// Outcome of a solve. `objective` and `point` are present iff the status is
/// `Optimal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub point: Option<Point>,
    pub node_count: u64,
    pub iterations: u64,
}

impl SolveResult {
    fn terminal(status: SolveStatus, node_count: u64, iterations: u64) -> Self {
        SolveResult {
            status,
            objective: None,
            point: None,
            node_count,
            iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub int_tol: f64,
    /// Absolute optimality gap used for branch-and-bound pruning.
    pub opt_gap: f64,
    pub node_limit: u64,
    /// Simplex iteration budget per LP solve.
    pub iter_limit: u64,
    /// Piecewise segments per quadratic objective term.
    pub qp_segments: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feas_tol: 1e-6,
            int_tol: 1e-5,
            opt_gap: 1e-9,
            node_limit: 500_000,
            iter_limit: 100_000,
            qp_segments: 32,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadratic variable {0} has an unbounded range")]
    UnboundedQuadratic(usize),
}

/// Solve a pure LP. All variables must be continuous and `q_diag` absent.
pub fn solve_lp(m: &StandardFormModel, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    if m.vartype.iter().any(|&t| t != VarType::Continuous) {
        return Err(SolveError::Precondition(
            "solve_lp requires all variables continuous".into(),
        ));
    }
    if m.q_diag.is_some() {
        return Err(SolveError::Precondition(
            "solve_lp does not accept quadratic objectives".into(),
        ));
    }
    let out = simplex::solve_bounded(m, &m.lb, &m.ub, cfg);
    Ok(match out.status {
        simplex::LpStatus::Optimal => {
            let x = out.x.expect("optimal LP carries a point");
            let obj = m.objective_at(&x);
            SolveResult {
                status: SolveStatus::Optimal,
                objective: Some(obj),
                point: Some(Point::new(x)),
                node_count: 1,
                iterations: out.iterations,
            }
        }
        simplex::LpStatus::Infeasible => {
            SolveResult::terminal(SolveStatus::Infeasible, 1, out.iterations)
        }
        simplex::LpStatus::Unbounded => {
            SolveResult::terminal(SolveStatus::Unbounded, 1, out.iterations)
        }
        simplex::LpStatus::IterLimit => {
            SolveResult::terminal(SolveStatus::IterLimit, 1, out.iterations)
        }
    })
}

/// Solve a MILP (or LP) by branch and bound. `q_diag` must have been removed
/// by [`linearize_quadratic`] beforehand.
pub fn solve_milp(m: &StandardFormModel, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    if m.q_diag.is_some() {
        return Err(SolveError::Precondition(
            "solve_milp requires the quadratic objective to be linearized first".into(),
        ));
    }
    Ok(branch::branch_and_bound(m, cfg))
}

/// Solve any supported model: linearizes a quadratic objective when present,
/// then dispatches to branch and bound. The returned objective is always
/// evaluated on the *original* model at the returned point, so quadratic
/// objectives are exact at the solution even though the search used the
/// piecewise relaxation.
pub fn solve_auto(m: &StandardFormModel, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let has_quad = m.q_diag.as_ref().map(|q| q.iter().any(|&v| v != 0.0)).unwrap_or(false);
    if !has_quad {
        let mut plain = m.clone();
        plain.q_diag = None;
        return solve_milp(&plain, cfg);
    }
    let lin = linearize_quadratic(m, cfg.qp_segments.max(1) as usize)?;
    let mut res = solve_milp(&lin.model, cfg)?;
    if res.status == SolveStatus::Optimal {
        let full = res.point.take().expect("optimal result carries a point");
        let x: Vec<f64> = full.x[..m.num_vars()].to_vec();
        res.objective = Some(m.objective_at(&x));
        res.point = Some(Point::new(x));
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelBuilder, RowSense, Sense};

    #[test]
    fn lp_two_variable_box() {
        // min -x1 - x2  s.t.  x1 <= 1, x2 <= 1, x >= 0
        let mut mb = ModelBuilder::new(Sense::Min);
        let x1 = mb.continuous(-1.0, 0.0, f64::INFINITY);
        let x2 = mb.continuous(-1.0, 0.0, f64::INFINITY);
        mb.row(&[(x1, 1.0)], RowSense::Le, 1.0);
        mb.row(&[(x2, 1.0)], RowSense::Le, 1.0);
        let res = solve_lp(&mb.build(), &SolverConfig::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective.unwrap() + 2.0).abs() < 1e-9);
        let p = res.point.unwrap();
        assert!((p.x[0] - 1.0).abs() < 1e-9 && (p.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lp_unbounded_free_descent() {
        // min x with x free and only a lower-side constraint: x >= 1.
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(1.0, f64::NEG_INFINITY, f64::INFINITY);
        mb.row(&[(x, -1.0)], RowSense::Le, -1.0); // x >= 1
        // wait: -x <= -1 means x >= 1; min x over x >= 1 is bounded at 1.
        let res = solve_lp(&mb.build(), &SolverConfig::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective.unwrap() - 1.0).abs() < 1e-9);

        // Flip the cost: min -x over x >= 1 is unbounded.
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(-1.0, f64::NEG_INFINITY, f64::INFINITY);
        mb.row(&[(x, -1.0)], RowSense::Le, -1.0);
        let res = solve_lp(&mb.build(), &SolverConfig::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Unbounded);
    }

    #[test]
    fn lp_rejects_integer_vars() {
        let mut mb = ModelBuilder::new(Sense::Min);
        mb.integer(1.0, 0.0, 5.0);
        assert!(solve_lp(&mb.build(), &SolverConfig::default()).is_err());
    }

    #[test]
    fn milp_truncates_fractional_box() {
        // max 3x, x integer in [0, 2.5]  ->  x = 2, obj 6
        let mut mb = ModelBuilder::new(Sense::Max);
        mb.integer(3.0, 0.0, 2.5);
        let res = solve_milp(&mb.build(), &SolverConfig::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective.unwrap() - 6.0).abs() < 1e-9);
        assert!((res.point.unwrap().x[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn milp_integral_relaxation_needs_one_node() {
        // max x + y s.t. x <= 2, y <= 3, integers: relaxation already integral.
        let mut mb = ModelBuilder::new(Sense::Max);
        let x = mb.integer(1.0, 0.0, 2.0);
        let y = mb.integer(1.0, 0.0, 3.0);
        mb.row(&[(x, 1.0)], RowSense::Le, 2.0);
        mb.row(&[(y, 1.0)], RowSense::Le, 3.0);
        let res = solve_milp(&mb.build(), &SolverConfig::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.node_count, 1);
        assert!((res.objective.unwrap() - 5.0).abs() < 1e-9);
    }
}
