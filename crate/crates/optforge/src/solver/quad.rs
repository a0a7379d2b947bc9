//! Secant linearization of separable convex quadratic objective terms.
//!
//! Each term `q_j x_j^2` (q_j >= 0, finite bounds) is replaced by an epigraph
//! variable constrained from below by the chords of the parabola over
//! `[lb_j, ub_j]`. For a convex function the chord interpolant equals the
//! pointwise maximum of the chord lines, so the substitution over-approximates
//! the term by at most `(ub-lb)^2 q / (4 s^2)` per term with `s` segments.

use super::SolveError;
use crate::model::{RowSense, Sense, StandardFormModel, Triplet, VarType};

/// Reported over-approximation bound for one linearized term.
#[derive(Debug, Clone, PartialEq)]
pub struct TermBound {
    pub var: usize,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct Linearization {
    /// Pure MILP whose first `n` columns are the original variables.
    pub model: StandardFormModel,
    pub term_bounds: Vec<TermBound>,
    /// Sum of the per-term bounds: the linearized optimum exceeds the true
    /// optimum by at most this much.
    pub total_bound: f64,
}

pub fn linearize_quadratic(
    m: &StandardFormModel,
    segments: usize,
) -> Result<Linearization, SolveError> {
    let q = m
        .q_diag
        .as_ref()
        .ok_or_else(|| SolveError::Precondition("q_diag absent".into()))?;
    if segments == 0 {
        return Err(SolveError::Precondition("segments must be >= 1".into()));
    }
    if m.sense != Sense::Min {
        return Err(SolveError::Precondition(
            "quadratic linearization requires a minimization objective".into(),
        ));
    }
    for (j, &qj) in q.iter().enumerate() {
        if qj < 0.0 {
            return Err(SolveError::Precondition(format!(
                "q_diag[{j}] = {qj} is negative"
            )));
        }
        if qj > 0.0 && (!m.lb[j].is_finite() || !m.ub[j].is_finite()) {
            return Err(SolveError::UnboundedQuadratic(j));
        }
    }

    let mut out = m.clone();
    out.q_diag = None;
    let mut term_bounds = Vec::new();
    let mut total = 0.0;
    for (j, &qj) in q.iter().enumerate() {
        if qj == 0.0 {
            continue;
        }
        let (lo, hi) = (m.lb[j], m.ub[j]);
        let width = hi - lo;
        let bound = width * width * qj / (4.0 * (segments * segments) as f64);
        term_bounds.push(TermBound { var: j, bound });
        total += bound;

        // Epigraph variable y >= chord_k(x) for every segment; its unit cost
        // replaces the quadratic term.
        let y = out.c.len();
        out.c.push(1.0);
        out.lb.push(0.0);
        out.ub.push(f64::INFINITY);
        out.vartype.push(VarType::Continuous);
        for k in 0..segments {
            let t0 = lo + width * k as f64 / segments as f64;
            let t1 = lo + width * (k + 1) as f64 / segments as f64;
            let slope = qj * (t0 + t1);
            let intercept = -qj * t0 * t1; // chord: y = slope*x + intercept
            // slope*x - y <= -intercept
            let r = out.b.len();
            out.a.push(Triplet(r, j, slope));
            out.a.push(Triplet(r, y, -1.0));
            out.row_sense.push(RowSense::Le);
            out.b.push(-intercept);
        }
    }
    Ok(Linearization {
        model: out,
        term_bounds,
        total_bound: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelBuilder;
    use crate::solver::{solve_lp, SolveStatus, SolverConfig};

    #[test]
    fn single_segment_is_the_secant() {
        // q = 1 on [0, 1], one segment: the term becomes y >= x (secant of x^2).
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(0.0, 0.0, 1.0);
        mb.quad(x, 1.0);
        let lin = linearize_quadratic(&mb.build(), 1).unwrap();
        assert_eq!(lin.term_bounds.len(), 1);
        assert!((lin.term_bounds[0].bound - 0.25).abs() < 1e-12);
        // one chord row: 1*x - y <= 0
        assert_eq!(lin.model.num_rows(), 1);
        assert_eq!(lin.model.b[0], 0.0);
    }

    #[test]
    fn reported_bound_formula() {
        // q = 1 on [0, 2], 2 segments: 4 * 1 / (4 * 4) = 0.25
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(0.0, 0.0, 2.0);
        mb.quad(x, 1.0);
        let lin = linearize_quadratic(&mb.build(), 2).unwrap();
        assert!((lin.total_bound - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unbounded_quadratic_variable_rejected() {
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(0.0, 0.0, f64::INFINITY);
        mb.quad(x, 1.0);
        assert!(matches!(
            linearize_quadratic(&mb.build(), 4),
            Err(SolveError::UnboundedQuadratic(0))
        ));
    }

    /// 1-D convex oracle: ternary search on g(x) = c*x + q*x^2 over [lo, hi].
    fn ternary_min(c: f64, q: f64, lo: f64, hi: f64) -> f64 {
        let g = |x: f64| c * x + q * x * x;
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if g(m1) < g(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        g(0.5 * (lo + hi))
    }

    #[test]
    fn linearized_optimum_within_reported_bound_of_true_optimum() {
        // Power-style toy: loss coefficient rate*R/V^2 with rate = R = V = 1,
        // i.e. q = 1, plus a linear pull c = -3 on x in [0, 2].
        for &segments in &[1usize, 2, 4, 8, 16] {
            let mut mb = ModelBuilder::new(Sense::Min);
            let x = mb.continuous(-3.0, 0.0, 2.0);
            mb.quad(x, 1.0);
            let m = mb.build();
            let lin = linearize_quadratic(&m, segments).unwrap();
            let res = solve_lp(&lin.model, &SolverConfig::default()).unwrap();
            assert_eq!(res.status, SolveStatus::Optimal);
            let lin_obj = res.objective.unwrap();
            let true_obj = ternary_min(-3.0, 1.0, 0.0, 2.0);
            let gap = (lin_obj - true_obj).abs();
            assert!(
                gap <= lin.total_bound + 1e-9,
                "segments {segments}: gap {gap} exceeds bound {}",
                lin.total_bound
            );
        }
    }
}
