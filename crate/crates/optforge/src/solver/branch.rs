//! Best-bound branch and bound over the bounded-variable simplex.
//!
//! Branching is most-fractional (ties to the lowest column index), node
//! selection is best-bound (ties to the lowest node id), so the search is
//! deterministic for a fixed model and config.

use super::simplex::{self, LpStatus};
use super::{SolveResult, SolveStatus, SolverConfig};
use crate::model::{evaluate_point, Point, Sense, StandardFormModel};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

struct Node {
    bound: f64,
    id: u64,
    lb: Vec<f64>,
    ub: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: rank lower bounds (then lower ids) higher.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

pub(crate) fn branch_and_bound(m: &StandardFormModel, cfg: &SolverConfig) -> SolveResult {
    let sign = match m.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let int_vars: Vec<usize> = (0..m.num_vars())
        .filter(|&j| m.vartype[j].is_integral())
        .collect();

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        lb: m.lb.clone(),
        ub: m.ub.clone(),
    });
    let mut next_id: u64 = 1;
    let mut nodes_solved: u64 = 0;
    let mut iterations: u64 = 0;
    let mut incumbent: Option<(f64, Vec<f64>)> = None; // internal (minimized) value
    let mut limit_hit = false;

    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= best - cfg.opt_gap {
                continue;
            }
        }
        if nodes_solved >= cfg.node_limit {
            limit_hit = true;
            break;
        }
        nodes_solved += 1;

        let out = simplex::solve_bounded(m, &node.lb, &node.ub, cfg);
        iterations += out.iterations;
        let x = match out.status {
            LpStatus::Optimal => out.x.expect("optimal relaxation carries a point"),
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if nodes_solved == 1 {
                    return SolveResult::terminal(SolveStatus::Unbounded, nodes_solved, iterations);
                }
                continue;
            }
            LpStatus::IterLimit => {
                return SolveResult::terminal(SolveStatus::IterLimit, nodes_solved, iterations);
            }
        };
        let z: f64 = sign * m.c.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
        if let Some((best, _)) = &incumbent {
            if z >= best - cfg.opt_gap {
                continue;
            }
        }

        // Most-fractional integer variable, ties to the lowest index.
        let mut branch_var: Option<(usize, f64)> = None;
        for &j in &int_vars {
            let dist = (x[j] - x[j].round()).abs();
            if dist > 0.0 {
                let better = match branch_var {
                    None => true,
                    Some((_, d)) => dist > d + 1e-12,
                };
                if better {
                    branch_var = Some((j, dist));
                }
            }
        }

        // A point only counts as integral if snapping the integer variables
        // keeps it feasible; a vertex that is fractional by less than int_tol
        // can still break a tight row once rounded, and accepting it would
        // poison the incumbent bound.
        let integral_candidate = match branch_var {
            None => true,
            Some((_, dist)) => dist <= cfg.int_tol,
        };
        if integral_candidate {
            let mut snapped = x.clone();
            for &j in &int_vars {
                snapped[j] = snapped[j].round();
            }
            let check = evaluate_point(m, &Point::new(snapped.clone()), cfg.feas_tol, cfg.int_tol)
                .expect("dimensions match by construction");
            if check.feasible {
                let z_snapped: f64 =
                    sign * m.c.iter().zip(&snapped).map(|(c, v)| c * v).sum::<f64>();
                let improves = match &incumbent {
                    None => true,
                    Some((best, _)) => z_snapped < *best,
                };
                if improves {
                    incumbent = Some((z_snapped, snapped));
                }
                continue;
            }
            // Rounding broke a row: fall through and branch on the residual
            // fractionality (dist > 0 whenever this can happen).
        }

        match branch_var {
            None => {}
            Some((j, _)) => {
                let mut down = Node {
                    bound: z,
                    id: next_id,
                    lb: node.lb.clone(),
                    ub: node.ub.clone(),
                };
                down.ub[j] = x[j].floor();
                let mut up = Node {
                    bound: z,
                    id: next_id + 1,
                    lb: node.lb,
                    ub: node.ub,
                };
                up.lb[j] = x[j].ceil();
                next_id += 2;
                heap.push(down);
                heap.push(up);
            }
        }
    }

    if limit_hit {
        return SolveResult::terminal(SolveStatus::IterLimit, nodes_solved, iterations);
    }
    let (_, x_best) = match incumbent {
        Some(pair) => pair,
        None => return SolveResult::terminal(SolveStatus::Infeasible, nodes_solved, iterations),
    };

    let x_final =
        polish(m, &x_best, cfg, &int_vars, &mut iterations).unwrap_or(x_best);
    let objective = m.objective_at(&x_final);
    SolveResult {
        status: SolveStatus::Optimal,
        objective: Some(objective),
        point: Some(Point::new(x_final)),
        node_count: nodes_solved,
        iterations,
    }
}

/// Re-solve with all integer variables fixed at their rounded values so the
/// returned point is exactly integral and the continuous part is optimal for
/// that fixing.
fn polish(
    m: &StandardFormModel,
    x: &[f64],
    cfg: &SolverConfig,
    int_vars: &[usize],
    iterations: &mut u64,
) -> Option<Vec<f64>> {
    if int_vars.is_empty() {
        return Some(x.to_vec());
    }
    let mut lb = m.lb.clone();
    let mut ub = m.ub.clone();
    for &j in int_vars {
        let r = x[j].round();
        if r < m.lb[j] - cfg.feas_tol || r > m.ub[j] + cfg.feas_tol {
            return None;
        }
        lb[j] = r;
        ub[j] = r;
    }
    let out = simplex::solve_bounded(m, &lb, &ub, cfg);
    *iterations += out.iterations;
    match out.status {
        LpStatus::Optimal => out.x,
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelBuilder, RowSense};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn knapsack_model(values: &[f64], weights: &[f64], cap: f64) -> StandardFormModel {
        let mut mb = ModelBuilder::new(Sense::Max);
        let vars: Vec<usize> = values.iter().map(|&v| mb.binary(v)).collect();
        let coeffs: Vec<(usize, f64)> = vars.iter().zip(weights).map(|(&j, &w)| (j, w)).collect();
        mb.row(&coeffs, RowSense::Le, cap);
        mb.build()
    }

    fn knapsack_brute(values: &[f64], weights: &[f64], cap: f64) -> f64 {
        let n = values.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let mut w = 0.0;
            let mut v = 0.0;
            for j in 0..n {
                if mask >> j & 1 == 1 {
                    w += weights[j];
                    v += values[j];
                }
            }
            if w <= cap && v > best {
                best = v;
            }
        }
        best
    }

    #[test]
    fn random_knapsacks_match_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_001);
        let cfg = SolverConfig::default();
        for _ in 0..40 {
            let n = 8;
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..20.0)).collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..15.0)).collect();
            let cap = rng.gen_range(10.0..50.0);
            let m = knapsack_model(&values, &weights, cap);
            let res = branch_and_bound(&m, &cfg);
            assert_eq!(res.status, SolveStatus::Optimal);
            let expected = knapsack_brute(&values, &weights, cap);
            assert!(
                (res.objective.unwrap() - expected).abs() < 1e-7,
                "got {} want {expected}",
                res.objective.unwrap()
            );
        }
    }

    #[test]
    fn deterministic_node_counts() {
        let values = [9.0, 7.0, 6.5, 3.2, 8.1, 2.9, 4.4, 5.5];
        let weights = [4.0, 3.5, 3.0, 1.5, 4.2, 1.1, 2.3, 2.8];
        let m = knapsack_model(&values, &weights, 11.0);
        let cfg = SolverConfig::default();
        let a = branch_and_bound(&m, &cfg);
        let b = branch_and_bound(&m, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_integer_model() {
        // 2x = 1 with x integer is infeasible.
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.integer(1.0, 0.0, 10.0);
        mb.row(&[(x, 2.0)], RowSense::Eq, 1.0);
        let res = branch_and_bound(&mb.build(), &SolverConfig::default());
        assert_eq!(res.status, SolveStatus::Infeasible);
        assert!(res.objective.is_none() && res.point.is_none());
    }

    #[test]
    fn node_limit_reports_iter_limit_status() {
        let values = [9.0, 7.0, 6.5, 3.2, 8.1, 2.9, 4.4, 5.5];
        let weights = [4.0, 3.5, 3.0, 1.5, 4.2, 1.1, 2.3, 2.8];
        let m = knapsack_model(&values, &weights, 11.0);
        let cfg = SolverConfig {
            node_limit: 2,
            ..SolverConfig::default()
        };
        let res = branch_and_bound(&m, &cfg);
        assert_eq!(res.status, SolveStatus::IterLimit);
    }

    #[test]
    fn mixed_integer_point_is_exactly_integral() {
        let mut mb = ModelBuilder::new(Sense::Max);
        let x = mb.integer(2.0, 0.0, 9.0);
        let y = mb.continuous(1.0, 0.0, f64::INFINITY);
        mb.row(&[(x, 1.7), (y, 1.0)], RowSense::Le, 10.0);
        let res = branch_and_bound(&mb.build(), &SolverConfig::default());
        assert_eq!(res.status, SolveStatus::Optimal);
        let p = res.point.unwrap();
        assert_eq!(p.x[0], p.x[0].round());
        // max 2x + y with 1.7x + y <= 10: per unit of x we trade 1.7 of y for
        // gain 2 - 1.7 = 0.3, so x = 5 (its row cap), y = 1.5.
        assert_eq!(p.x[0], 5.0);
        assert!((p.x[1] - 1.5).abs() < 1e-9);
    }
}
