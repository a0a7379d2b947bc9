//! Two-phase primal simplex over a dense tableau with bounded variables.
//!
//! The model is first standardized: finite lower bounds are shifted to zero,
//! upper-bounded-only variables are mirrored, free variables are split, GE
//! rows are negated to LE, slacks turn inequalities into equalities, and
//! artificials complete the initial basis. Nonbasic variables rest at either
//! bound, so branch-and-bound bound tightening never inflates the row count.
//!
//! Pricing is Dantzig's rule; after a run of degenerate steps it falls back
//! to Bland's rule until strict progress resumes.

use super::SolverConfig;
use crate::model::{RowSense, Sense, StandardFormModel, Triplet};

const ZERO_TOL: f64 = 1e-11;
const RC_TOL: f64 = 1e-9;
const RATIO_EPS: f64 = 1e-9;
const DEGEN_STEP: f64 = 1e-10;
const STALL_THRESHOLD: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

pub(crate) struct SimplexOutcome {
    pub status: LpStatus,
    pub x: Option<Vec<f64>>,
    pub iterations: u64,
}

/// How an original variable maps onto internal nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = lb + x'
    Shift { col: usize, lb: f64 },
    /// x = ub - x'
    Mirror { col: usize, ub: f64 },
    /// x = p - q
    Split { pos: usize, neg: usize },
}

/// Position of a column: nonbasic at a bound, or basic in some row.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ColState {
    AtLower,
    AtUpper,
    Basic(usize),
}

struct Tableau {
    nrows: usize,
    width: usize,
    /// Row-major dense matrix, `nrows x width`.
    mat: Vec<f64>,
    /// Current values of the basic variables, indexed by row.
    vals: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    upper: Vec<f64>,
    cost_phase2: Vec<f64>,
    rc: Vec<f64>,
    iterations: u64,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.mat[i * self.width + j]
    }
}

/// Solve `m` with the given bound vectors (which may tighten the model's own
/// bounds during branch and bound).
pub(crate) fn solve_bounded(
    m: &StandardFormModel,
    lb: &[f64],
    ub: &[f64],
    cfg: &SolverConfig,
) -> SimplexOutcome {
    for j in 0..m.num_vars() {
        if lb[j] > ub[j] {
            return SimplexOutcome {
                status: LpStatus::Infeasible,
                x: None,
                iterations: 0,
            };
        }
    }

    let sign = match m.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };

    // Column layout: structural (with splits), then slacks, then artificials.
    let n = m.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut upper = Vec::new();
    let mut cost = Vec::new();
    let mut next_col = 0usize;
    for j in 0..n {
        if lb[j].is_finite() {
            maps.push(VarMap::Shift { col: next_col, lb: lb[j] });
            upper.push(ub[j] - lb[j]);
            cost.push(sign * m.c[j]);
            next_col += 1;
        } else if ub[j].is_finite() {
            maps.push(VarMap::Mirror { col: next_col, ub: ub[j] });
            upper.push(f64::INFINITY);
            cost.push(-sign * m.c[j]);
            next_col += 1;
        } else {
            maps.push(VarMap::Split { pos: next_col, neg: next_col + 1 });
            upper.push(f64::INFINITY);
            upper.push(f64::INFINITY);
            cost.push(sign * m.c[j]);
            cost.push(-sign * m.c[j]);
            next_col += 2;
        }
    }

    // Per-row sparse assembly in internal columns, with GE negation and
    // constant shifts folded into the rhs.
    let nrows = m.num_rows();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
    let mut rhs = m.b.clone();
    for &Triplet(r, j, v) in &m.a {
        match maps[j] {
            VarMap::Shift { col, lb } => {
                if lb != 0.0 {
                    rhs[r] -= v * lb;
                }
                rows[r].push((col, v));
            }
            VarMap::Mirror { col, ub } => {
                rhs[r] -= v * ub;
                rows[r].push((col, -v));
            }
            VarMap::Split { pos, neg } => {
                rows[r].push((pos, v));
                rows[r].push((neg, -v));
            }
        }
    }
    let mut is_eq = vec![false; nrows];
    for i in 0..nrows {
        match m.row_sense[i] {
            RowSense::Le => {}
            RowSense::Eq => is_eq[i] = true,
            RowSense::Ge => {
                for e in &mut rows[i] {
                    e.1 = -e.1;
                }
                rhs[i] = -rhs[i];
            }
        }
    }

    // Slack per inequality row; flip rows to nonnegative rhs; artificials
    // wherever the slack cannot seed the basis.
    let mut slack_col = vec![usize::MAX; nrows];
    for i in 0..nrows {
        if !is_eq[i] {
            slack_col[i] = next_col;
            upper.push(f64::INFINITY);
            cost.push(0.0);
            next_col += 1;
        }
    }
    let mut flipped = vec![false; nrows];
    let mut needs_artificial = vec![false; nrows];
    let mut n_art = 0usize;
    for i in 0..nrows {
        if rhs[i] < 0.0 {
            flipped[i] = true;
            rhs[i] = -rhs[i];
            for e in &mut rows[i] {
                e.1 = -e.1;
            }
        }
        // A slack with coefficient +1 (i.e. an unflipped LE row) seeds the basis.
        if is_eq[i] || flipped[i] {
            needs_artificial[i] = true;
            n_art += 1;
        }
    }
    let first_artificial = next_col;
    let width = next_col + n_art;

    let mut mat = vec![0.0; nrows * width];
    let mut basis = vec![usize::MAX; nrows];
    let mut art = first_artificial;
    for i in 0..nrows {
        for &(cidx, v) in &rows[i] {
            mat[i * width + cidx] += v;
        }
        if slack_col[i] != usize::MAX {
            mat[i * width + slack_col[i]] = if flipped[i] { -1.0 } else { 1.0 };
        }
        if needs_artificial[i] {
            mat[i * width + art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = slack_col[i];
        }
    }
    for _ in 0..n_art {
        upper.push(f64::INFINITY);
        cost.push(0.0);
    }

    let mut state = vec![ColState::AtLower; width];
    for (i, &bv) in basis.iter().enumerate() {
        state[bv] = ColState::Basic(i);
    }

    let mut t = Tableau {
        nrows,
        width,
        mat,
        vals: rhs,
        basis,
        state,
        upper,
        cost_phase2: cost,
        rc: vec![0.0; width],
        iterations: 0,
    };

    let budget = cfg.iter_limit;

    // Phase 1: drive artificials to zero.
    if n_art > 0 {
        let mut phase1_cost = vec![0.0; width];
        for j in first_artificial..width {
            phase1_cost[j] = 1.0;
        }
        rebuild_reduced_costs(&mut t, &phase1_cost);
        match run(&mut t, &phase1_cost, budget) {
            LpStatus::Optimal => {}
            LpStatus::IterLimit => {
                return SimplexOutcome { status: LpStatus::IterLimit, x: None, iterations: t.iterations }
            }
            // Phase 1 is bounded below by zero; anything else is numerical
            // trouble and is reported as an iteration failure.
            _ => {
                return SimplexOutcome { status: LpStatus::IterLimit, x: None, iterations: t.iterations }
            }
        }
        let bscale = 1.0 + t.vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let infeas: f64 = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv >= first_artificial)
            .map(|(i, _)| t.vals[i].max(0.0))
            .sum();
        if infeas > 1e-7 * bscale {
            return SimplexOutcome { status: LpStatus::Infeasible, x: None, iterations: t.iterations };
        }
        // Lock artificials at zero so they can never re-enter or grow.
        for j in first_artificial..width {
            t.upper[j] = 0.0;
        }
    }

    // Phase 2 on the real objective.
    let phase2_cost = t.cost_phase2.clone();
    rebuild_reduced_costs(&mut t, &phase2_cost);
    let status = run(&mut t, &phase2_cost, budget);
    match status {
        LpStatus::Optimal => {
            let mut internal = vec![0.0; t.width];
            for j in 0..t.width {
                internal[j] = match t.state[j] {
                    ColState::Basic(i) => t.vals[i].max(0.0),
                    ColState::AtLower => 0.0,
                    ColState::AtUpper => t.upper[j],
                };
            }
            let mut x = vec![0.0; n];
            for j in 0..n {
                x[j] = match maps[j] {
                    VarMap::Shift { col, lb } => lb + internal[col],
                    VarMap::Mirror { col, ub } => ub - internal[col],
                    VarMap::Split { pos, neg } => internal[pos] - internal[neg],
                };
            }
            SimplexOutcome { status: LpStatus::Optimal, x: Some(x), iterations: t.iterations }
        }
        other => SimplexOutcome { status: other, x: None, iterations: t.iterations },
    }
}

fn rebuild_reduced_costs(t: &mut Tableau, cost: &[f64]) {
    t.rc.copy_from_slice(cost);
    for i in 0..t.nrows {
        let cb = cost[t.basis[i]];
        if cb != 0.0 {
            let row = i * t.width;
            for j in 0..t.width {
                t.rc[j] -= cb * t.mat[row + j];
            }
        }
    }
}

/// Pivot loop for one phase. Returns Optimal when no eligible entering
/// column remains.
fn run(t: &mut Tableau, _cost: &[f64], budget: u64) -> LpStatus {
    let mut degenerate_run: u32 = 0;
    loop {
        if t.iterations >= budget {
            return LpStatus::IterLimit;
        }
        let bland = degenerate_run >= STALL_THRESHOLD;
        let entering = select_entering(t, bland);
        let (j, dir) = match entering {
            Some(e) => e,
            None => return LpStatus::Optimal,
        };
        t.iterations += 1;

        // Ratio test: the entering column moves by `step` in direction `dir`,
        // each basic row i changes by -dir*step*mat[i][j].
        let mut step = t.upper[j]; // bound-flip distance (may be infinite)
        let mut leave: Option<(usize, bool)> = None; // (row, leaves_at_upper)
        for i in 0..t.nrows {
            let g = dir * t.at(i, j);
            if g > RATIO_EPS {
                let ratio = t.vals[i].max(0.0) / g;
                if ratio < step - RATIO_EPS
                    || (ratio < step + RATIO_EPS && better_leave(t, &leave, i, j, bland))
                {
                    step = ratio;
                    leave = Some((i, false));
                }
            } else if g < -RATIO_EPS {
                let ub_i = t.upper[t.basis[i]];
                if ub_i.is_finite() {
                    let ratio = (ub_i - t.vals[i]).max(0.0) / (-g);
                    if ratio < step - RATIO_EPS
                        || (ratio < step + RATIO_EPS && better_leave(t, &leave, i, j, bland))
                    {
                        step = ratio;
                        leave = Some((i, true));
                    }
                }
            }
        }
        if step.is_infinite() {
            return LpStatus::Unbounded;
        }

        if step < DEGEN_STEP {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }

        match leave {
            None => {
                // Bound flip: the entering variable crosses to its other bound.
                for i in 0..t.nrows {
                    let a = t.at(i, j);
                    if a != 0.0 {
                        t.vals[i] -= dir * step * a;
                    }
                }
                t.state[j] = if dir > 0.0 { ColState::AtUpper } else { ColState::AtLower };
            }
            Some((r, leaves_at_upper)) => {
                for i in 0..t.nrows {
                    let a = t.at(i, j);
                    if a != 0.0 {
                        t.vals[i] -= dir * step * a;
                    }
                }
                let leaving = t.basis[r];
                t.state[leaving] = if leaves_at_upper { ColState::AtUpper } else { ColState::AtLower };
                t.vals[r] = if dir > 0.0 { step } else { t.upper[j] - step };

                // Eliminate column j from every other row and the rc row.
                let piv = t.at(r, j);
                let inv = 1.0 / piv;
                let row_r = r * t.width;
                for k in 0..t.width {
                    t.mat[row_r + k] *= inv;
                }
                t.mat[row_r + j] = 1.0;
                for i in 0..t.nrows {
                    if i == r {
                        continue;
                    }
                    let f = t.at(i, j);
                    if f.abs() > ZERO_TOL {
                        let row_i = i * t.width;
                        for k in 0..t.width {
                            let delta = f * t.mat[row_r + k];
                            let v = t.mat[row_i + k] - delta;
                            t.mat[row_i + k] = if v.abs() < 1e-13 { 0.0 } else { v };
                        }
                        t.mat[row_i + j] = 0.0;
                    }
                }
                let f = t.rc[j];
                if f != 0.0 {
                    for k in 0..t.width {
                        t.rc[k] -= f * t.mat[row_r + k];
                    }
                    t.rc[j] = 0.0;
                }
                t.basis[r] = j;
                t.state[j] = ColState::Basic(r);
            }
        }
    }
}

/// Tie-break among equal ratios: under Bland, smallest leaving variable
/// index; otherwise largest pivot magnitude (then smallest row).
fn better_leave(t: &Tableau, current: &Option<(usize, bool)>, cand_row: usize, j: usize, bland: bool) -> bool {
    let (cur_row, _) = match current {
        None => return true,
        Some(c) => *c,
    };
    if bland {
        t.basis[cand_row] < t.basis[cur_row]
    } else {
        let cur = t.at(cur_row, j).abs();
        let cand = t.at(cand_row, j).abs();
        cand > cur + RATIO_EPS || (cand > cur - RATIO_EPS && cand_row < cur_row)
    }
}

fn select_entering(t: &Tableau, bland: bool) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None; // (col, dir, score)
    for j in 0..t.width {
        let (eligible, dir) = match t.state[j] {
            ColState::AtLower => (t.rc[j] < -RC_TOL && t.upper[j] > ZERO_TOL, 1.0),
            ColState::AtUpper => (t.rc[j] > RC_TOL, -1.0),
            ColState::Basic(_) => (false, 0.0),
        };
        if !eligible {
            continue;
        }
        if bland {
            return Some((j, dir));
        }
        let score = t.rc[j].abs();
        match best {
            Some((_, _, s)) if s >= score => {}
            _ => best = Some((j, dir, score)),
        }
    }
    best.map(|(j, dir, _)| (j, dir))
}
