//! Standard-form optimization models, points, and feasibility evaluation.
//!
//! Every other module speaks this interchange: a (possibly mixed-integer)
//! linear model `min/max c'x  s.t.  Ax {<=,>=,=} b,  lb <= x <= ub`, with an
//! optional separable quadratic objective term `sum q_j x_j^2`. The JSON form
//! produced by [`StandardFormModel::to_json`] is the bit-exact wire format for
//! candidates and ground truth.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default absolute feasibility tolerance for rows and bounds.
pub const DEFAULT_FEAS_TOL: f64 = 1e-6;
/// Default tolerance for deciding that a value is integral.
pub const DEFAULT_INT_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "MIN")]
    Min,
    #[serde(rename = "MAX")]
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    #[serde(rename = "LE")]
    Le,
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "EQ")]
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarType {
    #[serde(rename = "CONTINUOUS")]
    Continuous,
    #[serde(rename = "INTEGER")]
    Integer,
    #[serde(rename = "BINARY")]
    Binary,
}

impl VarType {
    pub fn is_integral(self) -> bool {
        matches!(self, VarType::Integer | VarType::Binary)
    }
}

/// One nonzero of the sparse constraint matrix, serialized as `[row, col, val]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet(pub usize, pub usize, pub f64);

/// A mixed-integer linear model in standard form.
///
/// Dimensions: `c`, `lb`, `ub`, `vartype` (and `q_diag` when present) have
/// length `n`; `row_sense` and `b` have length `m`; triplets index into
/// `m x n`. Infinite bounds are `f64::NEG_INFINITY` / `f64::INFINITY` and
/// serialize as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFormModel {
    pub sense: Sense,
    pub c: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Triplet>,
    pub row_sense: Vec<RowSense>,
    pub b: Vec<f64>,
    #[serde(with = "lower_bound_vec")]
    pub lb: Vec<f64>,
    #[serde(with = "upper_bound_vec")]
    pub ub: Vec<f64>,
    pub vartype: Vec<VarType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_diag: Option<Vec<f64>>,
}

/// JSON encoding of bound vectors: finite values as numbers, infinities as
/// null (JSON has no infinity literal). The sign of a null bound comes from
/// which side it sits on.
macro_rules! bound_vec_codec {
    ($name:ident, $missing:expr) => {
        mod $name {
            use serde::de::Error;
            use serde::{Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(v: &[f64], ser: S) -> Result<S::Ok, S::Error> {
                ser.collect_seq(v.iter().map(|&x| if x.is_finite() { Some(x) } else { None }))
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
                let raw: Vec<Option<f64>> = Vec::deserialize(de)?;
                raw.into_iter()
                    .enumerate()
                    .map(|(i, x)| match x {
                        Some(v) if v.is_nan() => Err(D::Error::custom(format!("bound {i} is NaN"))),
                        Some(v) => Ok(v),
                        None => Ok($missing),
                    })
                    .collect()
            }
        }
    };
}

bound_vec_codec!(lower_bound_vec, f64::NEG_INFINITY);
bound_vec_codec!(upper_bound_vec, f64::INFINITY);

impl StandardFormModel {
    /// Number of structural variables.
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// Number of constraint rows.
    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    /// Serialize to the canonical JSON interchange document.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    /// Parse a model from its JSON interchange form.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let mut m: StandardFormModel =
            serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        // nulls in bound vectors arrive as NaN sentinels; restore signed infinities
        for v in &mut m.lb {
            if v.is_nan() {
                *v = f64::NEG_INFINITY;
            }
        }
        for v in &mut m.ub {
            if v.is_nan() {
                *v = f64::INFINITY;
            }
        }
        Ok(m)
    }

    /// Row activities `Ax` for a point of matching dimension.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows()];
        for &Triplet(r, c, v) in &self.a {
            act[r] += v * x[c];
        }
        act
    }

    /// Dense row-major copy of `A`; intended for small models only.
    pub fn dense_matrix(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.num_vars()]; self.num_rows()];
        for &Triplet(r, c, v) in &self.a {
            dense[r][c] += v;
        }
        dense
    }

    /// Objective value `c.x` plus the separable quadratic term when present.
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        let mut z: f64 = self.c.iter().zip(x).map(|(ci, xi)| ci * xi).sum();
        if let Some(q) = &self.q_diag {
            z += q.iter().zip(x).map(|(qi, xi)| qi * xi * xi).sum::<f64>();
        }
        z
    }
}

/// A candidate or optimal point in variable space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>) -> Self {
        Point { x }
    }
}

/// Verified optimum attached to a generated instance. Non-optimal outcomes
/// are rejected upstream, so the status is always `OPTIMAL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub objective: f64,
    pub status: String,
    pub solution: Point,
    pub solver_id: String,
}

impl GroundTruth {
    pub fn new(objective: f64, solution: Point, solver_id: impl Into<String>) -> Self {
        GroundTruth {
            objective,
            status: "OPTIMAL".to_string(),
            solution,
            solver_id: solver_id.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("model parse error: {0}")]
    Parse(String),
}

/// A single invariant violation found by [`validate_model`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub index: Option<usize>,
    pub message: String,
}

impl Violation {
    fn new(field: &str, index: Option<usize>, message: impl Into<String>) -> Self {
        Violation {
            field: field.to_string(),
            index,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{}]: {}", self.field, i, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Check every structural invariant of a model. Violations are data, not
/// failures: an empty list means the model is well formed.
pub fn validate_model(m: &StandardFormModel) -> Vec<Violation> {
    let n = m.num_vars();
    let rows = m.num_rows();
    let mut out = Vec::new();

    if m.lb.len() != n {
        out.push(Violation::new(
            "lb",
            None,
            format!("length {} does not match {} variables", m.lb.len(), n),
        ));
    }
    if m.ub.len() != n {
        out.push(Violation::new(
            "ub",
            None,
            format!("length {} does not match {} variables", m.ub.len(), n),
        ));
    }
    if m.vartype.len() != n {
        out.push(Violation::new(
            "vartype",
            None,
            format!("length {} does not match {} variables", m.vartype.len(), n),
        ));
    }
    if m.row_sense.len() != rows {
        out.push(Violation::new(
            "row_sense",
            None,
            format!("length {} does not match {} rows", m.row_sense.len(), rows),
        ));
    }
    if let Some(q) = &m.q_diag {
        if q.len() != n {
            out.push(Violation::new(
                "q_diag",
                None,
                format!("length {} does not match {} variables", q.len(), n),
            ));
        }
        for (j, &qj) in q.iter().enumerate() {
            if qj < 0.0 {
                out.push(Violation::new(
                    "q_diag",
                    Some(j),
                    format!("negative quadratic coefficient {qj} (must be convex)"),
                ));
            }
        }
    }

    let mut seen = std::collections::HashSet::new();
    for (k, &Triplet(r, c, v)) in m.a.iter().enumerate() {
        if r >= rows {
            out.push(Violation::new("A", Some(k), format!("row index {r} out of range")));
        }
        if c >= n {
            out.push(Violation::new("A", Some(k), format!("col index {c} out of range")));
        }
        if !v.is_finite() {
            out.push(Violation::new("A", Some(k), format!("non-finite coefficient {v}")));
        }
        if r < rows && c < n && !seen.insert((r, c)) {
            out.push(Violation::new(
                "A",
                Some(k),
                format!("duplicate entry for ({r}, {c})"),
            ));
        }
    }

    for (i, &bi) in m.b.iter().enumerate() {
        if !bi.is_finite() {
            out.push(Violation::new("b", Some(i), format!("non-finite rhs {bi}")));
        }
    }
    for (j, &cj) in m.c.iter().enumerate() {
        if !cj.is_finite() {
            out.push(Violation::new("c", Some(j), format!("non-finite coefficient {cj}")));
        }
    }

    let bounds_len_ok = m.lb.len() == n && m.ub.len() == n;
    if bounds_len_ok {
        for j in 0..n {
            if m.lb[j].is_nan() || m.ub[j].is_nan() {
                out.push(Violation::new("bounds", Some(j), "NaN bound"));
                continue;
            }
            if m.lb[j] > m.ub[j] {
                out.push(Violation::new(
                    "bounds",
                    Some(j),
                    format!("lb {} exceeds ub {}", m.lb[j], m.ub[j]),
                ));
            }
        }
    }
    if m.vartype.len() == n && bounds_len_ok {
        for j in 0..n {
            if m.vartype[j] == VarType::Binary && (m.lb[j] < 0.0 || m.ub[j] > 1.0) {
                out.push(Violation::new(
                    "vartype",
                    Some(j),
                    format!("binary variable with bounds [{}, {}]", m.lb[j], m.ub[j]),
                ));
            }
        }
    }

    out
}

/// Result of checking a point against a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub feasible: bool,
    /// Constraint rows violated beyond tolerance.
    pub violated_rows: Vec<usize>,
    /// Variables outside their bounds beyond tolerance.
    pub bound_violations: Vec<usize>,
    /// Integer variables further than `int_tol` from an integer.
    pub integrality_violations: Vec<usize>,
    pub objective: f64,
}

/// Evaluate a point: row senses within additive `feas_tol`, bounds within
/// `feas_tol`, and integrality within `int_tol`.
pub fn evaluate_point(
    m: &StandardFormModel,
    p: &Point,
    feas_tol: f64,
    int_tol: f64,
) -> Result<EvalOutcome, ModelError> {
    if p.x.len() != m.num_vars() {
        return Err(ModelError::Dimension(format!(
            "point has {} entries, model has {} variables",
            p.x.len(),
            m.num_vars()
        )));
    }
    let act = m.row_activity(&p.x);
    let mut violated_rows = Vec::new();
    for i in 0..m.num_rows() {
        let ok = match m.row_sense[i] {
            RowSense::Le => act[i] <= m.b[i] + feas_tol,
            RowSense::Ge => act[i] >= m.b[i] - feas_tol,
            RowSense::Eq => (act[i] - m.b[i]).abs() <= feas_tol,
        };
        if !ok {
            violated_rows.push(i);
        }
    }
    let mut bound_violations = Vec::new();
    let mut integrality_violations = Vec::new();
    for j in 0..m.num_vars() {
        if p.x[j] < m.lb[j] - feas_tol || p.x[j] > m.ub[j] + feas_tol {
            bound_violations.push(j);
        }
        if m.vartype[j].is_integral() && (p.x[j] - p.x[j].round()).abs() > int_tol {
            integrality_violations.push(j);
        }
    }
    let feasible =
        violated_rows.is_empty() && bound_violations.is_empty() && integrality_violations.is_empty();
    Ok(EvalOutcome {
        feasible,
        violated_rows,
        bound_violations,
        integrality_violations,
        objective: m.objective_at(&p.x),
    })
}

/// Convenience constructor used throughout the generators.
pub struct ModelBuilder {
    sense: Sense,
    c: Vec<f64>,
    a: Vec<Triplet>,
    row_sense: Vec<RowSense>,
    b: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    vartype: Vec<VarType>,
    q_diag: Vec<f64>,
    any_q: bool,
}

impl ModelBuilder {
    pub fn new(sense: Sense) -> Self {
        ModelBuilder {
            sense,
            c: Vec::new(),
            a: Vec::new(),
            row_sense: Vec::new(),
            b: Vec::new(),
            lb: Vec::new(),
            ub: Vec::new(),
            vartype: Vec::new(),
            q_diag: Vec::new(),
            any_q: false,
        }
    }

    /// Add a variable; returns its column index.
    pub fn var(&mut self, cost: f64, lb: f64, ub: f64, vt: VarType) -> usize {
        let j = self.c.len();
        self.c.push(cost);
        self.lb.push(lb);
        self.ub.push(ub);
        self.vartype.push(vt);
        self.q_diag.push(0.0);
        j
    }

    pub fn continuous(&mut self, cost: f64, lb: f64, ub: f64) -> usize {
        self.var(cost, lb, ub, VarType::Continuous)
    }

    pub fn binary(&mut self, cost: f64) -> usize {
        self.var(cost, 0.0, 1.0, VarType::Binary)
    }

    pub fn integer(&mut self, cost: f64, lb: f64, ub: f64) -> usize {
        self.var(cost, lb, ub, VarType::Integer)
    }

    /// Set the quadratic objective coefficient of an existing variable.
    pub fn quad(&mut self, j: usize, q: f64) {
        self.q_diag[j] = q;
        self.any_q = true;
    }

    /// Add a row from (column, coefficient) pairs; returns its row index.
    /// Zero coefficients are dropped so the triplet list stays sparse.
    pub fn row(&mut self, coeffs: &[(usize, f64)], sense: RowSense, rhs: f64) -> usize {
        let r = self.b.len();
        for &(j, v) in coeffs {
            if v != 0.0 {
                self.a.push(Triplet(r, j, v));
            }
        }
        self.row_sense.push(sense);
        self.b.push(rhs);
        r
    }

    pub fn build(self) -> StandardFormModel {
        StandardFormModel {
            sense: self.sense,
            c: self.c,
            a: self.a,
            row_sense: self.row_sense,
            b: self.b,
            lb: self.lb,
            ub: self.ub,
            vartype: self.vartype,
            q_diag: if self.any_q { Some(self.q_diag) } else { None },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_le_model() -> StandardFormModel {
        // min x  s.t.  x <= 1,  x >= 0
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(1.0, 0.0, f64::INFINITY);
        mb.row(&[(x, 1.0)], RowSense::Le, 1.0);
        mb.build()
    }

    #[test]
    fn well_formed_model_has_no_violations() {
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(1.0, 0.0, 5.0);
        let y = mb.continuous(2.0, 0.0, f64::INFINITY);
        mb.row(&[(x, 1.0), (y, 1.0)], RowSense::Le, 4.0);
        assert!(validate_model(&mb.build()).is_empty());
    }

    #[test]
    fn dimension_mismatch_is_reported_on_named_field() {
        let mut m = tiny_le_model();
        m.c = vec![1.0, 2.0]; // now |c| = 2 while bounds/vartype say 1
        let violations = validate_model(&m);
        assert!(violations.iter().any(|v| v.field == "lb"));
        assert!(violations.iter().any(|v| v.field == "ub"));
    }

    #[test]
    fn binary_bound_violation_is_flagged() {
        let mut mb = ModelBuilder::new(Sense::Max);
        mb.var(1.0, 0.0, 2.0, VarType::Binary);
        let violations = validate_model(&mb.build());
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "vartype");
        assert_eq!(violations[0].index, Some(0));
    }

    #[test]
    fn duplicate_triplet_is_flagged() {
        let mut m = tiny_le_model();
        m.a.push(Triplet(0, 0, 2.0));
        let violations = validate_model(&m);
        assert!(violations.iter().any(|v| v.message.contains("duplicate")));
    }

    #[test]
    fn evaluate_point_feasible_on_boundary() {
        let m = tiny_le_model();
        let out = evaluate_point(&m, &Point::new(vec![1.0]), 1e-6, 1e-5).unwrap();
        assert!(out.feasible);
        assert_eq!(out.objective, 1.0);
    }

    #[test]
    fn evaluate_point_reports_violated_row() {
        let m = tiny_le_model();
        let out = evaluate_point(&m, &Point::new(vec![1.5]), 1e-6, 1e-5).unwrap();
        assert!(!out.feasible);
        assert_eq!(out.violated_rows, vec![0]);
    }

    #[test]
    fn evaluate_point_within_tolerance_is_feasible() {
        let m = tiny_le_model();
        let out = evaluate_point(&m, &Point::new(vec![1.0 + 1e-7]), 1e-6, 1e-5).unwrap();
        assert!(out.feasible);
    }

    #[test]
    fn evaluate_point_checks_integrality() {
        let mut mb = ModelBuilder::new(Sense::Min);
        mb.integer(1.0, 0.0, 10.0);
        let m = mb.build();
        let near = evaluate_point(&m, &Point::new(vec![3.0 + 5e-6]), 1e-6, 1e-5).unwrap();
        assert!(near.feasible);
        let far = evaluate_point(&m, &Point::new(vec![3.4]), 1e-6, 1e-5).unwrap();
        assert_eq!(far.integrality_violations, vec![0]);
        assert!(!far.feasible);
    }

    #[test]
    fn evaluate_point_dimension_mismatch_errors() {
        let m = tiny_le_model();
        assert!(evaluate_point(&m, &Point::new(vec![1.0, 2.0]), 1e-6, 1e-5).is_err());
    }

    #[test]
    fn quadratic_objective_included() {
        let mut mb = ModelBuilder::new(Sense::Min);
        let x = mb.continuous(1.0, 0.0, 2.0);
        mb.quad(x, 3.0);
        let m = mb.build();
        assert!((m.objective_at(&[2.0]) - (2.0 + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_preserves_infinities() {
        let m = tiny_le_model();
        let text = m.to_json();
        assert!(text.contains("\"ub\":[null]"));
        let back = StandardFormModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.ub[0], f64::INFINITY);
    }
}
