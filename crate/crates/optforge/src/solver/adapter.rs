//! Subprocess adapter contract for external solvers.
//!
//! The adapter command receives the model JSON on standard input and must
//! write `{"status": ..., "objective": ..., "x": [...]}` on standard output,
//! exiting 0 for any parseable result. Nonzero exits, malformed output, and
//! timeouts surface as [`ExecError`] so the evaluation layer can classify
//! them as execution failures.

use super::{SolveResult, SolveStatus};
use crate::model::{Point, StandardFormModel};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct SolverAdapter {
    /// Command and arguments, e.g. `["python3", "my_solver.py"]`.
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl SolverAdapter {
    pub fn new(command: Vec<String>, timeout: Duration) -> Self {
        SolverAdapter { command, timeout }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecCause {
    Spawn,
    NonzeroExit,
    MalformedOutput,
    Timeout,
}

#[derive(Debug, Error)]
#[error("adapter execution failed ({cause:?}): {detail}")]
pub struct ExecError {
    pub cause: ExecCause,
    pub detail: String,
}

impl ExecError {
    fn new(cause: ExecCause, detail: impl Into<String>) -> Self {
        ExecError { cause, detail: detail.into() }
    }
}

#[derive(Serialize, Deserialize)]
struct WireResult {
    status: String,
    #[serde(default)]
    objective: Option<f64>,
    #[serde(default)]
    x: Option<Vec<f64>>,
}

/// Serialize a solve result to the adapter wire format.
pub fn result_to_wire_json(res: &SolveResult) -> String {
    let wire = WireResult {
        status: match res.status {
            SolveStatus::Optimal => "OPTIMAL".into(),
            SolveStatus::Infeasible => "INFEASIBLE".into(),
            SolveStatus::Unbounded => "UNBOUNDED".into(),
            SolveStatus::IterLimit => "ITER_LIMIT".into(),
        },
        objective: res.objective,
        x: res.point.as_ref().map(|p| p.x.clone()),
    };
    serde_json::to_string(&wire).expect("wire result serialization cannot fail")
}

/// Parse the adapter wire format, checking the point dimension when a model
/// is provided.
pub fn result_from_wire_json(text: &str, expect_vars: Option<usize>) -> Result<SolveResult, ExecError> {
    let wire: WireResult = serde_json::from_str(text)
        .map_err(|e| ExecError::new(ExecCause::MalformedOutput, format!("bad result JSON: {e}")))?;
    let status = match wire.status.as_str() {
        "OPTIMAL" => SolveStatus::Optimal,
        "INFEASIBLE" => SolveStatus::Infeasible,
        "UNBOUNDED" => SolveStatus::Unbounded,
        "ITER_LIMIT" => SolveStatus::IterLimit,
        other => {
            return Err(ExecError::new(
                ExecCause::MalformedOutput,
                format!("unknown status {other:?}"),
            ))
        }
    };
    if status == SolveStatus::Optimal {
        let obj = wire.objective.ok_or_else(|| {
            ExecError::new(ExecCause::MalformedOutput, "OPTIMAL result missing objective")
        })?;
        let x = wire.x.ok_or_else(|| {
            ExecError::new(ExecCause::MalformedOutput, "OPTIMAL result missing point")
        })?;
        if let Some(n) = expect_vars {
            if x.len() != n {
                return Err(ExecError::new(
                    ExecCause::MalformedOutput,
                    format!("point has {} entries, model has {n} variables", x.len()),
                ));
            }
        }
        if !obj.is_finite() {
            return Err(ExecError::new(ExecCause::MalformedOutput, "non-finite objective"));
        }
        Ok(SolveResult {
            status,
            objective: Some(obj),
            point: Some(Point::new(x)),
            node_count: 0,
            iterations: 0,
        })
    } else {
        Ok(SolveResult {
            status,
            objective: None,
            point: None,
            node_count: 0,
            iterations: 0,
        })
    }
}

/// Run the adapter subprocess on a model, enforcing its timeout.
pub fn external_solve(m: &StandardFormModel, adapter: &SolverAdapter) -> Result<SolveResult, ExecError> {
    if adapter.command.is_empty() {
        return Err(ExecError::new(ExecCause::Spawn, "empty adapter command"));
    }
    let mut cmd = Command::new(&adapter.command[0]);
    cmd.args(&adapter.command[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd
        .spawn()
        .map_err(|e| ExecError::new(ExecCause::Spawn, format!("{}: {e}", adapter.command[0])))?;

    let payload = m.to_json();
    let mut stdin = child.stdin.take().expect("stdin piped");
    let writer = std::thread::spawn(move || {
        // A dying adapter closes the pipe early; that surfaces via exit status.
        let _ = stdin.write_all(payload.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("stdout piped");
    let reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });

    let deadline = Instant::now() + adapter.timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    let _ = writer.join();
                    let _ = reader.join();
                    return Err(ExecError::new(
                        ExecCause::Timeout,
                        format!("adapter exceeded {:?}", adapter.timeout),
                    ));
                }
                std::thread::sleep(Duration::from_millis(2));
            }
            Err(e) => {
                let _ = writer.join();
                let _ = reader.join();
                return Err(ExecError::new(ExecCause::Spawn, format!("wait failed: {e}")));
            }
        }
    };
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();

    if !status.success() {
        let mut stderr_text = String::new();
        if let Some(mut se) = child.stderr.take() {
            let _ = se.read_to_string(&mut stderr_text);
        }
        let snippet: String = stderr_text.chars().take(400).collect();
        return Err(ExecError::new(
            ExecCause::NonzeroExit,
            format!("exit {:?}: {snippet}", status.code()),
        ));
    }
    result_from_wire_json(out.trim(), Some(m.num_vars()))
}
