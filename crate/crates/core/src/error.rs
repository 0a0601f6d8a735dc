use std::fmt;

use crate::mlp::{Network, TrainingHistory};

/// One broken invariant, located by project id and field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub project: String,
    pub field: String,
    pub reason: String,
}

impl Violation {
    pub fn new(project: impl Into<String>, field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            project: project.into(),
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.project.is_empty() {
            write!(f, "{}: {}", self.field, self.reason)
        } else {
            write!(f, "project `{}`, {}: {}", self.project, self.field, self.reason)
        }
    }
}

/// Training ran out of damping headroom before reaching its target.
#[derive(Debug, Clone)]
pub struct ConvergenceFailure {
    pub best: Network,
    pub history: TrainingHistory,
    pub damping: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}", render_violations(.0))]
    Validation(Vec<Violation>),

    #[error("team restructure recommended: {count} environmental ratings are out of line (limit 4)")]
    HighRisk { count: u8 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("training did not converge: damping reached {:.3e} with best SSE {:.6e}", .0.damping, .0.history.best_sse())]
    Convergence(Box<ConvergenceFailure>),
}

fn render_violations(v: &[Violation]) -> String {
    match v {
        [one] => format!("validation failed: {one}"),
        many => {
            let mut s = format!("validation failed with {} problems:", many.len());
            for item in many {
                s.push_str("\n  - ");
                s.push_str(&item.to_string());
            }
            s
        }
    }
}

impl Error {
    pub fn invalid(project: impl Into<String>, field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation(vec![Violation::new(project, field, reason)])
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        if err.is_io() {
            return Error::Io(err.into());
        }
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
