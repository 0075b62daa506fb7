//! Satisfiability procedures.
//!
//! - [`solve_2sat`] decides 2-CNF exactly in linear time through the
//!   strongly connected components of the implication graph.
//! - [`find_implied_set`] runs the implied-literal exposure and records its
//!   open-literal walk.
//! - [`solve_dpll`] is a small budgeted DPLL for any clause width.
//! - [`core_restricted_status`] solves only the clauses over the first `r`
//!   variables.

mod dpll;
mod exposure;
mod implication;

pub use dpll::{core_restricted_status, solve_dpll};
pub use exposure::{
    find_implied_set, ExposureCase, ExposureOutcome, ExposureStep, ExposureTrace,
    DEFAULT_GIANT_FRACTION,
};
pub use implication::{solve_2sat, ImplicationGraph};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SatStatus {
    Sat,
    Unsat,
    /// The search budget ran out first.
    Unknown,
}

impl SatStatus {
    /// SAT-competition exit code: 10, 20, or 30 for unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            SatStatus::Sat => 10,
            SatStatus::Unsat => 20,
            SatStatus::Unknown => 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    /// `witness[v - 1]` is the value of variable `v`; present iff SAT.
    pub witness: Option<Vec<bool>>,
    /// A variable whose two literals imply each other (2-SAT UNSAT only).
    pub certificate: Option<u32>,
}

impl SatResult {
    pub fn sat(witness: Vec<bool>) -> Self {
        SatResult {
            status: SatStatus::Sat,
            witness: Some(witness),
            certificate: None,
        }
    }

    pub fn unsat(certificate: Option<u32>) -> Self {
        SatResult {
            status: SatStatus::Unsat,
            witness: None,
            certificate,
        }
    }

    pub fn unknown() -> Self {
        SatResult {
            status: SatStatus::Unknown,
            witness: None,
            certificate: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("clause {clause} has width {width}; the 2-SAT procedures need width 2")]
    NotTwoCnf { clause: usize, width: usize },
}
