//! Exhaustive verification: primitive pairs for one `f`, family membership
//! `q ∈ Q_{n1,n2}` for one field, checkpointed criterion scans over ranges of
//! prime powers, and classification of the surviving candidates.

mod classify;
mod membership;
mod pair;
mod scan;

pub use classify::{
    classify_true_exceptions, classify_with, work_estimate, ClassifyConfig, ClassifyReport,
    ExceptionRecord, WitnessLine, DEFAULT_BUDGET,
};
pub use membership::{q_in_q, q_in_q_generic, q_in_q_with, Membership};
pub use pair::{pair_exists, pair_search, verify_absent, PairWitness};
pub use scan::{
    checkpoint_path_for, exception_scan, scan_to_csv, Checkpoint, ScanConfig, ScanRecord,
    ScanSummary, Verdict, CHECKPOINT_DIR_ENV, CSV_HEADER,
};

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::ffcore::FieldError;
use crate::polyrat::PolyError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("rational function is exceptional")]
    Exceptional,
    #[error("F_{0} has a trivial multiplicative group")]
    Degenerate(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("invalid range [{lo}, {hi}]: {reason}")]
    Range { lo: u64, hi: u64, reason: String },
    #[error("{0}")]
    Io(String),
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: String, reason: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
