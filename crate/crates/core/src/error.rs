use std::path::PathBuf;

use crate::model::RbId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource block {0} is not part of this scenario")]
    UnknownRb(RbId),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("oracle refuses {links} links x {rbs} RBs (limit is 5 x 10)")]
    OracleGuard { links: usize, rbs: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
