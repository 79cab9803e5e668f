use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid pre-tournament rank {0} (expected 1..=24)")]
    InvalidRank(i64),

    #[error("invalid strength parameter {name} = {value} (must be finite and >= 0)")]
    InvalidParameter { name: &'static str, value: f64 },

    /// The format wiring asked for something the tournament cannot provide.
    #[error("structural error{}: {detail}", run.map(|r| format!(" in run {r}")).unwrap_or_default())]
    Structural { run: Option<u64>, detail: String },

    #[error("cannot finalize metrics over an empty sample")]
    EmptySample,

    #[error("reports are not comparable: {0}")]
    Comparability(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl SimError {
    pub(crate) fn structural(detail: impl Into<String>) -> Self {
        SimError::Structural {
            run: None,
            detail: detail.into(),
        }
    }

    /// Attaches a run index to structural errors; other variants pass through.
    pub fn in_run(self, run_index: u64) -> Self {
        match self {
            SimError::Structural { detail, .. } => SimError::Structural {
                run: Some(run_index),
                detail,
            },
            other => other,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
