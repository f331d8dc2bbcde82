use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("basis error: {0}")]
    Basis(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("geminal fit rms {rms:.3e} above threshold {threshold:.1e}; use more terms or a smaller r_max")]
    GeminalFit { rms: f64, threshold: f64 },

    #[error("kernel {0} requires a geminal fit")]
    MissingFit(&'static str),

    #[error("SCF not converged after {iterations} iterations (energy {energy:.10}, error norm {error_norm:.3e})")]
    ScfNotConverged {
        iterations: usize,
        energy: f64,
        error_norm: f64,
    },

    #[error("degenerate reference: orbital energy denominator {0:.3e}")]
    DegenerateReference(f64),

    #[error("state is not a particle-number eigenstate (deviation {0:.3e})")]
    NotNumberEigenstate(f64),

    #[error("inconsistent RDM: {0}")]
    InconsistentRdm(String),

    #[error("dimension {dim} over budget {budget}")]
    OverBudget { dim: usize, budget: usize },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
