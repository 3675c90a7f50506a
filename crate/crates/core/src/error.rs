use thiserror::Error;

/// Errors produced by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("completeness not guaranteed: {0}")]
    Completeness(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("pole at s = 1")]
    Pole,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("window boundary undecidable: {0}")]
    BoundaryUndecidable(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("interlacing violated in gap {0}")]
    Interlacing(usize),
    #[error("missing dependency: {0}")]
    Dependency(String),
    #[error("accuracy: {0}")]
    Accuracy(String),
}

impl QcError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            QcError::InvalidInput(_) => "invalid-input",
            QcError::Arithmetic(_) => "arithmetic",
            QcError::Resource(_) => "resource",
            QcError::InsufficientData(_) => "insufficient-data",
            QcError::Completeness(_) => "completeness",
            QcError::Domain(_) => "domain",
            QcError::Pole => "pole",
            QcError::Unsupported(_) => "unsupported",
            QcError::BoundaryUndecidable(_) => "boundary-undecidable",
            QcError::Precision(_) => "precision",
            QcError::Numeric(_) => "numeric",
            QcError::Interlacing(_) => "interlacing-violation",
            QcError::Dependency(_) => "dependency",
            QcError::Accuracy(_) => "accuracy",
        }
    }

    /// True for failures caused by truncation or working precision rather than bad input.
    pub fn is_precision_class(&self) -> bool {
        matches!(
            self,
            QcError::Completeness(_)
                | QcError::BoundaryUndecidable(_)
                | QcError::Precision(_)
                | QcError::Accuracy(_)
                | QcError::Resource(_)
                | QcError::Numeric(_)
                | QcError::Dependency(_)
                | QcError::Interlacing(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, QcError>;
