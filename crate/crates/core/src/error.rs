use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForgeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid tableau: {0}")]
    InvalidTableau(String),
    #[error("qubit {0} is not entangled with the rest of the state")]
    NotSplittable(usize),
    #[error("auxiliary operator set {0} is empty but required")]
    InsufficientAux(&'static str),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state has {0} qubits, above the dense cap of {1}")]
    CapExceeded(usize, usize),
    #[error("byproduct cannot be propagated through the stage")]
    NoPropagation,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, ForgeError>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(ForgeError::Dimension { expected, found })
    }
}
