use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model space description is empty")]
    EmptySpace,
    #[error("j = {0} is not a positive half-integer")]
    InvalidJ(f64),
    #[error("species {0} is not present in the model space")]
    MissingSpecies(String),
    #[error("matrix shape {rows}x{cols} does not match {expected} modes")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("transformation is not orthogonal: max |U^T U - I| = {residual:e}")]
    NotOrthogonal { residual: f64 },
    #[error("occupation index {index} out of range for {modes} modes")]
    OccupationOutOfRange { index: usize, modes: usize },
    #[error("occupation index {0} listed twice")]
    DuplicateOccupation(usize),
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("matrix has imaginary elements (max |Im| = {0:e}); a real operator is required")]
    ComplexElements(f64),
    #[error("qubit counts differ: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("operator has support outside the m subalgebra (term {0})")]
    OutsideM(String),
    #[error("qubit pair ({0}, {1}) straddles a species boundary or leaves the block")]
    CrossSpecies(usize, usize),
    #[error("filter removed the whole state (probability {0:e})")]
    ZeroProbability(f64),
    #[error("state leaks {0:e} weight outside the requested particle-number sector")]
    SectorLeakage(f64),
    #[error("sector dimension {0} exceeds the dense oracle limit {1}")]
    SectorTooLarge(usize, usize),
    #[error("decomposition failed to converge: best residual {best:e} after {attempts} attempts")]
    NoConvergence { best: f64, attempts: usize },
    #[error("decomposition spectrum does not match the target weights (max mismatch {0:e})")]
    SpectrumMismatch(f64),
    #[error("ansatz residual {0:e} exceeds the required tolerance")]
    ResidualTooLarge(f64),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("particle number parity does not match the projection target: {0}")]
    Parity(String),
    #[error("epsilon {0} must lie in (0, 1)")]
    Epsilon(f64),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
