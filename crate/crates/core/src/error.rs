use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a rational number: {0:?}")]
pub struct ParseRationalError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("edge {0} is contracted to a point by the map")]
    EdgeContracted(String),
    #[error("leg at vertex {0} is contracted to a point by the map")]
    LegContracted(String),
    #[error("contracted edges contain a cycle; contraction would lower the genus")]
    ContractedCycle,
    #[error("unknown segment id {0}")]
    UnknownSegment(usize),
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("curve is not superabundant")]
    NotSuperabundant,
    #[error("classification error: {0}")]
    Classification(String),
    #[error("moduli dimension formula needs d > 2g-2, got g={g}, d={d}")]
    DegreeOutOfRange { g: i64, d: i64 },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
