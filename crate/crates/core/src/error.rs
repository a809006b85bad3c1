use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown cell `{0}`")]
    UnknownCell(String),

    #[error("duplicate cell id `{0}`")]
    DuplicateCell(String),

    #[error("face relation has a cycle through `{0}`")]
    FaceCycle(String),

    #[error("cell `{cell}` (dim {dim}) lists face `{face}` of dim {face_dim}")]
    Dimension {
        cell: String,
        dim: usize,
        face: String,
        face_dim: usize,
    },

    #[error("cell set is not closed under faces: `{missing}` is a face of `{of}`")]
    NotFaceClosed { missing: String, of: String },

    #[error("fiber count over chambers is not constant: {0}")]
    NonConstantDegree(String),

    #[error("branch cells do not form a subcomplex: `{missing}` is a face of `{of}`")]
    BranchNotClosed { missing: String, of: String },

    #[error("level-0 cells have no image or parent")]
    LevelZero,

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("cell index {index} out of range at level {level}")]
    CellOutOfRange { level: u32, index: u32 },

    #[error("level {level} would hold {cells} cells, above the cap of {cap}")]
    ResourceCap { level: u32, cells: u64, cap: u64 },

    #[error("`{0}` is not a vertex")]
    NotVertex(String),

    #[error("no realization attached")]
    NoRealization,

    #[error("separation level truncated at depth {0}")]
    Truncated(u32),

    #[error("empty sample")]
    EmptySample,

    #[error("degenerate continuum (zero diameter)")]
    DegenerateContinuum,

    #[error("point {0:?} could not be located in the complex")]
    Unlocated(Vec<f64>),

    #[error("base point for `{0}` is not interior to its cell")]
    NotInterior(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("invalid realization: {0}")]
    InvalidRealization(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
