use thiserror::Error;

#[derive(Debug, Error)]
pub enum HdgError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh parse error on line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular local block on cell {cell}")]
    SingularLocalBlock { cell: usize },

    #[error("trace matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("dense oracle size guard exceeded: {cells} cells (limit {limit})")]
    SizeGuard { cells: usize, limit: usize },

    #[error("order undefined for non-positive errors ({coarse:e}, {fine:e})")]
    NonPositiveError { coarse: f64, fine: f64 },

    #[error("solver failed for {variant} k={k} l={l} n={n}: {source}")]
    Study {
        variant: String,
        k: usize,
        l: usize,
        n: usize,
        #[source]
        source: Box<HdgError>,
    },

    #[error("{0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HdgError>;
