use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown color system `{0}`")]
    UnknownSystem(String),
    #[error("unknown color name `{0}`")]
    UnknownColorName(String),
    #[error("malformed hex color `{0}`")]
    MalformedHex(String),
    #[error("channel value out of range in `{0}`")]
    ChannelOutOfRange(String),
    #[error("unrecognized color spec `{0}`")]
    MalformedSpec(String),
    #[error("k = {k} needs at least {} entries but the system has {size}", k + 1)]
    TooManyNeighbors { k: usize, size: usize },
    #[error("no grouping is defined for `{0}`")]
    NoGrouping(String),
    #[error("embedded table `{table}`: {msg}")]
    Table { table: String, msg: String },
    #[error("cannot satisfy quota for task {task}: {msg}")]
    Quota { task: String, msg: String },
    #[error("invalid mini budget: {0}")]
    MiniBudget(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("mask dimensions {got:?} do not match {expected:?}")]
    DimensionMismatch { expected: (u32, u32), got: (u32, u32) },
    #[error("mask is empty")]
    EmptyMask,
    #[error("pixel set is empty")]
    EmptyPixels,
    #[error("{what}: {} ids, first: {}", ids.len(), first_ids(ids))]
    Mismatch { what: String, ids: Vec<String> },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Image { path: PathBuf, source: image::ImageError },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn first_ids(ids: &[String]) -> String {
    ids.iter().take(10).cloned().collect::<Vec<_>>().join(", ")
}

impl Error {
    /// Adapter for `map_err` that attaches `path` to an I/O error.
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}
