use thiserror::Error;

use crate::graph::{ReturnPathClass, VertexClass};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex `{0}` listed twice")]
    DuplicateVertex(String),

    #[error("duplicate edge entry {src} -> {dst}")]
    DuplicateEdge { src: String, dst: String },

    #[error("infinite multiplicity on {src} -> {dst} cannot enter an integer matrix")]
    InfiniteMultiplicity { src: String, dst: String },

    #[error("{what}: size {size} exceeds the brute-force bound {bound}")]
    SizeBound {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("vertex `{vertex}` has return-path class {class:?}; the Cuntz splice needs at least two return paths")]
    SpliceVertex {
        vertex: String,
        class: ReturnPathClass,
    },

    #[error("vertex `{vertex}` is {class:?}, expected a regular vertex")]
    NotRegular { vertex: String, class: VertexClass },

    #[error("vertex `{0}` carries a loop and cannot be contracted")]
    HasLoop(String),

    #[error("Condition (K) fails: vertex `{0}` supports exactly one return path")]
    ConditionK(String),

    #[error("not purely infinite: {criterion} fails")]
    NotPurelyInfinite { criterion: &'static str },

    #[error("vertex set {0:?} is not hereditary and saturated")]
    NotHereditarySaturated(Vec<String>),

    #[error("singular vertex `{0}`: the filtered invariants are only computed for graphs whose vertices are all regular")]
    SingularVertex(String),

    #[error("bad edge enumeration for `{vertex}`: {reason}")]
    Enumeration { vertex: String, reason: String },

    #[error("truncation depth {depth} is below the minimum {min}")]
    Depth { depth: usize, min: usize },

    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("induced map is not well defined: {0}")]
    NotWellDefined(String),

    #[error("order structure: {0}")]
    Structure(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
