use thiserror::Error;

/// Every failure the library reports. Variants carry enough context to print
/// a one-line diagnostic on the command line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("non-positive or non-finite edge length {0}")]
    NonPositiveLength(f64),
    #[error("bad edge label {0:?} (expected one of 12, 13, 14, 23, 24, 34)")]
    BadEdgeLabel(String),
    #[error("degenerate tetrahedron (Cayley-Menger determinant {0:e} below threshold)")]
    DegenerateTetra(f64),
    #[error("edge lengths violate a face triangle inequality")]
    TriangleInequalityViolated,
    #[error("edge-length assignment leaves the realizable domain")]
    OutOfDomain,
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("surface has {0} vertices; decomposition search is limited to 16")]
    TooManyVertices(usize),
    #[error("invalid finite-difference scheme: {0}")]
    BadScheme(String),
    #[error("kernel count check requires a convex surface")]
    NotConvex,
    #[error("vertex set is collinear; trivial motions are not independent")]
    DegenerateVertexSet,
    #[error("deformation space has no nontrivial mode")]
    NoNontrivialMode,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("height radicand is negative ({0:e})")]
    ImaginaryHeight(f64),
    #[error("push depth {0} degenerates the surface")]
    DegenerateDepth(f64),
    #[error("surface self-intersects at faces {0} and {1}")]
    SelfIntersecting(usize, usize),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad range: {0}")]
    BadRange(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
