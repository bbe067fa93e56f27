//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("matrix dimensions {0}x{1} and {2}x{3} are incompatible")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix over Q[theta] is not unimodular (det = {det})")]
    NotUnimodular { det: String },

    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("operands live in different polynomial rings")]
    VariableMismatch,

    #[error("non-isolated critical locus: the Jacobian ideal is not zero-dimensional")]
    NonIsolatedCriticalLocus,

    #[error("Newton polyhedron is degenerate: affine hull has dimension {dim} < {ambient}")]
    DegeneratePolyhedron { dim: usize, ambient: usize },

    #[error("polynomial is not convenient (no pure power of variable `{var}`)")]
    NotConvenient { var: String },

    #[error("polynomial is degenerate with respect to its Newton polyhedron")]
    NewtonDegenerate,

    #[error("form reduction exceeded {cap} iterations; input is likely not Newton-tame (trace: {trace})")]
    ReductionCap { cap: usize, trace: String },

    #[error("connection is irregular at tau = 0 (saturation did not stabilize within {cap} passes)")]
    IrregularAtZero { cap: usize },

    #[error("non-quasi-unipotent input: residue characteristic polynomial has irrational factor {factor}")]
    NonQuasiUnipotent { factor: String },

    #[error("V-filtration window failed to saturate mu = {mu} (reached {reached}) at the hard cap")]
    WindowCap { mu: usize, reached: usize },

    #[error("windowed lattice solve exceeded degree cap {cap} without stabilizing")]
    DegreeCap { cap: usize },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("no N-stable opposite filtration found (obstruction at alpha = {alpha}, level {level})")]
    NoOppositeFiltration { alpha: String, level: i64 },

    #[error("Birkhoff reduction stalled at theta-degree {degree} after {iterations} gauge passes")]
    BirkhoffStalled { degree: usize, iterations: usize },

    #[error("A0 is singular: the Mellin transform has dimension < mu, no tau matrix in this basis")]
    SingularA0,

    #[error("0 is a critical value")]
    ZeroCriticalValue,

    #[error("spectrum not monodromy-consistent: expansion has non-integer coefficients")]
    MonodromyInconsistent,

    #[error("invalid lattice data: {0}")]
    InvalidLattice(String),

    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
