use thiserror::Error;

/// Errors raised by the quantum-group pipeline.
#[derive(Debug, Error)]
pub enum QgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),

    #[error("counit does not exist (residual {0:.3e})")]
    NoCounit(f64),

    #[error("antipode does not exist (residual {0:.3e})")]
    NoAntipode(f64),

    #[error("invariant functional is not unique: nullspace dimension {0}")]
    NonUniqueInvariant(usize),

    #[error("invariant functional is not a state: {0}")]
    NotAState(String),

    #[error("Gram matrix of the Haar state is not positive definite (min eigenvalue {0:.3e})")]
    GramNotPD(f64),

    #[error("corepresentation is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("no irreducible class equivalent to the conjugate representation")]
    NotFound,

    #[error("intertwiner space between u and its double contragredient has dimension {0}")]
    DegenerateIntertwiner(usize),

    #[error("Peter-Weyl basis incomplete: sum of d^2 is {found}, algebra dimension is {dim}")]
    BasisIncomplete { found: usize, dim: usize },

    #[error("regular representation inconsistent: {what} residual {residual:.3e}")]
    ConstructionInconsistent { what: &'static str, residual: f64 },

    #[error("C*(G) block relation {relation} failed (residual {residual:.3e})")]
    BlockMismatch { relation: String, residual: f64 },

    #[error("class {class}: multiplicity {multiplicity} differs from dimension {dim}")]
    MultiplicityMismatch {
        class: usize,
        multiplicity: usize,
        dim: usize,
    },

    #[error("could not split a reducible block after {0} attempts")]
    IrreducibilitySplitFailure(usize),

    #[error("explicit intertwiner for class {class}, row {row}: residual {residual:.3e}")]
    IntertwinerResidual {
        class: usize,
        row: usize,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, QgError>;
