use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("ζ -> ζ^{j} is not an automorphism of Q(ζ_{conductor})")]
    NotAnAutomorphism { j: i64, conductor: u32 },
    #[error("cannot lift from conductor {from} to {to}")]
    ConductorMismatch { from: u32, to: u32 },
    #[error("prime factor index {index} out of range ({count} primes above 2)")]
    FactorIndexOutOfRange { index: usize, count: usize },
    #[error("root-of-unity sum with exponents {exponents:?} lies in the ideal, is nonzero, and its terms differ")]
    LemmaViolation { exponents: Vec<i64> },
    #[error("restriction coefficient {value} is not a non-negative integer")]
    NonIntegralRestriction { value: String },
    #[error("restriction of character {index} is not irreducible")]
    ReducibleRestriction { index: usize },
    #[error("twisted character row {index} matches no irreducible character")]
    UnmatchedTwist { index: usize },
    #[error("blocks do not match: {0}")]
    BlockMismatch(String),
    #[error("exhaustive search refused: k(B) = {k} exceeds the limit of 8")]
    GuardViolation { k: usize },
    #[error("{target} accepts n in {min}..={max}, got {n}")]
    ParameterRange {
        target: &'static str,
        n: u32,
        min: u32,
        max: u32,
    },
    #[error("search stopped after visiting {visited} nodes (limit reached)")]
    NodeLimit { visited: u64 },
    #[error("closure check failed: {0}")]
    ClosureFailure(String),
    #[error("proof-guided step failed: {0}")]
    ProofStep(String),
    #[error("unknown group spec `{0}`")]
    UnknownGroup(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
