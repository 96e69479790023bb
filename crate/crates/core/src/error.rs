use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("depth cap must be at least 1")]
    ZeroDepthCap,
    #[error("defining vector has {got} entries, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("defining vector is zero")]
    ZeroVector,
    #[error("level {level} exceeds depth cap {cap}")]
    DepthExceeded { level: usize, cap: usize },
    #[error("vertex letter {letter} outside 1..={p}")]
    BadLetter { letter: u32, p: u32 },
    #[error("domain degree {degree} exceeds cap {cap}")]
    DegreeExceeded { degree: usize, cap: usize },
    #[error("brute-force enumeration for p = {p} exceeds bound {bound}")]
    BruteForceBound { p: u32, bound: u32 },
    #[error("word parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("unknown word family `{0}`")]
    UnknownFamily(String),
    #[error("group is not a subgroup of the ambient group")]
    NotSubgroup,
    #[error("subgroup does not stabilize level 1")]
    MovesFirstLevel,
    #[error("permutation is not a sigma-automorphism of the truncated tree")]
    NotTreeAutomorphism,
    #[error("domains of the two groups differ")]
    DomainMismatch,
    #[error("level {m} exceeds quotient level {n}")]
    LevelTooDeep { m: usize, n: usize },
    #[error("quotient level must be at least 1")]
    ZeroLevel,
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
