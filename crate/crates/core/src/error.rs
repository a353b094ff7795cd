use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the kernel, the constructor algebra, quasi-functions and
/// universe fragments.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("label permutation is not kind-preserving and bijective: {0}")]
    InvalidPermutation(String),
    #[error("{what}: {actual} exceeds the configured cap of {limit}")]
    CapExceeded {
        what: &'static str,
        limit: u64,
        actual: u64,
    },
    #[error("element is not a member of the universe")]
    NotInUniverse,
    #[error("family index is not a classical quasi-set")]
    NonClassicalIndex,
    #[error("family entries do not match the index elements")]
    FamilyMismatch,
    #[error("codomain of the first quasi-function is not indistinguishable from the domain of the second")]
    NotComposable,
    #[error("relation is not a quasi-function: {0}")]
    NotAQuasiFunction(String),
    #[error("graph references a class absent from the {0}")]
    UnknownClass(&'static str),
    #[error("a universe must be non-empty: no seeds given")]
    EmptySeeds,
    #[error("name `{0}` is already declared")]
    DuplicateName(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("ledger replay diverged at entry {0}")]
    ReplayMismatch(usize),
}
