use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("missing composite for ({g} . {f})")]
    MissingComposite { f: String, g: String },
    #[error("composite ({g} . {f}) = {h} has the wrong type: {reason}")]
    CompositeTypeMismatch { f: String, g: String, h: String, reason: String },
    #[error("conflicting composites for ({g} . {f}): {first} and {second}")]
    ConflictingComposite { f: String, g: String, first: String, second: String },
    #[error("associativity fails for {h} . {g} . {f}")]
    AssociativityViolation { f: String, g: String, h: String },
    #[error("identity law fails: ({g} . {f}) should be {expected}")]
    IdentityViolation { f: String, g: String, expected: String },
    #[error("free composition does not saturate uniquely: {0}")]
    FreeCompositionFailed(String),
    #[error("functor is not valid: {0}")]
    InvalidFunctor(String),
    #[error("presheaf is not functorial: {0}")]
    NotFunctorial(String),
    #[error("map is not natural: {0}")]
    NotNatural(String),
    #[error("maps are over different base categories")]
    BaseMismatch,
    #[error("maps are not composable or do not share the expected endpoints: {0}")]
    ShapeMismatch(String),
    #[error("{what} exceeds the size cap ({count} > {cap})")]
    SizeCapExceeded { what: &'static str, count: u128, cap: u128 },
    #[error("subset is not closed under the presheaf action: {0}")]
    NotActionClosed(String),
    #[error("map is not a monomorphism")]
    NotAMono,
    #[error("generation set is not a local class: {0}")]
    NotLocal(String),
    #[error("topology misses the maximal sieve on `{0}`")]
    MissingMaximal(String),
    #[error("stability fails: pulling back {sieve} along {arrow} does not cover")]
    StabilityViolation { sieve: String, arrow: String },
    #[error("transitivity fails: {covering} covers and {sieve} is locally covering but not covering")]
    TransitivityViolation { covering: String, sieve: String },
    #[error("endomorphism of Ω is not a closure operator: {0}")]
    NotAClosureOperator(String),
    #[error("sieve set refers to another object than `{0}`")]
    WrongSieveObject(String),
    #[error("iso forcing is incomplete: generator #{0} is not inverted by the compiled localization")]
    IsoForcingIncomplete(usize),
    #[error("compiled localization does not force {theta} on generator #{index}")]
    ForcingVerificationFailed { theta: String, index: usize },
    #[error("topology enumeration is unavailable: {0}")]
    EnumerationUnavailable(String),
    #[error("residual of the topological factorization is not trivial")]
    ResidualNotTrivial,
    #[error("topologies are not nested")]
    NotNested,
    #[error("diagonal tower did not stabilize at height {0}")]
    TowerNotStable(usize),
}
