//! Error type shared by every module of the crate.

use crate::weyl::{MAX_RANK, MIN_RANK};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or verifying the
/// combinatorial data of this crate.
///
/// Arithmetic overflow is deliberately *not* represented here: all integer
/// work is done with checked 64-bit operations that panic on overflow, since
/// an overflow at the supported ranks would be a bug rather than a
/// recoverable condition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The half-rank `n` is outside the supported window.
    #[error("rank n = {0} outside the supported range [{MIN_RANK}, {MAX_RANK}]")]
    RankRange(usize),

    /// A vector had the wrong number of coordinates.
    #[error("expected a vector of length {expected}, got {got}")]
    VectorLength {
        /// Required length.
        expected: usize,
        /// Length actually supplied.
        got: usize,
    },

    /// An image sequence was not a permutation of 1..=2n.
    #[error("image sequence is not a permutation of 1..=2n")]
    NotAPermutation,

    /// A permutation did not commute with the involution i -> 2n+1-i.
    #[error("permutation does not commute with the involution i -> 2n+1-i")]
    NotStarCompatible,

    /// A translation vector violated the similitude constraint.
    #[error("translation vector violates the similitude constraint r_i + r_(2n+1-i) = const")]
    SimilitudeViolation,

    /// The Kottwitz homomorphism (or anything derived from it) was applied
    /// to an element outside the neutral component.
    #[error("operation is defined on the neutral component only (permutation part must be even)")]
    OddComponent,

    /// A cocharacter vector was not of the expected 0/1 shape.
    #[error("cocharacter must have entries in {{0,1}} and satisfy the similitude constraint")]
    InvalidCochar,

    /// A mu-vector that must be totally isotropic was not.
    #[error("mu-vector is not totally isotropic (mu + mu* != 1)")]
    NotTotallyIsotropic,

    /// A family of vectors failed one of the face axioms.
    #[error("invalid face: {0}")]
    InvalidFace(String),

    /// The parity correction in `face_to_element` is unavailable at the
    /// hyperspecial chain indices.
    #[error("parity correction unavailable at chain index i = {i}; enumerate this vertex directly")]
    ParityFixUnavailable {
        /// The offending chain index (0 or n).
        i: usize,
    },

    /// A subset was rejected because it is not naively permissible.
    #[error("subset is not naively permissible at its chain index")]
    NotPermissible,

    /// A vertex label or index set was invalid for the given rank.
    #[error("invalid vertex index data: {0}")]
    InvalidIndex(String),

    /// Out-of-range stratum or class parameters.
    #[error("invalid stratum/class parameters: {0}")]
    InvalidStratum(String),

    /// A module of scalars was degenerate where a full-rank one was needed.
    #[error("degenerate module: {0}")]
    DegenerateModule(String),

    /// A verification-suite configuration was rejected.
    #[error("configuration error: {0}")]
    Config(String),
}
