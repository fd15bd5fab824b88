use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol {symbol} out of range for order {order}")]
    SymbolOutOfRange { symbol: usize, order: usize },

    #[error("order {0} is outside the supported range 1..={max}", max = crate::quasigroup::MAX_ORDER)]
    OrderOutOfRange(usize),

    #[error("table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("row {0} is not a permutation of the symbols")]
    RowNotPermutation(usize),

    #[error("column {0} is not a permutation of the symbols")]
    ColumnNotPermutation(usize),

    #[error("diagonal entry ({0}, {0}) is not {0}; square is not idempotent")]
    NotIdempotent(usize),

    #[error("image is not a bijection of 0..{0}")]
    NotAPermutation(usize),

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error(
        "no quasigroup of even order {0} has x -> x+1 as an automorphism; \
         see the automorphic-table enumeration and the sum contradiction report"
    )]
    EvenOrderUnsupported(usize),

    #[error(
        "no idempotent Latin square of order {n} exists (search exhausted after {nodes} nodes)"
    )]
    NoIdempotentSquare { n: usize, nodes: u64 },

    #[error("rotor size {0} must be odd")]
    EvenRotorSize(usize),

    #[error("alphabet size must be positive")]
    EmptyAlphabet,

    #[error("digit sequence must be nonempty")]
    EmptyDigits,

    #[error("alphabet mismatch: expected {expected}, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected} components, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("factor {0} is excluded (factors must avoid 2 and 6)")]
    ExcludedFactor(usize),

    #[error("factor list must be nonempty and contain only factors >= 1")]
    InvalidFactors,

    #[error("coordinate {k} out of range for {q} factors")]
    CoordinateOutOfRange { k: usize, q: usize },

    #[error("sections must be given one per coordinate in order; position {position} holds coordinate {k}")]
    SectionOrder { position: usize, k: usize },

    #[error("generator set is empty")]
    EmptyGenerators,

    #[error("period {period} does not divide the slice period {slice}")]
    PeriodMismatch { period: usize, slice: usize },

    #[error("{value} = {i}/{base}^{k} lies in the removed null set")]
    NullSetPoint {
        value: String,
        base: usize,
        k: u32,
        i: BigUint,
    },

    #[error("digit tail is eventually 0 or eventually base-1; the point is excluded")]
    ExcludedDigits,

    #[error("product digits {digits} fall in the excluded null set; the weak operation is undefined here")]
    ProductInNullSet { digits: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Parse(String),
}
