use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("duplicate letter {0:?} in alphabet")]
    DuplicateLetter(String),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("pattern extent {width}x{height} does not match {cells} cells")]
    BadExtent {
        width: usize,
        height: usize,
        cells: usize,
    },
    #[error("window exceeds pattern")]
    WindowExceedsPattern,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("letter {0:?} has no rule")]
    MissingRule(String),
    #[error("letter {0:?} has an empty image")]
    EmptyImage(String),
    #[error("no letter has an image of length >= 2")]
    NoGrowth,
    #[error("saturation not guaranteed: substitution is not primitive")]
    SaturationNotGuaranteed,
    #[error("language did not saturate within {0} levels")]
    SaturationCapReached(usize),
    #[error("substitution images do not fit together: {0}")]
    Inconsistent(String),
    #[error("block substitution images must all be {expected}x{expected}")]
    NonUniformBlock { expected: usize },
    #[error("constant 2x2 block hypothesis not witnessed within depth {0}")]
    NoConstantBlock(usize),
    #[error("no refutation up to m_cap = {0}")]
    NoRefutation(usize),
    #[error("configuration is not a member at radius {0}")]
    NotMember(usize),
    #[error("window {window} at center {center:?} is outside the block map domain")]
    OutsideDomain { window: String, center: [i64; 2] },
    #[error("alphabets are not compatible: {0}")]
    IncompatibleAlphabets(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("Hausdorff undefined on empty set")]
    EmptyHausdorff,
    #[error("not conjugate: length invariants differ")]
    NotConjugate,
    #[error("tile lengths must be positive")]
    NonPositiveLength,
    #[error("hierarchy exhausted: no move possible within {0} levels")]
    HierarchyExhausted(usize),
    #[error("metric not certified within {cap} radii (bounds [{lower}, {upper}])")]
    MetricNotCertified {
        cap: usize,
        lower: String,
        upper: String,
    },
    #[error("translations s and t are linearly dependent")]
    DependentTranslations,
    #[error("patch does not cover the region needed: {0}")]
    PatchTooSmall(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("certificate failed re-validation: {0}")]
    CertificateInvalid(String),
}
