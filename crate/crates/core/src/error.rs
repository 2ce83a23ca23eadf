use thiserror::Error;

use crate::kernel::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("indeterminate root set: zero polynomial")]
    ZeroPolynomial,
    #[error("resultant undefined: both polynomials are constant in the eliminated variable")]
    ConstantResultant,
    #[error("inexact multivariate division")]
    InexactDivision,
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("circle must have positive squared radius, got {0}")]
    NonPositiveRadius(Rational),
    #[error("line coefficients (A, B) must not both vanish")]
    DegenerateLine,
    #[error("identical directed points")]
    IdenticalDirectedPoints,
    #[error("power point coincides with tangency point")]
    PowerPointAtTangency,
    #[error("coincident tangent lines")]
    CoincidentTangentLines,
    #[error("tangent direction is vertical; resample")]
    VerticalTangent,
    #[error("point is not on the circle")]
    NotOnCircle,
    #[error("degenerate triple: points coincide or are collinear with the origin")]
    DegenerateTriple,
    #[error("anchor point excluded")]
    AnchorPointExcluded,
    #[error("invalid anchored circle: {0}")]
    InvalidAnchoredCircle(&'static str),
    #[error("identical circles")]
    IdenticalCircles,
    #[error("identical anchored circles")]
    IdenticalAnchoredCircles,
    #[error("mixed instance kinds: {points} points against {curves} curves")]
    MixedKinds {
        points: &'static str,
        curves: &'static str,
    },
    #[error("prefilter slack must be finite and at least 1, got {0}")]
    BadPrefilterSlack(f64),
    #[error("degenerate series: {0}")]
    DegenerateSeries(&'static str),
    #[error("partition needs at least 2^levels = {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("balance epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("retry budget exhausted at level {level}; best achieved balance {best_epsilon:.4}")]
    RetryBudgetExhausted { level: usize, best_epsilon: f64 },
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("rich-point threshold must be at least 1")]
    BadPointThreshold,
    #[error("rich-plane threshold must be at least 2, got {0}")]
    BadRichThreshold(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
