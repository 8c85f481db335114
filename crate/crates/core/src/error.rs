use thiserror::Error;

pub type Result<T> = std::result::Result<T, RiskError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    /// Probabilities (or total density mass) do not add up to one.
    #[error("total probability mass is {total}, expected 1")]
    Mass { total: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("confidence level {0} must lie strictly between 0 and 1")]
    Level(f64),

    #[error("quantile defining set is empty at level {0}")]
    DegenerateSupport(f64),

    #[error("convolution would produce {outcomes} outcomes, cap is {cap}")]
    Size { outcomes: usize, cap: usize },

    #[error("scale factor {0} is negative")]
    NegativeScale(f64),

    #[error("conditioning tail event at level {0} has zero probability")]
    EmptyTail(f64),

    #[error("payoff vector has {got} entries, scenarios have {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("measure vector invariant violated: {0}")]
    MeasureVector(String),

    #[error("invalid tail specification: {0}")]
    Spec(String),

    #[error(
        "requested {requested} family members but only {available} distinct perturbations fit"
    )]
    Capacity { requested: usize, available: usize },

    #[error("category {0} requires a national-discretion weight")]
    DiscretionMissing(String),

    #[error("invalid exposure: {0}")]
    Exposure(String),

    #[error("{accord} does not admit a nonzero {term} term")]
    AccordMismatch {
        accord: &'static str,
        term: &'static str,
    },

    #[error("capital ratio undefined: total risk charge is zero")]
    ZeroRiskCharge,
}
