use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ordering violation: need 1 < alpha < beta, got alpha = {alpha}, beta = {beta}")]
    OrderingViolation { alpha: f64, beta: f64 },
    #[error("{name} = {value} outside allowed range {range}")]
    RangeViolation {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("operation undefined in the decoupled regime (w = 0)")]
    DegenerateRegime,
    #[error("operation requires the decoupled regime (w = 0), got w = {w}")]
    NotDecoupled { w: f64 },
    #[error("point x = {x} is not in the open exterior domain")]
    OutOfDomain { x: f64 },
    #[error("packet has no support in the required component: {0}")]
    EmptySupport(&'static str),
    #[error("quadrature grid too coarse: estimated error {estimate:e} exceeds tolerance {tol:e}")]
    GridTooCoarse { estimate: f64, tol: f64 },
    #[error("semigroup time must be nonnegative, got t = {t}")]
    NegativeTime { t: f64 },
    #[error("resolvent parameter must satisfy Re(lambda) > 0, got {re}")]
    HalfPlaneViolation { re: f64 },
    #[error("packets carry different oscillation frequencies ({0} vs {1})")]
    CarrierMismatch(f64, f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
