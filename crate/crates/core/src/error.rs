use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{family}({n}) is outside the supported range (need n >= {min})")]
    OutOfRange {
        family: &'static str,
        n: usize,
        min: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structure constants violate {what}: residual {residual:.3e}")]
    NotALieAlgebra { what: &'static str, residual: f64 },

    #[error("span of the isotropy indices is not closed under the bracket (residual {0:.3e})")]
    NotASubalgebra(f64),

    #[error("decomposition is not reductive: [k, p] has a k-component of size {0:.3e}")]
    NotReductive(f64),

    #[error("inner product restricted to p is not positive definite (min eigenvalue {0:.3e})")]
    DegenerateRestriction(f64),

    #[error("inner product on p is not Ad(K)-invariant (residual {0:.3e})")]
    NotInvariantMetric(f64),

    #[error("Lie algebra is not unimodular: max |tr ad X| = {0:.3e}")]
    NotUnimodular(f64),

    #[error("metric is not Einstein: relative residual {residual:.3e} exceeds {tol:.1e}")]
    NotEinstein { residual: f64, tol: f64 },

    #[error("metric is not naturally reductive: max |ad_p X + (ad_p X)^t| = {0:.3e}")]
    NotNaturallyReductive(f64),

    #[error("isotropy representation is not multiplicity-free")]
    NotMultiplicityFree,

    #[error("Killing form is not negative definite (max eigenvalue {0:.3e})")]
    KillingNotDefinite(f64),

    #[error("isotropy decomposition unstable: generic elements gave {first} and {second} summands")]
    DecompositionUnstable { first: usize, second: usize },

    #[error("-Kil is not a multiple of the metric on summand {summand} (deviation {deviation:.3e})")]
    KillingNotScalar { summand: usize, deviation: f64 },

    #[error("standard metric expected b_k = 1 but summand {summand} has b_k = {value}")]
    NotStandard { summand: usize, value: f64 },

    #[error("matrix h is not invertible")]
    SingularH,

    #[error("subspace basis does not lie in the operator's basis span (residual {0:.3e})")]
    BasisMismatch(f64),

    #[error("factors are not Einstein with a common positive constant (rho1 = {rho1}, rho2 = {rho2})")]
    NotEinsteinProduct { rho1: f64, rho2: f64 },

    #[error("flow lost positive definiteness at step {step}; try a smaller dt")]
    StepTooLarge { step: usize },

    #[error("simple ideals of k have different Killing ratios: {0:?}")]
    NonUniformC(Vec<f64>),

    #[error("no Einstein parameter found in (0, 1)")]
    NoEinsteinParameter,

    #[error("{0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
