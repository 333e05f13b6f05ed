use thiserror::Error;

/// Errors raised while parsing expression text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

/// Errors raised during numerical evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("log of nonpositive real value {value} at ({x}, {y})")]
    LogDomain { value: f64, x: f64, y: f64 },
    #[error("sqrt of negative real value {value} at ({x}, {y})")]
    SqrtDomain { value: f64, x: f64, y: f64 },
    #[error("division by zero at ({x}, {y})")]
    DivisionByZero { x: f64, y: f64 },
    #[error("non-integer power of nonpositive real base {base} at ({x}, {y})")]
    PowDomain { base: f64, x: f64, y: f64 },
    #[error("variable t is unbound")]
    UnboundParameter,
    #[error("non-finite value produced at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
}

/// Errors from geometric/numeric algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("evaluation failed at ({x}, {y}): {source}")]
    EvalAt {
        x: f64,
        y: f64,
        #[source]
        source: EvalError,
    },
    #[error("Newton iteration did not converge; last iterate ({x}, {y}), residual {residual}")]
    NewtonDiverged { x: f64, y: f64, residual: f64 },
    #[error("singular Jacobian at ({x}, {y}): map is not a diffeomorphism near this point")]
    SingularJacobian { x: f64, y: f64 },
    #[error("both fields vanish at ({x}, {y}): proportionality indeterminate")]
    Indeterminate { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies outside the declared domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("{0}")]
    Other(String),
}

impl GeomError {
    pub fn eval_at(x: f64, y: f64, source: EvalError) -> Self {
        GeomError::EvalAt { x, y, source }
    }
}
