use thiserror::Error;

/// Errors raised by the symbolic kernel and the layers built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared symbol `{name}` at line {line}, column {column}")]
    Undeclared { name: String, line: usize, column: usize },
    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("cyclic substitution through `{0}`")]
    CyclicBinding(String),
    #[error("unbound symbol `{0}` during evaluation")]
    Unbound(String),
    #[error("cannot evaluate formal node `{0}` to a rational")]
    NotRational(String),
    #[error("distribution nested inside a distribution argument: {0}")]
    NestedDistribution(String),
    #[error("generator sets differ")]
    GeneratorMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` repeated in integration measure")]
    RepeatedMeasure(String),
    #[error("element is not even")]
    NotEven,
    #[error("not invertible: even element has zero body")]
    ZeroBody,
    #[error("no time derivative available for generator `{0}`")]
    NoTimeDerivative(String),
    #[error("index {index} out of range for phase space of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expression references `{0}`, which is not a phase-space variable, its velocity or a constant")]
    UnknownFieldSymbol(String),
    #[error("symplectic matrix invalid: {0}")]
    Symplectic(String),
    #[error("no body-level root: {0}")]
    NoRoot(String),
    #[error("inhomogeneous sum: `{left}` has dimension {left_dim} but `{right}` has dimension {right_dim}")]
    Inhomogeneous {
        left: String,
        left_dim: String,
        right: String,
        right_dim: String,
    },
    #[error("no dimension assigned to `{0}`")]
    Unassigned(String),
    #[error("divisor must have the dimension of an action, found {0}")]
    DivisorDimension(String),
    #[error("invalid lattice configuration: {0}")]
    Lattice(String),
    #[error("singular Gaussian step: quadratic coefficient vanishes after {step} step(s)")]
    SingularStep { step: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{context}: {source}")]
    Located {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, context: impl Into<String>) -> Self {
        Error::Located {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
