//! Error type shared across the engine.
//!
//! Errors split into two families, which the CLI maps to distinct exit
//! codes: problems with what the user asked for (syntax, unknown names,
//! wrong degrees, wrong model kind) and genuine assertion failures inside
//! the engine (a derivation that does not reproduce its closed form, a
//! rewrite system that fails its confluence check).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A constructor or command received parameters outside its contract
    /// (for example `g = 0`, or a malformed model descriptor).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A class mentions a generator that the active model does not have.
    #[error("generator `{0}` is not in the model's alphabet")]
    Alphabet(String),

    /// An operation that requires homogeneous input of a specific degree
    /// saw a term of the wrong degree.
    #[error("degree mismatch: expected degree {expected}, found a term of degree {found}")]
    DegreeMismatch { expected: u32, found: u32 },

    /// An operation was invoked on a model kind it is not defined for.
    #[error("{op} requires a {expected} model, got a {found} model")]
    WrongModelKind {
        op: &'static str,
        expected: &'static str,
        found: &'static str,
    },

    /// A rewrite rule failed validation at system construction.
    #[error("invalid rewrite rule `{name}`: {reason}")]
    InvalidRule { name: String, reason: String },

    /// A rewrite system failed its local confluence check.
    #[error("rewrite system is not locally confluent: {witness}")]
    NotConfluent { witness: String },

    /// The linear system for the theta coefficients is inconsistent or
    /// underdetermined.
    #[error("coefficient solver failed: {0}")]
    Solver(String),

    /// An internal cross-check failed: a derivation disagrees with its
    /// closed form, or a constructed model violates one of its own
    /// invariants.
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    /// Expression or descriptor text failed to parse.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// An identifier in an expression resolves to nothing in the active
    /// model: neither a generator nor a named divisor class.
    #[error("unknown identifier `{name}` for model {model}")]
    UnknownIdentifier { name: String, model: String },

    /// A top-degree evaluation was expected to produce a plain number but
    /// still contains unknown coefficients.
    #[error("evaluation did not reduce to a number: {0}")]
    NotNumeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the input handed to the engine (bad
    /// syntax, unknown names, wrong degree/model), as opposed to internal
    /// assertion failures. The CLI exits with 2 for the former and 1 for
    /// the latter.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Alphabet(_)
                | Error::DegreeMismatch { .. }
                | Error::WrongModelKind { .. }
                | Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::NotNumeric(_)
        )
    }
}
