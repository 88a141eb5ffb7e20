use thiserror::Error;

use crate::source::Span;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{span}: lexical error: {message}")]
    Lex { message: String, span: Span },

    #[error("{span}: syntax error: expected {}, found {found}", expected.join(" or "))]
    Syntax { expected: Vec<String>, found: String, span: Span },

    #[error("{span}: unsupported construct: {message}")]
    Unsupported { message: String, span: Span },

    #[error("{span}: unresolved base contract `{name}`")]
    UnresolvedBase { name: String, span: Span },

    #[error("{span}: linearization of inheritance graph impossible for `{contract}`")]
    Linearization { contract: String, span: Span },

    #[error("{span}: duplicate contract name `{name}`")]
    DuplicateContract { name: String, span: Span },

    #[error("{span}: unresolved identifier `{name}`")]
    UnresolvedIdentifier { name: String, span: Span },

    #[error("{span}: {message}")]
    Lowering { message: String, span: Span },
}

impl Error {
    pub fn span(&self) -> Span {
        match self {
            Error::Lex { span, .. }
            | Error::Syntax { span, .. }
            | Error::Unsupported { span, .. }
            | Error::UnresolvedBase { span, .. }
            | Error::Linearization { span, .. }
            | Error::DuplicateContract { span, .. }
            | Error::UnresolvedIdentifier { span, .. }
            | Error::Lowering { span, .. } => *span,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
