//! Lexing, parsing, inheritance linearization and name resolution.

pub mod ast;
pub mod inheritance;
pub mod lexer;
pub mod names;
pub mod parser;

pub use inheritance::resolve_inheritance;
pub use lexer::{tokenize, Token, TokenKind};
pub use names::{resolve_names, SymbolTable};
pub use parser::parse;

use crate::error::Result;
use crate::source::{FileId, SourceFile};

/// Tokenizes and parses a standalone source string (file id 0).
pub fn parse_source(text: &str) -> Result<ast::SourceUnit> {
    let file = SourceFile::new(FileId(0), "<input>", text);
    parse_file(&file)
}

pub fn parse_file(file: &SourceFile) -> Result<ast::SourceUnit> {
    let tokens = tokenize(file)?;
    parse(file, &tokens)
}
