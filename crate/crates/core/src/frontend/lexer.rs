use std::fmt;

use crate::error::{Error, Result};
use crate::source::SourceFile;
use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    String,
    Punctuation,
    Operator,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Identifier => "identifier",
            TokenKind::Number => "number",
            TokenKind::String => "string",
            TokenKind::Punctuation => "punctuation",
            TokenKind::Operator => "operator",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        matches!(self.kind, TokenKind::Keyword | TokenKind::Punctuation | TokenKind::Operator) && self.text == text
    }
}

pub const KEYWORDS: &[&str] = &[
    "pragma",
    "import",
    "contract",
    "interface",
    "library",
    "abstract",
    "is",
    "function",
    "modifier",
    "constructor",
    "fallback",
    "receive",
    "event",
    "struct",
    "enum",
    "mapping",
    "returns",
    "return",
    "if",
    "else",
    "while",
    "for",
    "do",
    "break",
    "continue",
    "emit",
    "throw",
    "using",
    "public",
    "external",
    "internal",
    "private",
    "payable",
    "view",
    "pure",
    "constant",
    "immutable",
    "storage",
    "memory",
    "calldata",
    "true",
    "false",
    "new",
    "delete",
    "indexed",
    "anonymous",
    "virtual",
    "override",
    "assembly",
    "try",
    "catch",
    "var",
    "address",
    "bool",
    "string",
    "bytes",
    "byte",
    "uint",
    "int",
    "ether",
    "wei",
    "gwei",
    "finney",
    "szabo",
    "seconds",
    "minutes",
    "hours",
    "days",
    "weeks",
];

/// `uintN`, `intN` and `bytesN` are keywords for every valid width.
fn is_sized_type_keyword(word: &str) -> bool {
    let check = |rest: &str, valid: &dyn Fn(u32) -> bool| {
        !rest.is_empty()
            && !rest.starts_with('0')
            && rest.bytes().all(|b| b.is_ascii_digit())
            && rest.parse::<u32>().map(valid).unwrap_or(false)
    };
    if let Some(rest) = word.strip_prefix("uint") {
        return check(rest, &|n| n % 8 == 0 && (8..=256).contains(&n));
    }
    if let Some(rest) = word.strip_prefix("int") {
        return check(rest, &|n| n % 8 == 0 && (8..=256).contains(&n));
    }
    if let Some(rest) = word.strip_prefix("bytes") {
        return check(rest, &|n| (1..=32).contains(&n));
    }
    false
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word) || is_sized_type_keyword(word)
}

const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "**=", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "|=", "&=",
    "^=", "<<", ">>", "**", "++", "--", "=>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?",
];

const PUNCTUATION: &[u8] = b"(){}[];,.:";

/// Splits `file` into tokens. Whitespace and comments are skipped; the gaps between
/// consecutive tokens are exactly that trivia.
pub fn tokenize(file: &SourceFile) -> Result<Vec<Token>> {
    Lexer { file, bytes: file.text.as_bytes(), pos: 0, tokens: Vec::new() }.run()
}

struct Lexer<'a> {
    file: &'a SourceFile,
    bytes: &'a [u8],
    pos: usize,
    tokens: Vec<Token>,
}

impl Lexer<'_> {
    fn run(mut self) -> Result<Vec<Token>> {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if self.starts_with("//") {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if self.starts_with("/*") {
                let start = self.pos;
                match self.file.text[self.pos + 2..].find("*/") {
                    Some(i) => self.pos += 2 + i + 2,
                    None => return Err(self.error(start, self.bytes.len(), "unterminated comment")),
                }
            } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
                self.word();
            } else if c.is_ascii_digit() {
                self.number()?;
            } else if c == b'"' || c == b'\'' {
                self.string(c)?;
            } else if PUNCTUATION.contains(&c) {
                self.push(TokenKind::Punctuation, self.pos, self.pos + 1);
            } else if let Some(op) = OPERATORS.iter().find(|op| self.starts_with(op)) {
                self.push(TokenKind::Operator, self.pos, self.pos + op.len());
            } else {
                let ch = self.file.text[self.pos..].chars().next().unwrap_or('?');
                let end = self.pos + ch.len_utf8();
                return Err(self.error(self.pos, end, &format!("illegal character `{}`", ch.escape_default())));
            }
        }
        Ok(self.tokens)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.bytes[self.pos..].starts_with(s.as_bytes())
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize) {
        self.tokens.push(Token {
            kind,
            text: self.file.text[start..end].to_string(),
            span: self.file.span(start as u32, end as u32),
        });
        self.pos = end;
    }

    fn error(&self, start: usize, end: usize, message: &str) -> Error {
        Error::Lex { message: message.to_string(), span: self.file.span(start as u32, end as u32) }
    }

    fn word(&mut self) {
        let start = self.pos;
        let mut end = start;
        while end < self.bytes.len()
            && (self.bytes[end].is_ascii_alphanumeric() || self.bytes[end] == b'_' || self.bytes[end] == b'$')
        {
            end += 1;
        }
        let kind = if is_keyword(&self.file.text[start..end]) { TokenKind::Keyword } else { TokenKind::Identifier };
        self.push(kind, start, end);
    }

    fn number(&mut self) -> Result<()> {
        let start = self.pos;
        let b = self.bytes;
        let mut end = start;
        if b[start] == b'0' && matches!(b.get(start + 1), Some(b'x') | Some(b'X')) {
            end += 2;
            while end < b.len() && (b[end].is_ascii_hexdigit() || b[end] == b'_') {
                end += 1;
            }
            if end == start + 2 {
                return Err(self.error(start, end, "hex literal without digits"));
            }
        } else {
            let digits = |mut i: usize| {
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
                    i += 1;
                }
                i
            };
            end = digits(end);
            if end + 1 < b.len() && b[end] == b'.' && b[end + 1].is_ascii_digit() {
                end = digits(end + 1);
            }
            if end < b.len() && (b[end] == b'e' || b[end] == b'E') {
                let mut exp = end + 1;
                if exp < b.len() && b[exp] == b'-' {
                    exp += 1;
                }
                if exp < b.len() && b[exp].is_ascii_digit() {
                    end = digits(exp);
                }
            }
        }
        if end < b.len() && (b[end].is_ascii_alphabetic() || b[end] == b'_') {
            return Err(self.error(start, end + 1, "malformed number literal"));
        }
        self.push(TokenKind::Number, start, end);
        Ok(())
    }

    fn string(&mut self, quote: u8) -> Result<()> {
        let start = self.pos;
        let mut i = start + 1;
        while i < self.bytes.len() {
            match self.bytes[i] {
                b'\\' => i += 2,
                b'\n' => break,
                c if c == quote => {
                    self.push(TokenKind::String, start, i + 1);
                    return Ok(());
                }
                _ => i += 1,
            }
        }
        Err(self.error(start, i.min(self.bytes.len()), "unterminated string literal"))
    }
}
