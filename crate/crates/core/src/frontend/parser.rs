//! Recursive-descent parser for the Solidity subset. Binary expressions use
//! precedence climbing with the operator table of the Solidity grammar.

use crate::error::{Error, Result};
use crate::frontend::ast::*;
use crate::frontend::lexer::{Token, TokenKind};
use crate::source::{SourceFile, Span};

/// Parses a token stream produced by [`tokenize`](super::lexer::tokenize) over `file`.
pub fn parse(file: &SourceFile, tokens: &[Token]) -> Result<SourceUnit> {
    Parser { file, tokens, pos: 0 }.source_unit()
}

struct Parser<'a> {
    file: &'a SourceFile,
    tokens: &'a [Token],
    pos: usize,
}

const UNITS: &[&str] = &["ether", "wei", "gwei", "finney", "szabo", "seconds", "minutes", "hours", "days", "weeks"];

fn binary_op(text: &str) -> Option<(BinaryOp, u8)> {
    use BinaryOp::*;
    Some(match text {
        "||" => (Or, 1),
        "&&" => (And, 2),
        "==" => (Eq, 3),
        "!=" => (Ne, 3),
        "<" => (Lt, 4),
        ">" => (Gt, 4),
        "<=" => (Le, 4),
        ">=" => (Ge, 4),
        "|" => (BitOr, 5),
        "^" => (BitXor, 6),
        "&" => (BitAnd, 7),
        "<<" => (Shl, 8),
        ">>" => (Shr, 8),
        "+" => (Add, 9),
        "-" => (Sub, 9),
        "*" => (Mul, 10),
        "/" => (Div, 10),
        "%" => (Mod, 10),
        "**" => (Pow, 11),
        _ => return None,
    })
}

fn assign_op(text: &str) -> Option<Option<BinaryOp>> {
    use BinaryOp::*;
    Some(match text {
        "=" => None,
        "+=" => Some(Add),
        "-=" => Some(Sub),
        "*=" => Some(Mul),
        "/=" => Some(Div),
        "%=" => Some(Mod),
        "|=" => Some(BitOr),
        "&=" => Some(BitAnd),
        "^=" => Some(BitXor),
        "<<=" => Some(Shl),
        ">>=" => Some(Shr),
        _ => return None,
    })
}

fn is_elementary_keyword(tok: &Token) -> bool {
    tok.kind == TokenKind::Keyword && ElementaryType::from_keyword(&tok.text).is_some()
}

impl<'a> Parser<'a> {
    // ---- token helpers ----

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + n)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn eof_span(&self) -> Span {
        let end = self.file.text.len() as u32;
        self.file.span(end, end)
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    /// Span of the most recently consumed token.
    fn prev(&self) -> Span {
        self.tokens[self.pos - 1].span
    }

    fn bump(&mut self) -> &'a Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T> {
        let found = match self.peek() {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        };
        Err(Error::Syntax { expected: expected.iter().map(|s| s.to_string()).collect(), found, span: self.here() })
    }

    fn unsupported<T>(&self, what: &str) -> Result<T> {
        Err(Error::Unsupported { message: what.to_string(), span: self.here() })
    }

    fn expect(&mut self, text: &str) -> Result<Span> {
        if self.at(text) {
            Ok(self.bump().span)
        } else {
            self.error(&[&format!("`{text}`")])
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        if self.at_ident() {
            let t = self.bump();
            Ok(Ident { name: t.text.clone(), span: t.span })
        } else {
            self.error(&["identifier"])
        }
    }

    fn span_from(&self, start: Span) -> Span {
        start.to(self.prev())
    }

    // ---- top level ----

    fn source_unit(&mut self) -> Result<SourceUnit> {
        let mut unit = SourceUnit {
            pragmas: Vec::new(),
            using_directives: Vec::new(),
            contracts: Vec::new(),
            span: self.file.span(0, self.file.text.len() as u32),
        };
        while let Some(tok) = self.peek() {
            match tok.text.as_str() {
                "pragma" if tok.kind == TokenKind::Keyword => {
                    let start = self.bump().span;
                    while !self.at(";") {
                        if self.peek().is_none() {
                            return self.error(&["`;`"]);
                        }
                        self.bump();
                    }
                    let text = self.file.snippet(start.to(self.prev())).to_string();
                    self.bump();
                    unit.pragmas.push(text);
                }
                "import" if tok.kind == TokenKind::Keyword => {
                    return self.unsupported("import directives (inputs must be single files)");
                }
                "using" if tok.kind == TokenKind::Keyword => {
                    let u = self.using_directive(None)?;
                    unit.using_directives.push(u);
                }
                "contract" | "interface" | "library" | "abstract" if tok.kind == TokenKind::Keyword => {
                    let c = self.contract(&mut unit.using_directives)?;
                    unit.contracts.push(c);
                }
                "enum" => return self.unsupported("enum definitions"),
                _ => return self.error(&["`contract`", "`interface`", "`library`", "`pragma`"]),
            }
        }
        Ok(unit)
    }

    fn using_directive(&mut self, contract: Option<&str>) -> Result<UsingDirective> {
        let start = self.expect("using")?;
        let library = self.ident()?;
        self.expect("for")?;
        let target = if self.eat("*") { None } else { Some(self.type_name()?) };
        self.expect(";")?;
        Ok(UsingDirective { library, target, contract: contract.map(str::to_string), span: self.span_from(start) })
    }

    fn contract(&mut self, usings: &mut Vec<UsingDirective>) -> Result<ContractDef> {
        let start = self.here();
        let is_abstract = self.eat("abstract");
        let kind = match self.peek().map(|t| t.text.as_str()) {
            Some("contract") => ContractKind::Contract,
            Some("interface") => ContractKind::Interface,
            Some("library") => ContractKind::Library,
            _ => return self.error(&["`contract`"]),
        };
        self.bump();
        let name = self.ident()?;
        let mut bases = Vec::new();
        if self.eat("is") {
            loop {
                let base = self.ident()?;
                let args = if self.at("(") { self.call_args()? } else { Vec::new() };
                bases.push(InheritanceSpecifier { name: base, args });
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("{")?;
        let mut c = ContractDef {
            name,
            kind,
            is_abstract,
            bases,
            state_vars: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            structs: Vec::new(),
            events: Vec::new(),
            linearization: Vec::new(),
            span: start,
        };
        while !self.eat("}") {
            let Some(tok) = self.peek() else {
                return self.error(&["`}`"]);
            };
            match tok.text.as_str() {
                "using" if tok.kind == TokenKind::Keyword => {
                    let u = self.using_directive(Some(&c.name.name))?;
                    usings.push(u);
                }
                "struct" if tok.kind == TokenKind::Keyword => c.structs.push(self.struct_def()?),
                "event" if tok.kind == TokenKind::Keyword => c.events.push(self.event_def()?),
                "modifier" if tok.kind == TokenKind::Keyword => {
                    let m = self.modifier_def(&c.name.name)?;
                    c.modifiers.push(m);
                }
                "function" | "constructor" | "fallback" | "receive" if tok.kind == TokenKind::Keyword => {
                    let f = self.function_def(&c.name.name)?;
                    c.functions.push(f);
                }
                "enum" => return self.unsupported("enum definitions"),
                _ => {
                    let v = self.state_var()?;
                    c.state_vars.push(v);
                }
            }
        }
        c.span = self.span_from(start);
        Ok(c)
    }

    fn struct_def(&mut self) -> Result<StructDef> {
        let start = self.expect("struct")?;
        let name = self.ident()?;
        self.expect("{")?;
        let mut fields = Vec::new();
        while !self.eat("}") {
            let ty = self.type_name()?;
            let field = self.ident()?;
            self.expect(";")?;
            fields.push((field, ty));
        }
        Ok(StructDef { name, fields, span: self.span_from(start) })
    }

    fn event_def(&mut self) -> Result<EventDef> {
        let start = self.expect("event")?;
        let name = self.ident()?;
        let params = self.parameter_list(true)?;
        self.eat("anonymous");
        self.expect(";")?;
        Ok(EventDef { name, params, span: self.span_from(start) })
    }

    fn modifier_def(&mut self, contract: &str) -> Result<ModifierDef> {
        let start = self.expect("modifier")?;
        let name = self.ident()?;
        let params = if self.at("(") { self.parameter_list(false)? } else { Vec::new() };
        loop {
            if self.eat("virtual") {
                continue;
            }
            if self.at("override") {
                self.override_spec()?;
                continue;
            }
            break;
        }
        let body = self.block()?;
        Ok(ModifierDef { name, params, body, contract: contract.to_string(), span: self.span_from(start) })
    }

    fn override_spec(&mut self) -> Result<()> {
        self.expect("override")?;
        if self.eat("(") {
            while !self.eat(")") {
                self.ident()?;
                self.eat(",");
            }
        }
        Ok(())
    }

    fn function_def(&mut self, contract: &str) -> Result<FunctionDef> {
        let start = self.here();
        let head = self.bump();
        let (mut kind, name) = match head.text.as_str() {
            "constructor" => (FunctionKind::Constructor, Ident { name: "constructor".into(), span: head.span }),
            "fallback" => (FunctionKind::Fallback, Ident { name: "fallback".into(), span: head.span }),
            "receive" => (FunctionKind::Receive, Ident { name: "receive".into(), span: head.span }),
            _ => {
                if self.at("(") {
                    (FunctionKind::Fallback, Ident { name: "fallback".into(), span: head.span })
                } else {
                    let n = self.ident()?;
                    (FunctionKind::Function, n)
                }
            }
        };
        let mut name = name;
        if kind == FunctionKind::Function && name.name == contract {
            kind = FunctionKind::Constructor;
            name.name = "constructor".into();
        }
        let params = self.parameter_list(false)?;
        let mut visibility = None;
        let mut mutability = Mutability::NonPayable;
        let mut returns = Vec::new();
        let mut modifiers = Vec::new();
        loop {
            let Some(tok) = self.peek() else { break };
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Keyword, "public") => visibility = Some(Visibility::Public),
                (TokenKind::Keyword, "external") => visibility = Some(Visibility::External),
                (TokenKind::Keyword, "internal") => visibility = Some(Visibility::Internal),
                (TokenKind::Keyword, "private") => visibility = Some(Visibility::Private),
                (TokenKind::Keyword, "payable") => mutability = Mutability::Payable,
                (TokenKind::Keyword, "view") | (TokenKind::Keyword, "constant") => mutability = Mutability::View,
                (TokenKind::Keyword, "pure") => mutability = Mutability::Pure,
                (TokenKind::Keyword, "virtual") => {}
                (TokenKind::Keyword, "override") => {
                    self.override_spec()?;
                    continue;
                }
                (TokenKind::Keyword, "returns") => {
                    self.bump();
                    returns = self.parameter_list(false)?;
                    continue;
                }
                (TokenKind::Identifier, _) => {
                    let mstart = tok.span;
                    let mname = self.ident()?;
                    let args = if self.at("(") { self.call_args()? } else { Vec::new() };
                    modifiers.push(ModifierInvocation { name: mname, args, span: self.span_from(mstart) });
                    continue;
                }
                _ => break,
            }
            self.bump();
        }
        if kind == FunctionKind::Constructor && !returns.is_empty() {
            return Err(Error::Syntax {
                expected: vec!["constructor body".into()],
                found: "return values on a constructor".into(),
                span: name.span,
            });
        }
        let body = if self.eat(";") { None } else { Some(self.block()?) };
        let visibility = visibility.unwrap_or(match kind {
            FunctionKind::Fallback | FunctionKind::Receive => Visibility::External,
            _ => Visibility::Public,
        });
        Ok(FunctionDef {
            name,
            kind,
            params,
            returns,
            visibility,
            mutability,
            modifiers,
            body,
            contract: contract.to_string(),
            span: self.span_from(start),
        })
    }

    fn parameter_list(&mut self, event: bool) -> Result<Vec<Parameter>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")") {
            return Ok(params);
        }
        loop {
            let start = self.here();
            let ty = self.type_name()?;
            if event {
                self.eat("indexed");
            }
            let location = self.location();
            let name = if self.at_ident() { Some(self.ident()?) } else { None };
            params.push(Parameter { name, ty, location, span: self.span_from(start) });
            if self.eat(")") {
                return Ok(params);
            }
            if !self.eat(",") {
                return self.error(&["`,`", "`)`"]);
            }
        }
    }

    fn location(&mut self) -> Location {
        if self.eat("storage") {
            Location::Storage
        } else if self.eat("memory") {
            Location::Memory
        } else if self.eat("calldata") {
            Location::Calldata
        } else {
            Location::Default
        }
    }

    fn state_var(&mut self) -> Result<VariableDecl> {
        let start = self.here();
        let ty = self.type_name()?;
        let mut visibility = Visibility::Internal;
        let mut is_constant = false;
        loop {
            if self.eat("public") {
                visibility = Visibility::Public;
            } else if self.eat("private") {
                visibility = Visibility::Private;
            } else if self.eat("internal") {
                visibility = Visibility::Internal;
            } else if self.eat("constant") {
                is_constant = true;
            } else if self.eat("immutable") {
            } else if self.at("override") {
                self.override_spec()?;
            } else {
                break;
            }
        }
        let name = self.ident()?;
        let initializer = if self.eat("=") { Some(self.expression()?) } else { None };
        self.expect(";")?;
        let span = self.span_from(start);
        if is_constant && initializer.is_none() {
            return Err(Error::Syntax {
                expected: vec!["`=` initializer for constant".into()],
                found: "`;`".into(),
                span,
            });
        }
        Ok(VariableDecl {
            name,
            ty,
            visibility,
            is_constant,
            location: Location::Default,
            initializer,
            scope: VarScope::State,
            span,
        })
    }

    // ---- types ----

    fn type_name(&mut self) -> Result<TypeName> {
        let Some(tok) = self.peek() else { return self.error(&["type name"]) };
        let mut ty = if is_elementary_keyword(tok) {
            self.bump();
            let mut e = ElementaryType::from_keyword(&tok.text).expect("checked keyword");
            if matches!(e, ElementaryType::Address { .. }) && self.eat("payable") {
                e = ElementaryType::Address { payable: true };
            }
            TypeName::Elementary(e)
        } else if tok.is("mapping") {
            self.bump();
            self.expect("(")?;
            let key_span = self.here();
            let key = self.type_name()?;
            if !matches!(key, TypeName::Elementary(_) | TypeName::UserDefined(_)) {
                return Err(Error::Syntax {
                    expected: vec!["elementary mapping key type".into()],
                    found: format!("`{key}`"),
                    span: key_span,
                });
            }
            self.expect("=>")?;
            let value = self.type_name()?;
            self.expect(")")?;
            TypeName::Mapping(Box::new(key), Box::new(value))
        } else if tok.is("function") {
            self.bump();
            let params = self.parameter_list(false)?.into_iter().map(|p| p.ty).collect();
            let mut visibility = Visibility::Internal;
            let mut returns = Vec::new();
            loop {
                if self.eat("external") {
                    visibility = Visibility::External;
                } else if self.eat("internal") {
                    visibility = Visibility::Internal;
                } else if self.eat("payable") || self.eat("view") || self.eat("pure") {
                } else if self.at("returns") {
                    self.bump();
                    returns = self.parameter_list(false)?.into_iter().map(|p| p.ty).collect();
                } else {
                    break;
                }
            }
            TypeName::Function { params, returns, visibility }
        } else if tok.kind == TokenKind::Identifier {
            let mut name = self.ident()?.name;
            while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
                self.bump();
                name = self.ident()?.name;
            }
            TypeName::UserDefined(name)
        } else {
            return self.error(&["type name"]);
        };
        while self.at("[") {
            self.bump();
            if self.eat("]") {
                ty = TypeName::Array(Box::new(ty), None);
            } else {
                let Some(t) = self.peek() else { return self.error(&["array length"]) };
                if t.kind != TokenKind::Number {
                    return self.error(&["array length literal"]);
                }
                let len = parse_integer(&t.text).ok_or_else(|| Error::Syntax {
                    expected: vec!["array length literal".into()],
                    found: format!("`{}`", t.text),
                    span: t.span,
                })?;
                self.bump();
                self.expect("]")?;
                ty = TypeName::Array(Box::new(ty), Some(len));
            }
        }
        Ok(ty)
    }

    /// Whether a local variable declaration starts here. Decided by trying to parse
    /// `Type [location] name` and rolling back.
    fn looks_like_declaration(&mut self) -> bool {
        let save = self.pos;
        let Some(tok) = self.peek() else { return false };
        if is_elementary_keyword(tok) && self.peek_at(1).is_some_and(|t| t.is("(")) {
            return false;
        }
        let ok = self.type_name().is_ok()
            && self.peek().is_some_and(|t| {
                t.kind == TokenKind::Identifier || t.is("storage") || t.is("memory") || t.is("calldata")
            });
        self.pos = save;
        ok
    }

    // ---- statements ----

    fn block(&mut self) -> Result<Block> {
        let start = self.expect("{")?;
        let mut statements = Vec::new();
        while !self.eat("}") {
            if self.peek().is_none() {
                return self.error(&["`}`"]);
            }
            statements.push(self.statement()?);
        }
        Ok(Block { statements, span: self.span_from(start) })
    }

    fn statement(&mut self) -> Result<Statement> {
        let start = self.here();
        let tok = self.peek().expect("caller checked");
        let kind = match (tok.kind, tok.text.as_str()) {
            (TokenKind::Punctuation, "{") => StmtKind::Block(self.block()?),
            (TokenKind::Keyword, "if") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expression()?;
                self.expect(")")?;
                let then_branch = Box::new(self.statement_or_eof()?);
                let else_branch = if self.eat("else") { Some(Box::new(self.statement_or_eof()?)) } else { None };
                StmtKind::If { cond, then_branch, else_branch }
            }
            (TokenKind::Keyword, "while") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expression()?;
                self.expect(")")?;
                let body = Box::new(self.statement_or_eof()?);
                StmtKind::While { cond, body }
            }
            (TokenKind::Keyword, "for") => {
                self.bump();
                self.expect("(")?;
                let init = if self.eat(";") { None } else { Some(Box::new(self.simple_statement()?)) };
                let cond = if self.at(";") { None } else { Some(self.expression()?) };
                self.expect(";")?;
                let post = if self.at(")") { None } else { Some(self.expression()?) };
                self.expect(")")?;
                let body = Box::new(self.statement_or_eof()?);
                StmtKind::For { init, cond, post, body }
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let value = if self.at(";") { None } else { Some(self.expression()?) };
                self.expect(";")?;
                StmtKind::Return(value)
            }
            (TokenKind::Keyword, "emit") => {
                self.bump();
                let e = self.expression()?;
                if !matches!(e.kind, ExprKind::Call { .. }) {
                    return Err(Error::Syntax {
                        expected: vec!["event call".into()],
                        found: format!("`{}`", self.file.snippet(e.span)),
                        span: e.span,
                    });
                }
                self.expect(";")?;
                StmtKind::Emit(e)
            }
            (TokenKind::Keyword, "throw") => {
                self.bump();
                self.expect(";")?;
                StmtKind::Throw
            }
            (TokenKind::Keyword, "break") => {
                self.bump();
                self.expect(";")?;
                StmtKind::Break
            }
            (TokenKind::Keyword, "continue") => {
                self.bump();
                self.expect(";")?;
                StmtKind::Continue
            }
            (TokenKind::Identifier, "_") if self.peek_at(1).is_some_and(|t| t.is(";")) => {
                self.bump();
                self.bump();
                StmtKind::Placeholder
            }
            (TokenKind::Keyword, "do") => return self.unsupported("do-while loops"),
            (TokenKind::Keyword, "assembly") => return self.unsupported("inline assembly"),
            (TokenKind::Keyword, "try") => return self.unsupported("try/catch"),
            (TokenKind::Keyword, "var") => return self.unsupported("`var` declarations"),
            (TokenKind::Identifier, "unchecked") if self.peek_at(1).is_some_and(|t| t.is("{")) => {
                return self.unsupported("unchecked blocks")
            }
            _ => return self.simple_statement(),
        };
        Ok(Statement { kind, span: self.span_from(start) })
    }

    fn statement_or_eof(&mut self) -> Result<Statement> {
        if self.peek().is_none() {
            return self.error(&["statement"]);
        }
        self.statement()
    }

    /// Variable declaration or expression statement, including the trailing `;`.
    fn simple_statement(&mut self) -> Result<Statement> {
        let start = self.here();
        let kind = if self.at("(") && self.looks_like_tuple_declaration() {
            self.tuple_declaration()?
        } else if self.looks_like_declaration() {
            let decl = self.local_decl()?;
            let init = if self.eat("=") { Some(self.expression()?) } else { None };
            StmtKind::VarDecl { decls: vec![Some(decl)], init }
        } else {
            StmtKind::Expr(self.expression()?)
        };
        self.expect(";")?;
        Ok(Statement { kind, span: self.span_from(start) })
    }

    fn local_decl(&mut self) -> Result<VariableDecl> {
        let start = self.here();
        let ty = self.type_name()?;
        let location = self.location();
        let name = self.ident()?;
        Ok(VariableDecl {
            name,
            ty,
            visibility: Visibility::Internal,
            is_constant: false,
            location,
            initializer: None,
            scope: VarScope::Local,
            span: self.span_from(start),
        })
    }

    fn looks_like_tuple_declaration(&mut self) -> bool {
        let save = self.pos;
        self.bump();
        while self.eat(",") {}
        let ok = self.looks_like_declaration();
        self.pos = save;
        ok
    }

    fn tuple_declaration(&mut self) -> Result<StmtKind> {
        self.expect("(")?;
        let mut decls = Vec::new();
        let mut current = None;
        loop {
            if self.eat(")") {
                decls.push(current.take());
                break;
            }
            if self.eat(",") {
                decls.push(current.take());
                continue;
            }
            if current.is_some() {
                return self.error(&["`,`", "`)`"]);
            }
            current = Some(self.local_decl()?);
        }
        self.expect("=")?;
        let init = Some(self.expression()?);
        Ok(StmtKind::VarDecl { decls, init })
    }

    // ---- expressions ----

    pub(crate) fn expression(&mut self) -> Result<Expression> {
        let lhs = self.binary(1)?;
        if self.at("?") {
            return self.unsupported("conditional (ternary) expressions");
        }
        if let Some(op) =
            self.peek().and_then(|t| if t.kind == TokenKind::Operator { assign_op(&t.text) } else { None })
        {
            self.bump();
            if !lhs.is_lvalue() {
                return Err(Error::Syntax {
                    expected: vec!["assignable expression".into()],
                    found: format!("`{}`", self.file.snippet(lhs.span)),
                    span: lhs.span,
                });
            }
            if op.is_some() && matches!(lhs.kind, ExprKind::Tuple(_)) {
                return self.unsupported("compound assignment to a tuple");
            }
            let rhs = self.expression()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expression { kind: ExprKind::Assign { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span });
        }
        Ok(lhs)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expression> {
        let mut lhs = self.unary()?;
        loop {
            let Some((op, prec)) =
                self.peek().filter(|t| t.kind == TokenKind::Operator).and_then(|t| binary_op(&t.text))
            else {
                break;
            };
            if prec < min_prec {
                break;
            }
            self.bump();
            // `**` is right-associative, everything else left-associative.
            let next = if op == BinaryOp::Pow { prec } else { prec + 1 };
            let rhs = self.binary(next)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expression { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression> {
        let start = self.here();
        let op = match self.peek().filter(|t| t.kind == TokenKind::Operator).map(|t| t.text.as_str()) {
            Some("!") => Some(UnaryOp::Not),
            Some("~") => Some(UnaryOp::BitNot),
            Some("-") => Some(UnaryOp::Neg),
            Some("++") | Some("--") => return self.unsupported("increment/decrement operators (use `+= 1`)"),
            _ => None,
        };
        if self.at("delete") {
            return self.unsupported("`delete` expressions");
        }
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expression { kind: ExprKind::Unary { op, operand: Box::new(operand) }, span });
        }
        self.postfix()
    }

    fn call_args(&mut self) -> Result<Vec<Expression>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        if self.at("{") {
            return self.unsupported("named call arguments");
        }
        loop {
            args.push(self.expression()?);
            if self.eat(")") {
                return Ok(args);
            }
            if !self.eat(",") {
                return self.error(&["`,`", "`)`"]);
            }
        }
    }

    fn postfix(&mut self) -> Result<Expression> {
        let mut e = self.primary()?;
        loop {
            if self.at(".") {
                self.bump();
                let Some(t) = self.peek() else { return self.error(&["member name"]) };
                if !matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) {
                    return self.error(&["member name"]);
                }
                self.bump();
                let member = Ident { name: t.text.clone(), span: t.span };
                let span = e.span.to(member.span);
                e = Expression { kind: ExprKind::Member { base: Box::new(e), member }, span };
            } else if self.at("[") {
                self.bump();
                if self.at("]") {
                    return self.unsupported("array type expressions");
                }
                if self.at(":") {
                    return self.unsupported("slices");
                }
                let index = self.expression()?;
                self.expect("]")?;
                let span = e.span.to(self.prev());
                e = Expression { kind: ExprKind::Index { base: Box::new(e), index: Box::new(index) }, span };
            } else if self.at("(") {
                let args = self.call_args()?;
                let span = e.span.to(self.prev());
                e = Expression { kind: ExprKind::Call { callee: Box::new(e), args }, span };
            } else if self.at("{")
                && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier)
                && self.peek_at(2).is_some_and(|t| t.is(":"))
            {
                self.bump();
                let mut options = Vec::new();
                loop {
                    let key = self.ident()?;
                    self.expect(":")?;
                    let value = self.expression()?;
                    options.push((key, value));
                    if self.eat("}") {
                        break;
                    }
                    if !self.eat(",") {
                        return self.error(&["`,`", "`}`"]);
                    }
                }
                let span = e.span.to(self.prev());
                e = Expression { kind: ExprKind::CallOptions { callee: Box::new(e), options }, span };
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expression> {
        let Some(tok) = self.peek() else { return self.error(&["expression"]) };
        let start = tok.span;
        let kind = match tok.kind {
            TokenKind::Identifier => {
                self.bump();
                if tok.text == "payable" {
                    ExprKind::TypeExpr(TypeName::Elementary(ElementaryType::Address { payable: true }))
                } else {
                    ExprKind::Identifier(tok.text.clone())
                }
            }
            TokenKind::Number => {
                self.bump();
                let unit = match self.peek() {
                    Some(u) if u.kind == TokenKind::Keyword && UNITS.contains(&u.text.as_str()) => {
                        self.bump();
                        Some(u.text.clone())
                    }
                    _ => None,
                };
                ExprKind::Literal(Literal::Number { value: tok.text.clone(), unit })
            }
            TokenKind::String => {
                let mut s = String::new();
                while let Some(t) = self.peek().filter(|t| t.kind == TokenKind::String) {
                    s.push_str(&t.text[1..t.text.len() - 1]);
                    self.bump();
                }
                ExprKind::Literal(Literal::String(s))
            }
            TokenKind::Keyword => match tok.text.as_str() {
                "true" | "false" => {
                    self.bump();
                    ExprKind::Literal(Literal::Bool(tok.text == "true"))
                }
                "new" => {
                    self.bump();
                    ExprKind::New(self.type_name()?)
                }
                "payable" => {
                    self.bump();
                    ExprKind::TypeExpr(TypeName::Elementary(ElementaryType::Address { payable: true }))
                }
                _ if is_elementary_keyword(tok) => {
                    self.bump();
                    let e = ElementaryType::from_keyword(&tok.text).expect("checked keyword");
                    ExprKind::TypeExpr(TypeName::Elementary(e))
                }
                _ => return self.error(&["expression"]),
            },
            TokenKind::Punctuation if tok.text == "(" => {
                self.bump();
                let mut items = Vec::new();
                let mut current = None;
                let mut saw_comma = false;
                loop {
                    if self.eat(")") {
                        items.push(current.take());
                        break;
                    }
                    if self.eat(",") {
                        saw_comma = true;
                        items.push(current.take());
                        continue;
                    }
                    if current.is_some() {
                        return self.error(&["`,`", "`)`"]);
                    }
                    current = Some(self.expression()?);
                }
                if !saw_comma {
                    return match items.pop().flatten() {
                        Some(inner) => Ok(inner),
                        None => Err(Error::Syntax {
                            expected: vec!["expression".into()],
                            found: "`)`".into(),
                            span: self.prev(),
                        }),
                    };
                }
                ExprKind::Tuple(items)
            }
            TokenKind::Punctuation if tok.text == "[" => return self.unsupported("inline array literals"),
            _ => return self.error(&["expression"]),
        };
        Ok(Expression { kind, span: self.span_from(start) })
    }
}

fn parse_integer(text: &str) -> Option<u64> {
    let clean: String = text.chars().filter(|c| *c != '_').collect();
    if let Some(hex) = clean.strip_prefix("0x").or_else(|| clean.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()
    } else {
        clean.parse().ok()
    }
}
