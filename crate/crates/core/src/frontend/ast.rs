//! Syntax tree for the supported Solidity subset.

use std::fmt;

use crate::source::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub pragmas: Vec<String>,
    pub using_directives: Vec<UsingDirective>,
    pub contracts: Vec<ContractDef>,
    pub span: Span,
}

impl SourceUnit {
    pub fn contract(&self, name: &str) -> Option<&ContractDef> {
        self.contracts.iter().find(|c| c.name.name == name)
    }
}

/// `using <library> for <type>;`. `contract` is `None` for file-level directives;
/// `target` is `None` for `*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsingDirective {
    pub library: Ident,
    pub target: Option<TypeName>,
    pub contract: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
}

impl fmt::Display for ContractKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractKind::Contract => "contract",
            ContractKind::Interface => "interface",
            ContractKind::Library => "library",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InheritanceSpecifier {
    pub name: Ident,
    pub args: Vec<Expression>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDef {
    pub name: Ident,
    pub kind: ContractKind,
    pub is_abstract: bool,
    pub bases: Vec<InheritanceSpecifier>,
    pub state_vars: Vec<VariableDecl>,
    pub functions: Vec<FunctionDef>,
    pub modifiers: Vec<ModifierDef>,
    pub structs: Vec<StructDef>,
    pub events: Vec<EventDef>,
    /// Filled by inheritance resolution: most-derived first, starting with this contract.
    pub linearization: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::Public => "public",
            Visibility::External => "external",
            Visibility::Internal => "internal",
            Visibility::Private => "private",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutability {
    NonPayable,
    Payable,
    View,
    Pure,
}

impl fmt::Display for Mutability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mutability::NonPayable => "nonpayable",
            Mutability::Payable => "payable",
            Mutability::View => "view",
            Mutability::Pure => "pure",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Function,
    Constructor,
    Fallback,
    Receive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: Option<Ident>,
    pub ty: TypeName,
    pub location: Location,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierInvocation {
    pub name: Ident,
    pub args: Vec<Expression>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: Ident,
    pub kind: FunctionKind,
    pub params: Vec<Parameter>,
    pub returns: Vec<Parameter>,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub modifiers: Vec<ModifierInvocation>,
    pub body: Option<Block>,
    /// Name of the contract declaring this function.
    pub contract: String,
    pub span: Span,
}

impl FunctionDef {
    pub fn is_constructor(&self) -> bool {
        self.kind == FunctionKind::Constructor
    }

    pub fn is_payable(&self) -> bool {
        self.mutability == Mutability::Payable
    }

    pub fn is_entry_point(&self) -> bool {
        matches!(self.visibility, Visibility::Public | Visibility::External)
    }

    /// Canonical signature, e.g. `transfer(address,uint256)`.
    pub fn signature(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|p| p.ty.canonical()).collect();
        format!("{}({})", self.name.name, params.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierDef {
    pub name: Ident,
    pub params: Vec<Parameter>,
    pub body: Block,
    pub contract: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructDef {
    pub name: Ident,
    pub fields: Vec<(Ident, TypeName)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub name: Ident,
    pub params: Vec<Parameter>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Default,
    Storage,
    Memory,
    Calldata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarScope {
    State,
    Local,
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: Ident,
    pub ty: TypeName,
    pub visibility: Visibility,
    pub is_constant: bool,
    pub location: Location,
    pub initializer: Option<Expression>,
    pub scope: VarScope,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementaryType {
    Uint(u16),
    Int(u16),
    Address { payable: bool },
    Bool,
    FixedBytes(u8),
    Bytes,
    String,
}

impl fmt::Display for ElementaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryType::Uint(n) => write!(f, "uint{n}"),
            ElementaryType::Int(n) => write!(f, "int{n}"),
            ElementaryType::Address { .. } => f.write_str("address"),
            ElementaryType::Bool => f.write_str("bool"),
            ElementaryType::FixedBytes(n) => write!(f, "bytes{n}"),
            ElementaryType::Bytes => f.write_str("bytes"),
            ElementaryType::String => f.write_str("string"),
        }
    }
}

impl ElementaryType {
    pub fn from_keyword(word: &str) -> Option<ElementaryType> {
        let sized = |rest: &str| rest.parse::<u16>().ok();
        Some(match word {
            "uint" => ElementaryType::Uint(256),
            "int" => ElementaryType::Int(256),
            "address" => ElementaryType::Address { payable: false },
            "bool" => ElementaryType::Bool,
            "string" => ElementaryType::String,
            "bytes" => ElementaryType::Bytes,
            "byte" => ElementaryType::FixedBytes(1),
            w if w.starts_with("uint") => ElementaryType::Uint(sized(&w[4..])?),
            w if w.starts_with("int") => ElementaryType::Int(sized(&w[3..])?),
            w if w.starts_with("bytes") => ElementaryType::FixedBytes(sized(&w[5..])? as u8),
            _ => return None,
        })
    }

    pub fn is_value_type(&self) -> bool {
        !matches!(self, ElementaryType::Bytes | ElementaryType::String)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeName {
    Elementary(ElementaryType),
    Mapping(Box<TypeName>, Box<TypeName>),
    Array(Box<TypeName>, Option<u64>),
    /// A struct or contract name; which one is decided during lowering.
    UserDefined(String),
    Function {
        params: Vec<TypeName>,
        returns: Vec<TypeName>,
        visibility: Visibility,
    },
}

impl TypeName {
    /// Type string as used in canonical signatures (`uint` → `uint256`).
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    pub fn is_reference(&self) -> bool {
        match self {
            TypeName::Elementary(e) => !e.is_value_type(),
            TypeName::Mapping(..) | TypeName::Array(..) => true,
            TypeName::UserDefined(_) | TypeName::Function { .. } => false,
        }
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::Elementary(e) => write!(f, "{e}"),
            TypeName::Mapping(k, v) => write!(f, "mapping({k} => {v})"),
            TypeName::Array(e, Some(n)) => write!(f, "{e}[{n}]"),
            TypeName::Array(e, None) => write!(f, "{e}[]"),
            TypeName::UserDefined(n) => f.write_str(n),
            TypeName::Function { params, returns, .. } => {
                let p: Vec<String> = params.iter().map(|t| t.to_string()).collect();
                write!(f, "function({})", p.join(","))?;
                if !returns.is_empty() {
                    let r: Vec<String> = returns.iter().map(|t| t.to_string()).collect();
                    write!(f, " returns({})", r.join(","))?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Shl,
    Shr,
    BitAnd,
    BitOr,
    BitXor,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "%",
            BinaryOp::Pow => "**",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitOr => "|",
            BinaryOp::BitXor => "^",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne)
    }

    pub fn is_boolean(self) -> bool {
        self.is_comparison() || matches!(self, BinaryOp::And | BinaryOp::Or)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Not,
    BitNot,
    Neg,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::Neg => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    /// Number text as written plus an optional unit suffix (`ether`, `days`, ...).
    Number {
        value: String,
        unit: Option<String>,
    },
    Bool(bool),
    String(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expression {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Identifier(String),
    Literal(Literal),
    Binary {
        op: BinaryOp,
        lhs: Box<Expression>,
        rhs: Box<Expression>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expression>,
    },
    /// `op` is `Some` for compound assignments (`+=` etc.).
    Assign {
        op: Option<BinaryOp>,
        lhs: Box<Expression>,
        rhs: Box<Expression>,
    },
    Index {
        base: Box<Expression>,
        index: Box<Expression>,
    },
    Member {
        base: Box<Expression>,
        member: Ident,
    },
    Call {
        callee: Box<Expression>,
        args: Vec<Expression>,
    },
    /// `callee{value: v, gas: g}`
    CallOptions {
        callee: Box<Expression>,
        options: Vec<(Ident, Expression)>,
    },
    /// Parenthesised list; `None` marks an omitted component as in `(a, ) = f()`.
    Tuple(Vec<Option<Expression>>),
    New(TypeName),
    /// An elementary type used as an expression, as in `address(x)`.
    TypeExpr(TypeName),
}

impl Expression {
    pub fn is_lvalue(&self) -> bool {
        match &self.kind {
            ExprKind::Identifier(_) | ExprKind::Index { .. } | ExprKind::Member { .. } => true,
            ExprKind::Tuple(items) => items.iter().flatten().all(|e| e.is_lvalue()),
            _ => false,
        }
    }

    /// Visits this expression and all sub-expressions, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expression)) {
        f(self);
        match &self.kind {
            ExprKind::Identifier(_) | ExprKind::Literal(_) | ExprKind::New(_) | ExprKind::TypeExpr(_) => {}
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::Assign { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Index { base, index } => {
                base.walk(f);
                index.walk(f);
            }
            ExprKind::Member { base, .. } => base.walk(f),
            ExprKind::Call { callee, args } => {
                callee.walk(f);
                for a in args {
                    a.walk(f);
                }
            }
            ExprKind::CallOptions { callee, options } => {
                callee.walk(f);
                for (_, e) in options {
                    e.walk(f);
                }
            }
            ExprKind::Tuple(items) => {
                for e in items.iter().flatten() {
                    e.walk(f);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    /// One declaration, or a tuple declaration `(uint a, , uint b) = ...`.
    VarDecl {
        decls: Vec<Option<VariableDecl>>,
        init: Option<Expression>,
    },
    Expr(Expression),
    If {
        cond: Expression,
        then_branch: Box<Statement>,
        else_branch: Option<Box<Statement>>,
    },
    While {
        cond: Expression,
        body: Box<Statement>,
    },
    For {
        init: Option<Box<Statement>>,
        cond: Option<Expression>,
        post: Option<Expression>,
        body: Box<Statement>,
    },
    Return(Option<Expression>),
    Emit(Expression),
    Throw,
    Break,
    Continue,
    Block(Block),
    /// `_;` inside a modifier body.
    Placeholder,
}

impl Statement {
    /// Visits this statement and nested statements, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Statement)) {
        f(self);
        match &self.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                then_branch.walk(f);
                if let Some(e) = else_branch {
                    e.walk(f);
                }
            }
            StmtKind::While { body, .. } => body.walk(f),
            StmtKind::For { init, body, .. } => {
                if let Some(i) = init {
                    i.walk(f);
                }
                body.walk(f);
            }
            StmtKind::Block(b) => {
                for s in &b.statements {
                    s.walk(f);
                }
            }
            _ => {}
        }
    }

    /// Expressions directly owned by this statement (not by nested statements).
    pub fn expressions(&self) -> Vec<&Expression> {
        match &self.kind {
            StmtKind::VarDecl { decls, init } => {
                let mut out: Vec<&Expression> = init.iter().collect();
                out.extend(decls.iter().flatten().filter_map(|d| d.initializer.as_ref()));
                out
            }
            StmtKind::Expr(e) | StmtKind::Emit(e) => vec![e],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::For { cond, post, .. } => cond.iter().chain(post.iter()).collect(),
            StmtKind::Return(e) => e.iter().collect(),
            _ => Vec::new(),
        }
    }
}

impl Block {
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Statement)) {
        for s in &self.statements {
            s.walk(f);
        }
    }
}
