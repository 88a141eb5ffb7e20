//! Name resolution: binds every identifier use to its declaration and records
//! shadowing pairs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::frontend::ast::*;
use crate::source::Span;

/// Identity of a local variable, parameter, named return or modifier parameter:
/// the byte offset of its declared name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVarId {
    pub contract: String,
    pub name: String,
}

impl fmt::Display for StateVarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.contract, self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalKind {
    Local,
    Parameter,
    Return,
    ModifierParameter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInfo {
    pub id: LocalId,
    pub name: String,
    pub ty: TypeName,
    pub kind: LocalKind,
    pub location: Location,
    /// Span of the declared name.
    pub span: Span,
    /// `Contract.function` or `Contract.modifier` owning the declaration.
    pub owner: String,
}

impl LocalInfo {
    /// A local declared `storage` with a reference type points into contract storage.
    pub fn is_storage_reference(&self) -> bool {
        self.location == Location::Storage
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Binding {
    Local(LocalId),
    StateVar(StateVarId),
    Function(String),
    Modifier(String),
    Event(String),
    Struct(String),
    Contract(String),
    Builtin(String),
    Super,
}

pub const BUILTIN_NAMES: &[&str] = &[
    "msg",
    "tx",
    "block",
    "this",
    "now",
    "abi",
    "require",
    "assert",
    "revert",
    "selfdestruct",
    "suicide",
    "keccak256",
    "sha3",
    "sha256",
    "ripemd160",
    "ecrecover",
    "addmod",
    "mulmod",
    "blockhash",
    "gasleft",
    "transfer",
    "send",
    "call",
];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeclKind {
    StateVar { contract: String },
    Local,
    Parameter,
    Return,
    ModifierParameter,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeclRef {
    pub name: String,
    pub kind: DeclKind,
    /// Declared-name span; default for builtins.
    pub span: Span,
}

/// `inner` hides `outer` in some scope.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ShadowPair {
    pub inner: DeclRef,
    pub outer: DeclRef,
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    /// Identifier-use start offset → binding. Declared names are bound to themselves.
    pub bindings: HashMap<u32, Binding>,
    pub locals: BTreeMap<LocalId, LocalInfo>,
    pub shadows: Vec<ShadowPair>,
}

impl SymbolTable {
    pub fn binding(&self, span: Span) -> Option<&Binding> {
        self.bindings.get(&span.start)
    }

    pub fn local(&self, id: LocalId) -> Option<&LocalInfo> {
        self.locals.get(&id)
    }
}

/// Resolves every function, modifier and state-variable initializer reachable from
/// `contract` (including those inherited through its linearization).
pub fn resolve_names(unit: &SourceUnit, contract: &ContractDef) -> Result<SymbolTable> {
    let mut table = SymbolTable::default();
    for decl_name in &contract.linearization {
        let Some(decl) = unit.contract(decl_name) else { continue };
        let mut r = Resolver {
            unit,
            analyzed: contract,
            declaring: decl,
            table: &mut table,
            scopes: Vec::new(),
            owner: String::new(),
        };
        r.contract_level()?;
    }
    table.shadows.sort();
    table.shadows.dedup();
    Ok(table)
}

struct Resolver<'a> {
    unit: &'a SourceUnit,
    analyzed: &'a ContractDef,
    declaring: &'a ContractDef,
    table: &'a mut SymbolTable,
    scopes: Vec<Vec<(String, LocalId)>>,
    owner: String,
}

impl<'a> Resolver<'a> {
    fn contract_level(&mut self) -> Result<()> {
        let d = self.declaring;
        for v in &d.state_vars {
            let id = StateVarId { contract: d.name.name.clone(), name: v.name.name.clone() };
            self.table.bindings.insert(v.name.span.start, Binding::StateVar(id));
            // A state variable hiding one declared further up the hierarchy.
            for base in d.linearization.iter().skip(1) {
                let Some(bc) = self.unit.contract(base) else { continue };
                if let Some(bv) = bc.state_vars.iter().find(|bv| bv.name.name == v.name.name) {
                    self.table.shadows.push(ShadowPair {
                        inner: DeclRef {
                            name: v.name.name.clone(),
                            kind: DeclKind::StateVar { contract: d.name.name.clone() },
                            span: v.name.span,
                        },
                        outer: DeclRef {
                            name: bv.name.name.clone(),
                            kind: DeclKind::StateVar { contract: base.clone() },
                            span: bv.name.span,
                        },
                    });
                    break;
                }
            }
            if let Some(init) = &v.initializer {
                self.owner = format!("{}.{}", d.name.name, v.name.name);
                self.expr(init)?;
            }
        }
        for m in &d.modifiers {
            self.owner = format!("{}.{}", d.name.name, m.name.name);
            self.scopes.push(Vec::new());
            for p in &m.params {
                self.declare_param(p, LocalKind::ModifierParameter);
            }
            self.block(&m.body)?;
            self.scopes.pop();
        }
        for f in &d.functions {
            self.owner = format!("{}.{}", d.name.name, f.name.name);
            self.scopes.push(Vec::new());
            for p in &f.params {
                self.declare_param(p, LocalKind::Parameter);
            }
            for p in &f.returns {
                self.declare_param(p, LocalKind::Return);
            }
            for m in &f.modifiers {
                for a in &m.args {
                    self.expr(a)?;
                }
            }
            if let Some(body) = &f.body {
                self.block(body)?;
            }
            self.scopes.pop();
        }
        Ok(())
    }

    fn declare_param(&mut self, p: &Parameter, kind: LocalKind) {
        if let Some(name) = &p.name {
            if BUILTIN_NAMES.contains(&name.name.as_str()) && kind != LocalKind::Local {
                self.table.shadows.push(ShadowPair {
                    inner: DeclRef { name: name.name.clone(), kind: decl_kind(kind), span: name.span },
                    outer: DeclRef { name: name.name.clone(), kind: DeclKind::Builtin, span: Span::default() },
                });
            }
            self.declare(name, &p.ty, p.location, kind);
        }
    }

    fn declare(&mut self, name: &Ident, ty: &TypeName, location: Location, kind: LocalKind) {
        let id = LocalId(name.span.start);
        let inner = DeclRef { name: name.name.clone(), kind: decl_kind(kind), span: name.span };
        if let Some(outer) = self.lookup_local(&name.name) {
            let info = &self.table.locals[&outer];
            self.table.shadows.push(ShadowPair {
                inner: inner.clone(),
                outer: DeclRef { name: info.name.clone(), kind: decl_kind(info.kind), span: info.span },
            });
        } else if let Some((contract, decl)) = self.lookup_state_var(&name.name) {
            self.table.shadows.push(ShadowPair {
                inner,
                outer: DeclRef { name: name.name.clone(), kind: DeclKind::StateVar { contract }, span: decl.name.span },
            });
        }
        self.table.locals.insert(
            id,
            LocalInfo {
                id,
                name: name.name.clone(),
                ty: ty.clone(),
                kind,
                location,
                span: name.span,
                owner: self.owner.clone(),
            },
        );
        self.table.bindings.insert(name.span.start, Binding::Local(id));
        self.scopes.last_mut().expect("inside a scope").push((name.name.clone(), id));
    }

    fn lookup_local(&self, name: &str) -> Option<LocalId> {
        self.scopes.iter().rev().flat_map(|s| s.iter().rev()).find(|(n, _)| n == name).map(|(_, id)| *id)
    }

    fn lookup_state_var(&self, name: &str) -> Option<(String, &'a VariableDecl)> {
        for cname in &self.declaring.linearization {
            let c = self.unit.contract(cname)?;
            if let Some(v) = c.state_vars.iter().find(|v| v.name.name == name) {
                return Some((cname.clone(), v));
            }
        }
        None
    }

    fn lookup(&self, name: &str) -> Option<Binding> {
        if let Some(id) = self.lookup_local(name) {
            return Some(Binding::Local(id));
        }
        if let Some((contract, _)) = self.lookup_state_var(name) {
            return Some(Binding::StateVar(StateVarId { contract, name: name.to_string() }));
        }
        let in_hierarchy = |pred: &dyn Fn(&ContractDef) -> bool| {
            self.analyzed
                .linearization
                .iter()
                .chain(self.declaring.linearization.iter())
                .filter_map(|n| self.unit.contract(n))
                .any(pred)
        };
        if in_hierarchy(&|c| c.functions.iter().any(|f| f.name.name == name && !f.is_constructor())) {
            return Some(Binding::Function(name.to_string()));
        }
        if in_hierarchy(&|c| c.modifiers.iter().any(|m| m.name.name == name)) {
            return Some(Binding::Modifier(name.to_string()));
        }
        if in_hierarchy(&|c| c.events.iter().any(|e| e.name.name == name)) {
            return Some(Binding::Event(name.to_string()));
        }
        if self.unit.contracts.iter().any(|c| c.structs.iter().any(|s| s.name.name == name)) {
            return Some(Binding::Struct(name.to_string()));
        }
        if self.unit.contract(name).is_some() {
            return Some(Binding::Contract(name.to_string()));
        }
        if name == "super" {
            return Some(Binding::Super);
        }
        if BUILTIN_NAMES.contains(&name) {
            return Some(Binding::Builtin(name.to_string()));
        }
        None
    }

    fn block(&mut self, b: &Block) -> Result<()> {
        self.scopes.push(Vec::new());
        for s in &b.statements {
            self.stmt(s)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn stmt(&mut self, s: &Statement) -> Result<()> {
        match &s.kind {
            StmtKind::VarDecl { decls, init } => {
                if let Some(e) = init {
                    self.expr(e)?;
                }
                for d in decls.iter().flatten() {
                    self.declare(&d.name, &d.ty, d.location, LocalKind::Local);
                }
            }
            StmtKind::Expr(e) | StmtKind::Emit(e) => self.expr(e)?,
            StmtKind::If { cond, then_branch, else_branch } => {
                self.expr(cond)?;
                self.scoped_stmt(then_branch)?;
                if let Some(e) = else_branch {
                    self.scoped_stmt(e)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond)?;
                self.scoped_stmt(body)?;
            }
            StmtKind::For { init, cond, post, body } => {
                self.scopes.push(Vec::new());
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                if let Some(c) = cond {
                    self.expr(c)?;
                }
                if let Some(p) = post {
                    self.expr(p)?;
                }
                self.scoped_stmt(body)?;
                self.scopes.pop();
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e)?;
                }
            }
            StmtKind::Block(b) => self.block(b)?,
            StmtKind::Throw | StmtKind::Break | StmtKind::Continue | StmtKind::Placeholder => {}
        }
        Ok(())
    }

    fn scoped_stmt(&mut self, s: &Statement) -> Result<()> {
        self.scopes.push(Vec::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    fn expr(&mut self, e: &Expression) -> Result<()> {
        let mut err = None;
        e.walk(&mut |sub| {
            if err.is_some() {
                return;
            }
            if let ExprKind::Identifier(name) = &sub.kind {
                match self.lookup(name) {
                    Some(b) => {
                        self.table.bindings.insert(sub.span.start, b);
                    }
                    None => err = Some(Error::UnresolvedIdentifier { name: name.clone(), span: sub.span }),
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn decl_kind(kind: LocalKind) -> DeclKind {
    match kind {
        LocalKind::Local => DeclKind::Local,
        LocalKind::Parameter => DeclKind::Parameter,
        LocalKind::Return => DeclKind::Return,
        LocalKind::ModifierParameter => DeclKind::ModifierParameter,
    }
}
