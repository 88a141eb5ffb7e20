//! Lowering of CFG node expressions into instructions.

use std::collections::BTreeMap;

use crate::cfg::{Cfg, NodeKind};
use crate::error::{Error, Result};
use crate::frontend::ast::*;
use crate::frontend::names::{Binding, LocalId, StateVarId, SymbolTable};
use crate::ir::instruction::{FunctionRef, Instruction};
use crate::ir::types::Type;
use crate::ir::variable::{Var, VarKind};
use crate::source::Span;

/// Everything lowering needs to know about the contract being analysed.
pub struct LoweringContext<'a> {
    pub unit: &'a SourceUnit,
    /// The contract whose linearization drives virtual dispatch.
    pub contract: &'a ContractDef,
    pub symbols: &'a SymbolTable,
}

impl LoweringContext<'_> {
    /// The operand for a local, parameter or return variable.
    pub fn local_var(&self, id: LocalId) -> Option<Var> {
        let info = self.symbols.local(id)?;
        let ty = Type::resolve(&info.ty, self.unit, self.contract);
        Some(Var {
            kind: VarKind::Local { id, kind: info.kind, storage: info.is_storage_reference() },
            name: info.name.clone(),
            ty,
        })
    }

    pub fn state_var(&self, id: &StateVarId) -> Var {
        let ty = self
            .unit
            .contract(&id.contract)
            .and_then(|c| c.state_vars.iter().find(|v| v.name.name == id.name).map(|v| (c, v)))
            .map(|(c, v)| Type::resolve(&v.ty, self.unit, c))
            .unwrap_or(Type::Unknown);
        Var { kind: VarKind::State(id.clone()), name: id.name.clone(), ty }
    }
}

/// Per-function lowering results besides the node instruction lists.
#[derive(Debug, Clone, Default)]
pub struct FunctionIr {
    /// Root variable of every reference: `REF_n` index → variable it points into.
    pub ref_roots: BTreeMap<u32, Var>,
    pub temporaries: u32,
    pub references: u32,
}

const SOLIDITY_BUILTINS: &[&str] = &[
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
];

fn builtin_return(name: &str) -> Option<Type> {
    Some(match name {
        "keccak256" | "sha3" | "sha256" | "blockhash" => Type::Elementary(ElementaryType::FixedBytes(32)),
        "ripemd160" => Type::Elementary(ElementaryType::FixedBytes(20)),
        "ecrecover" => Type::ADDRESS,
        "addmod" | "mulmod" | "gasleft" => Type::UINT256,
        n if n.starts_with("abi.") => {
            if n == "abi.decode" {
                Type::Unknown
            } else {
                Type::Elementary(ElementaryType::Bytes)
            }
        }
        _ => return None,
    })
}

fn builtin_member(base: &str, member: &str) -> Type {
    match (base, member) {
        ("msg", "sender") | ("tx", "origin") | ("block", "coinbase") => Type::ADDRESS,
        ("msg", "value") | ("msg", "gas") | ("tx", "gasprice") => Type::UINT256,
        ("block", "timestamp" | "number" | "difficulty" | "gaslimit" | "chainid" | "basefee") => Type::UINT256,
        ("msg", "data") => Type::Elementary(ElementaryType::Bytes),
        ("msg", "sig") => Type::Elementary(ElementaryType::FixedBytes(4)),
        _ => Type::Unknown,
    }
}

/// Lowers every node of `cfg` in place.
pub fn lower_function(ctx: &LoweringContext<'_>, function: &FunctionDef, cfg: &mut Cfg) -> Result<FunctionIr> {
    let declaring = ctx.unit.contract(&function.contract).unwrap_or(ctx.contract);
    let mut lw = Lowerer::new(ctx, declaring);
    let named_returns: Vec<Var> = function
        .returns
        .iter()
        .filter_map(|p| p.name.as_ref())
        .filter_map(|n| lw.local_var(LocalId(n.span.start)))
        .collect();
    for i in 0..cfg.nodes.len() {
        let node = &cfg.nodes[i];
        let kind = node.kind;
        let expr = node.expression.clone();
        lw.out.clear();
        match (kind, expr) {
            (NodeKind::Expression, Some(e)) => {
                lw.expr(&e)?;
            }
            (NodeKind::If | NodeKind::LoopHeader, Some(e)) => {
                let v = lw.value(&e)?;
                lw.out.push(Instruction::Condition { value: v });
            }
            (NodeKind::Return, Some(e)) => {
                let values = match &e.kind {
                    ExprKind::Tuple(items) => {
                        let mut vs = Vec::new();
                        for item in items.iter().flatten() {
                            vs.push(lw.value(item)?);
                        }
                        vs
                    }
                    _ => vec![lw.value(&e)?],
                };
                lw.out.push(Instruction::Return { values });
            }
            (NodeKind::Return, None) => {
                if !named_returns.is_empty() {
                    lw.out.push(Instruction::Return { values: named_returns.clone() });
                }
            }
            (NodeKind::Throw, Some(e)) => {
                lw.expr(&e)?;
            }
            (NodeKind::Throw, None) => {
                lw.out.push(Instruction::SolidityCall { lvalue: None, function: "revert".into(), args: vec![] });
            }
            _ => {}
        }
        cfg.nodes[i].irs = std::mem::take(&mut lw.out);
    }
    Ok(FunctionIr { ref_roots: lw.ref_roots, temporaries: lw.tmp, references: lw.refs })
}

struct Lowerer<'a> {
    ctx: &'a LoweringContext<'a>,
    declaring: &'a ContractDef,
    tmp: u32,
    refs: u32,
    tuples: u32,
    ref_roots: BTreeMap<u32, Var>,
    out: Vec<Instruction>,
}

/// The callee of a call after peeling `.value(v)` / `{value: v}` options.
struct Callee<'e> {
    expr: &'e Expression,
    value: Option<&'e Expression>,
}

impl<'a> Lowerer<'a> {
    fn new(ctx: &'a LoweringContext<'a>, declaring: &'a ContractDef) -> Self {
        Lowerer { ctx, declaring, tmp: 0, refs: 0, tuples: 0, ref_roots: BTreeMap::new(), out: Vec::new() }
    }

    fn err(&self, message: impl Into<String>, span: Span) -> Error {
        Error::Lowering { message: message.into(), span }
    }

    fn resolve(&self, ty: &TypeName) -> Type {
        Type::resolve(ty, self.ctx.unit, self.declaring)
    }

    fn new_tmp(&mut self, ty: Type) -> Var {
        let v = Var::temporary(self.tmp, ty);
        self.tmp += 1;
        v
    }

    fn new_ref(&mut self, ty: Type, base: &Var) -> Var {
        let v = Var::reference(self.refs, ty);
        let root = match &base.kind {
            VarKind::Reference(n) => self.ref_roots.get(n).cloned().unwrap_or_else(|| base.clone()),
            _ => base.clone(),
        };
        self.ref_roots.insert(self.refs, root);
        self.refs += 1;
        v
    }

    fn new_result(&mut self, returns: &[Type]) -> Option<Var> {
        match returns.len() {
            0 => None,
            1 => Some(self.new_tmp(returns[0].clone())),
            _ => {
                let v = Var::tuple(self.tuples, Type::Tuple(returns.to_vec()));
                self.tuples += 1;
                Some(v)
            }
        }
    }

    fn local_var(&self, id: LocalId) -> Option<Var> {
        self.ctx.local_var(id)
    }

    fn state_var(&self, id: &StateVarId) -> Var {
        self.ctx.state_var(id)
    }

    fn function_types(&self, f: &FunctionDef) -> (Vec<Type>, Vec<Type>) {
        let scope = self.ctx.unit.contract(&f.contract).unwrap_or(self.declaring);
        let p = f.params.iter().map(|p| Type::resolve(&p.ty, self.ctx.unit, scope)).collect();
        let r = f.returns.iter().map(|p| Type::resolve(&p.ty, self.ctx.unit, scope)).collect();
        (p, r)
    }

    fn linearization_of(&self, contract: &ContractDef) -> Vec<&'a ContractDef> {
        contract.linearization.iter().filter_map(|n| self.ctx.unit.contract(n)).collect()
    }

    /// Most-derived function named `name` taking `argc` arguments, searched in
    /// `contracts` order.
    fn find_in(contracts: &[&'a ContractDef], name: &str, argc: usize) -> Option<&'a FunctionDef> {
        let matches = |f: &&FunctionDef| f.name.name == name && f.kind == FunctionKind::Function;
        contracts
            .iter()
            .flat_map(|c| c.functions.iter())
            .filter(matches)
            .find(|f| f.params.len() == argc)
            .or_else(|| contracts.iter().flat_map(|c| c.functions.iter()).find(matches))
    }

    fn virtual_function(&self, name: &str, argc: usize) -> Option<&'a FunctionDef> {
        let mut order = self.linearization_of(self.ctx.contract);
        if !order.iter().any(|c| c.name.name == self.declaring.name.name) {
            order = self.linearization_of(self.declaring);
        }
        Self::find_in(&order, name, argc)
    }

    fn fn_ref(f: &FunctionDef) -> FunctionRef {
        FunctionRef { contract: f.contract.clone(), name: f.name.name.clone(), signature: f.signature() }
    }

    fn value(&mut self, e: &Expression) -> Result<Var> {
        self.expr(e)?.ok_or_else(|| self.err("expression has no value", e.span))
    }

    fn expr(&mut self, e: &Expression) -> Result<Option<Var>> {
        match &e.kind {
            ExprKind::Identifier(name) => self.identifier(name, e.span).map(Some),
            ExprKind::Literal(lit) => Ok(Some(literal(lit))),
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.value(lhs)?;
                let r = self.value(rhs)?;
                let ty = if op.is_boolean() {
                    Type::BOOL
                } else if l.is_constant() && r.ty != Type::Unknown {
                    r.ty.clone()
                } else {
                    l.ty.clone()
                };
                let lv = self.new_tmp(ty);
                self.out.push(Instruction::Binary { lvalue: lv.clone(), left: l, op: *op, right: r });
                Ok(Some(lv))
            }
            ExprKind::Unary { op, operand } => {
                let v = self.value(operand)?;
                let ty = if *op == UnaryOp::Not { Type::BOOL } else { v.ty.clone() };
                let lv = self.new_tmp(ty);
                self.out.push(Instruction::Unary { lvalue: lv.clone(), op: *op, operand: v });
                Ok(Some(lv))
            }
            ExprKind::Assign { op, lhs, rhs } => self.assign(*op, lhs, rhs, e.span),
            ExprKind::Index { base, index } => {
                let b = self.value(base)?;
                let i = self.value(index)?;
                let r = self.new_ref(b.ty.index_result(), &b);
                self.out.push(Instruction::Index { lvalue: r.clone(), base: b, index: i });
                Ok(Some(r))
            }
            ExprKind::Member { base, member } => self.member(base, member).map(Some),
            ExprKind::Call { callee, args } => self.call(callee, args, e.span),
            ExprKind::CallOptions { .. } => Err(self.err("call options without a call", e.span)),
            ExprKind::Tuple(items) => {
                if items.len() == 1 {
                    if let Some(inner) = &items[0] {
                        return self.expr(inner);
                    }
                }
                for item in items.iter().flatten() {
                    self.expr(item)?;
                }
                Ok(None)
            }
            ExprKind::New(_) => Err(self.err("`new` expression without a call", e.span)),
            ExprKind::TypeExpr(ty) => Ok(Some(Var::constant(ty.to_string(), self.resolve(ty)))),
        }
    }

    fn identifier(&mut self, name: &str, span: Span) -> Result<Var> {
        let binding = self.ctx.symbols.binding(span).cloned();
        match binding {
            Some(Binding::Local(id)) => {
                self.local_var(id).ok_or_else(|| self.err(format!("unknown local `{name}`"), span))
            }
            Some(Binding::StateVar(id)) => Ok(self.state_var(&id)),
            Some(Binding::Builtin(b)) => match b.as_str() {
                "this" => Ok(Var::builtin("this", Type::Contract(self.ctx.contract.name.name.clone()))),
                "now" => Ok(Var::builtin("now", Type::UINT256)),
                _ => Err(self.err(format!("builtin `{b}` cannot be used as a value"), span)),
            },
            Some(Binding::Function(f)) => {
                let def = self.virtual_function(&f, usize::MAX);
                let ty = def
                    .map(|d| {
                        let (params, returns) = self.function_types(d);
                        Type::Function { params, returns }
                    })
                    .unwrap_or(Type::Unknown);
                let owner = def.map(|d| d.contract.clone()).unwrap_or_else(|| self.declaring.name.name.clone());
                Ok(Var::constant(format!("{owner}.{f}"), ty))
            }
            Some(Binding::Contract(c)) => Ok(Var::constant(c.clone(), Type::Contract(c))),
            Some(other) => Err(self.err(format!("`{name}` ({other:?}) cannot be used as a value"), span)),
            None => Err(Error::UnresolvedIdentifier { name: name.to_string(), span }),
        }
    }

    fn builtin_base(&self, base: &Expression) -> Option<String> {
        match &base.kind {
            ExprKind::Identifier(n) => match self.ctx.symbols.binding(base.span) {
                Some(Binding::Builtin(b)) if matches!(b.as_str(), "msg" | "tx" | "block" | "abi") => Some(n.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    fn member(&mut self, base: &Expression, member: &Ident) -> Result<Var> {
        if let Some(b) = self.builtin_base(base) {
            return Ok(Var::builtin(format!("{b}.{}", member.name), builtin_member(&b, &member.name)));
        }
        if let ExprKind::Identifier(_) = &base.kind {
            if let Some(Binding::Contract(c)) = self.ctx.symbols.binding(base.span).cloned() {
                if let Some(cd) = self.ctx.unit.contract(&c) {
                    for lc in self.linearization_of(cd) {
                        if lc.state_vars.iter().any(|v| v.name.name == member.name) {
                            return Ok(self
                                .state_var(&StateVarId { contract: lc.name.name.clone(), name: member.name.clone() }));
                        }
                    }
                }
                return Ok(Var::constant(format!("{c}.{}", member.name), Type::Unknown));
            }
        }
        let b = self.value(base)?;
        let ty = match (&b.ty, member.name.as_str()) {
            (_, "length") => Type::UINT256,
            (t, "balance") if t.is_address() || matches!(t, Type::Contract(_)) => Type::UINT256,
            (Type::Struct(s), m) => self.struct_field(s, m),
            _ => Type::Unknown,
        };
        let r = self.new_ref(ty, &b);
        self.out.push(Instruction::Member { lvalue: r.clone(), base: b, member: member.name.clone() });
        Ok(r)
    }

    fn struct_field(&self, s: &str, field: &str) -> Type {
        for c in &self.ctx.unit.contracts {
            if let Some(sd) = c.structs.iter().find(|d| d.name.name == s) {
                if let Some((_, t)) = sd.fields.iter().find(|(n, _)| n.name == field) {
                    return Type::resolve(t, self.ctx.unit, c);
                }
            }
        }
        Type::Unknown
    }

    fn assign(&mut self, op: Option<BinaryOp>, lhs: &Expression, rhs: &Expression, span: Span) -> Result<Option<Var>> {
        if let ExprKind::Tuple(targets) = &lhs.kind {
            if op.is_some() {
                return Err(self.err("compound assignment to a tuple", span));
            }
            if let ExprKind::Tuple(sources) = &rhs.kind {
                if sources.len() != targets.len() {
                    return Err(self.err("tuple arity mismatch", span));
                }
                let mut values = Vec::new();
                for s in sources {
                    match s {
                        Some(s) => {
                            let v = self.value(s)?;
                            let v = if v.is_versioned() {
                                let t = self.new_tmp(v.ty.clone());
                                self.out.push(Instruction::Assignment { lvalue: t.clone(), rvalue: v });
                                t
                            } else {
                                v
                            };
                            values.push(Some(v));
                        }
                        None => values.push(None),
                    }
                }
                for (t, v) in targets.iter().zip(values) {
                    if let (Some(t), Some(v)) = (t, v) {
                        let lv = self.value(t)?;
                        self.out.push(Instruction::Assignment { lvalue: lv, rvalue: v });
                    }
                }
                return Ok(None);
            }
            let tuple = self.value(rhs)?;
            let elem_types = match &tuple.ty {
                Type::Tuple(ts) => ts.clone(),
                _ => Vec::new(),
            };
            for (i, t) in targets.iter().enumerate() {
                let Some(t) = t else { continue };
                let ety = elem_types.get(i).cloned().unwrap_or(Type::Unknown);
                let direct = matches!(t.kind, ExprKind::Identifier(_));
                if direct {
                    let lv = self.value(t)?;
                    self.out.push(Instruction::Unpack { lvalue: lv, tuple: tuple.clone(), index: i });
                } else {
                    let tmp = self.new_tmp(ety);
                    self.out.push(Instruction::Unpack { lvalue: tmp.clone(), tuple: tuple.clone(), index: i });
                    let lv = self.value(t)?;
                    self.out.push(Instruction::Assignment { lvalue: lv, rvalue: tmp });
                }
            }
            return Ok(None);
        }
        let lv = self.value(lhs)?;
        let rv = self.value(rhs)?;
        let rv = match op {
            None => rv,
            Some(bop) => {
                let t = self.new_tmp(lv.ty.clone());
                self.out.push(Instruction::Binary { lvalue: t.clone(), left: lv.clone(), op: bop, right: rv });
                t
            }
        };
        self.out.push(Instruction::Assignment { lvalue: lv.clone(), rvalue: rv });
        Ok(Some(lv))
    }

    fn peel<'e>(&self, callee: &'e Expression) -> Result<Callee<'e>> {
        match &callee.kind {
            ExprKind::CallOptions { callee: inner, options } => {
                let value = options.iter().find(|(n, _)| n.name == "value").map(|(_, e)| e);
                Ok(Callee { expr: inner, value })
            }
            ExprKind::Call { callee: inner_call, args } => {
                if let ExprKind::Member { base, member } = &inner_call.kind {
                    if matches!(member.name.as_str(), "value" | "gas")
                        && matches!(base.kind, ExprKind::Member { .. })
                        && args.len() == 1
                    {
                        let rest = self.peel(base)?;
                        let value = if member.name == "value" { Some(&args[0]) } else { rest.value };
                        return Ok(Callee { expr: rest.expr, value });
                    }
                }
                Ok(Callee { expr: callee, value: None })
            }
            _ => Ok(Callee { expr: callee, value: None }),
        }
    }

    fn values(&mut self, args: &[Expression]) -> Result<Vec<Var>> {
        args.iter().map(|a| self.value(a)).collect()
    }

    fn opt_value(&mut self, e: Option<&Expression>) -> Result<Option<Var>> {
        e.map(|e| self.value(e)).transpose()
    }

    fn call(&mut self, callee: &Expression, args: &[Expression], span: Span) -> Result<Option<Var>> {
        let Callee { expr: callee, value } = self.peel(callee)?;
        match &callee.kind {
            ExprKind::Identifier(name) => self.call_identifier(name, callee.span, args, span),
            ExprKind::TypeExpr(ty) => {
                let [arg] = args else { return Err(self.err("type conversion takes one argument", span)) };
                let v = self.value(arg)?;
                let ty = self.resolve(ty);
                let lv = self.new_tmp(ty.clone());
                self.out.push(Instruction::Convert { lvalue: lv.clone(), value: v, ty });
                Ok(Some(lv))
            }
            ExprKind::New(ty) => {
                let rty = self.resolve(ty);
                match (&rty, ty) {
                    (Type::Contract(c), _) => {
                        let value = self.opt_value(value)?;
                        let args = self.values(args)?;
                        let lv = self.new_tmp(rty.clone());
                        self.out.push(Instruction::NewContract {
                            lvalue: lv.clone(),
                            contract: c.clone(),
                            args,
                            value,
                        });
                        Ok(Some(lv))
                    }
                    (Type::Array(..), _) => {
                        let args = self.values(args)?;
                        let lv = self.new_tmp(rty.clone());
                        self.out.push(Instruction::NewArray { lvalue: lv.clone(), ty: rty, args });
                        Ok(Some(lv))
                    }
                    (Type::Elementary(_), _) => {
                        let args = self.values(args)?;
                        let lv = self.new_tmp(rty.clone());
                        self.out.push(Instruction::NewElementary { lvalue: lv.clone(), ty: rty, args });
                        Ok(Some(lv))
                    }
                    _ => Err(self.err(format!("cannot instantiate `{ty}`"), span)),
                }
            }
            ExprKind::Member { base, member } => self.call_member(base, member, value, args, span),
            _ => {
                let f = self.value(callee)?;
                self.dynamic_call(f, args, span)
            }
        }
    }

    fn dynamic_call(&mut self, f: Var, args: &[Expression], span: Span) -> Result<Option<Var>> {
        let returns = match &f.ty {
            Type::Function { returns, .. } => returns.clone(),
            Type::Unknown => vec![Type::Unknown],
            other => return Err(self.err(format!("value of type `{other}` is not callable"), span)),
        };
        let args = self.values(args)?;
        let lvalue = self.new_result(&returns);
        self.out.push(Instruction::DynamicCall { lvalue: lvalue.clone(), function: f, args });
        Ok(lvalue)
    }

    fn internal_call(&mut self, f: &FunctionDef, args: &[Expression]) -> Result<Option<Var>> {
        let args = self.values(args)?;
        let (_, returns) = self.function_types(f);
        let lvalue = self.new_result(&returns);
        self.out.push(Instruction::InternalCall { lvalue: lvalue.clone(), function: Self::fn_ref(f), args });
        Ok(lvalue)
    }

    fn solidity_call(&mut self, name: &str, args: &[Expression]) -> Result<Option<Var>> {
        let args = self.values(args)?;
        let lvalue = builtin_return(name).map(|t| self.new_tmp(t));
        self.out.push(Instruction::SolidityCall { lvalue: lvalue.clone(), function: name.to_string(), args });
        Ok(lvalue)
    }

    fn call_identifier(
        &mut self,
        name: &str,
        callee_span: Span,
        args: &[Expression],
        span: Span,
    ) -> Result<Option<Var>> {
        match self.ctx.symbols.binding(callee_span).cloned() {
            Some(Binding::Builtin(b)) if SOLIDITY_BUILTINS.contains(&b.as_str()) => self.solidity_call(&b, args),
            Some(Binding::Function(f)) => {
                let def = self
                    .virtual_function(&f, args.len())
                    .ok_or_else(|| self.err(format!("no function `{f}` with {} arguments", args.len()), span))?;
                self.internal_call(def, args)
            }
            Some(Binding::Event(ev)) => {
                let args = self.values(args)?;
                self.out.push(Instruction::EventCall { event: ev, args });
                Ok(None)
            }
            Some(Binding::Struct(s)) => {
                let args = self.values(args)?;
                let lv = self.new_tmp(Type::Struct(s.clone()));
                self.out.push(Instruction::NewStructure { lvalue: lv.clone(), structure: s, args });
                Ok(Some(lv))
            }
            Some(Binding::Contract(c)) => {
                let [arg] = args else { return Err(self.err("contract conversion takes one argument", span)) };
                let v = self.value(arg)?;
                let ty = Type::Contract(c);
                let lv = self.new_tmp(ty.clone());
                self.out.push(Instruction::Convert { lvalue: lv.clone(), value: v, ty });
                Ok(Some(lv))
            }
            Some(Binding::Local(_) | Binding::StateVar(_)) => {
                let f = self.identifier(name, callee_span)?;
                self.dynamic_call(f, args, span)
            }
            Some(other) => Err(self.err(format!("`{name}` ({other:?}) is not callable"), span)),
            None => Err(Error::UnresolvedIdentifier { name: name.to_string(), span: callee_span }),
        }
    }

    fn library_call(
        &mut self,
        lib: &str,
        member: &str,
        receiver: Option<Var>,
        args: &[Expression],
    ) -> Result<Option<Var>> {
        let argc = args.len() + receiver.is_some() as usize;
        let returns = self
            .ctx
            .unit
            .contract(lib)
            .and_then(|c| Self::find_in(&[c], member, argc))
            .map(|f| self.function_types(f).1)
            .unwrap_or_else(|| vec![Type::Unknown]);
        let mut vs: Vec<Var> = receiver.into_iter().collect();
        vs.extend(self.values(args)?);
        let lvalue = self.new_result(&returns);
        self.out.push(Instruction::LibraryCall {
            lvalue: lvalue.clone(),
            library: lib.to_string(),
            function: member.to_string(),
            args: vs,
        });
        Ok(lvalue)
    }

    /// Library attached to `ty` by a `using` directive that provides `member`.
    fn using_library(&self, ty: &Type, member: &str, argc: usize) -> Option<String> {
        let scope: Vec<&str> = self.declaring.linearization.iter().map(String::as_str).collect();
        for u in &self.ctx.unit.using_directives {
            let applies = match &u.contract {
                None => true,
                Some(c) => scope.contains(&c.as_str()),
            };
            if !applies {
                continue;
            }
            let matches_type = match &u.target {
                None => true,
                Some(t) => &self.resolve(t) == ty,
            };
            if !matches_type {
                continue;
            }
            if let Some(lib) = self.ctx.unit.contract(&u.library.name) {
                if lib.functions.iter().any(|f| f.name.name == member && f.params.len() == argc + 1) {
                    return Some(lib.name.name.clone());
                }
            }
        }
        None
    }

    fn call_member(
        &mut self,
        base: &Expression,
        member: &Ident,
        value: Option<&Expression>,
        args: &[Expression],
        span: Span,
    ) -> Result<Option<Var>> {
        let m = member.name.as_str();
        if let ExprKind::Identifier(_) = &base.kind {
            match self.ctx.symbols.binding(base.span).cloned() {
                Some(Binding::Super) => {
                    let order = self.linearization_of(self.ctx.contract);
                    let pos = order.iter().position(|c| c.name.name == self.declaring.name.name);
                    let rest: Vec<&ContractDef> = match pos {
                        Some(p) => order[p + 1..].to_vec(),
                        None => self.linearization_of(self.declaring)[1..].to_vec(),
                    };
                    let def = Self::find_in(&rest, m, args.len())
                        .ok_or_else(|| self.err(format!("no super function `{m}`"), span))?;
                    return self.internal_call(def, args);
                }
                Some(Binding::Builtin(b)) if b == "abi" => return self.solidity_call(&format!("abi.{m}"), args),
                Some(Binding::Contract(c)) => {
                    let cd =
                        self.ctx.unit.contract(&c).ok_or_else(|| self.err(format!("unknown contract `{c}`"), span))?;
                    if cd.kind == ContractKind::Library {
                        return self.library_call(&c, m, None, args);
                    }
                    if self.ctx.contract.linearization.contains(&c) || self.declaring.linearization.contains(&c) {
                        let order = self.linearization_of(cd);
                        let def = Self::find_in(&order, m, args.len())
                            .ok_or_else(|| self.err(format!("no function `{c}.{m}`"), span))?;
                        return self.internal_call(def, args);
                    }
                    return Err(self.err(format!("cannot call `{c}.{m}` statically"), span));
                }
                _ => {}
            }
        }
        let b = self.value(base)?;
        if b.ty.is_address() || b.ty == Type::Unknown {
            match m {
                "call" | "delegatecall" | "staticcall" | "callcode" => {
                    let value = self.opt_value(value)?;
                    let args = self.values(args)?;
                    let lv = self.new_tmp(Type::BOOL);
                    self.out.push(Instruction::LowLevelCall {
                        lvalue: Some(lv.clone()),
                        destination: b,
                        function: m.to_string(),
                        args,
                        value,
                    });
                    return Ok(Some(lv));
                }
                "send" if args.len() == 1 => {
                    let v = self.value(&args[0])?;
                    let lv = self.new_tmp(Type::BOOL);
                    self.out.push(Instruction::Send { lvalue: lv.clone(), destination: b, value: v });
                    return Ok(Some(lv));
                }
                "transfer" if args.len() == 1 && self.using_library(&b.ty, m, 1).is_none() => {
                    let v = self.value(&args[0])?;
                    self.out.push(Instruction::Transfer { destination: b, value: v });
                    return Ok(None);
                }
                _ => {}
            }
        }
        if m == "push" && matches!(b.ty, Type::Array(..) | Type::Elementary(ElementaryType::Bytes)) {
            let [arg] = args else { return Err(self.err("push takes one argument", span)) };
            let v = self.value(arg)?;
            self.out.push(Instruction::Push { array: b, value: v });
            return Ok(None);
        }
        if let Some(lib) = self.using_library(&b.ty, m, args.len()) {
            return self.library_call(&lib, m, Some(b), args);
        }
        if let Type::Contract(c) = &b.ty {
            let c = c.clone();
            let returns = self.external_returns(&c, m, args.len());
            let value = self.opt_value(value)?;
            let args = self.values(args)?;
            let lvalue = self.new_result(&returns);
            self.out.push(Instruction::HighLevelCall {
                lvalue: lvalue.clone(),
                destination: b,
                contract: c,
                function: m.to_string(),
                args,
                value,
            });
            return Ok(lvalue);
        }
        if let Type::Struct(s) = &b.ty {
            let fty = self.struct_field(s, m);
            if matches!(fty, Type::Function { .. }) {
                let r = self.new_ref(fty, &b);
                self.out.push(Instruction::Member { lvalue: r.clone(), base: b, member: m.to_string() });
                return self.dynamic_call(r, args, span);
            }
        }
        Err(self.err(format!("cannot resolve call to `{m}` on a value of type `{}`", b.ty), span))
    }

    fn external_returns(&self, contract: &str, member: &str, argc: usize) -> Vec<Type> {
        let Some(cd) = self.ctx.unit.contract(contract) else { return vec![Type::Unknown] };
        let order = self.linearization_of(cd);
        if let Some(f) = Self::find_in(&order, member, argc) {
            return self.function_types(f).1;
        }
        for c in &order {
            if let Some(v) = c.state_vars.iter().find(|v| v.name.name == member) {
                let mut t = Type::resolve(&v.ty, self.ctx.unit, c);
                while let Type::Mapping(_, inner) | Type::Array(inner, _) = t {
                    t = *inner;
                }
                return vec![t];
            }
        }
        vec![Type::Unknown]
    }
}

fn literal(lit: &Literal) -> Var {
    match lit {
        Literal::Number { value, unit } => {
            let ty = if value.starts_with("0x") && value.len() == 42 { Type::ADDRESS } else { Type::UINT256 };
            let text = match unit {
                Some(u) => format!("{value} {u}"),
                None => value.clone(),
            };
            Var::constant(text, ty)
        }
        Literal::Bool(b) => Var::constant(b.to_string(), Type::BOOL),
        Literal::String(s) => Var::constant(format!("\"{s}\""), Type::Elementary(ElementaryType::String)),
    }
}
