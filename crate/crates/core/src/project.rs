//! The analysis pipeline: parse, linearize, resolve names, build CFGs, lower,
//! convert to SSA and run the built-in analyses for every contract.

use std::collections::HashSet;
use std::path::Path;

use crate::analysis::{compute_facts, ContractFacts};
use crate::cfg::{build_cfg, compute_dominators, Cfg, DomInfo, InlinedModifier};
use crate::error::{Error, Result};
use crate::frontend::ast::*;
use crate::frontend::inheritance::flatten_state_vars;
use crate::frontend::names::{LocalId, StateVarId, SymbolTable};
use crate::frontend::{parse_file, resolve_inheritance, resolve_names};
use crate::ir::{lower_function, FunctionIr, LoweringContext, Var};
use crate::source::{FileId, SourceFile, Span};
use crate::ssa::{compute_storage_aliases, to_ssa, AliasMap, SsaFunction};

#[derive(Debug, Clone)]
pub struct StateVariable {
    pub var: Var,
    pub decl: VariableDecl,
    /// Contract declaring the variable.
    pub contract: String,
}

impl StateVariable {
    pub fn id(&self) -> &StateVarId {
        self.var.state_id().expect("state variable")
    }
}

/// One function analysed in the context of a contract.
#[derive(Debug, Clone)]
pub struct FunctionModel {
    pub def: FunctionDef,
    /// `DeclaringContract.signature`.
    pub key: String,
    pub params: Vec<Var>,
    pub returns: Vec<Var>,
    pub modifiers: Vec<String>,
    pub cfg: Cfg,
    pub ir: FunctionIr,
    pub dom: DomInfo,
    pub aliases: AliasMap,
    pub ssa: SsaFunction,
    /// Most-derived definition of its signature in the analysed contract.
    pub is_effective: bool,
}

impl FunctionModel {
    pub fn name(&self) -> &str {
        &self.def.name.name
    }

    pub fn signature(&self) -> String {
        self.def.signature()
    }

    pub fn is_constructor(&self) -> bool {
        self.def.is_constructor()
    }

    /// Callable from outside in the deployed contract.
    pub fn is_entry_point(&self) -> bool {
        self.is_effective && self.def.is_entry_point() && !self.def.is_constructor()
    }

    pub fn span(&self) -> Span {
        self.def.span
    }
}

#[derive(Debug, Clone)]
pub struct ContractModel {
    pub name: String,
    pub kind: ContractKind,
    pub is_abstract: bool,
    pub linearization: Vec<String>,
    pub span: Span,
    pub name_span: Span,
    pub symbols: SymbolTable,
    pub state_vars: Vec<StateVariable>,
    pub functions: Vec<FunctionModel>,
    pub facts: ContractFacts,
}

impl ContractModel {
    pub fn function(&self, key_or_name: &str) -> Option<&FunctionModel> {
        self.functions
            .iter()
            .find(|f| f.key == key_or_name)
            .or_else(|| self.functions.iter().find(|f| f.is_effective && f.signature() == key_or_name))
            .or_else(|| self.functions.iter().find(|f| f.is_effective && f.name() == key_or_name))
    }

    pub fn function_index(&self, key: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.key == key)
    }

    pub fn state_var(&self, name: &str) -> Option<&StateVariable> {
        self.state_vars.iter().find(|s| s.decl.name.name == name)
    }

    pub fn state_var_list(&self) -> Vec<Var> {
        self.state_vars.iter().map(|s| s.var.clone()).collect()
    }
}

/// Analysis of one source file.
#[derive(Debug, Clone)]
pub struct SourceAnalysis {
    pub file: SourceFile,
    pub unit: SourceUnit,
    pub contracts: Vec<ContractModel>,
}

impl SourceAnalysis {
    pub fn contract(&self, name: &str) -> Option<&ContractModel> {
        self.contracts.iter().find(|c| c.name == name)
    }
}

/// Runs the whole pipeline on an in-memory source.
pub fn analyze_source(text: &str) -> Result<SourceAnalysis> {
    analyze(SourceFile::new(FileId(0), "<input>", text))
}

/// Reads and analyses a file from disk.
pub fn analyze_path(path: &Path, id: FileId) -> std::result::Result<SourceAnalysis, AnalyzeError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| AnalyzeError::Io { path: path.display().to_string(), source: e })?;
    let file = SourceFile::new(id, path.display().to_string(), text);
    analyze(file).map_err(|e| AnalyzeError::Analysis { path: path.display().to_string(), error: e })
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{}: {error}", error.span())]
    Analysis { path: String, error: Error },
}

pub fn analyze(file: SourceFile) -> Result<SourceAnalysis> {
    let unit = parse(&file)?;
    analyze_unit(file, unit)
}

/// Parses `file` and resolves its inheritance graph.
pub fn parse(file: &SourceFile) -> Result<SourceUnit> {
    resolve_inheritance(parse_file(file)?)
}

/// Runs everything after parsing on a unit returned by [`parse`].
pub fn analyze_unit(file: SourceFile, unit: SourceUnit) -> Result<SourceAnalysis> {
    let mut contracts = Vec::new();
    for c in &unit.contracts {
        contracts.push(analyze_contract(&unit, c)?);
    }
    Ok(SourceAnalysis { file, unit, contracts })
}

fn resolve_modifiers<'u>(
    unit: &'u SourceUnit,
    contract: &ContractDef,
    f: &'u FunctionDef,
) -> (Vec<InlinedModifier<'u>>, Vec<String>) {
    let mut out = Vec::new();
    let mut names = Vec::new();
    for inv in &f.modifiers {
        let def = contract
            .linearization
            .iter()
            .filter_map(|c| unit.contract(c))
            .flat_map(|c| c.modifiers.iter())
            .find(|m| m.name.name == inv.name.name);
        if let Some(def) = def {
            out.push(InlinedModifier { def, args: &inv.args });
            names.push(inv.name.name.clone());
        }
    }
    (out, names)
}

fn analyze_contract(unit: &SourceUnit, contract: &ContractDef) -> Result<ContractModel> {
    let symbols = resolve_names(unit, contract)?;
    let ctx = LoweringContext { unit, contract, symbols: &symbols };

    let state_vars: Vec<StateVariable> = flatten_state_vars(unit, contract)
        .into_iter()
        .map(|(c, decl)| {
            let id = StateVarId { contract: c.to_string(), name: decl.name.name.clone() };
            StateVariable { var: ctx.state_var(&id), decl: decl.clone(), contract: c.to_string() }
        })
        .collect();
    let state_list: Vec<Var> = state_vars.iter().map(|s| s.var.clone()).collect();

    let mut seen = HashSet::new();
    let mut functions = Vec::new();
    for (depth, cname) in contract.linearization.iter().enumerate() {
        let Some(c) = unit.contract(cname) else { continue };
        for f in &c.functions {
            let effective = if depth > 0 && f.is_constructor() { false } else { seen.insert(f.signature()) };
            let (mods, modifier_names) = resolve_modifiers(unit, contract, f);
            let Some(mut cfg) = build_cfg(f, &mods) else { continue };
            let ir = lower_function(&ctx, f, &mut cfg)?;
            let locals = |ps: &[Parameter]| -> Vec<Var> {
                ps.iter().filter_map(|p| p.name.as_ref()).filter_map(|n| ctx.local_var(LocalId(n.span.start))).collect()
            };
            let params = locals(&f.params);
            let returns = locals(&f.returns);
            let dom = compute_dominators(&cfg);
            let aliases = compute_storage_aliases(&cfg, &ir, &params, &state_list);
            let ssa = to_ssa(&cfg, &ir, &dom, &aliases, &state_list);
            functions.push(FunctionModel {
                def: f.clone(),
                key: format!("{}.{}", f.contract, f.signature()),
                params,
                returns,
                modifiers: modifier_names,
                cfg,
                ir,
                dom,
                aliases,
                ssa,
                is_effective: effective,
            });
        }
    }

    let mut model = ContractModel {
        name: contract.name.name.clone(),
        kind: contract.kind,
        is_abstract: contract.is_abstract,
        linearization: contract.linearization.clone(),
        span: contract.span,
        name_span: contract.name.span,
        symbols,
        state_vars,
        functions,
        facts: ContractFacts::default(),
    };
    model.facts = compute_facts(unit, &model);
    Ok(model)
}
