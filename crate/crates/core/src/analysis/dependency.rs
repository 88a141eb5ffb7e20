//! Data dependencies and taint.
//!
//! The function context works on SSA values of one function. The contract
//! context merges every live function into one graph over unversioned
//! variables, so a state variable written in one function feeds every read of
//! it in the others; closing that graph is the multi-transaction fixpoint.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::analysis::protection::Protection;
use crate::ir::{Instruction, Var, VarKind};
use crate::project::{ContractModel, FunctionModel};
use crate::ssa::{SsaInstruction, SsaVar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Universe {
    /// Every function contributes.
    All,
    /// State writes made by protected functions are ignored.
    Unprivileged,
}

impl Universe {
    pub const BOTH: [Universe; 2] = [Universe::All, Universe::Unprivileged];

    fn index(self) -> usize {
        self as usize
    }
}

/// A variable in the contract context. State variables and builtins are shared
/// by all functions; everything else is qualified by its function index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepVar {
    pub function: Option<usize>,
    pub var: Var,
}

impl DepVar {
    pub fn new(function: usize, var: &Var) -> DepVar {
        let shared = matches!(var.kind, VarKind::State(_) | VarKind::Builtin);
        DepVar { function: if shared { None } else { Some(function) }, var: var.clone() }
    }

    pub fn state(var: &Var) -> DepVar {
        DepVar { function: None, var: var.clone() }
    }

    /// Variables that appear in reported dependency sets: state variables,
    /// locals and builtins.
    pub fn is_reportable(&self) -> bool {
        matches!(self.var.kind, VarKind::State(_) | VarKind::Local { .. } | VarKind::Builtin)
    }
}

pub type DepSet = BTreeSet<DepVar>;

/// Direct dependency edges: `edges[v]` holds the variables `v` is computed from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub edges: BTreeMap<DepVar, DepSet>,
}

impl DependencyGraph {
    fn add(&mut self, def: DepVar, used: DepVar) {
        if used.var.is_constant() || def == used {
            return;
        }
        self.edges.entry(def).or_default().insert(used);
    }

    /// Everything reachable from `v` along dependency edges.
    pub fn reachable(&self, v: &DepVar) -> DepSet {
        let mut seen = DepSet::new();
        let mut work: VecDeque<&DepVar> = VecDeque::new();
        if let Some(next) = self.edges.get(v) {
            work.extend(next.iter());
        }
        while let Some(u) = work.pop_front() {
            if seen.insert(u.clone()) {
                if let Some(next) = self.edges.get(u) {
                    work.extend(next.iter().filter(|n| !seen.contains(*n)));
                }
            }
        }
        seen
    }

    pub fn variables(&self) -> DepSet {
        let mut out = DepSet::new();
        for (d, us) in &self.edges {
            out.insert(d.clone());
            out.extend(us.iter().cloned());
        }
        out
    }
}

/// One propagation round over a dependency map: `deps[d] ∪= {u} ∪ deps[u]`
/// for every edge. Returns whether anything changed.
pub fn propagate_once(graph: &DependencyGraph, deps: &mut BTreeMap<DepVar, DepSet>) -> bool {
    let mut changed = false;
    for (d, us) in &graph.edges {
        let mut add = DepSet::new();
        for u in us {
            add.insert(u.clone());
            if let Some(x) = deps.get(u) {
                add.extend(x.iter().cloned());
            }
        }
        let entry = deps.entry(d.clone()).or_default();
        for a in add {
            changed |= entry.insert(a);
        }
    }
    changed
}

/// Builds the contract-context graph for `universe`.
pub fn contract_graph(
    contract: &ContractModel,
    live: &BTreeSet<usize>,
    protection: &[Protection],
    universe: Universe,
) -> DependencyGraph {
    let mut g = DependencyGraph::default();
    for &fi in live {
        let f = &contract.functions[fi];
        let masked = universe == Universe::Unprivileged && protection[fi].is_protected();
        for (_, ins) in f.ssa.instructions() {
            if let SsaInstruction::Ir(Instruction::InternalCall { lvalue, function, args }) = ins {
                if let Some(callee) = contract.function_index(&function.key()) {
                    if !masked {
                        for (p, a) in contract.functions[callee].params.iter().zip(args) {
                            g.add(DepVar::new(callee, p), DepVar::new(fi, &a.var));
                        }
                    }
                    if let Some(lv) = lvalue {
                        for r in returned_values(&contract.functions[callee]) {
                            g.add(DepVar::new(fi, &lv.var), DepVar::new(callee, &r));
                        }
                    }
                }
            }
            let Some(def) = ins.definition() else { continue };
            if masked && def.var.is_state() {
                continue;
            }
            let d = DepVar::new(fi, &def.var);
            for u in ins.uses() {
                g.add(d.clone(), DepVar::new(fi, &u.var));
            }
        }
    }
    g
}

fn returned_values(f: &FunctionModel) -> Vec<Var> {
    let mut out = Vec::new();
    for node in &f.cfg.nodes {
        for ins in &node.irs {
            if let Instruction::Return { values } = ins {
                out.extend(values.iter().cloned());
            }
        }
    }
    out
}

/// Function-context dependencies: for every SSA value of `f`, the reportable
/// variables it is computed from. With `mask_state`, state definitions are
/// dropped (the unprivileged view of a protected function).
pub fn function_dependencies(f: &FunctionModel, mask_state: bool) -> BTreeMap<SsaVar, BTreeSet<Var>> {
    let mut direct: BTreeMap<&SsaVar, Vec<&SsaVar>> = BTreeMap::new();
    for (_, ins) in f.ssa.instructions() {
        let Some(def) = ins.definition() else { continue };
        if mask_state && def.var.is_state() {
            continue;
        }
        let e = direct.entry(def).or_default();
        e.extend(ins.uses().into_iter().filter(|u| !u.var.is_constant()));
    }
    let mut out = BTreeMap::new();
    for &d in direct.keys() {
        let mut seen: BTreeSet<&SsaVar> = BTreeSet::new();
        let mut work: Vec<&SsaVar> = direct[d].clone();
        while let Some(u) = work.pop() {
            if seen.insert(u) {
                if let Some(next) = direct.get(u) {
                    work.extend(next.iter().copied());
                }
            }
        }
        let vars: BTreeSet<Var> = seen
            .into_iter()
            .filter(|u| matches!(u.var.kind, VarKind::State(_) | VarKind::Local { .. } | VarKind::Builtin))
            .map(|u| u.var.clone())
            .collect();
        out.insert(d.clone(), vars);
    }
    out
}

pub const TAINTED_BUILTINS: &[&str] = &["msg.sender", "msg.value", "msg.data", "tx.origin"];

#[derive(Debug, Clone, Default)]
pub struct Dependencies {
    pub graphs: [DependencyGraph; 2],
    /// Transitive dependencies of every reportable variable, per universe.
    pub contract: [BTreeMap<DepVar, DepSet>; 2],
    pub sources: DepSet,
    /// Variables whose value may derive from a source, per universe.
    pub tainted: [DepSet; 2],
    /// Function-context maps per function index, per universe.
    pub functions: Vec<[BTreeMap<SsaVar, BTreeSet<Var>>; 2]>,
}

impl Dependencies {
    pub fn graph(&self, u: Universe) -> &DependencyGraph {
        &self.graphs[u.index()]
    }

    pub fn contract_map(&self, u: Universe) -> &BTreeMap<DepVar, DepSet> {
        &self.contract[u.index()]
    }

    pub fn deps(&self, v: &DepVar, u: Universe) -> DepSet {
        self.contract[u.index()].get(v).cloned().unwrap_or_default()
    }

    pub fn is_tainted(&self, v: &DepVar, u: Universe) -> bool {
        self.tainted[u.index()].contains(v)
    }

    pub fn function_map(&self, f: usize, u: Universe) -> &BTreeMap<SsaVar, BTreeSet<Var>> {
        &self.functions[f][u.index()]
    }
}

/// Taint sources: parameters of externally callable functions, caller-controlled
/// builtins, and results of calls into other contracts.
pub fn taint_sources(contract: &ContractModel, live: &BTreeSet<usize>) -> DepSet {
    let mut out = DepSet::new();
    for &fi in live {
        let f = &contract.functions[fi];
        if f.is_entry_point() || (f.is_constructor() && f.def.contract == contract.name) {
            out.extend(f.params.iter().map(|p| DepVar::new(fi, p)));
        }
        for node in &f.cfg.nodes {
            for ins in &node.irs {
                for v in ins.reads() {
                    if v.kind == VarKind::Builtin && TAINTED_BUILTINS.contains(&v.name.as_str()) {
                        out.insert(DepVar::new(fi, v));
                    }
                }
                if matches!(ins, Instruction::HighLevelCall { .. } | Instruction::LowLevelCall { .. }) {
                    if let Some(lv) = ins.lvalue() {
                        out.insert(DepVar::new(fi, lv));
                    }
                }
            }
        }
    }
    out
}

pub fn compute_dependencies(
    contract: &ContractModel,
    live: &BTreeSet<usize>,
    protection: &[Protection],
) -> Dependencies {
    let sources = taint_sources(contract, live);
    let mut deps = Dependencies { sources: sources.clone(), ..Default::default() };
    for u in Universe::BOTH {
        let g = contract_graph(contract, live, protection, u);
        let mut map = BTreeMap::new();
        for v in g.variables() {
            if v.is_reportable() {
                let r: DepSet = g.reachable(&v).into_iter().filter(|x| x.is_reportable()).collect();
                map.insert(v, r);
            }
        }
        // Reverse reachability from the sources gives the tainted set.
        let mut rev: BTreeMap<&DepVar, Vec<&DepVar>> = BTreeMap::new();
        for (d, us) in &g.edges {
            for x in us {
                rev.entry(x).or_default().push(d);
            }
        }
        let mut tainted = DepSet::new();
        let mut work: Vec<&DepVar> = sources.iter().collect();
        while let Some(v) = work.pop() {
            if tainted.insert(v.clone()) {
                if let Some(ds) = rev.get(v) {
                    work.extend(ds.iter().copied());
                }
            }
        }
        deps.contract[u.index()] = map;
        deps.tainted[u.index()] = tainted;
        deps.graphs[u.index()] = g;
    }
    deps.functions = contract
        .functions
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let all = function_dependencies(f, false);
            let unpriv = if protection[i].is_protected() { function_dependencies(f, true) } else { all.clone() };
            [all, unpriv]
        })
        .collect();
    deps
}
