use std::collections::BTreeSet;

use crate::analysis::callgraph::CallGraph;
use crate::ir::{Var, VarKind};
use crate::project::{ContractModel, FunctionModel};
use crate::ssa::weak_targets;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSets {
    pub reads: BTreeSet<Var>,
    pub writes: BTreeSet<Var>,
}

impl VarSets {
    pub fn state_reads(&self) -> impl Iterator<Item = &Var> {
        self.reads.iter().filter(|v| v.is_state())
    }

    pub fn state_writes(&self) -> impl Iterator<Item = &Var> {
        self.writes.iter().filter(|v| v.is_state())
    }

    pub fn local_reads(&self) -> impl Iterator<Item = &Var> {
        self.reads.iter().filter(|v| v.is_local())
    }

    pub fn local_writes(&self) -> impl Iterator<Item = &Var> {
        self.writes.iter().filter(|v| v.is_local())
    }

    fn extend(&mut self, other: &VarSets) {
        self.reads.extend(other.reads.iter().cloned());
        self.writes.extend(other.writes.iter().cloned());
    }
}

#[derive(Debug, Clone, Default)]
pub struct FunctionReadWrite {
    pub nodes: Vec<VarSets>,
    /// Union of the node sets.
    pub own: VarSets,
    /// State variables read or written by the function or any internal callee.
    pub state: VarSets,
}

#[derive(Debug, Clone, Default)]
pub struct ReadWrite {
    pub functions: Vec<FunctionReadWrite>,
    /// State variables read or written by the contract's live functions.
    pub contract: VarSets,
}

fn is_variable(v: &Var) -> bool {
    matches!(v.kind, VarKind::State(_) | VarKind::Local { .. } | VarKind::Builtin)
}

/// Read and write sets of every node of `f`.
pub fn node_sets(f: &FunctionModel, state_vars: &[Var]) -> Vec<VarSets> {
    let mut out = Vec::with_capacity(f.cfg.nodes.len());
    for (n, node) in f.cfg.nodes.iter().enumerate() {
        let mut s = VarSets::default();
        for (i, ins) in node.irs.iter().enumerate() {
            for r in ins.reads() {
                if is_variable(r) {
                    s.reads.insert(r.clone());
                }
            }
            if let Some(ts) = f.aliases.read_targets.get(&(n, i)) {
                s.reads.extend(state_vars.iter().filter(|v| v.state_id().is_some_and(|id| ts.contains(id))).cloned());
            }
            match ins.store_target() {
                Some(t) => s.writes.extend(weak_targets(&f.ir, &f.aliases, (n, i), t, state_vars)),
                None => {
                    if let Some(lv) = ins.lvalue() {
                        if lv.is_versioned() {
                            s.writes.insert(lv.clone());
                        }
                    }
                }
            }
        }
        out.push(s);
    }
    out
}

pub fn compute_read_write(contract: &ContractModel, calls: &CallGraph, live: &BTreeSet<usize>) -> ReadWrite {
    let state_vars = contract.state_var_list();
    let mut functions: Vec<FunctionReadWrite> = contract
        .functions
        .iter()
        .map(|f| {
            let nodes = node_sets(f, &state_vars);
            let mut own = VarSets::default();
            for n in &nodes {
                own.extend(n);
            }
            FunctionReadWrite { nodes, own, state: VarSets::default() }
        })
        .collect();
    for i in 0..functions.len() {
        let mut state = VarSets::default();
        for g in calls.internal_closure(i) {
            state.reads.extend(functions[g].own.state_reads().cloned());
            state.writes.extend(functions[g].own.state_writes().cloned());
        }
        functions[i].state = state;
    }
    let mut whole = VarSets::default();
    for &i in live {
        whole.extend(&functions[i].state);
    }
    ReadWrite { functions, contract: whole }
}
