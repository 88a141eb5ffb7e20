use std::collections::BTreeSet;

use crate::analysis::callgraph::CallGraph;
use crate::ir::{Instruction, Var, VarKind};
use crate::project::{ContractModel, FunctionModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Protection {
    Unprotected,
    Constructor,
    /// A comparison involving the caller, e.g. `msg.sender==owner`.
    Guard(String),
}

impl Protection {
    pub fn is_protected(&self) -> bool {
        !matches!(self, Protection::Unprotected)
    }

    pub fn guard(&self) -> Option<&str> {
        match self {
            Protection::Guard(g) => Some(g),
            Protection::Constructor => Some("constructor"),
            Protection::Unprotected => None,
        }
    }
}

fn is_sender(v: &Var) -> bool {
    v.kind == VarKind::Builtin && v.name == "msg.sender"
}

/// Label of a comparison operand for guard text: references print as the
/// variable they point into.
fn operand_label(f: &FunctionModel, v: &Var) -> String {
    match v.kind {
        VarKind::Reference(n) => f.ir.ref_roots.get(&n).map(|r| r.name.clone()).unwrap_or_else(|| v.name.clone()),
        _ => v.name.clone(),
    }
}

/// The first comparison in `f` with the caller (or a copy of it) as an operand.
pub fn sender_comparison(f: &FunctionModel) -> Option<String> {
    let mut copies: BTreeSet<&Var> = BTreeSet::new();
    for node in &f.cfg.nodes {
        for ins in &node.irs {
            match ins {
                Instruction::Assignment { lvalue, rvalue } | Instruction::Convert { lvalue, value: rvalue, .. }
                    if is_sender(rvalue) =>
                {
                    copies.insert(lvalue);
                }
                _ => {}
            }
        }
    }
    let caller = |v: &Var| is_sender(v) || copies.contains(v);
    for node in &f.cfg.nodes {
        for ins in &node.irs {
            if let Instruction::Binary { left, op, right, .. } = ins {
                if op.is_comparison() && (caller(left) || caller(right)) {
                    let l = if caller(left) { "msg.sender".to_string() } else { operand_label(f, left) };
                    let r = if caller(right) { "msg.sender".to_string() } else { operand_label(f, right) };
                    return Some(format!("{l}{}{r}", op.symbol()));
                }
            }
        }
    }
    None
}

/// Protection of every function: constructors, functions comparing the caller,
/// and functions whose internal callees compare the caller.
pub fn compute_protection(contract: &ContractModel, calls: &CallGraph) -> Vec<Protection> {
    let direct: Vec<Option<String>> = contract.functions.iter().map(sender_comparison).collect();
    contract
        .functions
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if f.is_constructor() {
                return Protection::Constructor;
            }
            let closure = calls.internal_closure(i);
            for g in std::iter::once(i).chain(closure.into_iter().filter(|&g| g != i)) {
                if let Some(guard) = &direct[g] {
                    return Protection::Guard(guard.clone());
                }
            }
            Protection::Unprotected
        })
        .collect()
}
