use std::collections::BTreeSet;

use crate::cfg::NodeId;
use crate::frontend::ast::SourceUnit;
use crate::ir::{Instruction, Type};
use crate::project::ContractModel;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CallTarget {
    /// Index into the contract's function list.
    Internal(usize),
    /// `Library.signature` when the library function is known, else `Library.name`.
    Library(String),
    /// `Contract.function` of a high-level call; `?` when the type is unknown.
    External(String),
    /// Call through a function-typed variable.
    Dynamic(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CallEdge {
    pub node: NodeId,
    pub target: CallTarget,
}

#[derive(Debug, Clone, Default)]
pub struct CallGraph {
    /// Outgoing edges per function index, in instruction order.
    pub edges: Vec<Vec<CallEdge>>,
}

impl CallGraph {
    pub fn build(unit: &SourceUnit, contract: &ContractModel) -> CallGraph {
        let mut edges = Vec::with_capacity(contract.functions.len());
        for f in &contract.functions {
            let mut out = Vec::new();
            for node in &f.cfg.nodes {
                for ins in &node.irs {
                    let target = match ins {
                        Instruction::InternalCall { function, .. } => {
                            contract.function_index(&function.key()).map(CallTarget::Internal)
                        }
                        Instruction::LibraryCall { library, function, args, .. } => {
                            let sig = unit
                                .contract(library)
                                .and_then(|l| {
                                    l.functions
                                        .iter()
                                        .find(|d| &d.name.name == function && d.params.len() == args.len())
                                        .or_else(|| l.functions.iter().find(|d| &d.name.name == function))
                                })
                                .map(|d| d.signature())
                                .unwrap_or_else(|| function.clone());
                            Some(CallTarget::Library(format!("{library}.{sig}")))
                        }
                        Instruction::HighLevelCall { destination, function, .. } => {
                            let c = match &destination.ty {
                                Type::Contract(c) => c.clone(),
                                _ => "?".to_string(),
                            };
                            Some(CallTarget::External(format!("{c}.{function}")))
                        }
                        Instruction::DynamicCall { function, .. } => Some(CallTarget::Dynamic(function.name.clone())),
                        _ => None,
                    };
                    if let Some(target) = target {
                        out.push(CallEdge { node: node.id, target });
                    }
                }
            }
            edges.push(out);
        }
        CallGraph { edges }
    }

    pub fn internal_callees(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[f].iter().filter_map(|e| match e.target {
            CallTarget::Internal(i) => Some(i),
            _ => None,
        })
    }

    /// `f` and every function reachable from it through internal calls.
    pub fn internal_closure(&self, f: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut work = vec![f];
        while let Some(g) = work.pop() {
            if seen.insert(g) {
                work.extend(self.internal_callees(g));
            }
        }
        seen
    }
}
