//! Built-in analyses: call graph, read/write sets, the protected-function
//! heuristic, and data dependencies with taint.

pub mod callgraph;
pub mod dependency;
pub mod protection;
pub mod readwrite;

use std::collections::BTreeSet;

pub use callgraph::{CallEdge, CallGraph, CallTarget};
pub use dependency::{DepSet, DepVar, Dependencies, DependencyGraph, Universe};
pub use protection::Protection;
pub use readwrite::{FunctionReadWrite, ReadWrite, VarSets};

use crate::frontend::ast::SourceUnit;
use crate::project::ContractModel;

#[derive(Debug, Clone, Default)]
pub struct ContractFacts {
    pub calls: CallGraph,
    /// Functions that can run in the deployed contract: entry points,
    /// constructors along the linearization, and their internal callees.
    pub live: BTreeSet<usize>,
    pub rw: ReadWrite,
    pub protection: Vec<Protection>,
    pub deps: Dependencies,
}

impl ContractFacts {
    pub fn is_protected(&self, f: usize) -> bool {
        self.protection[f].is_protected()
    }
}

pub fn live_functions(contract: &ContractModel, calls: &CallGraph) -> BTreeSet<usize> {
    let mut live = BTreeSet::new();
    for (i, f) in contract.functions.iter().enumerate() {
        if f.is_entry_point() || f.is_constructor() {
            live.extend(calls.internal_closure(i));
        }
    }
    live
}

pub fn compute_facts(unit: &SourceUnit, contract: &ContractModel) -> ContractFacts {
    let calls = CallGraph::build(unit, contract);
    let live = live_functions(contract, &calls);
    let rw = readwrite::compute_read_write(contract, &calls, &live);
    let protection = protection::compute_protection(contract, &calls);
    let deps = dependency::compute_dependencies(contract, &live, &protection);
    ContractFacts { calls, live, rw, protection, deps }
}
