use std::collections::BTreeSet;

use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::frontend::ast::{ContractKind, FunctionKind, Visibility};
use crate::ir::Instruction;
use crate::project::SourceAnalysis;

/// Keys (`Contract.signature`) of functions called internally anywhere in the file.
pub fn internally_referenced(analysis: &SourceAnalysis) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for c in &analysis.contracts {
        for f in &c.functions {
            for node in &f.cfg.nodes {
                for ins in &node.irs {
                    if let Instruction::InternalCall { function, .. } = ins {
                        out.insert(function.key());
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    let called = internally_referenced(analysis);
    for cdef in analysis.unit.contracts.iter().filter(|c| c.kind == ContractKind::Contract) {
        for f in &cdef.functions {
            if f.visibility != Visibility::Public || f.kind != FunctionKind::Function || f.body.is_none() {
                continue;
            }
            let key = format!("{}.{}", cdef.name.name, f.signature());
            if called.contains(&key) {
                continue;
            }
            let elements = vec![report.element(ElementKind::Function, key.clone(), f.span)];
            report.push(
                Severity::Optimization,
                Confidence::High,
                format!("{key} should be declared external"),
                elements,
            );
        }
    }
}
