use std::collections::BTreeSet;

use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::frontend::ast::ContractKind;
use crate::frontend::names::StateVarId;
use crate::project::SourceAnalysis;

/// State variables written anywhere in the file, by any contract inheriting them.
pub(crate) fn written_anywhere(analysis: &SourceAnalysis) -> BTreeSet<StateVarId> {
    let mut out = BTreeSet::new();
    for c in &analysis.contracts {
        for rw in &c.facts.rw.functions {
            out.extend(rw.own.state_writes().filter_map(|v| v.state_id()).cloned());
        }
    }
    out
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    let written = written_anywhere(analysis);
    for c in analysis.contracts.iter().filter(|c| c.kind == ContractKind::Contract) {
        let read: BTreeSet<&StateVarId> = c.facts.rw.contract.state_reads().filter_map(|v| v.state_id()).collect();
        for sv in &c.state_vars {
            let id = sv.id();
            if sv.decl.is_constant || sv.decl.initializer.is_some() || written.contains(id) || !read.contains(id) {
                continue;
            }
            let readers: Vec<String> = c
                .facts
                .live
                .iter()
                .map(|&i| &c.functions[i])
                .filter(|f| f.ssa.state_reads.iter().any(|v| v.state_id() == Some(id)))
                .map(|f| format!("{}.{}", f.def.contract, f.signature()))
                .collect();
            let mut elements = vec![report.element(ElementKind::Variable, id.name.clone(), sv.decl.name.span)];
            for f in c.facts.live.iter().map(|&i| &c.functions[i]) {
                if f.ssa.state_reads.iter().any(|v| v.state_id() == Some(id)) {
                    elements.push(report.element(
                        ElementKind::Function,
                        format!("{}.{}", f.def.contract, f.signature()),
                        f.span(),
                    ));
                }
            }
            report.push(
                Severity::High,
                Confidence::High,
                format!("{}.{} is never initialized. It is read in {}", sv.contract, id.name, readers.join(", ")),
                elements,
            );
        }
    }
}
