use crate::analysis::{DepVar, Universe};
use crate::detectors::{external_call_span, Confidence, ElementKind, Report, Severity};
use crate::ir::{Instruction, Var, VarKind};
use crate::project::SourceAnalysis;

fn ether_destination(ins: &Instruction) -> Option<&Var> {
    match ins {
        Instruction::Send { destination, .. } | Instruction::Transfer { destination, .. } => Some(destination),
        Instruction::LowLevelCall { destination, value: Some(_), .. } => Some(destination),
        _ => None,
    }
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    for c in &analysis.contracts {
        for (ei, entry) in c.functions.iter().enumerate() {
            if !entry.is_entry_point() || c.facts.is_protected(ei) {
                continue;
            }
            for g in c.facts.calls.internal_closure(ei) {
                let f = &c.functions[g];
                for node in &f.cfg.nodes {
                    for ins in &node.irs {
                        let Some(dest) = ether_destination(ins) else { continue };
                        if dest.kind == VarKind::Builtin && dest.name == "msg.sender" {
                            continue;
                        }
                        if !c.facts.deps.is_tainted(&DepVar::new(g, dest), Universe::Unprivileged) {
                            continue;
                        }
                        let span = external_call_span(node);
                        let fname = format!("{}.{}", f.def.contract, f.signature());
                        let elements = vec![
                            report.element(ElementKind::Node, analysis.file.first_line(span), span),
                            report.element(ElementKind::Function, fname.clone(), f.span()),
                        ];
                        report.push(
                            Severity::High,
                            Confidence::Medium,
                            format!("{fname} sends ether to an arbitrary user-controlled destination"),
                            elements,
                        );
                    }
                }
            }
        }
    }
}
