use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::ir::Instruction;
use crate::project::SourceAnalysis;

fn is_selfdestruct(ins: &Instruction) -> bool {
    matches!(ins, Instruction::SolidityCall { function, .. } if function == "selfdestruct" || function == "suicide")
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    for c in &analysis.contracts {
        for (fi, f) in c.functions.iter().enumerate() {
            if !f.is_entry_point() || c.facts.is_protected(fi) {
                continue;
            }
            let reaches = c
                .facts
                .calls
                .internal_closure(fi)
                .into_iter()
                .any(|g| c.functions[g].cfg.nodes.iter().any(|n| n.irs.iter().any(is_selfdestruct)));
            if !reaches {
                continue;
            }
            let fname = format!("{}.{}", f.def.contract, f.signature());
            let elements = vec![report.element(ElementKind::Function, fname.clone(), f.span())];
            report.push(
                Severity::High,
                Confidence::High,
                format!("{fname} allows anyone to destruct the contract"),
                elements,
            );
        }
    }
}
