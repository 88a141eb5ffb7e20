use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::frontend::ast::ContractKind;
use crate::ir::Instruction;
use crate::project::SourceAnalysis;

/// Instructions that can move ether out of the contract.
pub fn is_outflow(ins: &Instruction) -> bool {
    match ins {
        Instruction::Transfer { .. } | Instruction::Send { .. } => true,
        Instruction::LowLevelCall { function, .. } if function == "delegatecall" => true,
        Instruction::LowLevelCall { value, .. } | Instruction::HighLevelCall { value, .. } => value.is_some(),
        Instruction::SolidityCall { function, .. } => function == "selfdestruct" || function == "suicide",
        _ => false,
    }
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    for c in analysis.contracts.iter().filter(|c| c.kind == ContractKind::Contract && !c.is_abstract) {
        let payable: Vec<_> =
            c.functions.iter().filter(|f| (f.is_entry_point() || f.is_constructor()) && f.def.is_payable()).collect();
        if payable.is_empty() {
            continue;
        }
        let outflow = c.functions.iter().any(|f| f.cfg.nodes.iter().any(|n| n.irs.iter().any(is_outflow)));
        if outflow {
            continue;
        }
        let mut elements = vec![report.element(ElementKind::Contract, c.name.clone(), c.name_span)];
        for f in &payable {
            elements.push(report.element(
                ElementKind::Function,
                format!("{}.{}", f.def.contract, f.signature()),
                f.span(),
            ));
        }
        let names: Vec<String> = payable.iter().map(|f| f.signature()).collect();
        report.push(
            Severity::Medium,
            Confidence::High,
            format!("Contract {} has payable functions ({}) but no way to send ether out", c.name, names.join(", ")),
            elements,
        );
    }
}
