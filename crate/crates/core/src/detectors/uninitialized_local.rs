use std::collections::{BTreeMap, BTreeSet};

use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::frontend::names::{LocalId, LocalKind};
use crate::ir::VarKind;
use crate::project::{FunctionModel, SourceAnalysis};
use crate::source::Span;
use crate::ssa::{SsaInstruction, SsaVar};

/// Locals of `f` whose unassigned initial value reaches a read, with the span
/// of the first such read's node.
pub fn uninitialized_reads(f: &FunctionModel) -> BTreeMap<LocalId, Span> {
    let is_plain_local = |v: &SsaVar| matches!(v.var.kind, VarKind::Local { kind: LocalKind::Local, .. });
    // Values that may still hold the initial version, through φ chains.
    let mut initial: BTreeSet<&SsaVar> = BTreeSet::new();
    loop {
        let mut changed = false;
        for (_, ins) in f.ssa.instructions() {
            if let SsaInstruction::Phi(phi) = ins {
                if !initial.contains(&phi.lvalue)
                    && phi.operands.iter().any(|o| (o.version == 0 && is_plain_local(o)) || initial.contains(o))
                {
                    initial.insert(&phi.lvalue);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeMap::new();
    for (n, ins) in f.ssa.instructions() {
        if ins.as_phi().is_some() {
            continue;
        }
        for u in ins.uses() {
            if !is_plain_local(u) || !(u.version == 0 || initial.contains(u)) {
                continue;
            }
            if let VarKind::Local { id, .. } = u.var.kind {
                let node = &f.cfg.nodes[n.0];
                out.entry(id).or_insert(node.expression.as_ref().map(|e| e.span).unwrap_or(node.span));
            }
        }
    }
    for u in &f.aliases.unassigned_uses {
        let node = &f.cfg.nodes[u.node.0];
        out.entry(u.local).or_insert(node.expression.as_ref().map(|e| e.span).unwrap_or(node.span));
    }
    out
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    for c in &analysis.contracts {
        for f in &c.functions {
            for (id, read) in uninitialized_reads(f) {
                let Some(info) = c.symbols.local(id) else { continue };
                if info.kind != LocalKind::Local {
                    continue;
                }
                let fname = format!("{}.{}", f.def.contract, f.signature());
                let what = if info.is_storage_reference() { "storage reference" } else { "local variable" };
                let elements = vec![
                    report.element(ElementKind::Variable, info.name.clone(), info.span),
                    report.element(ElementKind::Function, fname.clone(), f.span()),
                    report.element(ElementKind::Node, analysis.file.first_line(read), read),
                ];
                report.push(
                    Severity::Medium,
                    Confidence::Medium,
                    format!("{what} {} in {fname} is read before it is assigned", info.name),
                    elements,
                );
            }
        }
    }
}
