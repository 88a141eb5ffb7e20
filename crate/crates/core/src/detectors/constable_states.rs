use crate::detectors::uninitialized_state::written_anywhere;
use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::frontend::ast::{ContractKind, ExprKind, Expression, TypeName};
use crate::frontend::names::Binding;
use crate::project::{ContractModel, SourceAnalysis};

/// Literals and operators over them, constant state variables and elementary conversions.
pub fn is_constant_expression(c: &ContractModel, e: &Expression) -> bool {
    match &e.kind {
        ExprKind::Literal(_) => true,
        ExprKind::Unary { operand, .. } => is_constant_expression(c, operand),
        ExprKind::Binary { lhs, rhs, .. } => is_constant_expression(c, lhs) && is_constant_expression(c, rhs),
        ExprKind::Tuple(items) if items.len() == 1 => items[0].as_ref().is_some_and(|x| is_constant_expression(c, x)),
        ExprKind::Identifier(_) => match c.symbols.binding(e.span) {
            Some(Binding::StateVar(id)) => c.state_vars.iter().any(|s| s.id() == id && s.decl.is_constant),
            _ => false,
        },
        ExprKind::Call { callee, args } => {
            matches!(callee.kind, ExprKind::TypeExpr(TypeName::Elementary(_)))
                && args.iter().all(|a| is_constant_expression(c, a))
        }
        _ => false,
    }
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    let written = written_anywhere(analysis);
    for c in analysis.contracts.iter().filter(|c| c.kind == ContractKind::Contract) {
        for sv in &c.state_vars {
            if sv.decl.is_constant || !matches!(sv.decl.ty, TypeName::Elementary(_)) || written.contains(sv.id()) {
                continue;
            }
            if !sv.decl.initializer.as_ref().is_none_or(|e| is_constant_expression(c, e)) {
                continue;
            }
            let name = format!("{}.{}", sv.contract, sv.id().name);
            let elements = vec![report.element(ElementKind::Variable, name.clone(), sv.decl.name.span)];
            report.push(
                Severity::Optimization,
                Confidence::High,
                format!("{name} should be constant: constants do not take space in storage"),
                elements,
            );
        }
    }
}
