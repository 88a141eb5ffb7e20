use crate::detectors::{Confidence, ElementKind, Report, Severity};
use crate::frontend::names::DeclKind;
use crate::project::SourceAnalysis;

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    for c in &analysis.contracts {
        for pair in &c.symbols.shadows {
            let (severity, what) = match (&pair.inner.kind, &pair.outer.kind) {
                (DeclKind::StateVar { .. }, DeclKind::StateVar { .. }) => (Severity::High, "state variable"),
                (_, DeclKind::StateVar { .. }) => (Severity::Low, "state variable"),
                (_, DeclKind::Builtin) => (Severity::Low, "builtin symbol"),
                _ => continue,
            };
            let owner = match &pair.inner.kind {
                DeclKind::StateVar { contract } => format!("{contract}.{}", pair.inner.name),
                _ => pair.inner.name.clone(),
            };
            let shadowed = match &pair.outer.kind {
                DeclKind::StateVar { contract } => format!("{contract}.{}", pair.outer.name),
                _ => pair.outer.name.clone(),
            };
            let mut elements = vec![report.element(ElementKind::Variable, owner.clone(), pair.inner.span)];
            if pair.outer.kind != DeclKind::Builtin {
                elements.push(report.element(ElementKind::Variable, shadowed.clone(), pair.outer.span));
            }
            report.push(severity, Confidence::High, format!("{owner} shadows the {what} {shadowed}"), elements);
        }
    }
}
