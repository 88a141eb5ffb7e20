//! Vulnerability and optimization detectors.
//!
//! Every detector is a plain function over a [`SourceAnalysis`]. The
//! [`Registry`] runs them in id order, isolates panics and normalizes the
//! resulting findings.

mod arbitrary_send;
mod constable_states;
mod external_function;
mod locked_ether;
mod reentrancy;
mod shadowing;
mod suicidal;
mod uninitialized_local;
mod uninitialized_state;

use std::collections::BTreeSet;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cfg::Node;
use crate::frontend::ast::{ExprKind, Expression};
use crate::project::SourceAnalysis;
use crate::source::{SourceFile, Span};

pub use reentrancy::{reentrancy_sites, ReentrancySite};

/// Ordered from least to most severe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Optimization,
    Informational,
    Low,
    Medium,
    High,
}

impl Severity {
    pub const ALL: [Severity; 5] =
        [Severity::High, Severity::Medium, Severity::Low, Severity::Informational, Severity::Optimization];

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Optimization => "Optimization",
            Severity::Informational => "Informational",
            Severity::Low => "Low",
            Severity::Medium => "Medium",
            Severity::High => "High",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Severity, String> {
        Severity::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown severity `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Confidence {
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Contract,
    Function,
    Variable,
    Node,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceMapping {
    pub file: String,
    pub line_start: u32,
    pub line_end: u32,
    pub col_start: u32,
    pub col_end: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    #[serde(rename = "type")]
    pub kind: ElementKind,
    pub name: String,
    pub source_mapping: SourceMapping,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Finding {
    pub check: String,
    pub severity: Severity,
    pub confidence: Confidence,
    pub message: String,
    pub elements: Vec<Element>,
    /// First source line of the primary element.
    #[serde(skip)]
    pub excerpt: String,
}

impl Finding {
    /// The first element; every finding has one.
    pub fn primary(&self) -> &Element {
        &self.elements[0]
    }

    fn sort_key(&self) -> impl Ord + '_ {
        let p = self.primary();
        (
            std::cmp::Reverse(self.severity),
            &p.source_mapping.file,
            p.source_mapping.line_start,
            p.source_mapping.col_start,
            &self.check,
            &self.message,
        )
    }
}

/// Findings ordered by severity (most severe first), file and position.
pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Collects findings of one detector on one file.
pub struct Report<'a> {
    file: &'a SourceFile,
    check: &'static str,
    findings: Vec<Finding>,
}

impl<'a> Report<'a> {
    pub fn new(file: &'a SourceFile, check: &'static str) -> Report<'a> {
        Report { file, check, findings: Vec::new() }
    }

    pub fn element(&self, kind: ElementKind, name: impl Into<String>, span: Span) -> Element {
        let r = self.file.line_range(span);
        Element {
            kind,
            name: name.into(),
            source_mapping: SourceMapping {
                file: self.file.path.clone(),
                line_start: r.line_start,
                line_end: r.line_end,
                col_start: r.col_start,
                col_end: r.col_end,
            },
            span,
        }
    }

    pub fn push(&mut self, severity: Severity, confidence: Confidence, message: String, elements: Vec<Element>) {
        assert!(!elements.is_empty(), "finding without elements");
        let excerpt = self.file.first_line(elements[0].span).to_string();
        self.findings.push(Finding { check: self.check.to_string(), severity, confidence, message, elements, excerpt });
    }

    pub fn finish(self) -> Vec<Finding> {
        self.findings
    }
}

pub type DetectorFn = fn(&SourceAnalysis, &mut Report<'_>);

#[derive(Clone, Copy)]
pub struct Detector {
    pub id: &'static str,
    /// Highest severity the detector can report.
    pub severity: Severity,
    pub description: &'static str,
    pub run: DetectorFn,
}

impl fmt::Debug for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Detector").field("id", &self.id).field("severity", &self.severity).finish()
    }
}

pub const INTERNAL_ERROR: &str = "internal-error";

#[derive(Debug, Clone)]
pub struct Registry {
    detectors: Vec<Detector>,
}

impl Default for Registry {
    fn default() -> Registry {
        Registry::new(vec![
            Detector {
                id: "reentrancy",
                severity: Severity::High,
                description: "State read before an external call and written after it",
                run: reentrancy::run,
            },
            Detector {
                id: "uninitialized-state",
                severity: Severity::High,
                description: "State variable read but never written",
                run: uninitialized_state::run,
            },
            Detector {
                id: "uninitialized-local",
                severity: Severity::Medium,
                description: "Local variable read before any assignment",
                run: uninitialized_local::run,
            },
            Detector {
                id: "shadowing",
                severity: Severity::High,
                description: "Declaration hiding a state variable or builtin",
                run: shadowing::run,
            },
            Detector {
                id: "suicidal",
                severity: Severity::High,
                description: "Anyone can destroy the contract",
                run: suicidal::run,
            },
            Detector {
                id: "locked-ether",
                severity: Severity::Medium,
                description: "Contract receives ether but cannot send it",
                run: locked_ether::run,
            },
            Detector {
                id: "arbitrary-send",
                severity: Severity::High,
                description: "Ether sent to a caller-controlled destination",
                run: arbitrary_send::run,
            },
            Detector {
                id: "constable-states",
                severity: Severity::Optimization,
                description: "State variable that could be declared constant",
                run: constable_states::run,
            },
            Detector {
                id: "external-function",
                severity: Severity::Optimization,
                description: "Public function that could be declared external",
                run: external_function::run,
            },
        ])
    }
}

impl Registry {
    /// Detectors are kept sorted by id.
    pub fn new(mut detectors: Vec<Detector>) -> Registry {
        detectors.sort_by_key(|d| d.id);
        let ids: BTreeSet<&str> = detectors.iter().map(|d| d.id).collect();
        assert_eq!(ids.len(), detectors.len(), "duplicate detector id");
        Registry { detectors }
    }

    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.detectors.iter().map(|d| d.id).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Detector> {
        self.detectors.iter().find(|d| d.id == id)
    }

    /// Runs the detectors accepted by `enabled` and returns sorted, deduplicated findings.
    pub fn run(&self, analysis: &SourceAnalysis, enabled: &dyn Fn(&str) -> bool) -> Vec<Finding> {
        let mut out = Vec::new();
        for d in self.detectors.iter().filter(|d| enabled(d.id)) {
            let mut report = Report::new(&analysis.file, d.id);
            match catch_unwind(AssertUnwindSafe(|| (d.run)(analysis, &mut report))) {
                Ok(()) => {
                    let mut seen = BTreeSet::new();
                    out.extend(report.finish().into_iter().filter(|f| seen.insert(f.primary().span)));
                }
                Err(payload) => {
                    let what = payload
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| payload.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "unknown panic".into());
                    let mut report = Report::new(&analysis.file, INTERNAL_ERROR);
                    let span = analysis.unit.span;
                    let el = report.element(ElementKind::Contract, analysis.file.path.clone(), span);
                    report.push(
                        Severity::Informational,
                        Confidence::High,
                        format!("detector {} failed: {what}", d.id),
                        vec![el],
                    );
                    out.extend(report.finish());
                }
            }
        }
        sort_findings(&mut out);
        out
    }

    pub fn run_all(&self, analysis: &SourceAnalysis) -> Vec<Finding> {
        self.run(analysis, &|_| true)
    }
}

/// Runs every built-in detector.
pub fn run_detectors(analysis: &SourceAnalysis) -> Vec<Finding> {
    Registry::default().run_all(analysis)
}

const EXTERNAL_CALL_MEMBERS: &[&str] = &["call", "delegatecall", "staticcall", "callcode", "send", "transfer", "value"];

/// Outermost member call in `node` whose member is in `member_filter` (any
/// member when empty).
fn call_span(node: &Node, member_filter: &[&str]) -> Option<Span> {
    let expr = node.expression.as_ref()?;
    let mut found: Option<Span> = None;
    expr.walk(&mut |e: &Expression| {
        if found.is_some() {
            return;
        }
        if let ExprKind::Call { callee, .. } = &e.kind {
            if callee_member(callee).is_some_and(|m| member_filter.is_empty() || member_filter.contains(&m)) {
                found = Some(e.span);
            }
        }
    });
    found
}

fn callee_member(e: &Expression) -> Option<&str> {
    match &e.kind {
        ExprKind::Member { member, .. } => Some(&member.name),
        ExprKind::CallOptions { callee, .. } => callee_member(callee),
        ExprKind::Call { callee, .. } => callee_member(callee),
        _ => None,
    }
}

/// Span of the external call performed by `node`, falling back to the node expression.
pub(crate) fn external_call_span(node: &Node) -> Span {
    call_span(node, EXTERNAL_CALL_MEMBERS)
        .or_else(|| call_span(node, &[]))
        .or(node.expression.as_ref().map(|e| e.span))
        .unwrap_or(node.span)
}
