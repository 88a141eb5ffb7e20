//! Code-understanding outputs: summaries, graphs and IR dumps.

mod graphs;
mod summary;

use std::fmt::Write;

use crate::detectors::Finding;
use crate::project::SourceAnalysis;

pub use graphs::{call_graph, cfg_graphs, inheritance_graph};
pub use summary::{contract_summary, function_summary, human_summary, vars_and_auth};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Dot,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrinterOutput {
    pub printer: &'static str,
    /// File stem for DOT outputs; the printer id otherwise.
    pub name: String,
    pub format: OutputFormat,
    pub body: String,
}

impl PrinterOutput {
    fn text(printer: &'static str, body: String) -> PrinterOutput {
        PrinterOutput { printer, name: printer.to_string(), format: OutputFormat::Text, body }
    }
}

pub const PRINTERS: &[&str] = &[
    "contract-summary",
    "function-summary",
    "inheritance-graph",
    "call-graph",
    "cfg",
    "vars-and-auth",
    "human-summary",
    "slithir",
    "slithir-ssa",
];

/// Runs printer `id`. `findings` feeds the human summary.
pub fn run_printer(id: &str, analysis: &SourceAnalysis, findings: &[Finding]) -> Option<Vec<PrinterOutput>> {
    Some(match id {
        "contract-summary" => vec![PrinterOutput::text("contract-summary", contract_summary(analysis))],
        "function-summary" => vec![PrinterOutput::text("function-summary", function_summary(analysis))],
        "inheritance-graph" => vec![inheritance_graph(analysis)],
        "call-graph" => vec![call_graph(analysis)],
        "cfg" => cfg_graphs(analysis),
        "vars-and-auth" => vec![PrinterOutput::text("vars-and-auth", vars_and_auth(analysis))],
        "human-summary" => vec![PrinterOutput {
            printer: "human-summary",
            name: "human-summary".into(),
            format: OutputFormat::Markdown,
            body: human_summary(analysis, findings),
        }],
        "slithir" => vec![PrinterOutput::text("slithir", slithir(analysis, false))],
        "slithir-ssa" => vec![PrinterOutput::text("slithir-ssa", slithir(analysis, true))],
        _ => return None,
    })
}

/// IR of every function, grouped by declaring contract and CFG node.
pub fn slithir(analysis: &SourceAnalysis, ssa: bool) -> String {
    let mut out = String::new();
    for c in &analysis.contracts {
        let _ = writeln!(out, "Contract {}", c.name);
        for f in c.functions.iter().filter(|f| f.def.contract == c.name) {
            let _ = writeln!(out, "\tFunction {}.{}", c.name, f.signature());
            for node in &f.cfg.nodes {
                let _ = writeln!(out, "\t\tNode {}: {}", node.id, node.kind);
                if ssa {
                    for ins in &f.ssa.nodes[node.id.0] {
                        let _ = writeln!(out, "\t\t\t{ins}");
                    }
                } else {
                    for ins in &node.irs {
                        let _ = writeln!(out, "\t\t\t{ins}");
                    }
                }
            }
        }
    }
    out
}

/// Pipe-separated table with a header row.
pub(crate) fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, cell) in r.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for r in rows {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
    }
    out
}
