use std::collections::BTreeSet;
use std::fmt::Write;

use crate::analysis::CallTarget;
use crate::frontend::ast::ContractKind;
use crate::printers::{OutputFormat, PrinterOutput};
use crate::project::SourceAnalysis;

/// Quoted DOT identifier.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn dot(printer: &'static str, name: String, body: String) -> PrinterOutput {
    PrinterOutput { printer, name, format: OutputFormat::Dot, body }
}

/// One node per contract and an edge from each contract to its direct bases.
pub fn inheritance_graph(analysis: &SourceAnalysis) -> PrinterOutput {
    let mut out = String::from("digraph inheritance {\n");
    for c in &analysis.unit.contracts {
        let shape = match c.kind {
            ContractKind::Contract => "box",
            ContractKind::Interface => "ellipse",
            ContractKind::Library => "hexagon",
        };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(&c.name.name));
    }
    for c in &analysis.unit.contracts {
        for b in &c.bases {
            let _ = writeln!(out, "  {} -> {};", quote(&c.name.name), quote(&b.name.name));
        }
    }
    out.push_str("}\n");
    dot("inheritance-graph", "inheritance-graph".into(), out)
}

/// Functions as `Contract.signature` nodes; calls leaving the file are boxed.
pub fn call_graph(analysis: &SourceAnalysis) -> PrinterOutput {
    let mut nodes = BTreeSet::new();
    let mut external = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for c in &analysis.contracts {
        for (fi, f) in c.functions.iter().enumerate() {
            nodes.insert(f.key.clone());
            for e in &c.facts.calls.edges[fi] {
                let to = match &e.target {
                    CallTarget::Internal(g) => c.functions[*g].key.clone(),
                    CallTarget::Library(k) => k.clone(),
                    CallTarget::External(k) | CallTarget::Dynamic(k) => {
                        external.insert(k.clone());
                        k.clone()
                    }
                };
                edges.insert((f.key.clone(), to));
            }
        }
    }
    let mut out = String::from("digraph callgraph {\n");
    for n in &nodes {
        let _ = writeln!(out, "  {};", quote(n));
    }
    for n in external.difference(&nodes) {
        let _ = writeln!(out, "  {} [shape=box];", quote(n));
    }
    for (a, b) in &edges {
        let _ = writeln!(out, "  {} -> {};", quote(a), quote(b));
    }
    out.push_str("}\n");
    dot("call-graph", "call-graph".into(), out)
}

fn file_stem(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}

/// One digraph per function declared in each contract.
pub fn cfg_graphs(analysis: &SourceAnalysis) -> Vec<PrinterOutput> {
    let mut outs = Vec::new();
    for c in &analysis.contracts {
        for f in c.functions.iter().filter(|f| f.def.contract == c.name) {
            let mut out = format!("digraph {} {{\n", quote(&f.key));
            for node in &f.cfg.nodes {
                let mut label = format!("Node {}: {}", node.id, node.kind);
                if let Some(e) = &node.expression {
                    label.push('\n');
                    label.push_str(analysis.file.first_line(e.span));
                }
                for ins in &node.irs {
                    label.push('\n');
                    label.push_str(&ins.to_string());
                }
                let _ = writeln!(out, "  {} [label={}];", node.id, quote(&label));
            }
            for node in &f.cfg.nodes {
                for s in &node.sons {
                    let _ = writeln!(out, "  {} -> {};", node.id, s);
                }
            }
            out.push_str("}\n");
            let stem = file_stem(&format!("{}-{}", c.name, f.signature()));
            outs.push(dot("cfg", stem, out));
        }
    }
    outs
}
