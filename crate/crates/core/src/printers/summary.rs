use std::collections::BTreeMap;
use std::fmt::Write;

use crate::analysis::CallTarget;
use crate::detectors::{Finding, Severity};
use crate::frontend::ast::{BinaryOp, ContractKind};
use crate::ir::{Instruction, Var};
use crate::printers::table;
use crate::project::{ContractModel, FunctionModel, SourceAnalysis};

fn names<'a>(vars: impl Iterator<Item = &'a Var>) -> String {
    let v: Vec<&str> = vars.map(|v| v.name.as_str()).collect();
    v.join(", ")
}

fn shown(c: &ContractModel) -> impl Iterator<Item = (usize, &FunctionModel)> {
    c.functions.iter().enumerate().filter(|(_, f)| f.is_effective || f.is_constructor())
}

pub fn contract_summary(analysis: &SourceAnalysis) -> String {
    let mut out = String::new();
    for c in &analysis.contracts {
        let bases = &c.linearization[1..];
        let _ = write!(out, "{} {}", c.kind, c.name);
        if !bases.is_empty() {
            let _ = write!(out, " is {}", bases.join(", "));
        }
        out.push('\n');
        let rows: Vec<Vec<String>> = shown(c)
            .map(|(_, f)| {
                vec![
                    format!("{}.{}", f.def.contract, f.signature()),
                    f.def.visibility.to_string(),
                    f.def.mutability.to_string(),
                    f.modifiers.join(", "),
                ]
            })
            .collect();
        out.push_str(&table(&["Function", "Visibility", "Mutability", "Modifiers"], &rows));
        out.push('\n');
    }
    out
}

pub fn function_summary(analysis: &SourceAnalysis) -> String {
    let mut out = String::new();
    for c in &analysis.contracts {
        let _ = writeln!(out, "Contract {}", c.name);
        let rows: Vec<Vec<String>> = shown(c)
            .map(|(fi, f)| {
                let rw = &c.facts.rw.functions[fi].state;
                let mut internal = Vec::new();
                let mut external = Vec::new();
                for e in &c.facts.calls.edges[fi] {
                    match &e.target {
                        CallTarget::Internal(g) => internal.push(c.functions[*g].key.clone()),
                        CallTarget::Library(k) | CallTarget::External(k) | CallTarget::Dynamic(k) => {
                            external.push(k.clone())
                        }
                    }
                }
                internal.dedup();
                external.dedup();
                vec![
                    f.signature(),
                    f.def.visibility.to_string(),
                    f.def.mutability.to_string(),
                    format!("reads: {}", names(rw.state_reads())),
                    format!("writes: {}", names(rw.state_writes())),
                    internal.join(", "),
                    external.join(", "),
                ]
            })
            .collect();
        out.push_str(&table(
            &[
                "Function",
                "Visibility",
                "Mutability",
                "State reads",
                "State writes",
                "Internal calls",
                "External calls",
            ],
            &rows,
        ));
        out.push('\n');
    }
    out
}

/// State variables written by every protected function, with its guard.
pub fn vars_and_auth(analysis: &SourceAnalysis) -> String {
    let mut out = String::new();
    for c in &analysis.contracts {
        let _ = writeln!(out, "Contract {}", c.name);
        let rows: Vec<Vec<String>> = shown(c)
            .filter(|(fi, _)| c.facts.is_protected(*fi))
            .map(|(fi, f)| {
                vec![
                    f.signature(),
                    c.facts.protection[fi].guard().unwrap_or("").to_string(),
                    names(c.facts.rw.functions[fi].state.state_writes()),
                ]
            })
            .collect();
        out.push_str(&table(&["Function", "Guard", "State variables written"], &rows));
        out.push('\n');
    }
    out
}

const ERC20: &[&str] =
    &["transfer(address,uint256)", "transferFrom(address,address,uint256)", "approve(address,uint256)"];

pub fn is_erc20(c: &ContractModel) -> bool {
    ERC20.iter().all(|sig| c.functions.iter().any(|f| f.is_effective && f.signature() == *sig))
}

/// Entry points outside the ERC20 interface that add to a balance-like state variable.
pub fn minting_functions(c: &ContractModel) -> Vec<usize> {
    c.functions
        .iter()
        .enumerate()
        .filter(|(fi, f)| {
            if !f.is_entry_point() || ERC20.contains(&f.signature().as_str()) {
                return false;
            }
            let writes_balance =
                c.facts.rw.functions[*fi].state.state_writes().any(|v| v.name.to_ascii_lowercase().contains("balance"));
            let adds = c.facts.calls.internal_closure(*fi).into_iter().any(|g| {
                c.functions[g].cfg.nodes.iter().flat_map(|n| &n.irs).any(|i| match i {
                    Instruction::Binary { op, .. } => *op == BinaryOp::Add,
                    Instruction::LibraryCall { function, .. } => function == "add",
                    _ => false,
                })
            });
            writes_balance && adds
        })
        .map(|(fi, _)| fi)
        .collect()
}

/// Markdown report: issue counts, complexity and token heuristics per contract.
pub fn human_summary(analysis: &SourceAnalysis, findings: &[Finding]) -> String {
    let mut out = String::from("# Summary\n\n");
    let _ = writeln!(out, "- File: `{}`", analysis.file.path);
    let _ = writeln!(out, "- Contracts: {}", analysis.contracts.len());
    let _ = writeln!(out, "- Findings: {}\n", findings.len());
    for c in &analysis.contracts {
        let _ = writeln!(out, "## {} `{}`\n", capitalized(c.kind), c.name);
        let mut counts: BTreeMap<Severity, usize> = BTreeMap::new();
        for f in findings {
            if c.span.contains(&f.primary().span) {
                *counts.entry(f.severity).or_default() += 1;
            }
        }
        out.push_str("| Severity | Count |\n|---|---|\n");
        for s in Severity::ALL {
            let _ = writeln!(out, "| {s} | {} |", counts.get(&s).copied().unwrap_or(0));
        }
        out.push_str("\n| Function | Complexity |\n|---|---|\n");
        let mut total = 0;
        for f in c.functions.iter().filter(|f| f.def.contract == c.name) {
            let cc = f.cfg.cyclomatic_complexity();
            total += cc;
            let _ = writeln!(out, "| {} | {cc} |", f.signature());
        }
        let _ = writeln!(out, "| **total** | {total} |\n");
        if c.kind == ContractKind::Contract && is_erc20(c) {
            out.push_str("- ERC20 token: yes\n");
            let minting = minting_functions(c);
            if minting.is_empty() {
                out.push_str("- No minting function\n");
            }
            for fi in minting {
                let f = &c.functions[fi];
                match c.facts.protection[fi].guard() {
                    Some(g) => {
                        let _ = writeln!(out, "- Minting restricted: {} is guarded by `{g}`", f.signature());
                    }
                    None => {
                        let _ = writeln!(out, "- Minting unrestricted: anyone can call {}", f.signature());
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

fn capitalized(k: ContractKind) -> String {
    let s = k.to_string();
    let mut cs = s.chars();
    cs.next().map(|h| h.to_ascii_uppercase().to_string() + cs.as_str()).unwrap_or_default()
}
