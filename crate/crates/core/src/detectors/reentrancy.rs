use std::collections::{BTreeSet, VecDeque};

use crate::detectors::{external_call_span, Confidence, ElementKind, Report, Severity};
use crate::ir::{Instruction, Var};
use crate::project::{ContractModel, SourceAnalysis};
use crate::ssa::weak_targets;

/// An external call inside an entry point, with the state it is surrounded by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReentrancySite {
    pub function: usize,
    pub node: usize,
    pub instruction: usize,
    /// State variables read on some path from the entry up to the call.
    pub reads_before: BTreeSet<Var>,
    /// State variables written on some path after the call.
    pub writes_after: BTreeSet<Var>,
    pub carries_value: bool,
    pub protected: bool,
}

impl ReentrancySite {
    /// Variables both read before and written after the call.
    pub fn variables(&self) -> BTreeSet<&Var> {
        self.reads_before.intersection(&self.writes_after).collect()
    }

    pub fn severity(&self) -> Severity {
        if self.protected || self.variables().is_empty() {
            Severity::Informational
        } else if self.carries_value {
            Severity::High
        } else {
            Severity::Medium
        }
    }
}

struct CallEffect {
    external: bool,
    value: bool,
}

fn call_effect(contract: &ContractModel, fi: usize, ins: &Instruction) -> CallEffect {
    if ins.is_external_call() {
        return CallEffect { external: true, value: ins.sends_ether() };
    }
    let mut eff = CallEffect { external: false, value: false };
    if let Instruction::InternalCall { function, .. } = ins {
        let Some(g) = contract.function_index(&function.key()) else { return eff };
        for h in contract.facts.calls.internal_closure(g) {
            if h == fi {
                continue;
            }
            for node in &contract.functions[h].cfg.nodes {
                for i in &node.irs {
                    if i.is_external_call() {
                        eff.external = true;
                        eff.value |= i.sends_ether();
                    }
                }
            }
        }
    }
    eff
}

fn callee_state(contract: &ContractModel, ins: &Instruction, writes: bool) -> Vec<Var> {
    let Instruction::InternalCall { function, .. } = ins else { return Vec::new() };
    let Some(g) = contract.function_index(&function.key()) else { return Vec::new() };
    let s = &contract.facts.rw.functions[g].state;
    if writes {
        s.state_writes().cloned().collect()
    } else {
        s.state_reads().cloned().collect()
    }
}

fn instr_reads(contract: &ContractModel, fi: usize, n: usize, i: usize, state_vars: &[Var]) -> Vec<Var> {
    let f = &contract.functions[fi];
    let ins = &f.cfg.nodes[n].irs[i];
    let mut out: Vec<Var> = ins.reads().into_iter().filter(|v| v.is_state()).cloned().collect();
    if let Some(ts) = f.aliases.read_targets.get(&(n, i)) {
        out.extend(state_vars.iter().filter(|v| v.state_id().is_some_and(|id| ts.contains(id))).cloned());
    }
    out.extend(callee_state(contract, ins, false));
    out
}

fn instr_writes(contract: &ContractModel, fi: usize, n: usize, i: usize, state_vars: &[Var]) -> Vec<Var> {
    let f = &contract.functions[fi];
    let ins = &f.cfg.nodes[n].irs[i];
    let mut out: Vec<Var> = match ins.store_target() {
        Some(t) => weak_targets(&f.ir, &f.aliases, (n, i), t, state_vars),
        None => ins.lvalue().filter(|v| v.is_state()).cloned().into_iter().collect(),
    };
    out.retain(|v| v.is_state());
    out.extend(callee_state(contract, ins, true));
    out
}

fn reach(succ: &[Vec<usize>], from: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut work: VecDeque<usize> = from.into_iter().collect();
    while let Some(n) = work.pop_front() {
        if seen.insert(n) {
            work.extend(succ[n].iter().copied());
        }
    }
    seen
}

/// Every external call (direct or through internal calls) in the entry points of `contract`.
pub fn reentrancy_sites(contract: &ContractModel) -> Vec<ReentrancySite> {
    let state_vars = contract.state_var_list();
    let mut out = Vec::new();
    for (fi, f) in contract.functions.iter().enumerate() {
        if !f.is_entry_point() {
            continue;
        }
        let succ = f.cfg.successors();
        let mut pred = vec![Vec::new(); succ.len()];
        for (n, ss) in succ.iter().enumerate() {
            for &s in ss {
                pred[s].push(n);
            }
        }
        for (n, node) in f.cfg.nodes.iter().enumerate() {
            for (ci, ins) in node.irs.iter().enumerate() {
                let eff = call_effect(contract, fi, ins);
                if !eff.external {
                    continue;
                }
                let after = reach(&succ, succ[n].iter().copied());
                let before = reach(&pred, pred[n].iter().copied());
                let mut reads_before = BTreeSet::new();
                let mut writes_after = BTreeSet::new();
                for &m in &before {
                    for i in 0..f.cfg.nodes[m].irs.len() {
                        reads_before.extend(instr_reads(contract, fi, m, i, &state_vars));
                    }
                }
                let upto = if before.contains(&n) { node.irs.len() } else { ci + 1 };
                for i in 0..upto {
                    reads_before.extend(instr_reads(contract, fi, n, i, &state_vars));
                }
                for &m in &after {
                    for i in 0..f.cfg.nodes[m].irs.len() {
                        writes_after.extend(instr_writes(contract, fi, m, i, &state_vars));
                    }
                }
                let from = if after.contains(&n) { 0 } else { ci + 1 };
                for i in from..node.irs.len() {
                    writes_after.extend(instr_writes(contract, fi, n, i, &state_vars));
                }
                out.push(ReentrancySite {
                    function: fi,
                    node: n,
                    instruction: ci,
                    reads_before,
                    writes_after,
                    carries_value: eff.value,
                    protected: contract.facts.is_protected(fi),
                });
            }
        }
    }
    out
}

fn names<'a>(vars: impl IntoIterator<Item = &'a Var>) -> String {
    let v: Vec<&str> = vars.into_iter().map(|v| v.name.as_str()).collect();
    v.join(", ")
}

pub(crate) fn run(analysis: &SourceAnalysis, report: &mut Report<'_>) {
    for contract in &analysis.contracts {
        for site in reentrancy_sites(contract) {
            if site.writes_after.is_empty() {
                continue;
            }
            let f = &contract.functions[site.function];
            let node = &f.cfg.nodes[site.node];
            let span = external_call_span(node);
            let vars = site.variables();
            let message = if vars.is_empty() {
                format!(
                    "Benign reentrancy in {}.{}: state written after the external call is not read before it ({})",
                    f.def.contract,
                    f.signature(),
                    names(&site.writes_after)
                )
            } else {
                format!(
                    "Reentrancy in {}.{}: {} read before the external call and written after it{}",
                    f.def.contract,
                    f.signature(),
                    names(vars.iter().copied()),
                    if site.protected { " (function is protected)" } else { "" }
                )
            };
            let mut elements = vec![
                report.element(ElementKind::Node, analysis.file.first_line(span), span),
                report.element(ElementKind::Function, format!("{}.{}", f.def.contract, f.signature()), f.span()),
            ];
            let shown: Vec<&Var> =
                if vars.is_empty() { site.writes_after.iter().collect() } else { vars.into_iter().collect() };
            for v in shown {
                if let Some(sv) = v.state_id().and_then(|id| contract.state_vars.iter().find(|s| s.id() == id)) {
                    elements.push(report.element(ElementKind::Variable, v.name.clone(), sv.decl.name.span));
                }
            }
            let confidence = if site.protected { Confidence::Medium } else { Confidence::High };
            report.push(site.severity(), confidence, message, elements);
        }
    }
}
