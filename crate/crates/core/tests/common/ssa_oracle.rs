//! SSA form oracles computed independently of the SSA builder.

use std::collections::{BTreeMap, BTreeSet};

use soliscope::ir::{Var, VarKind};
use soliscope::ssa::{PhiSite, SsaInstruction, SsaVar};
use soliscope::FunctionModel;

/// Pairs defined twice.
pub fn single_assignment_violations(f: &FunctionModel) -> Vec<String> {
    let mut count: BTreeMap<&SsaVar, usize> = BTreeMap::new();
    for (_, ins) in f.ssa.instructions() {
        if let Some(d) = ins.definition() {
            *count.entry(d).or_default() += 1;
        }
    }
    count.into_iter().filter(|(_, c)| *c > 1).map(|(v, c)| format!("{}: {v} defined {c} times", f.key)).collect()
}

pub fn needs_definition(v: &SsaVar) -> bool {
    match v.var.kind {
        VarKind::Constant | VarKind::Builtin => false,
        _ if v.var.is_versioned() => v.version > 0,
        _ => true,
    }
}

/// Uses not preceded by their definition on every path from the entry,
/// found with a must-defined dataflow over the CFG.
pub fn use_before_def_violations(f: &FunctionModel) -> Vec<String> {
    let n = f.cfg.nodes.len();
    let mut reachable = vec![false; n];
    let mut stack = vec![f.cfg.entry.0];
    while let Some(x) = stack.pop() {
        if !std::mem::replace(&mut reachable[x], true) {
            stack.extend(f.cfg.nodes[x].sons.iter().map(|s| s.0));
        }
    }
    let defs = |i: usize| -> Vec<SsaVar> { f.ssa.nodes[i].iter().filter_map(|x| x.definition().cloned()).collect() };
    // None stands for the universal set.
    let mut out: Vec<Option<BTreeSet<SsaVar>>> = vec![None; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if !reachable[i] {
                continue;
            }
            let mut inn: Option<BTreeSet<SsaVar>> = None;
            if i != f.cfg.entry.0 {
                for p in &f.cfg.nodes[i].fathers {
                    if let Some(o) = &out[p.0] {
                        inn = Some(match inn {
                            None => o.clone(),
                            Some(s) => s.intersection(o).cloned().collect(),
                        });
                    }
                }
            }
            let mut set = match inn {
                _ if i == f.cfg.entry.0 => BTreeSet::new(),
                Some(s) => s,
                None => continue,
            };
            set.extend(defs(i));
            if out[i].as_ref() != Some(&set) {
                out[i] = Some(set);
                changed = true;
            }
        }
    }
    let mut bad = Vec::new();
    for i in (0..n).filter(|&i| reachable[i]) {
        let node = &f.cfg.nodes[i];
        let mut cur: BTreeSet<SsaVar> = if i == f.cfg.entry.0 {
            BTreeSet::new()
        } else {
            let mut acc: Option<BTreeSet<SsaVar>> = None;
            for p in node.fathers.iter().filter(|p| reachable[p.0]) {
                let o = out[p.0].clone().unwrap_or_default();
                acc = Some(match acc {
                    None => o,
                    Some(s) => s.intersection(&o).cloned().collect(),
                });
            }
            acc.unwrap_or_default()
        };
        for ins in &f.ssa.nodes[i] {
            match ins {
                SsaInstruction::Phi(p) if p.site == PhiSite::Join => {
                    for (k, op) in p.operands.iter().enumerate() {
                        let father = node.fathers[k].0;
                        if reachable[father]
                            && needs_definition(op)
                            && !out[father].as_ref().is_some_and(|o| o.contains(op))
                        {
                            bad.push(format!("{}: φ operand {op} not defined on edge {father}->{i}", f.key));
                        }
                    }
                }
                _ => {
                    for u in ins.uses() {
                        if needs_definition(u) && !cur.contains(u) {
                            bad.push(format!("{}: {u} used before definition in node {i}", f.key));
                        }
                    }
                }
            }
            if let Some(d) = ins.definition() {
                cur.insert(d.clone());
            }
        }
    }
    bad
}

/// State variables read by `f`, recomputed from the plain IR and alias map.
pub fn state_reads_oracle(f: &FunctionModel, state_vars: &[Var]) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for (n, node) in f.cfg.nodes.iter().enumerate() {
        for (i, ins) in node.irs.iter().enumerate() {
            out.extend(ins.reads().into_iter().filter(|v| v.is_state()).cloned());
            if let Some(ts) = f.aliases.read_targets.get(&(n, i)) {
                out.extend(state_vars.iter().filter(|v| ts.contains(v.state_id().unwrap())).cloned());
            }
        }
    }
    out
}

/// Missing entry φs and post-call φs.
pub fn state_phi_violations(f: &FunctionModel, state_vars: &[Var]) -> Vec<String> {
    let reads = state_reads_oracle(f, state_vars);
    let mut bad = Vec::new();
    let entry: BTreeSet<&Var> = f.ssa.nodes[f.cfg.entry.0]
        .iter()
        .filter_map(|i| i.as_phi())
        .filter(|p| p.site == PhiSite::Entry)
        .map(|p| &p.lvalue.var)
        .collect();
    for s in &reads {
        if !entry.contains(s) {
            bad.push(format!("{}: no entry φ for {}", f.key, s.name));
        }
    }
    for (n, ins) in f.ssa.nodes.iter().enumerate() {
        for (k, i) in ins.iter().enumerate() {
            let SsaInstruction::Ir(ir) = i else { continue };
            if !ir.is_external_call() {
                continue;
            }
            let after: BTreeSet<&Var> = ins[k + 1..]
                .iter()
                .map_while(|x| x.as_phi().filter(|p| p.site == PhiSite::PostCall))
                .map(|p| &p.lvalue.var)
                .collect();
            for s in &reads {
                if !after.contains(s) {
                    bad.push(format!("{}: no φ for {} after the call in node {n}", f.key, s.name));
                }
            }
        }
    }
    bad
}
