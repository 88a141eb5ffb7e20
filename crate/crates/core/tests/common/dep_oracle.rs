//! Dependency oracle: direct def-use edges from the plain IR, closed transitively.

use std::collections::{BTreeMap, BTreeSet};

use soliscope::analysis::{DepSet, DepVar, Protection, Universe};
use soliscope::ir::{Instruction, Var};
use soliscope::{analyze_source, ContractModel, FunctionModel, SourceAnalysis};

use super::{fixtures_dir, sol_files};

pub fn dependency_fixtures() -> Vec<(String, SourceAnalysis)> {
    sol_files(&fixtures_dir().join("dependency"))
        .into_iter()
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            (p.file_name().unwrap().to_string_lossy().to_string(), analyze_source(&src).unwrap())
        })
        .collect()
}

pub fn instruction_count(c: &ContractModel) -> usize {
    c.functions.iter().flat_map(|f| &f.cfg.nodes).map(|n| n.irs.len()).sum()
}

/// Root variable of a reference, following Index and Member bases in the plain IR.
pub fn root_of<'a>(f: &'a FunctionModel, v: &'a Var) -> &'a Var {
    let mut cur = v;
    'outer: while cur.is_reference() {
        for node in &f.cfg.nodes {
            for ins in &node.irs {
                match ins {
                    Instruction::Index { lvalue, base, .. } | Instruction::Member { lvalue, base, .. }
                        if lvalue == cur =>
                    {
                        cur = base;
                        continue 'outer;
                    }
                    _ => {}
                }
            }
        }
        break;
    }
    cur
}

pub fn returned(f: &FunctionModel) -> Vec<&Var> {
    let mut out = Vec::new();
    for node in &f.cfg.nodes {
        for ins in &node.irs {
            if let Instruction::Return { values } = ins {
                out.extend(values);
            }
        }
    }
    out
}

/// Direct def-use edges of the contract context, rebuilt from the plain
/// (non-SSA) instructions of every live function.
pub fn def_use_edges(c: &ContractModel, universe: Universe) -> BTreeSet<(DepVar, DepVar)> {
    let state_vars = c.state_var_list();
    let mut edges = BTreeSet::new();
    let mut add = |d: DepVar, u: DepVar| {
        if !u.var.is_constant() && d != u {
            edges.insert((d, u));
        }
    };
    for &fi in &c.facts.live {
        let f = &c.functions[fi];
        let masked = universe == Universe::Unprivileged && c.facts.protection[fi] != Protection::Unprotected;
        for (n, node) in f.cfg.nodes.iter().enumerate() {
            for (i, ins) in node.irs.iter().enumerate() {
                if let Instruction::InternalCall { lvalue, function, args } = ins {
                    if let Some(g) = c.function_index(&function.key()) {
                        let callee = &c.functions[g];
                        if !masked {
                            for (p, a) in callee.params.iter().zip(args) {
                                add(DepVar::new(g, p), DepVar::new(fi, a));
                            }
                        }
                        if let Some(lv) = lvalue {
                            for r in returned(callee) {
                                add(DepVar::new(fi, lv), DepVar::new(g, r));
                            }
                        }
                    }
                }
                if let Some(target) = ins.store_target() {
                    let value = match ins {
                        Instruction::Assignment { rvalue, .. } => rvalue,
                        Instruction::Push { value, .. } => value,
                        _ => unreachable!(),
                    };
                    let targets: Vec<Var> = match f.aliases.write_targets.get(&(n, i)) {
                        Some(ts) => state_vars.iter().filter(|s| ts.contains(s.state_id().unwrap())).cloned().collect(),
                        None => {
                            let root = root_of(f, target);
                            if root.is_versioned() && !root.is_storage_reference() {
                                vec![root.clone()]
                            } else {
                                vec![]
                            }
                        }
                    };
                    for t in targets {
                        if !(masked && t.is_state()) {
                            add(DepVar::new(fi, &t), DepVar::new(fi, value));
                            // Which location is written depends on the reference.
                            add(DepVar::new(fi, &t), DepVar::new(fi, target));
                        }
                    }
                    continue;
                }
                let Some(def) = ins.lvalue() else { continue };
                if masked && def.is_state() {
                    continue;
                }
                for u in ins.reads() {
                    add(DepVar::new(fi, def), DepVar::new(fi, u));
                }
            }
        }
    }
    edges
}

/// Transitive closure by Warshall's algorithm over an index matrix.
pub fn closure(edges: &BTreeSet<(DepVar, DepVar)>) -> BTreeMap<DepVar, DepSet> {
    let vars: Vec<DepVar> =
        edges.iter().flat_map(|(d, u)| [d.clone(), u.clone()]).collect::<BTreeSet<_>>().into_iter().collect();
    let idx: BTreeMap<&DepVar, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = vars.len();
    let mut m = vec![vec![false; n]; n];
    for (d, u) in edges {
        m[idx[d]][idx[u]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    vars.iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), (0..n).filter(|&j| m[i][j]).map(|j| vars[j].clone()).collect()))
        .collect()
}

pub fn reportable(map: &BTreeMap<DepVar, DepSet>) -> BTreeMap<DepVar, DepSet> {
    map.iter()
        .filter(|(k, _)| k.is_reportable())
        .map(|(k, v)| (k.clone(), v.iter().filter(|x| x.is_reportable()).cloned().collect()))
        .collect()
}

pub fn label(v: &DepVar) -> String {
    match v.function {
        Some(f) => format!("{}@{f}", v.var.name),
        None => v.var.name.clone(),
    }
}

/// Readable difference between two dependency maps.
pub fn diff(got: &BTreeMap<DepVar, DepSet>, want: &BTreeMap<DepVar, DepSet>) -> Vec<String> {
    let keys: BTreeSet<&DepVar> = got.keys().chain(want.keys()).collect();
    let mut out = Vec::new();
    for k in keys {
        let (g, w) = (got.get(k), want.get(k));
        if g != w {
            let show = |s: Option<&DepSet>| s.map(|s| s.iter().map(label).collect::<Vec<_>>());
            out.push(format!("{}: got {:?}, want {:?}", label(k), show(g), show(w)));
        }
    }
    out
}
