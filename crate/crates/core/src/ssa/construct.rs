use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cfg::{Cfg, DomInfo, NodeId};
use crate::ir::{FunctionIr, Instruction, Operand, Role, Type, Var, VarKind};
use crate::ssa::alias::AliasMap;

/// A variable with its SSA version. Only state variables and locals carry
/// versions; temporaries, references, constants and builtins stay at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SsaVar {
    pub var: Var,
    pub version: u32,
}

impl SsaVar {
    pub fn plain(var: Var) -> SsaVar {
        SsaVar { var, version: 0 }
    }
}

impl fmt::Display for SsaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.var.is_versioned() {
            write!(f, "{}_{}", self.var.name, self.version)
        } else {
            f.write_str(&self.var.name)
        }
    }
}

impl Operand for SsaVar {
    fn label(&self) -> String {
        self.to_string()
    }

    fn ty(&self) -> &Type {
        &self.var.ty
    }

    fn is_reference(&self) -> bool {
        self.var.is_reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhiSite {
    /// State variable on function entry; operands are symbolic.
    Entry,
    /// State variable after an external call that may re-enter.
    PostCall,
    /// Control-flow join; one operand per predecessor.
    Join,
    /// Write through a reference to one possible target: the new version merges
    /// the old one with the written value.
    WeakUpdate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi {
    pub lvalue: SsaVar,
    pub operands: Vec<SsaVar>,
    pub site: PhiSite,
    /// Reference written through, for weak updates.
    pub through: Option<SsaVar>,
}

impl Phi {
    pub fn uses(&self) -> impl Iterator<Item = &SsaVar> {
        self.operands.iter().chain(self.through.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SsaInstruction {
    Ir(Instruction<SsaVar>),
    Phi(Phi),
}

impl SsaInstruction {
    pub fn as_phi(&self) -> Option<&Phi> {
        match self {
            SsaInstruction::Phi(p) => Some(p),
            SsaInstruction::Ir(_) => None,
        }
    }

    /// The SSA value defined here. Assignments through a reference define
    /// nothing: they are stores.
    pub fn definition(&self) -> Option<&SsaVar> {
        match self {
            SsaInstruction::Phi(p) => Some(&p.lvalue),
            SsaInstruction::Ir(Instruction::Assignment { lvalue, .. }) if lvalue.var.is_reference() => None,
            SsaInstruction::Ir(i) => i.lvalue(),
        }
    }

    pub fn uses(&self) -> Vec<&SsaVar> {
        match self {
            SsaInstruction::Phi(p) => p.uses().collect(),
            SsaInstruction::Ir(i) => {
                let mut out = i.reads();
                if let Instruction::Assignment { lvalue, .. } = i {
                    if lvalue.var.is_reference() {
                        out.push(lvalue);
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for SsaInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SsaInstruction::Ir(i) => write!(f, "{i}"),
            SsaInstruction::Phi(p) => {
                let ops: Vec<String> = p.operands.iter().map(|o| o.to_string()).collect();
                let name = match p.site {
                    PhiSite::WeakUpdate => "ϕweak",
                    _ => "ϕ",
                };
                let body = match p.site {
                    PhiSite::Entry => "entry".to_string(),
                    _ => ops.join(", "),
                };
                write!(f, "{}({}) := {name}({body})", p.lvalue, p.lvalue.var.ty)?;
                if p.site == PhiSite::PostCall {
                    f.write_str(" after call")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SsaFunction {
    /// Instructions per CFG node; join and entry φs come first.
    pub nodes: Vec<Vec<SsaInstruction>>,
    /// State variables read by the function, directly or through a storage reference.
    pub state_reads: BTreeSet<Var>,
}

impl SsaFunction {
    pub fn instructions(&self) -> impl Iterator<Item = (NodeId, &SsaInstruction)> {
        self.nodes.iter().enumerate().flat_map(|(n, is)| is.iter().map(move |i| (NodeId(n), i)))
    }

    /// Drops φs and versions, yielding the plain IR of each node.
    pub fn erase(&self) -> Vec<Vec<Instruction>> {
        self.nodes
            .iter()
            .map(|is| {
                is.iter()
                    .filter_map(|i| match i {
                        SsaInstruction::Ir(ins) => Some(ins.map(&mut |v, _| v.var.clone())),
                        SsaInstruction::Phi(_) => None,
                    })
                    .collect()
            })
            .collect()
    }
}

fn ref_root<'a>(ir: &'a FunctionIr, v: &'a Var) -> &'a Var {
    match v.kind {
        VarKind::Reference(n) => ir.ref_roots.get(&n).unwrap_or(v),
        _ => v,
    }
}

/// State variables read in `cfg`: direct operands plus targets of storage
/// references dereferenced for reading.
pub fn state_reads(cfg: &Cfg, aliases: &AliasMap, state_vars: &[Var]) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for (n, node) in cfg.nodes.iter().enumerate() {
        for (i, ins) in node.irs.iter().enumerate() {
            for v in ins.reads() {
                if v.is_state() {
                    out.insert(v.clone());
                }
            }
            if let Some(ts) = aliases.read_targets.get(&(n, i)) {
                out.extend(state_vars.iter().filter(|s| s.state_id().is_some_and(|id| ts.contains(id))).cloned());
            }
        }
    }
    out
}

/// Variables updated in place by a store through `target` (a reference or an
/// array receiving a push), with the state targets of the alias analysis.
pub fn weak_targets(
    ir: &FunctionIr,
    aliases: &AliasMap,
    key: (usize, usize),
    target: &Var,
    state_vars: &[Var],
) -> Vec<Var> {
    let root = ref_root(ir, target);
    if let Some(ts) = aliases.write_targets.get(&key) {
        return state_vars.iter().filter(|s| s.state_id().is_some_and(|id| ts.contains(id))).cloned().collect();
    }
    if root.is_versioned() && !root.is_storage_reference() {
        return vec![root.clone()];
    }
    Vec::new()
}

/// Converts a lowered function to SSA form.
pub fn to_ssa(cfg: &Cfg, ir: &FunctionIr, dom: &DomInfo, aliases: &AliasMap, state_vars: &[Var]) -> SsaFunction {
    let n = cfg.nodes.len();
    let reads = state_reads(cfg, aliases, state_vars);

    // Definition sites per base variable.
    let mut def_sites: BTreeMap<Var, BTreeSet<NodeId>> = BTreeMap::new();
    for (ni, node) in cfg.nodes.iter().enumerate() {
        for (ii, ins) in node.irs.iter().enumerate() {
            if let Some(lv) = ins.lvalue() {
                if lv.is_versioned() {
                    def_sites.entry(lv.clone()).or_default().insert(NodeId(ni));
                }
            }
            if let Some(t) = ins.store_target() {
                for w in weak_targets(ir, aliases, (ni, ii), t, state_vars) {
                    def_sites.entry(w).or_default().insert(NodeId(ni));
                }
            }
            if ins.is_external_call() {
                for s in &reads {
                    def_sites.entry(s.clone()).or_default().insert(NodeId(ni));
                }
            }
        }
    }
    for s in &reads {
        def_sites.entry(s.clone()).or_default().insert(cfg.entry);
    }

    // Join φ placement on the iterated dominance frontier.
    let mut joins: Vec<Vec<Var>> = vec![Vec::new(); n];
    for (v, sites) in &def_sites {
        for j in dom.iterated_frontier(sites.iter().copied()) {
            joins[j.0].push(v.clone());
        }
    }

    let mut r = Renamer {
        cfg,
        ir,
        aliases,
        state_vars,
        reads: &reads,
        counters: BTreeMap::new(),
        stacks: BTreeMap::new(),
        out: vec![Vec::new(); n],
        joins,
        dom,
    };
    for j in 0..n {
        let vars = r.joins[j].clone();
        let preds = cfg.nodes[j].fathers.len();
        for v in vars {
            r.out[j].push(SsaInstruction::Phi(Phi {
                lvalue: SsaVar::plain(v.clone()),
                operands: vec![SsaVar::plain(v); preds],
                site: PhiSite::Join,
                through: None,
            }));
        }
    }
    r.rename(cfg.entry);
    SsaFunction { nodes: r.out, state_reads: reads }
}

struct Renamer<'a> {
    cfg: &'a Cfg,
    ir: &'a FunctionIr,
    aliases: &'a AliasMap,
    state_vars: &'a [Var],
    reads: &'a BTreeSet<Var>,
    counters: BTreeMap<Var, u32>,
    stacks: BTreeMap<Var, Vec<u32>>,
    out: Vec<Vec<SsaInstruction>>,
    joins: Vec<Vec<Var>>,
    dom: &'a DomInfo,
}

impl Renamer<'_> {
    fn current(&self, v: &Var) -> SsaVar {
        let version =
            if v.is_versioned() { self.stacks.get(v).and_then(|s| s.last().copied()).unwrap_or(0) } else { 0 };
        SsaVar { var: v.clone(), version }
    }

    fn fresh(&mut self, v: &Var, pushed: &mut Vec<Var>) -> SsaVar {
        if !v.is_versioned() {
            return SsaVar::plain(v.clone());
        }
        let c = self.counters.entry(v.clone()).or_insert(0);
        *c += 1;
        let version = *c;
        self.stacks.entry(v.clone()).or_default().push(version);
        pushed.push(v.clone());
        SsaVar { var: v.clone(), version }
    }

    fn rename(&mut self, node: NodeId) {
        let mut pushed = Vec::new();
        let id = node.0;

        // Join φs were pre-seeded; give them fresh versions.
        for k in 0..self.out[id].len() {
            if let SsaInstruction::Phi(p) = &self.out[id][k] {
                let v = p.lvalue.var.clone();
                let nv = self.fresh(&v, &mut pushed);
                if let SsaInstruction::Phi(p) = &mut self.out[id][k] {
                    p.lvalue = nv;
                }
            }
        }
        if node == self.cfg.entry {
            let reads: Vec<Var> = self.reads.iter().cloned().collect();
            for s in reads {
                let lv = self.fresh(&s, &mut pushed);
                self.out[id].push(SsaInstruction::Phi(Phi {
                    lvalue: lv,
                    operands: vec![],
                    site: PhiSite::Entry,
                    through: None,
                }));
            }
        }

        let irs = self.cfg.nodes[id].irs.clone();
        for (ii, ins) in irs.iter().enumerate() {
            let mut fresh_defs = Vec::new();
            let mapped = ins.map(&mut |v, role| match role {
                Role::Use => self.current(v),
                Role::Def => {
                    if v.is_versioned() {
                        fresh_defs.push(v.clone());
                    }
                    SsaVar::plain(v.clone())
                }
            });
            // Versions for the definition are assigned after all uses were mapped.
            let mapped = if fresh_defs.is_empty() {
                mapped
            } else {
                let def = fresh_defs[0].clone();
                let nv = self.fresh(&def, &mut pushed);
                let mut done = false;
                mapped.map(&mut |v, role| {
                    if role == Role::Def && !done && v.var == def {
                        done = true;
                        nv.clone()
                    } else {
                        v.clone()
                    }
                })
            };
            let store_value = match &mapped {
                Instruction::Assignment { lvalue, rvalue } if lvalue.var.is_reference() => {
                    Some((lvalue.clone(), rvalue.clone()))
                }
                Instruction::Push { array, value } => Some((array.clone(), value.clone())),
                _ => None,
            };
            let external = mapped.is_external_call();
            self.out[id].push(SsaInstruction::Ir(mapped));

            if external {
                let reads: Vec<Var> = self.reads.iter().cloned().collect();
                for s in reads {
                    let old = self.current(&s);
                    let lv = self.fresh(&s, &mut pushed);
                    self.out[id].push(SsaInstruction::Phi(Phi {
                        lvalue: lv,
                        operands: vec![old],
                        site: PhiSite::PostCall,
                        through: None,
                    }));
                }
            }
            if let Some((target, value)) = store_value {
                for w in weak_targets(self.ir, self.aliases, (id, ii), &target.var, self.state_vars) {
                    let old = self.current(&w);
                    let lv = self.fresh(&w, &mut pushed);
                    let through = if target.var == w { None } else { Some(target.clone()) };
                    self.out[id].push(SsaInstruction::Phi(Phi {
                        lvalue: lv,
                        operands: vec![old, value.clone()],
                        site: PhiSite::WeakUpdate,
                        through,
                    }));
                }
            }
        }

        // Fill join φ operands of successors.
        for s in self.cfg.nodes[id].sons.clone() {
            let pos: Vec<usize> =
                self.cfg.nodes[s.0].fathers.iter().enumerate().filter(|(_, f)| **f == node).map(|(i, _)| i).collect();
            for k in 0..self.out[s.0].len() {
                let SsaInstruction::Phi(p) = &self.out[s.0][k] else { continue };
                if p.site != PhiSite::Join {
                    continue;
                }
                let cur = self.current(&p.lvalue.var);
                if let SsaInstruction::Phi(p) = &mut self.out[s.0][k] {
                    for &i in &pos {
                        p.operands[i] = cur.clone();
                    }
                }
            }
        }

        for c in self.dom.children[id].clone() {
            self.rename(c);
        }
        for v in pushed {
            if let Some(st) = self.stacks.get_mut(&v) {
                st.pop();
            }
        }
    }
}
