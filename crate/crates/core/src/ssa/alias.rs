//! Flow-sensitive may-point-to analysis for storage references.

use std::collections::{BTreeMap, BTreeSet};

use crate::cfg::{Cfg, NodeId};
use crate::frontend::names::{LocalId, StateVarId};
use crate::ir::{FunctionIr, Instruction, Type, Var, VarKind};

pub type Targets = BTreeSet<StateVarId>;
type State = BTreeMap<LocalId, Targets>;

/// A use of a storage reference before anything was assigned to it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnassignedUse {
    pub node: NodeId,
    pub local: LocalId,
    pub name: String,
}

#[derive(Debug, Clone, Default)]
pub struct AliasMap {
    /// Union over all program points of what each storage reference may point to.
    pub may_point_to: BTreeMap<LocalId, Targets>,
    /// State variables possibly written by each write-through instruction, keyed
    /// by (node, instruction index).
    pub write_targets: BTreeMap<(usize, usize), Targets>,
    /// State variables possibly read through a storage reference used as the
    /// base of an index or member access, keyed the same way.
    pub read_targets: BTreeMap<(usize, usize), Targets>,
    pub unassigned_uses: Vec<UnassignedUse>,
}

impl AliasMap {
    pub fn targets(&self, local: LocalId) -> Option<&Targets> {
        self.may_point_to.get(&local)
    }
}

/// State variables whose storage could hold a value of type `ty`.
pub fn candidates_of_type(ty: &Type, state_vars: &[Var]) -> Targets {
    let mut out = Targets::new();
    for v in state_vars {
        let mut t = v.ty.clone();
        loop {
            if &t == ty {
                out.insert(v.state_id().expect("state variable").clone());
                break;
            }
            match t {
                Type::Mapping(_, inner) | Type::Array(inner, _) => t = *inner,
                _ => break,
            }
        }
    }
    out
}

fn storage_local(v: &Var) -> Option<LocalId> {
    match v.kind {
        VarKind::Local { id, storage: true, .. } => Some(id),
        _ => None,
    }
}

struct Ctx<'a> {
    ir: &'a FunctionIr,
    state_vars: &'a [Var],
}

impl Ctx<'_> {
    /// Targets designated by an rvalue assigned to a storage reference.
    fn eval(&self, state: &State, v: &Var) -> Targets {
        match &v.kind {
            VarKind::State(id) => [id.clone()].into(),
            VarKind::Local { id, storage: true, .. } => state.get(id).cloned().unwrap_or_default(),
            VarKind::Reference(n) => match self.ir.ref_roots.get(n) {
                Some(root) if !root.is_reference() => self.eval(state, root),
                _ => candidates_of_type(&v.ty, self.state_vars),
            },
            _ => candidates_of_type(&v.ty, self.state_vars),
        }
    }

    fn root_of<'v>(&'v self, v: &'v Var) -> &'v Var {
        match v.kind {
            VarKind::Reference(n) => self.ir.ref_roots.get(&n).unwrap_or(v),
            _ => v,
        }
    }
}

/// Computes aliases for `cfg`. Storage parameters start out pointing to every
/// state variable of a compatible type.
pub fn compute_storage_aliases(cfg: &Cfg, ir: &FunctionIr, params: &[Var], state_vars: &[Var]) -> AliasMap {
    let ctx = Ctx { ir, state_vars };
    let n = cfg.nodes.len();
    let mut init = State::new();
    for p in params {
        if let Some(id) = storage_local(p) {
            init.insert(id, candidates_of_type(&p.ty, state_vars));
        }
    }
    let mut inputs: Vec<Option<State>> = vec![None; n];
    let mut outputs: Vec<Option<State>> = vec![None; n];
    inputs[cfg.entry.0] = Some(init);
    let order = cfg.reverse_postorder();
    let mut changed = true;
    while changed {
        changed = false;
        for &id in &order {
            let node = cfg.node(id);
            let mut input = if id == cfg.entry { inputs[id.0].clone().unwrap_or_default() } else { State::new() };
            for f in &node.fathers {
                if let Some(out) = &outputs[f.0] {
                    for (k, v) in out {
                        input.entry(*k).or_default().extend(v.iter().cloned());
                    }
                }
            }
            let mut state = input.clone();
            for ins in &node.irs {
                transfer(&ctx, &mut state, ins);
            }
            inputs[id.0] = Some(input);
            if outputs[id.0].as_ref() != Some(&state) {
                outputs[id.0] = Some(state);
                changed = true;
            }
        }
    }

    let mut map = AliasMap::default();
    for &id in &order {
        let mut state = inputs[id.0].clone().unwrap_or_default();
        for (k, v) in &state {
            map.may_point_to.entry(*k).or_default().extend(v.iter().cloned());
        }
        for (idx, ins) in cfg.node(id).irs.iter().enumerate() {
            let note_use = |v: &Var, state: &State, map: &mut AliasMap| {
                if let VarKind::Local { id: lid, storage: true, .. } = v.kind {
                    if state.get(&lid).is_none_or(|t| t.is_empty()) {
                        let u = UnassignedUse { node: id, local: lid, name: v.name.clone() };
                        if !map.unassigned_uses.contains(&u) {
                            map.unassigned_uses.push(u);
                        }
                    }
                }
            };
            match ins {
                Instruction::Index { base, .. } | Instruction::Member { base, .. } => {
                    note_use(base, &state, &mut map);
                    if let Some(lid) = storage_local(base) {
                        map.read_targets.insert((id.0, idx), state.get(&lid).cloned().unwrap_or_default());
                    }
                }
                Instruction::Assignment { lvalue, .. } if lvalue.is_reference() => {
                    let root = ctx.root_of(lvalue);
                    if let Some(lid) = storage_local(root) {
                        map.write_targets.insert((id.0, idx), state.get(&lid).cloned().unwrap_or_default());
                    }
                }
                Instruction::Push { array, .. } => {
                    let root = ctx.root_of(array);
                    note_use(root, &state, &mut map);
                    if let Some(lid) = storage_local(root) {
                        map.write_targets.insert((id.0, idx), state.get(&lid).cloned().unwrap_or_default());
                    }
                }
                _ => {}
            }
            transfer(&ctx, &mut state, ins);
            for (k, v) in &state {
                map.may_point_to.entry(*k).or_default().extend(v.iter().cloned());
            }
        }
    }
    map.unassigned_uses.sort();
    map
}

fn transfer(ctx: &Ctx<'_>, state: &mut State, ins: &Instruction) {
    match ins {
        Instruction::Assignment { lvalue, rvalue } => {
            if let Some(id) = storage_local(lvalue) {
                let t = ctx.eval(state, rvalue);
                state.insert(id, t);
            }
        }
        other => {
            if let Some(lv) = other.lvalue() {
                if let Some(id) = storage_local(lv) {
                    state.insert(id, candidates_of_type(&lv.ty, ctx.state_vars));
                }
            }
        }
    }
}
