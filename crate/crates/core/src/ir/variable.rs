use std::fmt;

use crate::frontend::names::{LocalId, LocalKind, StateVarId};
use crate::ir::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    State(StateVarId),
    /// Locals, parameters, named returns and modifier parameters. `storage` marks
    /// storage references.
    Local {
        id: LocalId,
        kind: LocalKind,
        storage: bool,
    },
    Temporary(u32),
    Reference(u32),
    Tuple(u32),
    Constant,
    /// `msg.sender`, `this`, `block.timestamp`, ...
    Builtin,
}

/// An IR operand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub name: String,
    pub ty: Type,
}

impl Var {
    pub fn temporary(index: u32, ty: Type) -> Var {
        Var { kind: VarKind::Temporary(index), name: format!("TMP_{index}"), ty }
    }

    pub fn reference(index: u32, ty: Type) -> Var {
        Var { kind: VarKind::Reference(index), name: format!("REF_{index}"), ty }
    }

    pub fn tuple(index: u32, ty: Type) -> Var {
        Var { kind: VarKind::Tuple(index), name: format!("TUPLE_{index}"), ty }
    }

    pub fn constant(text: impl Into<String>, ty: Type) -> Var {
        Var { kind: VarKind::Constant, name: text.into(), ty }
    }

    pub fn builtin(name: impl Into<String>, ty: Type) -> Var {
        Var { kind: VarKind::Builtin, name: name.into(), ty }
    }

    pub fn is_state(&self) -> bool {
        matches!(self.kind, VarKind::State(_))
    }

    pub fn state_id(&self) -> Option<&StateVarId> {
        match &self.kind {
            VarKind::State(id) => Some(id),
            _ => None,
        }
    }

    pub fn is_local(&self) -> bool {
        matches!(self.kind, VarKind::Local { .. })
    }

    pub fn is_reference(&self) -> bool {
        matches!(self.kind, VarKind::Reference(_))
    }

    pub fn is_temporary(&self) -> bool {
        matches!(self.kind, VarKind::Temporary(_) | VarKind::Reference(_) | VarKind::Tuple(_))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, VarKind::Constant)
    }

    pub fn is_storage_reference(&self) -> bool {
        matches!(self.kind, VarKind::Local { storage: true, .. })
    }

    /// Variables that carry SSA versions: state variables and locals of any kind.
    pub fn is_versioned(&self) -> bool {
        self.is_state() || self.is_local()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
