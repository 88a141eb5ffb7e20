use std::fmt::Write;

use crate::ir::instruction::Instruction;
use crate::ir::types::Type;
use crate::ir::variable::Var;

/// Operand behaviour needed for printing.
pub trait Operand {
    fn label(&self) -> String;
    fn ty(&self) -> &Type;
    fn is_reference(&self) -> bool;
}

impl Operand for Var {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn ty(&self) -> &Type {
        &self.ty
    }

    fn is_reference(&self) -> bool {
        Var::is_reference(self)
    }
}

fn typed<V: Operand>(v: &V) -> String {
    format!("{}({})", v.label(), v.ty())
}

fn list<V: Operand>(vs: &[V]) -> String {
    vs.iter().map(|v| v.label()).collect::<Vec<_>>().join(", ")
}

fn assign_prefix<V: Operand>(lvalue: Option<&V>) -> String {
    lvalue.map(|l| format!("{} = ", typed(l))).unwrap_or_default()
}

fn value_suffix<V: Operand>(value: Option<&V>) -> String {
    value.map(|v| format!(" value:{}", v.label())).unwrap_or_default()
}

/// Renders one instruction in the textual IR syntax.
pub fn render<V: Operand>(ins: &Instruction<V>) -> String {
    use Instruction as I;
    let mut s = String::new();
    match ins {
        I::Assignment { lvalue, rvalue } => {
            if lvalue.is_reference() {
                let _ = write!(s, "{} := {}", lvalue.label(), typed(rvalue));
            } else {
                let _ = write!(s, "{} := {}", typed(lvalue), typed(rvalue));
            }
        }
        I::Binary { lvalue, left, op, right } => {
            let _ = write!(s, "{} = {} {} {}", typed(lvalue), left.label(), op.symbol(), right.label());
        }
        I::Unary { lvalue, op, operand } => {
            let _ = write!(s, "{} = {} {}", typed(lvalue), op.symbol(), operand.label());
        }
        I::Index { lvalue, base, index } => {
            let _ = write!(s, "{} -> {}[{}]", typed(lvalue), base.label(), index.label());
        }
        I::Member { lvalue, base, member } => {
            let _ = write!(s, "{} -> {}.{}", typed(lvalue), base.label(), member);
        }
        I::LowLevelCall { lvalue, destination, function, args, value } => {
            let _ = write!(
                s,
                "{}L_CALL {}.{}({}){}",
                assign_prefix(lvalue.as_ref()),
                destination.label(),
                function,
                list(args),
                value_suffix(value.as_ref())
            );
        }
        I::HighLevelCall { lvalue, destination, function, args, value, .. } => {
            let _ = write!(
                s,
                "{}H_CALL {}.{}({}){}",
                assign_prefix(lvalue.as_ref()),
                destination.label(),
                function,
                list(args),
                value_suffix(value.as_ref())
            );
        }
        I::LibraryCall { lvalue, library, function, args } => {
            let _ = write!(s, "{}LIB_CALL {}.{}({})", assign_prefix(lvalue.as_ref()), library, function, list(args));
        }
        I::SolidityCall { lvalue, function, args } => {
            let _ = write!(s, "{}S_CALL {}({})", assign_prefix(lvalue.as_ref()), function, list(args));
        }
        I::InternalCall { lvalue, function, args } => {
            let _ = write!(s, "{}I_CALL {}({})", assign_prefix(lvalue.as_ref()), function, list(args));
        }
        I::DynamicCall { lvalue, function, args } => {
            let _ = write!(s, "{}DYN_CALL {}({})", assign_prefix(lvalue.as_ref()), function.label(), list(args));
        }
        I::EventCall { event, args } => {
            let _ = write!(s, "E_CALL {}({})", event, list(args));
        }
        I::Send { lvalue, destination, value } => {
            let _ = write!(s, "{} = SEND dest:{} value:{}", typed(lvalue), destination.label(), value.label());
        }
        I::Transfer { destination, value } => {
            let _ = write!(s, "TRANSFER dest:{} value:{}", destination.label(), value.label());
        }
        I::Push { array, value } => {
            let _ = write!(s, "PUSH {} in {}", value.label(), array.label());
        }
        I::Convert { lvalue, value, ty } => {
            let _ = write!(s, "{} = CONVERT {} to {}", typed(lvalue), value.label(), ty);
        }
        I::Unpack { lvalue, tuple, index } => {
            let _ = write!(s, "{} = UNPACK {} index: {}", typed(lvalue), tuple.label(), index);
        }
        I::Return { values } => {
            s.push_str("RETURN");
            if !values.is_empty() {
                let _ = write!(s, " {}", list(values));
            }
        }
        I::Condition { value } => {
            let _ = write!(s, "CONDITION {}", value.label());
        }
        I::NewContract { lvalue, contract, args, value } => {
            let _ = write!(s, "{} = NEW {}({}){}", typed(lvalue), contract, list(args), value_suffix(value.as_ref()));
        }
        I::NewArray { lvalue, ty, args } | I::NewElementary { lvalue, ty, args } => {
            let _ = write!(s, "{} = NEW {}({})", typed(lvalue), ty, list(args));
        }
        I::NewStructure { lvalue, structure, args } => {
            let _ = write!(s, "{} = NEW {}({})", typed(lvalue), structure, list(args));
        }
    }
    s
}

impl<V: Operand> std::fmt::Display for Instruction<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(self))
    }
}
