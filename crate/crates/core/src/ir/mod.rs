//! Three-address intermediate representation: typed operands, a small
//! instruction set with nine call kinds, and lowering from CFG expressions.

mod instruction;
mod lower;
mod print;
mod types;
mod variable;

pub use instruction::{FunctionRef, Instruction, InstructionKind, Role};
pub use lower::{lower_function, FunctionIr, LoweringContext};
pub use print::{render, Operand};
pub use types::Type;
pub use variable::{Var, VarKind};
