use std::fmt;

use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::ir::types::Type;
use crate::ir::variable::Var;

/// Target of an internal call.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionRef {
    /// Contract declaring the callee.
    pub contract: String,
    pub name: String,
    pub signature: String,
}

impl FunctionRef {
    /// `Contract.signature`, the key used for call graphs and function lookup.
    pub fn key(&self) -> String {
        format!("{}.{}", self.contract, self.signature)
    }
}

impl fmt::Display for FunctionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.contract, self.name)
    }
}

/// One IR instruction. `V` is the operand type: plain [`Var`] before SSA
/// construction, versioned operands after it. Control flow lives in the CFG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction<V = Var> {
    Assignment {
        lvalue: V,
        rvalue: V,
    },
    Binary {
        lvalue: V,
        left: V,
        op: BinaryOp,
        right: V,
    },
    Unary {
        lvalue: V,
        op: UnaryOp,
        operand: V,
    },
    /// `lvalue -> base[index]`; `lvalue` is a reference.
    Index {
        lvalue: V,
        base: V,
        index: V,
    },
    /// `lvalue -> base.member`; `lvalue` is a reference.
    Member {
        lvalue: V,
        base: V,
        member: String,
    },
    LowLevelCall {
        lvalue: Option<V>,
        destination: V,
        function: String,
        args: Vec<V>,
        value: Option<V>,
    },
    HighLevelCall {
        lvalue: Option<V>,
        destination: V,
        contract: String,
        function: String,
        args: Vec<V>,
        value: Option<V>,
    },
    LibraryCall {
        lvalue: Option<V>,
        library: String,
        function: String,
        args: Vec<V>,
    },
    SolidityCall {
        lvalue: Option<V>,
        function: String,
        args: Vec<V>,
    },
    InternalCall {
        lvalue: Option<V>,
        function: FunctionRef,
        args: Vec<V>,
    },
    DynamicCall {
        lvalue: Option<V>,
        function: V,
        args: Vec<V>,
    },
    EventCall {
        event: String,
        args: Vec<V>,
    },
    Send {
        lvalue: V,
        destination: V,
        value: V,
    },
    Transfer {
        destination: V,
        value: V,
    },
    Push {
        array: V,
        value: V,
    },
    Convert {
        lvalue: V,
        value: V,
        ty: Type,
    },
    Unpack {
        lvalue: V,
        tuple: V,
        index: usize,
    },
    Return {
        values: Vec<V>,
    },
    Condition {
        value: V,
    },
    NewContract {
        lvalue: V,
        contract: String,
        args: Vec<V>,
        value: Option<V>,
    },
    NewArray {
        lvalue: V,
        ty: Type,
        args: Vec<V>,
    },
    NewStructure {
        lvalue: V,
        structure: String,
        args: Vec<V>,
    },
    NewElementary {
        lvalue: V,
        ty: Type,
        args: Vec<V>,
    },
}

/// Instruction kinds, including the SSA-only phi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstructionKind {
    Assignment,
    Binary,
    Unary,
    Index,
    Member,
    LowLevelCall,
    HighLevelCall,
    LibraryCall,
    SolidityCall,
    InternalCall,
    DynamicCall,
    EventCall,
    Send,
    Transfer,
    Push,
    Convert,
    Unpack,
    Return,
    Condition,
    NewContract,
    NewArray,
    NewStructure,
    NewElementary,
    Phi,
}

impl InstructionKind {
    pub const ALL: [InstructionKind; 24] = [
        InstructionKind::Assignment,
        InstructionKind::Binary,
        InstructionKind::Unary,
        InstructionKind::Index,
        InstructionKind::Member,
        InstructionKind::LowLevelCall,
        InstructionKind::HighLevelCall,
        InstructionKind::LibraryCall,
        InstructionKind::SolidityCall,
        InstructionKind::InternalCall,
        InstructionKind::DynamicCall,
        InstructionKind::EventCall,
        InstructionKind::Send,
        InstructionKind::Transfer,
        InstructionKind::Push,
        InstructionKind::Convert,
        InstructionKind::Unpack,
        InstructionKind::Return,
        InstructionKind::Condition,
        InstructionKind::NewContract,
        InstructionKind::NewArray,
        InstructionKind::NewStructure,
        InstructionKind::NewElementary,
        InstructionKind::Phi,
    ];

    pub fn is_call(self) -> bool {
        matches!(
            self,
            InstructionKind::LowLevelCall
                | InstructionKind::HighLevelCall
                | InstructionKind::LibraryCall
                | InstructionKind::SolidityCall
                | InstructionKind::InternalCall
                | InstructionKind::DynamicCall
                | InstructionKind::EventCall
                | InstructionKind::Send
                | InstructionKind::Transfer
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            InstructionKind::Assignment => "ASSIGNMENT",
            InstructionKind::Binary => "BINARY",
            InstructionKind::Unary => "UNARY",
            InstructionKind::Index => "INDEX",
            InstructionKind::Member => "MEMBER",
            InstructionKind::LowLevelCall => "L_CALL",
            InstructionKind::HighLevelCall => "H_CALL",
            InstructionKind::LibraryCall => "LIB_CALL",
            InstructionKind::SolidityCall => "S_CALL",
            InstructionKind::InternalCall => "I_CALL",
            InstructionKind::DynamicCall => "DYN_CALL",
            InstructionKind::EventCall => "E_CALL",
            InstructionKind::Send => "SEND",
            InstructionKind::Transfer => "TRANSFER",
            InstructionKind::Push => "PUSH",
            InstructionKind::Convert => "CONVERT",
            InstructionKind::Unpack => "UNPACK",
            InstructionKind::Return => "RETURN",
            InstructionKind::Condition => "CONDITION",
            InstructionKind::NewContract => "NEW_CONTRACT",
            InstructionKind::NewArray => "NEW_ARRAY",
            InstructionKind::NewStructure => "NEW_STRUCTURE",
            InstructionKind::NewElementary => "NEW_ELEMENTARY",
            InstructionKind::Phi => "PHI",
        }
    }
}

/// Whether an operand is written or read by an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Def,
    Use,
}

impl<V> Instruction<V> {
    pub fn kind(&self) -> InstructionKind {
        use Instruction as I;
        match self {
            I::Assignment { .. } => InstructionKind::Assignment,
            I::Binary { .. } => InstructionKind::Binary,
            I::Unary { .. } => InstructionKind::Unary,
            I::Index { .. } => InstructionKind::Index,
            I::Member { .. } => InstructionKind::Member,
            I::LowLevelCall { .. } => InstructionKind::LowLevelCall,
            I::HighLevelCall { .. } => InstructionKind::HighLevelCall,
            I::LibraryCall { .. } => InstructionKind::LibraryCall,
            I::SolidityCall { .. } => InstructionKind::SolidityCall,
            I::InternalCall { .. } => InstructionKind::InternalCall,
            I::DynamicCall { .. } => InstructionKind::DynamicCall,
            I::EventCall { .. } => InstructionKind::EventCall,
            I::Send { .. } => InstructionKind::Send,
            I::Transfer { .. } => InstructionKind::Transfer,
            I::Push { .. } => InstructionKind::Push,
            I::Convert { .. } => InstructionKind::Convert,
            I::Unpack { .. } => InstructionKind::Unpack,
            I::Return { .. } => InstructionKind::Return,
            I::Condition { .. } => InstructionKind::Condition,
            I::NewContract { .. } => InstructionKind::NewContract,
            I::NewArray { .. } => InstructionKind::NewArray,
            I::NewStructure { .. } => InstructionKind::NewStructure,
            I::NewElementary { .. } => InstructionKind::NewElementary,
        }
    }

    /// Calls that transfer control to code outside the analysed contract.
    pub fn is_external_call(&self) -> bool {
        matches!(
            self,
            Instruction::LowLevelCall { .. }
                | Instruction::HighLevelCall { .. }
                | Instruction::DynamicCall { .. }
                | Instruction::Send { .. }
                | Instruction::Transfer { .. }
        )
    }

    /// Calls that can move ether out of the contract.
    pub fn sends_ether(&self) -> bool {
        match self {
            Instruction::LowLevelCall { value, .. } | Instruction::HighLevelCall { value, .. } => value.is_some(),
            Instruction::Send { .. } | Instruction::Transfer { .. } => true,
            _ => false,
        }
    }

    pub fn lvalue(&self) -> Option<&V> {
        use Instruction as I;
        match self {
            I::Assignment { lvalue, .. }
            | I::Binary { lvalue, .. }
            | I::Unary { lvalue, .. }
            | I::Index { lvalue, .. }
            | I::Member { lvalue, .. }
            | I::Send { lvalue, .. }
            | I::Convert { lvalue, .. }
            | I::Unpack { lvalue, .. }
            | I::NewContract { lvalue, .. }
            | I::NewArray { lvalue, .. }
            | I::NewStructure { lvalue, .. }
            | I::NewElementary { lvalue, .. } => Some(lvalue),
            I::LowLevelCall { lvalue, .. }
            | I::HighLevelCall { lvalue, .. }
            | I::LibraryCall { lvalue, .. }
            | I::SolidityCall { lvalue, .. }
            | I::InternalCall { lvalue, .. }
            | I::DynamicCall { lvalue, .. } => lvalue.as_ref(),
            I::EventCall { .. } | I::Transfer { .. } | I::Push { .. } | I::Return { .. } | I::Condition { .. } => None,
        }
    }

    /// Location written by a store: the reference of an assignment through a
    /// reference, or the array of a push.
    pub fn store_target(&self) -> Option<&V>
    where
        V: crate::ir::Operand,
    {
        match self {
            Instruction::Assignment { lvalue, .. } if lvalue.is_reference() => Some(lvalue),
            Instruction::Push { array, .. } => Some(array),
            _ => None,
        }
    }

    /// Operands read by this instruction, in source order.
    pub fn reads(&self) -> Vec<&V> {
        let mut out = Vec::new();
        self.visit(&mut |v, role| {
            if role == Role::Use {
                out.push(v);
            }
        });
        out
    }

    /// Arguments of a call instruction, empty otherwise.
    pub fn call_args(&self) -> &[V] {
        use Instruction as I;
        match self {
            I::LowLevelCall { args, .. }
            | I::HighLevelCall { args, .. }
            | I::LibraryCall { args, .. }
            | I::SolidityCall { args, .. }
            | I::InternalCall { args, .. }
            | I::DynamicCall { args, .. }
            | I::EventCall { args, .. } => args,
            _ => &[],
        }
    }

    pub fn call_value(&self) -> Option<&V> {
        match self {
            Instruction::LowLevelCall { value, .. }
            | Instruction::HighLevelCall { value, .. }
            | Instruction::NewContract { value, .. } => value.as_ref(),
            Instruction::Send { value, .. } | Instruction::Transfer { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn call_destination(&self) -> Option<&V> {
        match self {
            Instruction::LowLevelCall { destination, .. }
            | Instruction::HighLevelCall { destination, .. }
            | Instruction::Send { destination, .. }
            | Instruction::Transfer { destination, .. } => Some(destination),
            Instruction::DynamicCall { function, .. } => Some(function),
            _ => None,
        }
    }

    /// Visits every operand with its role, definitions first.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a V, Role)) {
        use Instruction as I;
        use Role::*;
        if let Some(l) = self.lvalue() {
            f(l, Def);
        }
        match self {
            I::Assignment { rvalue, .. } => f(rvalue, Use),
            I::Binary { left, right, .. } => {
                f(left, Use);
                f(right, Use);
            }
            I::Unary { operand, .. } => f(operand, Use),
            I::Index { base, index, .. } => {
                f(base, Use);
                f(index, Use);
            }
            I::Member { base, .. } => f(base, Use),
            I::LowLevelCall { destination, args, value, .. } | I::HighLevelCall { destination, args, value, .. } => {
                f(destination, Use);
                if let Some(v) = value {
                    f(v, Use);
                }
                args.iter().for_each(|a| f(a, Use));
            }
            I::LibraryCall { args, .. }
            | I::SolidityCall { args, .. }
            | I::InternalCall { args, .. }
            | I::EventCall { args, .. }
            | I::NewArray { args, .. }
            | I::NewStructure { args, .. }
            | I::NewElementary { args, .. } => args.iter().for_each(|a| f(a, Use)),
            I::DynamicCall { function, args, .. } => {
                f(function, Use);
                args.iter().for_each(|a| f(a, Use));
            }
            I::Send { destination, value, .. } | I::Transfer { destination, value } => {
                f(destination, Use);
                f(value, Use);
            }
            I::Push { array, value } => {
                f(array, Use);
                f(value, Use);
            }
            I::Convert { value, .. } => f(value, Use),
            I::Unpack { tuple, .. } => f(tuple, Use),
            I::Return { values } => values.iter().for_each(|a| f(a, Use)),
            I::Condition { value } => f(value, Use),
            I::NewContract { args, value, .. } => {
                if let Some(v) = value {
                    f(v, Use);
                }
                args.iter().for_each(|a| f(a, Use));
            }
        }
    }

    /// Rebuilds the instruction with every operand mapped. Uses are mapped before
    /// the definition so that SSA renaming sees the pre-instruction versions.
    pub fn map<W>(&self, f: &mut dyn FnMut(&V, Role) -> W) -> Instruction<W> {
        use Instruction as I;
        use Role::*;
        let mut u = |v: &V| f(v, Use);
        macro_rules! list {
            ($e:expr) => {
                $e.iter().map(|a| u(a)).collect::<Vec<W>>()
            };
        }
        match self {
            I::Assignment { lvalue, rvalue } => {
                let rvalue = u(rvalue);
                I::Assignment { lvalue: f(lvalue, Def), rvalue }
            }
            I::Binary { lvalue, left, op, right } => {
                let (left, right) = (u(left), u(right));
                I::Binary { lvalue: f(lvalue, Def), left, op: *op, right }
            }
            I::Unary { lvalue, op, operand } => {
                let operand = u(operand);
                I::Unary { lvalue: f(lvalue, Def), op: *op, operand }
            }
            I::Index { lvalue, base, index } => {
                let (base, index) = (u(base), u(index));
                I::Index { lvalue: f(lvalue, Def), base, index }
            }
            I::Member { lvalue, base, member } => {
                let base = u(base);
                I::Member { lvalue: f(lvalue, Def), base, member: member.clone() }
            }
            I::LowLevelCall { lvalue, destination, function, args, value } => {
                let destination = u(destination);
                let value = value.as_ref().map(&mut u);
                let args = list!(args);
                let lvalue = lvalue.as_ref().map(|l| f(l, Def));
                I::LowLevelCall { lvalue, destination, function: function.clone(), args, value }
            }
            I::HighLevelCall { lvalue, destination, contract, function, args, value } => {
                let destination = u(destination);
                let value = value.as_ref().map(&mut u);
                let args = list!(args);
                let lvalue = lvalue.as_ref().map(|l| f(l, Def));
                I::HighLevelCall {
                    lvalue,
                    destination,
                    contract: contract.clone(),
                    function: function.clone(),
                    args,
                    value,
                }
            }
            I::LibraryCall { lvalue, library, function, args } => {
                let args = list!(args);
                let lvalue = lvalue.as_ref().map(|l| f(l, Def));
                I::LibraryCall { lvalue, library: library.clone(), function: function.clone(), args }
            }
            I::SolidityCall { lvalue, function, args } => {
                let args = list!(args);
                let lvalue = lvalue.as_ref().map(|l| f(l, Def));
                I::SolidityCall { lvalue, function: function.clone(), args }
            }
            I::InternalCall { lvalue, function, args } => {
                let args = list!(args);
                let lvalue = lvalue.as_ref().map(|l| f(l, Def));
                I::InternalCall { lvalue, function: function.clone(), args }
            }
            I::DynamicCall { lvalue, function, args } => {
                let function = u(function);
                let args = list!(args);
                let lvalue = lvalue.as_ref().map(|l| f(l, Def));
                I::DynamicCall { lvalue, function, args }
            }
            I::EventCall { event, args } => I::EventCall { event: event.clone(), args: list!(args) },
            I::Send { lvalue, destination, value } => {
                let (destination, value) = (u(destination), u(value));
                I::Send { lvalue: f(lvalue, Def), destination, value }
            }
            I::Transfer { destination, value } => {
                let (destination, value) = (u(destination), u(value));
                I::Transfer { destination, value }
            }
            I::Push { array, value } => {
                let (array, value) = (u(array), u(value));
                I::Push { array, value }
            }
            I::Convert { lvalue, value, ty } => {
                let value = u(value);
                I::Convert { lvalue: f(lvalue, Def), value, ty: ty.clone() }
            }
            I::Unpack { lvalue, tuple, index } => {
                let tuple = u(tuple);
                I::Unpack { lvalue: f(lvalue, Def), tuple, index: *index }
            }
            I::Return { values } => I::Return { values: list!(values) },
            I::Condition { value } => I::Condition { value: u(value) },
            I::NewContract { lvalue, contract, args, value } => {
                let value = value.as_ref().map(&mut u);
                let args = list!(args);
                I::NewContract { lvalue: f(lvalue, Def), contract: contract.clone(), args, value }
            }
            I::NewArray { lvalue, ty, args } => {
                let args = list!(args);
                I::NewArray { lvalue: f(lvalue, Def), ty: ty.clone(), args }
            }
            I::NewStructure { lvalue, structure, args } => {
                let args = list!(args);
                I::NewStructure { lvalue: f(lvalue, Def), structure: structure.clone(), args }
            }
            I::NewElementary { lvalue, ty, args } => {
                let args = list!(args);
                I::NewElementary { lvalue: f(lvalue, Def), ty: ty.clone(), args }
            }
        }
    }
}
