use std::fmt;

use crate::frontend::ast::{ContractDef, ElementaryType, SourceUnit, TypeName};

/// A resolved type. User-defined names are split into structs and contracts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Elementary(ElementaryType),
    Mapping(Box<Type>, Box<Type>),
    Array(Box<Type>, Option<u64>),
    Struct(String),
    Contract(String),
    Function { params: Vec<Type>, returns: Vec<Type> },
    Tuple(Vec<Type>),
    Unknown,
}

impl Type {
    pub const UINT256: Type = Type::Elementary(ElementaryType::Uint(256));
    pub const BOOL: Type = Type::Elementary(ElementaryType::Bool);
    pub const ADDRESS: Type = Type::Elementary(ElementaryType::Address { payable: false });

    pub fn resolve(ty: &TypeName, unit: &SourceUnit, scope: &ContractDef) -> Type {
        match ty {
            TypeName::Elementary(ElementaryType::Address { .. }) => Type::ADDRESS,
            TypeName::Elementary(e) => Type::Elementary(*e),
            TypeName::Mapping(k, v) => {
                Type::Mapping(Box::new(Type::resolve(k, unit, scope)), Box::new(Type::resolve(v, unit, scope)))
            }
            TypeName::Array(e, n) => Type::Array(Box::new(Type::resolve(e, unit, scope)), *n),
            TypeName::UserDefined(name) => {
                let in_scope = scope
                    .linearization
                    .iter()
                    .filter_map(|c| unit.contract(c))
                    .any(|c| c.structs.iter().any(|s| &s.name.name == name));
                let anywhere = unit.contracts.iter().any(|c| c.structs.iter().any(|s| &s.name.name == name));
                if in_scope || anywhere {
                    Type::Struct(name.clone())
                } else if unit.contract(name).is_some() {
                    Type::Contract(name.clone())
                } else {
                    Type::Unknown
                }
            }
            TypeName::Function { params, returns, .. } => Type::Function {
                params: params.iter().map(|p| Type::resolve(p, unit, scope)).collect(),
                returns: returns.iter().map(|p| Type::resolve(p, unit, scope)).collect(),
            },
        }
    }

    pub fn is_address(&self) -> bool {
        matches!(self, Type::Elementary(ElementaryType::Address { .. }))
    }

    /// Element type produced by indexing a value of this type.
    pub fn index_result(&self) -> Type {
        match self {
            Type::Mapping(_, v) => (**v).clone(),
            Type::Array(e, _) => (**e).clone(),
            Type::Elementary(ElementaryType::Bytes) | Type::Elementary(ElementaryType::FixedBytes(_)) => {
                Type::Elementary(ElementaryType::FixedBytes(1))
            }
            _ => Type::Unknown,
        }
    }

    pub fn is_value_type(&self) -> bool {
        match self {
            Type::Elementary(e) => e.is_value_type(),
            Type::Contract(_) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Elementary(e) => write!(f, "{e}"),
            Type::Mapping(k, v) => write!(f, "mapping({k} => {v})"),
            Type::Array(e, Some(n)) => write!(f, "{e}[{n}]"),
            Type::Array(e, None) => write!(f, "{e}[]"),
            Type::Struct(n) | Type::Contract(n) => f.write_str(n),
            Type::Function { params, returns } => {
                let p: Vec<String> = params.iter().map(|t| t.to_string()).collect();
                write!(f, "function({})", p.join(","))?;
                if !returns.is_empty() {
                    let r: Vec<String> = returns.iter().map(|t| t.to_string()).collect();
                    write!(f, " returns({})", r.join(","))?;
                }
                Ok(())
            }
            Type::Tuple(items) => {
                let p: Vec<String> = items.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", p.join(","))
            }
            Type::Unknown => f.write_str("None"),
        }
    }
}
