//! C3 linearization of contract hierarchies.
//!
//! Solidity lists bases from "most base-like" to "most derived", so the
//! merge consumes the base list right to left: `contract C is A, B` gives
//! `[C, B, A]`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::frontend::ast::{ContractDef, FunctionDef, SourceUnit, VariableDecl};

/// Fills `linearization` on every contract of `unit`.
pub fn resolve_inheritance(mut unit: SourceUnit) -> Result<SourceUnit> {
    let mut seen = HashSet::new();
    for c in &unit.contracts {
        if !seen.insert(c.name.name.as_str()) {
            return Err(Error::DuplicateContract { name: c.name.name.clone(), span: c.name.span });
        }
    }
    let index: HashMap<&str, usize> =
        unit.contracts.iter().enumerate().map(|(i, c)| (c.name.name.as_str(), i)).collect();
    for c in &unit.contracts {
        for b in &c.bases {
            if !index.contains_key(b.name.name.as_str()) {
                return Err(Error::UnresolvedBase { name: b.name.name.clone(), span: b.name.span });
            }
        }
    }

    let mut memo: HashMap<String, Vec<String>> = HashMap::new();
    let names: Vec<String> = unit.contracts.iter().map(|c| c.name.name.clone()).collect();
    for name in &names {
        let mut visiting = Vec::new();
        linearize(&unit, &index, name, &mut memo, &mut visiting)?;
    }
    for c in &mut unit.contracts {
        c.linearization = memo[&c.name.name].clone();
    }
    Ok(unit)
}

fn linearize(
    unit: &SourceUnit,
    index: &HashMap<&str, usize>,
    name: &str,
    memo: &mut HashMap<String, Vec<String>>,
    visiting: &mut Vec<String>,
) -> Result<Vec<String>> {
    if let Some(l) = memo.get(name) {
        return Ok(l.clone());
    }
    let contract = &unit.contracts[index[name]];
    if visiting.iter().any(|v| v == name) {
        return Err(Error::Linearization { contract: name.to_string(), span: contract.name.span });
    }
    visiting.push(name.to_string());

    let mut sequences: Vec<Vec<String>> = Vec::new();
    for base in contract.bases.iter().rev() {
        sequences.push(linearize(unit, index, &base.name.name, memo, visiting)?);
    }
    sequences.push(contract.bases.iter().rev().map(|b| b.name.name.clone()).collect());

    let merged = c3_merge(sequences)
        .ok_or_else(|| Error::Linearization { contract: name.to_string(), span: contract.name.span })?;
    let mut result = vec![name.to_string()];
    result.extend(merged);

    visiting.pop();
    memo.insert(name.to_string(), result.clone());
    Ok(result)
}

/// Standard C3 merge: repeatedly take the first head that appears in no tail.
/// Returns `None` when the sequences are inconsistent.
pub fn c3_merge(mut sequences: Vec<Vec<String>>) -> Option<Vec<String>> {
    let mut out = Vec::new();
    loop {
        sequences.retain(|s| !s.is_empty());
        if sequences.is_empty() {
            return Some(out);
        }
        let candidate =
            sequences.iter().map(|s| &s[0]).find(|head| !sequences.iter().any(|s| s[1..].contains(head)))?;
        let candidate = candidate.clone();
        for s in &mut sequences {
            if s[0] == candidate {
                s.remove(0);
            }
        }
        out.push(candidate);
    }
}

/// Effective functions of a contract: the most-derived definition per signature,
/// walking the linearization. Constructors of bases are excluded.
pub fn flatten_functions<'u>(unit: &'u SourceUnit, contract: &ContractDef) -> Vec<&'u FunctionDef> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (depth, name) in contract.linearization.iter().enumerate() {
        let Some(c) = unit.contract(name) else { continue };
        for f in &c.functions {
            if depth > 0 && f.is_constructor() {
                continue;
            }
            if seen.insert(f.signature()) {
                out.push(f);
            }
        }
    }
    out
}

/// State variables visible in `contract`: its own first, then inherited ones in
/// linearization order. Shadowed base variables are kept.
pub fn flatten_state_vars<'u>(unit: &'u SourceUnit, contract: &ContractDef) -> Vec<(&'u str, &'u VariableDecl)> {
    let mut out = Vec::new();
    for name in &contract.linearization {
        if let Some(c) = unit.contract(name) {
            out.extend(c.state_vars.iter().map(|v| (c.name.name.as_str(), v)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;

    fn lin(src: &str, name: &str) -> Result<Vec<String>> {
        let unit = parse_source(src)?;
        let unit = resolve_inheritance(unit)?;
        Ok(unit.contract(name).unwrap().linearization.clone())
    }

    #[test]
    fn independent_bases() {
        assert_eq!(lin("contract A{} contract B{} contract C is A, B {}", "C").unwrap(), ["C", "B", "A"]);
    }

    #[test]
    fn single_chain() {
        assert_eq!(lin("contract A{} contract B is A{} contract C is B {}", "C").unwrap(), ["C", "B", "A"]);
    }

    #[test]
    fn diamond() {
        assert_eq!(
            lin("contract A{} contract B is A{} contract C is A{} contract D is B, C {}", "D").unwrap(),
            ["D", "C", "B", "A"]
        );
    }

    #[test]
    fn inconsistent_hierarchy() {
        let e = lin("contract A{} contract B{} contract X is A, B{} contract Y is B, A{} contract Z is X, Y{}", "Z")
            .unwrap_err();
        assert!(matches!(e, Error::Linearization { ref contract, .. } if contract == "Z"));
    }

    #[test]
    fn unknown_base() {
        assert!(matches!(lin("contract C is Missing {}", "C").unwrap_err(), Error::UnresolvedBase { .. }));
    }

    #[test]
    fn cyclic_inheritance() {
        assert!(matches!(lin("contract A is B {} contract B is A {}", "A").unwrap_err(), Error::Linearization { .. }));
    }

    #[test]
    fn overrides_pick_most_derived() {
        let unit = resolve_inheritance(
            parse_source(
                "contract A { function f() public {} function g() public {} }
                 contract B is A { function f() public {} }",
            )
            .unwrap(),
        )
        .unwrap();
        let b = unit.contract("B").unwrap();
        let fs = flatten_functions(&unit, b);
        let owners: Vec<(&str, &str)> = fs.iter().map(|f| (f.name.name.as_str(), f.contract.as_str())).collect();
        assert_eq!(owners, [("f", "B"), ("g", "A")]);
    }
}
