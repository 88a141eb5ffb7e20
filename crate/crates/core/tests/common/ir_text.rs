//! Textual IR dumps, comparable modulo temporary and reference numbering.

use std::collections::HashMap;

use regex::Regex;
use soliscope::FunctionModel;

/// Renumbers TMP_n and REF_n by order of first appearance, so two dumps can be
/// compared modulo indices.
pub fn canonical(text: &str) -> String {
    let re = Regex::new(r"\b(TMP|REF)_(\d+)\b").unwrap();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut next: HashMap<String, usize> = HashMap::new();
    re.replace_all(text, |c: &regex::Captures| {
        let kind = c[1].to_string();
        let n = next.entry(kind.clone()).or_insert(0);
        let id = *seen.entry(c[0].to_string()).or_insert_with(|| {
            *n += 1;
            *n - 1
        });
        format!("{kind}_{id}")
    })
    .into_owned()
}

pub fn dump(f: &FunctionModel) -> String {
    let mut out = format!("Function {}\n", f.key);
    for node in &f.cfg.nodes {
        for ins in &node.irs {
            out.push_str(&format!("\t{ins}\n"));
        }
    }
    out
}
