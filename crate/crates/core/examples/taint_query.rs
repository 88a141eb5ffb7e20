//! Lists, for every state variable, what it depends on and whether a user can
//! influence it, with and without privileged functions.
//!
//! cargo run --example taint_query -- [file.sol]

use std::env;
use std::fs;

use soliscope::analysis::{DepVar, Universe};

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/fees.sol").into());
    let text = fs::read_to_string(&path).expect("readable source");
    let analysis = soliscope::analyze_source(&text).expect("analysis");
    for c in &analysis.contracts {
        println!("Contract {}", c.name);
        for (i, f) in c.functions.iter().enumerate() {
            println!("  {:<24} {:?}", f.signature(), c.facts.protection[i]);
        }
        for sv in c.state_var_list() {
            let v = DepVar::state(&sv);
            for u in Universe::BOTH {
                let deps: Vec<String> = c.facts.deps.deps(&v, u).iter().map(|d| d.var.name.clone()).collect();
                let tainted = if c.facts.deps.is_tainted(&v, u) { "tainted" } else { "clean" };
                println!("  {:<10} {:<13} {tainted:<8} <- {}", sv.name, format!("{u:?}"), deps.join(", "));
            }
        }
    }
}
