//! Dumps the IR of every function, then its SSA form.
//!
//! cargo run --example print_slithir -- [file.sol]

use std::env;
use std::fs;

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/safemath_token.sol").into());
    let text = fs::read_to_string(&path).expect("readable source");
    let analysis = soliscope::analyze_source(&text).expect("analysis");
    for c in &analysis.contracts {
        for f in &c.functions {
            println!("Function {}", f.key);
            for n in &f.cfg.nodes {
                println!("  Node {} {}", n.id, n.kind);
                for i in &n.irs {
                    println!("    {i}");
                }
            }
            println!("  SSA");
            for (node, i) in f.ssa.instructions() {
                println!("    [{node}] {i}");
            }
        }
    }
}
