//! Walks every external call site and explains the reentrancy verdict.
//!
//! cargo run --example detect_reentrancy -- [file.sol]

use std::env;
use std::fs;

use soliscope::detectors::reentrancy_sites;

fn names<'a>(vars: impl IntoIterator<Item = &'a soliscope::ir::Var>) -> String {
    vars.into_iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/reentrancy.sol").into());
    let text = fs::read_to_string(&path).expect("readable source");
    let analysis = soliscope::analyze_source(&text).expect("analysis");
    for c in &analysis.contracts {
        for site in reentrancy_sites(c) {
            let f = &c.functions[site.function];
            println!("{} node {}: {}", f.key, site.node, f.cfg.nodes[site.node].irs[site.instruction]);
            println!("  read before:   {}", names(&site.reads_before));
            println!("  written after: {}", names(&site.writes_after));
            println!("  sends value: {}, protected: {}", site.carries_value, site.protected);
            println!("  verdict: {} ({})", site.severity(), names(site.variables()));
        }
    }
}
