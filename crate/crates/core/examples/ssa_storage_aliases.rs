//! Shows how writes through storage references become weak updates in SSA.
//!
//! cargo run --example ssa_storage_aliases -- [file.sol]

use std::env;
use std::fs;

use soliscope::ssa::PhiSite;

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/storage_alias.sol").into());
    let text = fs::read_to_string(&path).expect("readable source");
    let analysis = soliscope::analyze_source(&text).expect("analysis");
    for c in &analysis.contracts {
        for f in &c.functions {
            if f.aliases.write_targets.is_empty() {
                continue;
            }
            println!("{}", f.key);
            for ((node, idx), targets) in &f.aliases.write_targets {
                let names: Vec<&str> = targets.iter().map(|t| t.name.as_str()).collect();
                println!("  node {node} #{idx}: {} may write {}", f.cfg.nodes[*node].irs[*idx], names.join(", "));
            }
            for (node, ins) in f.ssa.instructions() {
                let Some(phi) = ins.as_phi() else { continue };
                let site = match phi.site {
                    PhiSite::Entry => "entry",
                    PhiSite::PostCall => "after call",
                    PhiSite::Join => "join",
                    PhiSite::WeakUpdate => "weak update",
                };
                println!("  [{node}] {site:<11} {ins}");
            }
        }
    }
}
