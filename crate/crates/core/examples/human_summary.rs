//! Prints the audit-oriented summaries: contracts, functions, access control
//! and the overall human summary with findings and complexity.
//!
//! cargo run --example human_summary -- [file.sol]

use std::env;
use std::fs;

use soliscope::detectors::run_detectors;
use soliscope::printers::run_printer;

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/token.sol").into());
    let text = fs::read_to_string(&path).expect("readable source");
    let analysis = soliscope::analyze_source(&text).expect("analysis");
    let findings = run_detectors(&analysis);
    for printer in ["contract-summary", "function-summary", "vars-and-auth", "human-summary"] {
        for o in run_printer(printer, &analysis, &findings).unwrap() {
            println!("{}", o.body);
        }
    }
}
