//! Parses a file and shows each contract's C3 linearization and flattened members.
//!
//! cargo run --example parse_and_linearize -- [file.sol]

use std::env;
use std::fs;

use soliscope::frontend::inheritance::{flatten_functions, flatten_state_vars};
use soliscope::frontend::{parse_source, resolve_inheritance};

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/inheritance.sol").into());
    let text = fs::read_to_string(&path).expect("readable source");
    let unit = match parse_source(&text).and_then(resolve_inheritance) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("{path}:{e}");
            std::process::exit(2);
        }
    };
    for c in &unit.contracts {
        println!("{} {}", c.kind, c.name.name);
        println!("  linearization: {}", c.linearization.join(" -> "));
        for (owner, v) in flatten_state_vars(&unit, c) {
            println!("  state {owner}.{}", v.name.name);
        }
        for f in flatten_functions(&unit, c) {
            println!("  function {}", f.signature());
        }
    }
}
