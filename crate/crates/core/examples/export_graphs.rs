//! Writes the inheritance graph, call graph and per-function CFGs as DOT files.
//!
//! cargo run --example export_graphs -- [file.sol] [out-dir]

use std::env;
use std::fs;
use std::path::PathBuf;

use soliscope::printers::{run_printer, OutputFormat};

fn main() {
    let mut args = env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts/inheritance.sol").into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "graphs".into()));
    let text = fs::read_to_string(&path).expect("readable source");
    let analysis = soliscope::analyze_source(&text).expect("analysis");
    fs::create_dir_all(&out).expect("output directory");
    for printer in ["inheritance-graph", "call-graph", "cfg"] {
        for o in run_printer(printer, &analysis, &[]).unwrap() {
            assert_eq!(o.format, OutputFormat::Dot);
            let file = out.join(format!("{}.dot", o.name));
            fs::write(&file, &o.body).expect("writable");
            println!("wrote {}", file.display());
        }
    }
    println!("render with: dot -Tsvg {}/call-graph.dot -o call-graph.svg", out.display());
}
