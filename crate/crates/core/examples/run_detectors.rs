//! Runs a chosen set of detectors over several files and prints the findings
//! as text, or as JSON with `--json`.
//!
//! cargo run --example run_detectors -- [--json] [--only id,id] file.sol...

use std::env;
use std::fs;

use soliscope::cli::render_text;
use soliscope::detectors::{sort_findings, Registry};
use soliscope::project::analyze;
use soliscope::source::{FileId, SourceFile};

fn main() {
    let mut json = false;
    let mut only: Option<Vec<String>> = None;
    let mut files = Vec::new();
    let mut args = env::args().skip(1);
    while let Some(a) = args.next() {
        match a.as_str() {
            "--json" => json = true,
            "--only" => only = args.next().map(|s| s.split(',').map(String::from).collect()),
            _ => files.push(a),
        }
    }
    if files.is_empty() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/contracts");
        let mut all: Vec<String> =
            fs::read_dir(dir).unwrap().map(|e| e.unwrap().path().display().to_string()).collect();
        all.sort();
        files = all;
    }
    let registry = Registry::default();
    let mut findings = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let text = fs::read_to_string(path).expect("readable source");
        let analysis = analyze(SourceFile::new(FileId(i as u32), path.clone(), text)).expect("analysis");
        findings.extend(registry.run(&analysis, &|id| only.as_ref().is_none_or(|o| o.iter().any(|x| x == id))));
    }
    sort_findings(&mut findings);
    if json {
        println!("{}", serde_json::to_string_pretty(&findings).unwrap());
    } else {
        print!("{}", render_text(&findings, false));
    }
}
