//! Command-line driver.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::detectors::{sort_findings, Finding, Registry, Severity, INTERNAL_ERROR};
use crate::printers::{run_printer, OutputFormat, PrinterOutput, PRINTERS};
use crate::project::{analyze_unit, parse, SourceAnalysis};
use crate::source::{FileId, SourceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "soliscope", version, about = "Static analysis for Solidity contracts")]
pub struct Args {
    /// Solidity source files.
    #[arg(required_unless_present = "list")]
    pub files: Vec<PathBuf>,
    /// Comma-separated detector ids to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub detect: Vec<String>,
    /// Comma-separated detector ids to skip.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Comma-separated printer ids.
    #[arg(long, value_delimiter = ',')]
    pub print: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Lowest severity that makes the run fail, or `none`.
    #[arg(long, default_value = "medium")]
    pub fail_on: String,
    /// Report per-file timings.
    #[arg(long)]
    pub stats: bool,
    /// Wall-clock limit in seconds for the whole run (0 = none).
    #[arg(long, default_value_t = 0)]
    pub timeout: u64,
    /// Directory receiving DOT files.
    #[arg(long, default_value = ".")]
    pub dot_dir: PathBuf,
    /// List detectors and printers, then exit.
    #[arg(long)]
    pub list: bool,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub files: Vec<PathBuf>,
    pub detectors: BTreeSet<String>,
    pub printers: Vec<String>,
    pub format: Format,
    pub fail_on: Option<Severity>,
    pub stats: bool,
    pub timeout: Option<Duration>,
    pub dot_dir: PathBuf,
}

impl RunConfig {
    pub fn from_args(args: Args, registry: &Registry) -> Result<RunConfig, String> {
        let known: BTreeSet<&str> = registry.ids().into_iter().collect();
        for id in args.detect.iter().chain(&args.exclude) {
            if !known.contains(id.as_str()) {
                return Err(format!("unknown detector `{id}`"));
            }
        }
        for id in &args.print {
            if !PRINTERS.contains(&id.as_str()) {
                return Err(format!("unknown printer `{id}`"));
            }
        }
        if let Some(id) = args.detect.iter().find(|d| args.exclude.contains(d)) {
            return Err(format!("detector `{id}` is both selected and excluded"));
        }
        let mut detectors: BTreeSet<String> = if args.detect.is_empty() {
            known.iter().map(|s| s.to_string()).collect()
        } else {
            args.detect.iter().cloned().collect()
        };
        for id in &args.exclude {
            detectors.remove(id);
        }
        let fail_on = match args.fail_on.to_ascii_lowercase().as_str() {
            "none" => None,
            s => Some(s.parse::<Severity>()?),
        };
        Ok(RunConfig {
            files: args.files,
            detectors,
            printers: args.print,
            format: args.format,
            fail_on,
            stats: args.stats,
            timeout: (args.timeout > 0).then(|| Duration::from_secs(args.timeout)),
            dot_dir: args.dot_dir,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileStats {
    pub file: String,
    pub parse_ms: f64,
    pub analyze_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stats {
    pub parse_ms: f64,
    pub analyze_ms: f64,
    pub files: Vec<FileStats>,
}

#[derive(Debug, Serialize)]
pub struct JsonReport<'a> {
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub findings: &'a [Finding],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
}

/// Everything produced for one input file.
pub struct FileResult {
    pub analysis: SourceAnalysis,
    pub findings: Vec<Finding>,
    pub outputs: Vec<PrinterOutput>,
    pub stats: FileStats,
}

fn millis(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

/// Parses, analyzes, runs detectors and printers on one file.
pub fn process_file(path: &Path, id: FileId, config: &RunConfig, registry: &Registry) -> Result<FileResult, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = SourceFile::new(id, path.display().to_string(), text);
    let t0 = Instant::now();
    let unit = parse(&file).map_err(|e| format!("{}:{e}", path.display()))?;
    let t1 = Instant::now();
    let analysis = analyze_unit(file, unit).map_err(|e| format!("{}:{e}", path.display()))?;
    let findings = registry.run(&analysis, &|d| config.detectors.contains(d));
    let t2 = Instant::now();
    let mut outputs = Vec::new();
    for p in &config.printers {
        outputs.extend(run_printer(p, &analysis, &findings).unwrap_or_default());
    }
    let stats = FileStats { file: path.display().to_string(), parse_ms: millis(t1 - t0), analyze_ms: millis(t2 - t1) };
    Ok(FileResult { analysis, findings, outputs, stats })
}

fn process_all(config: &RunConfig, registry: &Registry) -> Result<Vec<FileResult>, String> {
    let (tx, rx) = mpsc::channel();
    for (i, path) in config.files.iter().enumerate() {
        let tx = tx.clone();
        let path = path.clone();
        let config = config.clone();
        let registry = registry.clone();
        thread::spawn(move || {
            let r = catch_unwind(AssertUnwindSafe(|| process_file(&path, FileId(i as u32), &config, &registry)))
                .unwrap_or_else(|_| Err(format!("{}: internal error during analysis", path.display())));
            let _ = tx.send((i, r));
        });
    }
    drop(tx);
    let deadline = config.timeout.map(|t| Instant::now() + t);
    let mut results: Vec<Option<Result<FileResult, String>>> = (0..config.files.len()).map(|_| None).collect();
    for _ in 0..config.files.len() {
        let got = match deadline {
            Some(d) => rx.recv_timeout(d.saturating_duration_since(Instant::now())).ok(),
            None => rx.recv().ok(),
        };
        match got {
            Some((i, r)) => results[i] = Some(r),
            None => {
                let secs = config.timeout.map(|t| t.as_secs()).unwrap_or(0);
                return Err(format!("analysis exceeded the timeout of {secs}s"));
            }
        }
    }
    results.into_iter().map(|r| r.expect("every file reported")).collect()
}

fn paint(color: bool, code: &str, s: &str) -> String {
    if color {
        format!("\x1b[{code}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

fn severity_color(s: Severity) -> &'static str {
    match s {
        Severity::High => "31",
        Severity::Medium => "33",
        Severity::Low => "36",
        Severity::Informational | Severity::Optimization => "32",
    }
}

/// Findings grouped by severity, each with its location and source line.
pub fn render_text(findings: &[Finding], color: bool) -> String {
    let mut out = String::new();
    for s in Severity::ALL {
        let group: Vec<&Finding> = findings.iter().filter(|f| f.severity == s).collect();
        if group.is_empty() {
            continue;
        }
        out.push_str(&paint(color, severity_color(s), &format!("{s} ({})", group.len())));
        out.push('\n');
        for f in group {
            let m = &f.primary().source_mapping;
            out.push_str(&format!("  [{}] {}\n", f.check, f.message));
            out.push_str(&format!("    --> {}:{}:{}\n", m.file, m.line_start, m.col_start));
            if !f.excerpt.is_empty() {
                out.push_str(&format!("     | {}\n", f.excerpt));
            }
        }
        out.push('\n');
    }
    let n = findings.len();
    out.push_str(&format!("{n} finding{}\n", if n == 1 { "" } else { "s" }));
    out
}

fn use_color() -> bool {
    std::env::var_os("SOLISCOPE_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

/// Runs the command line `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{e}");
            return 2;
        }
    };
    let registry = Registry::default();
    if args.list {
        for d in registry.detectors() {
            let _ = writeln!(stdout, "detector {:<22} {:<14} {}", d.id, d.severity.as_str(), d.description);
        }
        for p in PRINTERS {
            let _ = writeln!(stdout, "printer  {p}");
        }
        return 0;
    }
    let config = match RunConfig::from_args(args, &registry) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let results = match process_all(&config, &registry) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if config.format == Format::Json {
                let report = JsonReport { success: false, error: Some(e), findings: &[], stats: None };
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
            }
            return 2;
        }
    };

    let mut findings: Vec<Finding> = results.iter().flat_map(|r| r.findings.iter().cloned()).collect();
    sort_findings(&mut findings);

    for r in &results {
        for o in &r.outputs {
            match o.format {
                OutputFormat::Dot => {
                    let path = config.dot_dir.join(format!("{}.dot", o.name));
                    if let Err(e) =
                        std::fs::create_dir_all(&config.dot_dir).and_then(|_| std::fs::write(&path, &o.body))
                    {
                        let _ = writeln!(stderr, "error: {}: {e}", path.display());
                        return 2;
                    }
                    let _ = writeln!(stderr, "wrote {}", path.display());
                }
                OutputFormat::Text | OutputFormat::Markdown => {
                    let sink: &mut dyn Write = if config.format == Format::Json { &mut *stderr } else { &mut *stdout };
                    let _ = writeln!(sink, "{}", o.body);
                }
            }
        }
    }

    let stats = config.stats.then(|| Stats {
        parse_ms: results.iter().map(|r| r.stats.parse_ms).sum(),
        analyze_ms: results.iter().map(|r| r.stats.analyze_ms).sum(),
        files: results.iter().map(|r| r.stats.clone()).collect(),
    });
    match config.format {
        Format::Json => {
            let report = JsonReport { success: true, error: None, findings: &findings, stats };
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Format::Text => {
            let _ = write!(stdout, "{}", render_text(&findings, use_color()));
            if let Some(s) = stats {
                for f in &s.files {
                    let _ = writeln!(stdout, "{}: parse {:.3} ms, analysis {:.3} ms", f.file, f.parse_ms, f.analyze_ms);
                }
            }
        }
    }
    if findings.iter().any(|f| f.check == INTERNAL_ERROR) {
        return 2;
    }
    match config.fail_on {
        Some(t) if findings.iter().any(|f| f.severity >= t) => 1,
        _ => 0,
    }
}

/// Entry point of the `soliscope` binary.
pub fn main() -> ! {
    let code = run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code)
}
