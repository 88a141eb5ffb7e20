pub mod analysis;
pub mod cfg;
pub mod cli;
pub mod detectors;
pub mod error;
pub mod frontend;
pub mod ir;
pub mod printers;
pub mod project;
pub mod source;
pub mod ssa;

pub use error::{Error, Result};
pub use project::{analyze, analyze_source, ContractModel, FunctionModel, SourceAnalysis};
