#![allow(dead_code)]

pub mod dep_oracle;
pub mod ir_text;
pub mod ssa_oracle;

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every `.sol` file below `dir`, sorted.
pub fn sol_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "sol") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Fixtures of one detector, split into (positives, negatives).
pub fn detector_fixtures(id: &str) -> (Vec<PathBuf>, Vec<PathBuf>) {
    let files = sol_files(&fixtures_dir().join("detectors").join(id));
    let name = |p: &PathBuf| p.file_name().unwrap().to_string_lossy().to_string();
    let pos = files.iter().filter(|p| name(p).starts_with("pos_")).cloned().collect();
    let neg = files.iter().filter(|p| name(p).starts_with("neg_")).cloned().collect();
    (pos, neg)
}

/// Random programs over the supported subset: state of every storage shape,
/// storage references, branches, loops, internal and external calls.
pub struct ProgramGen {
    rng: ChaCha8Rng,
    loops: usize,
    lines: Vec<String>,
}

const ATOMS: &[&str] =
    &["a", "b", "l0", "l1", "p0", "m[p1]", "m[msg.sender]", "r.v", "s1.v", "msg.value", "1", "2", "now"];
const TARGETS: &[&str] = &["a", "b", "l0", "l1", "m[p1]", "m[msg.sender]", "r.v", "s1.v", "s2.v"];

impl ProgramGen {
    pub fn new(seed: u64) -> ProgramGen {
        ProgramGen { rng: ChaCha8Rng::seed_from_u64(seed), loops: 0, lines: Vec::new() }
    }

    fn line(&mut self, indent: usize, s: impl AsRef<str>) {
        self.lines.push(format!("{}{}", "    ".repeat(indent), s.as_ref()));
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return ATOMS.choose(&mut self.rng).unwrap().to_string();
        }
        let op = ["+", "-", "*"].choose(&mut self.rng).unwrap();
        let l = self.expr(depth - 1);
        let r = self.expr(depth - 1);
        format!("({l} {op} {r})")
    }

    fn cond(&mut self) -> String {
        match self.rng.gen_range(0..5) {
            0 => "p2".into(),
            1 => "!p2".into(),
            2 => "msg.sender == owner".into(),
            3 => {
                let (l, r) = (self.expr(1), self.expr(1));
                format!("{l} < {r}")
            }
            _ => {
                let (l, r) = (self.expr(1), self.expr(1));
                format!("{l} == {r}")
            }
        }
    }

    fn stmt(&mut self, indent: usize, depth: u32) {
        let max = if depth == 0 { 5 } else { 10 };
        match self.rng.gen_range(0..max) {
            0 | 1 => {
                let t = TARGETS.choose(&mut self.rng).unwrap();
                let op = ["=", "+=", "-="].choose(&mut self.rng).unwrap();
                let e = self.expr(2);
                self.line(indent, format!("{t} {op} {e};"));
            }
            2 => {
                let s = ["r = s2;", "r = s1;"].choose(&mut self.rng).unwrap();
                self.line(indent, *s);
            }
            3 => {
                let e = self.expr(1);
                match self.rng.gen_range(0..4) {
                    0 => self.line(indent, format!("require(msg.sender.call.value({e})());")),
                    1 => self.line(indent, format!("p1.transfer({e});")),
                    2 => self.line(indent, format!("owner.transfer({e});")),
                    _ => self.line(indent, format!("require(p1.send({e}));")),
                }
            }
            4 => {
                let e = self.expr(1);
                self.line(indent, format!("l1 = helper({e});"));
            }
            5 | 6 => {
                let c = self.cond();
                self.line(indent, format!("if ({c}) {{"));
                self.block(indent + 1, depth - 1);
                if self.rng.gen_bool(0.5) {
                    self.line(indent, "} else {");
                    self.block(indent + 1, depth - 1);
                }
                self.line(indent, "}");
            }
            7 => {
                self.line(indent, "while (l0 < 3) {");
                self.block(indent + 1, depth - 1);
                self.line(indent + 1, "l0 = l0 + 1;");
                self.line(indent, "}");
            }
            8 => {
                self.loops += 1;
                let i = format!("i{}", self.loops);
                self.line(indent, format!("for (uint {i} = 0; {i} < 2; {i} = {i} + 1) {{"));
                self.block(indent + 1, depth - 1);
                self.line(indent, "}");
            }
            _ => {
                let c = self.cond();
                if self.rng.gen_bool(0.5) {
                    self.line(indent, format!("require({c});"));
                } else {
                    self.line(indent, format!("if ({c}) {{"));
                    self.line(indent + 1, "revert();");
                    self.line(indent, "}");
                }
            }
        }
    }

    fn block(&mut self, indent: usize, depth: u32) {
        let n = self.rng.gen_range(1..4);
        for _ in 0..n {
            self.stmt(indent, depth);
        }
    }

    fn function(&mut self, index: usize) {
        let vis = ["public", "external", "internal"].choose(&mut self.rng).unwrap();
        self.line(1, format!("function f{index}(uint p0, address p1, bool p2) {vis} returns (uint) {{"));
        let e = self.expr(1).replace("l0", "1").replace("l1", "2").replace("r.v", "s1.v");
        self.line(2, format!("uint l0 = {e};"));
        self.line(2, "uint l1;");
        self.line(2, "S storage r = s1;");
        let n = self.rng.gen_range(1..5);
        for _ in 0..n {
            self.stmt(2, 2);
        }
        let e = self.expr(1);
        self.line(2, format!("return {e};"));
        self.line(1, "}");
        self.line(0, "");
    }

    fn header(&mut self, name: &str) {
        self.line(0, "pragma solidity ^0.4.24;");
        self.line(0, "");
        self.line(0, format!("contract {name} {{"));
        self.line(1, "struct S {");
        self.line(2, "uint v;");
        self.line(1, "}");
        self.line(0, "");
        for decl in ["uint a;", "uint b;", "address owner;", "mapping(address => uint) m;", "S s1;", "S s2;"] {
            self.line(1, decl);
        }
        self.line(0, "");
        self.line(1, "constructor() public {");
        self.line(2, "owner = msg.sender;");
        self.line(1, "}");
        self.line(0, "");
        self.line(1, "function helper(uint x) internal returns (uint) {");
        if self.rng.gen_bool(0.5) {
            self.line(2, "a = a + x;");
        }
        self.line(2, "return x + b;");
        self.line(1, "}");
        self.line(0, "");
    }

    fn finish(mut self) -> String {
        self.line(0, "}");
        self.lines.join("\n") + "\n"
    }

    /// A contract with between one and four random functions.
    pub fn program(seed: u64) -> String {
        let mut g = ProgramGen::new(seed);
        g.header(&format!("Gen{seed}"));
        let n = g.rng.gen_range(1..5);
        for i in 0..n {
            g.function(i);
        }
        g.finish()
    }

    /// A contract of at least `min_lines` lines.
    pub fn large(seed: u64, min_lines: usize) -> String {
        let mut g = ProgramGen::new(seed);
        g.header("Large");
        let mut i = 0;
        while g.lines.len() < min_lines {
            g.function(i);
            i += 1;
        }
        g.finish()
    }
}
