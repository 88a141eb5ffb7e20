mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{fixtures_dir, sol_files, ProgramGen};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soliscope::frontend::ast::{ExprKind, Expression, SourceUnit, StmtKind};
use soliscope::frontend::{parse_source, resolve_inheritance, tokenize};
use soliscope::source::{FileId, SourceFile, Span};
use soliscope::Error;

/// Whether `gap` is only whitespace and comments.
fn is_trivia(gap: &str) -> bool {
    let mut rest = gap;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("//") {
            rest = r.find('\n').map_or("", |i| &r[i..]);
        } else if let Some(r) = rest.strip_prefix("/*") {
            match r.find("*/") {
                Some(i) => rest = &r[i + 2..],
                None => return false,
            }
        } else {
            let c = rest.chars().next().unwrap();
            if !c.is_whitespace() {
                return false;
            }
            rest = &rest[c.len_utf8()..];
        }
    }
    true
}

fn round_trip(text: &str) {
    let file = SourceFile::new(FileId(0), "t.sol", text);
    let tokens = tokenize(&file).unwrap();
    let mut rebuilt = String::new();
    let mut pos = 0usize;
    for t in &tokens {
        let (s, e) = (t.span.start as usize, t.span.end as usize);
        assert!(s >= pos, "overlapping token {t:?}");
        let gap = &text[pos..s];
        assert!(is_trivia(gap), "non-trivia gap {gap:?}");
        assert_eq!(&text[s..e], t.text);
        rebuilt.push_str(gap);
        rebuilt.push_str(&t.text);
        pos = e;
    }
    assert!(is_trivia(&text[pos..]));
    rebuilt.push_str(&text[pos..]);
    assert_eq!(rebuilt, text);
}

/// Sprinkles comments and blank space between the lines of `src`.
fn with_trivia(src: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for line in src.lines() {
        match rng.gen_range(0..4) {
            0 => out.push_str("/* block\n comment */ "),
            1 => out.push_str("\t  "),
            _ => {}
        }
        out.push_str(line);
        if rng.gen_bool(0.3) {
            out.push_str(" // trailing ünïcode");
        }
        out.push('\n');
    }
    out
}

#[test]
fn fixtures_round_trip() {
    for p in sol_files(&fixtures_dir()) {
        if p.to_string_lossy().contains("malformed") {
            continue;
        }
        round_trip(&std::fs::read_to_string(&p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_programs_round_trip(seed in 0u64..10_000, trivia in 0u64..1000) {
        round_trip(&with_trivia(&ProgramGen::program(seed), trivia));
    }

    #[test]
    fn parse_is_deterministic(seed in 0u64..10_000) {
        let src = ProgramGen::program(seed);
        prop_assert_eq!(parse_source(&src).unwrap(), parse_source(&src).unwrap());
    }
}

fn expr_children(e: &Expression) -> Vec<&Expression> {
    match &e.kind {
        ExprKind::Identifier(_) | ExprKind::Literal(_) | ExprKind::New(_) | ExprKind::TypeExpr(_) => vec![],
        ExprKind::Binary { lhs, rhs, .. } | ExprKind::Assign { lhs, rhs, .. } => vec![lhs, rhs],
        ExprKind::Unary { operand, .. } => vec![operand],
        ExprKind::Index { base, index } => vec![base, index],
        ExprKind::Member { base, .. } => vec![base],
        ExprKind::Call { callee, args } => std::iter::once(&**callee).chain(args).collect(),
        ExprKind::CallOptions { callee, options } => {
            std::iter::once(&**callee).chain(options.iter().map(|(_, e)| e)).collect()
        }
        ExprKind::Tuple(items) => items.iter().flatten().collect(),
    }
}

fn check_expr(parent: Span, e: &Expression, bad: &mut Vec<String>) {
    if !parent.contains(&e.span) {
        bad.push(format!("expression {:?} outside {parent:?}", e.span));
    }
    for c in expr_children(e) {
        check_expr(e.span, c, bad);
    }
}

fn span_nesting_violations(unit: &SourceUnit) -> Vec<String> {
    let mut bad = Vec::new();
    for c in &unit.contracts {
        if !unit.span.contains(&c.span) {
            bad.push(format!("contract {} outside unit", c.name.name));
        }
        for v in &c.state_vars {
            if !c.span.contains(&v.span) {
                bad.push(format!("state variable {} outside contract", v.name.name));
            }
            if let Some(init) = &v.initializer {
                check_expr(v.span, init, &mut bad);
            }
        }
        let bodies = c
            .functions
            .iter()
            .map(|f| (f.span, f.body.as_ref()))
            .chain(c.modifiers.iter().map(|m| (m.span, Some(&m.body))));
        for (span, body) in bodies {
            if !c.span.contains(&span) {
                bad.push(format!("function at {span:?} outside contract {}", c.name.name));
            }
            let Some(body) = body else { continue };
            if !span.contains(&body.span) {
                bad.push(format!("body at {:?} outside {span:?}", body.span));
            }
            check_block(body.span, &body.statements, &mut bad);
        }
    }
    bad
}

fn check_block(parent: Span, stmts: &[soliscope::frontend::ast::Statement], bad: &mut Vec<String>) {
    for s in stmts {
        if !parent.contains(&s.span) {
            bad.push(format!("statement {:?} outside {parent:?}", s.span));
        }
        for e in s.expressions() {
            check_expr(s.span, e, bad);
        }
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                check_block(s.span, std::slice::from_ref(then_branch), bad);
                if let Some(e) = else_branch {
                    check_block(s.span, std::slice::from_ref(e), bad);
                }
            }
            StmtKind::While { body, .. } => check_block(s.span, std::slice::from_ref(body), bad),
            StmtKind::For { init, body, .. } => {
                if let Some(i) = init {
                    check_block(s.span, std::slice::from_ref(i), bad);
                }
                check_block(s.span, std::slice::from_ref(body), bad);
            }
            StmtKind::Block(b) => check_block(s.span, &b.statements, bad),
            _ => {}
        }
    }
}

#[test]
fn child_spans_lie_within_parents() {
    let mut sources: Vec<String> = (0..40).map(ProgramGen::program).collect();
    for p in sol_files(&fixtures_dir()) {
        if !p.to_string_lossy().contains("malformed") {
            sources.push(std::fs::read_to_string(p).unwrap());
        }
    }
    for src in sources {
        let unit = parse_source(&src).unwrap();
        let bad = span_nesting_violations(&unit);
        assert!(bad.is_empty(), "{bad:?}\n{src}");
    }
}

/// A random hierarchy over `n` contracts: each contract inherits from a
/// random ordered subset of the earlier ones.
fn hierarchy(seed: u64, n: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut bases: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.5)).collect();
            bases.shuffle(&mut rng);
            bases
        })
        .collect()
}

fn hierarchy_source(h: &[Vec<usize>]) -> String {
    let mut out = String::new();
    for (i, bases) in h.iter().enumerate() {
        let list: Vec<String> = bases.iter().map(|b| format!("C{b}")).collect();
        if list.is_empty() {
            out.push_str(&format!("contract C{i} {{ }}\n"));
        } else {
            out.push_str(&format!("contract C{i} is {} {{ }}\n", list.join(", ")));
        }
    }
    out
}

fn ancestors(h: &[Vec<usize>], c: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut work = h[c].clone();
    while let Some(b) = work.pop() {
        if out.insert(b) {
            work.extend(h[b].iter().copied());
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn is_subsequence(sub: &[usize], seq: &[usize]) -> bool {
    let mut it = seq.iter();
    sub.iter().all(|x| it.any(|y| y == x))
}

/// Every order of `c` and its ancestors that puts `c` first, keeps the local
/// precedence order (bases most-derived first, i.e. reversed) and extends the
/// linearization of every direct base.
fn valid_linearizations(h: &[Vec<usize>], c: usize, lin: &BTreeMap<usize, Vec<usize>>) -> Vec<Vec<usize>> {
    let anc: Vec<usize> = ancestors(h, c).into_iter().collect();
    let local: Vec<usize> = h[c].iter().rev().copied().collect();
    permutations(&anc)
        .into_iter()
        .map(|p| std::iter::once(c).chain(p).collect::<Vec<usize>>())
        .filter(|p| is_subsequence(&local, p) && h[c].iter().all(|b| lin.get(b).is_some_and(|l| is_subsequence(l, p))))
        .collect()
}

#[test]
fn linearization_matches_brute_force() {
    let (mut checked, mut rejected) = (0, 0);
    for seed in 0..300 {
        let h = hierarchy(seed, 2 + (seed as usize % 5));
        let mut lin: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        // Each prefix of the hierarchy is a complete source on its own.
        for c in 0..h.len() {
            let src = hierarchy_source(&h[..=c]);
            let valid = valid_linearizations(&h, c, &lin);
            match parse_source(&src).and_then(resolve_inheritance) {
                Ok(unit) => {
                    let got: Vec<usize> = unit.contracts[c]
                        .linearization
                        .iter()
                        .map(|n| n.trim_start_matches('C').parse().unwrap())
                        .collect();
                    assert!(valid.contains(&got), "C{c}: {got:?} not among {valid:?}\n{src}");
                    lin.insert(c, got);
                    checked += 1;
                }
                Err(e) => {
                    assert!(matches!(e, Error::Linearization { .. }), "{e}");
                    assert!(valid.is_empty(), "rejected a linearizable hierarchy\n{src}");
                    rejected += 1;
                    break;
                }
            }
        }
    }
    assert!(checked > 300 && rejected > 0, "{checked} linearized, {rejected} rejected");
}

#[test]
fn linearization_starts_with_self_and_lists_each_base_once() {
    let src = "contract A {} contract B is A {} contract C is A {} contract D is B, C {}";
    let unit = resolve_inheritance(parse_source(src).unwrap()).unwrap();
    assert_eq!(unit.contract("D").unwrap().linearization, ["D", "C", "B", "A"]);
}

#[test]
fn malformed_inputs_are_errors() {
    for src in [
        "contract {",
        "contract C { function f() public { uint x = ; } }",
        "import \"x.sol\"; contract C {}",
        "contract C { function f() public { x = 1 } }",
        "contract C { uint a; } contract C { }",
        "contract C is Missing { }",
        "contract C { string s = \"unterminated; }",
    ] {
        let unit = parse_source(src).and_then(resolve_inheritance);
        assert!(unit.is_err(), "{src}");
    }
}

#[test]
fn tokens_carry_line_and_column() {
    let file = SourceFile::new(FileId(0), "t.sol", "contract C {\n  uint x;\n}");
    let tokens = tokenize(&file).unwrap();
    let x = tokens.iter().find(|t| t.text == "x").unwrap();
    assert_eq!((x.span.line, x.span.col), (2, 8));
}
