mod common;

use std::collections::BTreeSet;

use common::{fixture, fixtures_dir, sol_files, ProgramGen};
use graphviz_rust::dot_structures::{EdgeTy, Graph, Id, Stmt, Vertex};
use soliscope::detectors::run_detectors;
use soliscope::printers::{run_printer, OutputFormat, PrinterOutput, PRINTERS};
use soliscope::{analyze_source, SourceAnalysis};

fn id_text(id: &Id) -> String {
    let s = match id {
        Id::Html(s) | Id::Escaped(s) | Id::Plain(s) | Id::Anonymous(s) => s,
    };
    s.trim_matches('"').to_string()
}

fn vertex(v: &Vertex) -> String {
    match v {
        Vertex::N(n) => id_text(&n.0),
        Vertex::S(_) => panic!("subgraph vertex"),
    }
}

/// Nodes and edges of a DOT digraph, parsed with an independent DOT grammar.
fn parse_digraph(body: &str) -> (BTreeSet<String>, Vec<(String, String)>) {
    let g = graphviz_rust::parse(body).unwrap_or_else(|e| panic!("invalid DOT: {e}\n{body}"));
    let Graph::DiGraph { stmts, .. } = g else { panic!("not a digraph") };
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    for s in stmts {
        match s {
            Stmt::Node(n) => {
                nodes.insert(id_text(&n.id.0));
            }
            Stmt::Edge(e) => match e.ty {
                EdgeTy::Pair(a, b) => edges.push((vertex(&a), vertex(&b))),
                EdgeTy::Chain(vs) => {
                    for w in vs.windows(2) {
                        edges.push((vertex(&w[0]), vertex(&w[1])));
                    }
                }
            },
            _ => {}
        }
    }
    (nodes, edges)
}

fn print(a: &SourceAnalysis, id: &str) -> Vec<PrinterOutput> {
    run_printer(id, a, &run_detectors(a)).unwrap()
}

fn text(src: &str, id: &str) -> String {
    let a = analyze_source(src).unwrap();
    print(&a, id).into_iter().map(|o| o.body).collect()
}

fn corpus() -> Vec<String> {
    let mut out: Vec<String> = sol_files(&fixtures_dir())
        .into_iter()
        .filter(|p| !p.to_string_lossy().contains("malformed"))
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect();
    out.extend((0..20).map(ProgramGen::program));
    out
}

#[test]
fn every_dot_output_parses() {
    let mut graphs = 0;
    for src in corpus() {
        let a = analyze_source(&src).unwrap();
        for id in PRINTERS {
            for out in print(&a, id) {
                if out.format == OutputFormat::Dot {
                    let (nodes, edges) = parse_digraph(&out.body);
                    for (x, y) in &edges {
                        assert!(
                            nodes.contains(x) && nodes.contains(y),
                            "{}: edge {x} -> {y} to undeclared node",
                            out.name
                        );
                    }
                    graphs += 1;
                }
            }
        }
    }
    assert!(graphs > 100);
}

#[test]
fn printers_are_byte_stable() {
    for src in corpus().into_iter().take(30) {
        let a = analyze_source(&src).unwrap();
        let b = analyze_source(&src).unwrap();
        for id in PRINTERS {
            assert_eq!(print(&a, id), print(&b, id), "{id}");
        }
    }
}

#[test]
fn unknown_printer_is_none() {
    let a = analyze_source("contract C {}").unwrap();
    assert!(run_printer("nope", &a, &[]).is_none());
}

#[test]
fn inheritance_graph_shapes() {
    let (nodes, edges) = parse_digraph(&text("contract A {} contract B {} contract C is A, B {}", "inheritance-graph"));
    assert_eq!(nodes.len(), 3);
    assert_eq!(
        edges.into_iter().collect::<BTreeSet<_>>(),
        BTreeSet::from([("C".into(), "A".into()), ("C".into(), "B".into())])
    );

    let (nodes, edges) = parse_digraph(&text("contract A {}", "inheritance-graph"));
    assert_eq!((nodes.len(), edges.len()), (1, 0));

    let diamond = "contract A {} contract B is A {} contract C is A {} contract D is B, C {}";
    let (nodes, edges) = parse_digraph(&text(diamond, "inheritance-graph"));
    assert_eq!((nodes.len(), edges.len()), (4, 4));
}

#[test]
fn call_graph_edges() {
    let (_, edges) = parse_digraph(&text(&fixture("safemath_transfer.sol"), "call-graph"));
    let edges: BTreeSet<(String, String)> = edges.into_iter().collect();
    let from = "Token.transfer(address,uint256)".to_string();
    assert!(edges.contains(&(from.clone(), "SafeMath.sub(uint256,uint256)".into())));
    assert!(edges.contains(&(from, "SafeMath.add(uint256,uint256)".into())));

    let (nodes, edges) =
        parse_digraph(&text("contract C { function f() public {} function g() public {} }", "call-graph"));
    assert_eq!((nodes.len(), edges.len()), (2, 0));

    let rec = "contract C { function f(uint n) public { if (n > 0) { f(n - 1); } } }";
    let (_, edges) = parse_digraph(&text(rec, "call-graph"));
    assert_eq!(edges, [("C.f(uint256)".to_string(), "C.f(uint256)".to_string())]);
}

#[test]
fn cfg_graph_per_function() {
    let a = analyze_source(&fixture("storage_alias.sol")).unwrap();
    let outs = print(&a, "cfg");
    assert_eq!(outs.len(), 1);
    let f = a.contracts[0].function("increase").unwrap();
    let (nodes, edges) = parse_digraph(&outs[0].body);
    assert_eq!(nodes.len(), f.cfg.nodes.len());
    assert_eq!(edges.len(), f.cfg.edge_count());
    assert!(outs[0].name.chars().all(|c| c.is_ascii_alphanumeric() || "-_".contains(c)), "{}", outs[0].name);
}

#[test]
fn function_summary_rows() {
    let out = text(&fixture("safemath_transfer.sol"), "function-summary");
    let row = out.lines().find(|l| l.contains("transfer(address,uint256)")).unwrap();
    let cells: Vec<&str> = row.split('|').map(str::trim).collect();
    assert!(cells.contains(&"public"));
    assert!(cells.contains(&"reads: balances"));
    assert!(cells.contains(&"writes: balances"));

    let out =
        text("contract C { uint x; function get() public view returns (uint) { return x; } }", "function-summary");
    assert!(out.lines().any(|l| l.contains("get()") && l.contains("view")));

    let out = text("contract C {}", "function-summary");
    assert_eq!(out.lines().filter(|l| l.starts_with('|')).count(), 2, "{out}");
}

#[test]
fn vars_and_auth_rows() {
    let src = "contract C {
        address owner;
        constructor() public { owner = msg.sender; }
        function setOwner(address o) public { require(msg.sender == owner); owner = o; }
        function open() public {}
    }";
    let out = text(src, "vars-and-auth");
    let rows: Vec<Vec<String>> = out
        .lines()
        .filter(|l| l.starts_with('|') && !l.contains("---") && !l.contains("Guard"))
        .map(|l| l.split('|').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect())
        .collect();
    assert!(rows.contains(&vec!["setOwner(address)".into(), "msg.sender==owner".into(), "owner".into()]), "{rows:?}");
    assert!(rows.iter().any(|r| r[0] == "constructor()" && r[2] == "owner"));
    assert!(!rows.iter().any(|r| r[0].starts_with("open")));

    let out = text("contract C { uint x; function f() public { x = 1; } }", "vars-and-auth");
    assert_eq!(out.lines().filter(|l| l.starts_with('|')).count(), 2, "{out}");
}

#[test]
fn human_summary_complexity_and_minting() {
    let src = "contract C {
        uint x;
        function straight() public { x = 1; }
        function branch(bool b) public { if (b) { x = 2; } }
    }";
    let out = text(src, "human-summary");
    assert!(out.contains("| straight() | 1 |"), "{out}");
    assert!(out.contains("| branch(bool) | 2 |"), "{out}");
    assert!(out.contains("| **total** | 3 |"), "{out}");

    let token = fixture("token.sol");
    let out = text(&token, "human-summary");
    assert!(out.contains("- ERC20 token: yes"));
    assert!(out.contains("Minting restricted: mint(address,uint256)"), "{out}");

    let open = token.replace("public onlyOwner", "public");
    let out = text(&open, "human-summary");
    assert!(out.contains("Minting unrestricted: anyone can call mint(address,uint256)"), "{out}");
}

#[test]
fn human_summary_counts_findings() {
    let out = text(&fixture("withdraw_reentrancy.sol"), "human-summary");
    assert!(out.contains("| High | 1 |"), "{out}");
}

#[test]
fn slithir_printers() {
    let out = text(&fixture("safemath_transfer.sol"), "slithir");
    assert!(out.contains("TMP_0(uint256) = LIB_CALL SafeMath.sub(REF_1, val)"));
    let out = text(&fixture("withdraw_reentrancy.sol"), "slithir-ssa");
    assert!(out.contains(":= ϕ(entry)"));
    assert!(out.contains("after call"));
}
