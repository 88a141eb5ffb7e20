mod common;

use std::collections::BTreeSet;

use common::{fixtures_dir, sol_files, ProgramGen};
use proptest::prelude::*;
use soliscope::cfg::{DomInfo, NodeId, NodeKind};
use soliscope::{analyze_source, FunctionModel};

/// `dom[n]`: nodes lying on every simple path from `entry` to `n`, or `None`
/// when `n` is unreachable.
fn dominators_by_paths(entry: usize, succs: &[Vec<usize>]) -> Vec<Option<BTreeSet<usize>>> {
    let n = succs.len();
    let mut dom: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    let mut path = vec![entry];
    let mut on_path = vec![false; n];
    on_path[entry] = true;
    fn walk(
        u: usize,
        succs: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        dom: &mut [Option<BTreeSet<usize>>],
    ) {
        let here: BTreeSet<usize> = path.iter().copied().collect();
        dom[u] = Some(match dom[u].take() {
            None => here,
            Some(d) => d.intersection(&here).copied().collect(),
        });
        for &v in &succs[u] {
            if !on_path[v] {
                on_path[v] = true;
                path.push(v);
                walk(v, succs, path, on_path, dom);
                path.pop();
                on_path[v] = false;
            }
        }
    }
    walk(entry, succs, &mut path, &mut on_path, &mut dom);
    dom
}

fn check_dominators(entry: usize, succs: &[Vec<usize>]) {
    let info = DomInfo::from_successors(entry, succs);
    let oracle = dominators_by_paths(entry, succs);
    for (n, want) in oracle.iter().enumerate() {
        match want {
            None => assert!(info.idom[n].is_none(), "unreachable {n} has an idom"),
            Some(want) => {
                let got: BTreeSet<usize> = info.dominators_of(NodeId(n)).into_iter().map(|d| d.0).collect();
                assert_eq!(&got, want, "dominators of {n} in {succs:?}");
            }
        }
    }
}

fn all_functions(src: &str) -> Vec<FunctionModel> {
    let a = analyze_source(src).unwrap();
    a.contracts.into_iter().flat_map(|c| c.functions).collect()
}

fn corpus() -> Vec<String> {
    let mut out: Vec<String> = sol_files(&fixtures_dir())
        .into_iter()
        .filter(|p| !p.to_string_lossy().contains("malformed"))
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect();
    out.extend((0..60).map(ProgramGen::program));
    out
}

#[test]
fn dominators_match_path_enumeration_on_small_cfgs() {
    let mut checked = 0;
    for src in corpus() {
        for f in all_functions(&src) {
            if f.cfg.nodes.len() <= 12 {
                check_dominators(f.cfg.entry.0, &f.cfg.successors());
                checked += 1;
            }
        }
    }
    assert!(checked >= 100, "only {checked} graphs");
}

fn graph() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (2usize..=12).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0..n, 0..3), n))
}

proptest! {
    #[test]
    fn dominators_match_path_enumeration_on_random_graphs(succs in graph()) {
        check_dominators(0, &succs);
    }
}

#[test]
fn entry_dominates_and_idom_forms_a_tree() {
    for src in corpus() {
        for f in all_functions(&src) {
            let dom = &f.dom;
            assert_eq!(dom.idom[f.cfg.entry.0], None);
            assert_eq!(dom.dominators_of(f.cfg.entry), BTreeSet::from([f.cfg.entry]));
            for n in 0..f.cfg.nodes.len() {
                assert!(dom.dominates(f.cfg.entry, NodeId(n)), "{}: entry does not dominate {n}", f.key);
                // Walking idoms terminates at the entry.
                let mut cur = NodeId(n);
                let mut steps = 0;
                while let Some(p) = dom.idom(cur) {
                    cur = p;
                    steps += 1;
                    assert!(steps <= f.cfg.nodes.len(), "{}: idom cycle", f.key);
                }
                assert_eq!(cur, f.cfg.entry);
            }
        }
    }
}

#[test]
fn graph_shape_invariants() {
    for src in corpus() {
        for f in all_functions(&src) {
            let cfg = &f.cfg;
            assert!(cfg.node(cfg.entry).fathers.is_empty(), "{}: entry has predecessors", f.key);
            let reached: BTreeSet<NodeId> = cfg.reverse_postorder().into_iter().collect();
            assert_eq!(reached.len(), cfg.nodes.len(), "{}: unreachable nodes", f.key);
            for node in &cfg.nodes {
                if node.kind == NodeKind::If || node.kind == NodeKind::LoopHeader {
                    assert_eq!(node.sons.len(), 2, "{}: node {} has {:?}", f.key, node.id, node.sons);
                }
                if !cfg.exits.contains(&node.id) {
                    assert!(!node.sons.is_empty(), "{}: dead end at {}", f.key, node.id);
                }
                for s in &node.sons {
                    assert!(cfg.node(*s).fathers.contains(&node.id));
                }
            }
        }
    }
}

fn decisions(f: &FunctionModel) -> usize {
    f.cfg.nodes.iter().filter(|n| matches!(n.kind, NodeKind::If | NodeKind::LoopHeader)).count()
}

#[test]
fn complexity_is_decisions_plus_one() {
    for src in corpus() {
        for f in all_functions(&src) {
            assert_eq!(f.cfg.cyclomatic_complexity(), decisions(&f) + 1, "{}\n{src}", f.key);
        }
    }
}

#[test]
fn complexity_of_known_shapes() {
    let src = "contract C {
        uint x;
        function straight() public { x = 1; }
        function branch(bool b) public { if (b) { x = 1; } else { x = 2; } }
        function early(bool b) public returns (uint) { if (b) { return 1; } return 2; }
        function loops(uint n) public {
            for (uint i = 0; i < n; i += 1) { if (i == 3) { x = i; } }
            while (x < 10) { x += 1; }
        }
    }";
    let a = analyze_source(src).unwrap();
    let c = &a.contracts[0];
    let cc = |name: &str| c.function(name).unwrap().cfg.cyclomatic_complexity();
    assert_eq!(cc("straight"), 1);
    assert_eq!(cc("branch"), 2);
    assert_eq!(cc("early"), 2);
    assert_eq!(cc("loops"), 4);
}
