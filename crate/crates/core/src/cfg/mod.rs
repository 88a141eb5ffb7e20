//! Per-function control-flow graphs. Every node holds at most one source
//! expression; the lowered instructions for that expression live in `irs`.

mod build;
mod dominators;

use std::fmt;

pub use build::{build_cfg, InlinedModifier};
pub use dominators::{compute_dominators, DomInfo};

use crate::frontend::ast::Expression;
use crate::ir::Instruction;
use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Entry,
    Expression,
    If,
    EndIf,
    LoopHeader,
    LoopEnd,
    Return,
    Throw,
    Placeholder,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Entry => "ENTRY",
            NodeKind::Expression => "EXPRESSION",
            NodeKind::If => "IF",
            NodeKind::EndIf => "END_IF",
            NodeKind::LoopHeader => "LOOP_HEADER",
            NodeKind::LoopEnd => "LOOP_END",
            NodeKind::Return => "RETURN",
            NodeKind::Throw => "THROW",
            NodeKind::Placeholder => "PLACEHOLDER",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub expression: Option<Expression>,
    pub span: Span,
    pub sons: Vec<NodeId>,
    pub fathers: Vec<NodeId>,
    pub irs: Vec<Instruction>,
}

#[derive(Debug, Clone)]
pub struct Cfg {
    /// `Contract.signature` of the function this graph belongs to.
    pub function: String,
    pub nodes: Vec<Node>,
    pub entry: NodeId,
    pub exits: Vec<NodeId>,
}

impl Cfg {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.nodes.iter().map(|n| n.sons.iter().map(|s| s.0).collect()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.sons.len()).sum()
    }

    /// Cyclomatic complexity `E - N + 2`, computed with every exit joined to a
    /// single virtual exit so that early returns count as decisions.
    pub fn cyclomatic_complexity(&self) -> usize {
        let exits = self.exits.len().max(1);
        let e = self.edge_count() + exits;
        let n = self.nodes.len() + 1;
        (e + 2).saturating_sub(n)
    }

    /// Nodes in reverse postorder from the entry.
    pub fn reverse_postorder(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut post = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.entry, 0usize)];
        seen[self.entry.0] = true;
        while let Some((n, i)) = stack.pop() {
            let sons = &self.nodes[n.0].sons;
            if i < sons.len() {
                stack.push((n, i + 1));
                let s = sons[i];
                if !seen[s.0] {
                    seen[s.0] = true;
                    stack.push((s, 0));
                }
            } else {
                post.push(n);
            }
        }
        post.reverse();
        post
    }
}
