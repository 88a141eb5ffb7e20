use crate::cfg::{Cfg, Node, NodeId, NodeKind};
use crate::frontend::ast::*;
use crate::source::Span;

/// A modifier invocation already resolved to its definition.
#[derive(Debug, Clone, Copy)]
pub struct InlinedModifier<'a> {
    pub def: &'a ModifierDef,
    pub args: &'a [Expression],
}

/// Builds the graph of `function` with `modifiers` inlined around its body at
/// each placeholder. Returns `None` for declarations without a body.
pub fn build_cfg(function: &FunctionDef, modifiers: &[InlinedModifier<'_>]) -> Option<Cfg> {
    let body = function.body.as_ref()?;
    let mut b = Builder { nodes: Vec::new(), loops: Vec::new(), exits: Vec::new(), body, modifiers, depth: Vec::new() };
    let entry = b.node(NodeKind::Entry, None, function.name.span);
    let tail = b.body_from(0, vec![entry]);
    if !tail.is_empty() {
        let ret = b.node(NodeKind::Return, None, body.span);
        b.link_all(&tail, ret);
        b.exits.push(ret);
    }
    let cfg = Cfg {
        function: format!("{}.{}", function.contract, function.signature()),
        nodes: b.nodes,
        entry,
        exits: b.exits,
    };
    Some(prune_unreachable(cfg))
}

struct LoopCtx {
    continue_to: NodeId,
    breaks: Vec<NodeId>,
}

struct Builder<'a> {
    nodes: Vec<Node>,
    loops: Vec<LoopCtx>,
    exits: Vec<NodeId>,
    body: &'a Block,
    modifiers: &'a [InlinedModifier<'a>],
    /// Index of the modifier whose body is being expanded, innermost last.
    depth: Vec<usize>,
}

impl<'a> Builder<'a> {
    fn node(&mut self, kind: NodeKind, expression: Option<Expression>, span: Span) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node { id, kind, expression, span, sons: Vec::new(), fathers: Vec::new(), irs: Vec::new() });
        id
    }

    fn link(&mut self, from: NodeId, to: NodeId) {
        self.nodes[from.0].sons.push(to);
        self.nodes[to.0].fathers.push(from);
    }

    fn link_all(&mut self, from: &[NodeId], to: NodeId) {
        for &f in from {
            self.link(f, to);
        }
    }

    /// Body with modifiers `idx..` wrapped around it.
    fn body_from(&mut self, idx: usize, preds: Vec<NodeId>) -> Vec<NodeId> {
        if idx == self.modifiers.len() {
            let body = self.body;
            return self.stmts(&body.statements, preds);
        }
        let m = self.modifiers[idx];
        let mut preds = preds;
        for (param, arg) in m.def.params.iter().zip(m.args) {
            let Some(name) = &param.name else { continue };
            let lhs = Expression { kind: ExprKind::Identifier(name.name.clone()), span: name.span };
            let expr = Expression {
                kind: ExprKind::Assign { op: None, lhs: Box::new(lhs), rhs: Box::new(arg.clone()) },
                span: arg.span,
            };
            let n = self.node(NodeKind::Expression, Some(expr), arg.span);
            self.link_all(&preds, n);
            preds = vec![n];
        }
        self.depth.push(idx);
        let exits = self.stmts(&m.def.body.statements, preds);
        self.depth.pop();
        exits
    }

    fn stmts(&mut self, stmts: &[Statement], mut preds: Vec<NodeId>) -> Vec<NodeId> {
        for s in stmts {
            if preds.is_empty() {
                break;
            }
            preds = self.stmt(s, preds);
        }
        preds
    }

    fn simple(&mut self, kind: NodeKind, expr: Option<Expression>, span: Span, preds: &[NodeId]) -> NodeId {
        let n = self.node(kind, expr, span);
        self.link_all(preds, n);
        n
    }

    fn stmt(&mut self, s: &Statement, preds: Vec<NodeId>) -> Vec<NodeId> {
        match &s.kind {
            StmtKind::VarDecl { decls, init } => {
                let expr = init.as_ref().map(|init| declaration_assignment(decls, init));
                vec![self.simple(NodeKind::Expression, expr, s.span, &preds)]
            }
            StmtKind::Expr(e) => {
                let callee = call_target(e);
                if matches!(callee, Some("revert")) {
                    let n = self.simple(NodeKind::Throw, Some(e.clone()), s.span, &preds);
                    self.exits.push(n);
                    Vec::new()
                } else if matches!(callee, Some("selfdestruct") | Some("suicide")) {
                    let n = self.simple(NodeKind::Expression, Some(e.clone()), s.span, &preds);
                    self.exits.push(n);
                    Vec::new()
                } else {
                    vec![self.simple(NodeKind::Expression, Some(e.clone()), s.span, &preds)]
                }
            }
            StmtKind::Emit(e) => vec![self.simple(NodeKind::Expression, Some(e.clone()), s.span, &preds)],
            StmtKind::If { cond, then_branch, else_branch } => {
                let cond_node = self.simple(NodeKind::If, Some(cond.clone()), s.span, &preds);
                let mut tails = self.stmt(then_branch, vec![cond_node]);
                match else_branch {
                    Some(e) => tails.extend(self.stmt(e, vec![cond_node])),
                    None => tails.push(cond_node),
                }
                if tails.is_empty() {
                    return Vec::new();
                }
                let end = self.node(NodeKind::EndIf, None, s.span);
                self.link_all(&tails, end);
                vec![end]
            }
            StmtKind::While { cond, body } => self.looping(Some(cond), None, body, s.span, preds),
            StmtKind::For { init, cond, post, body } => {
                let preds = match init {
                    Some(i) => self.stmt(i, preds),
                    None => preds,
                };
                self.looping(cond.as_ref(), post.as_ref(), body, s.span, preds)
            }
            StmtKind::Return(e) => {
                let n = self.simple(NodeKind::Return, e.clone(), s.span, &preds);
                self.exits.push(n);
                Vec::new()
            }
            StmtKind::Throw => {
                let n = self.simple(NodeKind::Throw, None, s.span, &preds);
                self.exits.push(n);
                Vec::new()
            }
            StmtKind::Break => {
                if let Some(l) = self.loops.last_mut() {
                    l.breaks.extend(preds);
                }
                Vec::new()
            }
            StmtKind::Continue => {
                if let Some(target) = self.loops.last().map(|l| l.continue_to) {
                    self.link_all(&preds, target);
                }
                Vec::new()
            }
            StmtKind::Block(b) => self.stmts(&b.statements, preds),
            StmtKind::Placeholder => {
                let ph = self.simple(NodeKind::Placeholder, None, s.span, &preds);
                match self.depth.last().copied() {
                    Some(idx) => {
                        // The wrapped body sees the modifiers outside this one.
                        let saved = self.depth.pop();
                        let out = self.body_from(idx + 1, vec![ph]);
                        if let Some(d) = saved {
                            self.depth.push(d);
                        }
                        out
                    }
                    None => vec![ph],
                }
            }
        }
    }

    fn looping(
        &mut self,
        cond: Option<&Expression>,
        post: Option<&Expression>,
        body: &Statement,
        span: Span,
        preds: Vec<NodeId>,
    ) -> Vec<NodeId> {
        let header = self.simple(NodeKind::LoopHeader, cond.cloned(), span, &preds);
        let post_node = post.map(|p| self.node(NodeKind::Expression, Some(p.clone()), p.span));
        let continue_to = post_node.unwrap_or(header);
        self.loops.push(LoopCtx { continue_to, breaks: Vec::new() });
        let tails = self.stmt(body, vec![header]);
        let ctx = self.loops.pop().expect("pushed above");
        match post_node {
            Some(p) => {
                self.link_all(&tails, p);
                self.link(p, header);
            }
            None => self.link_all(&tails, header),
        }
        let end = self.node(NodeKind::LoopEnd, None, span);
        self.link(header, end);
        self.link_all(&ctx.breaks, end);
        vec![end]
    }
}

/// `T x = init` becomes `x = init`; tuple declarations become tuple assignments.
fn declaration_assignment(decls: &[Option<VariableDecl>], init: &Expression) -> Expression {
    let ident = |d: &VariableDecl| Expression { kind: ExprKind::Identifier(d.name.name.clone()), span: d.name.span };
    let lhs = if decls.len() == 1 {
        let d = decls[0].as_ref().expect("single declaration present");
        ident(d)
    } else {
        let items = decls.iter().map(|d| d.as_ref().map(ident)).collect();
        let span = decls.iter().flatten().map(|d| d.name.span).reduce(Span::to).unwrap_or(init.span);
        Expression { kind: ExprKind::Tuple(items), span }
    };
    let span = lhs.span.to(init.span);
    Expression { kind: ExprKind::Assign { op: None, lhs: Box::new(lhs), rhs: Box::new(init.clone()) }, span }
}

fn call_target(e: &Expression) -> Option<&str> {
    match &e.kind {
        ExprKind::Call { callee, .. } => match &callee.kind {
            ExprKind::Identifier(n) => Some(n.as_str()),
            _ => None,
        },
        _ => None,
    }
}

/// Drops nodes unreachable from the entry and renumbers the rest densely.
fn prune_unreachable(cfg: Cfg) -> Cfg {
    let mut reachable = vec![false; cfg.nodes.len()];
    let mut stack = vec![cfg.entry];
    while let Some(n) = stack.pop() {
        if std::mem::replace(&mut reachable[n.0], true) {
            continue;
        }
        stack.extend(cfg.nodes[n.0].sons.iter().copied());
    }
    if reachable.iter().all(|r| *r) {
        return cfg;
    }
    let mut remap = vec![None; cfg.nodes.len()];
    let mut next = 0;
    for (i, r) in reachable.iter().enumerate() {
        if *r {
            remap[i] = Some(NodeId(next));
            next += 1;
        }
    }
    let map = |ids: &[NodeId]| ids.iter().filter_map(|n| remap[n.0]).collect::<Vec<_>>();
    let nodes = cfg
        .nodes
        .into_iter()
        .filter(|n| reachable[n.id.0])
        .map(|n| Node { id: remap[n.id.0].expect("reachable"), sons: map(&n.sons), fathers: map(&n.fathers), ..n })
        .collect();
    Cfg { function: cfg.function, nodes, entry: remap[cfg.entry.0].expect("entry"), exits: map(&cfg.exits) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;

    fn cfg_of(body: &str) -> Cfg {
        let unit = parse_source(&format!("contract C {{ uint x; function f(bool c) public {{ {body} }} }}")).unwrap();
        build_cfg(&unit.contracts[0].functions[0], &[]).unwrap()
    }

    fn kinds(cfg: &Cfg) -> Vec<NodeKind> {
        cfg.nodes.iter().map(|n| n.kind).collect()
    }

    #[test]
    fn straight_line() {
        let cfg = cfg_of("x = 1;");
        assert_eq!(kinds(&cfg), [NodeKind::Entry, NodeKind::Expression, NodeKind::Return]);
        assert_eq!(cfg.exits, [NodeId(2)]);
        assert_eq!(cfg.cyclomatic_complexity(), 1);
    }

    #[test]
    fn if_else_diamond() {
        let cfg = cfg_of("if (c) { x = 1; } else { x = 2; }");
        assert_eq!(cfg.nodes.len(), 6);
        let if_node = cfg.nodes.iter().find(|n| n.kind == NodeKind::If).unwrap();
        assert_eq!(if_node.sons.len(), 2);
        let end = cfg.nodes.iter().find(|n| n.kind == NodeKind::EndIf).unwrap();
        assert_eq!(end.fathers.len(), 2);
        assert_eq!(cfg.cyclomatic_complexity(), 2);
    }

    #[test]
    fn empty_body() {
        let cfg = cfg_of("");
        assert_eq!(kinds(&cfg), [NodeKind::Entry, NodeKind::Return]);
    }

    #[test]
    fn while_loop_back_edge() {
        let cfg = cfg_of("while (c) { x = 1; }");
        let header = cfg.nodes.iter().find(|n| n.kind == NodeKind::LoopHeader).unwrap();
        assert_eq!(header.sons.len(), 2);
        assert_eq!(header.fathers.len(), 2);
        assert_eq!(cfg.cyclomatic_complexity(), 2);
    }

    #[test]
    fn for_loop_with_break_and_continue() {
        let cfg = cfg_of("for (uint i = 0; i < 10; i += 1) { if (c) { break; } if (!c) { continue; } x = i; }");
        let post = cfg
            .nodes
            .iter()
            .find(|n| n.expression.as_ref().is_some_and(|e| matches!(e.kind, ExprKind::Assign { op: Some(_), .. })))
            .unwrap();
        assert_eq!(post.sons.len(), 1);
        let end = cfg.nodes.iter().find(|n| n.kind == NodeKind::LoopEnd).unwrap();
        assert_eq!(end.fathers.len(), 2);
    }

    #[test]
    fn dead_code_after_return_is_dropped() {
        let cfg = cfg_of("return; x = 1;");
        assert_eq!(kinds(&cfg), [NodeKind::Entry, NodeKind::Return]);
    }

    #[test]
    fn both_arms_return() {
        let cfg = cfg_of("if (c) { return; } else { throw; }");
        assert!(!cfg.nodes.iter().any(|n| n.kind == NodeKind::EndIf));
        assert_eq!(cfg.exits.len(), 2);
        assert!(cfg.nodes.iter().filter(|n| !cfg.exits.contains(&n.id)).all(|n| !n.sons.is_empty()));
    }

    #[test]
    fn modifier_inlined_at_placeholder() {
        let unit = parse_source(
            "contract C { address owner; uint x;
               modifier only(address a) { require(msg.sender == a); _; }
               function f() public only(owner) { x = 1; } }",
        )
        .unwrap();
        let c = &unit.contracts[0];
        let m = [InlinedModifier { def: &c.modifiers[0], args: &c.functions[0].modifiers[0].args }];
        let cfg = build_cfg(&c.functions[0], &m).unwrap();
        assert_eq!(
            kinds(&cfg),
            [
                NodeKind::Entry,
                NodeKind::Expression, // a = owner
                NodeKind::Expression, // require
                NodeKind::Placeholder,
                NodeKind::Expression, // x = 1
                NodeKind::Return
            ]
        );
    }
}
