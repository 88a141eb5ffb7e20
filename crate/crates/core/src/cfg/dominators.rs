//! Immediate dominators by the iterative reverse-postorder algorithm of
//! Cooper, Harvey and Kennedy, and dominance frontiers from the idom tree.

use std::collections::BTreeSet;

use crate::cfg::{Cfg, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomInfo {
    pub entry: NodeId,
    /// `idom[n]`; `None` for the entry and for nodes unreachable from it.
    pub idom: Vec<Option<NodeId>>,
    pub frontier: Vec<BTreeSet<NodeId>>,
    /// Dominator-tree children, in increasing id order.
    pub children: Vec<Vec<NodeId>>,
}

pub fn compute_dominators(cfg: &Cfg) -> DomInfo {
    DomInfo::from_successors(cfg.entry.0, &cfg.successors())
}

impl DomInfo {
    /// Computes dominator information for an arbitrary graph given as successor lists.
    pub fn from_successors(entry: usize, succs: &[Vec<usize>]) -> DomInfo {
        let n = succs.len();
        let mut preds = vec![Vec::new(); n];
        for (a, ss) in succs.iter().enumerate() {
            for &b in ss {
                if !preds[b].contains(&a) {
                    preds[b].push(a);
                }
            }
        }

        let rpo = reverse_postorder(entry, succs);
        let mut order = vec![usize::MAX; n];
        for (i, &b) in rpo.iter().enumerate() {
            order[b] = i;
        }

        let mut idom: Vec<Option<usize>> = vec![None; n];
        idom[entry] = Some(entry);
        let mut changed = true;
        while changed {
            changed = false;
            for &b in rpo.iter().skip(1) {
                let mut new_idom = None;
                for &p in &preds[b] {
                    if idom[p].is_none() {
                        continue;
                    }
                    new_idom = Some(match new_idom {
                        None => p,
                        Some(cur) => intersect(&idom, &order, p, cur),
                    });
                }
                if new_idom.is_some() && idom[b] != new_idom {
                    idom[b] = new_idom;
                    changed = true;
                }
            }
        }

        let mut frontier = vec![BTreeSet::new(); n];
        for b in 0..n {
            if idom[b].is_none() || preds[b].len() < 2 {
                continue;
            }
            let stop = idom[b].expect("reachable");
            for &p in &preds[b] {
                if idom[p].is_none() {
                    continue;
                }
                let mut runner = p;
                while runner != stop {
                    frontier[runner].insert(NodeId(b));
                    runner = idom[runner].expect("reachable");
                }
            }
        }

        let mut children = vec![Vec::new(); n];
        let idom: Vec<Option<NodeId>> = idom
            .iter()
            .enumerate()
            .map(|(b, d)| match d {
                Some(d) if b != entry => Some(NodeId(*d)),
                _ => None,
            })
            .collect();
        for (b, d) in idom.iter().enumerate() {
            if let Some(d) = d {
                children[d.0].push(NodeId(b));
            }
        }
        DomInfo { entry: NodeId(entry), idom, frontier, children }
    }

    pub fn idom(&self, n: NodeId) -> Option<NodeId> {
        self.idom[n.0]
    }

    /// Whether `a` dominates `b` (reflexive).
    pub fn dominates(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.idom[c.0];
        }
        false
    }

    /// The set of dominators of `n`, including `n`.
    pub fn dominators_of(&self, n: NodeId) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        let mut cur = Some(n);
        while let Some(c) = cur {
            out.insert(c);
            cur = self.idom[c.0];
        }
        out
    }

    /// Iterated dominance frontier of a set of nodes.
    pub fn iterated_frontier(&self, nodes: impl IntoIterator<Item = NodeId>) -> BTreeSet<NodeId> {
        let mut result = BTreeSet::new();
        let mut work: Vec<NodeId> = nodes.into_iter().collect();
        while let Some(n) = work.pop() {
            for &f in &self.frontier[n.0] {
                if result.insert(f) {
                    work.push(f);
                }
            }
        }
        result
    }
}

fn intersect(idom: &[Option<usize>], order: &[usize], mut a: usize, mut b: usize) -> usize {
    while a != b {
        while order[a] > order[b] {
            a = idom[a].expect("processed");
        }
        while order[b] > order[a] {
            b = idom[b].expect("processed");
        }
    }
    a
}

fn reverse_postorder(entry: usize, succs: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = vec![false; succs.len()];
    let mut post = Vec::new();
    let mut stack = vec![(entry, 0usize)];
    seen[entry] = true;
    while let Some((n, i)) = stack.pop() {
        if i < succs[n].len() {
            stack.push((n, i + 1));
            let s = succs[n][i];
            if !seen[s] {
                seen[s] = true;
                stack.push((s, 0));
            }
        } else {
            post.push(n);
        }
    }
    post.reverse();
    post
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[usize]) -> BTreeSet<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn straight_line() {
        let d = DomInfo::from_successors(0, &[vec![1], vec![2], vec![]]);
        assert_eq!(d.idom(NodeId(2)), Some(NodeId(1)));
        assert_eq!(d.idom(NodeId(1)), Some(NodeId(0)));
        assert_eq!(d.idom(NodeId(0)), None);
        assert!(d.frontier.iter().all(|f| f.is_empty()));
    }

    #[test]
    fn diamond() {
        let d = DomInfo::from_successors(0, &[vec![1, 2], vec![3], vec![3], vec![]]);
        assert_eq!(d.frontier[1], ids(&[3]));
        assert_eq!(d.frontier[2], ids(&[3]));
        assert_eq!(d.idom(NodeId(3)), Some(NodeId(0)));
        assert_eq!(d.dominators_of(NodeId(0)), ids(&[0]));
    }

    #[test]
    fn loop_header_in_own_frontier() {
        // 0 -> 1 (header) -> 2 (body) -> 1, 1 -> 3
        let d = DomInfo::from_successors(0, &[vec![1], vec![2, 3], vec![1], vec![]]);
        assert_eq!(d.frontier[2], ids(&[1]));
        assert_eq!(d.frontier[1], ids(&[1]));
        assert_eq!(d.iterated_frontier([NodeId(2)]), ids(&[1]));
    }
}
