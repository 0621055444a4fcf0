use std::collections::BTreeSet;

use crate::error::{FoddError, Result};
use crate::label::Label;
use crate::pool::{Fodd, NodeView, Pool};
use crate::term::Term;

/// A signed occurrence of a label on a path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub label: Label,
    pub positive: bool,
}

impl Literal {
    pub fn pos(label: Label) -> Self {
        Literal {
            label,
            positive: true,
        }
    }

    pub fn neg(label: Label) -> Self {
        Literal {
            label,
            positive: false,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            label: self.label.clone(),
            positive: !self.positive,
        }
    }
}

/// One root-to-target path as the conjunction of its signed labels, in
/// diagram order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFormula(pub Vec<Literal>);

impl PathFormula {
    pub fn variables(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for lit in &self.0 {
            for t in lit.label.terms() {
                if t.is_variable() {
                    out.insert(t.clone());
                }
            }
        }
        out
    }
}

/// An edge: a parent node plus the branch flag (`true` for the true child).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeRef {
    pub source: Fodd,
    pub branch: bool,
}

impl EdgeRef {
    pub fn target(&self, pool: &Pool) -> Fodd {
        if self.branch {
            pool.hi(self.source)
        } else {
            pool.lo(self.source)
        }
    }

    pub fn sibling(&self) -> EdgeRef {
        EdgeRef {
            source: self.source,
            branch: !self.branch,
        }
    }
}

/// Target of a path query: a node or an edge.
#[derive(Debug, Clone, Copy)]
pub enum PathTarget {
    Node(Fodd),
    Edge(EdgeRef),
}

impl Pool {
    /// All root-to-target paths (the DNF of the node or edge formula).
    /// The number of paths is capped; exceeding the cap is an explicit
    /// signal and callers skip the dependent reduction, which is sound.
    pub fn path_formulas(&self, root: Fodd, target: PathTarget) -> Result<Vec<PathFormula>> {
        let (node, extra) = match target {
            PathTarget::Node(n) => (n, None),
            PathTarget::Edge(e) => {
                let lit = Literal {
                    label: self
                        .label(e.source)
                        .ok_or_else(|| FoddError::Other("edge source is a leaf".into()))?
                        .clone(),
                    positive: e.branch,
                };
                (e.source, Some(lit))
            }
        };
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_paths(root, node, &mut prefix, &mut out)?;
        if let Some(lit) = extra {
            for path in &mut out {
                path.0.push(lit.clone());
            }
        }
        Ok(out)
    }

    fn collect_paths(
        &self,
        cur: Fodd,
        target: Fodd,
        prefix: &mut Vec<Literal>,
        out: &mut Vec<PathFormula>,
    ) -> Result<()> {
        if cur == target {
            if out.len() >= self.max_paths {
                return Err(FoddError::TooManyPaths(self.max_paths));
            }
            out.push(PathFormula(prefix.clone()));
            return Ok(());
        }
        if let NodeView::Node { label, hi, lo } = self.get(cur) {
            prefix.push(Literal::pos(label.clone()));
            self.collect_paths(hi, target, prefix, out)?;
            prefix.pop();
            prefix.push(Literal::neg(label.clone()));
            self.collect_paths(lo, target, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    #[test]
    fn root_node_formula_is_empty_conjunction() {
        let mut pool = Pool::new();
        let l = pool.leaf(3.0).unwrap();
        let paths = pool.path_formulas(l, PathTarget::Node(l)).unwrap();
        assert_eq!(paths, vec![PathFormula(vec![])]);
    }

    #[test]
    fn single_path_edge_formula() {
        // p(x) ? (q(y) ? 1 : 0) : 0, edge q(y)-true has formula p(x) and q(y)
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let q = pool.register_predicate("q", 1, vec![]).unwrap();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let qn = pool
            .node(Label::atom(q, vec![Term::variable("y")]), l1, l0)
            .unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("x")]), qn, l0)
            .unwrap();
        let paths = pool
            .path_formulas(
                b,
                PathTarget::Edge(EdgeRef {
                    source: qn,
                    branch: true,
                }),
            )
            .unwrap();
        assert_eq!(paths.len(), 1);
        let lits = &paths[0].0;
        assert_eq!(lits.len(), 2);
        assert!(lits[0].positive && lits[1].positive);
    }

    #[test]
    fn shared_node_has_two_formulas() {
        // diamond: p ? (q ? S : 0) : (r ? S : 0) where S is shared
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let q = pool.register_predicate("q", 1, vec![]).unwrap();
        let r = pool.register_predicate("r", 1, vec![]).unwrap();
        let s = pool.register_predicate("s", 1, vec![]).unwrap();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let x = || Term::variable("x");
        let shared = pool.node(Label::atom(s, vec![x()]), l1, l0).unwrap();
        let qn = pool.node(Label::atom(q, vec![x()]), shared, l0).unwrap();
        let rn = pool.node(Label::atom(r, vec![x()]), shared, l0).unwrap();
        let b = pool.node(Label::atom(p, vec![x()]), qn, rn).unwrap();
        let paths = pool.path_formulas(b, PathTarget::Node(shared)).unwrap();
        assert_eq!(paths.len(), 2);
        // first path goes through the true branch: p and q
        assert!(paths[0].0[0].positive);
        assert!(paths[0].0[1].positive);
        // second goes through the false branch: not-p and r
        assert!(!paths[1].0[0].positive);
        assert!(paths[1].0[1].positive);
    }

    #[test]
    fn path_cap_is_enforced() {
        let mut pool = Pool::new();
        pool.max_paths = 2;
        let preds: Vec<_> = (0..3)
            .map(|i| {
                pool.register_predicate(format!("p{i}"), 1, vec![])
                    .unwrap()
            })
            .collect();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        // chain where both children point at the next node: 2^3 paths to the leaf
        let mut cur = l1;
        let lower = pool.leaf(0.5).unwrap();
        let _ = l0;
        for pid in preds.iter().rev() {
            let next = pool
                .node(Label::atom(*pid, vec![Term::variable("x")]), cur, lower)
                .unwrap();
            cur = next;
        }
        // every path ends in either leaf; count paths to the 0.5 leaf
        let res = pool.path_formulas(cur, PathTarget::Node(lower));
        assert!(matches!(res, Err(FoddError::TooManyPaths(2))));
    }
}
