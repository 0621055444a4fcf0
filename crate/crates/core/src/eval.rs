use std::collections::{HashMap, HashSet};

use crate::error::{FoddError, Result};
use crate::label::{Label, PredId};
use crate::pool::{Fodd, NodeView, Pool};
use crate::term::{Term, TermSort};

/// A finite relational structure: domain elements, constant bindings, and
/// the set of true ground atoms. In the MDP context one interpretation is
/// one world state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    elements: Vec<String>,
    constants: HashMap<String, usize>,
    atoms: HashSet<(PredId, Vec<usize>)>,
}

impl Interpretation {
    pub fn new(elements: Vec<String>) -> Self {
        Interpretation {
            elements,
            constants: HashMap::new(),
            atoms: HashSet::new(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn bind_constant(&mut self, name: impl Into<String>, element: usize) {
        self.constants.insert(name.into(), element);
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&String, usize)> {
        self.constants.iter().map(|(k, v)| (k, *v))
    }

    pub fn add_atom(&mut self, pred: PredId, elems: Vec<usize>) {
        self.atoms.insert((pred, elems));
    }

    pub fn holds(&self, pred: PredId, elems: &[usize]) -> bool {
        self.atoms.contains(&(pred, elems.to_vec()))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &(PredId, Vec<usize>)> {
        self.atoms.iter()
    }
}

/// A valuation: bindings from variable and action-parameter keys to domain
/// elements. Keys use the display spelling, so an action parameter `b` is
/// stored under `b*`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Valuation(Vec<(String, usize)>);

impl Valuation {
    pub fn new() -> Self {
        Valuation(Vec::new())
    }

    pub fn bind(&mut self, key: impl Into<String>, element: usize) {
        self.0.push((key.into(), element));
    }

    pub fn get(&self, key: &str) -> Option<usize> {
        self.0
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, e)| *e)
    }

    fn pop(&mut self, n: usize) {
        self.0.truncate(self.0.len() - n);
    }

    pub fn bindings(&self) -> &[(String, usize)] {
        &self.0
    }
}

impl Pool {
    fn resolve_term(
        &self,
        term: &Term,
        interp: &Interpretation,
        valuation: &Valuation,
    ) -> Result<usize> {
        match term.sort() {
            TermSort::Constant => interp.constant(term.name()).ok_or(FoddError::Unbound {
                kind: "constant",
                name: term.name().to_string(),
            }),
            TermSort::Variable | TermSort::ActionParam => {
                valuation.get(&term.key()).ok_or(FoddError::Unbound {
                    kind: if term.is_variable() {
                        "variable"
                    } else {
                        "action parameter"
                    },
                    name: term.key(),
                })
            }
        }
    }

    fn label_holds(
        &self,
        label: &Label,
        interp: &Interpretation,
        valuation: &Valuation,
    ) -> Result<bool> {
        match label {
            Label::Equality(a, b) => {
                Ok(self.resolve_term(a, interp, valuation)?
                    == self.resolve_term(b, interp, valuation)?)
            }
            Label::Atom { pred, args } => {
                let mut elems = Vec::with_capacity(args.len());
                for a in args {
                    elems.push(self.resolve_term(a, interp, valuation)?);
                }
                Ok(interp.holds(*pred, &elems))
            }
        }
    }

    /// Follow the unique path selected by the valuation and return the leaf
    /// value. Equality nodes are true iff both sides denote the same element.
    pub fn evaluate(
        &self,
        root: Fodd,
        interp: &Interpretation,
        valuation: &Valuation,
    ) -> Result<f64> {
        let mut cur = root;
        loop {
            match self.get(cur) {
                NodeView::Leaf(v) => return Ok(v),
                NodeView::Node { label, hi, lo } => {
                    cur = if self.label_holds(label, interp, valuation)? {
                        hi
                    } else {
                        lo
                    };
                }
            }
        }
    }

    /// The map of the diagram: the maximum of `evaluate` over all valuations
    /// of the diagram's variables into the interpretation's domain. Any
    /// action parameters must already be bound in `pre_bound`.
    pub fn map_value_bound(
        &self,
        root: Fodd,
        interp: &Interpretation,
        pre_bound: &Valuation,
    ) -> Result<f64> {
        if interp.domain_size() == 0 {
            return Err(FoddError::EmptyDomain);
        }
        let vars = self.variables(root);
        let space = (interp.domain_size() as f64).powi(vars.len() as i32);
        if space > self.max_valuations {
            return Err(FoddError::TooManyValuations(space, self.max_valuations));
        }
        let mut valuation = pre_bound.clone();
        self.map_rec(root, interp, &mut valuation)
    }

    pub fn map_value(&self, root: Fodd, interp: &Interpretation) -> Result<f64> {
        self.map_value_bound(root, interp, &Valuation::new())
    }

    /// Recursive descent that binds variables only when a label on the
    /// active path mentions them. Unconstrained variables never contribute
    /// to the enumeration, which keeps the map cheap on reduced diagrams.
    fn map_rec(&self, node: Fodd, interp: &Interpretation, valuation: &mut Valuation) -> Result<f64> {
        match self.get(node) {
            NodeView::Leaf(v) => Ok(v),
            NodeView::Node { label, hi, lo } => {
                let mut unbound: Vec<String> = Vec::new();
                for t in label.terms() {
                    if t.is_constant() {
                        continue;
                    }
                    let key = t.key();
                    if valuation.get(&key).is_none() && !unbound.contains(&key) {
                        if t.is_action_param() {
                            return Err(FoddError::Unbound {
                                kind: "action parameter",
                                name: key,
                            });
                        }
                        unbound.push(key);
                    }
                }
                if unbound.is_empty() {
                    let next = if self.label_holds(label, interp, valuation)? {
                        hi
                    } else {
                        lo
                    };
                    return self.map_rec(next, interp, valuation);
                }
                let n = interp.domain_size();
                let k = unbound.len();
                let mut best = f64::NEG_INFINITY;
                let mut counters = vec![0usize; k];
                loop {
                    for (key, &e) in unbound.iter().zip(counters.iter()) {
                        valuation.bind(key.clone(), e);
                    }
                    let v = self.map_rec(node, interp, valuation)?;
                    valuation.pop(k);
                    if v > best {
                        best = v;
                    }
                    // odometer increment
                    let mut i = 0;
                    loop {
                        if i == k {
                            return Ok(best);
                        }
                        counters[i] += 1;
                        if counters[i] < n {
                            break;
                        }
                        counters[i] = 0;
                        i += 1;
                    }
                }
            }
        }
    }

    /// Map value together with a maximizing binding for the requested keys.
    /// Bindings are explored in element order, and only strictly better
    /// values replace the incumbent, so the first maximizer encountered is
    /// kept. Requested keys never touched on the best path default to
    /// element 0.
    pub fn map_argmax(
        &self,
        root: Fodd,
        interp: &Interpretation,
        pre_bound: &Valuation,
        record: &[String],
    ) -> Result<(f64, Vec<(String, usize)>)> {
        if interp.domain_size() == 0 {
            return Err(FoddError::EmptyDomain);
        }
        let mut valuation = pre_bound.clone();
        let mut best = (f64::NEG_INFINITY, Vec::new());
        self.argmax_rec(root, interp, &mut valuation, &mut best)?;
        let mut binding: Vec<(String, usize)> = Vec::new();
        for key in record {
            let bound = best
                .1
                .iter()
                .rev()
                .find(|(k, _)| k == key)
                .map(|(_, e)| *e)
                .unwrap_or(0);
            binding.push((key.clone(), bound));
        }
        Ok((best.0, binding))
    }

    fn argmax_rec(
        &self,
        node: Fodd,
        interp: &Interpretation,
        valuation: &mut Valuation,
        best: &mut (f64, Vec<(String, usize)>),
    ) -> Result<()> {
        match self.get(node) {
            NodeView::Leaf(v) => {
                if v > best.0 {
                    *best = (v, valuation.bindings().to_vec());
                }
                Ok(())
            }
            NodeView::Node { label, hi, lo } => {
                let mut unbound: Vec<String> = Vec::new();
                for t in label.terms() {
                    if t.is_constant() {
                        continue;
                    }
                    let key = t.key();
                    if valuation.get(&key).is_none() && !unbound.contains(&key) {
                        unbound.push(key);
                    }
                }
                if unbound.is_empty() {
                    let next = if self.label_holds(label, interp, valuation)? {
                        hi
                    } else {
                        lo
                    };
                    return self.argmax_rec(next, interp, valuation, best);
                }
                let n = interp.domain_size();
                let k = unbound.len();
                let mut counters = vec![0usize; k];
                loop {
                    for (key, &e) in unbound.iter().zip(counters.iter()) {
                        valuation.bind(key.clone(), e);
                    }
                    self.argmax_rec(node, interp, valuation, best)?;
                    valuation.pop(k);
                    let mut i = 0;
                    loop {
                        if i == k {
                            return Ok(());
                        }
                        counters[i] += 1;
                        if counters[i] < n {
                            break;
                        }
                        counters[i] = 0;
                        i += 1;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;

    fn setup() -> (Pool, PredId, Interpretation) {
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let mut interp = Interpretation::new(vec!["e1".into(), "e2".into()]);
        interp.add_atom(p, vec![0]);
        (pool, p, interp)
    }

    #[test]
    fn evaluate_leaf_ignores_state() {
        let (mut pool, _, interp) = setup();
        let l = pool.leaf(7.0).unwrap();
        assert_eq!(pool.evaluate(l, &interp, &Valuation::new()).unwrap(), 7.0);
    }

    #[test]
    fn evaluate_follows_atom_truth() {
        let (mut pool, p, interp) = setup();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("x")]), l1, l0)
            .unwrap();
        let mut z = Valuation::new();
        z.bind("x", 0);
        assert_eq!(pool.evaluate(b, &interp, &z).unwrap(), 1.0);
        let mut z = Valuation::new();
        z.bind("x", 1);
        assert_eq!(pool.evaluate(b, &interp, &z).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_equality_by_element_identity() {
        let (mut pool, _, interp) = setup();
        let l2 = pool.leaf(2.0).unwrap();
        let l3 = pool.leaf(3.0).unwrap();
        let b = pool
            .node(
                Label::equality(Term::variable("x"), Term::variable("y")),
                l2,
                l3,
            )
            .unwrap();
        let mut z = Valuation::new();
        z.bind("x", 0);
        z.bind("y", 0);
        assert_eq!(pool.evaluate(b, &interp, &z).unwrap(), 2.0);
        let mut z = Valuation::new();
        z.bind("x", 0);
        z.bind("y", 1);
        assert_eq!(pool.evaluate(b, &interp, &z).unwrap(), 3.0);
    }

    #[test]
    fn evaluate_errors_on_unbound() {
        let (mut pool, p, interp) = setup();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("x")]), l1, l0)
            .unwrap();
        assert!(pool.evaluate(b, &interp, &Valuation::new()).is_err());
    }

    #[test]
    fn map_maximizes_over_valuations() {
        let (mut pool, p, interp) = setup();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("x")]), l1, l0)
            .unwrap();
        // p(e1) holds, so some valuation reaches 1
        assert_eq!(pool.map_value(b, &interp).unwrap(), 1.0);
        let c = pool.leaf(4.0).unwrap();
        assert_eq!(pool.map_value(c, &interp).unwrap(), 4.0);
    }

    #[test]
    fn map_of_either_order_diagram_is_one() {
        // p(x) ? 1 : (p(y) ? 0 : 1) always maps to 1
        let (mut pool, p, interp) = setup();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let py = pool
            .node(Label::atom(p, vec![Term::variable("y")]), l0, l1)
            .unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("x")]), l1, py)
            .unwrap();
        assert_eq!(pool.map_value(b, &interp).unwrap(), 1.0);
        // also on an interpretation with no true atoms
        let empty = Interpretation::new(vec!["e1".into()]);
        assert_eq!(pool.map_value(b, &empty).unwrap(), 1.0);
    }
}
