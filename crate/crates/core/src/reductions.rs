//! Strong and weak diagram reductions with their condition checks, plus the
//! deterministic scheduler `reduce_full`.
//!
//! Strong reductions preserve the value under every single valuation; weak
//! reductions preserve only the max-aggregated map. Weak rewrites fire only
//! when their reachability conditions (checked by the reasoner) and value
//! conditions (leaf extrema or a non-negative subtraction diagram) are
//! proven, so a FALSE from the reasoner merely leaves the diagram bigger.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::FoddError;
use crate::label::Label;
use crate::paths::{EdgeRef, PathFormula, PathTarget};
use crate::pool::{Fodd, Op, Pool};
use crate::reasoner::{implies_exists, BackgroundTheory, EntailmentQuery};
use crate::term::Term;

/// Limits for one `reduce_full` call.
#[derive(Debug, Clone, Copy)]
pub struct ReductionBudget {
    /// Maximum number of full scheduler passes.
    pub max_passes: usize,
    /// Maximum number of candidate rewrites examined per pass.
    pub max_candidates: usize,
}

impl Default for ReductionBudget {
    fn default() -> Self {
        ReductionBudget {
            max_passes: 40,
            max_candidates: 200_000,
        }
    }
}

/// What a single applied rewrite was, for the soundness harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// Bottom-up rebuild (neglect/join/merge through the builder).
    Strong,
    /// A node bypassed because its label (or negation) is implied.
    ImpliedBranch,
    /// A dominated edge target replaced by the zero leaf.
    Replace,
    /// A dominated node dropped, parents connected to the sibling target.
    Drop,
    /// Sibling-edge equality shortcut: node removed, equality substituted.
    EqualityShortcut,
    /// Variables unified by renaming.
    Unify,
    /// Equality node replaced by the max of its instantiated branches.
    EqualityMax,
}

impl ReductionKind {
    /// Strong rewrites preserve the per-valuation value; the rest preserve
    /// only the map.
    pub fn is_strong(self) -> bool {
        matches!(self, ReductionKind::Strong | ReductionKind::ImpliedBranch)
    }
}

/// One applied rewrite, with the diagram before and after.
#[derive(Debug, Clone)]
pub struct ReductionEvent {
    pub kind: ReductionKind,
    pub before: Fodd,
    pub after: Fodd,
}

/// Rebuild the diagram bottom-up through the tolerant builder. Diagrams
/// produced by the pool are already sorted and reduced in this sense, so
/// this returns the same node for them; it exists as the entry point used
/// after substitutions.
pub fn reduce_strong(pool: &mut Pool, root: Fodd) -> Fodd {
    let order = pool.preorder(root);
    let mut memo: HashMap<Fodd, Fodd> = HashMap::new();
    for f in order.into_iter().rev() {
        let out = match pool.label(f).cloned() {
            None => f,
            Some(label) => {
                let hi = memo[&pool.hi(f)];
                let lo = memo[&pool.lo(f)];
                pool.branch(label, hi, lo)
                    .expect("rebuild of an existing diagram cannot fail")
            }
        };
        memo.insert(f, out);
    }
    memo[&root]
}

fn node_formula(pool: &Pool, root: Fodd, n: Fodd) -> Option<Vec<PathFormula>> {
    pool.path_formulas(root, PathTarget::Node(n)).ok()
}

fn edge_formula(pool: &Pool, root: Fodd, e: EdgeRef) -> Option<Vec<PathFormula>> {
    pool.path_formulas(root, PathTarget::Edge(e)).ok()
}

fn literal_paths(label: &Label, positive: bool) -> Vec<PathFormula> {
    vec![PathFormula(vec![crate::paths::Literal {
        label: label.clone(),
        positive,
    }])]
}

/// Bypass the first node (in document order) whose node formula entails its
/// label or the label's negation. Returns the rewritten diagram or None.
fn prune_implied_step(pool: &mut Pool, root: Fodd, theory: &BackgroundTheory) -> Option<Fodd> {
    for n in pool.preorder(root) {
        let Some(label) = pool.label(n).cloned() else {
            continue;
        };
        let Some(nf) = node_formula(pool, root, n) else {
            continue;
        };
        let frozen: BTreeSet<Term> = label
            .terms()
            .into_iter()
            .filter(|t| t.is_variable())
            .cloned()
            .collect();
        let to_true = EntailmentQuery {
            antecedent: nf.clone(),
            consequent: literal_paths(&label, true),
            shared: frozen.clone(),
        };
        let target = if implies_exists(&to_true, theory) {
            Some(pool.hi(n))
        } else {
            let to_false = EntailmentQuery {
                antecedent: nf,
                consequent: literal_paths(&label, false),
                shared: frozen,
            };
            if implies_exists(&to_false, theory) {
                Some(pool.lo(n))
            } else {
                None
            }
        };
        if let Some(child) = target {
            let after = pool.splice(root, n, child);
            if after != root {
                return Some(after);
            }
        }
    }
    None
}

/// Bypass every node whose node formula entails its label or the label's
/// negation. Preserves the value under every valuation of interpretations
/// consistent with the theory.
pub fn prune_implied_branches(pool: &mut Pool, root: Fodd, theory: &BackgroundTheory) -> Fodd {
    let mut b = root;
    while let Some(next) = prune_implied_step(pool, b, theory) {
        b = next;
    }
    b
}

/// Shared context for the dominance checks.
struct DomCtx<'a> {
    theory: &'a BackgroundTheory,
    /// Path formulas per edge, computed on demand; None when over the cap.
    paths: HashMap<EdgeRef, Option<Vec<PathFormula>>>,
}

impl<'a> DomCtx<'a> {
    fn new(theory: &'a BackgroundTheory) -> Self {
        DomCtx {
            theory,
            paths: HashMap::new(),
        }
    }

    fn edge_paths(&mut self, pool: &Pool, root: Fodd, e: EdgeRef) -> Option<&Vec<PathFormula>> {
        self.paths
            .entry(e)
            .or_insert_with(|| edge_formula(pool, root, e))
            .as_ref()
    }
}

fn shared_vars(pool: &Pool, a: Fodd, b: Fodd) -> BTreeSet<Term> {
    pool.variables(a)
        .intersection(&pool.variables(b))
        .cloned()
        .collect()
}

fn nonneg_subtraction(pool: &mut Pool, a: Fodd, b: Fodd) -> bool {
    let diff = pool.apply(a, b, Op::Subtract);
    pool.min_leaf(diff) >= 0.0
}

/// The safety condition: replacing or dropping along `e2` must not disturb
/// the reachability of `source(e1)` or the sub-diagram promised by `e1`.
/// Rejected when `source(e2)` lies inside `target(e1)`'s sub-diagram or
/// `source(e1)` lies inside `target(e2)`'s.
fn safety_holds(pool: &Pool, e1: EdgeRef, e2: EdgeRef) -> bool {
    let t1 = e1.target(pool);
    let t2 = e2.target(pool);
    !pool.preorder(t1).contains(&e2.source) && !pool.preorder(t2).contains(&e1.source)
}

/// Check the dominance conditions for the pair (e1, e2) and apply the
/// strongest rewrite allowed: drop the source of `e2` when the extra
/// sibling conditions hold, otherwise replace its target with the zero
/// leaf. Returns the rewritten diagram or None.
fn try_dominance(
    pool: &mut Pool,
    root: Fodd,
    e1: EdgeRef,
    e2: EdgeRef,
    ctx: &mut DomCtx,
) -> Option<(ReductionKind, Fodd)> {
    let t1 = e1.target(pool);
    let t2 = e2.target(pool);
    let sib = e2.sibling().target(pool);
    // necessary for both replace routes
    if pool.max_leaf(t1) < pool.max_leaf(t2) || pool.min_leaf(t1) < pool.min_leaf(t2) {
        return None;
    }
    if !safety_holds(pool, e1, e2) {
        return None;
    }
    let ef1 = ctx.edge_paths(pool, root, e1)?.clone();
    let ef2 = ctx.edge_paths(pool, root, e2)?.clone();

    let v71 = pool.min_leaf(t1) >= pool.max_leaf(t2);
    let unshared = EntailmentQuery {
        antecedent: ef2.clone(),
        consequent: ef1.clone(),
        shared: BTreeSet::new(),
    };
    let mut replace_ok = v71 && implies_exists(&unshared, ctx.theory);
    if !replace_ok && nonneg_subtraction(pool, t1, t2) {
        let q = EntailmentQuery {
            antecedent: ef2.clone(),
            consequent: ef1.clone(),
            shared: shared_vars(pool, t1, t2),
        };
        replace_ok = implies_exists(&q, ctx.theory);
    }
    if !replace_ok {
        return None;
    }

    let v72 = pool.min_leaf(t1) >= pool.max_leaf(sib);
    let mut drop_ok = v72;
    if !drop_ok && nonneg_subtraction(pool, t1, sib) {
        let q = EntailmentQuery {
            antecedent: ef2,
            consequent: ef1,
            shared: shared_vars(pool, t1, sib),
        };
        drop_ok = implies_exists(&q, ctx.theory);
    }

    let before_count = pool.node_count(root);
    if drop_ok {
        let after = pool.splice(root, e2.source, sib);
        if after != root && pool.node_count(after) <= before_count {
            return Some((ReductionKind::Drop, after));
        }
    }
    if pool.leaf_value(t2) != Some(0.0) {
        let zero = pool.leaf_signed(0.0);
        let label = pool.label(e2.source)?.clone();
        let (hi, lo) = if e2.branch {
            (zero, pool.lo(e2.source))
        } else {
            (pool.hi(e2.source), zero)
        };
        let replacement = pool
            .node(label, hi, lo)
            .expect("zeroing a branch keeps labels sorted");
        let after = pool.splice(root, e2.source, replacement);
        if after != root && pool.node_count(after) <= before_count {
            return Some((ReductionKind::Replace, after));
        }
    }
    None
}

/// Public form of the dominated-edge replacement: apply it to one edge pair
/// if the conditions hold, otherwise return the diagram unchanged.
pub fn replace_dominated(
    pool: &mut Pool,
    root: Fodd,
    e1: EdgeRef,
    e2: EdgeRef,
    theory: &BackgroundTheory,
) -> Fodd {
    let mut ctx = DomCtx::new(theory);
    match try_dominance(pool, root, e1, e2, &mut ctx) {
        Some((_, after)) => after,
        None => root,
    }
}

/// Public form of the dominated-node drop. The drop preconditions include
/// the replace preconditions; when only the replace side holds this is a
/// no-op.
pub fn drop_dominated(
    pool: &mut Pool,
    root: Fodd,
    e1: EdgeRef,
    e2: EdgeRef,
    theory: &BackgroundTheory,
) -> Fodd {
    let mut ctx = DomCtx::new(theory);
    match try_dominance(pool, root, e1, e2, &mut ctx) {
        Some((ReductionKind::Drop, after)) => after,
        _ => root,
    }
}

/// Unify variables by renaming `xs` to the corresponding `ys`, accepted only
/// when every leaf of `B{xs/ys} - B` is non-negative.
pub fn unify_vars(pool: &mut Pool, root: Fodd, xs: &[Term], ys: &[Term]) -> Fodd {
    if xs.is_empty() || xs.len() != ys.len() {
        return root;
    }
    let mut subst = BTreeMap::new();
    for (x, y) in xs.iter().zip(ys.iter()) {
        subst.insert(x.clone(), y.clone());
    }
    let Ok(renamed) = pool.rename(root, &subst) else {
        return root;
    };
    if renamed == root {
        return root;
    }
    let diff = pool.apply(renamed, root, Op::Subtract);
    if pool.min_leaf(diff) >= 0.0 {
        renamed
    } else {
        root
    }
}

/// Condition check for the equality reduction: the node is labeled with an
/// equality `t = x` where `x` is a variable occurring neither below the
/// false branch nor in the node formula. Returns (kept term, variable).
fn equality_candidate(pool: &Pool, root: Fodd, n: Fodd) -> Option<(Term, Term)> {
    let Some(Label::Equality(a, b)) = pool.label(n) else {
        return None;
    };
    let (a, b) = (a.clone(), b.clone());
    let lo_vars = pool.variables(pool.lo(n));
    let nf_vars: Option<BTreeSet<Term>> = node_formula(pool, root, n).map(|paths| {
        paths
            .iter()
            .flat_map(|p| p.variables().into_iter())
            .collect()
    });
    let nf_vars = nf_vars?;
    for (kept, var) in [(a.clone(), b.clone()), (b, a)] {
        if var.is_variable() && !lo_vars.contains(&var) && !nf_vars.contains(&var) {
            return Some((kept, var));
        }
    }
    None
}

/// The equality reduction: replace the node with the max of its true branch
/// (with the free variable renamed to the other side) and its false branch.
/// Preserves the map on every interpretation with at least two elements.
pub fn reduce_equality_node(pool: &mut Pool, root: Fodd, n: Fodd) -> Fodd {
    let Some((kept, var)) = equality_candidate(pool, root, n) else {
        return root;
    };
    let mut subst = BTreeMap::new();
    subst.insert(var, kept);
    let Ok(renamed_hi) = pool.rename(pool.hi(n), &subst) else {
        return root;
    };
    let lo = pool.lo(n);
    let combined = pool.apply(renamed_hi, lo, Op::Max);
    pool.splice(root, n, combined)
}

enum Phase {
    Implied,
    EqualityMax,
    Sibling,
    Pairs,
    Unify,
}

/// Deterministic reduction scheduler. Repeats until fixpoint or budget:
/// strong rebuild, implied-branch pruning, equality reductions top-down,
/// dominance on sibling edge pairs (including the equality shortcut), then
/// general dominance pairs in document order, then variable unification over
/// co-occurrence candidates. Rewrites that would grow the diagram are
/// skipped, so the result never has more nodes than the input.
pub fn reduce_full(
    pool: &mut Pool,
    root: Fodd,
    theory: &BackgroundTheory,
    budget: &ReductionBudget,
) -> Fodd {
    let (b, _) = reduce_full_traced(pool, root, theory, budget);
    b
}

/// `reduce_full` that also reports every applied rewrite, for the soundness
/// harness.
pub fn reduce_full_traced(
    pool: &mut Pool,
    root: Fodd,
    theory: &BackgroundTheory,
    budget: &ReductionBudget,
) -> (Fodd, Vec<ReductionEvent>) {
    let mut events = Vec::new();
    let mut b = root;
    let strong = reduce_strong(pool, b);
    if strong != b {
        events.push(ReductionEvent {
            kind: ReductionKind::Strong,
            before: b,
            after: strong,
        });
        b = strong;
    }
    for _pass in 0..budget.max_passes {
        let mut candidates_left = budget.max_candidates;
        let mut changed = false;
        for phase in [
            Phase::Implied,
            Phase::EqualityMax,
            Phase::Sibling,
            Phase::Pairs,
            Phase::Unify,
        ] {
            loop {
                let step = run_phase(pool, b, &phase, theory, &mut candidates_left);
                match step {
                    Some(ev) => {
                        b = ev.after;
                        events.push(ev);
                        changed = true;
                    }
                    None => break,
                }
                if candidates_left == 0 {
                    break;
                }
            }
            if candidates_left == 0 {
                break;
            }
        }
        if !changed {
            break;
        }
    }
    (b, events)
}

fn run_phase(
    pool: &mut Pool,
    root: Fodd,
    phase: &Phase,
    theory: &BackgroundTheory,
    candidates_left: &mut usize,
) -> Option<ReductionEvent> {
    match phase {
        Phase::Implied => {
            if *candidates_left == 0 {
                return None;
            }
            *candidates_left = candidates_left.saturating_sub(1);
            prune_implied_step(pool, root, theory).map(|after| ReductionEvent {
                kind: ReductionKind::ImpliedBranch,
                before: root,
                after,
            })
        }
        Phase::EqualityMax => {
            for n in pool.preorder(root) {
                if *candidates_left == 0 {
                    return None;
                }
                if pool.label(n).map(Label::is_equality) != Some(true) {
                    continue;
                }
                *candidates_left -= 1;
                let before_count = pool.node_count(root);
                let after = reduce_equality_node(pool, root, n);
                if after != root && pool.node_count(after) <= before_count {
                    return Some(ReductionEvent {
                        kind: ReductionKind::EqualityMax,
                        before: root,
                        after,
                    });
                }
            }
            None
        }
        Phase::Sibling => {
            // equality shortcut first: node labeled t = y with y fresh above,
            // whose true branch dominates the false branch
            for n in pool.preorder(root) {
                if *candidates_left == 0 {
                    return None;
                }
                let Some(Label::Equality(a, b)) = pool.label(n).cloned() else {
                    continue;
                };
                *candidates_left -= 1;
                let hi = pool.hi(n);
                let lo = pool.lo(n);
                if pool.min_leaf(hi) < pool.max_leaf(lo) {
                    continue;
                }
                let Some(nf) = node_formula(pool, root, n) else {
                    continue;
                };
                let nf_vars: BTreeSet<Term> =
                    nf.iter().flat_map(|p| p.variables().into_iter()).collect();
                for (kept, var) in [(a.clone(), b.clone()), (b.clone(), a.clone())] {
                    if !var.is_variable() || nf_vars.contains(&var) {
                        continue;
                    }
                    let mut subst = BTreeMap::new();
                    subst.insert(var, kept);
                    let Ok(renamed) = pool.rename(hi, &subst) else {
                        continue;
                    };
                    let before_count = pool.node_count(root);
                    let after = pool.splice(root, n, renamed);
                    if after != root && pool.node_count(after) <= before_count {
                        return Some(ReductionEvent {
                            kind: ReductionKind::EqualityShortcut,
                            before: root,
                            after,
                        });
                    }
                }
            }
            // general dominance restricted to sibling pairs
            dominance_scan(pool, root, theory, candidates_left, true)
        }
        Phase::Pairs => dominance_scan(pool, root, theory, candidates_left, false),
        Phase::Unify => {
            let candidates = unify_candidates(pool, root);
            for (x, y) in candidates.into_iter().take(16) {
                if *candidates_left == 0 {
                    return None;
                }
                *candidates_left -= 1;
                let before_count = pool.node_count(root);
                for (from, to) in [(x.clone(), y.clone()), (y.clone(), x.clone())] {
                    let after = unify_vars(pool, root, &[from], &[to]);
                    if after != root && pool.node_count(after) <= before_count {
                        return Some(ReductionEvent {
                            kind: ReductionKind::Unify,
                            before: root,
                            after,
                        });
                    }
                }
            }
            None
        }
    }
}

fn dominance_scan(
    pool: &mut Pool,
    root: Fodd,
    theory: &BackgroundTheory,
    candidates_left: &mut usize,
    siblings_only: bool,
) -> Option<ReductionEvent> {
    let mut ctx = DomCtx::new(theory);
    let edges: Vec<EdgeRef> = pool
        .preorder(root)
        .into_iter()
        .filter(|f| !pool.is_leaf(*f))
        .flat_map(|source| {
            [
                EdgeRef {
                    source,
                    branch: true,
                },
                EdgeRef {
                    source,
                    branch: false,
                },
            ]
        })
        .collect();
    for &e1 in &edges {
        for &e2 in &edges {
            if e1 == e2 {
                continue;
            }
            let is_sibling = e1.source == e2.source;
            if siblings_only != is_sibling {
                continue;
            }
            if *candidates_left == 0 {
                return None;
            }
            *candidates_left -= 1;
            if let Some((kind, after)) = try_dominance(pool, root, e1, e2, &mut ctx) {
                return Some(ReductionEvent {
                    kind,
                    before: root,
                    after,
                });
            }
        }
    }
    None
}

/// Variable pairs co-occurring at the same predicate position anywhere in
/// the diagram, in name order.
fn unify_candidates(pool: &Pool, root: Fodd) -> Vec<(Term, Term)> {
    let mut by_slot: BTreeMap<(u32, usize), BTreeSet<Term>> = BTreeMap::new();
    let mut eq_slot: BTreeSet<Term> = BTreeSet::new();
    for f in pool.preorder(root) {
        match pool.label(f) {
            Some(Label::Atom { pred, args }) => {
                for (i, t) in args.iter().enumerate() {
                    if t.is_variable() {
                        by_slot.entry((pred.0, i)).or_default().insert(t.clone());
                    }
                }
            }
            Some(Label::Equality(a, b)) => {
                for t in [a, b] {
                    if t.is_variable() {
                        eq_slot.insert(t.clone());
                    }
                }
            }
            None => {}
        }
    }
    let mut pairs: BTreeSet<(Term, Term)> = BTreeSet::new();
    for set in by_slot.values().chain(std::iter::once(&eq_slot)) {
        let v: Vec<&Term> = set.iter().collect();
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                pairs.insert((v[i].clone(), v[j].clone()));
            }
        }
    }
    pairs.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::PredId;

    fn pool_with(preds: &[(&str, usize)]) -> (Pool, Vec<PredId>) {
        let mut pool = Pool::new();
        let ids = preds
            .iter()
            .map(|(n, a)| pool.register_predicate(*n, *a, vec![]).unwrap())
            .collect();
        (pool, ids)
    }

    #[test]
    fn reduce_strong_is_identity_on_reduced_diagrams() {
        let (mut pool, ids) = pool_with(&[("p", 1)]);
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let b = pool
            .node(Label::atom(ids[0], vec![Term::variable("x")]), l1, l0)
            .unwrap();
        assert_eq!(reduce_strong(&mut pool, b), b);
        assert_eq!(reduce_strong(&mut pool, l0), l0);
    }

    #[test]
    fn implied_branch_from_equality() {
        // (x=y) ? (p(x) ? (p(y) ? 1 : 0) : 0) : 0  =>  (x=y) ? (p(x) ? 1 : 0) : 0
        let (mut pool, ids) = pool_with(&[("p", 1)]);
        let p = ids[0];
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let py = pool
            .node(Label::atom(p, vec![Term::variable("y")]), l1, l0)
            .unwrap();
        let px = pool
            .node(Label::atom(p, vec![Term::variable("x")]), py, l0)
            .unwrap();
        let b = pool
            .node(
                Label::equality(Term::variable("x"), Term::variable("y")),
                px,
                l0,
            )
            .unwrap();
        let reduced = prune_implied_branches(&mut pool, b, &BackgroundTheory::empty());
        let expected_inner = pool
            .node(Label::atom(p, vec![Term::variable("x")]), l1, l0)
            .unwrap();
        let expected = pool
            .node(
                Label::equality(Term::variable("x"), Term::variable("y")),
                expected_inner,
                l0,
            )
            .unwrap();
        assert_eq!(reduced, expected);
    }

    #[test]
    fn implied_branch_from_background_rule() {
        // on(x,y) ? (clear(y) ? 5 : 3) : 2 with on(x,y) -> not clear(y)
        // becomes on(x,y) ? 3 : 2
        let (mut pool, ids) = pool_with(&[("on", 2), ("clear", 1)]);
        let (on, clear) = (ids[0], ids[1]);
        let l5 = pool.leaf(5.0).unwrap();
        let l3 = pool.leaf(3.0).unwrap();
        let l2 = pool.leaf(2.0).unwrap();
        let cn = pool
            .node(Label::atom(clear, vec![Term::variable("y")]), l5, l3)
            .unwrap();
        let b = pool
            .node(
                Label::atom(on, vec![Term::variable("x"), Term::variable("y")]),
                cn,
                l2,
            )
            .unwrap();
        let rule = crate::reasoner::Rule {
            body: vec![crate::paths::Literal::pos(Label::atom(
                on,
                vec![Term::variable("u"), Term::variable("v")],
            ))],
            head: crate::paths::Literal::neg(Label::atom(clear, vec![Term::variable("v")])),
        };
        let theory = BackgroundTheory::new(vec![rule]);
        let reduced = prune_implied_branches(&mut pool, b, &theory);
        let expected = pool
            .node(
                Label::atom(on, vec![Term::variable("x"), Term::variable("y")]),
                l3,
                l2,
            )
            .unwrap();
        assert_eq!(reduced, expected);
    }

    #[test]
    fn either_order_diagram_reduces_to_one() {
        // p(x) ? 1 : (p(y) ? 0 : 1)  =>  1
        let (mut pool, ids) = pool_with(&[("p", 1)]);
        let p = ids[0];
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let py = pool
            .node(Label::atom(p, vec![Term::variable("y")]), l0, l1)
            .unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("x")]), l1, py)
            .unwrap();
        let reduced = reduce_full(
            &mut pool,
            b,
            &BackgroundTheory::empty(),
            &ReductionBudget::default(),
        );
        assert_eq!(reduced, l1);
    }

    #[test]
    fn leaf_reduces_to_itself() {
        let mut pool = Pool::new();
        let c = pool.leaf(4.5).unwrap();
        let reduced = reduce_full(
            &mut pool,
            c,
            &BackgroundTheory::empty(),
            &ReductionBudget::default(),
        );
        assert_eq!(reduced, c);
    }

    #[test]
    fn unify_direction_matters() {
        // p(x1) ? (p(x2) ? (q(x2) ? 1 : 0) : 0) : 0 unifies x1 into x2 but
        // not the other way around
        let (mut pool, ids) = pool_with(&[("p", 1), ("q", 1)]);
        let (p, q) = (ids[0], ids[1]);
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let x1 = Term::variable("x1");
        let x2 = Term::variable("x2");
        let qn = pool.node(Label::atom(q, vec![x2.clone()]), l1, l0).unwrap();
        let p2 = pool.node(Label::atom(p, vec![x2.clone()]), qn, l0).unwrap();
        let b = pool.node(Label::atom(p, vec![x1.clone()]), p2, l0).unwrap();
        let forward = unify_vars(&mut pool, b, &[x1.clone()], &[x2.clone()]);
        assert_ne!(forward, b);
        // result is p(x2) ? (q(x2) ? 1 : 0) : 0
        let expected = pool.node(Label::atom(p, vec![x2.clone()]), qn, l0).unwrap();
        assert_eq!(forward, expected);
        let backward = unify_vars(&mut pool, b, &[x2], &[x1]);
        assert_eq!(backward, b);
    }

    #[test]
    fn equality_node_with_used_variable_is_untouched() {
        // variable occurs in the false branch: condition fails
        let (mut pool, ids) = pool_with(&[("p", 1)]);
        let p = ids[0];
        let l5 = pool.leaf(5.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let py = pool
            .node(Label::atom(p, vec![Term::variable("y")]), l5, l0)
            .unwrap();
        let b = pool
            .node(
                Label::equality(Term::variable("x"), Term::variable("y")),
                l5,
                py,
            )
            .unwrap();
        assert_eq!(reduce_equality_node(&mut pool, b, b), b);
    }
}
