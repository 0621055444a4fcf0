//! Sound, incomplete entailment over existentially quantified path
//! conjunctions with background knowledge.
//!
//! Queries are decided by theta-subsumption with identity on shared
//! variables, after closing the antecedent under the background rules.
//! TRUE answers are sound for the semantic condition; FALSE means
//! "unknown" and only costs a reduction opportunity, never correctness.

use std::collections::BTreeSet;

use crate::label::Label;
use crate::paths::{Literal, PathFormula};
use crate::term::Term;

/// A universally quantified rule `body -> head`. Head variables that do not
/// occur in the body are themselves universally quantified; they turn into
/// wildcard arguments when the rule fires (e.g. `On(b,t) -> not Bin(b,c)`
/// yields `not Bin(b,*)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub body: Vec<Literal>,
    pub head: Literal,
}

/// Background knowledge: a rule set plus the saturation depth used when
/// closing literal sets under the rules.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BackgroundTheory {
    pub rules: Vec<Rule>,
    pub depth: usize,
}

impl BackgroundTheory {
    pub fn empty() -> Self {
        BackgroundTheory {
            rules: Vec::new(),
            depth: 2,
        }
    }

    pub fn new(rules: Vec<Rule>) -> Self {
        BackgroundTheory { rules, depth: 2 }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// An entailment query: does every way of satisfying the antecedent imply a
/// way of satisfying the consequent that agrees on the shared variables?
#[derive(Debug, Clone)]
pub struct EntailmentQuery {
    pub antecedent: Vec<PathFormula>,
    pub consequent: Vec<PathFormula>,
    pub shared: BTreeSet<Term>,
}

/// Argument of a saturated literal: a concrete term or a wildcard standing
/// for every element (from a universally quantified head variable).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SatTerm {
    Fixed(Term),
    Wild(u32),
}

/// Predicate slot of a saturated literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SatPred {
    Equality,
    Pred(crate::label::PredId),
}

/// A literal in a saturated set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SatLiteral {
    pub positive: bool,
    pub pred: SatPred,
    pub args: Vec<SatTerm>,
}

impl SatLiteral {
    fn from_literal(lit: &Literal) -> SatLiteral {
        match &lit.label {
            Label::Equality(a, b) => SatLiteral {
                positive: lit.positive,
                pred: SatPred::Equality,
                args: vec![SatTerm::Fixed(a.clone()), SatTerm::Fixed(b.clone())],
            },
            Label::Atom { pred, args } => SatLiteral {
                positive: lit.positive,
                pred: SatPred::Pred(*pred),
                args: args.iter().map(|t| SatTerm::Fixed(t.clone())).collect(),
            },
        }
    }

    fn canonical(mut self) -> SatLiteral {
        if self.pred == SatPred::Equality && self.args[1] < self.args[0] {
            self.args.swap(0, 1);
        }
        self
    }
}

impl PartialOrd for SatTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SatTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (SatTerm::Fixed(a), SatTerm::Fixed(b)) => a.cmp(b),
            (SatTerm::Fixed(_), SatTerm::Wild(_)) => std::cmp::Ordering::Less,
            (SatTerm::Wild(_), SatTerm::Fixed(_)) => std::cmp::Ordering::Greater,
            (SatTerm::Wild(a), SatTerm::Wild(b)) => a.cmp(b),
        }
    }
}

/// Result of saturation: either the closed literal set or the discovery
/// that the set is unsatisfiable (the containing path is unreachable).
#[derive(Debug, Clone, PartialEq)]
pub enum Saturation {
    Consistent(Vec<SatLiteral>),
    Contradiction,
}

/// Close a literal set under rule application and equality substitution,
/// up to `depth` rounds. Rules fire by one-way matching of the body into
/// the set; positive equalities between concrete terms propagate through
/// every literal.
pub fn saturate(literals: &[Literal], theory: &BackgroundTheory, depth: usize) -> Saturation {
    let mut set: Vec<SatLiteral> = Vec::new();
    let mut wild_counter: u32 = 0;
    for lit in literals {
        let s = SatLiteral::from_literal(lit).canonical();
        if !set.contains(&s) {
            set.push(s);
        }
    }
    for _round in 0..depth {
        let mut additions: Vec<SatLiteral> = Vec::new();
        // rule applications
        for rule in &theory.rules {
            let mut matches: Vec<Vec<(String, SatTerm)>> = vec![Vec::new()];
            for body_lit in &rule.body {
                let mut next: Vec<Vec<(String, SatTerm)>> = Vec::new();
                for binding in &matches {
                    for cand in &set {
                        if let Some(ext) = match_rule_literal(body_lit, cand, binding) {
                            next.push(ext);
                        }
                    }
                }
                matches = next;
                if matches.is_empty() {
                    break;
                }
            }
            for binding in matches {
                let head = instantiate_head(&rule.head, &binding, &mut wild_counter);
                if !set.contains(&head) && !additions.contains(&head) {
                    additions.push(head);
                }
            }
        }
        // equality substitution
        let eqs: Vec<(Term, Term)> = set
            .iter()
            .filter(|l| l.positive && l.pred == SatPred::Equality)
            .filter_map(|l| match (&l.args[0], &l.args[1]) {
                (SatTerm::Fixed(a), SatTerm::Fixed(b)) if a != b => Some((a.clone(), b.clone())),
                _ => None,
            })
            .collect();
        for (a, b) in &eqs {
            for lit in set.clone() {
                for (from, to) in [(a, b), (b, a)] {
                    let rewritten = SatLiteral {
                        positive: lit.positive,
                        pred: lit.pred.clone(),
                        args: lit
                            .args
                            .iter()
                            .map(|t| match t {
                                SatTerm::Fixed(x) if x == from => SatTerm::Fixed(to.clone()),
                                other => other.clone(),
                            })
                            .collect(),
                    }
                    .canonical();
                    if !set.contains(&rewritten) && !additions.contains(&rewritten) {
                        additions.push(rewritten);
                    }
                }
            }
        }
        if additions.is_empty() {
            break;
        }
        set.extend(additions);
    }
    if has_contradiction(&set) {
        Saturation::Contradiction
    } else {
        Saturation::Consistent(set)
    }
}

/// Match a rule body literal (variables bindable) against a saturated
/// literal, extending the rule-variable binding. Wildcards in the saturated
/// literal match anything, consistently within the one literal.
fn match_rule_literal(
    body: &Literal,
    cand: &SatLiteral,
    binding: &[(String, SatTerm)],
) -> Option<Vec<(String, SatTerm)>> {
    let body_sat = SatLiteral::from_literal(body);
    if body_sat.positive != cand.positive || body_sat.pred != cand.pred {
        return None;
    }
    let mut out = binding.to_vec();
    let mut wild_binds: Vec<(u32, SatTerm)> = Vec::new();
    let body_terms: Vec<&Term> = body.label.terms();
    for (bt, ct) in body_terms.iter().zip(cand.args.iter()) {
        let resolved: SatTerm = if bt.is_variable() {
            match out.iter().find(|(n, _)| n == bt.name()) {
                Some((_, v)) => v.clone(),
                None => {
                    out.push((bt.name().to_string(), ct.clone()));
                    continue;
                }
            }
        } else {
            SatTerm::Fixed((*bt).clone())
        };
        match ct {
            SatTerm::Wild(w) => match wild_binds.iter().find(|(id, _)| id == w) {
                Some((_, prev)) if *prev != resolved => return None,
                Some(_) => {}
                None => wild_binds.push((*w, resolved)),
            },
            fixed => {
                if *fixed != resolved {
                    return None;
                }
            }
        }
    }
    Some(out)
}

fn instantiate_head(
    head: &Literal,
    binding: &[(String, SatTerm)],
    wild_counter: &mut u32,
) -> SatLiteral {
    let mut local: Vec<(String, SatTerm)> = Vec::new();
    let mut resolve = |t: &Term| -> SatTerm {
        if t.is_variable() {
            if let Some((_, v)) = binding.iter().find(|(n, _)| n == t.name()) {
                return v.clone();
            }
            if let Some((_, v)) = local.iter().find(|(n, _)| n == t.name()) {
                return v.clone();
            }
            *wild_counter += 1;
            let w = SatTerm::Wild(*wild_counter);
            local.push((t.name().to_string(), w.clone()));
            w
        } else {
            SatTerm::Fixed(t.clone())
        }
    };
    let (pred, args) = match &head.label {
        Label::Equality(a, b) => (SatPred::Equality, vec![resolve(a), resolve(b)]),
        Label::Atom { pred, args } => (SatPred::Pred(*pred), args.iter().map(&mut resolve).collect()),
    };
    SatLiteral {
        positive: head.positive,
        pred,
        args,
    }
    .canonical()
}

fn has_contradiction(set: &[SatLiteral]) -> bool {
    for neg in set.iter().filter(|l| !l.positive) {
        // t != t is false on its own
        if neg.pred == SatPred::Equality && neg.args[0] == neg.args[1] {
            if let SatTerm::Fixed(_) = neg.args[0] {
                return true;
            }
        }
        for pos in set.iter().filter(|l| l.positive) {
            if pos.pred != neg.pred || pos.args.len() != neg.args.len() {
                continue;
            }
            if sat_args_unify(&pos.args, &neg.args) {
                return true;
            }
        }
    }
    false
}

/// Can two saturated argument lists denote the same ground atom? Fixed terms
/// must agree syntactically; wildcards absorb anything, consistently per
/// literal side.
fn sat_args_unify(a: &[SatTerm], b: &[SatTerm]) -> bool {
    let mut wild_a: Vec<(u32, SatTerm)> = Vec::new();
    let mut wild_b: Vec<(u32, SatTerm)> = Vec::new();
    for (x, y) in a.iter().zip(b.iter()) {
        match (x, y) {
            (SatTerm::Fixed(u), SatTerm::Fixed(v)) => {
                if u != v {
                    return false;
                }
            }
            (SatTerm::Wild(w), other) => {
                match wild_a.iter().find(|(id, _)| id == w) {
                    Some((_, prev)) if prev != other => return false,
                    Some(_) => {}
                    None => wild_a.push((*w, other.clone())),
                }
            }
            (other, SatTerm::Wild(w)) => match wild_b.iter().find(|(id, _)| id == w) {
                Some((_, prev)) if prev != other => return false,
                Some(_) => {}
                None => wild_b.push((*w, other.clone())),
            },
        }
    }
    true
}

/// Decide the query by per-path theta-subsumption: TRUE only if for every
/// antecedent path there is a consequent path and a substitution of its
/// non-shared variables (shared variables mapped identically) landing inside
/// the antecedent's saturation. Contradictory antecedent paths are
/// unreachable and vacuously fine.
pub fn implies_exists(query: &EntailmentQuery, theory: &BackgroundTheory) -> bool {
    for ante in &query.antecedent {
        match saturate(&ante.0, theory, theory.depth) {
            Saturation::Contradiction => continue,
            Saturation::Consistent(sat) => {
                let ok = query
                    .consequent
                    .iter()
                    .any(|c| subsumes(&c.0, &sat, &query.shared));
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

type Subst = Vec<(String, Term)>;

fn resolve(term: &Term, shared: &BTreeSet<Term>, subst: &Subst) -> Option<Term> {
    if !term.is_variable() || shared.contains(term) {
        return Some(term.clone());
    }
    subst
        .iter()
        .find(|(n, _)| n == term.name())
        .map(|(_, t)| t.clone())
}

/// Backtracking search for a substitution of the consequent's free variables
/// embedding every literal into the saturated set. Equalities may also be
/// discharged by making both sides the same term.
fn subsumes(consequent: &[Literal], sat: &[SatLiteral], shared: &BTreeSet<Term>) -> bool {
    fn go(lits: &[Literal], sat: &[SatLiteral], shared: &BTreeSet<Term>, subst: &Subst) -> bool {
        let Some((lit, rest)) = lits.split_first() else {
            return true;
        };
        // identity discharge for equalities
        if let Label::Equality(a, b) = &lit.label {
            let ra = resolve(a, shared, subst);
            let rb = resolve(b, shared, subst);
            if lit.positive {
                match (&ra, &rb) {
                    (Some(x), Some(y)) if x == y => {
                        if go(rest, sat, shared, subst) {
                            return true;
                        }
                    }
                    (Some(x), None) => {
                        let mut s = subst.clone();
                        s.push((b.name().to_string(), x.clone()));
                        if go(rest, sat, shared, &s) {
                            return true;
                        }
                    }
                    (None, Some(y)) => {
                        let mut s = subst.clone();
                        s.push((a.name().to_string(), y.clone()));
                        if go(rest, sat, shared, &s) {
                            return true;
                        }
                    }
                    (None, None) => {
                        let mut s = subst.clone();
                        s.push((b.name().to_string(), a.clone()));
                        if go(rest, sat, shared, &s) {
                            return true;
                        }
                    }
                    _ => {}
                }
            } else if let (Some(x), Some(y)) = (&ra, &rb) {
                if x == y {
                    return false;
                }
            }
        }
        // match against saturated literals
        let lit_sat = SatLiteral::from_literal(lit);
        for cand in sat {
            if cand.positive != lit_sat.positive || cand.pred != lit_sat.pred {
                continue;
            }
            let mut orders: Vec<Vec<&Term>> = vec![lit.label.terms()];
            if lit_sat.pred == SatPred::Equality {
                let mut rev = lit.label.terms();
                rev.reverse();
                orders.push(rev);
            }
            for terms in orders {
                if let Some(ext) = match_consequent(&terms, cand, shared, subst) {
                    if go(rest, sat, shared, &ext) {
                        return true;
                    }
                }
            }
        }
        false
    }
    go(consequent, sat, shared, &Vec::new())
}

fn match_consequent(
    terms: &[&Term],
    cand: &SatLiteral,
    shared: &BTreeSet<Term>,
    subst: &Subst,
) -> Option<Subst> {
    let mut out = subst.clone();
    let mut wilds: Vec<(u32, Term)> = Vec::new();
    for (ct, st) in terms.iter().zip(cand.args.iter()) {
        let resolved = resolve(ct, shared, &out);
        match st {
            SatTerm::Fixed(t) => match resolved {
                Some(r) => {
                    if r != *t {
                        return None;
                    }
                }
                None => out.push((ct.name().to_string(), t.clone())),
            },
            SatTerm::Wild(w) => {
                // wildcard absorbs the term; repeated wildcards must see the
                // same (resolved) term
                let key = resolved.unwrap_or_else(|| (*ct).clone());
                match wilds.iter().find(|(id, _)| id == w) {
                    Some((_, prev)) if *prev != key => return None,
                    Some(_) => {}
                    None => wilds.push((*w, key)),
                }
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::PredId;
    use crate::pool::Pool;

    fn lit(pred: PredId, args: Vec<Term>, positive: bool) -> Literal {
        Literal {
            label: Label::atom(pred, args),
            positive,
        }
    }

    #[test]
    fn saturate_applies_rule_with_universal_head_var() {
        let mut pool = Pool::new();
        let on = pool.register_predicate("on", 2, vec![]).unwrap();
        let clear = pool.register_predicate("clear", 1, vec![]).unwrap();
        let rule = Rule {
            body: vec![lit(
                on,
                vec![Term::variable("x"), Term::variable("y")],
                true,
            )],
            head: lit(clear, vec![Term::variable("y")], false),
        };
        let theory = BackgroundTheory::new(vec![rule]);
        let input = vec![lit(
            on,
            vec![Term::constant("a"), Term::constant("b")],
            true,
        )];
        match saturate(&input, &theory, 1) {
            Saturation::Consistent(set) => {
                let derived = SatLiteral {
                    positive: false,
                    pred: SatPred::Pred(clear),
                    args: vec![SatTerm::Fixed(Term::constant("b"))],
                };
                assert!(set.contains(&derived));
            }
            Saturation::Contradiction => panic!("unexpected contradiction"),
        }
    }

    #[test]
    fn saturate_empty_theory_is_identity() {
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let input = vec![lit(p, vec![Term::constant("a")], true)];
        match saturate(&input, &BackgroundTheory::empty(), 3) {
            Saturation::Consistent(set) => assert_eq!(set.len(), 1),
            _ => panic!(),
        }
    }

    #[test]
    fn saturate_detects_contradiction() {
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let input = vec![
            lit(p, vec![Term::constant("a")], true),
            lit(p, vec![Term::constant("a")], false),
        ];
        assert_eq!(
            saturate(&input, &BackgroundTheory::empty(), 0),
            Saturation::Contradiction
        );
    }

    #[test]
    fn renaming_subsumption_holds_without_shared_vars() {
        // antecedent p(y), consequent p(x): sigma = {x/y}
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let query = EntailmentQuery {
            antecedent: vec![PathFormula(vec![lit(p, vec![Term::variable("y")], true)])],
            consequent: vec![PathFormula(vec![lit(p, vec![Term::variable("x")], true)])],
            shared: BTreeSet::new(),
        };
        assert!(implies_exists(&query, &BackgroundTheory::empty()));
    }

    #[test]
    fn shared_variable_blocks_renaming() {
        // antecedent p(y), consequent p(x) with x shared: x must stay x
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let mut shared = BTreeSet::new();
        shared.insert(Term::variable("x"));
        let query = EntailmentQuery {
            antecedent: vec![PathFormula(vec![lit(p, vec![Term::variable("y")], true)])],
            consequent: vec![PathFormula(vec![lit(p, vec![Term::variable("x")], true)])],
            shared,
        };
        assert!(!implies_exists(&query, &BackgroundTheory::empty()));
    }

    #[test]
    fn two_literal_consequent_via_single_witness() {
        // Bin(b1,Paris) implies exists b2: Bin(b1,Paris) and Bin(b2,Paris),
        // with b1 shared: sigma maps b2 to b1.
        let mut pool = Pool::new();
        let bin = pool.register_predicate("Bin", 2, vec![]).unwrap();
        let b1 = Term::variable("b1");
        let b2 = Term::variable("b2");
        let paris = Term::constant("Paris");
        let mut shared = BTreeSet::new();
        shared.insert(b1.clone());
        let query = EntailmentQuery {
            antecedent: vec![PathFormula(vec![lit(
                bin,
                vec![b1.clone(), paris.clone()],
                true,
            )])],
            consequent: vec![PathFormula(vec![
                lit(bin, vec![b1.clone(), paris.clone()], true),
                lit(bin, vec![b2, paris], true),
            ])],
            shared,
        };
        assert!(implies_exists(&query, &BackgroundTheory::empty()));
    }

    #[test]
    fn swap_rule_proves_unshared_but_not_shared_query() {
        // theory: h(x,y) -> q(y,x). With y shared, q(_, y) is underivable.
        let mut pool = Pool::new();
        let h = pool.register_predicate("h", 2, vec![]).unwrap();
        let q = pool.register_predicate("q", 2, vec![]).unwrap();
        let rule = Rule {
            body: vec![lit(h, vec![Term::variable("x"), Term::variable("y")], true)],
            head: lit(q, vec![Term::variable("y"), Term::variable("x")], true),
        };
        let theory = BackgroundTheory::new(vec![rule]);
        let ante = vec![PathFormula(vec![lit(
            h,
            vec![Term::variable("z"), Term::variable("y")],
            true,
        )])];
        let cons = vec![PathFormula(vec![lit(
            q,
            vec![Term::variable("x"), Term::variable("y")],
            true,
        )])];
        let unshared = EntailmentQuery {
            antecedent: ante.clone(),
            consequent: cons.clone(),
            shared: BTreeSet::new(),
        };
        assert!(implies_exists(&unshared, &theory));
        let mut shared = BTreeSet::new();
        shared.insert(Term::variable("y"));
        let with_shared = EntailmentQuery {
            antecedent: ante,
            consequent: cons,
            shared,
        };
        assert!(!implies_exists(&with_shared, &theory));
    }

    #[test]
    fn equality_literal_discharged_by_identity() {
        // consequent (u = v) with both free is satisfiable by u := v
        let query = EntailmentQuery {
            antecedent: vec![PathFormula(vec![])],
            consequent: vec![PathFormula(vec![Literal::pos(Label::equality(
                Term::variable("u"),
                Term::variable("v"),
            ))])],
            shared: BTreeSet::new(),
        };
        assert!(implies_exists(&query, &BackgroundTheory::empty()));
    }

    #[test]
    fn equality_congruence_derives_renamed_atom() {
        // (x = y) and p(x) entail p(y) with y fixed
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let mut shared = BTreeSet::new();
        shared.insert(Term::variable("y"));
        let query = EntailmentQuery {
            antecedent: vec![PathFormula(vec![
                Literal::pos(Label::equality(Term::variable("x"), Term::variable("y"))),
                lit(p, vec![Term::variable("x")], true),
            ])],
            consequent: vec![PathFormula(vec![lit(p, vec![Term::variable("y")], true)])],
            shared,
        };
        assert!(implies_exists(&query, &BackgroundTheory::empty()));
    }
}
