use std::fmt;

use crate::term::Term;

/// Index of a predicate in a [`Pool`](crate::pool::Pool)'s registry. The
/// numeric order is the declaration order, which is also the predicate
/// order used when sorting labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub u32);

/// A node label: either an equality between two terms or a predicate atom.
///
/// The derived ordering is exactly the label order: equalities precede all
/// atoms, equalities compare by their (canonically oriented) sides, and
/// atoms compare first by predicate and then argument-wise by term order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Equality(Term, Term),
    Atom { pred: PredId, args: Vec<Term> },
}

impl Label {
    /// Build an equality label with its sides canonically oriented
    /// (smaller term first).
    pub fn equality(a: Term, b: Term) -> Self {
        if b < a {
            Label::Equality(b, a)
        } else {
            Label::Equality(a, b)
        }
    }

    pub fn atom(pred: PredId, args: Vec<Term>) -> Self {
        Label::Atom { pred, args }
    }

    pub fn is_equality(&self) -> bool {
        matches!(self, Label::Equality(..))
    }

    /// All terms mentioned by the label, in argument order.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Label::Equality(a, b) => vec![a, b],
            Label::Atom { args, .. } => args.iter().collect(),
        }
    }

    /// Apply a term substitution. Equality labels are re-oriented; an
    /// equality whose sides become identical is reported as `None` (the
    /// label is a tautology and the true branch should be taken).
    pub fn substitute(&self, subst: &dyn Fn(&Term) -> Term) -> Option<Label> {
        match self {
            Label::Equality(a, b) => {
                let a = subst(a);
                let b = subst(b);
                if a == b {
                    None
                } else {
                    Some(Label::equality(a, b))
                }
            }
            Label::Atom { pred, args } => Some(Label::Atom {
                pred: *pred,
                args: args.iter().map(subst).collect(),
            }),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Equality(a, b) => write!(f, "(= {a} {b})"),
            Label::Atom { pred, args } => {
                write!(f, "(#{}", pred.0)?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equalities_precede_atoms() {
        let eq = Label::equality(Term::variable("x"), Term::variable("y"));
        let at = Label::atom(PredId(0), vec![Term::variable("x")]);
        assert!(eq < at);
    }

    #[test]
    fn atoms_order_by_predicate_then_args() {
        let p0 = Label::atom(PredId(0), vec![Term::variable("z")]);
        let p1 = Label::atom(PredId(1), vec![Term::variable("a")]);
        assert!(p0 < p1);
        let a = Label::atom(PredId(0), vec![Term::constant("c"), Term::variable("x")]);
        let b = Label::atom(PredId(0), vec![Term::variable("a"), Term::variable("x")]);
        // constant argument sorts before a variable argument
        assert!(a < b);
    }

    #[test]
    fn equality_is_canonically_oriented() {
        let l1 = Label::equality(Term::variable("y"), Term::variable("x"));
        let l2 = Label::equality(Term::variable("x"), Term::variable("y"));
        assert_eq!(l1, l2);
    }
}
