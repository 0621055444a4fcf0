//! The relational MDP model: action schemas built from truth-value diagrams
//! (one per affected predicate and deterministic alternative), per-alternative
//! choice-probability diagrams, a reward diagram, background rules, and the
//! discount.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{FoddError, Result};
use crate::label::{Label, PredId};
use crate::pool::{Fodd, Op, Pool};
use crate::reasoner::BackgroundTheory;
use crate::reductions::{reduce_full, ReductionBudget};
use crate::term::{Term, TermSort};

/// Truth-value diagram for one predicate under one deterministic action
/// alternative: a 0/1-leaf diagram over the predicate's parameters and the
/// action's parameters giving the predicate's truth value in the next state.
#[derive(Debug, Clone)]
pub struct Tvd {
    pub pred: PredId,
    /// Predicate parameters, as variables, in argument order.
    pub params: Vec<Term>,
    pub diagram: Fodd,
}

/// One deterministic alternative of a stochastic action.
#[derive(Debug, Clone)]
pub struct Alternative {
    pub name: String,
    pub tvds: Vec<Tvd>,
}

impl Alternative {
    pub fn tvd_for(&self, pred: PredId) -> Option<&Tvd> {
        self.tvds.iter().find(|t| t.pred == pred)
    }
}

/// A stochastic action: named deterministic alternatives plus one
/// choice-probability diagram per alternative.
#[derive(Debug, Clone)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Term>,
    pub alternatives: Vec<Alternative>,
    /// Probability diagram per alternative, aligned by name.
    pub probs: Vec<(String, Fodd)>,
}

impl ActionSchema {
    pub fn prob_for(&self, alternative: &str) -> Option<Fodd> {
        self.probs
            .iter()
            .find(|(n, _)| n == alternative)
            .map(|(_, d)| *d)
    }
}

/// The model: predicates live in the pool; everything else is here.
#[derive(Debug, Clone)]
pub struct RmdpModel {
    pub name: String,
    pub constants: Vec<String>,
    pub background: BackgroundTheory,
    pub reward: Fodd,
    pub actions: Vec<ActionSchema>,
    pub discount: f64,
    pub absorbing: bool,
}

impl RmdpModel {
    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }
}

/// A single validation failure. Violations are data, not errors; a model is
/// valid iff `validate` returns none.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RewardLeafNegative(f64),
    DiscountOutOfRange(f64),
    AbsorbingNeedsSingleNonzeroLeaf(usize),
    TvdLeafNotBinary {
        action: String,
        alternative: String,
        pred: String,
        leaf: f64,
    },
    TvdForeignTerm {
        action: String,
        alternative: String,
        pred: String,
        term: String,
    },
    ProbHasVariables {
        action: String,
        alternative: String,
        term: String,
    },
    ProbLeafOutOfRange {
        action: String,
        alternative: String,
        leaf: f64,
    },
    ProbSumNotOne {
        action: String,
    },
    MissingProb {
        action: String,
        alternative: String,
    },
    NoAlternatives {
        action: String,
    },
    ConstantSortConflict {
        constant: String,
        sorts: Vec<String>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RewardLeafNegative(v) => write!(f, "reward has a negative leaf {v}"),
            Violation::DiscountOutOfRange(g) => {
                write!(f, "discount {g} is outside the open interval (0,1)")
            }
            Violation::AbsorbingNeedsSingleNonzeroLeaf(n) => write!(
                f,
                "absorbing formulation requires exactly one non-zero reward leaf, found {n}"
            ),
            Violation::TvdLeafNotBinary {
                action,
                alternative,
                pred,
                leaf,
            } => write!(
                f,
                "tvd for {pred} under {action}/{alternative} has non-binary leaf {leaf}"
            ),
            Violation::TvdForeignTerm {
                action,
                alternative,
                pred,
                term,
            } => write!(
                f,
                "tvd for {pred} under {action}/{alternative} mentions foreign term '{term}'"
            ),
            Violation::ProbHasVariables {
                action,
                alternative,
                term,
            } => write!(
                f,
                "probability diagram of {action}/{alternative} contains variable '{term}'"
            ),
            Violation::ProbLeafOutOfRange {
                action,
                alternative,
                leaf,
            } => write!(
                f,
                "probability diagram of {action}/{alternative} has leaf {leaf} outside [0,1]"
            ),
            Violation::ProbSumNotOne { action } => write!(
                f,
                "choice probabilities of action {action} do not sum to one in every state"
            ),
            Violation::MissingProb {
                action,
                alternative,
            } => write!(f, "action {action} has no probability for alternative {alternative}"),
            Violation::NoAlternatives { action } => {
                write!(f, "action {action} declares no alternatives")
            }
            Violation::ConstantSortConflict { constant, sorts } => write!(
                f,
                "constant {constant} is used at positions of different sorts: {}",
                sorts.join(", ")
            ),
        }
    }
}

/// Check every model invariant. The probability partition check combines the
/// per-alternative diagrams with plus and requires the result to reduce to
/// the constant-one leaf.
pub fn validate(pool: &mut Pool, model: &RmdpModel) -> Vec<Violation> {
    let mut out = Vec::new();
    for leaf in pool.leaves(model.reward) {
        if leaf < 0.0 {
            out.push(Violation::RewardLeafNegative(leaf));
        }
    }
    if !(model.discount > 0.0 && model.discount < 1.0) {
        out.push(Violation::DiscountOutOfRange(model.discount));
    }
    if model.absorbing {
        let nonzero = pool
            .leaves(model.reward)
            .iter()
            .filter(|v| **v != 0.0)
            .count();
        if nonzero != 1 {
            out.push(Violation::AbsorbingNeedsSingleNonzeroLeaf(nonzero));
        }
    }
    for action in &model.actions {
        if action.alternatives.is_empty() {
            out.push(Violation::NoAlternatives {
                action: action.name.clone(),
            });
        }
        for alt in &action.alternatives {
            for tvd in &alt.tvds {
                for leaf in pool.leaves(tvd.diagram) {
                    if leaf != 0.0 && leaf != 1.0 {
                        out.push(Violation::TvdLeafNotBinary {
                            action: action.name.clone(),
                            alternative: alt.name.clone(),
                            pred: pool.predicate(tvd.pred).name.clone(),
                            leaf,
                        });
                    }
                }
                // only predicate parameters, action parameters, and constants
                for f in pool.preorder(tvd.diagram) {
                    let Some(label) = pool.label(f) else { continue };
                    for t in label.terms() {
                        let ok = match t.sort() {
                            TermSort::Constant => true,
                            TermSort::ActionParam => action.params.contains(t),
                            TermSort::Variable => tvd.params.contains(t),
                        };
                        if !ok {
                            out.push(Violation::TvdForeignTerm {
                                action: action.name.clone(),
                                alternative: alt.name.clone(),
                                pred: pool.predicate(tvd.pred).name.clone(),
                                term: t.to_string(),
                            });
                        }
                    }
                }
            }
            if action.prob_for(&alt.name).is_none() {
                out.push(Violation::MissingProb {
                    action: action.name.clone(),
                    alternative: alt.name.clone(),
                });
            }
        }
        let mut sum: Option<Fodd> = None;
        for (alt_name, prob) in &action.probs {
            for f in pool.preorder(*prob) {
                let Some(label) = pool.label(f) else { continue };
                for t in label.terms() {
                    if t.is_variable() {
                        out.push(Violation::ProbHasVariables {
                            action: action.name.clone(),
                            alternative: alt_name.clone(),
                            term: t.to_string(),
                        });
                    }
                }
            }
            for leaf in pool.leaves(*prob) {
                if !(0.0..=1.0).contains(&leaf) {
                    out.push(Violation::ProbLeafOutOfRange {
                        action: action.name.clone(),
                        alternative: alt_name.clone(),
                        leaf,
                    });
                }
            }
            sum = Some(match sum {
                None => *prob,
                Some(acc) => pool.apply(acc, *prob, Op::Add),
            });
        }
        if let Some(total) = sum {
            let reduced = reduce_full(
                pool,
                total,
                &BackgroundTheory::empty(),
                &ReductionBudget::default(),
            );
            if pool.leaf_value(reduced) != Some(1.0) {
                out.push(Violation::ProbSumNotOne {
                    action: action.name.clone(),
                });
            }
        }
    }
    if let Err(conflicts) = infer_constant_sorts(pool, model) {
        out.extend(conflicts);
    }
    out
}

/// Replace the predicate parameters of a truth-value diagram with the actual
/// arguments of a node and rebuild the result sorted.
pub fn instantiate_tvd(pool: &mut Pool, tvd: &Tvd, args: &[Term]) -> Result<Fodd> {
    if args.len() != tvd.params.len() {
        return Err(FoddError::ArityMismatch {
            pred: pool.predicate(tvd.pred).name.clone(),
            expected: tvd.params.len(),
            got: args.len(),
        });
    }
    let mut subst = BTreeMap::new();
    for (p, a) in tvd.params.iter().zip(args.iter()) {
        subst.insert(p.clone(), a.clone());
    }
    pool.rename(tvd.diagram, &subst)
}

/// The identity diagram `p(args) ? 1 : 0` used for predicates an alternative
/// does not mention.
pub fn frame_tvd(pool: &mut Pool, pred: PredId, args: &[Term]) -> Result<Fodd> {
    let one = pool.leaf_signed(1.0);
    let zero = pool.leaf_signed(0.0);
    pool.branch(Label::atom(pred, args.to_vec()), one, zero)
}

/// Sorts of constants, inferred from the argument positions where they occur
/// across all of the model's diagrams. Unused constants default to "obj".
pub fn infer_constant_sorts(
    pool: &Pool,
    model: &RmdpModel,
) -> std::result::Result<HashMap<String, String>, Vec<Violation>> {
    let mut sorts: HashMap<String, BTreeMap<String, ()>> = HashMap::new();
    let mut diagrams = vec![model.reward];
    for action in &model.actions {
        for alt in &action.alternatives {
            diagrams.extend(alt.tvds.iter().map(|t| t.diagram));
        }
        diagrams.extend(action.probs.iter().map(|(_, d)| *d));
    }
    for d in diagrams {
        for f in pool.preorder(d) {
            if let Some(Label::Atom { pred, args }) = pool.label(f) {
                let decl = pool.predicate(*pred);
                for (i, t) in args.iter().enumerate() {
                    if t.is_constant() {
                        let sort = decl
                            .arg_sorts
                            .get(i)
                            .cloned()
                            .unwrap_or_else(|| "obj".to_string());
                        sorts.entry(t.name().to_string()).or_default().insert(sort, ());
                    }
                }
            }
        }
    }
    let mut out = HashMap::new();
    let mut conflicts = Vec::new();
    for c in &model.constants {
        match sorts.get(c) {
            None => {
                out.insert(c.clone(), "obj".to_string());
            }
            Some(s) if s.len() == 1 => {
                out.insert(c.clone(), s.keys().next().unwrap().clone());
            }
            Some(s) => conflicts.push(Violation::ConstantSortConflict {
                constant: c.clone(),
                sorts: s.keys().cloned().collect(),
            }),
        }
    }
    if conflicts.is_empty() {
        Ok(out)
    } else {
        Err(conflicts)
    }
}

/// Sorts of an action's parameters, inferred the same way. Parameters that
/// never occur in a typed position fall back to "obj".
pub fn infer_param_sorts(pool: &Pool, action: &ActionSchema) -> HashMap<String, String> {
    let mut out = HashMap::new();
    let mut diagrams: Vec<Fodd> = action
        .alternatives
        .iter()
        .flat_map(|a| a.tvds.iter().map(|t| t.diagram))
        .collect();
    diagrams.extend(action.probs.iter().map(|(_, d)| *d));
    for d in diagrams {
        for f in pool.preorder(d) {
            if let Some(Label::Atom { pred, args }) = pool.label(f) {
                let decl = pool.predicate(*pred);
                for (i, t) in args.iter().enumerate() {
                    if t.is_action_param() && action.params.contains(t) {
                        let sort = decl
                            .arg_sorts
                            .get(i)
                            .cloned()
                            .unwrap_or_else(|| "obj".to_string());
                        out.entry(t.name().to_string()).or_insert(sort);
                    }
                }
            }
        }
    }
    for p in &action.params {
        out.entry(p.name().to_string()).or_insert_with(|| "obj".to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_tvd_is_identity_test() {
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let d = frame_tvd(&mut pool, p, &[Term::variable("x")]).unwrap();
        assert_eq!(pool.leaf_value(pool.hi(d)), Some(1.0));
        assert_eq!(pool.leaf_value(pool.lo(d)), Some(0.0));
    }

    #[test]
    fn instantiate_rejects_arity_mismatch() {
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 2, vec![]).unwrap();
        let d = frame_tvd(
            &mut pool,
            p,
            &[Term::variable("X"), Term::variable("Y")],
        )
        .unwrap();
        let tvd = Tvd {
            pred: p,
            params: vec![Term::variable("X"), Term::variable("Y")],
            diagram: d,
        };
        assert!(instantiate_tvd(&mut pool, &tvd, &[Term::variable("a")]).is_err());
    }
}
