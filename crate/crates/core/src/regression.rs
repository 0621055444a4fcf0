//! Relational value iteration: regression of a value function through
//! deterministic action alternatives by block combination, probabilistic
//! Q computation, object maximization, the action maximum, the convergence
//! test, and greedy action extraction.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{max_all, scalar_combine};
use crate::error::{FoddError, Result};
use crate::eval::{Interpretation, Valuation};
use crate::label::Label;
use crate::pool::{Fodd, Op, Pool};
use crate::reductions::{reduce_full, reduce_strong, ReductionBudget};
use crate::rmdp::{frame_tvd, instantiate_tvd, ActionSchema, Alternative, RmdpModel};
use crate::term::Term;

/// Parameterized per-action Q functions, with the action parameters recorded
/// before object maximization.
#[derive(Debug, Clone)]
pub struct QFunctionSet {
    pub entries: Vec<QEntry>,
}

#[derive(Debug, Clone)]
pub struct QEntry {
    pub action: String,
    pub diagram: Fodd,
    pub params: Vec<Term>,
}

/// Outcome of value iteration.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub value: Fodd,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Regress a value function through one deterministic alternative by block
/// combination: process nodes children-first and combine each node's
/// instantiated truth-value diagram `Bn` with the processed children as
/// `[Bn*Bt] + [(1-Bn)*Bf]`. Equality nodes regress to themselves, since
/// actions do not change object identity. Only strong reductions happen
/// mid-stream; the blocks share variables, so weak reductions must wait.
pub fn regress_deterministic(
    pool: &mut Pool,
    value: Fodd,
    action: &ActionSchema,
    alternative: &Alternative,
    _model: &RmdpModel,
) -> Result<Fodd> {
    let _ = action;
    let one = pool.leaf_signed(1.0);
    let zero = pool.leaf_signed(0.0);
    let order = pool.preorder(value);
    let mut memo: HashMap<Fodd, Fodd> = HashMap::new();
    for f in order.into_iter().rev() {
        let out = match pool.label(f).cloned() {
            None => f,
            Some(label) => {
                let bt = memo[&pool.hi(f)];
                let bf = memo[&pool.lo(f)];
                let bn = match &label {
                    Label::Equality(..) => pool.branch(label.clone(), one, zero)?,
                    Label::Atom { pred, args } => match alternative.tvd_for(*pred) {
                        Some(tvd) => instantiate_tvd(pool, tvd, args)?,
                        None => frame_tvd(pool, *pred, args)?,
                    },
                };
                let not_bn = pool.apply(one, bn, Op::Subtract);
                let hi_part = pool.apply(bn, bt, Op::Multiply);
                let lo_part = pool.apply(not_bn, bf, Op::Multiply);
                let combined = pool.apply(hi_part, lo_part, Op::Add);
                reduce_strong(pool, combined)
            }
        };
        memo.insert(f, out);
    }
    Ok(memo[&value])
}

/// The pre-reward, pre-discount value of attempting the action: the
/// probability-weighted sum of the regressions of all alternatives. The
/// summands are independent functions, so they are standardized apart
/// before the addition; action parameters stay fixed. Weak and strong
/// reductions run afterwards.
pub fn regress_action(
    pool: &mut Pool,
    value: Fodd,
    action: &ActionSchema,
    model: &RmdpModel,
    budget: &ReductionBudget,
) -> Result<Fodd> {
    let mut parts = Vec::with_capacity(action.alternatives.len());
    for alt in &action.alternatives {
        let regressed = regress_deterministic(pool, value, action, alt, model)?;
        let prob = action
            .prob_for(&alt.name)
            .ok_or_else(|| FoddError::Other(format!("no probability for {}", alt.name)))?;
        parts.push(pool.apply(prob, regressed, Op::Multiply));
    }
    let parts = pool.standardize_apart(&parts)?;
    let mut acc = parts[0];
    for &p in &parts[1..] {
        acc = pool.apply(acc, p, Op::Add);
    }
    Ok(reduce_full(pool, acc, &model.background, budget))
}

/// Turn the action parameters into fresh variables so that max aggregation
/// ranges over them; additional reduction is typically possible afterwards.
pub fn object_maximize(
    pool: &mut Pool,
    q: Fodd,
    params: &[Term],
    model: &RmdpModel,
    budget: &ReductionBudget,
) -> Result<Fodd> {
    let mut subst = BTreeMap::new();
    for p in params {
        let fresh = pool.fresh_name(p.name());
        subst.insert(p.clone(), Term::variable(fresh));
    }
    let renamed = pool.rename(q, &subst)?;
    Ok(reduce_full(pool, renamed, &model.background, budget))
}

fn combine_with_reward(
    pool: &mut Pool,
    discounted: Fodd,
    model: &RmdpModel,
    budget: &ReductionBudget,
) -> Result<Fodd> {
    let parts = pool.standardize_apart(&[model.reward, discounted])?;
    let op = if model.absorbing { Op::Max } else { Op::Add };
    let q = pool.apply(parts[0], parts[1], op);
    Ok(reduce_full(pool, q, &model.background, budget))
}

/// The parameterized Q function of one action: reward plus the discounted
/// probability-weighted regression sum (or their max under the absorbing
/// formulation). Action parameters are left in place.
pub fn q_function(
    pool: &mut Pool,
    value: Fodd,
    action: &ActionSchema,
    model: &RmdpModel,
    budget: &ReductionBudget,
) -> Result<Fodd> {
    let t = regress_action(pool, value, action, model, budget)?;
    let discounted = scalar_combine(pool, t, model.discount, Op::Multiply)?;
    combine_with_reward(pool, discounted, model, budget)
}

/// Q functions for every action, with parameters recorded.
pub fn q_set(
    pool: &mut Pool,
    value: Fodd,
    model: &RmdpModel,
    budget: &ReductionBudget,
) -> Result<QFunctionSet> {
    let mut entries = Vec::new();
    for action in &model.actions {
        let diagram = q_function(pool, value, action, model, budget)?;
        entries.push(QEntry {
            action: action.name.clone(),
            diagram,
            params: action.params.clone(),
        });
    }
    Ok(QFunctionSet { entries })
}

/// One Bellman backup over diagrams. Object maximization runs before the
/// reward is added, which exposes more reductions than the plain Q form.
pub fn vi_step(
    pool: &mut Pool,
    value: Fodd,
    model: &RmdpModel,
    budget: &ReductionBudget,
) -> Result<Fodd> {
    let mut qs = Vec::with_capacity(model.actions.len());
    for action in &model.actions {
        let t = regress_action(pool, value, action, model, budget)?;
        let maxed = object_maximize(pool, t, &action.params, model, budget)?;
        let discounted = scalar_combine(pool, maxed, model.discount, Op::Multiply)?;
        qs.push(combine_with_reward(pool, discounted, model, budget)?);
    }
    max_all(pool, &qs, &model.background, budget)
}

/// Conservative upper bound on the sup over interpretations of the absolute
/// map difference: both diagrams are renamed to position-canonical variable
/// names and subtracted in both directions; the bound is the largest leaf,
/// clamped below by the exact difference measured on the supplied test
/// states.
pub fn diagram_distance(
    pool: &mut Pool,
    a: Fodd,
    b: Fodd,
    test_states: &[Interpretation],
) -> Result<f64> {
    let ca = pool.canonicalize(a)?;
    let cb = pool.canonicalize(b)?;
    let d1 = pool.apply(ca, cb, Op::Subtract);
    let d2 = pool.apply(cb, ca, Op::Subtract);
    let mut bound = pool.max_leaf(d1).max(pool.max_leaf(d2)).max(0.0);
    for state in test_states {
        let va = pool.map_value(a, state)?;
        let vb = pool.map_value(b, state)?;
        bound = bound.max((va - vb).abs());
    }
    Ok(bound)
}

/// Value iteration from `V0 = reward` until the diagram distance between
/// consecutive value functions drops to `epsilon*(1-gamma)/(2*gamma)` or the
/// iteration limit is hit. The bound is conservative: it may run extra
/// iterations but never stops early on the test states.
pub fn solve(
    pool: &mut Pool,
    model: &RmdpModel,
    epsilon: f64,
    max_iters: usize,
    budget: &ReductionBudget,
    test_states: &[Interpretation],
) -> Result<SolveResult> {
    if epsilon <= 0.0 {
        return Err(FoddError::Other("epsilon must be positive".into()));
    }
    let threshold = epsilon * (1.0 - model.discount) / (2.0 * model.discount);
    let mut value = model.reward;
    if max_iters == 0 {
        return Ok(SolveResult {
            value,
            iterations: 0,
            residual: f64::INFINITY,
            converged: false,
        });
    }
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for i in 1..=max_iters {
        let next = vi_step(pool, value, model, budget)?;
        residual = diagram_distance(pool, next, value, test_states)?;
        value = next;
        iterations = i;
        if residual <= threshold {
            converged = true;
            break;
        }
    }
    Ok(SolveResult {
        value,
        iterations,
        residual,
        converged,
    })
}

/// Greedy action choice in a state: compute the Q set from the value
/// function, treat each action's parameters as variables, and return the
/// maximizing action with the binding of its parameters. Ties go to the
/// earlier declared action and the lexicographically first binding.
pub fn extract_action(
    pool: &mut Pool,
    model: &RmdpModel,
    value: Fodd,
    state: &Interpretation,
    budget: &ReductionBudget,
) -> Result<(String, Vec<(String, String)>)> {
    if state.domain_size() == 0 {
        return Err(FoddError::EmptyDomain);
    }
    let qset = q_set(pool, value, model, budget)?;
    let mut best: Option<(f64, String, Vec<(String, String)>)> = None;
    for entry in &qset.entries {
        let mut subst = BTreeMap::new();
        let mut record = Vec::new();
        for p in &entry.params {
            let fresh = Term::variable(pool.fresh_name(p.name()));
            record.push(fresh.key());
            subst.insert(p.clone(), fresh);
        }
        let renamed = pool.rename(entry.diagram, &subst)?;
        let (value, binding) = pool.map_argmax(renamed, state, &Valuation::new(), &record)?;
        let named: Vec<(String, String)> = entry
            .params
            .iter()
            .zip(binding.iter())
            .map(|(p, (_, elem))| {
                (
                    p.name().to_string(),
                    state.elements()[*elem].clone(),
                )
            })
            .collect();
        match &best {
            Some((bv, _, _)) if *bv >= value => {}
            _ => best = Some((value, entry.action.clone(), named)),
        }
    }
    let (_, action, binding) =
        best.ok_or_else(|| FoddError::Other("model has no actions".into()))?;
    Ok((action, binding))
}
