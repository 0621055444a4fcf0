//! Brute-force grounded verifier: instantiate the model at a concrete
//! object set, enumerate all background-consistent states, run tabular value
//! iteration, and compare against the abstract diagrams. Exists to verify,
//! not to perform.

use std::collections::{BTreeSet, HashMap};

use crate::error::{FoddError, Result};
use crate::eval::{Interpretation, Valuation};
use crate::label::{Label, PredId};
use crate::paths::Literal;
use crate::pool::{Fodd, Pool};
use crate::reasoner::Rule;
use crate::rmdp::{infer_constant_sorts, infer_param_sorts, ActionSchema, Alternative, RmdpModel};
use crate::term::Term;

/// A ground action instance: schema name plus parameter bindings (by
/// parameter key, e.g. `b*`).
#[derive(Debug, Clone)]
pub struct GroundAction {
    pub action: String,
    pub binding: Vec<(String, usize)>,
}

/// The enumerated MDP: states as interpretations, ground actions, transition
/// distributions, and the reward vector.
#[derive(Debug)]
pub struct GroundMdp {
    pub elements: Vec<String>,
    pub states: Vec<Interpretation>,
    pub actions: Vec<GroundAction>,
    /// transitions[state][action] = (successor, probability) pairs.
    pub transitions: Vec<Vec<Vec<(usize, f64)>>>,
    pub rewards: Vec<f64>,
}

/// Default cap on the number of ground atoms (the state space is all
/// consistent subsets, so this bounds 2^n).
pub const DEFAULT_ATOM_CAP: usize = 24;

fn rule_holds(
    rule: &Rule,
    interp: &Interpretation,
    binding: &mut Vec<(String, usize)>,
    vars: &[String],
) -> bool {
    // enumerate all bindings of the rule's variables; body true must imply
    // head true
    fn lit_true(lit: &Literal, interp: &Interpretation, binding: &[(String, usize)]) -> bool {
        let resolve = |t: &Term| -> usize {
            if t.is_constant() {
                interp.constant(t.name()).expect("constant bound")
            } else {
                binding
                    .iter()
                    .find(|(n, _)| n == t.name())
                    .map(|(_, e)| *e)
                    .expect("rule variable bound")
            }
        };
        let truth = match &lit.label {
            Label::Equality(a, b) => resolve(a) == resolve(b),
            Label::Atom { pred, args } => {
                let elems: Vec<usize> = args.iter().map(resolve).collect();
                interp.holds(*pred, &elems)
            }
        };
        truth == lit.positive
    }
    fn go(
        rule: &Rule,
        interp: &Interpretation,
        binding: &mut Vec<(String, usize)>,
        vars: &[String],
    ) -> bool {
        match vars.split_first() {
            None => {
                let body_true = rule.body.iter().all(|l| lit_true(l, interp, binding));
                !body_true || lit_true(&rule.head, interp, binding)
            }
            Some((v, rest)) => {
                for e in 0..interp.domain_size() {
                    binding.push((v.clone(), e));
                    let ok = go(rule, interp, binding, rest);
                    binding.pop();
                    if !ok {
                        return false;
                    }
                }
                true
            }
        }
    }
    go(rule, interp, binding, vars)
}

fn rule_vars(rule: &Rule) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for lit in rule.body.iter().chain(std::iter::once(&rule.head)) {
        for t in lit.label.terms() {
            if t.is_variable() && !out.contains(&t.name().to_string()) {
                out.push(t.name().to_string());
            }
        }
    }
    out
}

/// Does the interpretation satisfy every background rule?
pub fn consistent(interp: &Interpretation, rules: &[Rule]) -> bool {
    rules.iter().all(|r| {
        let vars = rule_vars(r);
        rule_holds(r, interp, &mut Vec::new(), &vars)
    })
}

/// Successor interpretation of one deterministic alternative: every ground
/// atom's next truth value is its truth-value diagram evaluated in the
/// current state.
pub fn apply_alternative(
    pool: &Pool,
    alternative: &Alternative,
    interp: &Interpretation,
    param_binding: &[(String, usize)],
    atoms: &[(PredId, Vec<usize>)],
) -> Result<Interpretation> {
    let mut next = Interpretation::new(interp.elements().to_vec());
    for (name, elem) in interp.constants() {
        next.bind_constant(name.clone(), elem);
    }
    for (pred, args) in atoms {
        let truth = match alternative.tvd_for(*pred) {
            None => interp.holds(*pred, args),
            Some(tvd) => {
                let mut valuation = Valuation::new();
                for (p, e) in tvd.params.iter().zip(args.iter()) {
                    valuation.bind(p.key(), *e);
                }
                for (k, e) in param_binding {
                    valuation.bind(k.clone(), *e);
                }
                pool.evaluate(tvd.diagram, interp, &valuation)? == 1.0
            }
        };
        if truth {
            next.add_atom(*pred, args.clone());
        }
    }
    Ok(next)
}

fn state_key(interp: &Interpretation) -> BTreeSet<(u32, Vec<usize>)> {
    interp.atoms().map(|(p, a)| (p.0, a.clone())).collect()
}

/// Instantiate the model at the given per-sort object counts. Elements are
/// named after their sort, except that declared constants claim the first
/// slots of their sort. All 2^n atom subsets consistent with the background
/// theory become states.
pub fn ground_model(
    pool: &mut Pool,
    model: &RmdpModel,
    objects: &[(String, usize)],
    atom_cap: usize,
) -> Result<GroundMdp> {
    if objects.is_empty() || objects.iter().all(|(_, n)| *n == 0) {
        return Err(FoddError::EmptyDomain);
    }
    let constant_sorts = infer_constant_sorts(pool, model).map_err(|v| {
        FoddError::Validation(
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("\n"),
        )
    })?;
    // elements per sort, constants first
    let mut elements: Vec<String> = Vec::new();
    let mut by_sort: HashMap<String, Vec<usize>> = HashMap::new();
    let mut constant_elems: Vec<(String, usize)> = Vec::new();
    for (sort, count) in objects {
        let consts: Vec<&String> = model
            .constants
            .iter()
            .filter(|c| constant_sorts.get(*c).map(String::as_str) == Some(sort.as_str()))
            .collect();
        if consts.len() > *count {
            return Err(FoddError::Other(format!(
                "sort {sort} needs at least {} objects for its constants",
                consts.len()
            )));
        }
        let mut ids = Vec::new();
        for c in &consts {
            let idx = elements.len();
            elements.push((*c).clone());
            constant_elems.push(((*c).clone(), idx));
            ids.push(idx);
        }
        for i in consts.len()..*count {
            let idx = elements.len();
            elements.push(format!("{sort}{}", i + 1));
            ids.push(idx);
        }
        by_sort.insert(sort.clone(), ids);
    }
    let sort_elems = |sort: &str| -> Result<&Vec<usize>> {
        by_sort
            .get(sort)
            .ok_or_else(|| FoddError::Other(format!("no objects declared for sort {sort}")))
    };

    // ground atoms
    let mut atoms: Vec<(PredId, Vec<usize>)> = Vec::new();
    for (i, decl) in pool.predicates().iter().enumerate() {
        let pred = PredId(i as u32);
        let mut combos: Vec<Vec<usize>> = vec![vec![]];
        for s in &decl.arg_sorts {
            let elems = sort_elems(s)?;
            let mut next = Vec::new();
            for c in &combos {
                for &e in elems {
                    let mut c2 = c.clone();
                    c2.push(e);
                    next.push(c2);
                }
            }
            combos = next;
        }
        for c in combos {
            atoms.push((pred, c));
        }
    }
    if atoms.len() > atom_cap {
        return Err(FoddError::TooManyAtoms(atoms.len(), atom_cap));
    }

    // states: all consistent subsets
    let mut states: Vec<Interpretation> = Vec::new();
    let mut index: HashMap<BTreeSet<(u32, Vec<usize>)>, usize> = HashMap::new();
    for mask in 0u64..(1u64 << atoms.len()) {
        let mut interp = Interpretation::new(elements.clone());
        for (c, idx) in &constant_elems {
            interp.bind_constant(c.clone(), *idx);
        }
        for (bit, (pred, args)) in atoms.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                interp.add_atom(*pred, args.clone());
            }
        }
        if consistent(&interp, &model.background.rules) {
            index.insert(state_key(&interp), states.len());
            states.push(interp);
        }
    }

    // ground actions
    let mut actions: Vec<GroundAction> = Vec::new();
    for schema in &model.actions {
        let param_sorts = infer_param_sorts(pool, schema);
        let mut bindings: Vec<Vec<(String, usize)>> = vec![vec![]];
        for p in &schema.params {
            let sort = param_sorts
                .get(p.name())
                .cloned()
                .unwrap_or_else(|| "obj".to_string());
            let elems = sort_elems(&sort)?;
            let mut next = Vec::new();
            for b in &bindings {
                for &e in elems {
                    let mut b2 = b.clone();
                    b2.push((p.key(), e));
                    next.push(b2);
                }
            }
            bindings = next;
        }
        for b in bindings {
            actions.push(GroundAction {
                action: schema.name.clone(),
                binding: b,
            });
        }
    }

    // rewards and transitions
    let mut rewards = Vec::with_capacity(states.len());
    for s in &states {
        rewards.push(pool.map_value(model.reward, s)?);
    }
    let mut transitions = Vec::with_capacity(states.len());
    for s in &states {
        let mut per_action = Vec::with_capacity(actions.len());
        for ga in &actions {
            let schema = model
                .action(&ga.action)
                .expect("ground action names a schema");
            let mut dist: Vec<(usize, f64)> = Vec::new();
            let mut total = 0.0;
            for alt in &schema.alternatives {
                let prob_diagram = schema
                    .prob_for(&alt.name)
                    .ok_or_else(|| FoddError::Other(format!("no probability for {}", alt.name)))?;
                let mut valuation = Valuation::new();
                for (k, e) in &ga.binding {
                    valuation.bind(k.clone(), *e);
                }
                let p = pool.evaluate(prob_diagram, s, &valuation)?;
                total += p;
                if p == 0.0 {
                    continue;
                }
                let succ = apply_alternative(pool, alt, s, &ga.binding, &atoms)?;
                let succ_idx = *index.get(&state_key(&succ)).ok_or_else(|| {
                    FoddError::InconsistentDynamics(format!(
                        "{}({:?}) produced a state outside the consistent space",
                        ga.action, ga.binding
                    ))
                })?;
                match dist.iter_mut().find(|(i, _)| *i == succ_idx) {
                    Some((_, q)) => *q += p,
                    None => dist.push((succ_idx, p)),
                }
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(FoddError::InconsistentDynamics(format!(
                    "{} probabilities sum to {total}",
                    ga.action
                )));
            }
            per_action.push(dist);
        }
        transitions.push(per_action);
    }

    Ok(GroundMdp {
        elements,
        states,
        actions,
        transitions,
        rewards,
    })
}

/// Exact n-step Bellman backups from V0 = r. With `absorbing` set, the
/// backup is max(r, gamma * best) instead of r + gamma * best.
pub fn tabular_vi(g: &GroundMdp, gamma: f64, steps: usize, absorbing: bool) -> Vec<f64> {
    let mut v = g.rewards.clone();
    for _ in 0..steps {
        let mut next = Vec::with_capacity(v.len());
        for s in 0..v.len() {
            let mut best = f64::NEG_INFINITY;
            for dist in &g.transitions[s] {
                let ev: f64 = dist.iter().map(|(t, p)| p * v[*t]).sum();
                if ev > best {
                    best = ev;
                }
            }
            if best == f64::NEG_INFINITY {
                best = 0.0;
            }
            next.push(if absorbing {
                g.rewards[s].max(gamma * best)
            } else {
                g.rewards[s] + gamma * best
            });
        }
        v = next;
    }
    v
}

/// Max absolute difference between the diagram's map and the n-step tabular
/// values across all states.
pub fn compare(
    pool: &Pool,
    value: Fodd,
    g: &GroundMdp,
    gamma: f64,
    steps: usize,
    absorbing: bool,
) -> Result<f64> {
    let table = tabular_vi(g, gamma, steps, absorbing);
    let mut worst: f64 = 0.0;
    for (s, expected) in g.states.iter().zip(table.iter()) {
        let got = pool.map_value(value, s)?;
        worst = worst.max((got - expected).abs());
    }
    Ok(worst)
}

/// Every interpretation over the given predicates with domain
/// `{e1..eN}`: all subsets of the ground atoms. Used by the exhaustive
/// soundness harnesses.
pub fn enumerate_interpretations(
    pool: &Pool,
    preds: &[PredId],
    domain_size: usize,
) -> Result<Vec<Interpretation>> {
    let elements: Vec<String> = (1..=domain_size).map(|i| format!("e{i}")).collect();
    let mut atoms: Vec<(PredId, Vec<usize>)> = Vec::new();
    for &pred in preds {
        let arity = pool.predicate(pred).arity;
        let mut combos: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..arity {
            let mut next = Vec::new();
            for c in &combos {
                for e in 0..domain_size {
                    let mut c2 = c.clone();
                    c2.push(e);
                    next.push(c2);
                }
            }
            combos = next;
        }
        for c in combos {
            atoms.push((pred, c));
        }
    }
    if atoms.len() > 22 {
        return Err(FoddError::TooManyAtoms(atoms.len(), 22));
    }
    let mut out = Vec::with_capacity(1 << atoms.len());
    for mask in 0u64..(1u64 << atoms.len()) {
        let mut interp = Interpretation::new(elements.clone());
        for (bit, (pred, args)) in atoms.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                interp.add_atom(*pred, args.clone());
            }
        }
        out.push(interp);
    }
    Ok(out)
}
