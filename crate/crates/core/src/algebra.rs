//! Scalar combination and the n-ary maximum used when folding per-action
//! value functions together. Binary `apply` and standardize-apart live on
//! [`Pool`].

use crate::error::{FoddError, Result};
use crate::pool::{round_leaf, Fodd, Op, Pool};
use crate::reductions::{reduce_full, ReductionBudget};
use crate::reasoner::BackgroundTheory;

/// Combine every leaf with a scalar. Results must stay valid value-function
/// leaves (non-negative); a combination that would produce a negative leaf
/// is an error.
pub fn scalar_combine(pool: &mut Pool, root: Fodd, c: f64, op: Op) -> Result<Fodd> {
    if !matches!(op, Op::Add | Op::Multiply) {
        return Err(FoddError::Other(
            "scalar combination supports add and multiply".into(),
        ));
    }
    for leaf in pool.leaves(root) {
        let v = round_leaf(match op {
            Op::Add => leaf + c,
            Op::Multiply => leaf * c,
            _ => unreachable!(),
        });
        if v < 0.0 || !v.is_finite() {
            return Err(FoddError::NegativeResult(v));
        }
    }
    let scalar = pool.leaf_signed(c);
    Ok(pool.apply(root, scalar, op))
}

/// Maximum of several diagrams as independent functions: standardize apart,
/// left-fold with max, then reduce. The map of the result on any
/// interpretation is the max of the inputs' maps.
pub fn max_all(
    pool: &mut Pool,
    diagrams: &[Fodd],
    theory: &BackgroundTheory,
    budget: &ReductionBudget,
) -> Result<Fodd> {
    let Some((&first, rest)) = diagrams.split_first() else {
        return Err(FoddError::Other("max_all needs at least one diagram".into()));
    };
    if rest.is_empty() {
        return Ok(first);
    }
    let parts = pool.standardize_apart(diagrams)?;
    let mut acc = parts[0];
    for &d in &parts[1..] {
        acc = pool.apply(acc, d, Op::Max);
    }
    Ok(reduce_full(pool, acc, theory, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use crate::term::Term;

    #[test]
    fn scalar_multiply_scales_leaves() {
        let mut pool = Pool::new();
        let l10 = pool.leaf(10.0).unwrap();
        let scaled = scalar_combine(&mut pool, l10, 0.9, Op::Multiply).unwrap();
        assert_eq!(pool.leaf_value(scaled), Some(9.0));
        // multiplying by one returns the identical node
        assert_eq!(scalar_combine(&mut pool, l10, 1.0, Op::Multiply).unwrap(), l10);
        assert!(scalar_combine(&mut pool, l10, -20.0, Op::Add).is_err());
    }

    #[test]
    fn max_all_trivial_cases() {
        let mut pool = Pool::new();
        let theory = BackgroundTheory::empty();
        let budget = ReductionBudget::default();
        let l1 = pool.leaf(1.0).unwrap();
        let l2 = pool.leaf(2.0).unwrap();
        assert_eq!(max_all(&mut pool, &[l1], &theory, &budget).unwrap(), l1);
        assert_eq!(
            max_all(&mut pool, &[l1, l2], &theory, &budget).unwrap(),
            l2
        );
        assert!(max_all(&mut pool, &[], &theory, &budget).is_err());
    }

    #[test]
    fn standardize_apart_separates_variables() {
        let mut pool = Pool::new();
        let p = pool.register_predicate("p", 1, vec![]).unwrap();
        let l1 = pool.leaf(1.0).unwrap();
        let l0 = pool.leaf(0.0).unwrap();
        let b = pool
            .node(Label::atom(p, vec![Term::variable("b")]), l1, l0)
            .unwrap();
        let parts = pool.standardize_apart(&[b, b]).unwrap();
        let v0 = pool.variables(parts[0]);
        let v1 = pool.variables(parts[1]);
        assert!(v0.is_disjoint(&v1));
        assert_eq!(v0.len(), 1);
        assert_eq!(v1.len(), 1);
    }
}
