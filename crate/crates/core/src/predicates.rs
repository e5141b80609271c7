//! Syntactic and semantic predicates over formulas.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ir::{Formula, Node, Var};
use crate::poly::{expand, parse_tree_support};

/// Every sum gate's children share one syntactic degree.
pub fn is_homogeneous(f: &Formula) -> bool {
    let flat = f.flat();
    flat.nodes.iter().all(|n| match n.node {
        Node::Sum(_) => {
            let mut degrees = n.children.iter().map(|&c| flat.nodes[c].syn_degree);
            let first = degrees.next();
            degrees.all(|d| Some(d) == first)
        }
        _ => true,
    })
}

/// Every product gate has at most one non-leaf child.
pub fn is_skew(f: &Formula) -> bool {
    first_non_skew(&f.root).is_none()
}

pub(crate) fn first_non_skew(root: &Node) -> Option<usize> {
    let flat = crate::ir::FlatFormula::new(root);
    flat.nodes.iter().position(|n| {
        matches!(n.node, Node::Prod(_))
            && n.children.iter().filter(|&&c| !flat.nodes[c].node.is_leaf()).count() > 1
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneCheck {
    /// All edge weights positive. Sufficient, needs an ordered field.
    Syntactic,
    /// Every parse-tree monomial survives in the expansion.
    Semantic,
}

pub fn is_monotone(f: &Formula, check: MonotoneCheck, budget: usize) -> Result<bool> {
    match check {
        MonotoneCheck::Syntactic => {
            if !f.field.is_ordered() {
                return Err(Error::FieldUnordered);
            }
            let mut stack = vec![&f.root];
            while let Some(n) = stack.pop() {
                for e in n.children() {
                    if e.weight.is_positive() != Some(true) {
                        return Ok(false);
                    }
                    stack.push(&e.node);
                }
            }
            Ok(true)
        }
        MonotoneCheck::Semantic => {
            let support = parse_tree_support(f, budget)?;
            let poly = expand(f, budget)?;
            Ok(support.iter().all(|m| poly.coefficient(m).is_some()))
        }
    }
}

/// Every monomial of the expansion takes exactly one variable from each set.
/// A variable outside every set makes the answer `false`.
pub fn is_set_multilinear(f: &Formula, partition: &[BTreeSet<Var>], budget: usize) -> Result<bool> {
    let poly = expand(f, budget)?;
    let ok = poly.monomials().all(|m| {
        let mut hits = vec![0usize; partition.len()];
        for v in m.vars() {
            match partition.iter().position(|set| set.contains(v)) {
                Some(i) => hits[i] += 1,
                None => return false,
            }
        }
        hits.iter().all(|&h| h == 1)
    });
    Ok(ok)
}
