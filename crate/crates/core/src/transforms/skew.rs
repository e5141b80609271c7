//! Expansion of skew formulas into sums of products.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::{Edge, Formula, GateId, GateKind, Mode, Node, Var};
use crate::predicates::first_non_skew;
use crate::scalar::{Field, Scalar};

/// A skew formula whose leaves carry labels of type `L`.
#[derive(Clone, Debug)]
pub(crate) enum SkewTree<L> {
    Leaf(L),
    One,
    Gate(GateKind, Vec<(Scalar, SkewTree<L>)>),
}

impl<L> SkewTree<L> {
    pub(crate) fn sum_depth(&self) -> u32 {
        match self {
            SkewTree::Leaf(_) | SkewTree::One => 0,
            SkewTree::Gate(kind, ch) => {
                let below = ch.iter().map(|(_, c)| c.sum_depth()).max().unwrap_or(0);
                below + u32::from(*kind == GateKind::Sum)
            }
        }
    }

    pub(crate) fn is_skew(&self) -> bool {
        match self {
            SkewTree::Leaf(_) | SkewTree::One => true,
            SkewTree::Gate(kind, ch) => {
                let inner = ch.iter().filter(|(_, c)| matches!(c, SkewTree::Gate(..))).count();
                (*kind == GateKind::Sum || inner <= 1) && ch.iter().all(|(_, c)| c.is_skew())
            }
        }
    }
}

/// One term per parse tree: coefficient and ordered leaf labels. Constant
/// leaves contribute no factor.
pub(crate) fn parse_tree_terms<L: Clone>(t: &SkewTree<L>, field: Field) -> Vec<(Scalar, Vec<L>)> {
    match t {
        SkewTree::Leaf(l) => vec![(Scalar::one(field), vec![l.clone()])],
        SkewTree::One => vec![(Scalar::one(field), Vec::new())],
        SkewTree::Gate(GateKind::Sum, ch) => ch
            .iter()
            .flat_map(|(w, c)| {
                parse_tree_terms(c, field)
                    .into_iter()
                    .map(move |(k, f)| (&k * w, f))
            })
            .collect(),
        SkewTree::Gate(GateKind::Prod, ch) => {
            let mut acc = vec![(Scalar::one(field), Vec::new())];
            for (w, c) in ch {
                let child = parse_tree_terms(c, field);
                acc = acc
                    .iter()
                    .flat_map(|(k1, f1): &(Scalar, Vec<L>)| {
                        child.iter().map(move |(k2, f2)| {
                            let mut f = f1.clone();
                            f.extend(f2.iter().cloned());
                            (&(k1 * k2) * w, f)
                        })
                    })
                    .collect();
            }
            acc
        }
    }
}

/// Merge all constant terms into one, dropping it if it cancels.
pub(crate) fn merge_constants<L>(terms: Vec<(Scalar, Vec<L>)>) -> Vec<(Scalar, Vec<L>)> {
    let mut constant: Option<Scalar> = None;
    let mut out = Vec::with_capacity(terms.len());
    let mut slot = None;
    for (c, f) in terms {
        if f.is_empty() {
            if slot.is_none() {
                slot = Some(out.len());
            }
            constant = Some(match constant {
                Some(k) => &k + &c,
                None => c,
            });
        } else {
            out.push((c, f));
        }
    }
    if let (Some(k), Some(pos)) = (constant, slot) {
        if !k.is_zero() {
            out.insert(pos, (k, Vec::new()));
        }
    }
    out
}

fn to_tree(node: &Node) -> SkewTree<Var> {
    match node {
        Node::Var(v) => SkewTree::Leaf(*v),
        Node::One => SkewTree::One,
        Node::Sum(e) | Node::Prod(e) => SkewTree::Gate(
            node.kind().unwrap(),
            e.iter().map(|e| (e.weight.clone(), to_tree(&e.node))).collect(),
        ),
    }
}

/// Terms of a sum-of-products form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewExpansion {
    pub mode: Mode,
    pub field: Field,
    /// Coefficient and ordered variables of each product term.
    pub terms: Vec<(Scalar, Vec<Var>)>,
}

impl SkewExpansion {
    /// Expand a skew formula with pairwise distinct leaf variables.
    pub fn of(g: &Formula) -> Result<Self> {
        if let Some(id) = first_non_skew(&g.root) {
            return Err(Error::NotSkew(GateId(id)));
        }
        let mut seen = HashSet::new();
        for v in g.root.leaf_vars() {
            if !seen.insert(v) {
                return Err(Error::DuplicateLeafVariable(v));
            }
        }
        let terms = merge_constants(parse_tree_terms(&to_tree(&g.root), g.field));
        Ok(SkewExpansion { mode: g.mode, field: g.field, terms })
    }

    /// Number of terms containing `v`.
    pub fn occurrences(&self, v: Var) -> usize {
        self.terms.iter().filter(|(_, f)| f.contains(&v)).count()
    }

    pub fn into_formula(self) -> Result<Formula> {
        let field = self.field;
        let term_node = |factors: Vec<Var>| -> Node {
            match factors.len() {
                0 => Node::One,
                1 => Node::Var(factors[0]),
                _ => Node::prod_of(factors.into_iter().map(Node::Var).collect(), field),
            }
        };
        let mut terms = self.terms;
        let root = match terms.len() {
            0 => return Err(Error::Invariant("skew formula expands to zero".into())),
            1 => {
                let (c, f) = terms.pop().unwrap();
                term_node(f).scaled(c)
            }
            _ => Node::Sum(terms.into_iter().map(|(c, f)| Edge::new(c, term_node(f))).collect()),
        };
        Ok(Formula::new_unchecked(root, self.mode, field))
    }
}

/// Rewrite a skew formula with distinct leaf variables as a sum of products.
pub fn skew_to_sigma_pi(g: &Formula) -> Result<Formula> {
    SkewExpansion::of(g)?.into_formula()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafClass {
    /// A sum-gate child or a product-gate child whose siblings are leaves:
    /// occurs in exactly one term.
    NonDuplicable,
    /// A product-gate child with a non-leaf sibling.
    Duplicable,
}

/// Class of every variable leaf, keyed by preorder id.
pub fn classify_leaves(g: &Formula) -> Vec<(GateId, Var, LeafClass)> {
    let flat = g.flat();
    flat.nodes
        .iter()
        .enumerate()
        .filter_map(|(id, n)| {
            let Node::Var(v) = n.node else { return None };
            let class = match n.parent {
                Some(p) if matches!(flat.nodes[p].node, Node::Prod(_)) => {
                    let inner_sibling = flat.nodes[p]
                        .children
                        .iter()
                        .any(|&c| c != id && !flat.nodes[c].node.is_leaf());
                    if inner_sibling {
                        LeafClass::Duplicable
                    } else {
                        LeafClass::NonDuplicable
                    }
                }
                _ => LeafClass::NonDuplicable,
            };
            Some((GateId(id), *v, class))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::expand;
    use crate::text::{expr_to_string, parse};

    #[test]
    fn comb_expands_to_three_terms() {
        let g = parse("(+ x1 (* x2 (+ x3 (* x4 x5))))").unwrap();
        let e = SkewExpansion::of(&g).unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.occurrences(Var(2)), 2);
        for v in [1, 3, 4, 5] {
            assert_eq!(e.occurrences(Var(v)), 1);
        }
        let out = e.into_formula().unwrap();
        assert_eq!(expr_to_string(&out.root), "(+ x1 (* x2 x3) (* x2 x4 x5))");
        assert_eq!(expand(&out, 100).unwrap(), expand(&g, 100).unwrap());
    }

    #[test]
    fn leaf_and_single_product() {
        let g = parse("x7").unwrap();
        assert_eq!(skew_to_sigma_pi(&g).unwrap(), g);
        let g = parse("(* x1 x2)").unwrap();
        assert_eq!(skew_to_sigma_pi(&g).unwrap(), g);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = parse("(* (+ x1 x2) (+ x3 x4))").unwrap();
        assert_eq!(skew_to_sigma_pi(&g), Err(Error::NotSkew(GateId(0))));
        let g = parse("(+ x1 (* x1 x2))").unwrap();
        assert_eq!(skew_to_sigma_pi(&g), Err(Error::DuplicateLeafVariable(Var(1))));
    }

    #[test]
    fn constants_merge() {
        let g = parse("(+ 1 (* x1 (+ 1 x2)))").unwrap();
        let e = SkewExpansion::of(&g).unwrap();
        assert_eq!(e.terms.len(), 3);
        let out = e.into_formula().unwrap();
        assert_eq!(expand(&out, 10).unwrap(), expand(&g, 10).unwrap());
    }

    #[test]
    fn leaf_classes() {
        let g = parse("(+ x1 (* x2 (+ x3 (* x4 x5))))").unwrap();
        let classes: Vec<(u64, LeafClass)> =
            classify_leaves(&g).into_iter().map(|(_, v, c)| (v.0, c)).collect();
        use LeafClass::*;
        assert_eq!(
            classes,
            vec![(1, NonDuplicable), (2, Duplicable), (3, NonDuplicable), (4, NonDuplicable), (5, NonDuplicable)]
        );
    }
}
