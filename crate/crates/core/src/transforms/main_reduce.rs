//! Potential-guided depth reduction for formulas of small syntactic degree.
//!
//! At each level the gates whose potential first drops below the root's are
//! cut out. What remains above them is skew with sum-depth at most `delta`,
//! so it expands into a sum of at most `2^delta` products of cut gates, each
//! of which is reduced recursively.

use num_bigint::BigUint;
use num_traits::Pow;

use crate::error::{Error, Result};
use crate::ir::{Edge, FlatFormula, Formula, GateId, Node};
use crate::metrics::{ceil_log2, metrics, Potential};
use crate::scalar::Field;
use crate::transforms::balance::depth_reduce_bb;
use crate::transforms::collapse::collapse;
use crate::transforms::skew::{merge_constants, parse_tree_terms, SkewTree};
use crate::transforms::Epsilon;

/// Gates where the potential first drops below the root's, in preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierSet {
    pub gates: Vec<GateId>,
    pub potential: Potential,
}

struct Ctx<'a> {
    flat: FlatFormula<'a>,
    delta: u32,
    field: Field,
}

impl Ctx<'_> {
    fn phi(&self, id: usize) -> u32 {
        let n = &self.flat.nodes[id];
        ceil_log2(n.syn_degree) + n.sum_depth.div_ceil(self.delta)
    }

    /// The skew top part above `id`, with frontier members as leaves.
    fn top(&self, id: usize, level: u32, members: &mut Vec<usize>) -> SkewTree<usize> {
        let n = &self.flat.nodes[id];
        let kind = n.node.kind().expect("top part is rooted at a gate");
        let children = n
            .node
            .children()
            .iter()
            .zip(&n.children)
            .map(|(e, &c)| {
                let sub = match self.flat.nodes[c].node {
                    Node::One => SkewTree::One,
                    _ if self.phi(c) < level => {
                        members.push(c);
                        SkewTree::Leaf(c)
                    }
                    _ => self.top(c, level, members),
                };
                (e.weight.clone(), sub)
            })
            .collect();
        SkewTree::Gate(kind, children)
    }

    fn reduce(&self, id: usize) -> Result<Node> {
        let level = self.phi(id);
        if level == 0 || self.flat.nodes[id].node.is_leaf() {
            return Ok(self.flat.nodes[id].node.clone());
        }
        let mut members = Vec::new();
        let g = self.top(id, level, &mut members);
        if !g.is_skew() {
            return Err(Error::Invariant(format!("top part above #{id} is not skew")));
        }
        if g.sum_depth() > self.delta {
            return Err(Error::Invariant(format!(
                "top part above #{id} has sum-depth {} > {}",
                g.sum_depth(),
                self.delta
            )));
        }
        let mut reduced = std::collections::HashMap::with_capacity(members.len());
        for &m in &members {
            reduced.insert(m, self.reduce(m)?);
        }
        let terms = merge_constants(parse_tree_terms(&g, self.field));
        let mut edges: Vec<Edge> = terms
            .into_iter()
            .map(|(c, factors)| {
                let node = match factors.len() {
                    0 => Node::One,
                    1 => reduced[&factors[0]].clone(),
                    _ => Node::prod_of(factors.iter().map(|f| reduced[f].clone()).collect(), self.field),
                };
                Edge::new(c, node)
            })
            .collect();
        match edges.len() {
            0 => Err(Error::Invariant(format!("gate #{id} computes the zero polynomial"))),
            1 => {
                let e = edges.pop().unwrap();
                Ok(e.node.scaled(e.weight))
            }
            _ => Ok(Node::Sum(edges)),
        }
    }
}

/// `s * d^delta`, the size guarantee of the main reduction.
pub fn main_size_bound(size: u64, degree: u64, delta: u32) -> BigUint {
    BigUint::from(size) * Pow::pow(BigUint::from(degree.max(1)), delta)
}

/// Top-level frontier of a fan-in-2 formula.
pub fn select_frontier(f: &Formula, delta: u32) -> Result<FrontierSet> {
    if delta == 0 {
        return Err(Error::InvalidParams("delta must be positive".into()));
    }
    f.require_fanin2()?;
    let ctx = Ctx { flat: f.flat(), delta, field: f.field };
    let root = ctx.flat.root();
    let potential = Potential::new(root.syn_degree, root.sum_depth, delta);
    let mut gates = Vec::new();
    if potential.phi > 0 && !root.node.is_leaf() {
        let mut members = Vec::new();
        let g = ctx.top(0, potential.phi, &mut members);
        if !g.is_skew() || g.sum_depth() > delta {
            return Err(Error::Invariant("frontier does not leave a skew top part of sum-depth <= delta".into()));
        }
        members.sort_unstable();
        gates = members.into_iter().map(GateId).collect();
    }
    Ok(FrontierSet { gates, potential })
}

/// Reduce a fan-in-2 formula to product-depth at most its potential and size
/// at most `s * d^delta`. Both bounds are checked on the result. Degree-1
/// inputs are handled by the near-linear balancing pass followed by
/// collapsing, and constant formulas are returned as is.
pub fn depth_reduce_main(f: &Formula, delta: u32) -> Result<Formula> {
    if delta == 0 {
        return Err(Error::InvalidParams("delta must be positive".into()));
    }
    f.require_fanin2()?;
    let m = metrics(f);
    let potential = Potential::new(m.syn_degree, m.sum_depth, delta);
    let out = match m.syn_degree {
        0 => return Ok(f.clone()),
        1 => collapse(&depth_reduce_bb(f, Epsilon::ONE)),
        _ => {
            let ctx = Ctx { flat: f.flat(), delta, field: f.field };
            f.with_root(ctx.reduce(0)?)
        }
    };
    let om = metrics(&out);
    if om.product_depth > potential.phi {
        return Err(Error::Invariant(format!(
            "product-depth {} exceeds potential {}",
            om.product_depth, potential.phi
        )));
    }
    let bound = main_size_bound(m.size, m.syn_degree, delta);
    if BigUint::from(om.size) > bound {
        return Err(Error::Invariant(format!("size {} exceeds bound {bound}", om.size)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::expand;
    use crate::predicates::is_homogeneous;
    use crate::text::parse;
    use crate::transforms::binarize;

    #[test]
    fn comb_reduces_and_stays_equal() {
        let f = parse("(+ x1 (* x2 (+ x3 (* x4 (+ x5 (* x6 x7))))))").unwrap();
        for delta in 1..4 {
            let out = depth_reduce_main(&f, delta).unwrap();
            assert_eq!(expand(&out, 100).unwrap(), expand(&f, 100).unwrap());
            assert!(out.validate().is_ok());
        }
    }

    #[test]
    fn frontier_of_zero_potential_is_empty() {
        let f = parse("x1").unwrap();
        assert!(select_frontier(&f, 1).unwrap().gates.is_empty());
    }

    #[test]
    fn sum_chain_cut_after_delta_sums() {
        // four nested sums, delta = 2: the potential drops below the second
        let f = parse("(+ x1 (+ x2 (+ x3 (+ x4 x5))))").unwrap();
        let fr = select_frontier(&f, 2).unwrap();
        assert_eq!(fr.potential.phi, 2);
        let ids: Vec<usize> = fr.gates.iter().map(|g| g.0).collect();
        assert_eq!(ids, vec![1, 3, 4]);
    }

    #[test]
    fn degree_drop_cuts_both_product_children() {
        let f = parse("(* x1 (+ x2 (+ x3 (+ x4 x5))))").unwrap();
        let fr = select_frontier(&f, 2).unwrap();
        assert_eq!(fr.potential.phi, 3);
        let ids: Vec<usize> = fr.gates.iter().map(|g| g.0).collect();
        assert_eq!(ids, vec![1, 2]);
    }

    #[test]
    fn low_degree_child_of_product_is_cut() {
        let f = parse("(* (* x1 (* x2 x3)) x4)").unwrap();
        let fr = select_frontier(&f, 1).unwrap();
        let flat = f.flat();
        for g in &fr.gates {
            assert!(flat.nodes[g.0].syn_degree <= 2);
        }
        let out = depth_reduce_main(&f, 1).unwrap();
        assert_eq!(expand(&out, 10).unwrap(), expand(&f, 10).unwrap());
    }

    #[test]
    fn homogeneous_input_stays_homogeneous() {
        let f = binarize(&parse("(+ (* x1 x2 x3 x4) (* (+ x1 x2) (+ x3 x4) (+ x5 x6) x7))").unwrap());
        let out = depth_reduce_main(&f, 2).unwrap();
        assert!(is_homogeneous(&out));
        assert_eq!(expand(&out, 100).unwrap(), expand(&f, 100).unwrap());
    }

    #[test]
    fn requires_fanin2() {
        let f = parse("(+ x1 x2 x3)").unwrap();
        assert!(matches!(depth_reduce_main(&f, 1), Err(Error::NotFanIn2(_))));
    }
}
