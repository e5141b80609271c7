//! Near-linear-size balancing for formulas of unbounded degree.
//!
//! A formula of size `s > k` has a unique gate `a` whose subformula keeps at
//! least `s - s/k` leaves while neither child does. Cutting `a` out leaves
//! `F = A * a * B + C` with small `A`, `B`, `C`; the result is
//! `A' * (b' op c') * B' + C'` with every piece balanced recursively.

use crate::error::{Error, Result};
use crate::ir::{balanced_product, Edge, FlatFormula, Formula, GateId, Node, Weighted};
use crate::scalar::{Field, Scalar};
use crate::transforms::binarize::binarize;
use crate::transforms::Epsilon;

fn heavy(size: u64, total: u64, k: u64) -> bool {
    u128::from(size) * u128::from(k) >= u128::from(total) * u128::from(k - 1)
}

fn split_candidates(flat: &FlatFormula<'_>, k: u64) -> Vec<usize> {
    let total = flat.root().size;
    flat.nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| heavy(n.size, total, k) && n.children.iter().all(|&c| !heavy(flat.nodes[c].size, total, k)))
        .map(|(id, _)| id)
        .collect()
}

/// The unique gate keeping at least `s - s/k` leaves whose children both
/// keep fewer. Every gate is scanned.
pub fn bb_find_split(f: &Formula, k: u64) -> Result<GateId> {
    f.require_fanin2()?;
    let size = f.size();
    if size <= k {
        return Err(Error::TooSmall { size, k });
    }
    let found = split_candidates(&f.flat(), k);
    match found.as_slice() {
        [id] => Ok(GateId(*id)),
        _ => Err(Error::SplitNotUnique { count: found.len() }),
    }
}

/// `F = scale * A * F_a * B + C` around a cut gate.
struct Pieces {
    scale: Scalar,
    /// Left multipliers, outermost first.
    left: Vec<Node>,
    /// Right multipliers, innermost first.
    right: Vec<Node>,
    rest: Option<Weighted>,
}

fn decompose(flat: &FlatFormula<'_>, alpha: usize, field: Field) -> Pieces {
    let mut scale = Scalar::one(field);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut rest: Option<Weighted> = None;
    let mut cur = alpha;
    while let Some(p) = flat.nodes[cur].parent {
        let pn = &flat.nodes[p];
        let idx = flat.child_index(cur).unwrap();
        let edges = pn.node.children();
        let w_on = &edges[idx].weight;
        let sib = &edges[1 - idx];
        match pn.node {
            Node::Sum(_) => {
                scale = &scale * w_on;
                rest = Some(match rest {
                    None => (sib.weight.clone(), sib.node.clone()),
                    Some((c, Node::One)) if sib.node == Node::One => {
                        let k = &(&c * w_on) + &sib.weight;
                        if k.is_zero() {
                            cur = p;
                            rest = None;
                            continue;
                        }
                        (k, Node::One)
                    }
                    Some((c, n)) => (
                        Scalar::one(field),
                        Node::Sum(vec![Edge::new(&c * w_on, n), Edge::new(sib.weight.clone(), sib.node.clone())]),
                    ),
                });
            }
            Node::Prod(_) => {
                let w = &sib.weight * w_on;
                scale = &scale * &w;
                rest = rest.map(|(c, n)| {
                    let c = &c * &w;
                    let n = match (n, idx) {
                        (Node::One, _) => sib.node.clone(),
                        (n, 0) => Node::prod_of(vec![n, sib.node.clone()], field),
                        (n, _) => Node::prod_of(vec![sib.node.clone(), n], field),
                    };
                    (c, n)
                });
                if idx == 0 {
                    right.push(sib.node.clone());
                } else {
                    left.push(sib.node.clone());
                }
            }
            _ => unreachable!("parent is a gate"),
        }
        cur = p;
    }
    left.reverse();
    Pieces { scale, left, right, rest }
}

/// The factors around a cut gate as standalone formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbDecomposition {
    /// Left multiplier, carrying the overall scale.
    pub a: Formula,
    pub b: Formula,
    /// The formula with the cut gate set to zero; `None` when that is zero.
    pub c: Option<Formula>,
}

/// Write `F = A * F_alpha * B + C` for a gate `alpha` of a fan-in-2 formula.
pub fn bb_decompose(f: &Formula, alpha: GateId) -> Result<BbDecomposition> {
    f.require_fanin2()?;
    let flat = f.flat();
    if alpha.0 >= flat.len() {
        return Err(Error::InvalidParams(format!("gate {alpha} does not exist")));
    }
    let p = decompose(&flat, alpha.0, f.field);
    let prod = |factors: Vec<Node>| balanced_product(factors, f.field).unwrap_or(Node::One);
    let a = prod(p.left).scaled(p.scale);
    Ok(BbDecomposition {
        a: f.with_root(a),
        b: f.with_root(prod(p.right)),
        c: p.rest.map(|(c, n)| f.with_root(n.scaled(c))),
    })
}

fn bb(node: &Node, k: u64, field: Field) -> Node {
    let flat = FlatFormula::new(node);
    if flat.root().size <= k {
        return node.clone();
    }
    let found = split_candidates(&flat, k);
    assert_eq!(found.len(), 1, "split gate of a fan-in-2 formula is unique");
    let alpha = found[0];
    let an = flat.nodes[alpha].node;
    let kind = an.kind().expect("split gate is not a leaf");
    let ch = an.children();
    let star = Node::gate(
        kind,
        ch.iter().map(|e| Edge::new(e.weight.clone(), bb(&e.node, k, field))).collect(),
    );
    let p = decompose(&flat, alpha, field);
    drop(flat);
    let mut acc = star;
    if let Some(a) = balanced_product(p.left, field) {
        acc = Node::prod_of(vec![bb(&a, k, field), acc], field);
    }
    if let Some(b) = balanced_product(p.right, field) {
        acc = Node::prod_of(vec![acc, bb(&b, k, field)], field);
    }
    match p.rest {
        Some((c, n)) => Node::Sum(vec![Edge::new(p.scale, acc), Edge::new(c, bb(&n, k, field))]),
        None => acc.scaled(p.scale),
    }
}

/// Balance `f` to depth `O(k log s)` and size about `s^(1 + eps)` with
/// `k = max(4, 2^ceil(4 / eps))`. The result has fan-in 2; inputs of size at
/// most `k` come back unchanged after binarization.
pub fn depth_reduce_bb(f: &Formula, eps: Epsilon) -> Formula {
    let f = binarize(f);
    let root = bb(&f.root, eps.k_bb(), f.field);
    f.with_root(root)
}
