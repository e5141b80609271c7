//! Splitting a formula into homogeneous components.
//!
//! Each node yields its components of degree `0..=target`: a scalar for
//! degree 0 and an optional formula for every higher degree. Sums combine
//! componentwise and products convolve, copying subtrees so the result stays
//! a tree.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ir::{Edge, Formula, Node};
use crate::metrics::metrics;
use crate::scalar::{Field, Scalar};

struct Components {
    constant: Scalar,
    /// Entry `i` is the degree `i + 1` part.
    parts: Vec<Option<Node>>,
}

fn weighted_sum(mut edges: Vec<Edge>) -> Option<Node> {
    match edges.len() {
        0 => None,
        1 => {
            let e = edges.pop().unwrap();
            Some(e.node.scaled(e.weight))
        }
        _ => Some(Node::Sum(edges)),
    }
}

fn go(node: &Node, target: usize, field: Field) -> Components {
    match node {
        Node::Var(_) => {
            let mut parts = vec![None; target];
            if target >= 1 {
                parts[0] = Some(node.clone());
            }
            Components { constant: Scalar::zero(field), parts }
        }
        Node::One => Components { constant: Scalar::one(field), parts: vec![None; target] },
        Node::Sum(children) => {
            let mut constant = Scalar::zero(field);
            let mut buckets: Vec<Vec<Edge>> = vec![Vec::new(); target];
            for e in children {
                let c = go(&e.node, target, field);
                constant = &constant + &(&c.constant * &e.weight);
                for (i, p) in c.parts.into_iter().enumerate() {
                    if let Some(n) = p {
                        buckets[i].push(Edge::new(e.weight.clone(), n));
                    }
                }
            }
            Components { constant, parts: buckets.into_iter().map(weighted_sum).collect() }
        }
        Node::Prod(children) => {
            let mut acc = Components { constant: Scalar::one(field), parts: vec![None; target] };
            for e in children {
                let c = go(&e.node, target, field);
                acc = convolve(&acc, &c, &e.weight, target, field);
            }
            acc
        }
    }
}

/// Components of `weight * l * r`, truncated at `target`.
fn convolve(l: &Components, r: &Components, weight: &Scalar, target: usize, field: Field) -> Components {
    let constant = &(&l.constant * &r.constant) * weight;
    let mut parts = Vec::with_capacity(target);
    for deg in 1..=target {
        let mut edges = Vec::new();
        // l_0 * r_deg
        if !l.constant.is_zero() {
            if let Some(rn) = &r.parts[deg - 1] {
                edges.push(Edge::new(&l.constant * weight, rn.clone()));
            }
        }
        for j in 1..deg {
            if let (Some(ln), Some(rn)) = (&l.parts[j - 1], &r.parts[deg - j - 1]) {
                edges.push(Edge::new(weight.clone(), Node::prod_of(vec![ln.clone(), rn.clone()], field)));
            }
        }
        // l_deg * r_0
        if !r.constant.is_zero() {
            if let Some(ln) = &l.parts[deg - 1] {
                edges.push(Edge::new(&r.constant * weight, ln.clone()));
            }
        }
        parts.push(weighted_sum(edges));
    }
    Components { constant, parts }
}

/// `s * binom(product_depth + d + 1, d)`, the total size guarantee.
pub fn homogenize_size_bound(size: u64, product_depth: u32, degree: u64) -> BigUint {
    let n = u64::from(product_depth) + degree + 1;
    let mut b = BigUint::one();
    for i in 0..degree {
        b = b * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    BigUint::from(size) * b
}

/// Homogeneous components of degrees `0..=target_degree`; absent entries are
/// zero. Degree 0 is a constant formula. Parts above `target_degree` are
/// dropped, so the components sum to `f` whenever `target_degree` is at
/// least the syntactic degree. The total size bound is checked.
pub fn homogenize(f: &Formula, target_degree: u64) -> Result<Vec<Option<Formula>>> {
    f.require_fanin2()?;
    let target = usize::try_from(target_degree)
        .map_err(|_| Error::InvalidParams(format!("degree {target_degree} is too large")))?;
    let c = go(&f.root, target, f.field);
    let mut out = Vec::with_capacity(target + 1);
    out.push((!c.constant.is_zero()).then(|| f.with_root(Node::One.scaled(c.constant))));
    out.extend(c.parts.into_iter().map(|p| p.map(|n| f.with_root(n))));
    let total: u64 = out.iter().flatten().map(Formula::size).sum();
    let m = metrics(f);
    let bound = homogenize_size_bound(m.size, m.product_depth, target_degree);
    if BigUint::from(total) > bound {
        return Err(Error::Invariant(format!("homogeneous components have size {total} > {bound}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::expand;
    use crate::predicates::is_homogeneous;
    use crate::text::{expr_to_string, parse};

    #[test]
    fn already_split_sum() {
        let f = parse("(+ x1 (* x2 x3))").unwrap();
        let comps = homogenize(&f, 2).unwrap();
        assert!(comps[0].is_none());
        assert_eq!(expr_to_string(&comps[1].as_ref().unwrap().root), "x1");
        assert_eq!(expr_to_string(&comps[2].as_ref().unwrap().root), "(* x2 x3)");
    }

    #[test]
    fn degree_one_part_of_shifted_product() {
        let f = parse("(* (+ x1 1) (+ x2 1))").unwrap();
        let comps = homogenize(&f, 2).unwrap();
        let one = comps[1].as_ref().unwrap();
        assert!(is_homogeneous(one));
        assert_eq!(expand(one, 10).unwrap(), expand(&parse("(+ x1 x2)").unwrap(), 10).unwrap());
        assert_eq!(expand(comps[0].as_ref().unwrap(), 10).unwrap().to_string(), "1");
    }

    #[test]
    fn homogeneous_input_is_its_own_top_component() {
        let f = parse("(+ (* x1 x2) (* x3 x4))").unwrap();
        let comps = homogenize(&f, 2).unwrap();
        assert!(comps[0].is_none() && comps[1].is_none());
        assert_eq!(expand(comps[2].as_ref().unwrap(), 10).unwrap(), expand(&f, 10).unwrap());
    }

    #[test]
    fn binomial_bound() {
        assert_eq!(homogenize_size_bound(3, 1, 2), BigUint::from(18u32));
    }
}
