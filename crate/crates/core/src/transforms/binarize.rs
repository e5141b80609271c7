use crate::ir::{Edge, Formula, Node, Weighted};
use crate::scalar::{Field, Scalar};

fn balanced(kind: crate::ir::GateKind, mut edges: Vec<Edge>, field: Field) -> Edge {
    if edges.len() == 1 {
        return edges.pop().unwrap();
    }
    let right = edges.split_off(edges.len() / 2);
    let l = balanced(kind, edges, field);
    let r = balanced(kind, right, field);
    Edge::unit(Node::gate(kind, vec![l, r]), field)
}

fn go(node: &Node, field: Field) -> Weighted {
    let Some(kind) = node.kind() else {
        return (Scalar::one(field), node.clone());
    };
    let mut edges: Vec<Edge> = node
        .children()
        .iter()
        .map(|e| {
            let (w, n) = go(&e.node, field);
            Edge::new(&e.weight * &w, n)
        })
        .collect();
    if edges.len() == 1 {
        let e = edges.pop().unwrap();
        return (e.weight, e.node);
    }
    let top = balanced(kind, edges, field);
    (top.weight, top.node)
}

/// Rewrite every gate to fan-in exactly 2 by balanced splitting, keeping
/// child order. Fan-in-1 gates become edge weights. Fan-in-2 input is
/// returned as is.
pub fn binarize(f: &Formula) -> Formula {
    if f.is_fanin2() {
        return f.clone();
    }
    let (w, root) = go(&f.root, f.field);
    f.with_root(root.scaled(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::metrics;
    use crate::poly::expand;
    use crate::text::parse;

    #[test]
    fn four_way_sum_becomes_balanced() {
        let f = parse("(+ x1 x2 x3 x4)").unwrap();
        let b = binarize(&f);
        assert!(b.is_fanin2());
        assert_eq!(metrics(&b).depth, 2);
        assert_eq!(crate::text::expr_to_string(&b.root), "(+ (+ x1 x2) (+ x3 x4))");
    }

    #[test]
    fn fanin2_input_is_fixed_point() {
        let f = parse("(+ x1 (* x2 x3))").unwrap();
        assert_eq!(binarize(&f), f);
    }

    #[test]
    fn noncommutative_order_kept() {
        let f = parse("mode: noncommutative\n(* x1 x2 x3)").unwrap();
        let b = binarize(&f);
        assert!(b.is_fanin2());
        assert_eq!(expand(&b, 10).unwrap(), expand(&f, 10).unwrap());
        assert_eq!(expand(&b, 10).unwrap().to_string(), "x1*x2*x3");
    }

    #[test]
    fn unary_gates_are_absorbed() {
        let f = parse("(+ (scale 2 (+ (scale 3 x1))) (* (scale 5 x2)))").unwrap();
        let b = binarize(&f);
        assert!(b.is_fanin2());
        assert_eq!(expand(&b, 10).unwrap(), expand(&f, 10).unwrap());
        let g = parse("(* (+ x1 x2))").unwrap();
        assert_eq!(binarize(&g).root, parse("(+ x1 x2)").unwrap().root);
    }
}
