use crate::ir::{Edge, Formula, Node, Weighted};
use crate::scalar::{Field, Scalar};

fn go(node: &Node, field: Field) -> Weighted {
    match node {
        Node::Var(_) | Node::One => (Scalar::one(field), node.clone()),
        Node::Sum(children) => {
            let mut edges = Vec::with_capacity(children.len());
            for e in children {
                let (w, n) = go(&e.node, field);
                let w = &e.weight * &w;
                match n {
                    Node::Sum(inner) => {
                        edges.extend(inner.into_iter().map(|i| Edge::new(&w * &i.weight, i.node)))
                    }
                    n => edges.push(Edge::new(w, n)),
                }
            }
            if edges.len() == 1 {
                let e = edges.pop().unwrap();
                return (e.weight, e.node);
            }
            (Scalar::one(field), Node::Sum(edges))
        }
        Node::Prod(children) => {
            let mut coef = Scalar::one(field);
            let mut edges = Vec::with_capacity(children.len());
            for e in children {
                let (w, n) = go(&e.node, field);
                coef = &(&coef * &e.weight) * &w;
                match n {
                    Node::Prod(inner) => {
                        for i in inner {
                            coef = &coef * &i.weight;
                            edges.push(Edge::unit(i.node, field));
                        }
                    }
                    n => edges.push(Edge::unit(n, field)),
                }
            }
            if edges.len() == 1 {
                return (coef, edges.pop().unwrap().node);
            }
            (coef, Node::Prod(edges))
        }
    }
}

/// Merge sums feeding sums and products feeding products, and fold
/// single-child gates into edge weights. Product-edge weights move up to the
/// enclosing sum edge.
pub fn collapse(f: &Formula) -> Formula {
    let (w, root) = go(&f.root, f.field);
    f.with_root(root.scaled(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{expr_to_string, parse};

    fn c(text: &str) -> String {
        expr_to_string(&collapse(&parse(text).unwrap()).root)
    }

    #[test]
    fn nested_sums_merge() {
        assert_eq!(c("(+ (+ x1 x2) x3)"), "(+ x1 x2 x3)");
        assert_eq!(c("(* x1 (* x2 x3))"), "(* x1 x2 x3)");
    }

    #[test]
    fn unary_scalings_multiply() {
        assert_eq!(c("(+ (scale 2 (+ (scale 3 x1))))"), "(+ (scale 6 x1))");
    }

    #[test]
    fn alternating_is_fixed_point() {
        let text = "(+ x1 (* x2 (+ x3 (* x4 x5))))";
        assert_eq!(c(text), text);
    }

    #[test]
    fn product_weights_move_up() {
        assert_eq!(c("(+ x1 (* (scale 2 x2) (scale 3 x3)))"), "(+ x1 (scale 6 (* x2 x3)))");
    }
}
