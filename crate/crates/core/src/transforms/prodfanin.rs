use crate::ir::{Edge, FlatFormula, Formula, Node};
use crate::scalar::{Field, Scalar};

struct Ctx<'a> {
    flat: FlatFormula<'a>,
    field: Field,
}

/// A rewritten subformula: the scalar still to be applied, the node and its depth.
type Part = (Scalar, Node, u32);

impl Ctx<'_> {
    fn go(&self, id: usize) -> Part {
        let n = &self.flat.nodes[id];
        match n.node {
            Node::Var(_) | Node::One => (Scalar::one(self.field), n.node.clone(), 0),
            Node::Sum(edges) => {
                let mut depth = 0;
                let out = edges
                    .iter()
                    .zip(&n.children)
                    .map(|(e, &c)| {
                        let (w, node, d) = self.go(c);
                        depth = depth.max(d);
                        Edge::new(&e.weight * &w, node)
                    })
                    .collect();
                (Scalar::one(self.field), Node::Sum(out), depth + 1)
            }
            Node::Prod(edges) => {
                let coef = edges.iter().fold(Scalar::one(self.field), |a, e| &a * &e.weight);
                let (w, node, d) = self.product(&n.children);
                (&coef * &w, node, d)
            }
        }
    }

    /// Product of the given children, split at the degree midpoint.
    fn product(&self, ids: &[usize]) -> Part {
        if ids.len() == 1 {
            return self.go(ids[0]);
        }
        let degrees: Vec<u64> = ids.iter().map(|&c| self.flat.nodes[c].syn_degree).collect();
        let total: u64 = degrees.iter().sum();
        let mut prefix = 0;
        let m = degrees
            .iter()
            .position(|&d| {
                prefix += d;
                2 * prefix >= total
            })
            .unwrap_or(ids.len() - 1);
        let mut parts = Vec::with_capacity(3);
        if m > 0 {
            parts.push(self.product(&ids[..m]));
        }
        parts.push(self.go(ids[m]));
        if m + 1 < ids.len() {
            parts.push(self.product(&ids[m + 1..]));
        }
        self.pair_up(parts)
    }

    /// Multiply two or three ordered parts with binary gates, grouping for
    /// the smaller depth.
    fn pair_up(&self, mut parts: Vec<Part>) -> Part {
        let mul = |a: Part, b: Part| -> Part {
            let coef = &a.0 * &b.0;
            let depth = 1 + a.2.max(b.2);
            (coef, Node::prod_of(vec![a.1, b.1], self.field), depth)
        };
        match parts.len() {
            1 => parts.pop().unwrap(),
            2 => {
                let b = parts.pop().unwrap();
                let a = parts.pop().unwrap();
                mul(a, b)
            }
            _ => {
                let c = parts.pop().unwrap();
                let b = parts.pop().unwrap();
                let a = parts.pop().unwrap();
                let left_first = 1 + (1 + a.2.max(b.2)).max(c.2);
                let right_first = 1 + a.2.max(1 + b.2.max(c.2));
                if left_first <= right_first {
                    mul(mul(a, b), c)
                } else {
                    mul(a, mul(b, c))
                }
            }
        }
    }
}

/// Rewrite every product gate to fan-in 2, splitting each product where the
/// running degree first reaches half. Leaf count does not grow and factor
/// order is kept.
pub fn product_fanin_2(f: &Formula) -> Formula {
    let ctx = Ctx { flat: f.flat(), field: f.field };
    let (w, root, _) = ctx.go(0);
    drop(ctx);
    f.with_root(root.scaled(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::metrics;
    use crate::poly::expand;
    use crate::text::parse;

    fn all_products_binary(n: &Node) -> bool {
        let ok = !matches!(n, Node::Prod(e) if e.len() != 2);
        ok && n.children().iter().all(|e| all_products_binary(&e.node))
    }

    #[test]
    fn splits_at_half_degree() {
        // degrees 3, 2, 3: prefix sums 3, 5 so the middle factor is the second
        let f = parse("(* (* x1 x2 x3) (* x4 x5) (* x6 x7 x8))").unwrap();
        let out = product_fanin_2(&f);
        assert!(all_products_binary(&out.root));
        assert_eq!(out.size(), f.size());
        assert_eq!(expand(&out, 10).unwrap(), expand(&f, 10).unwrap());
    }

    #[test]
    fn noncommutative_order_kept() {
        let f = parse("mode: noncommutative\n(+ (* x1 x2 x3 x4) (* (scale 2 x5) x6 x7))").unwrap();
        let out = product_fanin_2(&f);
        assert!(all_products_binary(&out.root));
        assert_eq!(expand(&out, 10).unwrap(), expand(&f, 10).unwrap());
        let m = metrics(&out);
        assert!(m.depth <= 2 * (metrics(&f).depth + 2) + 2);
    }
}
