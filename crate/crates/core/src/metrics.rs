use serde::{Deserialize, Serialize};

use crate::ir::{FlatFormula, Formula};

/// Structural measures of a (sub)formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateMetrics {
    /// Leaf count.
    pub size: u64,
    /// Gates on the longest leaf-to-root path.
    pub depth: u32,
    pub sum_depth: u32,
    pub product_depth: u32,
    pub syn_degree: u64,
}

pub fn metrics(f: &Formula) -> GateMetrics {
    gate_metrics(&f.flat())[0]
}

/// Metrics of every node, indexed by preorder position.
pub fn gate_metrics(flat: &FlatFormula<'_>) -> Vec<GateMetrics> {
    flat.nodes
        .iter()
        .map(|n| GateMetrics {
            size: n.size,
            depth: n.depth,
            sum_depth: n.sum_depth,
            product_depth: n.product_depth,
            syn_degree: n.syn_degree,
        })
        .collect()
}

/// `ceil(log2 n)`, with `0` for `n <= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// The potential `ceil(log2 d) + ceil(sum_depth / delta)` that bounds the
/// product-depth reached by the main reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Potential {
    pub phi1: u32,
    pub phi2: u32,
    pub phi: u32,
}

impl Potential {
    pub fn new(syn_degree: u64, sum_depth: u32, delta: u32) -> Self {
        assert!(delta >= 1, "delta must be positive");
        let phi1 = ceil_log2(syn_degree);
        let phi2 = sum_depth.div_ceil(delta);
        Potential {
            phi1,
            phi2,
            phi: phi1 + phi2,
        }
    }

    pub fn of(f: &Formula, delta: u32) -> Self {
        let m = metrics(f);
        Potential::new(m.syn_degree, m.sum_depth, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse;

    #[test]
    fn leaf_metrics() {
        let m = metrics(&parse("x1").unwrap());
        assert_eq!((m.size, m.depth, m.syn_degree), (1, 0, 1));
        assert_eq!((m.sum_depth, m.product_depth), (0, 0));
    }

    #[test]
    fn sum_of_product_metrics() {
        let m = metrics(&parse("(+ x1 (* x2 x3))").unwrap());
        assert_eq!(
            m,
            GateMetrics { size: 3, depth: 2, sum_depth: 1, product_depth: 1, syn_degree: 2 }
        );
    }

    #[test]
    fn per_gate_degrees_follow_definition() {
        let f = parse("(+ 1 (* x1 (+ x2 (* x3 x4))))").unwrap();
        let table = gate_metrics(&f.flat());
        let degrees: Vec<u64> = table.iter().map(|m| m.syn_degree).collect();
        // preorder: +, 1, *, x1, +, x2, *, x3, x4
        assert_eq!(degrees, vec![3, 0, 3, 1, 2, 1, 2, 1, 1]);
        assert!(degrees.iter().all(|&d| d <= degrees[0]));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9, 16].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn potential_arithmetic() {
        let p = Potential::new(8, 6, 3);
        assert_eq!((p.phi1, p.phi2, p.phi), (3, 2, 5));
        assert_eq!(Potential::new(1, 0, 1).phi, 0);
    }
}
