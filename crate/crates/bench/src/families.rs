//! Formula families used by experiments.
//!
//! Random shapes follow a fixed policy so results are comparable: sums
//! branch with geometric fan-out, products split their degree uniformly,
//! and edge weights are uniform in `1..=9`.

use formdepth_core::{Edge, Error, Field, Formula, Mode, Node, Result, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Alternating product/sum chain with `leaves` leaves, innermost gate first:
/// `x1 * (x2 + (x3 * (x4 + ...)))`. Depth is `leaves - 1`.
pub fn comb(leaves: u64, mode: Mode) -> Formula {
    assert!(leaves >= 1, "a comb needs at least one leaf");
    let field = Field::Rational;
    let mut node = Node::var(leaves);
    for i in (1..leaves).rev() {
        let pair = vec![Node::var(i), node];
        node = if i % 2 == 1 { Node::prod_of(pair, field) } else { Node::sum_of(pair, field) };
    }
    Formula::new_unchecked(node, mode, field)
}

fn weight(rng: &mut ChaCha8Rng, field: Field) -> Scalar {
    Scalar::from_i64(rng.random_range(1..=9), field)
}

/// Geometric number of extra children with ratio 1/2, capped.
fn geometric_fanout(rng: &mut ChaCha8Rng, cap: u64) -> u64 {
    let mut m = 2;
    while m < cap && rng.random_bool(0.5) {
        m += 1;
    }
    m.min(cap)
}

/// Split `total` into `mins.len()` pieces, piece `i` at least `mins[i]`.
fn split_budget(rng: &mut ChaCha8Rng, total: u64, mins: &[u64]) -> Vec<u64> {
    let mut out = mins.to_vec();
    let spare = total - mins.iter().sum::<u64>();
    for _ in 0..spare {
        let i = rng.random_range(0..out.len());
        out[i] += 1;
    }
    out
}

struct HomGen {
    rng: ChaCha8Rng,
    n_vars: u64,
    field: Field,
}

impl HomGen {
    fn leaf(&mut self) -> Node {
        Node::var(self.rng.random_range(1..=self.n_vars))
    }

    fn edge(&mut self, node: Node) -> Edge {
        Edge::new(weight(&mut self.rng, self.field), node)
    }

    /// Degree exactly `d`, at most `budget` leaves (`budget >= d`).
    fn node(&mut self, d: u64, budget: u64) -> Node {
        if d == 1 && budget == 1 {
            return self.leaf();
        }
        let can_sum = budget >= 2 * d;
        if can_sum && (d == 1 || self.rng.random_bool(0.5)) {
            let m = geometric_fanout(&mut self.rng, budget / d);
            let budgets = split_budget(&mut self.rng, budget, &vec![d; m as usize]);
            let edges = budgets.into_iter().map(|b| {
                let n = self.node(d, b);
                self.edge(n)
            });
            let edges = edges.collect();
            return Node::Sum(edges);
        }
        if d == 1 {
            return self.leaf();
        }
        let d1 = self.rng.random_range(1..d);
        let budgets = split_budget(&mut self.rng, budget, &[d1, d - d1]);
        let l = self.node(d1, budgets[0]);
        let r = self.node(d - d1, budgets[1]);
        let (l, r) = (self.edge(l), self.edge(r));
        Node::Prod(vec![l, r])
    }
}

/// Random homogeneous monotone formula of syntactic degree exactly `d` and
/// size at most `s` over `x1..x<n_vars>`, deterministic per seed.
pub fn gen_random_homogeneous(n_vars: u64, d: u64, s: u64, seed: u64, mode: Mode) -> Result<Formula> {
    if n_vars == 0 {
        return Err(Error::InvalidParams("need at least one variable".into()));
    }
    if d == 0 || d > s {
        return Err(Error::InfeasibleShape(format!("degree {d} with at most {s} leaves")));
    }
    let field = Field::Rational;
    let mut g = HomGen { rng: ChaCha8Rng::seed_from_u64(seed), n_vars, field };
    let root = g.node(d, s);
    Formula::new(root, mode, field)
}

/// Random skew fan-in-2 formula on distinct leaves `x1..x<size>` with
/// sum-depth at most `max_sum_depth`, deterministic per seed.
pub fn gen_random_skew(size: u64, max_sum_depth: u32, seed: u64, mode: Mode) -> Formula {
    assert!(size >= 1, "size must be positive");
    struct SkewGen {
        rng: ChaCha8Rng,
        next: u64,
        field: Field,
    }
    impl SkewGen {
        fn leaf(&mut self) -> Node {
            self.next += 1;
            Node::var(self.next)
        }
        fn node(&mut self, budget: u64, sum_depth: u32) -> Node {
            if budget == 1 {
                return self.leaf();
            }
            let w1 = weight(&mut self.rng, self.field);
            let w2 = weight(&mut self.rng, self.field);
            if sum_depth > 0 && self.rng.random_bool(0.5) {
                let left = self.rng.random_range(1..budget);
                let l = self.node(left, sum_depth - 1);
                let r = self.node(budget - left, sum_depth - 1);
                return Node::Sum(vec![Edge::new(w1, l), Edge::new(w2, r)]);
            }
            let leaf = self.leaf();
            let rest = self.node(budget - 1, sum_depth);
            let pair = if self.rng.random_bool(0.5) { (leaf, rest) } else { (rest, leaf) };
            Node::Prod(vec![Edge::new(w1, pair.0), Edge::new(w2, pair.1)])
        }
    }
    let field = Field::Rational;
    let mut g = SkewGen { rng: ChaCha8Rng::seed_from_u64(seed), next: 0, field };
    let root = g.node(size, max_sum_depth);
    Formula::new_unchecked(root, mode, field)
}

/// Coefficients of `prod_m (t - a_m)` for the given roots, lowest first.
fn poly_from_roots(roots: &[BigRational]) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    for a in roots {
        let mut next = vec![BigRational::zero(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * a;
        }
        c = next;
    }
    c
}

/// Inhomogeneous formula for the elementary symmetric polynomial `e_d` on
/// `x1..x<n>` by interpolation: `prod_i (1 + a x_i)` is evaluated at
/// `a = 1..=n+1` and the `t^d` coefficient is recovered by Lagrange weights.
pub fn elementary_symmetric(n: u64, d: u64, mode: Mode) -> Result<Formula> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::InvalidParams(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
    }
    let field = Field::Rational;
    let points: Vec<BigRational> = (1..=n + 1).map(|a| BigRational::from_integer(BigInt::from(a))).collect();
    let mut terms = Vec::new();
    for (j, aj) in points.iter().enumerate() {
        let others: Vec<BigRational> =
            points.iter().enumerate().filter(|&(m, _)| m != j).map(|(_, a)| a.clone()).collect();
        let denom = others.iter().fold(BigRational::one(), |acc, a| acc * (aj - a));
        let coef = &poly_from_roots(&others)[d as usize] / denom;
        if coef.is_zero() {
            continue;
        }
        let a = Scalar::from_rational(aj, field).expect("rational field");
        let factors = (1..=n)
            .map(|i| Node::Sum(vec![Edge::unit(Node::One, field), Edge::new(a.clone(), Node::var(i))]))
            .collect();
        let c = Scalar::from_rational(&coef, field).expect("rational field");
        terms.push(Edge::new(c, Node::prod_of(factors, field)));
    }
    Formula::new(Node::Sum(terms), mode, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use formdepth_core::expand;
    use formdepth_core::predicates::is_homogeneous;

    #[test]
    fn comb_shape() {
        let f = comb(5, Mode::Commutative);
        assert_eq!(formdepth_core::text::expr_to_string(&f.root), "(* x1 (+ x2 (* x3 (+ x4 x5))))");
        assert_eq!(formdepth_core::metrics(&comb(64, Mode::Commutative)).depth, 63);
    }

    #[test]
    fn degree_one_is_a_sum_of_variables() {
        let f = gen_random_homogeneous(4, 1, 4, 1, Mode::Commutative).unwrap();
        assert_eq!(f.syn_degree(), 1);
        assert!(f.size() <= 4);
    }

    #[test]
    fn homogeneous_generator() {
        let f = gen_random_homogeneous(8, 4, 50, 7, Mode::Commutative).unwrap();
        assert!(is_homogeneous(&f));
        assert_eq!(f.syn_degree(), 4);
        assert!(f.size() <= 50);
        assert_eq!(f, gen_random_homogeneous(8, 4, 50, 7, Mode::Commutative).unwrap());
    }

    #[test]
    fn infeasible_shape() {
        assert!(matches!(gen_random_homogeneous(2, 5, 3, 0, Mode::Commutative), Err(Error::InfeasibleShape(_))));
    }

    #[test]
    fn skew_generator() {
        for seed in 0..20 {
            let f = gen_random_skew(30, 8, seed, Mode::Commutative);
            assert!(formdepth_core::predicates::is_skew(&f));
            assert!(f.is_fanin2());
            assert!(formdepth_core::metrics(&f).sum_depth <= 8);
            assert_eq!(f.vars().len(), 30);
        }
    }

    #[test]
    fn elementary_symmetric_degree_two() {
        let f = elementary_symmetric(4, 2, Mode::Commutative).unwrap();
        let p = expand(&f, 10_000).unwrap();
        assert_eq!(p.to_string(), "x1*x2 + x1*x3 + x1*x4 + x2*x3 + x2*x4 + x3*x4");
    }
}
