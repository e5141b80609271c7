//! Seeded formula corpora for property sweeps.

use formdepth_core::hardpoly::{gen_hard, HardParams};
use formdepth_core::poly::count_parse_trees;
use formdepth_core::transforms::binarize;
use formdepth_core::{Edge, Field, Formula, Mode, Node, DEFAULT_PARSE_TREE_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::families::gen_random_homogeneous;

/// Shape limits for the random homogeneous corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusShape {
    pub max_vars: u64,
    pub max_size: u64,
    pub max_degree: u64,
    /// Instances with more parse trees are redrawn so exact expansion stays cheap.
    pub max_parse_trees: u128,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape { max_vars: 12, max_size: 200, max_degree: 16, max_parse_trees: DEFAULT_PARSE_TREE_BUDGET as u128 }
    }
}

/// `count` random homogeneous formulas with shapes drawn from `shape`.
pub fn homogeneous_corpus(count: usize, seed: u64, mode: Mode, shape: CorpusShape) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(1..=shape.max_vars);
        let d = rng.random_range(1..=shape.max_degree);
        let s = rng.random_range(d..=shape.max_size.max(d));
        let f = gen_random_homogeneous(n, d, s, rng.random(), mode).expect("shape is feasible");
        if count_parse_trees(&f.root) <= shape.max_parse_trees {
            out.push(f);
        }
    }
    out
}

/// `(h1 + 1) * (h2 + h3)` with homogeneous `h_i` of different degrees, so
/// the result has several homogeneous components and a constant leaf.
pub fn inhomogeneous_corpus(count: usize, seed: u64, mode: Mode) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = Field::Rational;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(1..=8);
        let part = |rng: &mut ChaCha8Rng| {
            let d = rng.random_range(1..=4);
            let s = rng.random_range(d..=12);
            gen_random_homogeneous(n, d, s, rng.random(), mode).expect("shape is feasible").root
        };
        let (a, b, c) = (part(&mut rng), part(&mut rng), part(&mut rng));
        let left = Node::Sum(vec![Edge::unit(a, field), Edge::unit(Node::One, field)]);
        let root = Node::prod_of(vec![left, Node::sum_of(vec![b, c], field)], field);
        let f = Formula::new(root, mode, field).expect("well-formed by construction");
        if count_parse_trees(&f.root) <= DEFAULT_PARSE_TREE_BUDGET as u128 {
            out.push(f);
        }
    }
    out
}

/// Binarized canonical formulas for `(k, r)` in `{1, 2, 3} x {2, 3}`.
pub fn hard_corpus(mode: Mode) -> Vec<(HardParams, Formula)> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for r in 2..=3 {
            let p = HardParams::new(k, r).expect("valid parameters");
            let mut m = binarize(&gen_hard(&p).expect("small universe"));
            m.mode = mode;
            out.push((p, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use formdepth_core::predicates::is_homogeneous;

    #[test]
    fn corpus_is_deterministic_and_in_shape() {
        let a = homogeneous_corpus(20, 3, Mode::Commutative, CorpusShape::default());
        assert_eq!(a, homogeneous_corpus(20, 3, Mode::Commutative, CorpusShape::default()));
        for f in &a {
            assert!(is_homogeneous(f));
            assert!(f.size() <= 200 && f.syn_degree() <= 16);
            assert!(f.vars().len() <= 12);
        }
    }

    #[test]
    fn inhomogeneous_corpus_mixes_degrees() {
        for f in inhomogeneous_corpus(10, 1, Mode::Commutative) {
            let poly = formdepth_core::expand(&f, 100_000).unwrap();
            assert!(poly.homogeneous_parts().len() >= 2);
        }
    }

    #[test]
    fn hard_corpus_is_binary() {
        let c = hard_corpus(Mode::NonCommutative);
        assert_eq!(c.len(), 6);
        assert!(c.iter().all(|(_, m)| m.is_fanin2() && m.mode == Mode::NonCommutative));
    }
}
