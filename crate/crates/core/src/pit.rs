//! Randomized polynomial identity testing modulo a prime.
//!
//! Commutative formulas are evaluated at uniformly random points of F_p^n.
//! Non-commutative formulas are evaluated at uniformly random m x m matrices
//! over F_p with m = syntactic degree + 1 by default. Formulas over a prime
//! field are always tested modulo that prime.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::{Formula, Mode, Node, Var};
use crate::scalar::{add_mod, mul_mod, Field, MERSENNE_61};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PitConfig {
    pub trials: usize,
    pub prime: u64,
    /// Matrix dimension for non-commutative mode; `None` picks degree + 1.
    pub matrix_dim: Option<usize>,
    pub seed: u64,
}

impl Default for PitConfig {
    fn default() -> Self {
        PitConfig {
            trials: 20,
            prime: MERSENNE_61,
            matrix_dim: None,
            seed: 0,
        }
    }
}

/// A point (or matrix tuple) where the two formulas differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PitWitness {
    pub trial: usize,
    pub prime: u64,
    pub dim: usize,
    /// Row-major m x m entries per variable (a single entry when m = 1).
    pub point: Vec<(Var, Vec<u64>)>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PitVerdict {
    EqualProbably { trials: usize },
    Unequal(PitWitness),
}

impl PitVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, PitVerdict::EqualProbably { .. })
    }
}

#[derive(Clone, Debug)]
enum Op {
    Var(usize),
    One,
    /// Combine the top `weights.len()` stack values.
    Sum(Vec<u64>),
    Prod(Vec<u64>),
}

/// Postorder stack program with edge weights reduced mod p.
#[derive(Clone, Debug)]
struct Compiled {
    ops: Vec<Op>,
}

fn compile(f: &Formula, prime: u64, vars: &HashMap<Var, usize>) -> Result<Compiled> {
    let mut ops = Vec::new();
    let mut stack: Vec<(&Node, bool)> = vec![(&f.root, false)];
    while let Some((node, expanded)) = stack.pop() {
        match node {
            Node::Var(v) => ops.push(Op::Var(vars[v])),
            Node::One => ops.push(Op::One),
            Node::Sum(edges) | Node::Prod(edges) => {
                if !expanded {
                    stack.push((node, true));
                    for e in edges.iter().rev() {
                        stack.push((&e.node, false));
                    }
                    continue;
                }
                let weights = edges
                    .iter()
                    .map(|e| {
                        e.weight.residue(prime).ok_or_else(|| {
                            Error::InvalidParams(format!("weight {} has no image mod {prime}", e.weight))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ops.push(if matches!(node, Node::Sum(_)) {
                    Op::Sum(weights)
                } else {
                    Op::Prod(weights)
                });
            }
        }
    }
    Ok(Compiled { ops })
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Mat {
    dim: usize,
    a: Vec<u64>,
}

impl Mat {
    fn zero(dim: usize) -> Self {
        Mat { dim, a: vec![0; dim * dim] }
    }

    fn identity(dim: usize) -> Self {
        let mut m = Mat::zero(dim);
        for i in 0..dim {
            m.a[i * dim + i] = 1;
        }
        m
    }

    fn add_scaled(&mut self, other: &Mat, w: u64, p: u64) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x = add_mod(*x, mul_mod(*y, w, p), p);
        }
    }

    fn scale(&mut self, w: u64, p: u64) {
        for x in &mut self.a {
            *x = mul_mod(*x, w, p);
        }
    }

    fn mul(&self, other: &Mat, p: u64) -> Mat {
        let n = self.dim;
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let t = mul_mod(x, other.a[k * n + j], p);
                    out.a[i * n + j] = add_mod(out.a[i * n + j], t, p);
                }
            }
        }
        out
    }
}

fn evaluate(c: &Compiled, point: &[Mat], dim: usize, p: u64) -> Mat {
    let mut vals: Vec<Mat> = Vec::new();
    for op in &c.ops {
        let v = match op {
            Op::Var(i) => point[*i].clone(),
            Op::One => Mat::identity(dim),
            Op::Sum(ws) => {
                let args = vals.split_off(vals.len() - ws.len());
                let mut acc = Mat::zero(dim);
                for (w, m) in ws.iter().zip(&args) {
                    acc.add_scaled(m, *w, p);
                }
                acc
            }
            Op::Prod(ws) => {
                let mut args = vals.split_off(vals.len() - ws.len()).into_iter();
                let mut acc = args.next().expect("nonempty product");
                for m in args {
                    acc = acc.mul(&m, p);
                }
                let w = ws.iter().fold(1 % p, |a, &b| mul_mod(a, b, p));
                acc.scale(w, p);
                acc
            }
        };
        vals.push(v);
    }
    vals.pop().expect("nonempty program")
}

fn var_index(f: &Formula, g: &Formula) -> (Vec<Var>, HashMap<Var, usize>) {
    let mut vars = f.vars();
    vars.extend(g.vars());
    vars.sort_unstable();
    vars.dedup();
    let index = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    (vars, index)
}

fn check_pair(f: &Formula, g: &Formula) -> Result<()> {
    if f.mode != g.mode {
        return Err(Error::ModeMismatch);
    }
    if f.field != g.field {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

fn dim_for(f: &Formula, g: &Formula, cfg: &PitConfig) -> usize {
    match f.mode {
        Mode::Commutative => 1,
        Mode::NonCommutative => cfg
            .matrix_dim
            .unwrap_or_else(|| f.syn_degree().max(g.syn_degree()) as usize + 1),
    }
}

/// Randomized equality test. `Unequal` is certain and carries its witness.
pub fn pit_equal(f: &Formula, g: &Formula, cfg: &PitConfig) -> Result<PitVerdict> {
    check_pair(f, g)?;
    let p = match f.field {
        Field::Prime(q) => q,
        Field::Rational => cfg.prime,
    };
    let dim = dim_for(f, g, cfg);
    let (vars, index) = var_index(f, g);
    let cf = compile(f, p, &index)?;
    let cg = compile(g, p, &index)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for trial in 0..cfg.trials {
        let point: Vec<Mat> = vars
            .iter()
            .map(|_| Mat {
                dim,
                a: (0..dim * dim).map(|_| rng.random_range(0..p)).collect(),
            })
            .collect();
        let left = evaluate(&cf, &point, dim, p);
        let right = evaluate(&cg, &point, dim, p);
        if left != right {
            return Ok(PitVerdict::Unequal(PitWitness {
                trial,
                prime: p,
                dim,
                point: vars.iter().copied().zip(point.into_iter().map(|m| m.a)).collect(),
                left: left.a,
                right: right.a,
            }));
        }
    }
    Ok(PitVerdict::EqualProbably { trials: cfg.trials })
}

/// Re-evaluate both formulas at the witness and confirm the recorded values
/// and that they differ.
pub fn check_witness(f: &Formula, g: &Formula, w: &PitWitness) -> Result<bool> {
    check_pair(f, g)?;
    let (vars, index) = var_index(f, g);
    let given: HashMap<Var, &Vec<u64>> = w.point.iter().map(|(v, a)| (*v, a)).collect();
    let mut point = Vec::with_capacity(vars.len());
    for v in &vars {
        let Some(a) = given.get(v) else { return Ok(false) };
        if a.len() != w.dim * w.dim {
            return Ok(false);
        }
        point.push(Mat { dim: w.dim, a: a.to_vec() });
    }
    let left = evaluate(&compile(f, w.prime, &index)?, &point, w.dim, w.prime);
    let right = evaluate(&compile(g, w.prime, &index)?, &point, w.dim, w.prime);
    Ok(left.a == w.left && right.a == w.right && left != right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse;

    #[test]
    fn formula_equals_itself() {
        let f = parse("(+ (scale 1/3 x1) (* x2 (+ x3 1)))").unwrap();
        for seed in 0..5 {
            let cfg = PitConfig { seed, ..PitConfig::default() };
            assert!(pit_equal(&f, &f, &cfg).unwrap().is_equal());
        }
    }

    #[test]
    fn commuted_product_differs_noncommutatively() {
        let a = parse("mode: noncommutative\n(* x1 x2)").unwrap();
        let b = parse("mode: noncommutative\n(* x2 x1)").unwrap();
        for seed in 0..20 {
            let cfg = PitConfig { seed, matrix_dim: Some(3), ..PitConfig::default() };
            match pit_equal(&a, &b, &cfg).unwrap() {
                PitVerdict::Unequal(w) => {
                    assert_eq!(w.dim, 3);
                    assert!(check_witness(&a, &b, &w).unwrap());
                }
                v => panic!("seed {seed}: {v:?}"),
            }
        }
    }

    #[test]
    fn commuted_product_is_equal_commutatively() {
        let a = parse("(* x1 x2)").unwrap();
        let b = parse("(* x2 x1)").unwrap();
        assert!(pit_equal(&a, &b, &PitConfig::default()).unwrap().is_equal());
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let a = parse("(+ x1 x2)").unwrap();
        let b = parse("(+ x1 (scale 2 x2))").unwrap();
        let PitVerdict::Unequal(mut w) = pit_equal(&a, &b, &PitConfig::default()).unwrap() else {
            panic!("expected unequal");
        };
        assert!(check_witness(&a, &b, &w).unwrap());
        w.left[0] ^= 1;
        assert!(!check_witness(&a, &b, &w).unwrap());
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = parse("(* x1 x2)").unwrap();
        let b = parse("mode: noncommutative\n(* x1 x2)").unwrap();
        assert_eq!(pit_equal(&a, &b, &PitConfig::default()), Err(Error::ModeMismatch));
    }
}
