//! Sparse exact polynomials and formula expansion.
//!
//! Monomials are stored as variable sequences. In commutative mode the
//! sequence is kept sorted, which makes it a sparse exponent vector; in
//! non-commutative mode it is the word itself.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ir::{Formula, Mode, Node, Var};
use crate::scalar::{Field, Scalar};

/// Default cap on the number of entries of any intermediate table.
pub const DEFAULT_TABLE_BUDGET: usize = 1_000_000;
/// Default cap on the number of enumerated parse trees.
pub const DEFAULT_PARSE_TREE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<Var>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![v])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial, mode: Mode) -> Monomial {
        match mode {
            Mode::NonCommutative => {
                let mut w = Vec::with_capacity(self.0.len() + other.0.len());
                w.extend_from_slice(&self.0);
                w.extend_from_slice(&other.0);
                Monomial(w)
            }
            Mode::Commutative => {
                let (a, b) = (&self.0, &other.0);
                let mut w = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    if a[i] <= b[j] {
                        w.push(a[i]);
                        i += 1;
                    } else {
                        w.push(b[j]);
                        j += 1;
                    }
                }
                w.extend_from_slice(&a[i..]);
                w.extend_from_slice(&b[j..]);
                Monomial(w)
            }
        }
    }

    /// `(variable, multiplicity)` pairs in variable order.
    pub fn exponents(&self) -> Vec<(Var, u32)> {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        let mut out: Vec<(Var, u32)> = Vec::new();
        for v in sorted {
            match out.last_mut() {
                Some((w, c)) if *w == v => *c += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Exact polynomial: monomial to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyTable {
    pub mode: Mode,
    pub field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PolyTable {
    pub fn zero(mode: Mode, field: Field) -> Self {
        PolyTable {
            mode,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar, mode: Mode) -> Self {
        let field = c.field();
        let mut t = PolyTable::zero(mode, field);
        t.add_term(Monomial::one(), c);
        t
    }

    pub fn var(v: Var, mode: Mode, field: Field) -> Self {
        let mut t = PolyTable::zero(mode, field);
        t.add_term(Monomial::var(v), Scalar::one(field));
        t
    }

    pub fn from_terms(mode: Mode, field: Field, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut t = PolyTable::zero(mode, field);
        for (m, c) in terms {
            let m = match mode {
                Mode::Commutative => {
                    let mut v = m.0;
                    v.sort_unstable();
                    Monomial(v)
                }
                Mode::NonCommutative => m,
            };
            t.add_term(m, c);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.get(m)
    }

    /// Largest monomial degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Split by monomial degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<usize, PolyTable> {
        let mut out: BTreeMap<usize, PolyTable> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| PolyTable::zero(self.mode, self.field))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += w * other`
    pub fn add_scaled(&mut self, other: &PolyTable, w: &Scalar) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * w);
        }
    }

    pub fn scale(&self, w: &Scalar) -> PolyTable {
        let mut t = PolyTable::zero(self.mode, self.field);
        t.add_scaled(self, w);
        t
    }

    pub fn add(&self, other: &PolyTable) -> PolyTable {
        let mut t = self.clone();
        t.add_scaled(other, &Scalar::one(self.field));
        t
    }

    /// Ordered product, failing as soon as the table outgrows `budget`.
    pub fn mul_budgeted(&self, other: &PolyTable, budget: usize) -> Result<PolyTable> {
        let mut t = PolyTable::zero(self.mode, self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                t.add_term(m1.mul(m2, self.mode), c1 * c2);
                if t.terms.len() > budget {
                    return Err(Error::BudgetExceeded { what: "expansion table", budget });
                }
            }
        }
        Ok(t)
    }

    pub fn mul(&self, other: &PolyTable) -> PolyTable {
        self.mul_budgeted(other, usize::MAX).expect("unbounded")
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }
}

impl fmt::Display for PolyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

fn expand_rec(
    node: &Node,
    mode: Mode,
    field: Field,
    budget: usize,
    next_id: &mut usize,
    visit: &mut dyn FnMut(usize, &PolyTable),
) -> Result<PolyTable> {
    let id = *next_id;
    *next_id += 1;
    let table = match node {
        Node::Var(v) => PolyTable::var(*v, mode, field),
        Node::One => PolyTable::constant(Scalar::one(field), mode),
        Node::Sum(edges) => {
            let mut acc = PolyTable::zero(mode, field);
            for e in edges {
                let t = expand_rec(&e.node, mode, field, budget, next_id, visit)?;
                acc.add_scaled(&t, &e.weight);
                if acc.len() > budget {
                    return Err(Error::BudgetExceeded { what: "expansion table", budget });
                }
            }
            acc
        }
        Node::Prod(edges) => {
            let mut acc = PolyTable::constant(Scalar::one(field), mode);
            for e in edges {
                let t = expand_rec(&e.node, mode, field, budget, next_id, visit)?;
                acc = acc.mul_budgeted(&t.scale(&e.weight), budget)?;
            }
            acc
        }
    };
    visit(id, &table);
    Ok(table)
}

/// Exact polynomial of `f`, failing if any intermediate table exceeds `budget`.
pub fn expand(f: &Formula, budget: usize) -> Result<PolyTable> {
    expand_node(&f.root, f.mode, f.field, budget)
}

pub fn expand_node(node: &Node, mode: Mode, field: Field, budget: usize) -> Result<PolyTable> {
    let mut id = 0;
    expand_rec(node, mode, field, budget, &mut id, &mut |_, _| {})
}

/// Expand `f`, calling `visit(preorder_id, table)` for every node.
pub fn expand_visiting(
    f: &Formula,
    budget: usize,
    visit: &mut dyn FnMut(usize, &PolyTable),
) -> Result<PolyTable> {
    let mut id = 0;
    expand_rec(&f.root, f.mode, f.field, budget, &mut id, visit)
}

/// Number of parse trees, saturating at `u128::MAX`.
pub fn count_parse_trees(node: &Node) -> u128 {
    match node {
        Node::Var(_) | Node::One => 1,
        Node::Sum(e) => e
            .iter()
            .fold(0u128, |acc, e| acc.saturating_add(count_parse_trees(&e.node))),
        Node::Prod(e) => e
            .iter()
            .fold(1u128, |acc, e| acc.saturating_mul(count_parse_trees(&e.node))),
    }
}

fn enumerate_rec(node: &Node, mode: Mode, field: Field) -> Vec<(Scalar, Monomial)> {
    match node {
        Node::Var(v) => vec![(Scalar::one(field), Monomial::var(*v))],
        Node::One => vec![(Scalar::one(field), Monomial::one())],
        Node::Sum(edges) => edges
            .iter()
            .flat_map(|e| {
                enumerate_rec(&e.node, mode, field)
                    .into_iter()
                    .map(move |(c, m)| (&c * &e.weight, m))
            })
            .collect(),
        Node::Prod(edges) => {
            let mut acc = vec![(Scalar::one(field), Monomial::one())];
            for e in edges {
                let child = enumerate_rec(&e.node, mode, field);
                acc = acc
                    .iter()
                    .flat_map(|(c1, m1)| {
                        child
                            .iter()
                            .map(move |(c2, m2)| (&(c1 * c2) * &e.weight, m1.mul(m2, mode)))
                    })
                    .collect();
            }
            acc
        }
    }
}

/// One `(coefficient, monomial)` entry per parse tree.
pub fn enumerate_parse_trees(f: &Formula, budget: usize) -> Result<Vec<(Scalar, Monomial)>> {
    if count_parse_trees(&f.root) > budget as u128 {
        return Err(Error::BudgetExceeded { what: "parse tree", budget });
    }
    Ok(enumerate_rec(&f.root, f.mode, f.field))
}

fn support_rec(node: &Node, mode: Mode, budget: usize) -> Result<BTreeSet<Monomial>> {
    let set = match node {
        Node::Var(v) => BTreeSet::from([Monomial::var(*v)]),
        Node::One => BTreeSet::from([Monomial::one()]),
        Node::Sum(edges) => {
            let mut acc = BTreeSet::new();
            for e in edges {
                acc.extend(support_rec(&e.node, mode, budget)?);
            }
            acc
        }
        Node::Prod(edges) => {
            let mut acc = BTreeSet::from([Monomial::one()]);
            for e in edges {
                let child = support_rec(&e.node, mode, budget)?;
                let mut next = BTreeSet::new();
                for a in &acc {
                    for b in &child {
                        next.insert(a.mul(b, mode));
                        if next.len() > budget {
                            return Err(Error::BudgetExceeded { what: "expansion table", budget });
                        }
                    }
                }
                acc = next;
            }
            acc
        }
    };
    if set.len() > budget {
        return Err(Error::BudgetExceeded { what: "expansion table", budget });
    }
    Ok(set)
}

/// The set of monomials produced by parse trees, ignoring coefficients.
pub fn parse_tree_support(f: &Formula, budget: usize) -> Result<BTreeSet<Monomial>> {
    support_rec(&f.root, f.mode, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse;

    fn sum_entries(entries: &[(Scalar, Monomial)], f: &Formula) -> PolyTable {
        PolyTable::from_terms(f.mode, f.field, entries.iter().map(|(c, m)| (m.clone(), c.clone())))
    }

    #[test]
    fn one_leaf_expands_to_constant() {
        let f = parse("(+ 1 1)").unwrap();
        let t = expand(&f, 10).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.coefficient(&Monomial::one()).unwrap().to_string(), "2");
    }

    #[test]
    fn noncommutative_words_are_distinct() {
        let a = expand(&parse("mode: noncommutative\n(* x1 x2)").unwrap(), 10).unwrap();
        let b = expand(&parse("mode: noncommutative\n(* x2 x1)").unwrap(), 10).unwrap();
        assert_ne!(a, b);
        let a = expand(&parse("(* x1 x2)").unwrap(), 10).unwrap();
        let b = expand(&parse("(* x2 x1)").unwrap(), 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = parse("(+ (* x1 x2) (scale -1 (* x1 x2)) x3)").unwrap();
        let t = expand(&f, 10).unwrap();
        assert_eq!(t.to_string(), "x3");
    }

    #[test]
    fn comb_has_three_parse_trees() {
        let f = parse("(+ x1 (* x2 (+ x3 (* x4 x5))))").unwrap();
        let trees = enumerate_parse_trees(&f, 100).unwrap();
        let words: Vec<String> = trees.iter().map(|(_, m)| m.to_string()).collect();
        assert_eq!(words, vec!["x1", "x2*x3", "x2*x4*x5"]);
        assert_eq!(sum_entries(&trees, &f), expand(&f, 100).unwrap());
    }

    #[test]
    fn product_of_leaves_has_one_parse_tree() {
        let f = parse("(* x1 x2)").unwrap();
        assert_eq!(enumerate_parse_trees(&f, 10).unwrap().len(), 1);
    }

    #[test]
    fn budgets_are_enforced() {
        let f = parse("(* (+ x1 x2 x3) (+ x4 x5 x6))").unwrap();
        assert!(matches!(expand(&f, 5), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(enumerate_parse_trees(&f, 8), Err(Error::BudgetExceeded { .. })));
        assert_eq!(expand(&f, 9).unwrap().len(), 9);
    }

    #[test]
    fn exponents_collect_multiplicities() {
        let m = Monomial(vec![Var(2), Var(1), Var(2)]);
        assert_eq!(m.exponents(), vec![(Var(1), 1), (Var(2), 2)]);
    }

    #[test]
    fn homogeneous_parts_split_by_degree() {
        let f = parse("(+ 1 x1 (* x1 x2))").unwrap();
        let parts = expand(&f, 10).unwrap().homogeneous_parts();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
    }
}
