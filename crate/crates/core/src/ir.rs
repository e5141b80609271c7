//! Formula representation.
//!
//! A formula is a tree of sum and product gates over variable leaves and the
//! constant 1. Every edge carries a nonzero field weight. Size is the number
//! of leaves; depth counts the gates on the longest leaf-to-root path, so a
//! bare leaf has depth 0.
//!
//! Invariants enforced by [`Formula::validate`]:
//! - every gate has at least one child and every weight is nonzero;
//! - a `One` leaf hangs only below a sum gate;
//! - only the output gate may have syntactic degree 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// Variable identifier.
///
/// Plain variables `x<n>` use ids below 2^63. Doubly indexed variables
/// `x_<a>_<b>` set the top bit and pack `a` (31 bits) and `b` (32 bits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub u64);

const PAIR_FLAG: u64 = 1 << 63;

impl Var {
    pub fn indexed(n: u64) -> Var {
        assert!(n < PAIR_FLAG, "variable index {n} out of range");
        Var(n)
    }

    pub fn pair(a: u64, b: u64) -> Var {
        assert!(a < (1 << 31) && b < (1 << 32), "pair index ({a}, {b}) out of range");
        Var(PAIR_FLAG | (a << 32) | b)
    }

    pub fn as_pair(self) -> Option<(u64, u64)> {
        if self.0 & PAIR_FLAG == 0 {
            None
        } else {
            let rest = self.0 & !PAIR_FLAG;
            Some((rest >> 32, rest & 0xffff_ffff))
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_pair() {
            Some((a, b)) => write!(f, "x_{a}_{b}"),
            None => write!(f, "x{}", self.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Commutative,
    NonCommutative,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Commutative => write!(f, "commutative"),
            Mode::NonCommutative => write!(f, "noncommutative"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Sum,
    Prod,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Var(Var),
    One,
    Sum(Vec<Edge>),
    Prod(Vec<Edge>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub weight: Scalar,
    pub node: Node,
}

impl Edge {
    pub fn new(weight: Scalar, node: Node) -> Self {
        Edge { weight, node }
    }

    pub fn unit(node: Node, field: Field) -> Self {
        Edge {
            weight: Scalar::one(field),
            node,
        }
    }

    /// Fold fan-in-1 sum wrappers into the edge weight.
    pub fn absorbed(mut self) -> Edge {
        loop {
            match self.node {
                Node::Sum(mut edges) if edges.len() == 1 => {
                    let inner = edges.pop().unwrap();
                    self.weight = &self.weight * &inner.weight;
                    self.node = inner.node;
                }
                node => {
                    self.node = node;
                    return self;
                }
            }
        }
    }
}

impl Node {
    pub fn var(n: u64) -> Node {
        Node::Var(Var::indexed(n))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Var(_) | Node::One)
    }

    pub fn kind(&self) -> Option<GateKind> {
        match self {
            Node::Sum(_) => Some(GateKind::Sum),
            Node::Prod(_) => Some(GateKind::Prod),
            _ => None,
        }
    }

    pub fn children(&self) -> &[Edge] {
        match self {
            Node::Sum(e) | Node::Prod(e) => e,
            _ => &[],
        }
    }

    pub fn gate(kind: GateKind, edges: Vec<Edge>) -> Node {
        match kind {
            GateKind::Sum => Node::Sum(edges),
            GateKind::Prod => Node::Prod(edges),
        }
    }

    /// Sum of unit-weight children.
    pub fn sum_of(nodes: Vec<Node>, field: Field) -> Node {
        Node::Sum(nodes.into_iter().map(|n| Edge::unit(n, field)).collect())
    }

    /// Product of unit-weight children, in order.
    pub fn prod_of(nodes: Vec<Node>, field: Field) -> Node {
        Node::Prod(nodes.into_iter().map(|n| Edge::unit(n, field)).collect())
    }

    /// Leaf count.
    pub fn size(&self) -> u64 {
        let mut stack = vec![self];
        let mut leaves = 0;
        while let Some(n) = stack.pop() {
            if n.is_leaf() {
                leaves += 1;
            }
            stack.extend(n.children().iter().map(|e| &e.node));
        }
        leaves
    }

    pub fn syn_degree(&self) -> u64 {
        match self {
            Node::Var(_) => 1,
            Node::One => 0,
            Node::Sum(e) => e.iter().map(|e| e.node.syn_degree()).max().unwrap_or(0),
            Node::Prod(e) => e.iter().map(|e| e.node.syn_degree()).sum(),
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            Node::Var(_) | Node::One => 0,
            Node::Sum(e) | Node::Prod(e) => 1 + e.iter().map(|e| e.node.depth()).max().unwrap_or(0),
        }
    }

    /// Multiply the polynomial computed by `node` by `weight` without adding
    /// a gate, unless `node` is a leaf.
    pub fn scaled(self, weight: Scalar) -> Node {
        if weight.is_one() {
            return self;
        }
        match self {
            Node::Sum(mut edges) => {
                for e in &mut edges {
                    e.weight = &e.weight * &weight;
                }
                Node::Sum(edges)
            }
            Node::Prod(mut edges) => {
                edges[0].weight = &edges[0].weight * &weight;
                Node::Prod(edges)
            }
            leaf => Node::Sum(vec![Edge::new(weight, leaf)]),
        }
    }

    /// Variables at the leaves, left to right.
    pub fn leaf_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            match n {
                Node::Var(v) => out.push(*v),
                Node::One => {}
                Node::Sum(e) | Node::Prod(e) => stack.extend(e.iter().rev().map(|e| &e.node)),
            }
        }
        out
    }

    /// Rename every variable through `f`.
    pub fn map_vars(&self, f: &impl Fn(Var) -> Var) -> Node {
        match self {
            Node::Var(v) => Node::Var(f(*v)),
            Node::One => Node::One,
            Node::Sum(e) | Node::Prod(e) => Node::gate(
                self.kind().unwrap(),
                e.iter()
                    .map(|e| Edge::new(e.weight.clone(), e.node.map_vars(f)))
                    .collect(),
            ),
        }
    }
}

/// A node paired with the multiplier applied to it.
pub type Weighted = (Scalar, Node);

/// Balanced product of ordered factors; `None` for an empty list.
pub fn balanced_product(mut factors: Vec<Node>, field: Field) -> Option<Node> {
    match factors.len() {
        0 => None,
        1 => factors.pop(),
        n => {
            let right = factors.split_off(n / 2);
            let l = balanced_product(factors, field).unwrap();
            let r = balanced_product(right, field).unwrap();
            Some(Node::prod_of(vec![l, r], field))
        }
    }
}

/// Identifier of a node: its index in preorder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GateId(pub usize);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Per-node data of a [`FlatFormula`].
#[derive(Clone, Debug)]
pub struct FlatNode<'a> {
    pub node: &'a Node,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub size: u64,
    pub syn_degree: u64,
    pub depth: u32,
    pub sum_depth: u32,
    pub product_depth: u32,
}

/// Preorder arena over a borrowed tree with subtree metrics precomputed.
/// Index 0 is the root and every child has a larger index than its parent.
#[derive(Clone, Debug)]
pub struct FlatFormula<'a> {
    pub nodes: Vec<FlatNode<'a>>,
}

impl<'a> FlatFormula<'a> {
    pub fn new(root: &'a Node) -> Self {
        let mut nodes: Vec<FlatNode<'a>> = Vec::new();
        let mut stack: Vec<(&'a Node, Option<usize>)> = vec![(root, None)];
        while let Some((node, parent)) = stack.pop() {
            let id = nodes.len();
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            nodes.push(FlatNode {
                node,
                parent,
                children: Vec::new(),
                size: 0,
                syn_degree: 0,
                depth: 0,
                sum_depth: 0,
                product_depth: 0,
            });
            for e in node.children().iter().rev() {
                stack.push((&e.node, Some(id)));
            }
        }
        for id in (0..nodes.len()).rev() {
            let (size, deg, depth, sd, pd) = match nodes[id].node {
                Node::Var(_) => (1, 1, 0, 0, 0),
                Node::One => (1, 0, 0, 0, 0),
                Node::Sum(_) | Node::Prod(_) => {
                    let is_sum = matches!(nodes[id].node, Node::Sum(_));
                    let ch = &nodes[id].children;
                    let size = ch.iter().map(|&c| nodes[c].size).sum();
                    let deg = if is_sum {
                        ch.iter().map(|&c| nodes[c].syn_degree).max().unwrap_or(0)
                    } else {
                        ch.iter().map(|&c| nodes[c].syn_degree).sum()
                    };
                    let depth = 1 + ch.iter().map(|&c| nodes[c].depth).max().unwrap_or(0);
                    let sd = ch.iter().map(|&c| nodes[c].sum_depth).max().unwrap_or(0)
                        + u32::from(is_sum);
                    let pd = ch.iter().map(|&c| nodes[c].product_depth).max().unwrap_or(0)
                        + u32::from(!is_sum);
                    (size, deg, depth, sd, pd)
                }
            };
            let n = &mut nodes[id];
            n.size = size;
            n.syn_degree = deg;
            n.depth = depth;
            n.sum_depth = sd;
            n.product_depth = pd;
        }
        FlatFormula { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &FlatNode<'a> {
        &self.nodes[0]
    }

    /// Position of `child` among the children of its parent.
    pub fn child_index(&self, child: usize) -> Option<usize> {
        let p = self.nodes[child].parent?;
        self.nodes[p].children.iter().position(|&c| c == child)
    }

    /// Node ids from the root down to `id`, inclusive.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// A formula together with its commutativity mode and field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    pub root: Node,
    pub mode: Mode,
    pub field: Field,
}

impl Formula {
    /// Build and validate.
    pub fn new(root: Node, mode: Mode, field: Field) -> Result<Self> {
        let f = Formula { root, mode, field };
        f.validate()?;
        Ok(f)
    }

    /// Build without validation. Passes use this for intermediate results.
    pub fn new_unchecked(root: Node, mode: Mode, field: Field) -> Self {
        Formula { root, mode, field }
    }

    /// Same mode and field, different tree.
    pub fn with_root(&self, root: Node) -> Formula {
        Formula {
            root,
            mode: self.mode,
            field: self.field,
        }
    }

    pub fn flat(&self) -> FlatFormula<'_> {
        FlatFormula::new(&self.root)
    }

    pub fn size(&self) -> u64 {
        self.root.size()
    }

    pub fn syn_degree(&self) -> u64 {
        self.root.syn_degree()
    }

    pub fn validate(&self) -> Result<()> {
        let flat = self.flat();
        for (id, n) in flat.nodes.iter().enumerate() {
            for e in n.node.children() {
                if e.weight.field() != self.field {
                    return Err(Error::WellFormedness(format!(
                        "edge weight {} below gate #{id} is not in field {}",
                        e.weight, self.field
                    )));
                }
                if e.weight.is_zero() {
                    return Err(Error::WellFormedness(format!(
                        "zero edge weight below gate #{id}"
                    )));
                }
            }
            match n.node {
                Node::Sum(e) | Node::Prod(e) if e.is_empty() => {
                    return Err(Error::WellFormedness(format!("gate #{id} has no children")));
                }
                Node::One => {
                    if let Some(p) = n.parent {
                        if !matches!(flat.nodes[p].node, Node::Sum(_)) {
                            return Err(Error::WellFormedness(format!(
                                "constant leaf #{id} is a child of a product gate"
                            )));
                        }
                    }
                }
                Node::Sum(_) | Node::Prod(_) if n.syn_degree == 0 && id != 0 => {
                    return Err(Error::WellFormedness(format!(
                        "gate #{id} computes a constant but is not the output"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Fan-in exactly 2 everywhere, except that the output may be a
    /// fan-in-1 sum scaling a single leaf.
    pub fn first_non_fanin2(&self) -> Option<GateId> {
        let flat = self.flat();
        for (id, n) in flat.nodes.iter().enumerate() {
            let ch = n.node.children();
            if n.node.is_leaf() || ch.len() == 2 {
                continue;
            }
            let scaled_leaf =
                id == 0 && ch.len() == 1 && matches!(n.node, Node::Sum(_)) && ch[0].node.is_leaf();
            if !scaled_leaf {
                return Some(GateId(id));
            }
        }
        None
    }

    pub fn is_fanin2(&self) -> bool {
        self.first_non_fanin2().is_none()
    }

    pub fn require_fanin2(&self) -> Result<()> {
        match self.first_non_fanin2() {
            None => Ok(()),
            Some(g) => Err(Error::NotFanIn2(g)),
        }
    }

    /// Subformula rooted at `gate`.
    pub fn subformula(&self, gate: GateId) -> Formula {
        let flat = self.flat();
        self.with_root(flat.nodes[gate.0].node.clone())
    }

    /// Sorted, deduplicated variables of the formula.
    pub fn vars(&self) -> Vec<Var> {
        let mut v = self.root.leaf_vars();
        v.sort_unstable();
        v.dedup();
        v
    }
}
