#![allow(dead_code)]

use formdepth_core::{Edge, Field, Formula, Mode, Node, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub const SMALL_PRIME: u64 = 1_000_003;

pub fn weight(field: Field) -> impl Strategy<Value = Scalar> {
    (prop_oneof![-9i64..=-1, 1i64..=9], 1i64..=4).prop_map(move |(n, d)| {
        let r = BigRational::new(BigInt::from(n), BigInt::from(d));
        Scalar::from_rational(&r, field).expect("denominator is invertible")
    })
}

fn positive_weight(field: Field) -> impl Strategy<Value = Scalar> {
    (1i64..=9).prop_map(move |n| Scalar::from_i64(n, field))
}

fn node_with(field: Field, w: BoxedStrategy<Scalar>, vars: u64) -> impl Strategy<Value = Node> {
    let leaf = (1..=vars).prop_map(Node::var);
    leaf.prop_recursive(4, 48, 4, move |inner| {
        let edges = prop::collection::vec((w.clone(), inner.clone()), 2..=3)
            .prop_map(|es| es.into_iter().map(|(w, n)| Edge::new(w, n)).collect::<Vec<_>>());
        let w2 = w.clone();
        prop_oneof![
            3 => edges.clone().prop_map(Node::Sum),
            3 => edges.prop_map(Node::Prod),
            1 => (w2, inner).prop_map(move |(c, n)| {
                Node::Sum(vec![Edge::new(c, n), Edge::unit(Node::One, field)])
            }),
        ]
    })
}

/// Random well-formed formulas over `x1..x6`, weights `+-p/q` with small
/// numerator and denominator.
pub fn formula(mode: Mode, field: Field) -> impl Strategy<Value = Formula> {
    node_with(field, weight(field).boxed(), 6).prop_map(move |n| Formula::new(n, mode, field).expect("well-formed"))
}

/// Random formulas with positive integer weights.
pub fn monotone_formula(mode: Mode) -> impl Strategy<Value = Formula> {
    let field = Field::Rational;
    node_with(field, positive_weight(field).boxed(), 6)
        .prop_map(move |n| Formula::new(n, mode, field).expect("well-formed"))
}

pub fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Commutative), Just(Mode::NonCommutative)]
}

pub fn field() -> impl Strategy<Value = Field> {
    prop_oneof![3 => Just(Field::Rational), 1 => Just(Field::Prime(SMALL_PRIME))]
}

pub fn any_formula() -> impl Strategy<Value = Formula> {
    (mode(), field()).prop_flat_map(|(m, f)| formula(m, f))
}
