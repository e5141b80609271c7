mod common;

use common::{any_formula, mode, monotone_formula};
use formdepth_core::metrics::Potential;
use formdepth_core::poly::expand;
use formdepth_core::predicates::{is_homogeneous, is_monotone, MonotoneCheck};
use formdepth_core::transforms::{
    binarize, collapse, depth_reduce_bb, depth_reduce_homogeneous, depth_reduce_main, depth_reduce_nearlinear,
    homogenize, homogenize_size_bound, main_size_bound, product_fanin_2,
};
use formdepth_core::verify::equal_expand;
use formdepth_core::{metrics, Epsilon, Formula, Node, PolyTable};
use num_bigint::BigUint;
use proptest::prelude::*;

const BUDGET: usize = 200_000;

fn same_poly(f: &Formula, g: &Formula) -> Result<(), TestCaseError> {
    match equal_expand(f, g, BUDGET) {
        Ok(eq) => {
            prop_assert!(eq, "expansions differ");
            Ok(())
        }
        Err(formdepth_core::Error::BudgetExceeded { .. }) => Err(TestCaseError::reject("over budget")),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

fn no_nested_same_kind(n: &Node) -> bool {
    n.children().iter().all(|e| {
        let clash = matches!((n, &e.node), (Node::Sum(_), Node::Sum(_)) | (Node::Prod(_), Node::Prod(_)));
        !clash && no_nested_same_kind(&e.node)
    })
}

fn products_binary(n: &Node) -> bool {
    !matches!(n, Node::Prod(e) if e.len() != 2) && n.children().iter().all(|e| products_binary(&e.node))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn binarize_properties(f in any_formula()) {
        let g = binarize(&f);
        prop_assert!(g.is_fanin2());
        prop_assert_eq!(g.size(), f.size());
        prop_assert_eq!(g.mode, f.mode);
        same_poly(&f, &g)?;
    }

    #[test]
    fn collapse_properties(f in any_formula()) {
        let g = collapse(&f);
        prop_assert!(no_nested_same_kind(&g.root));
        prop_assert_eq!(g.size(), f.size());
        same_poly(&f, &g)?;
    }

    #[test]
    fn balancing_is_equivalent(f in any_formula(), one in any::<bool>()) {
        let eps = if one { Epsilon::ONE } else { Epsilon::HALF };
        let g = depth_reduce_bb(&f, eps);
        prop_assert!(g.is_fanin2());
        same_poly(&f, &g)?;
    }

    #[test]
    fn main_reduction_bounds(f in any_formula(), delta in 1u32..=4) {
        let g = binarize(&f);
        let m = metrics(&g);
        let out = depth_reduce_main(&g, delta).unwrap();
        let o = metrics(&out);
        prop_assert!(o.product_depth <= Potential::new(m.syn_degree, m.sum_depth, delta).phi);
        prop_assert!(BigUint::from(o.size) <= main_size_bound(m.size, m.syn_degree, delta));
        prop_assert!(o.syn_degree <= m.syn_degree);
        same_poly(&g, &out)?;
    }

    #[test]
    fn composite_reductions_are_equivalent(f in any_formula()) {
        same_poly(&f, &depth_reduce_homogeneous(&f).unwrap())?;
        same_poly(&f, &depth_reduce_nearlinear(&f, Epsilon::HALF).unwrap())?;
        same_poly(&f, &depth_reduce_nearlinear(&f, Epsilon::ONE).unwrap())?;
    }

    #[test]
    fn product_fanin_properties(f in any_formula()) {
        let wide = collapse(&f);
        let g = product_fanin_2(&wide);
        prop_assert!(products_binary(&g.root));
        prop_assert!(g.size() <= wide.size());
        same_poly(&wide, &g)?;
    }

    #[test]
    fn homogenize_components_sum_to_input(f in any_formula()) {
        let g = binarize(&f);
        let m = metrics(&g);
        let Ok(whole) = expand(&f, BUDGET) else { return Err(TestCaseError::reject("over budget")) };
        let comps = homogenize(&g, m.syn_degree).unwrap();
        let cancellation_free = is_monotone(&f, MonotoneCheck::Syntactic, BUDGET).unwrap_or(false);
        let mut total = PolyTable::zero(f.mode, f.field);
        let mut size = 0;
        for (deg, c) in comps.iter().enumerate() {
            let Some(c) = c else { continue };
            size += c.size();
            let p = expand(c, BUDGET).unwrap();
            prop_assert!(p.monomials().all(|mono| mono.degree() == deg));
            if cancellation_free {
                prop_assert!(!p.is_empty(), "component {} is present but zero", deg);
            }
            total = total.add(&p);
        }
        prop_assert_eq!(total, whole);
        prop_assert!(BigUint::from(size) <= homogenize_size_bound(m.size, m.product_depth, m.syn_degree));
    }

    #[test]
    fn monotone_and_homogeneous_shape_is_kept(f in mode().prop_flat_map(monotone_formula)) {
        let homogeneous = is_homogeneous(&f);
        for g in [
            binarize(&f),
            collapse(&f),
            depth_reduce_bb(&f, Epsilon::ONE),
            depth_reduce_main(&binarize(&f), 2).unwrap(),
            depth_reduce_homogeneous(&f).unwrap(),
            product_fanin_2(&f),
        ] {
            prop_assert!(is_monotone(&g, MonotoneCheck::Syntactic, BUDGET).unwrap());
            prop_assert_eq!(g.mode, f.mode);
            if homogeneous {
                prop_assert!(is_homogeneous(&g));
            }
        }
    }
}
