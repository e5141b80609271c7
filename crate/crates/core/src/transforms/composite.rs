//! Passes built from the basic ones.

use crate::error::{Error, Result};
use crate::ir::Formula;
use crate::poly::expand;
use crate::transforms::{
    binarize, collapse, delta_auto, depth_reduce_bb, depth_reduce_main, homogenize, nearlinear_delta,
    nearlinear_uses_bb_only, Epsilon,
};

/// Balance with `eps = 1/2`, run the main reduction with
/// `delta = ceil(log s' / log d)` on the balanced size `s'`, then collapse.
/// Degree-1 formulas skip the main reduction.
pub fn depth_reduce_homogeneous(f: &Formula) -> Result<Formula> {
    let balanced = depth_reduce_bb(f, Epsilon::HALF);
    let d = balanced.syn_degree();
    if d <= 1 {
        return Ok(collapse(&balanced));
    }
    let delta = delta_auto(balanced.size(), d);
    Ok(collapse(&depth_reduce_main(&balanced, delta)?))
}

/// Near-linear-size reduction. When `d^(4/eps) >= s` this is the balancing
/// pass alone; otherwise balancing with `eps/2` is followed by the main
/// reduction with `delta = floor(eps log s / (2 log d))` and collapsing.
pub fn depth_reduce_nearlinear(f: &Formula, eps: Epsilon) -> Result<Formula> {
    let s = f.size();
    let d = f.syn_degree();
    if d <= 1 || nearlinear_uses_bb_only(s, d, eps) {
        return Ok(depth_reduce_bb(f, eps));
    }
    let balanced = depth_reduce_bb(f, eps.halved());
    let delta = nearlinear_delta(s, d, eps);
    Ok(collapse(&depth_reduce_main(&balanced, delta)?))
}

/// For a formula computing a homogeneous polynomial of degree `d >= 2`:
/// balance, take the degree-`d` homogeneous component, then reduce as in
/// [`depth_reduce_homogeneous`]. Homogeneity of the polynomial is checked by
/// exact expansion within `budget`.
pub fn pipeline_inhom(f: &Formula, budget: usize) -> Result<Formula> {
    let poly = expand(f, budget)?;
    let mut degrees = poly.monomials().map(|m| m.degree());
    let d = match degrees.next() {
        Some(d) if d >= 2 && degrees.all(|e| e == d) => d as u64,
        _ => return Err(Error::NotSemanticallyHomogeneous),
    };
    let balanced = depth_reduce_bb(f, Epsilon::HALF);
    let component = homogenize(&balanced, d)?
        .pop()
        .flatten()
        .ok_or_else(|| Error::Invariant("top homogeneous component is empty".into()))?;
    let component = binarize(&component);
    let delta = delta_auto(component.size(), d);
    Ok(collapse(&depth_reduce_main(&component, delta)?))
}
