//! The nested inner-product polynomials `H(k, r)` and their canonical
//! formula, with exhaustive checkers for the combinatorics behind the
//! monotone lower bound.
//!
//! Variables are indexed by `sigma` in `[2]^k` and `tau` in `[r]^k` (digits
//! start at 1). `H_{u,v}` for prefixes `u`, `v` of equal length is
//! `x_{u,v}` at full length and `sum_a H_{u1,va} * H_{u2,va}` otherwise.
//! Variable `x_{sigma,tau}` is encoded as the pair of its 0-based mixed-radix
//! indices, most significant digit first, and prints as `x_<sigma>_<tau>`.

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::{Formula, GateId, Mode, Node, Var};
use crate::poly::expand;
use crate::scalar::Field;
use crate::verify::gate_monomial_counts;

/// Largest variable universe `(2r)^k` that will be built.
pub const UNIVERSE_BOUND: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardParams {
    pub k: u32,
    pub r: u32,
}

impl HardParams {
    pub fn new(k: u32, r: u32) -> Result<Self> {
        if k == 0 || r < 2 || k > 62 {
            return Err(Error::ParamOutOfRange(format!("need k >= 1 and r >= 2, got k = {k}, r = {r}")));
        }
        Ok(HardParams { k, r })
    }

    pub fn degree(&self) -> u64 {
        1 << self.k
    }

    pub fn universe_size(&self) -> u128 {
        (2 * u128::from(self.r)).saturating_pow(self.k)
    }

    /// `r^(2^k - 1)`, saturating.
    pub fn monomial_count(&self) -> u128 {
        u128::from(self.r).saturating_pow((self.degree() - 1).min(u64::from(u32::MAX)) as u32)
    }

    /// Variable `x_{sigma,tau}` for 1-based digit strings of length `k`.
    pub fn var(&self, sigma: &[u32], tau: &[u32]) -> Var {
        assert_eq!(sigma.len(), self.k as usize);
        assert_eq!(tau.len(), self.k as usize);
        let s = sigma.iter().fold(0u64, |acc, &d| acc * 2 + u64::from(d - 1));
        let t = tau.iter().fold(0u64, |acc, &d| acc * u64::from(self.r) + u64::from(d - 1));
        Var::pair(s, t)
    }

    /// Inverse of [`HardParams::var`].
    pub fn decode(&self, v: Var) -> Option<(Vec<u32>, Vec<u32>)> {
        let (mut s, mut t) = v.as_pair()?;
        let k = self.k as usize;
        let r = u64::from(self.r);
        if s >= 1 << k || u128::from(t) >= u128::from(r).pow(self.k) {
            return None;
        }
        let mut sigma = vec![0; k];
        let mut tau = vec![0; k];
        for i in (0..k).rev() {
            sigma[i] = (s % 2) as u32 + 1;
            tau[i] = (t % r) as u32 + 1;
            s /= 2;
            t /= r;
        }
        Some((sigma, tau))
    }

    fn check_universe(&self) -> Result<()> {
        let size = self.universe_size();
        if size > UNIVERSE_BOUND {
            return Err(Error::UniverseTooLarge { size, bound: UNIVERSE_BOUND });
        }
        Ok(())
    }

    /// The variable sets `X_sigma`, in mixed-radix order of `sigma`.
    pub fn partition(&self) -> Vec<std::collections::BTreeSet<Var>> {
        let k = self.k as usize;
        all_words(k, 2)
            .into_iter()
            .map(|sigma| all_words(k, self.r).into_iter().map(|tau| self.var(&sigma, &tau)).collect())
            .collect()
    }
}

/// All words of length `len` over `1..=base`, lexicographically.
fn all_words(len: usize, base: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=base).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// Prefixes `u` in `[2]^l` and `v` in `[r]^l`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrefixWord {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl PrefixWord {
    pub fn new(u: Vec<u32>, v: Vec<u32>) -> Self {
        assert_eq!(u.len(), v.len(), "prefixes must have equal length");
        PrefixWord { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Every prefix word of length at most `k`.
    pub fn all(p: &HardParams) -> Vec<PrefixWord> {
        (0..=p.k as usize)
            .flat_map(|l| {
                let us = all_words(l, 2);
                let vs = all_words(l, p.r);
                us.into_iter()
                    .flat_map(move |u| vs.clone().into_iter().map(move |v| PrefixWord::new(u.clone(), v)))
            })
            .collect()
    }
}

fn build(p: &HardParams, u: &mut Vec<u32>, v: &mut Vec<u32>) -> Node {
    if u.len() == p.k as usize {
        return Node::Var(p.var(u, v));
    }
    let field = Field::Rational;
    let terms = (1..=p.r)
        .map(|a| {
            v.push(a);
            let halves = (1..=2)
                .map(|b| {
                    u.push(b);
                    let n = build(p, u, v);
                    u.pop();
                    n
                })
                .collect();
            v.pop();
            Node::prod_of(halves, field)
        })
        .collect();
    Node::sum_of(terms, field)
}

/// The canonical formula `M` for `H(k, r)` over the rationals.
pub fn gen_hard(p: &HardParams) -> Result<Formula> {
    subpolynomial(p, &PrefixWord::default())
}

/// The subformula of `M` computing `H_{u,v}`.
pub fn subpolynomial(p: &HardParams, w: &PrefixWord) -> Result<Formula> {
    p.check_universe()?;
    if w.len() > p.k as usize {
        return Err(Error::ParamOutOfRange(format!("prefix of length {} exceeds k = {}", w.len(), p.k)));
    }
    let root = build(p, &mut w.u.clone(), &mut w.v.clone());
    Ok(Formula::new_unchecked(root, Mode::Commutative, Field::Rational))
}

/// Renaming from the variables of `H(k - l, r)` to those of `H_{u,v}`.
pub fn prefix_renaming(p: &HardParams, w: &PrefixWord) -> impl Fn(Var) -> Var {
    let p = *p;
    let small = HardParams { k: p.k - w.len() as u32, r: p.r };
    let w = w.clone();
    move |x| {
        let (s, t) = small.decode(x).expect("variable of the smaller instance");
        let sigma: Vec<u32> = w.u.iter().chain(&s).copied().collect();
        let tau: Vec<u32> = w.v.iter().chain(&t).copied().collect();
        p.var(&sigma, &tau)
    }
}

/// Node of `M` addressed by the interleaved word `v1 u1 ... vl ul`.
pub fn node_at<'a>(m: &'a Node, w: &PrefixWord) -> Option<&'a Node> {
    let mut cur = m;
    for (&u, &v) in w.u.iter().zip(&w.v) {
        let Node::Sum(terms) = cur else { return None };
        let Node::Prod(halves) = &terms.get(v as usize - 1)?.node else { return None };
        cur = &halves.get(u as usize - 1)?.node;
    }
    Some(cur)
}

/// A monomial with two variables whose `tau` labels diverge too early.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixViolation {
    pub monomial: String,
    pub first: Var,
    pub second: Var,
    /// Length of the common prefix of the `sigma` labels.
    pub sigma_common: usize,
    /// Length of the common prefix of the `tau` labels.
    pub tau_common: usize,
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// In every monomial of `f`, any two variables whose `sigma` labels share a
/// prefix of length exactly `l < k` have `tau` labels sharing a prefix of
/// length at least `l + 1`. Returns the first violation.
pub fn check_prefix_property_of(f: &Formula, p: &HardParams, budget: usize) -> Result<Option<PrefixViolation>> {
    let poly = expand(f, budget)?;
    for m in poly.monomials() {
        let labels: Vec<(Var, Vec<u32>, Vec<u32>)> = m
            .vars()
            .iter()
            .map(|&x| {
                let (s, t) = p
                    .decode(x)
                    .ok_or_else(|| Error::InvalidParams(format!("{x} is not a variable of H({}, {})", p.k, p.r)))?;
                Ok((x, s, t))
            })
            .collect::<Result<_>>()?;
        for (i, (a, sa, ta)) in labels.iter().enumerate() {
            for (b, sb, tb) in &labels[i + 1..] {
                let l = common_prefix(sa, sb);
                if l == p.k as usize {
                    continue;
                }
                let t = common_prefix(ta, tb);
                if t < l + 1 {
                    return Ok(Some(PrefixViolation {
                        monomial: m.to_string(),
                        first: *a,
                        second: *b,
                        sigma_common: l,
                        tau_common: t,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn check_prefix_property(p: &HardParams, budget: usize) -> Result<Option<PrefixViolation>> {
    check_prefix_property_of(&gen_hard(p)?, p, budget)
}

/// Outcome of the per-gate monomial bound check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCountVerdict {
    pub holds: bool,
    pub gates_checked: usize,
    /// Gate, its monomial count and the bound `r^(d - 1)` it exceeds.
    pub violations: Vec<(GateId, usize, u128)>,
}

/// For a formula computing `H(k, r)`, every gate of syntactic degree `d >= 1`
/// computes at most `r^(d - 1)` monomials.
pub fn check_gate_counts(f: &Formula, p: &HardParams, budget: usize) -> Result<GateCountVerdict> {
    let m = gen_hard(p)?;
    if f.mode != m.mode || f.field != m.field || expand(f, budget)? != expand(&m, budget)? {
        return Err(Error::NotComputingH);
    }
    let counts = gate_monomial_counts(f, budget)?;
    let flat = f.flat();
    let mut gates_checked = 0;
    let mut violations = Vec::new();
    for (g, count) in counts {
        let d = flat.nodes[g.0].syn_degree;
        if d == 0 {
            continue;
        }
        gates_checked += 1;
        let bound = u128::from(p.r).saturating_pow((d - 1).min(u64::from(u32::MAX)) as u32);
        if count as u128 > bound {
            violations.push((g, count, bound));
        }
    }
    Ok(GateCountVerdict { holds: violations.is_empty(), gates_checked, violations })
}

/// `k = log2 d` and `r = max(2, floor(n^(1/k)) / 2)` for a power of two
/// `d` with `2 <= d <= sqrt(n)`.
pub fn lower_bound_params(n: u64, d: u64) -> Result<HardParams> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::ParamOutOfRange(format!("d = {d} must be a power of two, at least 2")));
    }
    if u128::from(d) * u128::from(d) > u128::from(n) {
        return Err(Error::ParamOutOfRange(format!("d = {d} exceeds sqrt(n) for n = {n}")));
    }
    let k = d.trailing_zeros();
    let root = n.nth_root(k);
    let r = (root / 2).max(2);
    let r = u32::try_from(r).map_err(|_| Error::ParamOutOfRange(format!("r = {r} is too large")))?;
    HardParams::new(k, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::metrics;

    #[test]
    fn encoding_round_trips() {
        let p = HardParams::new(2, 3).unwrap();
        for sigma in all_words(2, 2) {
            for tau in all_words(2, 3) {
                assert_eq!(p.decode(p.var(&sigma, &tau)), Some((sigma.clone(), tau)));
            }
        }
        assert_eq!(p.var(&[2, 1], &[1, 3]), Var::pair(2, 2));
    }

    #[test]
    fn shape_of_m() {
        let p = HardParams::new(2, 3).unwrap();
        let m = gen_hard(&p).unwrap();
        let g = metrics(&m);
        assert_eq!((g.size, g.depth, g.syn_degree), (36, 4, 4));
    }

    #[test]
    fn smallest_instance_expansion() {
        let p = HardParams::new(1, 2).unwrap();
        let t = expand(&gen_hard(&p).unwrap(), 100).unwrap();
        assert_eq!(t.to_string(), "x_0_0*x_1_0 + x_0_1*x_1_1");
    }

    #[test]
    fn universe_bound() {
        let p = HardParams::new(10, 3).unwrap();
        assert!(matches!(gen_hard(&p), Err(Error::UniverseTooLarge { .. })));
    }

    #[test]
    fn lower_bound_parameters() {
        assert_eq!(lower_bound_params(256, 4).unwrap(), HardParams { k: 2, r: 8 });
        assert_eq!(lower_bound_params(16, 4).unwrap(), HardParams { k: 2, r: 2 });
        assert!(matches!(lower_bound_params(15, 4), Err(Error::ParamOutOfRange(_))));
        assert!(matches!(lower_bound_params(100, 3), Err(Error::ParamOutOfRange(_))));
    }
}
