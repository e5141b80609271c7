//! Formula rewriting passes.
//!
//! Every pass maps a formula to one computing the same polynomial in the same
//! mode and field. Parameter arithmetic is exact: logarithms never appear as
//! floats, comparisons are made between integer powers instead.

mod binarize;
mod balance;
mod collapse;
mod composite;
mod homogenize;
mod main_reduce;
mod pass;
mod prodfanin;
mod skew;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use binarize::binarize;
pub use balance::{bb_decompose, bb_find_split, depth_reduce_bb, BbDecomposition};
pub use collapse::collapse;
pub use composite::{depth_reduce_homogeneous, depth_reduce_nearlinear, pipeline_inhom};
pub use homogenize::{homogenize, homogenize_size_bound};
pub use main_reduce::{depth_reduce_main, main_size_bound, select_frontier, FrontierSet};
pub use pass::{run_pass, PassRun, PassSpec};
pub use prodfanin::product_fanin_2;
pub use skew::{classify_leaves, skew_to_sigma_pi, LeafClass, SkewExpansion};

/// A positive rational `num / den` in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epsilon {
    pub num: u32,
    pub den: u32,
}

impl Epsilon {
    pub const HALF: Epsilon = Epsilon { num: 1, den: 2 };
    pub const ONE: Epsilon = Epsilon { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidParams(format!("epsilon {num}/{den} is not in (0, 1]")));
        }
        let g = num_integer::gcd(num, den);
        Ok(Epsilon { num: num / g, den: den / g })
    }

    pub fn halved(self) -> Epsilon {
        match self.num % 2 {
            0 => Epsilon { num: self.num / 2, den: self.den },
            _ => Epsilon { num: self.num, den: self.den.saturating_mul(2) },
        }
    }

    /// Branch parameter `max(4, 2^ceil(4 / eps))`, saturating.
    pub fn k_bb(self) -> u64 {
        let exp = (4 * u64::from(self.den)).div_ceil(u64::from(self.num));
        if exp >= 64 {
            u64::MAX
        } else {
            (1u64 << exp).max(4)
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot read epsilon `{s}`"));
        if s == "auto" {
            return Ok(Epsilon::HALF);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Epsilon::new(n, d)
    }
}

/// Sum-depth block length for the main reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delta {
    /// Smallest `delta` with `d^delta >= s`, at least 1.
    Auto,
    Fixed(u32),
}

impl Delta {
    pub fn resolve(self, size: u64, degree: u64) -> u32 {
        match self {
            Delta::Fixed(d) => d,
            Delta::Auto => delta_auto(size, degree),
        }
    }
}

impl FromStr for Delta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Delta::Auto);
        }
        match s.parse::<u32>() {
            Ok(d) if d >= 1 => Ok(Delta::Fixed(d)),
            _ => Err(Error::InvalidParams(format!("delta must be `auto` or a positive integer, got `{s}`"))),
        }
    }
}

/// `ceil(log s / log d)` computed as the least `delta >= 1` with `d^delta >= s`.
/// Degrees below 2 give 1.
pub fn delta_auto(size: u64, degree: u64) -> u32 {
    if degree < 2 {
        return 1;
    }
    let mut delta = 1;
    let mut pow = u128::from(degree);
    while pow < u128::from(size) {
        pow *= u128::from(degree);
        delta += 1;
    }
    delta
}

/// Whether `d^(4 / eps) >= s`, i.e. `d^(4 den) >= s^num`.
pub fn nearlinear_uses_bb_only(size: u64, degree: u64, eps: Epsilon) -> bool {
    let lhs = Pow::pow(BigUint::from(degree), 4 * eps.den);
    let rhs = Pow::pow(BigUint::from(size), eps.num);
    lhs >= rhs
}

/// `floor(eps log s / (2 log d))`: the largest `delta` with `d^(2 delta den) <= s^num`.
pub fn nearlinear_delta(size: u64, degree: u64, eps: Epsilon) -> u32 {
    assert!(degree >= 2, "degree must be at least 2");
    let target = Pow::pow(BigUint::from(size), eps.num);
    let step = Pow::pow(BigUint::from(degree), 2 * eps.den);
    let mut pow = BigUint::one();
    let mut delta = 0;
    loop {
        pow *= &step;
        if pow > target {
            return delta;
        }
        delta += 1;
    }
}

/// Everything the passes are parameterized over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub delta: Delta,
    pub epsilon: Epsilon,
    pub table_budget: usize,
    pub parse_tree_budget: usize,
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams {
            delta: Delta::Auto,
            epsilon: Epsilon::HALF,
            table_budget: crate::poly::DEFAULT_TABLE_BUDGET,
            parse_tree_budget: crate::poly::DEFAULT_PARSE_TREE_BUDGET,
        }
    }
}

impl ReductionParams {
    pub fn k_bb(&self) -> u64 {
        self.epsilon.k_bb()
    }
}
