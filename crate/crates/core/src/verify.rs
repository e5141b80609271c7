//! Equivalence checks between formulas and per-gate monomial counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::{Formula, GateId};
use crate::pit::{pit_equal, PitConfig, PitVerdict, PitWitness};
use crate::poly::{expand, expand_visiting, DEFAULT_TABLE_BUDGET};

/// Exact coefficient-table equality.
pub fn equal_expand(f: &Formula, g: &Formula, budget: usize) -> Result<bool> {
    if f.mode != g.mode {
        return Err(Error::ModeMismatch);
    }
    if f.field != g.field {
        return Err(Error::FieldMismatch);
    }
    Ok(expand(f, budget)? == expand(g, budget)?)
}

/// Number of monomials computed at every node, in preorder.
pub fn gate_monomial_counts(f: &Formula, budget: usize) -> Result<Vec<(GateId, usize)>> {
    let mut counts = Vec::new();
    expand_visiting(f, budget, &mut |id, t| counts.push((GateId(id), t.len())))?;
    counts.sort_unstable();
    Ok(counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMethod {
    Expand,
    Pit,
    /// Exact expansion, falling back to identity testing over budget.
    Auto,
    None,
}

impl std::str::FromStr for VerifyMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expand" => Ok(VerifyMethod::Expand),
            "pit" => Ok(VerifyMethod::Pit),
            "auto" => Ok(VerifyMethod::Auto),
            "none" => Ok(VerifyMethod::None),
            _ => Err(format!("unknown verification method `{s}`")),
        }
    }
}

/// Outcome of an equivalence check, as recorded in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// `equal`, `equal-probably`, `unequal` or `skipped`.
    pub verdict: String,
    /// Method actually used.
    pub method: VerifyMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PitWitness>,
    /// Set when the exact check ran out of budget and identity testing took over.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub downgraded: bool,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.verdict == "equal" || self.verdict == "equal-probably" || self.verdict == "skipped"
    }

    fn skipped() -> Self {
        Verification {
            verdict: "skipped".into(),
            method: VerifyMethod::None,
            witness: None,
            downgraded: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub method: VerifyMethod,
    pub table_budget: usize,
    pub pit: PitConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            method: VerifyMethod::Auto,
            table_budget: DEFAULT_TABLE_BUDGET,
            pit: PitConfig::default(),
        }
    }
}

fn via_pit(f: &Formula, g: &Formula, cfg: &PitConfig, downgraded: bool) -> Result<Verification> {
    Ok(match pit_equal(f, g, cfg)? {
        PitVerdict::EqualProbably { .. } => Verification {
            verdict: "equal-probably".into(),
            method: VerifyMethod::Pit,
            witness: None,
            downgraded,
        },
        PitVerdict::Unequal(w) => Verification {
            verdict: "unequal".into(),
            method: VerifyMethod::Pit,
            witness: Some(w),
            downgraded,
        },
    })
}

/// Check `f` and `g` for equality with the configured method.
pub fn verify_equal(f: &Formula, g: &Formula, opts: &VerifyOptions) -> Result<Verification> {
    let exact = |f: &Formula, g: &Formula| -> Result<Verification> {
        let eq = equal_expand(f, g, opts.table_budget)?;
        Ok(Verification {
            verdict: if eq { "equal" } else { "unequal" }.into(),
            method: VerifyMethod::Expand,
            witness: None,
            downgraded: false,
        })
    };
    match opts.method {
        VerifyMethod::None => Ok(Verification::skipped()),
        VerifyMethod::Expand => exact(f, g),
        VerifyMethod::Pit => via_pit(f, g, &opts.pit, false),
        VerifyMethod::Auto => match exact(f, g) {
            Err(Error::BudgetExceeded { .. }) => via_pit(f, g, &opts.pit, true),
            other => other,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse;

    #[test]
    fn commutative_sum_order_is_irrelevant() {
        let a = parse("(+ x1 x2)").unwrap();
        let b = parse("(+ x2 x1)").unwrap();
        assert!(equal_expand(&a, &b, 10).unwrap());
    }

    #[test]
    fn noncommutative_product_order_matters() {
        let a = parse("mode: noncommutative\n(* x1 x2)").unwrap();
        let b = parse("mode: noncommutative\n(* x2 x1)").unwrap();
        assert!(!equal_expand(&a, &b, 10).unwrap());
        let c = parse("(* x1 x2)").unwrap();
        assert_eq!(equal_expand(&a, &c, 10), Err(Error::ModeMismatch));
    }

    #[test]
    fn leaf_counts_are_one() {
        let f = parse("(+ (* x1 x2) (* x3 (+ x4 x5)))").unwrap();
        let counts = gate_monomial_counts(&f, 100).unwrap();
        let flat = f.flat();
        for (g, c) in counts {
            if flat.nodes[g.0].node.is_leaf() {
                assert_eq!(c, 1);
            }
        }
    }

    #[test]
    fn auto_downgrades_to_pit_over_budget() {
        let a = parse("(* (+ x1 x2 x3) (+ x4 x5 x6))").unwrap();
        let opts = VerifyOptions { table_budget: 4, ..VerifyOptions::default() };
        let v = verify_equal(&a, &a, &opts).unwrap();
        assert_eq!(v.method, VerifyMethod::Pit);
        assert!(v.downgraded && v.passed());
        let strict = VerifyOptions { method: VerifyMethod::Expand, ..opts };
        assert!(matches!(verify_equal(&a, &a, &strict), Err(Error::BudgetExceeded { .. })));
    }
}
