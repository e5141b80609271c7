//! Algebraic formulas over exact fields, structural metrics, depth-reduction
//! passes, exact and randomized equivalence checks, and the hard-polynomial
//! family used to show the reductions are tight.

pub mod error;
pub mod hardpoly;
pub mod ir;
pub mod metrics;
pub mod pit;
pub mod poly;
pub mod predicates;
pub mod report;
pub mod scalar;
pub mod stack;
pub mod text;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use ir::{Edge, FlatFormula, Formula, GateId, GateKind, Mode, Node, Var};
pub use metrics::{gate_metrics, metrics, GateMetrics, Potential};
pub use poly::{expand, Monomial, PolyTable, DEFAULT_PARSE_TREE_BUDGET, DEFAULT_TABLE_BUDGET};
pub use report::Report;
pub use scalar::{Field, Scalar, MERSENNE_61};
pub use text::{parse, serialize};
pub use transforms::{Delta, Epsilon, PassSpec, ReductionParams};
pub use verify::{Verification, VerifyMethod, VerifyOptions};
