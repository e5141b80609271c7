//! Constants the asymptotic statements leave implicit, fitted as maxima
//! over successful rows.

use num_traits::ToPrimitive;
use num_bigint::BigUint;
use serde::Serialize;

use crate::experiment::FrontierRow;

/// Largest `depth_out / log2 d` over rows with `d >= 2`.
pub fn fit_depth(rows: &[FrontierRow]) -> Option<f64> {
    rows.iter()
        .filter(|r| r.ok() && r.d >= 2)
        .map(|r| f64::from(r.depth_out) / (r.d as f64).log2())
        .reduce(f64::max)
}

/// Largest `size_out / bound_size` over rows carrying a size bound.
pub fn fit_size_to_bound(rows: &[FrontierRow]) -> Option<f64> {
    rows.iter()
        .filter(|r| r.ok())
        .filter_map(|r| {
            let bound: BigUint = r.bound_size.as_ref()?.parse().ok()?;
            Some(r.size_out as f64 / bound.to_f64()?)
        })
        .reduce(f64::max)
}

/// Largest `size_out / s_in^exponent`.
pub fn fit_size_power(rows: &[FrontierRow], exponent: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.ok() && r.s_in >= 1)
        .map(|r| r.size_out as f64 / (r.s_in as f64).powf(exponent))
        .reduce(f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FittedConstants {
    pub rows: usize,
    pub failed: usize,
    pub c_depth: Option<f64>,
    pub c_size: Option<f64>,
}

/// `c_depth` and `c_size`; the size constant is taken against the rows'
/// own bound when they carry one and against `s_in^size_exponent` otherwise.
pub fn fit_constants(rows: &[FrontierRow], size_exponent: f64) -> FittedConstants {
    let c_size = fit_size_to_bound(rows).or_else(|| fit_size_power(rows, size_exponent));
    FittedConstants {
        rows: rows.len(),
        failed: rows.iter().filter(|r| !r.ok()).count(),
        c_depth: fit_depth(rows),
        c_size,
    }
}
