//! Uniform driver: run a named pass, check its output and fill a report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ir::Formula;
use crate::metrics::{metrics, Potential};
use crate::report::Report;
use crate::transforms::{
    binarize, collapse, depth_reduce_bb, depth_reduce_homogeneous, depth_reduce_main,
    depth_reduce_nearlinear, main_size_bound, nearlinear_delta, nearlinear_uses_bb_only, pipeline_inhom,
    product_fanin_2, Delta, Epsilon,
};
use crate::verify::{verify_equal, VerifyOptions};

/// A pass together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PassSpec {
    Bb(Epsilon),
    Main(Delta),
    Nearlinear(Epsilon),
    Homogeneous,
    Prodfanin2,
    Pipeline,
    Binarize,
    Collapse,
}

impl PassSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PassSpec::Bb(_) => "bb",
            PassSpec::Main(_) => "main",
            PassSpec::Nearlinear(_) => "nearlinear",
            PassSpec::Homogeneous => "homogeneous",
            PassSpec::Prodfanin2 => "prodfanin2",
            PassSpec::Pipeline => "pipeline",
            PassSpec::Binarize => "binarize",
            PassSpec::Collapse => "collapse",
        }
    }

    /// Build from a method name and the optional `--delta` / `--epsilon` values.
    pub fn from_method(method: &str, delta: Delta, epsilon: Epsilon) -> Result<Self> {
        Ok(match method {
            "bb" => PassSpec::Bb(epsilon),
            "main" => PassSpec::Main(delta),
            "nearlinear" => PassSpec::Nearlinear(epsilon),
            "homogeneous" => PassSpec::Homogeneous,
            "prodfanin2" => PassSpec::Prodfanin2,
            "pipeline" => PassSpec::Pipeline,
            "binarize" => PassSpec::Binarize,
            "collapse" => PassSpec::Collapse,
            _ => return Err(Error::InvalidParams(format!("unknown pass `{method}`"))),
        })
    }

    /// Whether the pass keeps homogeneity and syntactic monotonicity.
    pub fn preserves_shape(&self) -> bool {
        !matches!(self, PassSpec::Pipeline)
    }
}

impl fmt::Display for PassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PassSpec::Bb(e) | PassSpec::Nearlinear(e) => write!(f, "{}:{e}", self.name()),
            PassSpec::Main(Delta::Auto) => write!(f, "main:auto"),
            PassSpec::Main(Delta::Fixed(d)) => write!(f, "main:{d}"),
            _ => f.write_str(self.name()),
        }
    }
}

/// `name` or `name:param`, e.g. `bb:1/2`, `main:3`, `main:auto`.
impl FromStr for PassSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let delta = param.filter(|_| name == "main").map_or(Ok(Delta::Auto), str::parse)?;
        let eps = param.filter(|_| name != "main").map_or(Ok(Epsilon::HALF), str::parse)?;
        if param.is_some() && !matches!(name, "main" | "bb" | "nearlinear") {
            return Err(Error::InvalidParams(format!("pass `{name}` takes no parameter")));
        }
        PassSpec::from_method(name, delta, eps)
    }
}

/// Output of [`run_pass`].
#[derive(Clone, Debug)]
pub struct PassRun {
    pub output: Formula,
    pub report: Report,
}

/// Apply `pass` to `f`, recording parameters and metrics. The main reduction
/// binarizes its input first. When `verify` is given the output is checked
/// against the input and an unequal verdict is reported, not raised.
pub fn run_pass(f: &Formula, pass: PassSpec, table_budget: usize, verify: Option<&VerifyOptions>) -> Result<PassRun> {
    let input = metrics(f);
    let mut report = Report::new(pass.to_string(), input);
    let start = Instant::now();
    let output = match pass {
        PassSpec::Bb(eps) => {
            report.epsilon = Some(eps.to_string());
            report.k_bb = Some(eps.k_bb());
            depth_reduce_bb(f, eps)
        }
        PassSpec::Main(delta) => {
            let g = binarize(f);
            let m = metrics(&g);
            let delta = delta.resolve(m.size, m.syn_degree);
            let potential = Potential::new(m.syn_degree, m.sum_depth, delta);
            report.delta = Some(delta);
            report.potential = Some(potential.phi);
            report.size_bound = Some(main_size_bound(m.size, m.syn_degree, delta).to_string());
            depth_reduce_main(&g, delta)?
        }
        PassSpec::Nearlinear(eps) => {
            report.epsilon = Some(eps.to_string());
            let (s, d) = (input.size, input.syn_degree);
            if d >= 2 && !nearlinear_uses_bb_only(s, d, eps) {
                report.delta = Some(nearlinear_delta(s, d, eps));
                report.k_bb = Some(eps.halved().k_bb());
            } else {
                report.k_bb = Some(eps.k_bb());
            }
            depth_reduce_nearlinear(f, eps)?
        }
        PassSpec::Homogeneous => {
            report.epsilon = Some(Epsilon::HALF.to_string());
            report.k_bb = Some(Epsilon::HALF.k_bb());
            depth_reduce_homogeneous(f)?
        }
        PassSpec::Pipeline => pipeline_inhom(f, table_budget)?,
        PassSpec::Prodfanin2 => product_fanin_2(f),
        PassSpec::Binarize => binarize(f),
        PassSpec::Collapse => collapse(f),
    };
    report.duration_us = start.elapsed().as_micros() as u64;
    report.output = Some(metrics(&output));
    if let Some(opts) = verify {
        report.verification = Some(verify_equal(f, &output, opts)?);
    }
    Ok(PassRun { output, report })
}
