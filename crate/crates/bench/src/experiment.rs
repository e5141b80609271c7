//! Experiments: a family, a pass and a seed, expanded into frontier rows.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use formdepth_core::hardpoly::{gen_hard, HardParams};
use formdepth_core::metrics::ceil_log2;
use formdepth_core::pit::PitConfig;
use formdepth_core::transforms::run_pass;
use formdepth_core::{
    metrics, parse, Error, Formula, Mode, PassSpec, Result, VerifyMethod, VerifyOptions, DEFAULT_TABLE_BUDGET,
};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::families::{comb, elementary_symmetric, gen_random_homogeneous, gen_random_skew};
use crate::BenchError;

/// Thread stack for experiment workers; the passes recurse along formula depth.
pub const WORKER_STACK: usize = 256 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Comb { leaves: u64 },
    RandomHomogeneous { n_vars: u64, degree: u64, size: u64 },
    RandomSkew { size: u64, max_sum_depth: u32 },
    Hard { k: u32, r: u32 },
    ElementarySymmetric { n: u64, d: u64 },
    File(PathBuf),
}

impl Family {
    /// The instance for `seed`; deterministic families ignore the seed.
    pub fn instantiate(&self, seed: u64, mode: Mode) -> Result<Formula> {
        match self {
            Family::Comb { leaves } => Ok(comb(*leaves, mode)),
            Family::RandomHomogeneous { n_vars, degree, size } => {
                gen_random_homogeneous(*n_vars, *degree, *size, seed, mode)
            }
            Family::RandomSkew { size, max_sum_depth } => Ok(gen_random_skew(*size, *max_sum_depth, seed, mode)),
            Family::Hard { k, r } => {
                let mut m = gen_hard(&HardParams::new(*k, *r)?)?;
                m.mode = mode;
                Ok(m)
            }
            Family::ElementarySymmetric { n, d } => elementary_symmetric(*n, *d, mode),
            Family::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
                parse(&text)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Comb { leaves } => write!(f, "comb:{leaves}"),
            Family::RandomHomogeneous { n_vars, degree, size } => write!(f, "random-homogeneous:{n_vars}:{degree}:{size}"),
            Family::RandomSkew { size, max_sum_depth } => write!(f, "random-skew:{size}:{max_sum_depth}"),
            Family::Hard { k, r } => write!(f, "hard:{k}:{r}"),
            Family::ElementarySymmetric { n, d } => write!(f, "elementary-symmetric:{n}:{d}"),
            Family::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Inverse of the `Display` form: `comb:64`, `random-homogeneous:8:4:50`,
/// `random-skew:30:8`, `hard:2:2`, `elementary-symmetric:4:2`, `file:PATH`.
impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        let bad = || BenchError::Usage(format!("cannot read family `{s}`"));
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Family::File(path.into()));
        }
        let mut parts = s.split(':');
        let name = parts.next().ok_or_else(bad)?;
        let nums: Vec<u64> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        let small = |n: u64| u32::try_from(n).map_err(|_| bad());
        Ok(match (name, nums.as_slice()) {
            ("comb", &[leaves]) if leaves >= 1 => Family::Comb { leaves },
            ("random-homogeneous", &[n_vars, degree, size]) => Family::RandomHomogeneous { n_vars, degree, size },
            ("random-skew", &[size, sd]) if size >= 1 => Family::RandomSkew { size, max_sum_depth: small(sd)? },
            ("hard", &[k, r]) => Family::Hard { k: small(k)?, r: small(r)? },
            ("elementary-symmetric", &[n, d]) => Family::ElementarySymmetric { n, d },
            _ => return Err(bad()),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub family: Family,
    pub pass: PassSpec,
    pub seed: u64,
    pub repetitions: usize,
    pub mode: Mode,
    pub verify: VerifyMethod,
    pub table_budget: usize,
    pub pit_trials: usize,
}

impl Experiment {
    pub fn new(family: Family, pass: PassSpec, seed: u64) -> Self {
        Experiment {
            family,
            pass,
            seed,
            repetitions: 1,
            mode: Mode::Commutative,
            verify: VerifyMethod::Auto,
            table_budget: DEFAULT_TABLE_BUDGET,
            pit_trials: 20,
        }
    }
}

/// One measured run. Column order is the CSV schema.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FrontierRow {
    pub index: usize,
    pub seed: u64,
    pub family: String,
    pub pass: String,
    pub s_in: u64,
    pub d: u64,
    pub depth_in: u32,
    pub depth_out: u32,
    pub product_depth_out: u32,
    pub size_out: u64,
    pub phi_delta: Option<u32>,
    pub bound_size: Option<String>,
    pub bound_depth: Option<u32>,
    pub verified: bool,
    pub duration_us: u64,
    pub error: Option<String>,
}

impl FrontierRow {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

fn measure(e: &Experiment, seed: u64, row: &mut FrontierRow) -> Result<()> {
    let f = e.family.instantiate(seed, e.mode)?;
    let m = metrics(&f);
    row.s_in = m.size;
    row.d = m.syn_degree;
    row.depth_in = m.depth;
    let opts = VerifyOptions {
        method: e.verify,
        table_budget: e.table_budget,
        pit: PitConfig { trials: e.pit_trials, seed, ..PitConfig::default() },
    };
    let run = run_pass(&f, e.pass, e.table_budget, Some(&opts))?;
    let out = run.report.output.expect("run_pass fills output metrics");
    row.depth_out = out.depth;
    row.product_depth_out = out.product_depth;
    row.size_out = out.size;
    row.duration_us = run.report.duration_us;
    row.phi_delta = run.report.potential;
    row.bound_size = run.report.size_bound.clone();
    let verification = run.report.verification.expect("verification requested");
    row.verified = verification.method != VerifyMethod::None && verification.passed();
    if !verification.passed() {
        return Err(Error::Invariant(format!("output is not equivalent ({})", verification.verdict)));
    }
    if let (Some(phi), Some(bound)) = (row.phi_delta, &row.bound_size) {
        let bound: BigUint = bound.parse().expect("bound is a decimal integer");
        if out.product_depth > phi || BigUint::from(out.size) > bound {
            return Err(Error::Invariant(format!(
                "bound violated: product depth {} vs {phi}, size {} vs {bound}",
                out.product_depth, out.size
            )));
        }
    }
    if e.pass == PassSpec::Prodfanin2 {
        let bound = 2 * (m.depth + ceil_log2(m.syn_degree)) + 2;
        row.bound_depth = Some(bound);
        if out.depth > bound || out.size > m.size {
            return Err(Error::Invariant(format!("bound violated: depth {} vs {bound}", out.depth)));
        }
    }
    Ok(())
}

fn run_row(e: &Experiment, index: usize, seed: u64) -> FrontierRow {
    let mut row = FrontierRow {
        index,
        seed,
        family: e.family.to_string(),
        pass: e.pass.to_string(),
        ..FrontierRow::default()
    };
    if let Err(err) = measure(e, seed, &mut row) {
        row.error = Some(err.to_string());
    }
    row
}

fn pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .stack_size(WORKER_STACK)
        .build()
        .expect("worker pool starts")
}

/// All repetitions of all experiments, rows indexed consecutively. Row `i`
/// of an experiment uses seed `seed + i`. Rows run concurrently; the result
/// is in index order. Failures are recorded in the row, never raised.
pub fn run_batch(experiments: &[Experiment]) -> Vec<FrontierRow> {
    let jobs: Vec<(usize, &Experiment, u64)> = experiments
        .iter()
        .flat_map(|e| (0..e.repetitions).map(move |i| (e, e.seed.wrapping_add(i as u64))))
        .enumerate()
        .map(|(index, (e, seed))| (index, e, seed))
        .collect();
    pool().install(|| jobs.par_iter().map(|&(index, e, seed)| run_row(e, index, seed)).collect())
}

pub fn run(e: &Experiment) -> Vec<FrontierRow> {
    run_batch(std::slice::from_ref(e))
}

/// CSV with a header row. Without `timing` durations are written as 0 so
/// reruns are byte-identical.
pub fn write_csv<W: Write>(rows: &[FrontierRow], out: W, timing: bool) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        if timing {
            w.serialize(row)?;
        } else {
            w.serialize(FrontierRow { duration_us: 0, ..row.clone() })?;
        }
    }
    w.flush()?;
    Ok(())
}
