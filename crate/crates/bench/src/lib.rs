//! Experiment harness: formula families, seeded corpora, frontier tables
//! and fitted constants.

pub mod corpus;
pub mod experiment;
pub mod families;
pub mod fit;

pub use experiment::{run, run_batch, write_csv, Experiment, Family, FrontierRow};
pub use fit::{fit_constants, FittedConstants};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] formdepth_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
