use formdepth_bench::{fit_constants, run, run_batch, write_csv, Experiment, Family};
use formdepth_core::{Delta, Epsilon, Mode, PassSpec};

fn csv_bytes(e: &Experiment) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&run(e), &mut buf, false).unwrap();
    buf
}

#[test]
fn canonical_instance_main_row() {
    let rows = run(&Experiment::new(Family::Hard { k: 2, r: 2 }, PassSpec::Main(Delta::Auto), 0));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert!(row.ok() && row.verified, "{:?}", row.error);
    assert_eq!((row.s_in, row.d), (16, 4));
    assert!(row.product_depth_out <= row.phi_delta.unwrap());
}

#[test]
fn comb_balancing_reduces_depth() {
    let rows = run(&Experiment::new(Family::Comb { leaves: 64 }, PassSpec::Bb(Epsilon::ONE), 0));
    let row = &rows[0];
    assert!(row.ok() && row.verified, "{:?}", row.error);
    assert_eq!(row.depth_in, 63);
    assert!(row.depth_out < 63, "depth {}", row.depth_out);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let mut e = Experiment::new(
        Family::RandomHomogeneous { n_vars: 8, degree: 4, size: 80 },
        PassSpec::Homogeneous,
        3,
    );
    e.repetitions = 10;
    let first = csv_bytes(&e);
    for _ in 0..2 {
        assert_eq!(csv_bytes(&e), first);
    }
    e.mode = Mode::NonCommutative;
    assert_eq!(csv_bytes(&e), csv_bytes(&e));
}

#[test]
fn symmetric_polynomial_pipeline_is_verified() {
    let rows = run(&Experiment::new(Family::ElementarySymmetric { n: 4, d: 2 }, PassSpec::Pipeline, 0));
    assert!(rows[0].ok() && rows[0].verified, "{:?}", rows[0].error);
}

#[test]
fn batch_rows_are_indexed_in_order() {
    let mut a = Experiment::new(Family::RandomSkew { size: 20, max_sum_depth: 3 }, PassSpec::Prodfanin2, 5);
    a.repetitions = 3;
    let b = Experiment::new(Family::Hard { k: 1, r: 3 }, PassSpec::Nearlinear(Epsilon::HALF), 0);
    let rows = run_batch(&[a, b]);
    assert_eq!(rows.iter().map(|r| r.index).collect::<Vec<_>>(), [0, 1, 2, 3]);
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [5, 6, 7, 0]);
    assert!(rows.iter().all(|r| r.ok() && r.verified));
    assert!(rows[..3].iter().all(|r| r.bound_depth.is_some()));
}

#[test]
fn constants_from_main_rows() {
    let mut e = Experiment::new(
        Family::RandomHomogeneous { n_vars: 6, degree: 4, size: 60 },
        PassSpec::Main(Delta::Auto),
        0,
    );
    e.repetitions = 8;
    let rows = run(&e);
    let fit = fit_constants(&rows, 1.5);
    assert_eq!((fit.rows, fit.failed), (8, 0));
    let deepest = rows.iter().map(|r| r.depth_out).max().unwrap();
    assert_eq!(fit.c_depth.unwrap(), f64::from(deepest) / 2.0);
    let widest = rows
        .iter()
        .map(|r| r.size_out as f64 / r.bound_size.as_ref().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((fit.c_size.unwrap() - widest).abs() < 1e-12);
    assert!(widest <= 1.0);
}
