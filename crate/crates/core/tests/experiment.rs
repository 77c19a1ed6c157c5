use deltasigma::experiment::{
    emit, fit_decay, run_sweep, write_csv, Field, PointStatus, CSV_HEADER,
};
use deltasigma::{Error, SweepConfig};

fn small(lambdas: Vec<f64>) -> SweepConfig {
    SweepConfig {
        lambdas,
        rhos: vec![3],
        orders: vec![1],
        n_seeds: 2,
        window: 8.0,
        baseline: false,
        ..SweepConfig::default()
    }
}

#[test]
fn single_point_record_is_complete() {
    let out = run_sweep(&small(vec![28.0])).unwrap();
    assert_eq!(out.records.len(), 1);
    let r = &out.records[0];
    assert_eq!(r.status, PointStatus::Ok);
    assert_eq!(r.seeds.len(), 2);
    for v in [
        r.lambda_prime,
        r.rate_exact,
        r.rate_practical,
        r.linf_error,
        r.u_sup,
        r.bound_rhs,
        r.theorem_bound,
        r.truncation_residual,
    ] {
        assert!(v.is_finite(), "{r:?}");
    }
    assert!(r.linf_error <= r.bound_rhs + r.truncation_residual);
    assert_eq!(r.lambda_prime, 4.0);
}

#[test]
fn csv_layout_and_determinism() {
    let cfg = small(vec![28.0, 56.0, 112.0, 224.0]);
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_csv(&run_sweep(&cfg).unwrap().records, &a).unwrap();
    write_csv(&run_sweep(&cfg).unwrap().records, &b).unwrap();
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,rho,r,lambda_prime,rate_exact,rate_practical,linf_error,u_sup,bound_rhs,theorem_bound,truncation_residual"
    );
    assert_eq!(CSV_HEADER.join(","), text.lines().next().unwrap());
    assert_eq!(lines.count(), 4);
}

#[test]
fn emit_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep(&small(vec![28.0, 56.0])).unwrap();
    let files = emit(&out, dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    for f in &files {
        assert!(f.exists());
    }
    let meta = std::fs::read_to_string(dir.path().join("metadata.json")).unwrap();
    assert!(meta.contains("empirical"));
    let svg = std::fs::read_to_string(dir.path().join("error_vs_lambda.svg")).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn empty_records_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        write_csv(&[], &dir.path().join("x.csv")),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn instability_is_a_recorded_outcome() {
    let cfg = SweepConfig {
        orders: vec![3],
        blowup_threshold: 2.0,
        ..small(vec![28.0, 56.0])
    };
    let out = run_sweep(&cfg).unwrap();
    assert!(out
        .records
        .iter()
        .all(|r| matches!(r.status, PointStatus::Instability(_))));
    assert!(out.records[0].linf_error.is_nan());
    // still emitted, and excluded from fits
    let dir = tempfile::tempdir().unwrap();
    emit(&out, dir.path()).unwrap();
    assert!(fit_decay(&out.records, Field::Lambda, Field::LinfError).is_err());
}

#[test]
fn invalid_grids_are_rejected_up_front() {
    // rho = 1 is outside the admissible range
    let cfg = SweepConfig {
        rhos: vec![1],
        ..small(vec![28.0])
    };
    assert!(run_sweep(&cfg).is_err());
    // lambda' below the sweep floor
    let cfg = SweepConfig {
        lambda_prime_target: Some(1.2),
        ..small(vec![28.0])
    };
    assert!(run_sweep(&cfg).is_err());
}

#[test]
fn toml_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sweep.toml");
    std::fs::write(
        &p,
        "lambdas = [50.0, 100.0]\nlambda_prime_target = 2.0\norders = [1]\nn_seeds = 3\n",
    )
    .unwrap();
    let cfg = SweepConfig::read(&p).unwrap();
    let pts = cfg.points().unwrap();
    assert_eq!(pts.len(), 2);
    assert_eq!((pts[0].rho, pts[1].rho), (12, 25));
    assert_eq!(cfg.n_seeds, 3);
    assert_eq!(cfg.window, SweepConfig::default().window);
}

#[test]
fn rate_fit_uses_log2_error() {
    let out = run_sweep(&small(vec![28.0, 56.0, 112.0])).unwrap();
    let fit = fit_decay(&out.records, Field::RateExact, Field::LinfError).unwrap();
    let ln_fit = fit_decay(&out.records, Field::Lambda, Field::LinfError).unwrap();
    assert!(fit.slope < 0.0 && ln_fit.slope < 0.0);
}
