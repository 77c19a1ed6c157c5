use deltasigma::experiment::{PointContext, SweepConfig};
use deltasigma::kernels::{build_kernel_table, KernelParams, KernelTable};
use deltasigma::reconstruction::{
    linf_error, reconstruct_baseline, reconstruct_decimated, time_grid, write_trace_csv,
    ReconstructionPlan,
};
use deltasigma::sigma_delta::run_first_order;
use deltasigma::signal::random_signal;
use deltasigma::{DecimatedStream, DecimationParams, Error, SampleGrid};

fn baseline_kernel(lambda: f64, deriv: u32) -> KernelTable {
    build_kernel_table(&KernelParams::baseline(lambda, deriv).unwrap()).unwrap()
}

/// Sample grid wide enough for full kernel support on `[0, len]`.
fn covering(lambda: f64, k: &KernelTable, len: f64) -> SampleGrid {
    let pad = k.support_radius + 2.0;
    SampleGrid::covering(lambda, -pad, len + pad).unwrap()
}

#[test]
fn exact_samples_reconstruct_exactly() {
    let lambda = 16.0;
    let k = baseline_kernel(lambda, 1);
    let grid = covering(lambda, &k, 16.0);
    let t = time_grid(0.0, 16.0, 16);
    for seed in 0..3 {
        let sig = random_signal(seed, 8, 0.9, (0.0, 16.0)).unwrap();
        let x = sig.sample(&grid).unwrap();
        let rec = reconstruct_baseline(&x, grid.n_start, lambda, &k, &t).unwrap();
        let e = linf_error(&rec.values, &sig, &t, (0.0, 16.0)).unwrap();
        assert!(e <= 1e-6, "seed {seed}: {e}");
    }
}

#[test]
fn first_order_baseline_error_scales_like_one_over_lambda() {
    let mut scaled = Vec::new();
    for lambda in [32.0, 64.0, 128.0, 256.0] {
        let k = baseline_kernel(lambda, 1);
        let grid = covering(lambda, &k, 16.0);
        let t = time_grid(0.0, 16.0, 16);
        let sig = random_signal(7, 8, 0.9, (0.0, 16.0)).unwrap();
        let run = run_first_order(&sig.sample(&grid).unwrap(), 0.0).unwrap();
        let x: Vec<f64> = run.bits.iter().map(|&b| f64::from(b)).collect();
        let rec = reconstruct_baseline(&x, grid.n_start, lambda, &k, &t).unwrap();
        let e = linf_error(&rec.values, &sig, &t, (0.0, 16.0)).unwrap();
        // hard bound (1/lambda) ||g'||_L1 sup|u|
        assert!(e <= k.deriv_l1 * run.u_sup / lambda + rec.truncation_residual);
        scaled.push(e * lambda);
    }
    let max = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let min = scaled.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min < 4.0, "lambda * error = {scaled:?}");
}

#[test]
fn decimated_error_respects_the_bound() {
    let cfg = SweepConfig {
        baseline: false,
        window: 16.0,
        ..SweepConfig::default()
    };
    let ctx = PointContext::new(&cfg, DecimationParams::new(3, 1, 56.0).unwrap()).unwrap();
    for seed in 0..3 {
        let o = ctx.run_seed(seed).unwrap();
        assert!(o.linf_error <= o.bound_rhs + o.truncation_residual, "{o:?}");
        assert!(o.u_sup <= 1.0);
    }
}

#[test]
fn zero_stream_gives_zero() {
    let params = DecimationParams::new(3, 2, 56.0).unwrap();
    let k = build_kernel_table(&KernelParams::decimated(56.0, params.lambda_prime(), 2).unwrap())
        .unwrap();
    // a zero block sum is not a valid codeword, so drive the plan directly
    let plan = ReconstructionPlan::decimated(&k, &params).unwrap();
    let coeffs = vec![0.0; 2000];
    let rec = plan
        .reconstruct(&coeffs, -1000, &time_grid(0.0, 4.0, 8))
        .unwrap();
    assert!(rec.values.iter().all(|&v| v == 0.0));
}

#[test]
fn reconstruction_is_linear() {
    let lambda = 16.0;
    let k = baseline_kernel(lambda, 0);
    let grid = covering(lambda, &k, 4.0);
    let t = time_grid(0.0, 4.0, 8);
    let a = random_signal(1, 4, 0.5, (0.0, 4.0))
        .unwrap()
        .sample(&grid)
        .unwrap();
    let b = random_signal(2, 4, 0.5, (0.0, 4.0))
        .unwrap()
        .sample(&grid)
        .unwrap();
    let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
    let ra = reconstruct_baseline(&a, grid.n_start, lambda, &k, &t)
        .unwrap()
        .values;
    let rb = reconstruct_baseline(&b, grid.n_start, lambda, &k, &t)
        .unwrap()
        .values;
    let rm = reconstruct_baseline(&mix, grid.n_start, lambda, &k, &t)
        .unwrap()
        .values;
    for i in 0..t.len() {
        assert!((rm[i] - (2.0 * ra[i] - 0.5 * rb[i])).abs() < 1e-12);
    }
}

#[test]
fn guard_violations_are_errors_and_truncation_hurts() {
    let lambda = 16.0;
    let k = baseline_kernel(lambda, 0);
    let half = k.support_radius + 10.0;
    let grid = SampleGrid::covering(lambda, -half, half).unwrap();
    let sig = random_signal(3, 8, 0.9, (-half, half)).unwrap();
    let x = sig.sample(&grid).unwrap();

    let plan = ReconstructionPlan::baseline(&k, lambda).unwrap();
    let (lo, hi) = plan.supported_interval(grid.n_start, x.len());
    assert!(lo < hi, "test window too short for the kernel");

    let edge = time_grid(hi, hi + 1.0, 16);
    assert!(matches!(
        plan.reconstruct(&x, grid.n_start, &edge),
        Err(Error::GuardViolation { .. })
    ));

    let truncated = plan.clone().allow_truncation();
    let inside = time_grid(lo, lo + 1.0, 16);
    let outside = time_grid(half - 1.0, half, 16);
    let e_in = linf_error(
        &truncated
            .reconstruct(&x, grid.n_start, &inside)
            .unwrap()
            .values,
        &sig,
        &inside,
        (lo, lo + 1.0),
    )
    .unwrap();
    let e_out = linf_error(
        &truncated
            .reconstruct(&x, grid.n_start, &outside)
            .unwrap()
            .values,
        &sig,
        &outside,
        (half - 1.0, half),
    )
    .unwrap();
    assert!(e_in < e_out, "guarded {e_in} vs unguarded {e_out}");
}

#[test]
fn mismatched_kernel_is_rejected() {
    let k = build_kernel_table(&KernelParams::decimated(56.0, 8.0, 1).unwrap()).unwrap();
    let stream = DecimatedStream {
        values: vec![1; 10],
        params: DecimationParams::new(2, 1, 56.0).unwrap(),
        index_offset: 0,
    };
    assert!(matches!(
        reconstruct_decimated(&stream, &k, &[0.0]),
        Err(Error::ParamMismatch(_))
    ));
    assert!(matches!(
        ReconstructionPlan::baseline(&k, 56.0),
        Err(Error::ParamMismatch(_))
    ));
}

#[test]
fn trace_csv_has_error_column() {
    let dir = tempfile::tempdir().unwrap();
    let sig = random_signal(0, 2, 0.5, (0.0, 1.0)).unwrap();
    let t = time_grid(0.0, 1.0, 4);
    let vals: Vec<f64> = t.iter().map(|&x| sig.evaluate(x)).collect();
    let p = dir.path().join("trace.csv");
    write_trace_csv(&p, &t, &vals, Some(&sig)).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("t,f,recon,abs_error\n"));
    assert_eq!(text.lines().count(), 5);
}
