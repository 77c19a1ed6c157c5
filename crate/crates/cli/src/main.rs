use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use deltasigma::decimation::codec::{decode, encode};
use deltasigma::decimation::{decimate, rate};
use deltasigma::experiment::{emit, fit_decay, run_sweep, Field, PointStatus};
use deltasigma::kernels::{build_kernel_table, lemma_constants_check, KernelParams};
use deltasigma::reconstruction::{linf_error, reconstruct_decimated, time_grid, write_trace_csv};
use deltasigma::sigma_delta::{run_first_order, run_rth_order, QuantizerConfig};
use deltasigma::signal::random_signal;
use deltasigma::{
    BandlimitedSignal, DecimatedStream, DecimationParams, PackedBitstream, SampleGrid,
    SigmaDeltaRun, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "deltasigma",
    version,
    about = "Sigma-Delta quantization with decimation"
)]
struct Cli {
    /// Seed for randomly generated test signals.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for outputs that are not given an explicit path.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a signal and run a Sigma-Delta quantizer.
    Quantize(QuantizeArgs),
    /// Block-sum and downsample a bit stream.
    Decimate(DecimateArgs),
    /// Pack a decimated stream into an SDDC file.
    Encode(EncodeArgs),
    /// Unpack an SDDC file into a decimated stream.
    Decode(DecodeArgs),
    /// Reconstruct a signal from a decimated stream.
    Reconstruct(ReconstructArgs),
    /// Run a rate-distortion sweep.
    Sweep(SweepArgs),
    /// Check the kernel-ratio constants numerically.
    VerifyLemma(LemmaArgs),
}

#[derive(Args)]
struct QuantizeArgs {
    /// Signal JSON; a random one is drawn from --seed when omitted.
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Sampled time interval (Nyquist units).
    #[arg(long, default_value_t = -160.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, default_value_t = 192.0, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, default_value_t = 8)]
    atoms: usize,
    #[arg(long, default_value_t = 0.9)]
    amplitude: f64,
    /// Random atoms are centred in [0, span].
    #[arg(long, default_value_t = 32.0)]
    span: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecimateArgs {
    /// Bits JSON written by `quantize`.
    #[arg(long)]
    bits: PathBuf,
    #[arg(long)]
    rho: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Decimated stream JSON.
    #[arg(long)]
    stream: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Original sample index of the first value (not stored in the file).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    index_offset: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Decimated stream JSON.
    #[arg(long)]
    stream: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, default_value_t = 32.0, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, default_value_t = 16)]
    points_per_unit: usize,
    /// Reference signal; adds the true values and the error to the trace.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Also write the kernel table (CSV plus JSON sidecar).
    #[arg(long)]
    kernel_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Oversampling ratios, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Block half-widths; ignored with --lambda-prime-target.
    #[arg(long, value_delimiter = ',')]
    rhos: Option<Vec<u32>>,
    /// Quantizer orders.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    /// Pick rho per lambda to hold the decimated rate near this value.
    #[arg(long)]
    lambda_prime_target: Option<f64>,
    /// Signals per point; the error is the max over them.
    #[arg(long)]
    seeds: Option<usize>,
    /// Coefficient budget sum |a_k| of the test signals.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Length of the evaluation interval.
    #[arg(long)]
    window: Option<f64>,
    /// Evaluation density.
    #[arg(long)]
    points_per_unit: Option<usize>,
    /// Skip the undecimated reference reconstruction.
    #[arg(long)]
    no_baseline: bool,
}

#[derive(Args)]
struct LemmaArgs {
    /// Oversampling ratio.
    #[arg(long)]
    lambda: f64,
    /// Decimated rates to check, comma separated.
    #[arg(long = "lambda-prime", value_delimiter = ',', required = true)]
    lambda_primes: Vec<f64>,
    /// Frequency grid size.
    #[arg(long, default_value_t = 20_000)]
    points: usize,
}

/// Output of `quantize`: the bits plus where they sit on the sample grid.
#[derive(Serialize, Deserialize)]
struct BitsFile {
    lambda: f64,
    order: usize,
    n_start: i64,
    run: SigmaDeltaRun,
}

fn out_path(cli_out: &Option<PathBuf>, out_dir: &Path, default: &str) -> Result<PathBuf> {
    if let Some(p) = cli_out {
        return Ok(p.clone());
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    Ok(out_dir.join(default))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn quantize(cli: &Cli, a: &QuantizeArgs) -> Result<()> {
    let sig = match &a.signal {
        Some(p) => BandlimitedSignal::read(p)?,
        None => {
            let sig = random_signal(cli.seed, a.atoms, a.amplitude, (0.0, a.span))?;
            let p = out_path(&None, &cli.out_dir, "signal.json")?;
            sig.write(&p)?;
            eprintln!("signal -> {}", p.display());
            sig
        }
    };
    let grid = SampleGrid::covering(a.lambda, a.t0, a.t1)?;
    let samples = sig.sample(&grid)?;
    let run = if a.order == 1 {
        run_first_order(&samples, 0.0)?
    } else {
        run_rth_order(&samples, &QuantizerConfig::greedy(a.order).without_states())?
    }
    .tagged(a.lambda);
    println!(
        "{} bits, sup|u| = {} at n = {}",
        run.len(),
        run.u_sup,
        grid.n_start + run.argmax_index as i64
    );
    let p = out_path(&a.out, &cli.out_dir, "bits.json")?;
    write_json(
        &p,
        &BitsFile {
            lambda: a.lambda,
            order: a.order,
            n_start: grid.n_start,
            run,
        },
    )?;
    eprintln!("bits -> {}", p.display());
    Ok(())
}

fn decimate_cmd(cli: &Cli, a: &DecimateArgs) -> Result<()> {
    let bits: BitsFile = read_json(&a.bits)?;
    let params = DecimationParams::new(a.rho, bits.order as u32, bits.lambda)?;
    let stream = decimate(&bits.run.bits, bits.n_start, &params)?;
    let rt = rate(&params);
    println!(
        "{} values, lambda' = {}, rate {} bits/Nyquist (practical {})",
        stream.len(),
        params.lambda_prime(),
        rt.exact_bits_per_nyquist,
        rt.practical_bits_per_nyquist
    );
    let p = out_path(&a.out, &cli.out_dir, "decimated.json")?;
    write_json(&p, &stream)?;
    eprintln!("stream -> {}", p.display());
    Ok(())
}

fn encode_cmd(cli: &Cli, a: &EncodeArgs) -> Result<()> {
    let stream: DecimatedStream = read_json(&a.stream)?;
    let bs = encode(&stream)?;
    let p = out_path(&a.out, &cli.out_dir, "stream.sddc")?;
    bs.write(&p)?;
    println!(
        "{} codewords, {} payload bytes, index offset {} (not stored)",
        bs.header.count,
        bs.payload.len(),
        stream.index_offset
    );
    eprintln!("sddc -> {}", p.display());
    Ok(())
}

fn decode_cmd(cli: &Cli, a: &DecodeArgs) -> Result<()> {
    let bs = PackedBitstream::read(&a.input)?;
    let stream = decode(&bs)?.with_index_offset(a.index_offset);
    stream.validate()?;
    let p = out_path(&a.out, &cli.out_dir, "decoded.json")?;
    write_json(&p, &stream)?;
    println!("{} values", stream.len());
    eprintln!("stream -> {}", p.display());
    Ok(())
}

fn reconstruct_cmd(cli: &Cli, a: &ReconstructArgs) -> Result<()> {
    let stream: DecimatedStream = read_json(&a.stream)?;
    let p = stream.params;
    let kernel = build_kernel_table(&KernelParams::decimated(
        p.lambda,
        p.lambda_prime(),
        p.order,
    )?)?;
    if let Some(k) = &a.kernel_out {
        kernel.write_csv(k)?;
    }
    let t = time_grid(a.t0, a.t1, a.points_per_unit);
    let recon = reconstruct_decimated(&stream, &kernel, &t)
        .context("evaluation interval exceeds the stream's supported range")?;
    let sig = a
        .signal
        .as_deref()
        .map(BandlimitedSignal::read)
        .transpose()?;
    if let Some(sig) = &sig {
        let err = linf_error(&recon.values, sig, &t, (a.t0, a.t1))?;
        let bound = kernel.deriv_l1 / p.lambda.powi(p.order as i32);
        println!("linf error {err:.6e}; lambda^-r ||g~^(r)||_L1 = {bound:.6e} (times sup|u|)");
    }
    println!("truncation residual {:.3e}", recon.truncation_residual);
    let out = out_path(&a.out, &cli.out_dir, "reconstruction.csv")?;
    write_trace_csv(&out, &t, &recon.values, sig.as_ref())?;
    eprintln!("trace -> {}", out.display());
    Ok(())
}

fn sweep_cmd(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => SweepConfig::read(p)?,
        None => SweepConfig::default(),
    };
    if let Some(v) = &a.lambdas {
        cfg.lambdas = v.clone();
    }
    if let Some(v) = &a.rhos {
        cfg.rhos = v.clone();
    }
    if let Some(v) = &a.orders {
        cfg.orders = v.clone();
    }
    if a.lambda_prime_target.is_some() {
        cfg.lambda_prime_target = a.lambda_prime_target;
    }
    if let Some(v) = a.seeds {
        cfg.n_seeds = v;
    }
    if let Some(v) = a.amplitude {
        cfg.amplitude = v;
    }
    if let Some(v) = a.window {
        cfg.window = v;
    }
    if let Some(v) = a.points_per_unit {
        cfg.points_per_unit = v;
    }
    if a.no_baseline {
        cfg.baseline = false;
    }
    cfg.base_seed = cli.seed;
    cfg.out_dir = cli.out_dir.clone();

    let out = run_sweep(&cfg)?;
    for r in &out.records {
        match &r.status {
            PointStatus::Ok => println!(
                "lambda {:>7} rho {:>4} r {} : R = {:.3} bits, error {:.3e} <= {:.3e}",
                r.lambda, r.rho, r.r, r.rate_exact, r.linf_error, r.bound_rhs
            ),
            other => println!(
                "lambda {:>7} rho {:>4} r {} : {other:?}",
                r.lambda, r.rho, r.r
            ),
        }
    }
    let mut orders: Vec<u32> = out.records.iter().map(|r| r.r).collect();
    orders.dedup();
    for r in orders {
        let group: Vec<_> = out.records.iter().filter(|x| x.r == r).cloned().collect();
        if let Ok(fit) = fit_decay(&group, Field::Lambda, Field::LinfError) {
            println!(
                "r = {r}: error ~ lambda^{:.3} (R^2 = {:.3})",
                fit.slope, fit.r_squared
            );
        }
    }
    for p in emit(&out, &cfg.out_dir)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn verify_lemma(a: &LemmaArgs) -> Result<bool> {
    let mut ok = true;
    for &lp in &a.lambda_primes {
        let c = lemma_constants_check(a.lambda, lp, a.points)?;
        let v = c.violations();
        println!("{}", serde_json::to_string(&c)?);
        for msg in &v {
            println!("  VIOLATION: {msg}");
        }
        ok &= v.is_empty();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Quantize(a) => quantize(&cli, a),
        Command::Decimate(a) => decimate_cmd(&cli, a),
        Command::Encode(a) => encode_cmd(&cli, a),
        Command::Decode(a) => decode_cmd(&cli, a),
        Command::Reconstruct(a) => reconstruct_cmd(&cli, a),
        Command::Sweep(a) => sweep_cmd(&cli, a),
        Command::VerifyLemma(a) => match verify_lemma(a) {
            Ok(true) => Ok(()),
            Ok(false) => Err(anyhow::anyhow!("lemma constants violated")),
            Err(e) => Err(e),
        },
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
