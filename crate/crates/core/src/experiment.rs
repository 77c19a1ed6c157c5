//! Rate-distortion sweeps.
//!
//! Each sweep point `(lambda, rho, r)` runs, for several random signals,
//!
//! ```text
//! sample -> quantize -> decimate -> encode -> decode -> reconstruct -> measure
//! ```
//!
//! and records the worst interior error next to the bound
//! `lambda^{-r} ||g~^(r)||_{L1} u_sup` it must respect.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation::codec::{decode, encode};
use crate::decimation::{self, decimate, partial_sum, DecimationParams};
use crate::error::{Error, Result};
use crate::kernels::{build_kernel_table, KernelParams, KernelTable, DEFAULT_N_OMEGA};
use crate::reconstruction::{
    linf_error, reconstruct_baseline, reconstruct_decimated, time_grid, ReconstructionPlan,
};
use crate::sigma_delta::{run_first_order, run_rth_order, QuantizerConfig};
use crate::signal::{random_signal, BandlimitedSignal, SampleGrid};

pub const CSV_HEADER: [&str; 11] = [
    "lambda",
    "rho",
    "r",
    "lambda_prime",
    "rate_exact",
    "rate_practical",
    "linf_error",
    "u_sup",
    "bound_rhs",
    "theorem_bound",
    "truncation_residual",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    /// Block half-widths; ignored when `lambda_prime_target` is set.
    pub rhos: Vec<u32>,
    /// Pick `rho = round((lambda / target - 1) / 2)` for each lambda instead.
    pub lambda_prime_target: Option<f64>,
    pub orders: Vec<u32>,
    pub base_seed: u64,
    pub n_seeds: usize,
    pub n_atoms: usize,
    pub amplitude: f64,
    /// Length of the measured interior `[0, window]`, in Nyquist intervals.
    pub window: f64,
    /// Extra margin beyond the kernel support on each side.
    pub guard: f64,
    pub points_per_unit: usize,
    pub n_omega: usize,
    pub tail_tolerance: f64,
    /// Also reconstruct the raw bits with the plain low-pass kernel.
    pub baseline: bool,
    pub blowup_threshold: f64,
    pub min_lambda_prime: f64,
    pub out_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![28.0, 56.0, 112.0, 224.0],
            rhos: vec![3],
            lambda_prime_target: None,
            orders: vec![1],
            base_seed: 0,
            n_seeds: 5,
            n_atoms: 8,
            amplitude: 0.9,
            window: 64.0,
            guard: 8.0,
            points_per_unit: 16,
            n_omega: DEFAULT_N_OMEGA,
            tail_tolerance: crate::kernels::DEFAULT_TAIL_TOLERANCE,
            baseline: true,
            blowup_threshold: crate::sigma_delta::DEFAULT_BLOWUP_THRESHOLD,
            min_lambda_prime: 1.5,
            out_dir: PathBuf::from("sweep-out"),
        }
    }
}

/// `rho` whose `lambda'` is closest to `target` (ties round away from zero).
pub fn rho_for_target(lambda: f64, target: f64) -> u32 {
    ((lambda / target - 1.0) / 2.0).round().max(1.0) as u32
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.n_seeds as u64).map(move |i| self.base_seed + i)
    }

    /// Sweep points in output order.
    pub fn points(&self) -> Result<Vec<DecimationParams>> {
        let mut out = Vec::new();
        for &lambda in &self.lambdas {
            let rhos = match self.lambda_prime_target {
                Some(target) => vec![rho_for_target(lambda, target)],
                None => self.rhos.clone(),
            };
            for &rho in &rhos {
                for &r in &self.orders {
                    let p = DecimationParams::new(rho, r, lambda)?;
                    if !p.satisfies_bound_hypothesis() {
                        return Err(Error::InvalidParameter(format!(
                            "rho = {rho} outside (1, (lambda - 1)/2) for lambda = {lambda}"
                        )));
                    }
                    if p.lambda_prime() < self.min_lambda_prime {
                        return Err(Error::InvalidParameter(format!(
                            "lambda' = {} below the sweep floor {}",
                            p.lambda_prime(),
                            self.min_lambda_prime
                        )));
                    }
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.orders.is_empty() || self.n_seeds == 0 {
            return Err(Error::InvalidParameter(
                "need at least one lambda, order and seed".into(),
            ));
        }
        if self.lambda_prime_target.is_none() && self.rhos.is_empty() {
            return Err(Error::InvalidParameter(
                "need rhos or a lambda' target".into(),
            ));
        }
        if !(self.window > 0.0 && self.guard >= 0.0 && self.points_per_unit > 0) {
            return Err(Error::InvalidParameter("bad evaluation window".into()));
        }
        self.points().map(|_| ())
    }

    fn kernel_params(&self, mut p: KernelParams) -> KernelParams {
        p.n_omega = self.n_omega;
        p.tail_tolerance = self.tail_tolerance;
        p
    }
}

/// Everything shared by the seeds of one sweep point.
pub struct PointContext {
    pub params: DecimationParams,
    pub kernel: KernelTable,
    pub baseline_kernel: Option<KernelTable>,
    pub grid: SampleGrid,
    pub t_grid: Vec<f64>,
    window: f64,
    n_atoms: usize,
    amplitude: f64,
    blowup_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub linf_error: f64,
    pub u_sup: f64,
    pub bound_rhs: f64,
    pub truncation_residual: f64,
    pub sign_zero_events: usize,
    pub baseline_linf_error: Option<f64>,
}

impl PointContext {
    pub fn new(cfg: &SweepConfig, params: DecimationParams) -> Result<Self> {
        let lp = params.lambda_prime();
        let kernel = build_kernel_table(&cfg.kernel_params(KernelParams::decimated(
            params.lambda,
            lp,
            params.order,
        )?))?;
        let baseline_kernel = if cfg.baseline {
            Some(build_kernel_table(&cfg.kernel_params(
                KernelParams::baseline(params.lambda, params.order)?,
            ))?)
        } else {
            None
        };

        // Decimated coefficients must cover the kernel support around
        // [0, window], plus the guard; raw samples additionally need r rho
        // on each side for the block sums.
        let k = i64::from(params.block_len());
        let reach = kernel.support_radius + cfg.guard;
        let m_lo = ((-reach) * lp).floor() as i64;
        let m_hi = ((cfg.window + reach) * lp).ceil() as i64;
        let mut n_lo = k * m_lo - params.half_support();
        let mut n_hi = k * m_hi + params.half_support();
        if let Some(bk) = &baseline_kernel {
            let reach = bk.support_radius + cfg.guard;
            n_lo = n_lo.min(((-reach) * params.lambda).floor() as i64);
            n_hi = n_hi.max(((cfg.window + reach) * params.lambda).ceil() as i64);
        }
        Ok(Self {
            params,
            kernel,
            baseline_kernel,
            grid: SampleGrid::new(params.lambda, n_lo, n_hi)?,
            t_grid: time_grid(0.0, cfg.window, cfg.points_per_unit),
            window: cfg.window,
            n_atoms: cfg.n_atoms,
            amplitude: cfg.amplitude,
            blowup_threshold: cfg.blowup_threshold,
        })
    }

    pub fn signal(&self, seed: u64) -> Result<BandlimitedSignal> {
        random_signal(seed, self.n_atoms, self.amplitude, (0.0, self.window))
    }

    fn interior(&self) -> (f64, f64) {
        (0.0, self.window)
    }

    /// Full quantize / encode / decode / reconstruct pipeline for one signal.
    pub fn run_seed(&self, seed: u64) -> Result<SeedOutcome> {
        let sig = self.signal(seed)?;
        let samples = sig.sample(&self.grid)?;
        let r = self.params.order as usize;
        let run = if r == 1 {
            run_first_order(&samples, 0.0)?
        } else {
            let mut q = QuantizerConfig::greedy(r).without_states();
            q.blowup_threshold = self.blowup_threshold;
            run_rth_order(&samples, &q)?
        };

        let stream = decimate(&run.bits, self.grid.n_start, &self.params)?;
        let decoded = decode(&encode(&stream)?)?.with_index_offset(stream.index_offset);
        if decoded != stream {
            return Err(Error::Corrupt("codec round trip changed the stream".into()));
        }

        let recon = reconstruct_decimated(&decoded, &self.kernel, &self.t_grid)?;
        let err = linf_error(&recon.values, &sig, &self.t_grid, self.interior())?;
        let bound_rhs = self.kernel.deriv_l1 * run.u_sup / self.params.lambda.powi(r as i32);

        let baseline_linf_error = match &self.baseline_kernel {
            Some(bk) => {
                let x: Vec<f64> = run.bits.iter().map(|&b| f64::from(b)).collect();
                let rec = reconstruct_baseline(
                    &x,
                    self.grid.n_start,
                    self.params.lambda,
                    bk,
                    &self.t_grid,
                )?;
                Some(linf_error(
                    &rec.values,
                    &sig,
                    &self.t_grid,
                    self.interior(),
                )?)
            }
            None => None,
        };

        Ok(SeedOutcome {
            seed,
            linf_error: err,
            u_sup: run.u_sup,
            bound_rhs,
            truncation_residual: recon.truncation_residual,
            sign_zero_events: run.sign_zero_events,
            baseline_linf_error,
        })
    }

    /// Interior error when the exact block averages `S^r f` (no
    /// quantization) are decimated and reconstructed; ideally zero.
    pub fn unquantized_error(&self, seed: u64) -> Result<f64> {
        let sig = self.signal(seed)?;
        let samples = sig.sample(&self.grid)?;
        let rho = self.params.rho as usize;
        let r = self.params.order as usize;
        let averaged = partial_sum(&samples, rho, r)?;
        let k = i64::from(self.params.block_len());
        let lo = self.grid.n_start + self.params.half_support();
        let hi = lo + averaged.len() as i64 - 1;
        let m_first = lo.div_euclid(k) + i64::from(lo.rem_euclid(k) != 0);
        let m_last = hi.div_euclid(k);
        let coeffs: Vec<f64> = (m_first..=m_last)
            .map(|m| averaged[(k * m - lo) as usize])
            .collect();
        let plan = ReconstructionPlan::decimated(&self.kernel, &self.params)?.normalized_input();
        let recon = plan.reconstruct(&coeffs, m_first, &self.t_grid)?;
        linf_error(&recon.values, &sig, &self.t_grid, self.interior())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum PointStatus {
    Ok,
    /// The quantizer state blew past its threshold for some seed.
    Instability(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateDistortionRecord {
    pub lambda: f64,
    pub rho: u32,
    pub r: u32,
    pub lambda_prime: f64,
    pub rate_exact: f64,
    pub rate_practical: f64,
    /// Worst interior error over the seeds.
    pub linf_error: f64,
    pub u_sup: f64,
    /// `lambda^{-r} ||g~^(r)||_{L1} u_sup`.
    pub bound_rhs: f64,
    /// `C_sd C^r (lambda' / lambda)^r` with the sweep's empirical constants.
    pub theorem_bound: f64,
    pub truncation_residual: f64,
    pub status: PointStatus,
    pub gtilde_deriv_l1: f64,
    pub empirical_c: f64,
    pub baseline_linf_error: Option<f64>,
    pub seeds: Vec<SeedOutcome>,
}

impl RateDistortionRecord {
    fn empty(params: &DecimationParams, status: PointStatus) -> Self {
        let rate = decimation::rate(params);
        Self {
            lambda: params.lambda,
            rho: params.rho,
            r: params.order,
            lambda_prime: params.lambda_prime(),
            rate_exact: rate.exact_bits_per_nyquist,
            rate_practical: rate.practical_bits_per_nyquist,
            linf_error: f64::NAN,
            u_sup: f64::NAN,
            bound_rhs: f64::NAN,
            theorem_bound: f64::NAN,
            truncation_residual: f64::NAN,
            status,
            gtilde_deriv_l1: f64::NAN,
            empirical_c: f64::NAN,
            baseline_linf_error: None,
            seeds: Vec::new(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == PointStatus::Ok
    }

    pub fn field(&self, f: Field) -> f64 {
        match f {
            Field::Lambda => self.lambda,
            Field::Rho => f64::from(self.rho),
            Field::Order => f64::from(self.r),
            Field::LambdaPrime => self.lambda_prime,
            Field::RateExact => self.rate_exact,
            Field::RatePractical => self.rate_practical,
            Field::LinfError => self.linf_error,
            Field::USup => self.u_sup,
            Field::BoundRhs => self.bound_rhs,
            Field::TheoremBound => self.theorem_bound,
            Field::TruncationResidual => self.truncation_residual,
        }
    }

    fn csv_row(&self) -> [String; 11] {
        [
            self.lambda.to_string(),
            self.rho.to_string(),
            self.r.to_string(),
            self.lambda_prime.to_string(),
            self.rate_exact.to_string(),
            self.rate_practical.to_string(),
            self.linf_error.to_string(),
            self.u_sup.to_string(),
            self.bound_rhs.to_string(),
            self.theorem_bound.to_string(),
            self.truncation_residual.to_string(),
        ]
    }
}

pub fn run_point(cfg: &SweepConfig, params: DecimationParams) -> RateDistortionRecord {
    let ctx = match PointContext::new(cfg, params) {
        Ok(ctx) => ctx,
        Err(e) => return RateDistortionRecord::empty(&params, PointStatus::Failed(e.to_string())),
    };
    let mut seeds = Vec::with_capacity(cfg.n_seeds);
    for seed in cfg.seeds() {
        match ctx.run_seed(seed) {
            Ok(o) => seeds.push(o),
            Err(e @ Error::Instability { .. }) => {
                return RateDistortionRecord::empty(
                    &params,
                    PointStatus::Instability(format!("seed {seed}: {e}")),
                )
            }
            Err(e) => {
                return RateDistortionRecord::empty(
                    &params,
                    PointStatus::Failed(format!("seed {seed}: {e}")),
                )
            }
        }
    }
    let max = |f: fn(&SeedOutcome) -> f64| seeds.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let mut rec = RateDistortionRecord::empty(&params, PointStatus::Ok);
    rec.linf_error = max(|s| s.linf_error);
    rec.u_sup = max(|s| s.u_sup);
    rec.bound_rhs = max(|s| s.bound_rhs);
    rec.truncation_residual = max(|s| s.truncation_residual);
    rec.gtilde_deriv_l1 = ctx.kernel.deriv_l1;
    rec.empirical_c = ctx.kernel.empirical_c();
    rec.baseline_linf_error = seeds
        .iter()
        .map(|s| s.baseline_linf_error)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.into_iter().fold(f64::NEG_INFINITY, f64::max));
    rec.seeds = seeds;
    rec
}

/// Constants fitted from a finished sweep, all labelled empirical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstants {
    /// Largest `(||g~^(r)||_{L1} / lambda'^r)^{1/r}` over the sweep.
    pub c: f64,
    /// Largest observed `u_sup` per order, standing in for `C_sd`.
    pub c_sigma_delta: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub records: Vec<RateDistortionRecord>,
    pub constants: EmpiricalConstants,
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let points = cfg.points()?;
    let mut records: Vec<RateDistortionRecord> =
        points.into_par_iter().map(|p| run_point(cfg, p)).collect();

    let ok: Vec<&RateDistortionRecord> = records.iter().filter(|r| r.is_ok()).collect();
    let c = ok.iter().map(|r| r.empirical_c).fold(0.0, f64::max);
    let mut c_sigma_delta: Vec<(u32, f64)> = Vec::new();
    for r in &ok {
        match c_sigma_delta.iter_mut().find(|(o, _)| *o == r.r) {
            Some((_, v)) => *v = v.max(r.u_sup),
            None => c_sigma_delta.push((r.r, r.u_sup)),
        }
    }
    c_sigma_delta.sort_by_key(|(o, _)| *o);
    for rec in records.iter_mut().filter(|r| r.is_ok()) {
        let csd = c_sigma_delta
            .iter()
            .find(|(o, _)| *o == rec.r)
            .map(|(_, v)| *v)
            .unwrap_or(f64::NAN);
        let order = rec.r as i32;
        rec.theorem_bound = csd * c.powi(order) * (rec.lambda_prime / rec.lambda).powi(order);
    }
    Ok(SweepOutput {
        config: cfg.clone(),
        records,
        constants: EmpiricalConstants { c, c_sigma_delta },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Lambda,
    Rho,
    Order,
    LambdaPrime,
    RateExact,
    RatePractical,
    LinfError,
    USup,
    BoundRhs,
    TheoremBound,
    TruncationResidual,
}

impl Field {
    fn is_rate(self) -> bool {
        matches!(self, Field::RateExact | Field::RatePractical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<DecayFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 1e-12 * (1.0 + mx * mx) * n) {
        return Err(Error::DegenerateFit("x values have no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Fits `ln y` against `ln x`, or `log2 y` against `x` when `x` is a rate.
/// Records with a non-Ok status are skipped.
pub fn fit_decay(records: &[RateDistortionRecord], x: Field, y: Field) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for rec in records.iter().filter(|r| r.is_ok()) {
        let (xv, yv) = (rec.field(x), rec.field(y));
        if !(yv > 0.0) {
            return Err(Error::DegenerateFit(format!("non-positive y value {yv}")));
        }
        if x.is_rate() {
            xs.push(xv);
            ys.push(yv.log2());
        } else {
            if !(xv > 0.0) {
                return Err(Error::DegenerateFit(format!("non-positive x value {xv}")));
            }
            xs.push(xv.ln());
            ys.push(yv.ln());
        }
    }
    least_squares(&xs, &ys)
}

#[derive(Debug, Clone, Serialize)]
struct SweepMetadata<'a> {
    generated_unix: u64,
    note: &'static str,
    empirical_constants: &'a EmpiricalConstants,
    config: &'a SweepConfig,
    points: Vec<PointMetadata<'a>>,
}

#[derive(Debug, Clone, Serialize)]
struct PointMetadata<'a> {
    lambda: f64,
    rho: u32,
    r: u32,
    status: &'a PointStatus,
    gtilde_deriv_l1: f64,
    empirical_c: f64,
    baseline_linf_error: Option<f64>,
    seeds: &'a [SeedOutcome],
}

const METADATA_NOTE: &str = "Constants are empirical: C_sigma_delta is the largest observed \
    sup |u_n| per order and C is fitted from ||g~^(r)||_L1. rate_exact uses the non-integer \
    log2 alphabet size; rate_practical uses the integer codeword width.";

/// Writes the CSV data table.
pub fn write_csv(records: &[RateDistortionRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to write".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for rec in records {
        w.write_record(rec.csv_row())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `rate_distortion.csv`, `metadata.json` and two SVG figures into
/// `out_dir`, returning the written paths.
pub fn emit(output: &SweepOutput, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if output.records.is_empty() {
        return Err(Error::InvalidParameter("no records to emit".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let csv_path = out_dir.join("rate_distortion.csv");
    write_csv(&output.records, &csv_path)?;
    written.push(csv_path);

    let meta = SweepMetadata {
        generated_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or_default(),
        note: METADATA_NOTE,
        empirical_constants: &output.constants,
        config: &output.config,
        points: output
            .records
            .iter()
            .map(|r| PointMetadata {
                lambda: r.lambda,
                rho: r.rho,
                r: r.r,
                status: &r.status,
                gtilde_deriv_l1: r.gtilde_deriv_l1,
                empirical_c: r.empirical_c,
                baseline_linf_error: r.baseline_linf_error,
                seeds: &r.seeds,
            })
            .collect(),
    };
    let meta_path = out_dir.join("metadata.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)
        .map_err(|e| Error::io(&meta_path, e))?;
    written.push(meta_path);

    let ok: Vec<&RateDistortionRecord> = output.records.iter().filter(|r| r.is_ok()).collect();
    let mut by_lambda = Vec::new();
    let mut by_rate = Vec::new();
    for r in output.orders() {
        let group: Vec<&&RateDistortionRecord> = ok.iter().filter(|x| x.r == r).collect();
        by_lambda.push(Series {
            label: format!("r = {r} error"),
            points: group.iter().map(|x| (x.lambda, x.linf_error)).collect(),
            dashed: false,
        });
        by_lambda.push(Series {
            label: format!("r = {r} bound"),
            points: group.iter().map(|x| (x.lambda, x.bound_rhs)).collect(),
            dashed: true,
        });
        by_rate.push(Series {
            label: format!("r = {r}"),
            points: group
                .iter()
                .map(|x| (x.rate_exact, x.linf_error.log2()))
                .collect(),
            dashed: false,
        });
    }
    let fig = out_dir.join("error_vs_lambda.svg");
    std::fs::write(
        &fig,
        line_plot_svg(
            "L-inf error vs oversampling",
            "lambda",
            "error",
            &by_lambda,
            true,
        ),
    )
    .map_err(|e| Error::io(&fig, e))?;
    written.push(fig);
    let fig = out_dir.join("error_vs_rate.svg");
    std::fs::write(
        &fig,
        line_plot_svg(
            "log2 error vs bit-rate",
            "bits per Nyquist interval",
            "log2 error",
            &by_rate,
            false,
        ),
    )
    .map_err(|e| Error::io(&fig, e))?;
    written.push(fig);
    Ok(written)
}

impl SweepOutput {
    fn orders(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.records.iter().map(|r| r.r).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Minimal static line plot; `log_axes` plots `log10` of both coordinates.
fn line_plot_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_axes: bool,
) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let tf = |v: f64| if log_axes { v.log10() } else { v };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y)| (tf(x), tf(y))))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#,
        w / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{m},{m} L{m},{} L{},{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m,
        h - m
    );
    let tick = |v: f64| {
        if log_axes {
            format!("{:.3e}", 10f64.powf(v))
        } else {
            format!("{v:.2}")
        }
    };
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * f64::from(i) / 4.0;
        let fy = y0 + (y1 - y0) * f64::from(i) / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            sx(fx),
            h - m + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            m - 4.0,
            sy(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        w / 2.0,
        h - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[(i / 2) % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| (tf(x), tf(y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if path.is_empty() {
            continue;
        }
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
            w - m - 110.0,
            m + 16.0 * i as f64,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}
