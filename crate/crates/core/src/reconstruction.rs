//! Kernel-sum reconstruction `(1/rate) sum_n x_n k(t - n / rate)`.
//!
//! Sums run over the kernel's support radius only. By default an evaluation
//! time whose support reaches past the available coefficients is an error
//! rather than a silently truncated sum.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation::{DecimatedStream, DecimationParams};
use crate::error::{Error, Result};
use crate::kernels::KernelTable;
use crate::signal::BandlimitedSignal;

/// Relative slack when matching stream and kernel rates.
const RATE_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ReconstructionPlan<'k> {
    kernel: &'k KernelTable,
    rate: f64,
    /// Divisor applied to the coefficients, `(2 rho + 1)^r` for decimated streams.
    normalization: f64,
    allow_truncation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub values: Vec<f64>,
    /// Bound on the contribution of kernel terms beyond the support radius.
    pub truncation_residual: f64,
}

fn same_rate(a: f64, b: f64) -> bool {
    (a - b).abs() <= RATE_MATCH_TOL * a.abs().max(b.abs())
}

impl<'k> ReconstructionPlan<'k> {
    /// Plain interpolation of raw samples (or bits) taken at `lambda`.
    pub fn baseline(kernel: &'k KernelTable, lambda: f64) -> Result<Self> {
        if kernel.params.order != 0 || !same_rate(kernel.rate(), lambda) {
            return Err(Error::ParamMismatch(format!(
                "baseline at lambda = {lambda} needs an order-0 kernel at that rate, \
                 got order {} at {}",
                kernel.params.order,
                kernel.rate()
            )));
        }
        Ok(Self {
            kernel,
            rate: lambda,
            normalization: 1.0,
            allow_truncation: false,
        })
    }

    /// Interpolation of decimated values with the compensating kernel.
    pub fn decimated(kernel: &'k KernelTable, params: &DecimationParams) -> Result<Self> {
        params.validate()?;
        let kp = &kernel.params;
        if kp.order != params.order
            || !same_rate(kp.lambda, params.lambda)
            || !same_rate(kp.lambda_prime, params.lambda_prime())
        {
            return Err(Error::ParamMismatch(format!(
                "kernel (lambda {}, lambda' {}, r {}) vs stream (lambda {}, lambda' {}, r {})",
                kp.lambda,
                kp.lambda_prime,
                kp.order,
                params.lambda,
                params.lambda_prime(),
                params.order
            )));
        }
        Ok(Self {
            kernel,
            rate: params.lambda_prime(),
            normalization: params.full_scale() as f64,
            allow_truncation: false,
        })
    }

    /// Permit sums that run off the coefficient window (boundary studies).
    pub fn allow_truncation(mut self) -> Self {
        self.allow_truncation = true;
        self
    }

    /// Coefficients are already divided by `(2 rho + 1)^r` (e.g. exact
    /// block averages rather than integer block sums).
    pub fn normalized_input(mut self) -> Self {
        self.normalization = 1.0;
        self
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Time interval on which every evaluation has full kernel support,
    /// given coefficients at indices `first..first + len`.
    pub fn supported_interval(&self, first_index: i64, len: usize) -> (f64, f64) {
        let r = self.kernel.support_radius;
        (
            first_index as f64 / self.rate + r,
            (first_index + len as i64 - 1) as f64 / self.rate - r,
        )
    }

    /// `(1/rate) sum_n (coeffs[n - first_index] / normalization) k(t - n / rate)`.
    pub fn reconstruct(
        &self,
        coeffs: &[f64],
        first_index: i64,
        t_grid: &[f64],
    ) -> Result<Reconstruction> {
        let last_index = first_index + coeffs.len() as i64 - 1;
        let radius = self.kernel.support_radius;
        let rate = self.rate;
        let scale = 1.0 / (rate * self.normalization);

        let values = t_grid
            .par_iter()
            .map(|&t| {
                let lo = ((t - radius) * rate).ceil() as i64;
                let hi = ((t + radius) * rate).floor() as i64;
                if (lo < first_index || hi > last_index) && !self.allow_truncation {
                    return Err(Error::GuardViolation { t });
                }
                let lo = lo.max(first_index);
                let hi = hi.min(last_index);
                let tr = t * rate;
                let mut acc = 0.0;
                for n in lo..=hi {
                    let x = coeffs[(n - first_index) as usize];
                    if x != 0.0 {
                        acc += x * self.kernel.value((tr - n as f64) / rate);
                    }
                }
                Ok(acc * scale)
            })
            .collect::<Result<Vec<f64>>>()?;

        let peak = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs())) / self.normalization;
        let truncation_residual =
            peak * (self.kernel.tail_mass + 2.0 * self.kernel.tail_bound / rate);
        Ok(Reconstruction {
            values,
            truncation_residual,
        })
    }
}

/// Reconstruction from raw samples or bits `x` taken at `lambda`, with
/// `x[0]` at index `first_index`.
pub fn reconstruct_baseline(
    x: &[f64],
    first_index: i64,
    lambda: f64,
    kernel: &KernelTable,
    t_grid: &[f64],
) -> Result<Reconstruction> {
    ReconstructionPlan::baseline(kernel, lambda)?.reconstruct(x, first_index, t_grid)
}

pub fn reconstruct_decimated(
    stream: &DecimatedStream,
    kernel: &KernelTable,
    t_grid: &[f64],
) -> Result<Reconstruction> {
    let plan = ReconstructionPlan::decimated(kernel, &stream.params)?;
    if stream.is_empty() {
        return Err(Error::InvalidParameter("empty decimated stream".into()));
    }
    let coeffs: Vec<f64> = stream.values.iter().map(|&v| v as f64).collect();
    plan.reconstruct(&coeffs, stream.decimated_index(0), t_grid)
}

/// `points_per_unit` evenly spaced times covering `[start, end)`.
pub fn time_grid(start: f64, end: f64, points_per_unit: usize) -> Vec<f64> {
    let n = ((end - start) * points_per_unit as f64).round().max(0.0) as usize;
    (0..n)
        .map(|i| start + i as f64 / points_per_unit as f64)
        .collect()
}

/// `max |recon(t) - f(t)|` over grid points inside `interior`.
pub fn linf_error(
    recon: &[f64],
    sig: &BandlimitedSignal,
    t_grid: &[f64],
    interior: (f64, f64),
) -> Result<f64> {
    if recon.len() != t_grid.len() {
        return Err(Error::InvalidParameter(
            "reconstruction and grid lengths differ".into(),
        ));
    }
    let mut worst: Option<f64> = None;
    for (&t, &v) in t_grid.iter().zip(recon) {
        if t >= interior.0 && t <= interior.1 {
            let e = (v - sig.evaluate(t)).abs();
            worst = Some(worst.map_or(e, |w| w.max(e)));
        }
    }
    worst.ok_or(Error::EmptyInterior)
}

/// Writes `t, f, recon, abs_error` rows.
pub fn write_trace_csv(
    path: &Path,
    t_grid: &[f64],
    recon: &[f64],
    sig: Option<&BandlimitedSignal>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    match sig {
        Some(sig) => {
            w.write_record(["t", "f", "recon", "abs_error"])?;
            for (&t, &v) in t_grid.iter().zip(recon) {
                let f = sig.evaluate(t);
                w.write_record([
                    t.to_string(),
                    f.to_string(),
                    v.to_string(),
                    (v - f).abs().to_string(),
                ])?;
            }
        }
        None => {
            w.write_record(["t", "recon"])?;
            for (&t, &v) in t_grid.iter().zip(recon) {
                w.write_record([t.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_density() {
        let g = time_grid(0.0, 2.0, 16);
        assert_eq!(g.len(), 32);
        assert_eq!(g[1], 1.0 / 16.0);
    }

    #[test]
    fn linf_error_constant_offset() {
        let sig = BandlimitedSignal::new(vec![0.4], vec![0.5], 0.9).unwrap();
        let t = time_grid(-2.0, 2.0, 8);
        let exact: Vec<f64> = t.iter().map(|&x| sig.evaluate(x)).collect();
        assert!(linf_error(&exact, &sig, &t, (-1.0, 1.0)).unwrap() < 1e-12);
        let shifted: Vec<f64> = exact.iter().map(|v| v + 0.01).collect();
        let e = linf_error(&shifted, &sig, &t, (-1.0, 1.0)).unwrap();
        assert!((e - 0.01).abs() < 1e-12);
        assert!(matches!(
            linf_error(&exact, &sig, &t, (5.0, 6.0)),
            Err(Error::EmptyInterior)
        ));
    }
}
