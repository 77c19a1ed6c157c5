//! Test functions in the Paley-Wiener class: finite sums of shifted sinc
//! atoms `f(t) = sum_k a_k sinc(t - t_k)` with `sum_k |a_k| <= A < 1`.
//!
//! Each atom is bandlimited to `[-pi, pi]` and has sup-norm one, so the
//! coefficient budget bounds `|f(t)|` everywhere, not only on a sample grid.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|pi x|` the sinc is evaluated by its Taylor series.
const SINC_TAYLOR_CUTOFF: f64 = 1e-6;

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    let y = PI * x;
    if y.abs() < SINC_TAYLOR_CUTOFF {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandlimitedSignal {
    #[serde(rename = "a")]
    coefficients: Vec<f64>,
    #[serde(rename = "t")]
    shifts: Vec<f64>,
    #[serde(rename = "A")]
    budget: f64,
}

impl BandlimitedSignal {
    pub fn new(coefficients: Vec<f64>, shifts: Vec<f64>, budget: f64) -> Result<Self> {
        let sig = Self {
            coefficients,
            shifts,
            budget,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// The identically zero signal.
    pub fn zero(budget: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), budget)
    }

    fn validate(&self) -> Result<()> {
        if !(self.budget > 0.0 && self.budget < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "amplitude budget {} not in (0, 1)",
                self.budget
            )));
        }
        if self.coefficients.len() != self.shifts.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients but {} shifts",
                self.coefficients.len(),
                self.shifts.len()
            )));
        }
        if self
            .coefficients
            .iter()
            .chain(&self.shifts)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite atom".into()));
        }
        // Exact rescaling can land a few ulps above the budget.
        let l1 = self.l1_norm();
        if l1 > self.budget * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::InvalidParameter(format!(
                "sum |a_k| = {l1} exceeds budget {}",
                self.budget
            )));
        }
        Ok(())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// `sum_k |a_k|`, an upper bound on `sup_t |f(t)|`.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a.abs()).sum()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.shifts)
            .map(|(a, tk)| a * sinc(t - tk))
            .sum()
    }

    /// Samples `f(n / lambda)` for every `n` in the grid's index window.
    pub fn sample(&self, grid: &SampleGrid) -> Result<Vec<f64>> {
        grid.validate()?;
        Ok(grid
            .indices()
            .map(|n| self.evaluate(grid.time(n)))
            .collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sig: Self = serde_json::from_str(text)?;
        sig.validate()?;
        Ok(sig)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Draws a signal with `n_atoms` atoms whose coefficients are rescaled so
/// that `sum |a_k| = budget`, with shifts uniform in `shift_range`.
pub fn random_signal(
    seed: u64,
    n_atoms: usize,
    budget: f64,
    shift_range: (f64, f64),
) -> Result<BandlimitedSignal> {
    if !(budget > 0.0 && budget < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "amplitude budget {budget} not in (0, 1)"
        )));
    }
    if n_atoms == 0 {
        return Err(Error::InvalidParameter("need at least one atom".into()));
    }
    let (lo, hi) = shift_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "bad shift range [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coefficients: Vec<f64> = (0..n_atoms)
        .map(|_| {
            // Keep away from zero so the rescaling below is well conditioned.
            let mag = rng.random_range(0.1..1.0);
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let l1: f64 = coefficients.iter().map(|a| a.abs()).sum();
    for a in &mut coefficients {
        *a *= budget / l1;
    }
    let shifts = (0..n_atoms)
        .map(|_| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            }
        })
        .collect();
    BandlimitedSignal::new(coefficients, shifts, budget)
}

/// Sample times `n / lambda` for `n` in `n_start..=n_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub lambda: f64,
    pub n_start: i64,
    pub n_end: i64,
}

impl SampleGrid {
    pub fn new(lambda: f64, n_start: i64, n_end: i64) -> Result<Self> {
        let grid = Self {
            lambda,
            n_start,
            n_end,
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "oversampling rate {} must exceed 1",
                self.lambda
            )));
        }
        if self.n_start >= self.n_end {
            return Err(Error::InvalidParameter(format!(
                "empty index window [{}, {}]",
                self.n_start, self.n_end
            )));
        }
        Ok(())
    }

    /// Smallest grid covering the time interval `[t0, t1]`.
    pub fn covering(lambda: f64, t0: f64, t1: f64) -> Result<Self> {
        Self::new(
            lambda,
            (t0 * lambda).floor() as i64,
            (t1 * lambda).ceil() as i64,
        )
    }

    pub fn len(&self) -> usize {
        (self.n_end - self.n_start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.n_start..=self.n_end
    }

    pub fn time(&self, n: i64) -> f64 {
        n as f64 / self.lambda
    }
}
