//! Reconstruction kernels built in the Fourier domain.
//!
//! * `g`: smooth low-pass with `g^(w) = 1/sqrt(2 pi)` on `|w| <= pi`.
//! * `h^ = h0^ * phi^`, where `h0^(w) = lambda sin(w / 2 lambda) / (lambda' sin(w / 2 lambda'))`
//!   undoes the attenuation of the `r`-fold block average on the band, and
//!   `phi^` cuts it off smoothly at `c pi < lambda' pi`.
//! * `g~`: inverse transform of `g^ h^r`. Sampling `S^r f` at rate `lambda'`
//!   and interpolating with `g~` returns `f` exactly.
//!
//! Kernels are tabulated on a uniform time grid by trapezoid quadrature
//! of the (even, `C^inf`, compactly supported) spectrum and evaluated between
//! nodes by 6-point Lagrange interpolation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{even_cosine_transform, even_cosine_transform_at};
use crate::signal::BandlimitedSignal;

pub const DEFAULT_N_OMEGA: usize = 1 << 14;
pub const DEFAULT_TABLE_RADIUS: f64 = 160.0;
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;
/// Relative gap kept between the edge of `g^` and `lambda' pi`.
pub const G_EDGE_MARGIN: f64 = 0.05;
/// Table nodes per unit time for the plain low-pass kernel.
pub const BASELINE_SAMPLES_PER_UNIT: f64 = 256.0;
const REFINEMENT_TOLERANCE: f64 = 1e-10;

/// `C^inf` step from 0 at `x <= 0` to 1 at `x >= 1`:
/// `e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / x - 1.0 / (1.0 - x)).exp())
    }
}

/// Even window equal to 1 on `|w| <= passband_edge`, 0 on
/// `|w| >= stopband_edge`, with a [`smooth_step`] transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothWindow {
    pub passband_edge: f64,
    pub stopband_edge: f64,
}

impl SmoothWindow {
    pub fn new(passband_edge: f64, stopband_edge: f64) -> Result<Self> {
        let w = Self {
            passband_edge,
            stopband_edge,
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        if !(self.passband_edge > 0.0
            && self.stopband_edge > self.passband_edge
            && self.stopband_edge.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "window edges {} / {} must satisfy 0 < pass < stop",
                self.passband_edge, self.stopband_edge
            )));
        }
        Ok(())
    }

    pub fn value(&self, omega: f64) -> f64 {
        let x = (omega.abs() - self.passband_edge) / (self.stopband_edge - self.passband_edge);
        1.0 - smooth_step(x)
    }
}

/// Default cutoff `c` (in units of `pi`) of the compensation filter.
pub fn default_cutoff(lambda_prime: f64) -> f64 {
    f64::min(2.0, 0.5 * (1.0 + lambda_prime))
}

/// `sin(x) / x` to five terms.
fn sinc_series(x: f64) -> f64 {
    let x2 = x * x;
    1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
}

/// `h0^(w) = lambda sin(w / 2 lambda) / (lambda' sin(w / 2 lambda'))`, with the
/// removable singularity at 0 resolved to 1.
pub fn h0_hat(omega: f64, lambda: f64, lambda_prime: f64) -> f64 {
    let a = omega / (2.0 * lambda);
    let b = omega / (2.0 * lambda_prime);
    if omega.abs() < 1e-4 * lambda_prime {
        sinc_series(a) / sinc_series(b)
    } else {
        lambda * a.sin() / (lambda_prime * b.sin())
    }
}

/// Series `h0^ = 1 + c2 w^2 + c4 w^4 + O(w^6)`.
fn h0_series_coefficients(lambda: f64, lambda_prime: f64) -> (f64, f64) {
    let al2 = (0.5 / lambda).powi(2);
    let be2 = (0.5 / lambda_prime).powi(2);
    let c2 = (be2 - al2) / 6.0;
    let c4 = 7.0 * be2 * be2 / 360.0 - al2 * be2 / 36.0 + al2 * al2 / 120.0;
    (c2, c4)
}

pub fn h0_hat_prime(omega: f64, lambda: f64, lambda_prime: f64) -> f64 {
    if omega.abs() < 1e-2 * lambda_prime {
        let (c2, c4) = h0_series_coefficients(lambda, lambda_prime);
        return 2.0 * c2 * omega + 4.0 * c4 * omega.powi(3);
    }
    let a = omega / (2.0 * lambda);
    let b = omega / (2.0 * lambda_prime);
    (lambda_prime * b.sin() * a.cos() - lambda * a.sin() * b.cos())
        / (2.0 * lambda_prime * lambda_prime * b.sin().powi(2))
}

pub fn h0_hat_second(omega: f64, lambda: f64, lambda_prime: f64) -> f64 {
    if omega.abs() < 1e-2 * lambda_prime {
        let (c2, c4) = h0_series_coefficients(lambda, lambda_prime);
        return 2.0 * c2 + 12.0 * c4 * omega * omega;
    }
    let a = omega / (2.0 * lambda);
    let b = omega / (2.0 * lambda_prime);
    let (n, n1, n2) = (
        a.sin(),
        a.cos() / (2.0 * lambda),
        -a.sin() / (4.0 * lambda * lambda),
    );
    let (d, d1, d2) = (
        b.sin(),
        b.cos() / (2.0 * lambda_prime),
        -b.sin() / (4.0 * lambda_prime * lambda_prime),
    );
    let ratio =
        n2 / d - 2.0 * n1 * d1 / (d * d) - n * d2 / (d * d) + 2.0 * n * d1 * d1 / (d * d * d);
    lambda / lambda_prime * ratio
}

/// `h^(w) = h0^(w) phi^(w)`; requires the cutoff window to end below `lambda' pi`.
pub fn h_hat(omega: f64, lambda: f64, lambda_prime: f64, window: &SmoothWindow) -> Result<f64> {
    window.validate()?;
    if window.stopband_edge >= lambda_prime * PI {
        return Err(Error::InvalidParameter(format!(
            "cutoff c = {} must be below lambda' = {lambda_prime}",
            window.stopband_edge / PI
        )));
    }
    if window.passband_edge < PI {
        return Err(Error::InvalidParameter(
            "correction window must pass |w| <= pi".into(),
        ));
    }
    Ok(h0_hat(omega, lambda, lambda_prime) * window.value(omega))
}

/// Everything needed to tabulate `g~ = F^{-1}[g^ h^r]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub lambda: f64,
    /// Rate of the sequence this kernel interpolates.
    pub lambda_prime: f64,
    /// Power `r` of `h^`; 0 gives the plain low-pass `g`.
    pub order: u32,
    /// Derivative whose L1 norm is reported.
    pub deriv_order: u32,
    pub g_window: SmoothWindow,
    pub cutoff_window: SmoothWindow,
    /// Trapezoid nodes across `[-Omega, Omega]`.
    pub n_omega: usize,
    pub samples_per_unit: f64,
    pub table_radius: f64,
    pub tail_tolerance: f64,
}

impl KernelParams {
    /// Kernel for reconstructing from a decimated stream at `lambda'`.
    pub fn decimated(lambda: f64, lambda_prime: f64, order: u32) -> Result<Self> {
        if !(lambda_prime > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda' = {lambda_prime} must exceed 1"
            )));
        }
        let c = default_cutoff(lambda_prime);
        let g_edge = f64::min(2.0, lambda_prime * (1.0 - G_EDGE_MARGIN));
        let p = Self {
            lambda,
            lambda_prime,
            order,
            deriv_order: order,
            g_window: SmoothWindow::new(PI, g_edge * PI)?,
            cutoff_window: SmoothWindow::new(PI, c * PI)?,
            n_omega: DEFAULT_N_OMEGA,
            samples_per_unit: 64.0 * lambda_prime,
            table_radius: DEFAULT_TABLE_RADIUS,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        };
        p.validate()?;
        Ok(p)
    }

    /// Plain low-pass `g` for reconstructing raw samples at rate `lambda`.
    pub fn baseline(lambda: f64, deriv_order: u32) -> Result<Self> {
        let mut p = Self::decimated(lambda, lambda, 0)?;
        p.deriv_order = deriv_order;
        p.samples_per_unit = BASELINE_SAMPLES_PER_UNIT;
        Ok(p)
    }

    /// Same `g` with the correction removed.
    pub fn plain_g(&self) -> Self {
        Self { order: 0, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_prime > 1.0 && self.lambda >= self.lambda_prime && self.lambda.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "need lambda >= lambda' > 1, got {} and {}",
                self.lambda, self.lambda_prime
            )));
        }
        self.g_window.validate()?;
        self.cutoff_window.validate()?;
        if self.g_window.passband_edge < PI || self.g_window.stopband_edge > self.lambda_prime * PI
        {
            return Err(Error::InvalidParameter(
                "g^ must pass [-pi, pi] and vanish beyond lambda' pi".into(),
            ));
        }
        if self.order > 0 && self.cutoff_window.stopband_edge >= self.lambda_prime * PI {
            return Err(Error::InvalidParameter(format!(
                "cutoff c = {} must be below lambda' = {}",
                self.cutoff_window.stopband_edge / PI,
                self.lambda_prime
            )));
        }
        if self.order > 16 || self.deriv_order > 16 {
            return Err(Error::InvalidParameter("order above 16".into()));
        }
        if self.n_omega < 64 || !self.n_omega.is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "n_omega must be even and at least 64".into(),
            ));
        }
        if !(self.samples_per_unit > 0.0 && self.table_radius > 0.0 && self.tail_tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "table density, radius and tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// End of the spectrum's support.
    pub fn omega_max(&self) -> f64 {
        if self.order == 0 {
            self.g_window.stopband_edge
        } else {
            self.g_window
                .stopband_edge
                .min(self.cutoff_window.stopband_edge)
        }
    }

    /// `sqrt(2 pi) g^(w) h^(w)^r`, which is 1 at `w = 0`.
    pub fn spectrum(&self, omega: f64) -> f64 {
        let g = self.g_window.value(omega);
        if self.order == 0 || g == 0.0 {
            return g;
        }
        let h = h0_hat(omega, self.lambda, self.lambda_prime) * self.cutoff_window.value(omega);
        g * h.powi(self.order as i32)
    }

    fn spectrum_samples(&self, intervals: usize) -> (Vec<f64>, f64) {
        let delta = self.omega_max() / intervals as f64;
        let samples = (0..=intervals)
            .map(|k| self.spectrum(k as f64 * delta))
            .collect();
        (samples, delta)
    }
}

/// Tabulated kernel on `t = j dt >= 0` (the kernel is even).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelTable {
    pub params: KernelParams,
    pub dt: f64,
    pub values: Vec<f64>,
    /// Beyond this radius the kernel is treated as zero.
    pub support_radius: f64,
    /// Largest `|g~(t)|` tabulated beyond the support radius.
    pub tail_bound: f64,
    /// `int_{|t| > support_radius} |g~|` over the table.
    pub tail_mass: f64,
    /// `||g~^(deriv_order)||_{L1}`.
    pub deriv_l1: f64,
    /// `int g~ dt`.
    pub integral: f64,
    pub omega_max: f64,
}

/// Sidecar record written next to an exported table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelMetadata {
    pub params: KernelParams,
    pub dt: f64,
    pub nodes: usize,
    pub omega_max: f64,
    pub support_radius: f64,
    pub tail_bound: f64,
    pub tail_mass: f64,
    pub deriv_l1: f64,
    pub integral: f64,
}

/// Largest factor by which [`build_kernel_table`] grows the table radius
/// looking for a decayed tail.
const MAX_RADIUS_GROWTH: f64 = 8.0;

/// Tabulates the kernel. The table radius starts at `params.table_radius`
/// and doubles (up to 8x) until the tail mass has converged; the radius
/// actually used is recorded in the returned table's params.
pub fn build_kernel_table(params: &KernelParams) -> Result<KernelTable> {
    params.validate()?;
    let intervals = params.n_omega / 2;
    let (spectrum, delta) = params.spectrum_samples(intervals);
    let dt = 1.0 / params.samples_per_unit;

    let mut params = *params;
    let limit = params.table_radius * MAX_RADIUS_GROWTH;
    let (values, n_t, cut, tail) = loop {
        // A few extra nodes so interpolation at the table radius stays in range.
        let n_t = (params.table_radius / dt).ceil() as usize + 4;
        let values: Vec<f64> = even_cosine_transform(&spectrum, delta, dt, n_t, 0)
            .into_iter()
            .map(|v| v / PI)
            .collect();
        // Smallest radius whose two-sided tail mass is within tolerance.
        let mut tail = 0.0;
        let mut cut = n_t;
        for j in (1..n_t).rev() {
            let next = tail + 2.0 * dt * values[j].abs();
            if next > params.tail_tolerance {
                break;
            }
            tail = next;
            cut = j;
        }
        let last_quarter: f64 =
            2.0 * dt * values[3 * n_t / 4..].iter().map(|v| v.abs()).sum::<f64>();
        if cut < n_t - 6 && last_quarter <= 0.1 * params.tail_tolerance {
            break (values, n_t, cut, tail);
        }
        if params.table_radius * 2.0 > limit {
            return Err(Error::NotConverged(format!(
                "kernel tail has not decayed by t = {}",
                params.table_radius
            )));
        }
        params.table_radius *= 2.0;
    };

    // Grid refinement: halve the frequency step and compare at a few times.
    let (fine, fine_delta) = params.spectrum_samples(2 * intervals);
    for j in [0usize, (0.75 / dt) as usize, (2.5 / dt) as usize, n_t / 2] {
        let j = j.min(n_t - 1);
        let refined = even_cosine_transform_at(&fine, fine_delta, j as f64 * dt, 0) / PI;
        let diff = (refined - values[j]).abs();
        if !(diff <= REFINEMENT_TOLERANCE) {
            return Err(Error::NotConverged(format!(
                "kernel at t = {} moves by {diff:e} when n_omega doubles",
                j as f64 * dt
            )));
        }
    }

    let integral = dt * (values[0] + 2.0 * values[1..].iter().sum::<f64>());
    let support_radius = cut as f64 * dt;
    let tail_bound = values[cut..].iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let deriv = even_cosine_transform(&spectrum, delta, dt, n_t, params.deriv_order);
    let deriv_l1 =
        dt / PI * (deriv[0].abs() + 2.0 * deriv[1..].iter().map(|v| v.abs()).sum::<f64>());

    Ok(KernelTable {
        params,
        dt,
        values,
        support_radius,
        tail_bound,
        tail_mass: tail,
        deriv_l1,
        integral,
        omega_max: params.omega_max(),
    })
}

/// Lagrange weights for nodes at offsets -2..=3 and fractional position `u`.
#[inline]
fn lagrange6(u: f64) -> [f64; 6] {
    let d = [u + 2.0, u + 1.0, u, u - 1.0, u - 2.0, u - 3.0];
    // prod_{k != m} (m - k) for m = -2..=3
    const DENOM: [f64; 6] = [-120.0, 24.0, -12.0, 12.0, -24.0, 120.0];
    let mut w = [0.0; 6];
    for m in 0..6 {
        let mut p = 1.0;
        for (k, dk) in d.iter().enumerate() {
            if k != m {
                p *= dk;
            }
        }
        w[m] = p / DENOM[m];
    }
    w
}

impl KernelTable {
    pub fn rate(&self) -> f64 {
        self.params.lambda_prime
    }

    pub fn table_radius(&self) -> f64 {
        (self.values.len() - 4) as f64 * self.dt
    }

    /// Interpolated value anywhere inside the table, `None` past its end.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let s = t.abs() / self.dt;
        let i = s.floor() as usize;
        if i + 3 >= self.values.len() {
            return None;
        }
        let u = s - i as f64;
        if u == 0.0 {
            return Some(self.values[i]);
        }
        let w = lagrange6(u);
        let mut acc = 0.0;
        for (m, wm) in w.iter().enumerate() {
            let idx = i as isize + m as isize - 2;
            acc += wm * self.values[idx.unsigned_abs()];
        }
        Some(acc)
    }

    /// The truncated kernel: interpolated inside the support radius, zero outside.
    pub fn value(&self, t: f64) -> f64 {
        if t.abs() > self.support_radius {
            0.0
        } else {
            self.interpolate(t).unwrap_or(0.0)
        }
    }

    /// Fitted `C` with `||g~^(r)||_{L1} = (C lambda')^r`.
    pub fn empirical_c(&self) -> f64 {
        let r = f64::from(self.params.deriv_order.max(1));
        self.deriv_l1.powf(1.0 / r) / self.params.lambda_prime
    }

    pub fn metadata(&self) -> KernelMetadata {
        KernelMetadata {
            params: self.params,
            dt: self.dt,
            nodes: self.values.len(),
            omega_max: self.omega_max,
            support_radius: self.support_radius,
            tail_bound: self.tail_bound,
            tail_mass: self.tail_mass,
            deriv_l1: self.deriv_l1,
            integral: self.integral,
        }
    }

    /// Writes `(t, g~(t))` rows for `|t| <= support_radius` and a JSON sidecar
    /// at `<path>.json`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "kernel"])?;
        let n = (self.support_radius / self.dt).round() as usize;
        for j in (-(n as i64))..=(n as i64) {
            let t = j as f64 * self.dt;
            w.write_record([
                t.to_string(),
                self.values[j.unsigned_abs() as usize].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        let side = path.with_extension("json");
        std::fs::write(&side, serde_json::to_string_pretty(&self.metadata())?)
            .map_err(|e| Error::io(&side, e))
    }
}

/// `||h_r||_{L1}` where `h_r = F^{-1}[h^r]` with `h^ = h0^ phi^`.
///
/// The integral is extended until the mass in `[T/2, T]` falls below
/// `1e-7` of the total; `h_r` decays faster than any power, so this bounds
/// the neglected tail well under `1e-6` relative.
pub fn l1_norm_h(lambda: f64, lambda_prime: f64, r: u32, window: &SmoothWindow) -> Result<f64> {
    h_hat(0.0, lambda, lambda_prime, window)?;
    if r == 0 {
        return Err(Error::InvalidParameter("h_0 is a delta".into()));
    }
    let omega_max = window.stopband_edge;
    let intervals = 4096;
    let delta = omega_max / intervals as f64;
    let spectrum: Vec<f64> = (0..=intervals)
        .map(|k| {
            let w = k as f64 * delta;
            (h0_hat(w, lambda, lambda_prime) * window.value(w)).powi(r as i32)
        })
        .collect();
    let dt = 1.0 / 64.0;
    let scale = 2.0 / (2.0 * PI).sqrt();
    let mut radius = 64.0;
    // The quadrature period 2 pi / delta must stay well beyond the radius.
    while radius <= 0.25 * 2.0 * PI / delta {
        let n_t = (radius / dt) as usize + 1;
        let h = even_cosine_transform(&spectrum, delta, dt, n_t, 0);
        let abs: Vec<f64> = h.iter().map(|v| scale * v.abs()).collect();
        let total = dt * (abs[0] + 2.0 * abs[1..].iter().sum::<f64>());
        let outer = 2.0 * dt * abs[n_t / 2..].iter().sum::<f64>();
        if outer <= 1e-7 * total {
            return Ok(total);
        }
        radius *= 2.0;
    }
    Err(Error::NotConverged(format!(
        "||h_{r}||_L1 tail not below tolerance by t = {radius}"
    )))
}

/// Dense-grid maxima of `|h0^|`, `|h0^'|`, `|h0^''|` on `[-lambda' pi, lambda' pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub lambda: f64,
    pub lambda_prime: f64,
    pub max_h0_abs: f64,
    pub c1: f64,
    pub c1_argmax: f64,
    pub c2: f64,
    pub c2_argmax: f64,
    /// `cos(lambda' pi / 2 lambda) / (2 lambda')`.
    pub c1_endpoint: f64,
    /// `sin(pi lambda' / 2 lambda) (lambda^2 - lambda'^2) / (4 lambda lambda'^3)`.
    pub c2_endpoint: f64,
    pub grid_step: f64,
    /// Largest gap between analytic and central-difference derivatives.
    pub finite_difference_gap: f64,
}

impl LemmaConstants {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.max_h0_abs > FRAC_PI_2 {
            v.push(format!("max |h0^| = {} > pi/2", self.max_h0_abs));
        }
        if self.c1 > 0.5 {
            v.push(format!("C1 = {} > 1/2", self.c1));
        }
        if self.c2 > PI / 8.0 {
            v.push(format!("C2 = {} > pi/8", self.c2));
        }
        v
    }
}

pub fn lemma_constants_check(
    lambda: f64,
    lambda_prime: f64,
    points: usize,
) -> Result<LemmaConstants> {
    if !(lambda > lambda_prime && lambda_prime > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need lambda > lambda' > 1, got {lambda} and {lambda_prime}"
        )));
    }
    if points < 3 {
        return Err(Error::InvalidParameter(
            "need at least 3 grid points".into(),
        ));
    }
    let edge = lambda_prime * PI;
    let step = 2.0 * edge / (points - 1) as f64;
    let fd_step = 1e-4 * lambda_prime;
    let mut out = LemmaConstants {
        lambda,
        lambda_prime,
        max_h0_abs: 0.0,
        c1: 0.0,
        c1_argmax: 0.0,
        c2: 0.0,
        c2_argmax: 0.0,
        c1_endpoint: (lambda_prime * PI / (2.0 * lambda)).cos() / (2.0 * lambda_prime),
        c2_endpoint: (PI * lambda_prime / (2.0 * lambda)).sin()
            * (lambda * lambda - lambda_prime * lambda_prime)
            / (4.0 * lambda * lambda_prime.powi(3)),
        grid_step: step,
        finite_difference_gap: 0.0,
    };
    for i in 0..points {
        let w = if i == points - 1 {
            edge
        } else {
            -edge + i as f64 * step
        };
        out.max_h0_abs = out.max_h0_abs.max(h0_hat(w, lambda, lambda_prime).abs());
        let d1 = h0_hat_prime(w, lambda, lambda_prime);
        let d2 = h0_hat_second(w, lambda, lambda_prime);
        if d1.abs() > out.c1 {
            out.c1 = d1.abs();
            out.c1_argmax = w;
        }
        if d2.abs() > out.c2 {
            out.c2 = d2.abs();
            out.c2_argmax = w;
        }
        // Cross-check on a sparse subset, away from the grid ends.
        if i % 97 == 0 && w.abs() + fd_step < edge {
            let f = |x: f64| h0_hat(x, lambda, lambda_prime);
            let fd1 = (f(w + fd_step) - f(w - fd_step)) / (2.0 * fd_step);
            let fd2 = (f(w + fd_step) - 2.0 * f(w) + f(w - fd_step)) / (fd_step * fd_step);
            out.finite_difference_gap = out
                .finite_difference_gap
                .max((fd1 - d1).abs())
                .max((fd2 - d2).abs());
        }
    }
    Ok(out)
}

/// `(S^r f)(t) = (2 rho + 1)^{-1} sum_{m=-rho..rho} (S^{r-1} f)(t - m / lambda)`,
/// evaluated by direct recursion.
pub fn continuous_partial_sum_oracle(
    sig: &BandlimitedSignal,
    t: f64,
    rho: u32,
    r: u32,
    lambda: f64,
) -> f64 {
    if r == 0 {
        return sig.evaluate(t);
    }
    let rho_i = i64::from(rho);
    let sum: f64 = (-rho_i..=rho_i)
        .map(|m| continuous_partial_sum_oracle(sig, t - m as f64 / lambda, rho, r - 1, lambda))
        .sum();
    sum / f64::from(2 * rho + 1)
}
