//! Trapezoid-rule inverse transforms of even, compactly supported spectra.
//!
//! For samples `F_k = F(k delta)`, `k = 0..=K`, of an even spectrum vanishing
//! at `K delta`, this computes
//!
//! ```text
//! T_j = delta * sum_k' F_k omega_k^d cos(omega_k t_j + d pi / 2),  t_j = j dt
//! ```
//!
//! (the prime halves the endpoint weights), which approximates
//! `int_0^Omega F(w) w^d cos(w t + d pi / 2) dw`, i.e. half of the `d`-th time
//! derivative of the full inverse integral. All `j` at once cost a single
//! chirp-z transform, so the time grid can be far finer than the
//! `2 pi / Omega` spacing a plain FFT would give.

use std::f64::consts::FRAC_PI_2;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Evaluates the transform at `t_j = j dt` for `j = 0..n_t`.
pub fn even_cosine_transform(
    spectrum: &[f64],
    delta: f64,
    dt: f64,
    n_t: usize,
    deriv: u32,
) -> Vec<f64> {
    let n = spectrum.len();
    if n == 0 || n_t == 0 {
        return vec![0.0; n_t];
    }
    let weighted: Vec<f64> = spectrum
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            w * f * (k as f64 * delta).powi(deriv as i32)
        })
        .collect();
    let sums = chirp_z(&weighted, delta * dt, n_t);
    // cos(x + d pi/2) = Re(i^d e^{ix})
    let rot = Complex::from_polar(1.0, f64::from(deriv % 4) * FRAC_PI_2);
    sums.into_iter().map(|z| delta * (z * rot).re).collect()
}

/// `X_j = sum_k x_k e^{i theta j k}` for `j = 0..m` (Bluestein).
fn chirp_z(x: &[f64], theta: f64, m: usize) -> Vec<Complex<f64>> {
    let n = x.len();
    let len = (n + m - 1).next_power_of_two();
    let chirp = |k: usize| {
        let kf = k as f64;
        Complex::from_polar(1.0, 0.5 * theta * kf * kf)
    };

    let mut a = vec![Complex::new(0.0, 0.0); len];
    for (k, &xk) in x.iter().enumerate() {
        a[k] = chirp(k) * xk;
    }
    let mut b = vec![Complex::new(0.0, 0.0); len];
    for (j, slot) in b.iter_mut().enumerate().take(m) {
        *slot = chirp(j).conj();
    }
    for k in 1..n {
        b[len - k] = chirp(k).conj();
    }

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai *= bi;
    }
    inv.process(&mut a);
    let scale = 1.0 / len as f64;
    (0..m).map(|j| chirp(j) * a[j] * scale).collect()
}

/// Plain `O(K)` evaluation of the same trapezoid sum at a single `t`.
pub fn even_cosine_transform_at(spectrum: &[f64], delta: f64, t: f64, deriv: u32) -> f64 {
    let n = spectrum.len();
    let phase = f64::from(deriv % 4) * FRAC_PI_2;
    spectrum
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            let omega = k as f64 * delta;
            w * f * omega.powi(deriv as i32) * (omega * t + phase).cos()
        })
        .sum::<f64>()
        * delta
}
