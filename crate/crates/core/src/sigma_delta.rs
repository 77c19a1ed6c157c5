//! One-bit sigma-delta quantizers.
//!
//! An order-`r` scheme picks `q_n` in `{-1, +1}` and updates the state so that
//! `(Delta^r u)_n = f_n - q_n`, i.e.
//!
//! ```text
//! u_n = f_n - q_n - sum_{j=1..r} C(r, j) (-1)^j u_{n-j}
//! ```
//!
//! The greedy rule chooses `q_n` to minimize `|u_n|`. For `r = 1` this is the
//! classical first-order scheme and `|u_n| <= 1` whenever `|u_0| < 1` and
//! every `|f_n| < 1`. For `r >= 2` stability depends on the input, so the
//! recursion watches `|u_n|` and aborts past a blow-up threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuantizerRule {
    /// `q_n = sign(u_{n-1} + f_n)`; only valid for `r = 1`.
    FirstOrderGreedy,
    /// `q_n = sign(f_n - sum_j C(r, j) (-1)^j u_{n-j})`.
    GreedyRthOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    pub order: usize,
    pub rule: QuantizerRule,
    /// `u_init[j - 1]` is the state `u_{-j}` preceding the first sample.
    pub u_init: Vec<f64>,
    /// Keep the full state trace. `u_sup` is tracked either way.
    pub retain_states: bool,
    pub blowup_threshold: f64,
}

impl QuantizerConfig {
    /// Greedy order-`r` quantizer with zero initial state.
    pub fn greedy(order: usize) -> Self {
        let rule = if order == 1 {
            QuantizerRule::FirstOrderGreedy
        } else {
            QuantizerRule::GreedyRthOrder
        };
        Self {
            order,
            rule,
            u_init: vec![0.0; order],
            retain_states: true,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
        }
    }

    pub fn without_states(mut self) -> Self {
        self.retain_states = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidParameter("order must be at least 1".into()));
        }
        if self.order > 30 {
            return Err(Error::InvalidParameter(format!(
                "order {} too large for f64 binomial weights",
                self.order
            )));
        }
        if self.rule == QuantizerRule::FirstOrderGreedy && self.order != 1 {
            return Err(Error::InvalidParameter(
                "first-order greedy rule requires order 1".into(),
            ));
        }
        if self.u_init.len() != self.order {
            return Err(Error::InvalidParameter(format!(
                "{} initial states for order {}",
                self.u_init.len(),
                self.order
            )));
        }
        if self.u_init.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidParameter("non-finite initial state".into()));
        }
        if self.order == 1 && self.u_init[0].abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "|u_0| = {} must be below 1",
                self.u_init[0].abs()
            )));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::InvalidParameter(
                "blow-up threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaDeltaRun {
    pub bits: Vec<i8>,
    /// `u_n` for each sample, if retained.
    pub states: Option<Vec<f64>>,
    pub u_sup: f64,
    pub argmax_index: usize,
    /// Steps where the quantizer argument was exactly zero (`sign(0) = +1`).
    pub sign_zero_events: usize,
    /// Oversampling rate the samples were taken at, when known.
    pub lambda: Option<f64>,
}

impl SigmaDeltaRun {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn tagged(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub u_sup: f64,
    pub argmax_index: usize,
}

fn check_samples(samples: &[f64]) -> Result<()> {
    for (index, &value) in samples.iter().enumerate() {
        if !(value.abs() < 1.0) {
            return Err(Error::SampleOutOfRange { index, value });
        }
    }
    Ok(())
}

#[inline]
fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

/// Tracks the running sup-norm with first-index tie-breaking.
#[derive(Default)]
struct SupTracker {
    sup: f64,
    argmax: usize,
    seen: bool,
}

impl SupTracker {
    #[inline]
    fn push(&mut self, index: usize, u: f64) {
        let a = u.abs();
        if !self.seen || a > self.sup {
            self.sup = a;
            self.argmax = index;
            self.seen = true;
        }
    }
}

/// First-order greedy sigma-delta:
/// `q_n = sign(u_{n-1} + f_n)`, `u_n = u_{n-1} + f_n - q_n`.
pub fn run_first_order(samples: &[f64], u0: f64) -> Result<SigmaDeltaRun> {
    check_samples(samples)?;
    if !(u0.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "|u_0| = {} must be below 1",
            u0.abs()
        )));
    }
    let mut bits = Vec::with_capacity(samples.len());
    let mut states = Vec::with_capacity(samples.len());
    let mut sup = SupTracker::default();
    let mut sign_zero_events = 0;
    let mut u = u0;
    for (n, &f) in samples.iter().enumerate() {
        let v = u + f;
        if v == 0.0 {
            sign_zero_events += 1;
        }
        let q = sign(v);
        u = v - f64::from(q);
        bits.push(q);
        states.push(u);
        sup.push(n, u);
    }
    Ok(SigmaDeltaRun {
        bits,
        states: Some(states),
        u_sup: sup.sup,
        argmax_index: sup.argmax,
        sign_zero_events,
        lambda: None,
    })
}

/// `C(r, j) (-1)^j` for `j = 1..=r`.
fn difference_weights(r: usize) -> Vec<f64> {
    let mut weights = Vec::with_capacity(r);
    let mut binom = 1.0f64;
    for j in 1..=r {
        binom = binom * (r + 1 - j) as f64 / j as f64;
        weights.push(if j % 2 == 0 { binom } else { -binom });
    }
    weights
}

/// General order-`r` recursion with the configured quantization rule.
pub fn run_rth_order(samples: &[f64], cfg: &QuantizerConfig) -> Result<SigmaDeltaRun> {
    cfg.validate()?;
    check_samples(samples)?;
    let r = cfg.order;
    let weights = difference_weights(r);
    // history[j - 1] holds u_{n-j}.
    let mut history = cfg.u_init.clone();
    let mut bits = Vec::with_capacity(samples.len());
    let mut states = cfg.retain_states.then(|| Vec::with_capacity(samples.len()));
    let mut sup = SupTracker::default();
    let mut sign_zero_events = 0;

    for (n, &f) in samples.iter().enumerate() {
        let v = match cfg.rule {
            QuantizerRule::FirstOrderGreedy => history[0] + f,
            QuantizerRule::GreedyRthOrder => {
                let mut acc = f;
                for (w, u) in weights.iter().zip(&history) {
                    acc -= w * u;
                }
                acc
            }
        };
        if v == 0.0 {
            sign_zero_events += 1;
        }
        let q = sign(v);
        let u = v - f64::from(q);
        if !(u.abs() <= cfg.blowup_threshold) {
            return Err(Error::Instability {
                index: n,
                value: u.abs(),
                threshold: cfg.blowup_threshold,
            });
        }
        history.rotate_right(1);
        history[0] = u;
        bits.push(q);
        if let Some(s) = states.as_mut() {
            s.push(u);
        }
        sup.push(n, u);
    }
    Ok(SigmaDeltaRun {
        bits,
        states,
        u_sup: sup.sup,
        argmax_index: sup.argmax,
        sign_zero_events,
        lambda: None,
    })
}

pub fn stability_report(run: &SigmaDeltaRun) -> Result<StabilityReport> {
    if run.is_empty() {
        return Err(Error::InvalidParameter("empty sigma-delta run".into()));
    }
    Ok(StabilityReport {
        u_sup: run.u_sup,
        argmax_index: run.argmax_index,
    })
}

/// Largest `|(Delta^r u)_n - (f_n - q_n)|` over the run, recomputing the
/// `r`-th backward difference from the stored states and `u_init`.
pub fn state_identity_residual(
    samples: &[f64],
    run: &SigmaDeltaRun,
    u_init: &[f64],
) -> Result<f64> {
    let states = run
        .states
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("run did not retain states".into()))?;
    let r = u_init.len();
    if samples.len() != states.len() {
        return Err(Error::InvalidParameter(
            "sample/state length mismatch".into(),
        ));
    }
    let extended: Vec<f64> = u_init.iter().rev().chain(states).copied().collect();
    let weights = difference_weights(r);
    let mut worst = 0.0f64;
    for (n, (&f, &q)) in samples.iter().zip(&run.bits).enumerate() {
        let k = n + r;
        let mut diff = extended[k];
        for (j, w) in weights.iter().enumerate() {
            diff += w * extended[k - j - 1];
        }
        let target = f - f64::from(q);
        worst = worst.max((diff - target).abs());
    }
    Ok(worst)
}

/// Raw debug export: one byte per bit, `0x00` for -1 and `0x01` for +1.
pub fn bits_to_bytes(bits: &[i8]) -> Vec<u8> {
    bits.iter().map(|&q| u8::from(q > 0)).collect()
}

pub fn bits_from_bytes(bytes: &[u8]) -> Result<Vec<i8>> {
    bytes
        .iter()
        .enumerate()
        .map(|(index, &b)| match b {
            0 => Ok(-1),
            1 => Ok(1),
            other => Err(Error::NotABit {
                index,
                value: i64::from(other),
            }),
        })
        .collect()
}
