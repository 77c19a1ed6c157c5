//! Decimation: `r`-fold centered block averaging of width `2 rho + 1`,
//! followed by keeping every `(2 rho + 1)`-th output.
//!
//! For a `+-1` bit sequence the unnormalized `r`-fold block sum is a sum of
//! `(2 rho + 1)^r` signs (with multiplicity), hence an odd integer in
//! `[-(2 rho + 1)^r, (2 rho + 1)^r]`. Those integers are what gets stored and
//! packed; the `(2 rho + 1)^{-r}` normalization happens at reconstruction.

pub mod codec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block half-width `rho`, order `r` and the input oversampling rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecimationParams {
    pub rho: u32,
    pub order: u32,
    pub lambda: f64,
}

impl DecimationParams {
    pub fn new(rho: u32, order: u32, lambda: f64) -> Result<Self> {
        let p = Self { rho, order, lambda };
        p.validate()?;
        Ok(p)
    }

    /// Checks the parameters are usable: `rho >= 1`, `r >= 1`, the full
    /// scale fits comfortably in an `i64`, and `lambda' > 1`.
    ///
    /// The stricter `rho > 1` hypothesis of the error bound is checked
    /// separately by [`satisfies_bound_hypothesis`](Self::satisfies_bound_hypothesis).
    pub fn validate(&self) -> Result<()> {
        if self.rho == 0 {
            return Err(Error::InvalidParameter("rho must be at least 1".into()));
        }
        if self.order == 0 {
            return Err(Error::InvalidParameter("order must be at least 1".into()));
        }
        if self.order > u32::from(u8::MAX) {
            return Err(Error::InvalidParameter(format!(
                "order {} does not fit the stream header",
                self.order
            )));
        }
        match i64::from(self.block_len()).checked_pow(self.order) {
            Some(v) if v <= 1i64 << 62 => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "(2 rho + 1)^r overflows for rho = {}, r = {}",
                    self.rho, self.order
                )))
            }
        }
        if !(self.lambda.is_finite() && self.lambda > f64::from(self.block_len())) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must exceed 2 rho + 1 = {} so that lambda' > 1",
                self.lambda,
                self.block_len()
            )));
        }
        Ok(())
    }

    /// `rho` in `(1, (lambda - 1) / 2)`.
    pub fn satisfies_bound_hypothesis(&self) -> bool {
        self.rho > 1 && f64::from(self.rho) < (self.lambda - 1.0) / 2.0
    }

    /// `2 rho + 1`.
    pub fn block_len(&self) -> u32 {
        2 * self.rho + 1
    }

    /// `(2 rho + 1)^r`, the largest magnitude of an unnormalized sum.
    pub fn full_scale(&self) -> i64 {
        i64::from(self.block_len()).pow(self.order)
    }

    pub fn lambda_prime(&self) -> f64 {
        self.lambda / f64::from(self.block_len())
    }

    /// Samples consumed on each side of an output index.
    pub fn half_support(&self) -> i64 {
        i64::from(self.rho) * i64::from(self.order)
    }
}

/// Decimated codewords: `values[k]` is the unnormalized `r`-fold block sum
/// centered on original index `index_offset + (2 rho + 1) k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimatedStream {
    pub values: Vec<i64>,
    pub params: DecimationParams,
    pub index_offset: i64,
}

impl DecimatedStream {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_index_offset(mut self, index_offset: i64) -> Self {
        self.index_offset = index_offset;
        self
    }

    /// Index on the decimated lattice (time `m / lambda'`) of `values[k]`.
    pub fn decimated_index(&self, k: usize) -> i64 {
        self.index_offset
            .div_euclid(i64::from(self.params.block_len()))
            + k as i64
    }

    /// Checks parity, range and lattice alignment.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self
            .index_offset
            .rem_euclid(i64::from(self.params.block_len()))
            != 0
        {
            return Err(Error::Corrupt(format!(
                "index offset {} is not a multiple of {}",
                self.index_offset,
                self.params.block_len()
            )));
        }
        let full = self.params.full_scale();
        for (k, &v) in self.values.iter().enumerate() {
            if v.rem_euclid(2) != 1 || v.abs() > full {
                return Err(Error::Corrupt(format!(
                    "value {v} at position {k} is not an odd integer in [-{full}, {full}]"
                )));
            }
        }
        Ok(())
    }

    /// `values / (2 rho + 1)^r`, each in `[-1, 1]`.
    pub fn normalized(&self) -> Vec<f64> {
        let scale = self.params.full_scale() as f64;
        self.values.iter().map(|&v| v as f64 / scale).collect()
    }
}

/// `(S^r_rho h)_n` on the valid interior: output `i` is centered on input
/// index `i + rho r`, so the result is `2 rho r` shorter than `h`.
pub fn partial_sum(h: &[f64], rho: usize, r: usize) -> Result<Vec<f64>> {
    if rho == 0 {
        return Err(Error::InvalidParameter("rho must be at least 1".into()));
    }
    let needed = 2 * rho * r + 1;
    if h.len() < needed {
        return Err(Error::WindowTooShort {
            len: h.len(),
            needed,
        });
    }
    let width = 2 * rho + 1;
    let inv = 1.0 / width as f64;
    let mut cur = h.to_vec();
    for _ in 0..r {
        cur = cur
            .windows(width)
            .map(|w| w.iter().sum::<f64>() * inv)
            .collect();
    }
    Ok(cur)
}

/// Unnormalized `r`-fold block sums of a `+-1` sequence in exact integer
/// arithmetic; layout as in [`partial_sum`].
pub fn integer_block_sums(q: &[i8], rho: usize, r: usize) -> Result<Vec<i64>> {
    check_bits(q)?;
    let needed = 2 * rho * r + 1;
    if q.len() < needed {
        return Err(Error::WindowTooShort {
            len: q.len(),
            needed,
        });
    }
    let width = 2 * rho + 1;
    let mut cur: Vec<i64> = q.iter().map(|&b| i64::from(b)).collect();
    for _ in 0..r {
        let mut prefix = Vec::with_capacity(cur.len() + 1);
        prefix.push(0i64);
        let mut acc = 0i64;
        for &v in &cur {
            acc += v;
            prefix.push(acc);
        }
        cur = (0..=cur.len() - width)
            .map(|i| prefix[i + width] - prefix[i])
            .collect();
    }
    Ok(cur)
}

fn check_bits(q: &[i8]) -> Result<()> {
    match q.iter().position(|&b| b != 1 && b != -1) {
        Some(index) => Err(Error::NotABit {
            index,
            value: i64::from(q[index]),
        }),
        None => Ok(()),
    }
}

/// Decimates a bit sequence whose first entry sits at original index
/// `first_index`. Outputs are kept at original indices that are multiples
/// of `2 rho + 1` and whose full `r`-fold window lies inside the input.
pub fn decimate(q: &[i8], first_index: i64, params: &DecimationParams) -> Result<DecimatedStream> {
    params.validate()?;
    let rho = params.rho as usize;
    let r = params.order as usize;
    let sums = integer_block_sums(q, rho, r)?;
    let k = i64::from(params.block_len());
    let lo = first_index + params.half_support();
    let hi = lo + sums.len() as i64 - 1;
    let m_first = lo.div_euclid(k) + i64::from(lo.rem_euclid(k) != 0);
    let m_last = hi.div_euclid(k);
    let values = (m_first..=m_last)
        .map(|m| sums[(k * m - lo) as usize])
        .collect();
    Ok(DecimatedStream {
        values,
        params: *params,
        index_offset: k * m_first,
    })
}

/// Largest discrepancy between `S^r_rho Delta^r h` and
/// `(2 rho + 1)^{-r} Delta_rho^r h` on their common interior, where
/// `(Delta x)_n = x_n - x_{n-1}` and `(Delta_rho x)_n = x_{n+rho} - x_{n-rho-1}`.
pub fn difference_identity_check(h: &[f64], rho: usize, r: usize) -> Result<f64> {
    if rho == 0 {
        return Err(Error::InvalidParameter("rho must be at least 1".into()));
    }
    // Both sides are defined for n in [r (rho + 1), len - 1 - r rho].
    let needed = r * (2 * rho + 1) + 1;
    if h.len() < needed {
        return Err(Error::WindowTooShort {
            len: h.len(),
            needed,
        });
    }

    // Left: r backward differences (entry i <-> index i + r), then S^r.
    let mut diff = h.to_vec();
    for _ in 0..r {
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let left = partial_sum(&diff, rho, r)?; // entry i <-> index i + r + r rho

    // Right: r applications of Delta_rho. Each stage maps entry i of its
    // input (index i + s) to output index i + s + rho + 1.
    let mut right = h.to_vec();
    for _ in 0..r {
        right = right
            .windows(2 * rho + 2)
            .map(|w| w[2 * rho + 1] - w[0])
            .collect();
    }
    let scale = (2.0 * rho as f64 + 1.0).powi(-(r as i32));

    debug_assert_eq!(left.len(), right.len());
    Ok(left
        .iter()
        .zip(&right)
        .map(|(a, b)| (a - scale * b).abs())
        .fold(0.0, f64::max))
}

/// Bits per Nyquist interval needed for a decimated stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    /// `lambda' log2((2 rho + 1)^r + 1)`.
    pub exact_bits_per_nyquist: f64,
    /// `lambda' w` with `w` the integer codeword width.
    pub practical_bits_per_nyquist: f64,
    /// `lambda' log2(2 (lambda / lambda')^r)`.
    pub upper_bound: f64,
    pub codeword_bits: u32,
    pub alphabet_size: u64,
}

pub fn rate(params: &DecimationParams) -> Rate {
    let lp = params.lambda_prime();
    let full = params.full_scale();
    let w = codec::codeword_width(full);
    let ratio = params.lambda / lp;
    Rate {
        exact_bits_per_nyquist: lp * ((full + 1) as f64).log2(),
        practical_bits_per_nyquist: lp * f64::from(w),
        upper_bound: lp * (1.0 + f64::from(params.order) * ratio.log2()),
        codeword_bits: w,
        alphabet_size: full as u64 + 1,
    }
}
