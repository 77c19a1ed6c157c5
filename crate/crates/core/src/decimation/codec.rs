//! Fixed-width packing of decimated codewords.
//!
//! File layout:
//!
//! | bytes  | field                   |
//! |--------|-------------------------|
//! | 0..4   | magic `SDDC`            |
//! | 4      | version (1)             |
//! | 5      | order `r` (u8)          |
//! | 6..10  | `rho` (u32 LE)          |
//! | 10..18 | `lambda` (f64 LE)       |
//! | 18..26 | codeword count (u64 LE) |
//! | 26..   | payload                 |
//!
//! Each odd value `v` maps to `(v + (2 rho + 1)^r) / 2`, written MSB first in
//! `w = ceil(log2((2 rho + 1)^r + 1))` bits; the last byte is zero padded.
//! The stream's index offset is not part of the format; decoding yields
//! offset 0.

use std::path::Path;

use super::{DecimatedStream, DecimationParams};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SDDC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 26;

/// Bits needed for indices `0..=full_scale`.
pub fn codeword_width(full_scale: i64) -> u32 {
    debug_assert!(full_scale >= 1);
    64 - (full_scale as u64).leading_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamHeader {
    pub version: u8,
    pub order: u8,
    pub rho: u32,
    pub lambda: f64,
    pub count: u64,
}

impl StreamHeader {
    pub fn params(&self) -> Result<DecimationParams> {
        DecimationParams::new(self.rho, u32::from(self.order), self.lambda)
            .map_err(|e| Error::Corrupt(format!("header parameters: {e}")))
    }

    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(self.version);
        out.push(self.order);
        out.extend_from_slice(&self.rho.to_le_bytes());
        out.extend_from_slice(&self.lambda.to_le_bytes());
        out.extend_from_slice(&self.count.to_le_bytes());
    }

    fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Corrupt(format!(
                "{} bytes is shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::Corrupt(format!("unsupported version {}", bytes[4])));
        }
        let le4 = |i: usize| <[u8; 4]>::try_from(&bytes[i..i + 4]).unwrap();
        let le8 = |i: usize| <[u8; 8]>::try_from(&bytes[i..i + 8]).unwrap();
        Ok(Self {
            version: bytes[4],
            order: bytes[5],
            rho: u32::from_le_bytes(le4(6)),
            lambda: f64::from_le_bytes(le8(10)),
            count: u64::from_le_bytes(le8(18)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackedBitstream {
    pub header: StreamHeader,
    pub payload: Vec<u8>,
}

impl PackedBitstream {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        self.header.write(&mut out);
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses the header; payload consistency is checked by [`decode`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = StreamHeader::parse(bytes)?;
        Ok(Self {
            header,
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }
}

fn payload_len(count: u64, width: u32) -> Result<usize> {
    let bits = u128::from(count) * u128::from(width);
    usize::try_from(bits.div_ceil(8))
        .map_err(|_| Error::Corrupt(format!("count {count} is implausibly large")))
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u128,
    filled: u32,
}

impl BitWriter {
    fn with_capacity(n: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(n),
            acc: 0,
            filled: 0,
        }
    }

    fn put(&mut self, value: u64, width: u32) {
        self.acc = (self.acc << width) | u128::from(value);
        self.filled += width;
        while self.filled >= 8 {
            self.filled -= 8;
            self.bytes.push((self.acc >> self.filled) as u8);
        }
        self.acc &= (1u128 << self.filled) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.bytes.push((self.acc << (8 - self.filled)) as u8);
        }
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    acc: u128,
    filled: u32,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self {
            bytes,
            pos: 0,
            acc: 0,
            filled: 0,
        }
    }

    fn take(&mut self, width: u32) -> Option<u64> {
        while self.filled < width {
            let b = *self.bytes.get(self.pos)?;
            self.pos += 1;
            self.acc = (self.acc << 8) | u128::from(b);
            self.filled += 8;
        }
        self.filled -= width;
        let v = (self.acc >> self.filled) as u64;
        self.acc &= (1u128 << self.filled) - 1;
        Some(v)
    }

    fn leftover(&self) -> u128 {
        self.acc
    }
}

pub fn encode(stream: &DecimatedStream) -> Result<PackedBitstream> {
    stream.params.validate()?;
    let full = stream.params.full_scale();
    let width = codeword_width(full);
    let count = stream.values.len() as u64;
    let mut w = BitWriter::with_capacity(payload_len(count, width)?);
    for (k, &v) in stream.values.iter().enumerate() {
        if v.rem_euclid(2) != 1 || v.abs() > full {
            return Err(Error::Corrupt(format!(
                "value {v} at position {k} is not an odd integer in [-{full}, {full}]"
            )));
        }
        w.put(((v + full) / 2) as u64, width);
    }
    Ok(PackedBitstream {
        header: StreamHeader {
            version: VERSION,
            order: stream.params.order as u8,
            rho: stream.params.rho,
            lambda: stream.params.lambda,
            count,
        },
        payload: w.finish(),
    })
}

pub fn decode(bs: &PackedBitstream) -> Result<DecimatedStream> {
    if bs.header.version != VERSION {
        return Err(Error::Corrupt(format!(
            "unsupported version {}",
            bs.header.version
        )));
    }
    let params = bs.header.params()?;
    let full = params.full_scale();
    let width = codeword_width(full);
    let expected = payload_len(bs.header.count, width)?;
    if bs.payload.len() < expected {
        return Err(Error::Corrupt(format!(
            "truncated payload: {} of {expected} bytes",
            bs.payload.len()
        )));
    }
    if bs.payload.len() > expected {
        return Err(Error::Corrupt(format!(
            "{} trailing payload bytes",
            bs.payload.len() - expected
        )));
    }
    let mut r = BitReader::new(&bs.payload);
    let mut values = Vec::with_capacity(bs.header.count as usize);
    for k in 0..bs.header.count {
        let idx = r.take(width).expect("payload length checked") as i64;
        if idx > full {
            return Err(Error::Corrupt(format!(
                "codeword {idx} at position {k} exceeds {full}"
            )));
        }
        values.push(2 * idx - full);
    }
    if r.leftover() != 0 {
        return Err(Error::Corrupt("non-zero padding bits".into()));
    }
    Ok(DecimatedStream {
        values,
        params,
        index_offset: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(values: Vec<i64>, rho: u32, order: u32) -> DecimatedStream {
        DecimatedStream {
            values,
            params: DecimationParams::new(rho, order, 100.0).unwrap(),
            index_offset: 0,
        }
    }

    #[test]
    fn widths() {
        assert_eq!(codeword_width(9), 4);
        assert_eq!(codeword_width(3), 2);
        assert_eq!(codeword_width(5), 3);
        assert_eq!(codeword_width(7), 3);
        assert_eq!(codeword_width(8), 4);
        assert_eq!(codeword_width(1 << 40), 41);
    }

    #[test]
    fn minimum_maps_to_zero_codeword() {
        let bs = encode(&stream(vec![-9, -9], 1, 2)).unwrap();
        assert_eq!(bs.payload, vec![0x00]);
        let bs = encode(&stream(vec![9, -9, 1], 1, 2)).unwrap();
        // indices 9, 0, 5 -> 1001 0000 0101 (padded)
        assert_eq!(bs.payload, vec![0b1001_0000, 0b0101_0000]);
    }

    #[test]
    fn header_layout_is_bit_exact() {
        let bs = encode(&stream(vec![1, 3, -1], 1, 1)).unwrap();
        let bytes = bs.to_bytes();
        assert_eq!(&bytes[0..4], b"SDDC");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 1);
        assert_eq!(&bytes[6..10], &1u32.to_le_bytes());
        assert_eq!(&bytes[10..18], &100f64.to_le_bytes());
        assert_eq!(&bytes[18..26], &3u64.to_le_bytes());
        assert_eq!(bytes.len(), HEADER_LEN + 1);
        // indices 2, 3, 1 at width 2
        assert_eq!(bytes[26], 0b10_11_01_00);
        let back = decode(&PackedBitstream::from_bytes(&bytes).unwrap()).unwrap();
        assert_eq!(back.values, vec![1, 3, -1]);
    }

    #[test]
    fn rejects_even_or_out_of_range() {
        assert!(encode(&stream(vec![2], 1, 1)).is_err());
        assert!(encode(&stream(vec![5], 1, 1)).is_err());
    }

    #[test]
    fn decode_errors() {
        let bytes = encode(&stream(vec![1, 3, -1, -3, 1], 1, 1))
            .unwrap()
            .to_bytes();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(PackedBitstream::from_bytes(&bad).is_err());

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(PackedBitstream::from_bytes(&bad).is_err());

        let bs = PackedBitstream::from_bytes(&bytes[..bytes.len() - 1]).unwrap();
        assert!(matches!(decode(&bs), Err(Error::Corrupt(m)) if m.contains("truncated")));

        assert!(PackedBitstream::from_bytes(&bytes[..10]).is_err());
    }

    #[test]
    fn decode_rejects_codeword_above_full_scale() {
        // rho = 1, r = 2: width 4, full scale 9; codeword 15 is invalid.
        let bs = PackedBitstream {
            header: StreamHeader {
                version: VERSION,
                order: 2,
                rho: 1,
                lambda: 12.0,
                count: 2,
            },
            payload: vec![0xF0],
        };
        assert!(matches!(decode(&bs), Err(Error::Corrupt(m)) if m.contains("exceeds")));
    }

    #[test]
    fn empty_stream() {
        let bs = encode(&stream(vec![], 2, 3)).unwrap();
        assert!(bs.payload.is_empty());
        assert_eq!(bs.header.count, 0);
        let back = decode(&bs).unwrap();
        assert!(back.values.is_empty());
    }
}
