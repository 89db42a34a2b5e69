//! Fixed-length bit strings.
//!
//! Bits are packed most-significant-first; unused bits of the final byte are
//! always zero so that derived equality, hashing and ordering agree with the
//! bit-level lexicographic order.

use std::fmt;
use std::ops::{BitXor, Range};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            s.set(i, true);
        }
        s
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self::from_bytes(bytes, len)
    }

    /// Wraps packed bytes, clearing any padding bits past `len`.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Self {
        bytes.resize(len.div_ceil(8), 0);
        let rem = len % 8;
        if rem != 0 {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - rem);
        }
        Self { bytes, len }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut bytes = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % 8 == 0 {
                bytes.push(0);
            }
            if bit {
                bytes[len / 8] |= 0x80 >> (len % 8);
            }
            len += 1;
        }
        Self { bytes, len }
    }

    /// Parses a string of `0`/`1` characters; `_` and spaces are ignored.
    pub fn parse_binary(s: &str) -> Result<Self, Error> {
        s.chars()
            .filter(|c| *c != '_' && *c != ' ')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid binary digit {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_bools)
    }

    /// Big-endian encoding of the low `len` bits of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Self::from_bools((0..len).rev().map(|i| i < 64 && (value >> i) & 1 == 1))
    }

    pub fn to_u64(&self) -> u64 {
        self.iter().fold(0u64, |acc, b| (acc << 1) | u64::from(b))
    }

    /// Decodes hex into exactly `len` bits. The hex string must have
    /// `ceil(len / 8)` bytes and zero padding.
    pub fn from_hex(hex_str: &str, len: usize) -> Result<Self, Error> {
        let bytes = hex::decode(hex_str).map_err(|e| Error::Parse(format!("bad hex: {e}")))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "hex carries {} bytes, expected {} for {len} bits",
                bytes.len(),
                len.div_ceil(8)
            )));
        }
        let s = Self::from_bytes(bytes.clone(), len);
        if s.bytes != bytes {
            return Err(Error::Parse("non-zero padding bits in hex bit string".into()));
        }
        Ok(s)
    }

    /// Decodes hex into the minimal bit string holding it (4 bits per digit),
    /// e.g. for command-line messages.
    pub fn from_hex_digits(hex_str: &str) -> Result<Self, Error> {
        let bits = hex_str.chars().map(|c| {
            c.to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))
        });
        let mut out = Vec::with_capacity(hex_str.len() * 4);
        for d in bits {
            let d = d?;
            out.extend((0..4).rev().map(|i| (d >> i) & 1 == 1));
        }
        Ok(Self::from_bools(out))
    }

    /// Hex of the packed bytes.
    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    /// One hex digit per 4 bits, left-padded with zero bits to a multiple of 4.
    pub fn to_hex_digits(&self) -> String {
        let pad = (4 - self.len % 4) % 4;
        let padded: Vec<bool> = std::iter::repeat_n(false, pad).chain(self.iter()).collect();
        padded
            .chunks(4)
            .map(|c| {
                let v = c.iter().fold(0u32, |acc, b| (acc << 1) | u32::from(*b));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        if bit {
            self.bytes[i / 8] |= 0x80 >> (i % 8);
        } else {
            self.bytes[i / 8] &= !(0x80 >> (i % 8));
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn slice(&self, range: Range<usize>) -> Self {
        assert!(range.end <= self.len);
        Self::from_bools(range.map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &Self) -> Self {
        if self.len.is_multiple_of(8) {
            let mut bytes = self.bytes.clone();
            bytes.extend_from_slice(&other.bytes);
            return Self {
                bytes,
                len: self.len + other.len,
            };
        }
        Self::from_bools(self.iter().chain(other.iter()))
    }

    pub fn concat_all<'a, I: IntoIterator<Item = &'a BitString>>(parts: I) -> Self {
        parts
            .into_iter()
            .fold(BitString::zeros(0), |acc, p| acc.concat(p))
    }

    /// Splits into consecutive chunks of `width` bits; `len` must be a multiple.
    pub fn chunks(&self, width: usize) -> Result<Vec<BitString>, Error> {
        if width == 0 || !self.len.is_multiple_of(width) {
            return Err(Error::Length {
                what: "bit string chunking",
                expected: width,
                actual: self.len,
            });
        }
        Ok((0..self.len / width)
            .map(|i| self.slice(i * width..(i + 1) * width))
            .collect())
    }

    pub fn xor(&self, other: &Self) -> Result<Self, Error> {
        if self.len != other.len {
            return Err(Error::Length {
                what: "xor operands",
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(Self {
            bytes: self.bytes.iter().zip(&other.bytes).map(|(a, b)| a ^ b).collect(),
            len: self.len,
        })
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    fn bitxor(self, rhs: Self) -> BitString {
        self.xor(rhs).expect("xor of bit strings with different lengths")
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString({} bits, 0x{})", self.len, self.to_hex())
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BitStringRepr {
    len: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BitStringRepr {
            len: self.len,
            hex: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BitStringRepr::deserialize(deserializer)?;
        BitString::from_hex(&repr.hex, repr.len).map_err(serde::de::Error::custom)
    }
}

/// `x · r = XOR_i x_i r_i`.
pub fn inner_product_bits(x: &BitString, r: &BitString) -> Result<bool, Error> {
    if x.len != r.len {
        return Err(Error::Length {
            what: "inner product operands",
            expected: x.len,
            actual: r.len,
        });
    }
    let ones: u32 = x
        .bytes
        .iter()
        .zip(&r.bytes)
        .map(|(a, b)| (a & b).count_ones())
        .sum();
    Ok(ones % 2 == 1)
}
