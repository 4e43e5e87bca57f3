//! Packed bit strings. Bit 0 is the least significant bit of the first
//! word; hex serialization is little-endian by nibble and carries the exact
//! length, so round-trips preserve strings whose length is not a multiple
//! of four.

use std::fmt;

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut s = Self::zeros(len);
        for w in &mut s.words {
            *w = rng.gen();
        }
        s.mask_tail();
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        BitString {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the AND with another string of the same length.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Bits at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            out.set(k, self.get(i));
        }
        out
    }

    /// Zero-extension to `n` bits.
    pub fn pad_to(&self, n: usize) -> Result<Self> {
        if self.len > n {
            return Err(Error::InvalidParam(format!(
                "cannot pad a {}-bit string to {n} bits",
                self.len
            )));
        }
        let mut out = Self::zeros(n);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out.mask_tail();
        Ok(out)
    }

    pub fn truncate(&self, n: usize) -> Self {
        assert!(n <= self.len);
        let mut out = BitString {
            words: self.words[..n.div_ceil(64)].to_vec(),
            len: n,
        };
        out.mask_tail();
        out
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in 0..self.len {
            out.set(i, self.get(i));
        }
        for i in 0..other.len {
            out.set(self.len + i, other.get(i));
        }
        out
    }

    /// Value of the whole string as an integer; requires len <= 64.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64, "string too long for a word");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut s = Self::zeros(len);
        if len > 0 {
            s.words[0] = value;
            s.mask_tail();
        }
        s
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut out = String::with_capacity(nibbles + 8);
        for k in 0..nibbles {
            let word = self.words.get(k / 16).copied().unwrap_or(0);
            let nib = (word >> ((k % 16) * 4)) & 0xf;
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        format!("{}:{out}", self.len)
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let (len_part, hex_part) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in bitstring {text:?}")))?;
        let len: usize = len_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad length in bitstring {text:?}")))?;
        if hex_part.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "bitstring {text:?} has {} nibbles, expected {}",
                hex_part.len(),
                len.div_ceil(4)
            )));
        }
        let mut s = Self::zeros(len);
        for (k, c) in hex_part.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))? as u64;
            s.words[k / 16] |= nib << ((k % 16) * 4);
        }
        let mut check = s.clone();
        check.mask_tail();
        if check.words != s.words {
            return Err(Error::Parse(format!("set bits beyond declared length in {text:?}")));
        }
        Ok(s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_hex())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        BitString::from_hex(&text).map_err(D::Error::custom)
    }
}
