//! Block-wise linear error correction by syndrome decoding. The default
//! Hamming(7,4) code corrects one flip per block via a precomputed
//! coset-leader table; larger custom codes load from plain-text parity
//! matrices.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LinearCode {
    n_block: usize,
    k_block: usize,
    t: usize,
    /// Parity-check rows as bit masks over one block.
    parity: Vec<u64>,
    /// Coset leader (minimum-weight error) per syndrome value.
    coset_leaders: Vec<u64>,
}

impl LinearCode {
    pub fn new(n_block: usize, parity: Vec<u64>) -> Result<Self> {
        if n_block == 0 || n_block > 15 {
            return Err(Error::InvalidParam(format!(
                "block length {n_block} outside 1..=15"
            )));
        }
        let m = parity.len();
        if m == 0 || m >= n_block {
            return Err(Error::InvalidParam(format!(
                "{m} parity rows for block length {n_block}"
            )));
        }
        let mask = (1u64 << n_block) - 1;
        if parity.iter().any(|row| row & !mask != 0) {
            return Err(Error::InvalidParam("parity row wider than block".into()));
        }
        if row_rank(&parity) != m {
            return Err(Error::InvalidParam("parity-check matrix not full row rank".into()));
        }

        // Coset leaders: scan error patterns in order of increasing weight,
        // keeping the first pattern seen per syndrome. While every pattern
        // of weight <= w lands on a fresh syndrome, weight-w errors are
        // uniquely correctable; t is the last such w.
        let mut leaders = vec![u64::MAX; 1 << m];
        let mut t = 0;
        let mut weight_ok = true;
        for w in 0..=n_block {
            let mut fresh = true;
            for e in 0..1u64 << n_block {
                if e.count_ones() as usize != w {
                    continue;
                }
                let s = block_syndrome(&parity, e);
                if leaders[s as usize] == u64::MAX {
                    leaders[s as usize] = e;
                } else {
                    fresh = false;
                }
            }
            if weight_ok && fresh {
                t = w;
            } else {
                weight_ok = false;
            }
        }
        Ok(LinearCode {
            n_block,
            k_block: n_block - m,
            t,
            parity,
            coset_leaders: leaders,
        })
    }

    /// The classic single-error-correcting code: parity-check columns are
    /// the binary representations of 1..=7, so a single flip at position j
    /// has syndrome j+1.
    pub fn hamming_7_4() -> Self {
        let parity = (0..3)
            .map(|bit| {
                (0..7)
                    .filter(|j| (j + 1) >> bit & 1 == 1)
                    .fold(0u64, |acc, j| acc | 1 << j)
            })
            .collect();
        Self::new(7, parity).expect("fixed construction is valid")
    }

    /// Parse a parity-check matrix from lines of 0/1 characters.
    pub fn from_parity_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.is_empty() {
            return Err(Error::Parse("empty parity matrix".into()));
        }
        let n_block = lines[0].len();
        let mut parity = Vec::new();
        for line in &lines {
            if line.len() != n_block {
                return Err(Error::Parse("ragged parity matrix".into()));
            }
            let mut row = 0u64;
            for (j, c) in line.chars().enumerate() {
                match c {
                    '1' => row |= 1 << j,
                    '0' => {}
                    _ => return Err(Error::Parse(format!("bad matrix character {c:?}"))),
                }
            }
            parity.push(row);
        }
        Self::new(n_block, parity)
    }

    pub fn block_len(&self) -> usize {
        self.n_block
    }

    pub fn message_len(&self) -> usize {
        self.k_block
    }

    pub fn correctable_errors(&self) -> usize {
        self.t
    }

    pub fn syndrome_len(&self) -> usize {
        self.n_block - self.k_block
    }

    fn blocks_for(&self, bits: usize) -> usize {
        bits.div_ceil(self.n_block).max(1)
    }

    fn block_value(&self, x: &BitString, b: usize) -> u64 {
        let mut v = 0u64;
        for j in 0..self.n_block {
            let i = b * self.n_block + j;
            if i < x.len() && x.get(i) {
                v |= 1 << j;
            }
        }
        v
    }

    /// Per-block syndromes of x (zero-padded to a block multiple),
    /// concatenated.
    pub fn syndrome(&self, x: &BitString) -> SyndromeBundle {
        let blocks = self.blocks_for(x.len());
        let m = self.syndrome_len();
        let mut bits = BitString::zeros(blocks * m);
        for b in 0..blocks {
            let s = block_syndrome(&self.parity, self.block_value(x, b));
            for bit in 0..m {
                bits.set(b * m + bit, s >> bit & 1 == 1);
            }
        }
        SyndromeBundle {
            total_bits: bits.len(),
            bits,
        }
    }

    /// Shift x_noisy into the reference coset and subtract the nearest
    /// coset leader per block. Exact whenever each block carries at most t
    /// errors; beyond that the result is a best effort and may be wrong.
    pub fn decode(&self, x_noisy: &BitString, syn_ref: &SyndromeBundle) -> Result<BitString> {
        let blocks = self.blocks_for(x_noisy.len());
        let m = self.syndrome_len();
        if syn_ref.total_bits != blocks * m {
            return Err(Error::InvalidParam(format!(
                "syndrome bundle has {} bits, expected {}",
                syn_ref.total_bits,
                blocks * m
            )));
        }
        let mut out = x_noisy.clone();
        for b in 0..blocks {
            let mut s_ref = 0u64;
            for bit in 0..m {
                if syn_ref.bits.get(b * m + bit) {
                    s_ref |= 1 << bit;
                }
            }
            let s = block_syndrome(&self.parity, self.block_value(x_noisy, b)) ^ s_ref;
            let e = self.coset_leaders[s as usize];
            for j in 0..self.n_block {
                let i = b * self.n_block + j;
                if e >> j & 1 == 1 && i < out.len() {
                    out.flip(i);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeBundle {
    pub bits: BitString,
    pub total_bits: usize,
}

fn block_syndrome(parity: &[u64], block: u64) -> u64 {
    parity
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, row)| acc | u64::from((row & block).count_ones() % 2) << i)
}

fn row_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let mask = 1u64 << bit;
        if let Some(p) = (rank..rows.len()).find(|&p| rows[p] & mask != 0) {
            rows.swap(rank, p);
            for q in 0..rows.len() {
                if q != rank && rows[q] & mask != 0 {
                    rows[q] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Leakage m * h(p_error) of a capacity-achieving syndrome, in bits.
pub fn syndrome_bits_asymptotic(m: usize, p_error: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p_error) {
        return Err(Error::InvalidParam(format!(
            "error rate {p_error} outside [0, 1/2)"
        )));
    }
    Ok(crate::security::binary_entropy(p_error) * m as f64)
}
