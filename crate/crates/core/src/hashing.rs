//! SimHash state codes and visit counting.
//!
//! An observation `s` is mapped to `phi(s) = sgn(A g(s))`, a `bits`-long sign code,
//! where `A` has i.i.d. standard normal entries and `g` is a fixed preprocessor.
//! Nearby observations share most bits: two vectors at angle `theta` disagree on
//! a given bit with probability `theta / pi`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed map from a raw observation to the vector that gets projected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preprocessor {
    /// `g(s) = s`.
    Identity,
    /// `g(s) = (2s - 1, 1)`: centres unit-range coordinates and appends a bias
    /// component, so the random hyperplanes cut the coordinate box in general
    /// position instead of all passing through one corner.
    #[default]
    CenteredWithBias,
}

impl Preprocessor {
    pub fn output_dim(self, input_dim: usize) -> usize {
        match self {
            Preprocessor::Identity => input_dim,
            Preprocessor::CenteredWithBias => input_dim + 1,
        }
    }

    fn apply_into(self, observation: &[f64], out: &mut Vec<f64>) {
        out.clear();
        match self {
            Preprocessor::Identity => out.extend_from_slice(observation),
            Preprocessor::CenteredWithBias => {
                out.extend(observation.iter().map(|&x| 2.0 * x - 1.0));
                out.push(1.0);
            }
        }
    }
}

/// A sign code. Bit `j` is set iff projection `j` was non-negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HashCode {
    bits: usize,
    words: Box<[u64]>,
}

impl HashCode {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (j, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[j / 64] |= 1 << (j % 64);
        }
        Self { bits: bits.len(), words: words.into_boxed_slice() }
    }

    pub fn len(&self) -> usize {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn bit(&self, j: usize) -> bool {
        assert!(j < self.bits, "bit {j} out of range for a {}-bit code", self.bits);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn hamming_distance(&self, other: &Self) -> u32 {
        assert_eq!(self.bits, other.bits, "codes of different length");
        self.words.iter().zip(other.words.iter()).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    /// Hex rendering of the bit string `b_0 b_1 ... b_{n-1}`, most significant
    /// nibble first, zero-padded at the end to a whole number of nibbles.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.bits.div_ceil(4));
        for nibble in 0..self.bits.div_ceil(4) {
            let mut v = 0u8;
            for i in 0..4 {
                let j = nibble * 4 + i;
                v <<= 1;
                if j < self.bits && self.bit(j) {
                    v |= 1;
                }
            }
            write!(out, "{v:x}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SimHashEncoder {
    bits: usize,
    input_dim: usize,
    preprocessor: Preprocessor,
    /// Row-major `bits x D` matrix, where `D = preprocessor.output_dim(input_dim)`.
    projection: Vec<f64>,
}

impl SimHashEncoder {
    /// Draws the projection matrix from `rng`.
    pub fn new<R: Rng + ?Sized>(
        bits: usize,
        input_dim: usize,
        preprocessor: Preprocessor,
        rng: &mut R,
    ) -> Result<Self> {
        check_shape(bits, input_dim)?;
        let d = preprocessor.output_dim(input_dim);
        let projection = (0..bits * d).map(|_| rng.sample(StandardNormal)).collect();
        Ok(Self { bits, input_dim, preprocessor, projection })
    }

    /// Uses a caller-supplied row-major projection matrix.
    pub fn from_projection(
        bits: usize,
        input_dim: usize,
        preprocessor: Preprocessor,
        projection: Vec<f64>,
    ) -> Result<Self> {
        check_shape(bits, input_dim)?;
        let expected = bits * preprocessor.output_dim(input_dim);
        if projection.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: projection.len() });
        }
        Ok(Self { bits, input_dim, preprocessor, projection })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn projection(&self) -> &[f64] {
        &self.projection
    }

    pub fn encode(&self, observation: &[f64]) -> Result<HashCode> {
        let mut scratch = Vec::new();
        self.encode_with(observation, &mut scratch)
    }

    /// Like [`encode`](Self::encode), reusing `scratch` for the preprocessed vector.
    pub fn encode_with(&self, observation: &[f64], scratch: &mut Vec<f64>) -> Result<HashCode> {
        if observation.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, actual: observation.len() });
        }
        self.preprocessor.apply_into(observation, scratch);
        let d = scratch.len();
        let mut words = vec![0u64; self.bits.div_ceil(64)];
        for (j, row) in self.projection.chunks_exact(d).enumerate() {
            let dot: f64 = row.iter().zip(scratch.iter()).map(|(a, x)| a * x).sum();
            // sgn(0) counts as +1
            if dot >= 0.0 {
                words[j / 64] |= 1 << (j % 64);
            }
        }
        Ok(HashCode { bits: self.bits, words: words.into_boxed_slice() })
    }
}

fn check_shape(bits: usize, input_dim: usize) -> Result<()> {
    if bits == 0 {
        return Err(Error::InvalidParameter("SimHash needs at least one bit".into()));
    }
    if input_dim == 0 {
        return Err(Error::InvalidParameter("SimHash input dimension must be positive".into()));
    }
    Ok(())
}

/// Exact visit counts per code.
#[derive(Debug, Clone, Default)]
pub struct HashCountTable {
    counts: HashMap<HashCode, u64>,
    total_inserts: u64,
}

impl HashCountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts the visit, then returns `1 / sqrt(n(code))`. The first visit
    /// therefore yields 1.
    pub fn record_and_bonus(&mut self, code: HashCode) -> f64 {
        let n = self.counts.entry(code).or_insert(0);
        *n += 1;
        self.total_inserts += 1;
        1.0 / (*n as f64).sqrt()
    }

    pub fn count(&self, code: &HashCode) -> u64 {
        self.counts.get(code).copied().unwrap_or(0)
    }

    pub fn distinct_codes(&self) -> usize {
        self.counts.len()
    }

    pub fn total_inserts(&self) -> u64 {
        self.total_inserts
    }

    pub fn clear(&mut self) {
        self.counts.clear();
        self.total_inserts = 0;
    }

    /// Writes `<hex-code> <count>` lines sorted by code.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut rows: Vec<(String, u64)> = self.counts.iter().map(|(c, &n)| (c.to_hex(), n)).collect();
        rows.sort_unstable();
        for (hex, n) in rows {
            writeln!(out, "{hex} {n}")?;
        }
        Ok(())
    }

    pub fn dump_to_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_dump(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::StreamRng;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn identity_projection_reads_signs() {
        let enc =
            SimHashEncoder::from_projection(2, 2, Preprocessor::Identity, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let code = enc.encode(&[3.0, -2.0]).unwrap();
        assert!(code.bit(0));
        assert!(!code.bit(1));
        assert_eq!(code.to_hex(), "8");
    }

    #[test]
    fn zero_projection_is_positive() {
        let enc =
            SimHashEncoder::from_projection(2, 2, Preprocessor::Identity, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let code = enc.encode(&[0.0, 0.0]).unwrap();
        assert_eq!(code, HashCode::from_bits(&[true, true]));
    }

    #[test]
    fn dimension_mismatch_names_lengths() {
        let mut rng = StreamRng::seed_from_u64(1);
        let enc = SimHashEncoder::new(16, 3, Preprocessor::Identity, &mut rng).unwrap();
        match enc.encode(&[1.0, 2.0]) {
            Err(Error::DimensionMismatch { expected: 3, actual: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = SimHashEncoder::new(256, 4, Preprocessor::CenteredWithBias, &mut StreamRng::seed_from_u64(9)).unwrap();
        let b = SimHashEncoder::new(256, 4, Preprocessor::CenteredWithBias, &mut StreamRng::seed_from_u64(9)).unwrap();
        assert_eq!(a.projection(), b.projection());
        assert_eq!(a.projection().len(), 256 * 5);
        let obs = [0.1, 0.5, 0.9, 0.0];
        assert_eq!(a.encode(&obs).unwrap(), a.encode(&obs).unwrap());
        assert_eq!(a.encode(&obs).unwrap().len(), 256);
    }

    #[test]
    fn bonus_law() {
        let mut table = HashCountTable::new();
        let code = HashCode::from_bits(&[true, false, true]);
        let bonuses: Vec<f64> = (0..100).map(|_| table.record_and_bonus(code.clone())).collect();
        assert_eq!(bonuses[0], 1.0);
        assert_eq!(bonuses[3], 0.5);
        assert_eq!(bonuses[99], 0.1);
        assert_eq!(table.count(&code), 100);
    }

    #[test]
    fn hex_of_long_codes() {
        let mut bits = vec![false; 70];
        bits[0] = true;
        bits[69] = true;
        let code = HashCode::from_bits(&bits);
        let hex = code.to_hex();
        assert_eq!(hex.len(), 18);
        assert!(hex.starts_with('8'));
        assert!(hex.ends_with('4'));
    }

    #[test]
    fn dump_is_sorted() {
        let mut table = HashCountTable::new();
        let a = HashCode::from_bits(&[true, true, true, true]);
        let b = HashCode::from_bits(&[false, false, false, true]);
        table.record_and_bonus(a.clone());
        table.record_and_bonus(b.clone());
        table.record_and_bonus(a);
        let mut out = Vec::new();
        table.write_dump(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1 1\nf 2\n");
    }

    proptest! {
        #[test]
        fn counts_are_order_free(mut codes in prop::collection::vec(0u8..16, 1..60), seed in any::<u64>()) {
            let to_code = |v: u8| HashCode::from_bits(&[(v & 1) != 0, (v & 2) != 0, (v & 4) != 0, (v & 8) != 0]);
            let mut forward = HashCountTable::new();
            for &c in &codes {
                forward.record_and_bonus(to_code(c));
            }
            let mut rng = StreamRng::seed_from_u64(seed);
            use rand::seq::SliceRandom;
            codes.shuffle(&mut rng);
            let mut shuffled = HashCountTable::new();
            for &c in &codes {
                shuffled.record_and_bonus(to_code(c));
            }
            for v in 0u8..16 {
                prop_assert_eq!(forward.count(&to_code(v)), shuffled.count(&to_code(v)));
            }
            prop_assert_eq!(forward.total_inserts(), codes.len() as u64);
            prop_assert_eq!(forward.counts.values().sum::<u64>(), forward.total_inserts());
        }
    }
}
