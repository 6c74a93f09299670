//! Discrete memoryless sources, their block extensions, and type classes.
//!
//! A [`SourceDistribution`] holds the per-symbol probabilities of an i.i.d.
//! source. Grouping `B` consecutive symbols yields a [`BlockDistribution`]
//! over the `m^B` blocks, indexed lexicographically (the first symbol is the
//! most significant base-`m` digit). Type classes partition the block
//! alphabet by empirical symbol counts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of block-table entries (`m^B`).
pub const DEFAULT_BLOCK_CAP: usize = 1_000_000;

const PROB_SUM_TOL: f64 = 1e-12;

/// Shannon entropy of a probability vector, in bits, with `0 log 0 = 0`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Symbol probabilities of an i.i.d. source over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceDistribution {
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SourceDistributionJson {
    probs: Vec<f64>,
}

impl SourceDistribution {
    /// Validates and wraps a probability vector: at least two symbols, every
    /// entry nonnegative and finite, entries summing to 1 within 1e-12.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::AlphabetTooSmall {
                got: probs.len(),
                min: 2,
            });
        }
        for (index, &value) in probs.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::ProbabilitySum {
                sum,
                tol: PROB_SUM_TOL,
            });
        }
        Ok(Self { probs })
    }

    /// Parses `{"probs": [...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SourceDistributionJson = serde_json::from_str(s)?;
        Self::new(raw.probs)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&SourceDistributionJson {
            probs: self.probs.clone(),
        })
        .expect("serializing a probability vector cannot fail")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    /// Entropy in bits per symbol.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probs)
    }
}

/// Product distribution over blocks of `blocklength` source symbols.
///
/// Block index `i` encodes the symbol string in base `m`, most significant
/// digit first, so index order is lexicographic over symbol strings.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDistribution {
    symbols: usize,
    blocklength: u32,
    probs: Vec<f64>,
}

impl BlockDistribution {
    /// Builds the block extension with the default size cap.
    pub fn new(dist: &SourceDistribution, blocklength: u32) -> Result<Self> {
        Self::with_cap(dist, blocklength, DEFAULT_BLOCK_CAP)
    }

    /// Builds the block extension, failing if `m^B` exceeds `cap` entries.
    pub fn with_cap(dist: &SourceDistribution, blocklength: u32, cap: usize) -> Result<Self> {
        if blocklength == 0 {
            return Err(Error::InvalidBlocklength);
        }
        let m = dist.alphabet_size();
        let required = (m as u128)
            .checked_pow(blocklength)
            .ok_or(Error::BlockTableTooLarge {
                required: u128::MAX,
                cap,
            })?;
        if required > cap as u128 {
            return Err(Error::BlockTableTooLarge { required, cap });
        }
        let n = required as usize;
        let mut probs = vec![1.0; n];
        // Fill by iterated product; digit position b has stride m^(B-1-b).
        let mut stride = n;
        for _ in 0..blocklength {
            stride /= m;
            for (i, p) in probs.iter_mut().enumerate() {
                *p *= dist.probs()[(i / stride) % m];
            }
        }
        Ok(Self {
            symbols: m,
            blocklength,
            probs,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn blocklength(&self) -> u32 {
        self.blocklength
    }

    pub fn alphabet_size(&self) -> usize {
        self.symbols
    }

    /// Number of blocks, `m^B`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of blocks with positive probability.
    pub fn positive_blocks(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Decodes a block index into its symbol string, first symbol first.
    pub fn index_to_block(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.len());
        let mut digits = vec![0usize; self.blocklength as usize];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = rest % self.symbols;
            rest /= self.symbols;
        }
        digits
    }

    /// Inverse of [`Self::index_to_block`].
    pub fn block_to_index(&self, block: &[usize]) -> usize {
        debug_assert_eq!(block.len(), self.blocklength as usize);
        block.iter().fold(0, |acc, &d| acc * self.symbols + d)
    }

    /// Occurrence counts of each symbol in the block at `index`.
    pub fn block_counts(&self, index: usize) -> Vec<u32> {
        let mut counts = vec![0u32; self.symbols];
        let mut rest = index;
        for _ in 0..self.blocklength {
            counts[rest % self.symbols] += 1;
            rest /= self.symbols;
        }
        counts
    }

    /// Cumulative-probability sampler for this distribution.
    pub fn sampler(&self) -> BlockSampler {
        let mut cdf = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += p;
            cdf.push(acc);
        }
        BlockSampler { cdf }
    }
}

/// Inverse-CDF sampler over block indices; deterministic given the generator.
#[derive(Debug, Clone)]
pub struct BlockSampler {
    cdf: Vec<f64>,
}

impl BlockSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }
}

/// A type class: symbol occurrence counts summing to the blocklength, plus
/// the number of blocks realizing those counts (multinomial coefficient).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeClass {
    pub counts: Vec<u32>,
    pub class_size: u64,
}

/// Enumerates every composition of `blocklength` into `m` nonnegative parts,
/// in lexicographic order of the count vectors, with exact class sizes.
pub fn enumerate_types(m: usize, blocklength: u32) -> Vec<TypeClass> {
    assert!(m >= 2, "need at least 2 symbols");
    assert!(blocklength >= 1, "need blocklength >= 1");
    let mut out = Vec::new();
    let mut counts = vec![0u32; m];
    fill_types(&mut counts, 0, blocklength, &mut out);
    out
}

fn fill_types(counts: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<TypeClass>) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        out.push(TypeClass {
            counts: counts.clone(),
            class_size: multinomial(counts),
        });
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        fill_types(counts, pos + 1, remaining - c, out);
    }
}

/// Exact multinomial coefficient `(sum counts)! / prod counts_i!`.
pub fn multinomial(counts: &[u32]) -> u64 {
    let mut remaining: u64 = counts.iter().map(|&c| c as u64).sum();
    let mut result: u128 = 1;
    for &c in counts {
        result *= binomial(remaining, c as u64);
        remaining -= c as u64;
    }
    u64::try_from(result).expect("class size exceeds u64")
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_degenerate_is_zero() {
        let d = SourceDistribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(d.entropy_bits(), 0.0);
    }

    #[test]
    fn entropy_fair_coin_is_one_bit() {
        let d = SourceDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!((d.entropy_bits() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_three_symbol_example() {
        // -0.6 log2 0.6 - 0.3 log2 0.3 - 0.1 log2 0.1, evaluated directly.
        let d = SourceDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        assert!((d.entropy_bits() - 1.295461844238322).abs() < 1e-12);
    }

    #[test]
    fn validation_reports_offending_entry() {
        match SourceDistribution::new(vec![0.5, -0.1, 0.6]) {
            Err(Error::InvalidProbability { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected InvalidProbability, got {other:?}"),
        }
        assert!(matches!(
            SourceDistribution::new(vec![0.5, 0.6]),
            Err(Error::ProbabilitySum { .. })
        ));
        assert!(matches!(
            SourceDistribution::new(vec![1.0]),
            Err(Error::AlphabetTooSmall { .. })
        ));
    }

    #[test]
    fn json_roundtrip() {
        let d = SourceDistribution::from_json_str(r#"{"probs": [0.6, 0.3, 0.1]}"#).unwrap();
        assert_eq!(d.probs(), &[0.6, 0.3, 0.1]);
        let back = SourceDistribution::from_json_str(&d.to_json_string()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn block_identity_at_blocklength_one() {
        let d = SourceDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        let bd = BlockDistribution::new(&d, 1).unwrap();
        assert_eq!(bd.probs(), d.probs());
    }

    #[test]
    fn block_uniform_product() {
        let d = SourceDistribution::new(vec![0.5, 0.5]).unwrap();
        let bd = BlockDistribution::new(&d, 2).unwrap();
        assert_eq!(bd.probs(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn block_product_and_lexicographic_order() {
        // P(A) = a with a^2 = q; block AA must be index 0 with probability q.
        let a: f64 = 0.75;
        let d = SourceDistribution::new(vec![a, (1.0 - a) / 2.0, (1.0 - a) / 2.0]).unwrap();
        let bd = BlockDistribution::new(&d, 2).unwrap();
        assert_eq!(bd.len(), 9);
        assert!((bd.probs()[0] - a * a).abs() < 1e-15);
        let rest: f64 = bd.probs()[1..].iter().sum();
        assert!((rest - (1.0 - a * a)).abs() < 1e-12);
        // Index 5 is block (1, 2): p = 0.125 * 0.125.
        assert_eq!(bd.index_to_block(5), vec![1, 2]);
        assert_eq!(bd.block_to_index(&[1, 2]), 5);
        assert!((bd.probs()[5] - 0.125 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn block_cap_enforced() {
        let d = SourceDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            BlockDistribution::with_cap(&d, 21, 1 << 20),
            Err(Error::BlockTableTooLarge { .. })
        ));
    }

    #[test]
    fn block_probs_sum_to_one() {
        let d = SourceDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        for b in 1..=6 {
            let bd = BlockDistribution::new(&d, b).unwrap();
            let sum: f64 = bd.probs().iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "B={b}: sum={sum}");
        }
    }

    #[test]
    fn entropy_additivity_over_blocks() {
        let d = SourceDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        for b in 1..=5 {
            let bd = BlockDistribution::new(&d, b).unwrap();
            let per_symbol = entropy_bits(bd.probs()) / b as f64;
            assert!((per_symbol - d.entropy_bits()).abs() < 1e-9);
        }
    }

    #[test]
    fn types_ternary_blocklength_three() {
        let types = enumerate_types(3, 3);
        assert_eq!(types.len(), 10); // C(5, 2)
        let total: u64 = types.iter().map(|t| t.class_size).sum();
        assert_eq!(total, 27);
        let constant = types.iter().find(|t| t.counts == [3, 0, 0]).unwrap();
        assert_eq!(constant.class_size, 1);
        let mixed = types.iter().find(|t| t.counts == [1, 1, 1]).unwrap();
        assert_eq!(mixed.class_size, 6);
    }

    #[test]
    fn type_sizes_cover_the_block_alphabet() {
        for (m, b) in [(2usize, 7u32), (3, 4), (4, 3)] {
            let total: u64 = enumerate_types(m, b).iter().map(|t| t.class_size).sum();
            assert_eq!(total, (m as u64).pow(b));
        }
    }

    #[test]
    fn sampler_is_deterministic_and_degenerate_safe() {
        let d = SourceDistribution::new(vec![0.0, 1.0]).unwrap();
        let bd = BlockDistribution::new(&d, 2).unwrap();
        let sampler = bd.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(sampler.sample(&mut rng), 3); // block "11"
        }

        let d = SourceDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        let bd = BlockDistribution::new(&d, 2).unwrap();
        let sampler = bd.sampler();
        let draw = |seed: u64| -> Vec<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..1000).map(|_| sampler.sample(&mut rng)).collect()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn sampler_frequencies_match_probabilities() {
        let d = SourceDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        let bd = BlockDistribution::new(&d, 2).unwrap();
        let sampler = bd.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(20240216);
        let n = 1_000_000usize;
        let mut counts = vec![0u64; bd.len()];
        for _ in 0..n {
            counts[sampler.sample(&mut rng)] += 1;
        }
        for (i, &p) in bd.probs().iter().enumerate() {
            let f = counts[i] as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (f - p).abs() <= 4.0 * sigma,
                "index {i}: f={f}, p={p}, sigma={sigma}"
            );
        }
    }
}
