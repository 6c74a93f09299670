//! Prefix code construction over a block alphabet.
//!
//! Codes are represented by per-block codeword lengths only; the actual bit
//! patterns never matter for age or error quantities, and any Kraft-feasible
//! length vector is realizable as a prefix code. A length of 0 marks a block
//! that carries no codeword because its probability is zero.

mod huffman;
mod hull;
mod package_merge;

pub use huffman::huffman;
pub use hull::{hull_codebooks, HullPoint, HULL_TOLERANCE};
pub use package_merge::package_merge_linear;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::source::{enumerate_types, BlockDistribution, SourceDistribution};

/// Codeword lengths for one prefix code over the block alphabet.
///
/// Entry `i` is the length in bits of block `i`'s codeword under the
/// lexicographic block order; 0 means the block has no codeword (only legal
/// for zero-probability blocks, in which case the Kraft sum may fall short
/// of 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengths {
    blocklength: u32,
    lengths: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct CodebookJson {
    blocklength: u32,
    lengths: Vec<u32>,
    block_order: String,
}

impl CodeLengths {
    pub fn new(blocklength: u32, lengths: Vec<u32>) -> Result<Self> {
        if blocklength == 0 {
            return Err(Error::InvalidBlocklength);
        }
        Ok(Self {
            blocklength,
            lengths,
        })
    }

    /// Parses `{"blocklength": B, "lengths": [...], "block_order": "lexicographic"}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: CodebookJson = serde_json::from_str(s)?;
        if raw.block_order != "lexicographic" {
            return Err(Error::UnsupportedBlockOrder {
                got: raw.block_order,
            });
        }
        Self::new(raw.blocklength, raw.lengths)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&CodebookJson {
            blocklength: self.blocklength,
            lengths: self.lengths.clone(),
            block_order: "lexicographic".to_owned(),
        })
        .expect("serializing a codebook cannot fail")
    }

    pub fn blocklength(&self) -> u32 {
        self.blocklength
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn max_len(&self) -> u32 {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    /// Kraft sum over assigned codewords, `sum 2^-l_i`.
    pub fn kraft_sum(&self) -> f64 {
        self.lengths
            .iter()
            .filter(|&&l| l > 0)
            .map(|&l| (-(l as f64)).exp2())
            .sum()
    }
}

/// First and second moments of the codeword length under a block distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeStats {
    pub mean_len: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl CodeStats {
    pub fn new(mean_len: f64, second_moment: f64) -> Self {
        debug_assert!(second_moment >= mean_len * mean_len - 1e-12);
        Self {
            mean_len,
            second_moment,
            variance: (second_moment - mean_len * mean_len).max(0.0),
        }
    }
}

/// Weights of the linear penalty `alpha * E[L] + beta * E[L^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl PenaltyWeights {
    /// Penalty that reduces to minimum expected length (a Huffman code).
    pub const MEAN_ONLY: Self = Self {
        alpha: 1.0,
        beta: 0.0,
    };
    /// Penalty that reduces to the minimum second moment code.
    pub const SECOND_MOMENT_ONLY: Self = Self {
        alpha: 0.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let valid = alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite();
        if !valid || (alpha == 0.0 && beta == 0.0) {
            return Err(Error::InvalidPenalty { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    pub fn evaluate(&self, stats: &CodeStats) -> f64 {
        self.alpha * stats.mean_len + self.beta * stats.second_moment
    }
}

/// Exact weighted moments of the codeword length.
///
/// Fails if the code and distribution are indexed inconsistently or a
/// positive-probability block has no codeword.
pub fn code_stats(code: &CodeLengths, blockdist: &BlockDistribution) -> Result<CodeStats> {
    if code.len() != blockdist.len() {
        return Err(Error::LengthMismatch {
            lengths: code.len(),
            blocks: blockdist.len(),
        });
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for (i, (&l, &p)) in code.lengths().iter().zip(blockdist.probs()).enumerate() {
        if p > 0.0 {
            if l == 0 {
                return Err(Error::MissingCodeword { index: i });
            }
            let lf = l as f64;
            mean += p * lf;
            second += p * lf * lf;
        }
    }
    Ok(CodeStats::new(mean, second))
}

/// Upper bound on the average status age of a stable block coding system:
/// `Var[L] / (2R(BR - E[L])) + E[L]/R + B/2`, or infinity when `E[L] >= BR`.
pub fn age_penalty(stats: &CodeStats, blocklength: u32, rate: f64) -> f64 {
    assert!(rate > 0.0, "rate must be positive");
    let capacity = blocklength as f64 * rate;
    if stats.mean_len < capacity {
        stats.variance / (2.0 * rate * (capacity - stats.mean_len))
            + stats.mean_len / rate
            + blocklength as f64 / 2.0
    } else {
        f64::INFINITY
    }
}

/// Searches the lower-left hull of achievable `(E[L], E[L^2])` pairs for the
/// code minimizing the age penalty at blocklength `B` and rate `R`.
///
/// `l_max` defaults to one less than the number of positive-probability
/// blocks, which is always feasible. Ties in the penalty go to the smaller
/// `E[L]`. Fails when no code is stable at this `(B, R)`.
pub fn age_optimal_code(
    dist: &SourceDistribution,
    blocklength: u32,
    rate: f64,
    l_max: Option<u32>,
) -> Result<(CodeLengths, f64)> {
    if rate <= 0.0 || !rate.is_finite() {
        return Err(Error::InvalidRate { rate });
    }
    let blockdist = BlockDistribution::new(dist, blocklength)?;
    let l_max = l_max.unwrap_or_else(|| default_l_max(&blockdist));
    let hull = hull_codebooks(&blockdist, l_max)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, point) in hull.iter().enumerate() {
        let penalty = age_penalty(&point.stats, blocklength, rate);
        match best {
            Some((_, b)) if penalty >= b => {}
            _ if penalty.is_finite() => best = Some((i, penalty)),
            _ => {}
        }
    }
    match best {
        Some((i, penalty)) => Ok((hull[i].code.clone(), penalty)),
        None => Err(Error::NoStableCode {
            min_mean_len: hull[0].stats.mean_len,
            capacity: blocklength as f64 * rate,
        }),
    }
}

/// Largest codeword length that is always Kraft-feasible: one less than the
/// number of positive-probability blocks (at least 1).
pub fn default_l_max(blockdist: &BlockDistribution) -> u32 {
    (blockdist.positive_blocks().saturating_sub(1)).max(1) as u32
}

/// Prefix code that describes each block by a fixed-length header naming its
/// type class followed by the index of the block within that class.
///
/// Every block of type `t` gets length `ceil(log2 #types) + ceil(log2 |t|)`,
/// so lengths depend only on the type. The fixed-length header makes the code
/// prefix-free regardless of the payload lengths.
pub fn type_code(m: usize, blocklength: u32) -> Result<CodeLengths> {
    let types = enumerate_types(m, blocklength);
    let header = ceil_log2(types.len() as u64);
    let n = (m as u128)
        .checked_pow(blocklength)
        .ok_or(Error::BlockTableTooLarge {
            required: u128::MAX,
            cap: crate::source::DEFAULT_BLOCK_CAP,
        })?;
    if n > crate::source::DEFAULT_BLOCK_CAP as u128 {
        return Err(Error::BlockTableTooLarge {
            required: n,
            cap: crate::source::DEFAULT_BLOCK_CAP,
        });
    }
    let mut lengths = Vec::with_capacity(n as usize);
    for index in 0..n as usize {
        let mut counts = vec![0u32; m];
        let mut rest = index;
        for _ in 0..blocklength {
            counts[rest % m] += 1;
            rest /= m;
        }
        let class_size = crate::source::multinomial(&counts);
        lengths.push(header + ceil_log2(class_size));
    }
    CodeLengths::new(blocklength, lengths)
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros().min(64)
}
