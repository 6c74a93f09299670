//! Package-merge solver for prefix coding under linear penalties.
//!
//! Minimizing `alpha * E[L] + beta * E[L^2]` over Kraft-feasible length
//! assignments reduces to a coin collector's problem: block `i` contributes
//! one item per level `l` in `1..=l_max` of width `2^-l` and cost
//! `p_i * (f(l) - f(l-1))` with `f(l) = alpha*l + beta*l^2`. Because `f` is
//! convex and increasing, the per-block incremental costs are nondecreasing
//! in `l`, and the cheapest item set of total width `n - 1` selects, for each
//! block, a prefix of levels whose count is the block's codeword length.
//!
//! The classic greedy solves the coin collector's problem: starting from the
//! deepest level, pair adjacent entries into packages and merge them with the
//! next level's items; at the top, the first `2(n - 1)` entries of the
//! level-1 list form the optimal set.

use crate::error::{Error, Result};
use crate::source::BlockDistribution;

use super::{CodeLengths, PenaltyWeights};

const NO_BLOCK: u32 = u32::MAX;
const SOLVER_ITEM_CAP: u128 = 20_000_000;

#[derive(Clone, Copy)]
struct Entry {
    cost: f64,
    /// Block index for singletons, `NO_BLOCK` for packages.
    block: u32,
    /// Children indices into the next-deeper level's list (packages only).
    left: u32,
    right: u32,
}

/// Codeword lengths minimizing `alpha * E[L] + beta * E[L^2]` subject to the
/// Kraft inequality and `length <= l_max` for every positive-probability
/// block.
///
/// Requires `2^l_max >= n` where `n` is the number of positive-probability
/// blocks; ties are resolved by preferring lower block indices, so the result
/// is deterministic. Over an all-positive distribution the returned lengths
/// satisfy Kraft with equality.
pub fn package_merge_linear(
    blockdist: &BlockDistribution,
    weights: &PenaltyWeights,
    l_max: u32,
) -> Result<CodeLengths> {
    PenaltyWeights::new(weights.alpha, weights.beta)?;
    let active: Vec<(usize, f64)> = blockdist
        .probs()
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > 0.0)
        .map(|(i, &p)| (i, p))
        .collect();
    let n = active.len();
    if n < 2 {
        return Err(Error::TooFewCodewords { got: n });
    }
    let min_l = usize::BITS - (n - 1).leading_zeros(); // ceil(log2 n)
    if l_max < min_l {
        return Err(Error::LengthLimitTooSmall {
            l_max,
            blocks: n,
            min: min_l,
        });
    }
    let items = n as u128 * l_max as u128;
    if items > SOLVER_ITEM_CAP {
        return Err(Error::SolverTooLarge {
            items,
            cap: SOLVER_ITEM_CAP,
        });
    }

    // Ascending by probability with index tiebreak; incremental costs share
    // this order at every level because they scale by the same positive factor.
    let mut sorted = active.clone();
    sorted.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    let level_cost = |l: u32| weights.alpha + weights.beta * (2 * l - 1) as f64;
    let singletons = |l: u32| -> Vec<Entry> {
        let c = level_cost(l);
        sorted
            .iter()
            .map(|&(i, p)| Entry {
                cost: p * c,
                block: i as u32,
                left: 0,
                right: 0,
            })
            .collect()
    };

    // lists[k] holds the merged list for level l_max - k.
    let mut lists: Vec<Vec<Entry>> = Vec::with_capacity(l_max as usize);
    lists.push(singletons(l_max));
    for l in (1..l_max).rev() {
        let prev = lists.last().unwrap();
        let singles = singletons(l);
        let mut merged = Vec::with_capacity(singles.len() + prev.len() / 2);
        let mut si = 0;
        let mut pi = 0;
        while si < singles.len() || pi + 1 < prev.len() {
            let pack_cost = if pi + 1 < prev.len() {
                Some(prev[pi].cost + prev[pi + 1].cost)
            } else {
                None
            };
            let take_single = match (si < singles.len(), pack_cost) {
                (true, Some(pc)) => singles[si].cost <= pc,
                (true, None) => true,
                (false, _) => false,
            };
            if take_single {
                merged.push(singles[si]);
                si += 1;
            } else {
                merged.push(Entry {
                    cost: pack_cost.unwrap(),
                    block: NO_BLOCK,
                    left: pi as u32,
                    right: pi as u32 + 1,
                });
                pi += 2;
            }
        }
        lists.push(merged);
    }

    let top = lists.len() - 1;
    let need = 2 * (n - 1);
    assert!(
        lists[top].len() >= need,
        "coin collector ran out of width; feasibility check is wrong"
    );

    let mut lengths = vec![0u32; blockdist.len()];
    let mut stack: Vec<(usize, usize)> = (0..need).map(|e| (top, e)).collect();
    while let Some((k, e)) = stack.pop() {
        let entry = lists[k][e];
        if entry.block == NO_BLOCK {
            stack.push((k - 1, entry.left as usize));
            stack.push((k - 1, entry.right as usize));
        } else {
            lengths[entry.block as usize] += 1;
        }
    }

    for &(i, _) in &active {
        assert!(lengths[i] >= 1, "block {i} selected no items");
    }
    let code = CodeLengths::new(blockdist.blocklength(), lengths)?;
    debug_assert!(code.kraft_sum() <= 1.0 + 1e-9);
    Ok(code)
}
