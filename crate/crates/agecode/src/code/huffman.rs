//! Huffman codeword lengths via the sorted two-queue construction.

use crate::error::{Error, Result};
use crate::source::BlockDistribution;

use super::CodeLengths;

/// Codeword lengths of a Huffman code over the positive-probability blocks.
///
/// Achieves the minimum expected length with Kraft equality. Ties between
/// merge candidates are broken deterministically (leaves before packages,
/// lower block index first), so repeated calls return identical lengths.
pub fn huffman(blockdist: &BlockDistribution) -> Result<CodeLengths> {
    let active: Vec<(usize, f64)> = blockdist
        .probs()
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > 0.0)
        .map(|(i, &p)| (i, p))
        .collect();
    if active.len() < 2 {
        return Err(Error::TooFewCodewords { got: active.len() });
    }

    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by(|&a, &b| {
        active[a]
            .1
            .partial_cmp(&active[b].1)
            .unwrap()
            .then(active[a].0.cmp(&active[b].0))
    });

    // Nodes 0..n-1 are leaves in ascending weight order; merges append.
    let n = active.len();
    let mut weight: Vec<f64> = order.iter().map(|&o| active[o].1).collect();
    let mut children: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut next_leaf = 0usize;
    let mut next_merge = n;
    let mut merged_head = n; // front of the queue of merged nodes

    for _ in 0..n - 1 {
        let take = |weight: &[f64], next_leaf: &mut usize, merged_head: &mut usize| {
            let leaf_ok = *next_leaf < n;
            let merged_ok = *merged_head < weight.len();
            let use_leaf = match (leaf_ok, merged_ok) {
                (true, true) => weight[*next_leaf] <= weight[*merged_head],
                (true, false) => true,
                (false, true) => false,
                (false, false) => unreachable!("ran out of nodes to merge"),
            };
            if use_leaf {
                *next_leaf += 1;
                *next_leaf - 1
            } else {
                *merged_head += 1;
                *merged_head - 1
            }
        };
        let a = take(&weight, &mut next_leaf, &mut merged_head);
        let b = take(&weight, &mut next_leaf, &mut merged_head);
        weight.push(weight[a] + weight[b]);
        children.push(Some((a, b)));
        next_merge += 1;
    }

    // Depth of every leaf, walking down from the root (the last merge).
    let mut depth = vec![0u32; weight.len()];
    let mut stack = vec![next_merge - 1];
    while let Some(node) = stack.pop() {
        if let Some((a, b)) = children[node] {
            depth[a] = depth[node] + 1;
            depth[b] = depth[node] + 1;
            stack.push(a);
            stack.push(b);
        }
    }

    let mut lengths = vec![0u32; blockdist.len()];
    for (sorted_pos, &o) in order.iter().enumerate() {
        lengths[active[o].0] = depth[sorted_pos];
    }
    CodeLengths::new(blockdist.blocklength(), lengths)
}
