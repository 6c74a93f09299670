//! Oracles shared by the integration suites: exhaustive enumeration over
//! Kraft-feasible length assignments, exact integer moment sums, and a dense
//! balance-equation solve for the clipped buffer walk. Everything here is
//! independent of the library's solvers.

#![allow(dead_code)]

use agecode::SourceDistribution;
use rand::Rng;

/// Normalizes integer weights into a source distribution. Zero weights are
/// legal and become zero-probability symbols.
pub fn dist_from_weights(weights: &[u64]) -> SourceDistribution {
    let total: u64 = weights.iter().sum();
    SourceDistribution::new(
        weights
            .iter()
            .map(|&w| w as f64 / total as f64)
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

/// Exact weighted length sums `(sum w_i l_i, sum w_i l_i^2)` over symbols
/// with positive weight.
pub fn moment_sums(weights: &[u64], lengths: &[u32]) -> (u128, u128) {
    assert_eq!(weights.len(), lengths.len());
    let mut s1 = 0u128;
    let mut s2 = 0u128;
    for (&w, &l) in weights.iter().zip(lengths) {
        if w > 0 {
            assert!(l >= 1, "positive-weight symbol has no codeword");
            s1 += w as u128 * l as u128;
            s2 += w as u128 * (l as u128 * l as u128);
        }
    }
    (s1, s2)
}

/// Calls `f` on every length vector in `[1, l_max]^n` satisfying the Kraft
/// inequality, in lexicographic order.
pub fn for_each_kraft_feasible(n: usize, l_max: u32, f: &mut impl FnMut(&[u32])) {
    assert!(l_max <= 60);
    let unit = 1u64 << l_max;
    let mut lengths = vec![0u32; n];
    fn rec(
        lengths: &mut Vec<u32>,
        pos: usize,
        width_used: u64,
        l_max: u32,
        unit: u64,
        f: &mut impl FnMut(&[u32]),
    ) {
        let remaining = lengths.len() - pos;
        // Every remaining symbol adds at least one unit of width.
        if width_used + remaining as u64 > unit {
            return;
        }
        if pos == lengths.len() {
            f(lengths);
            return;
        }
        for l in 1..=l_max {
            lengths[pos] = l;
            rec(lengths, pos + 1, width_used + (1 << (l_max - l)), l_max, unit, f);
        }
    }
    rec(&mut lengths, 0, 0, l_max, unit, f);
}

/// Exhaustive minimum of `alpha * S1 + beta * S2` for each `(alpha, beta)`
/// pair, over all Kraft-feasible assignments with lengths at most `l_max`.
/// All weights must be positive.
pub fn brute_force_min_penalties(
    weights: &[u64],
    l_max: u32,
    pairs: &[(f64, f64)],
) -> Vec<f64> {
    assert!(weights.iter().all(|&w| w > 0));
    let mut best = vec![f64::INFINITY; pairs.len()];
    for_each_kraft_feasible(weights.len(), l_max, &mut |lengths| {
        let (s1, s2) = moment_sums(weights, lengths);
        for (i, &(alpha, beta)) in pairs.iter().enumerate() {
            let penalty = alpha * s1 as f64 + beta * s2 as f64;
            if penalty < best[i] {
                best[i] = penalty;
            }
        }
    });
    best
}

/// Exhaustive minimum of `sum w_i l_i^2` subject to Kraft and `l <= l_max`.
pub fn brute_force_min_second_moment(weights: &[u64], l_max: u32) -> u128 {
    let mut best = u128::MAX;
    for_each_kraft_feasible(weights.len(), l_max, &mut |lengths| {
        let (_, s2) = moment_sums(weights, lengths);
        best = best.min(s2);
    });
    best
}

/// Stationary distribution of the buffer walk truncated to states `0..=top`:
/// from state `j`, move to `max(j - 2, 0)` with probability `q` and to
/// `min(j + 1, top)` otherwise. Solved by dense Gaussian elimination on the
/// balance equations plus normalization.
#[allow(clippy::needless_range_loop)]
pub fn solve_truncated_stationary(q: f64, top: usize) -> Vec<f64> {
    let n = top + 1;
    let mut a = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        a[j.saturating_sub(2)][j] += q;
        a[(j + 1).min(top)][j] += 1.0 - q;
    }
    for j in 0..n {
        a[j][j] -= 1.0;
    }
    let mut b = vec![0.0; n];
    for j in 0..n {
        a[n - 1][j] = 1.0;
    }
    b[n - 1] = 1.0;
    gaussian_solve(a, b)
}

#[allow(clippy::needless_range_loop)]
fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-300, "singular system");
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Random positive weights in `1..=max_weight`.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize, max_weight: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(1..=max_weight)).collect()
}

/// Blockwise product weights of an i.i.d. integer-weight source; the block
/// distribution of `dist_from_weights(weights)` at this blocklength has
/// exactly these relative weights.
pub fn product_weights(weights: &[u64], blocklength: u32) -> Vec<u64> {
    let mut out = vec![1u64];
    for _ in 0..blocklength {
        let mut next = Vec::with_capacity(out.len() * weights.len());
        for &acc in &out {
            for &w in weights {
                next.push(acc * w);
            }
        }
        out = next;
    }
    out
}
