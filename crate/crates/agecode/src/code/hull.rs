//! Parametric search over the lower-left boundary of the achievable
//! `(E[L], E[L^2])` region.
//!
//! All codebooks of a block alphabet occupy a convex region in the moment
//! plane. Seeding with the minimum-`E[L]` code (weights `(1, 0)`) and the
//! minimum-`E[L^2]` code (weights `(0, 1)`), each adjacent pair `(C1, C2)`
//! spawns a probe with weights
//! `alpha' = E[L^2](C1) - E[L^2](C2)`, `beta' = E[L](C2) - E[L](C1)`,
//! the normal of the segment joining them. When the probe's penalty improves
//! on the segment by more than the tolerance, a new boundary code lies
//! strictly between and both sub-segments recurse.

use crate::error::Result;
use crate::source::BlockDistribution;

use super::{code_stats, package_merge_linear, CodeLengths, CodeStats, PenaltyWeights};

/// Minimum absolute penalty improvement for accepting a new hull point.
/// Integer lengths and rational probabilities make smaller gaps noise.
pub const HULL_TOLERANCE: f64 = 1e-12;

/// One code on the lower-left boundary: no other returned point weakly
/// dominates it in both moments.
#[derive(Debug, Clone)]
pub struct HullPoint {
    pub code: CodeLengths,
    pub stats: CodeStats,
}

/// All distinct codes on the lower-left boundary of the moment region,
/// ordered by strictly increasing `E[L]` (hence strictly decreasing
/// `E[L^2]`).
pub fn hull_codebooks(blockdist: &BlockDistribution, l_max: u32) -> Result<Vec<HullPoint>> {
    let solve = |w: &PenaltyWeights| -> Result<HullPoint> {
        let code = package_merge_linear(blockdist, w, l_max)?;
        let stats = code_stats(&code, blockdist)?;
        Ok(HullPoint { code, stats })
    };

    let first = solve(&PenaltyWeights::MEAN_ONLY)?;
    let last = solve(&PenaltyWeights::SECOND_MOMENT_ONLY)?;

    let mut points = vec![first.clone(), last.clone()];
    refine(&solve, &first, &last, &mut points, 0)?;

    points.sort_by(|a, b| {
        a.stats
            .mean_len
            .partial_cmp(&b.stats.mean_len)
            .unwrap()
            .then(a.stats.second_moment.partial_cmp(&b.stats.second_moment).unwrap())
    });
    // Keep the lower-left staircase: drop duplicates and dominated points.
    let mut boundary: Vec<HullPoint> = Vec::with_capacity(points.len());
    for p in points {
        while let Some(prev) = boundary.last() {
            let dominated = prev.stats.mean_len >= p.stats.mean_len - HULL_TOLERANCE
                && prev.stats.second_moment >= p.stats.second_moment - HULL_TOLERANCE;
            if dominated {
                boundary.pop();
            } else {
                break;
            }
        }
        let redundant = boundary.last().is_some_and(|prev| {
            p.stats.second_moment >= prev.stats.second_moment - HULL_TOLERANCE
        });
        if !redundant {
            boundary.push(p);
        }
    }
    Ok(boundary)
}

fn refine<F>(
    solve: &F,
    left: &HullPoint,
    right: &HullPoint,
    points: &mut Vec<HullPoint>,
    depth: u32,
) -> Result<()>
where
    F: Fn(&PenaltyWeights) -> Result<HullPoint>,
{
    // Each level splits on a new integer-moment code; 64 exceeds any
    // reachable boundary size and guards against pathological fp cycles.
    if depth > 64 {
        return Ok(());
    }
    let alpha = left.stats.second_moment - right.stats.second_moment;
    let beta = right.stats.mean_len - left.stats.mean_len;
    if alpha <= HULL_TOLERANCE || beta <= HULL_TOLERANCE {
        return Ok(()); // coincident or degenerate segment
    }
    let weights = PenaltyWeights::new(alpha, beta)?;
    let probe = solve(&weights)?;
    let segment_penalty = weights.evaluate(&left.stats);
    if weights.evaluate(&probe.stats) < segment_penalty - HULL_TOLERANCE {
        refine(solve, left, &probe, points, depth + 1)?;
        points.push(probe.clone());
        refine(solve, &probe, right, points, depth + 1)?;
    }
    Ok(())
}
