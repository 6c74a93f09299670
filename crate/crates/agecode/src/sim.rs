//! Discrete-event simulation of the encoder -> FIFO buffer -> decoder
//! pipeline: block arrivals every `B` symbol-times, codeword bits draining at
//! rate `R`, delivery times, the age sawtooth, and empirical
//! delay-constrained error probabilities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{code_stats, CodeLengths};
use crate::error::{Error, Result};
use crate::queue::ChannelConfig;
use crate::source::BlockDistribution;

/// Minimum number of blocks per simulation run.
pub const MIN_BLOCKS: u64 = 100;

/// How codeword bits leave the buffer.
///
/// `Fluid` treats the channel as a continuous drain: block `k`'s service
/// takes exactly `L_k / R`. `BitSlot` is the literal slotted channel: one bit
/// departs at each tick `i / R` (`i = 1, 2, ...`) if the buffer was nonempty
/// strictly before the tick, so the rate must be rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingModel {
    Fluid,
    BitSlot { bits: u64, per: u64 },
}

impl TimingModel {
    /// Slotted timing for `rate = bits / per` symbol-times, found by
    /// continued fractions; fails when no small rational matches.
    pub fn bit_slot(rate: f64) -> Result<Self> {
        let (bits, per) = rationalize(rate, 1_000_000).ok_or(Error::NotRational { rate })?;
        Ok(TimingModel::BitSlot { bits, per })
    }

    pub fn bit_slot_exact(bits: u64, per: u64) -> Result<Self> {
        if bits == 0 || per == 0 {
            return Err(Error::InvalidRate { rate: f64::NAN });
        }
        Ok(TimingModel::BitSlot { bits, per })
    }
}

fn rationalize(x: f64, max_den: u64) -> Option<(u64, u64)> {
    if x <= 0.0 || !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (1u64, x.floor() as u64);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-9 * x.max(1.0) {
            return Some((h1, k1));
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    ((h1 as f64 / k1 as f64 - x).abs() <= 1e-9 * x.max(1.0)).then_some((h1, k1))
}

/// One block's trip through the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    /// Block number `k`, starting at 1.
    pub index: u64,
    /// Arrival instant `k * B`.
    pub arrival: f64,
    /// Instant the last bit of the codeword leaves the buffer.
    pub delivery: f64,
}

enum DrainState {
    Fluid { prev_departure: f64 },
    BitSlot { bits: u64, per: u64, prev_tick: u64 },
}

/// Serial generator of block delivery times; the departure recursion is a
/// serial dependency, so each run is single-threaded.
struct Pipeline<'a> {
    sampler: crate::source::BlockSampler,
    lengths: &'a [u32],
    blocklength: u64,
    rate: f64,
    state: DrainState,
    rng: ChaCha8Rng,
}

impl<'a> Pipeline<'a> {
    fn new(
        code: &'a CodeLengths,
        blockdist: &BlockDistribution,
        cfg: &ChannelConfig,
        timing: &TimingModel,
        seed: u64,
    ) -> Result<Self> {
        // Validates index consistency and that every reachable block has a
        // codeword.
        code_stats(code, blockdist)?;
        if code.blocklength() != blockdist.blocklength()
            || cfg.blocklength != blockdist.blocklength()
        {
            return Err(Error::LengthMismatch {
                lengths: code.blocklength() as usize,
                blocks: blockdist.blocklength() as usize,
            });
        }
        let state = match *timing {
            TimingModel::Fluid => DrainState::Fluid {
                prev_departure: 0.0,
            },
            TimingModel::BitSlot { bits, per } => {
                let slot_rate = bits as f64 / per as f64;
                if (slot_rate - cfg.rate).abs() > 1e-9 * cfg.rate.max(1.0) {
                    return Err(Error::InvalidRate { rate: cfg.rate });
                }
                DrainState::BitSlot {
                    bits,
                    per,
                    prev_tick: 0,
                }
            }
        };
        Ok(Self {
            sampler: blockdist.sampler(),
            lengths: code.lengths(),
            blocklength: cfg.blocklength as u64,
            rate: cfg.rate,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Delivery time of block `k` (1-based); must be called in order.
    fn next_delivery(&mut self, k: u64) -> f64 {
        let block = self.sampler.sample(&mut self.rng);
        let len = self.lengths[block];
        debug_assert!(len >= 1);
        let arrival = (k * self.blocklength) as f64;
        match &mut self.state {
            DrainState::Fluid { prev_departure } => {
                let start = arrival.max(*prev_departure);
                *prev_departure = start + len as f64 / self.rate;
                *prev_departure
            }
            DrainState::BitSlot {
                bits,
                per,
                prev_tick,
            } => {
                // Earliest tick strictly after the arrival: i * per / bits >
                // k * B, in exact integer arithmetic.
                let arrival_units = (k * self.blocklength) as u128 * *bits as u128;
                let first = (arrival_units / *per as u128) as u64 + 1;
                let last = first.max(*prev_tick + 1) + (len as u64 - 1);
                *prev_tick = last;
                (last * *per) as f64 / *bits as f64
            }
        }
    }
}

/// Delivery times of the first `n_blocks` blocks, deterministic given `seed`.
pub fn deliveries(
    code: &CodeLengths,
    blockdist: &BlockDistribution,
    cfg: &ChannelConfig,
    timing: &TimingModel,
    n_blocks: u64,
    seed: u64,
) -> Result<Vec<Delivery>> {
    let mut pipeline = Pipeline::new(code, blockdist, cfg, timing, seed)?;
    Ok((1..=n_blocks)
        .map(|k| Delivery {
            index: k,
            arrival: (k * cfg.blocklength as u64) as f64,
            delivery: pipeline.next_delivery(k),
        })
        .collect())
}

/// Outcome of one age simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Time average of the age sawtooth over the post-warmup window, by
    /// exact piecewise-linear integration.
    pub age_time_avg: f64,
    /// Mean system time plus `B/2`; agrees with `age_time_avg` for long
    /// stable runs.
    pub age_via_system_time: f64,
    /// Mean system time `E[D_k - kB]` over the post-warmup window.
    pub mean_system_time: f64,
    /// Batch-means standard error of the system-time age estimator.
    pub age_std_err: f64,
    pub blocks_simulated: u64,
    pub warmup_discarded: u64,
    /// Set when the end-of-run backlog points at an unstable configuration.
    pub unstable: bool,
}

const SE_BATCHES: usize = 32;

fn batch_std_err(batch_sums: &[f64], batch_counts: &[u64]) -> f64 {
    let means: Vec<f64> = batch_sums
        .iter()
        .zip(batch_counts)
        .filter(|&(_, &c)| c > 0)
        .map(|(&s, &c)| s / c as f64)
        .collect();
    if means.len() < 2 {
        return 0.0;
    }
    let nb = means.len() as f64;
    let grand = means.iter().sum::<f64>() / nb;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (nb - 1.0);
    (var / nb).sqrt()
}

/// Simulates `n_blocks` blocks and reports both age estimators.
///
/// The first `max(n/10, 100)` blocks (capped at `n/2`) are discarded as
/// warmup. Unstable configurations are not an error; the result is flagged.
pub fn run_age_sim(
    code: &CodeLengths,
    blockdist: &BlockDistribution,
    cfg: &ChannelConfig,
    timing: &TimingModel,
    n_blocks: u64,
    seed: u64,
) -> Result<SimResult> {
    if n_blocks < MIN_BLOCKS {
        return Err(Error::SimTooShort {
            got: n_blocks,
            min: MIN_BLOCKS,
        });
    }
    let stats = code_stats(code, blockdist)?;
    let mut pipeline = Pipeline::new(code, blockdist, cfg, timing, seed)?;
    let warmup = (n_blocks / 10).max(MIN_BLOCKS).min(n_blocks / 2);
    let b = cfg.blocklength as u64;

    let samples = n_blocks - warmup;
    let batch_size = (samples / SE_BATCHES as u64).max(1);
    let mut batch_sums = [0.0f64; SE_BATCHES];
    let mut batch_counts = [0u64; SE_BATCHES];

    let mut area = 0.0;
    let mut window_start = 0.0;
    let mut prev_delivery = 0.0;
    let mut sum_system = 0.0;
    let mut last_system = 0.0;
    for k in 1..=n_blocks {
        let d = pipeline.next_delivery(k);
        let system = d - (k * b) as f64;
        if k == warmup {
            window_start = d;
        } else if k > warmup {
            // Age runs from T_{k-1} up to T_{k-1} + (d - prev) on this piece.
            let dt = d - prev_delivery;
            let age_start = prev_delivery - ((k - 1) * b) as f64;
            area += dt * age_start + dt * dt / 2.0;

            let idx = (((k - warmup - 1) / batch_size) as usize).min(SE_BATCHES - 1);
            batch_sums[idx] += system;
            batch_counts[idx] += 1;
            sum_system += system;
        }
        prev_delivery = d;
        last_system = system;
    }

    let mean_system_time = sum_system / samples as f64;
    let half_block = cfg.blocklength as f64 / 2.0;
    let backlog_bits = last_system * cfg.rate;
    Ok(SimResult {
        age_time_avg: area / (prev_delivery - window_start),
        age_via_system_time: mean_system_time + half_block,
        mean_system_time,
        age_std_err: batch_std_err(&batch_sums, &batch_counts),
        blocks_simulated: n_blocks,
        warmup_discarded: warmup,
        unstable: backlog_bits > 10.0 * stats.mean_len * (n_blocks as f64).sqrt(),
    })
}

/// Empirical error probability at one decoding delay.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub delta: f64,
    /// Fraction of post-warmup symbols whose block was still undelivered
    /// `delta` symbol-times after the symbol was generated.
    pub p_hat: f64,
    pub trials: u64,
    /// Batch-means standard error of `p_hat`.
    pub std_err: f64,
}

/// Measures, for each delay in `deltas`, how often a symbol's block is still
/// undelivered at observation time `symbol index + delta`.
pub fn run_error_sim(
    code: &CodeLengths,
    blockdist: &BlockDistribution,
    cfg: &ChannelConfig,
    timing: &TimingModel,
    deltas: &[f64],
    n_blocks: u64,
    seed: u64,
) -> Result<Vec<ErrorEstimate>> {
    if n_blocks < MIN_BLOCKS {
        return Err(Error::SimTooShort {
            got: n_blocks,
            min: MIN_BLOCKS,
        });
    }
    for &delta in deltas {
        if delta < 0.0 {
            return Err(Error::NegativeDelay { delta });
        }
    }
    let mut pipeline = Pipeline::new(code, blockdist, cfg, timing, seed)?;
    let warmup = (n_blocks / 10).max(MIN_BLOCKS).min(n_blocks / 2);
    let b = cfg.blocklength as u64;
    let trials = (n_blocks - warmup) * b;
    let batch_size = (trials / SE_BATCHES as u64).max(1);

    let mut errors = vec![0u64; deltas.len()];
    let mut batch_sums = vec![[0.0f64; SE_BATCHES]; deltas.len()];
    let mut batch_counts = vec![[0u64; SE_BATCHES]; deltas.len()];
    let mut symbol_counter = 0u64;
    for k in 1..=n_blocks {
        let d = pipeline.next_delivery(k);
        if k <= warmup {
            continue;
        }
        for s in 1..=b {
            let i = (k - 1) * b + s;
            let idx = ((symbol_counter / batch_size) as usize).min(SE_BATCHES - 1);
            symbol_counter += 1;
            for (j, &delta) in deltas.iter().enumerate() {
                let err = d > i as f64 + delta;
                if err {
                    errors[j] += 1;
                    batch_sums[j][idx] += 1.0;
                }
                batch_counts[j][idx] += 1;
            }
        }
    }

    Ok(deltas
        .iter()
        .enumerate()
        .map(|(j, &delta)| ErrorEstimate {
            delta,
            p_hat: errors[j] as f64 / trials as f64,
            trials,
            std_err: batch_std_err(&batch_sums[j], &batch_counts[j]),
        })
        .collect())
}

/// Empirical occupancy of the clipped buffer random walk.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOccupancy {
    /// `freq[j]` is the fraction of steps spent in state `j`.
    pub freq: Vec<f64>,
    /// Batch-means standard error per state.
    pub std_err: Vec<f64>,
    pub steps: u64,
}

const CHAIN_BATCHES: usize = 100;

/// Simulates the buffer walk `state <- max(state + L - 3, 0)` with `L = 1`
/// with probability `q` and `L = 4` otherwise, starting empty, and returns
/// state-occupancy frequencies over `steps` transitions.
pub fn buffer_chain_sim(q: f64, steps: u64, seed: u64) -> Result<ChainOccupancy> {
    if !(q > 1.0 / 3.0 && q <= 1.0) {
        return Err(Error::UnstableExample { q });
    }
    if steps < 10_000 {
        return Err(Error::SimTooShort {
            got: steps,
            min: 10_000,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch_size = (steps / CHAIN_BATCHES as u64).max(1);
    let mut counts: Vec<u64> = Vec::new();
    let mut batch_counts: Vec<Vec<u64>> = Vec::new();
    let mut state = 0u64;
    for step in 0..steps {
        let short = rng.gen::<f64>() < q;
        state = if short {
            state.saturating_sub(2) // +1 bit in, 3 out
        } else {
            state + 1 // +4 bits in, 3 out
        };
        let s = state as usize;
        if s >= counts.len() {
            counts.resize(s + 1, 0);
            for b in &mut batch_counts {
                b.resize(s + 1, 0);
            }
        }
        counts[s] += 1;
        let bi = ((step / batch_size) as usize).min(CHAIN_BATCHES - 1);
        if bi >= batch_counts.len() {
            batch_counts.resize(bi + 1, vec![0; counts.len()]);
        }
        batch_counts[bi][s] += 1;
    }

    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
    let mut std_err = vec![0.0; counts.len()];
    for (j, se) in std_err.iter_mut().enumerate() {
        let sums: Vec<f64> = batch_counts.iter().map(|b| b[j] as f64).collect();
        let cnts: Vec<u64> = batch_counts
            .iter()
            .map(|b| b.iter().sum::<u64>())
            .collect();
        *se = batch_std_err(&sums, &cnts);
    }
    Ok(ChainOccupancy {
        freq,
        std_err,
        steps,
    })
}

/// Stable per-task seed derivation (splitmix64 of `base` and `stream`), so
/// grid rows get independent streams regardless of evaluation order.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
