//! Experiment grids behind the CLI: the fixed two-length-code age sweep
//! (`fig3`), the age-optimal-code sweeps over blocklength and rate (`fig5a`,
//! `fig5b`), the per-scheme design report, and their CSV schemas.
//!
//! Grid points are independent and evaluated in parallel by default; rows
//! come back in grid order either way, and per-row seeds are derived from
//! the base seed and the row index, so parallel and sequential evaluation
//! produce identical output.

use std::io::{self, Write};

use crate::code::{
    age_penalty, code_stats, default_l_max, huffman, hull_codebooks, package_merge_linear,
    type_code, CodeLengths, CodeStats, HullPoint, PenaltyWeights,
};
use crate::error::{Error, Result};
use crate::queue::{age_upper_bound, is_stable, ChannelConfig, ExampleModel};
use crate::sim::{derive_seed, run_age_sim, SimResult, TimingModel, MIN_BLOCKS};
use crate::source::{BlockDistribution, SourceDistribution};

/// Which drain model the sweeps simulate; turned into a concrete
/// [`TimingModel`] per rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingKind {
    Fluid,
    BitSlot,
}

impl TimingKind {
    pub fn model(self, rate: f64) -> Result<TimingModel> {
        match self {
            TimingKind::Fluid => Ok(TimingModel::Fluid),
            TimingKind::BitSlot => TimingModel::bit_slot(rate),
        }
    }
}

fn csv_num(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_owned()
    } else {
        format!("{x:.9e}")
    }
}

// ---------------------------------------------------------------------------
// fig3: fixed two-length code, blocklength 2, rate 3/2, sweep over the
// symbol probability a.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig3Config {
    /// Values of the dominant-symbol probability `a`; `q = a^2`.
    pub a_grid: Vec<f64>,
    pub n_blocks: u64,
    pub seed: u64,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self {
            a_grid: default_a_grid(),
            n_blocks: 100_000,
            seed: 1,
        }
    }
}

/// Default sweep `a = 0.60, 0.62, ..., 0.98`.
pub fn default_a_grid() -> Vec<f64> {
    (0..20).map(|i| 0.60 + 0.02 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Row {
    pub a: f64,
    pub q: f64,
    pub entropy: f64,
    pub sim_age_fluid: f64,
    pub sim_age_bitslot: f64,
    /// Age bound from queue moments (waiting bound + service + B/2).
    pub dg1_bound: f64,
    /// Age bound from the error-exponent profile of the example system.
    pub ee_bound: f64,
    pub sim_se_fluid: f64,
    pub sim_se_bitslot: f64,
    pub stable: bool,
}

/// The fixed codebook of the sweep: block `AA` -> 1 bit, every other block
/// -> 4 bits.
pub fn fig3_code() -> CodeLengths {
    let mut lengths = vec![4u32; 9];
    lengths[0] = 1;
    CodeLengths::new(2, lengths).expect("static codebook")
}

pub fn fig3_rows(cfg: &Fig3Config) -> Result<Vec<Fig3Row>> {
    fig3_impl(cfg, false)
}

/// Sequential twin of [`fig3_rows`]; same output, used for benchmarking.
pub fn fig3_rows_seq(cfg: &Fig3Config) -> Result<Vec<Fig3Row>> {
    fig3_impl(cfg, true)
}

fn fig3_impl(cfg: &Fig3Config, sequential: bool) -> Result<Vec<Fig3Row>> {
    if cfg.n_blocks < MIN_BLOCKS {
        return Err(Error::SimTooShort {
            got: cfg.n_blocks,
            min: MIN_BLOCKS,
        });
    }
    let items: Vec<(usize, f64)> = cfg.a_grid.iter().copied().enumerate().collect();
    let rows = run_grid(&items, sequential, |&(i, a)| fig3_row(cfg, i, a));
    rows.into_iter().collect()
}

fn fig3_row(cfg: &Fig3Config, index: usize, a: f64) -> Result<Fig3Row> {
    let q = a * a;
    let dist = SourceDistribution::new(vec![a, (1.0 - a) / 2.0, (1.0 - a) / 2.0])?;
    let blockdist = BlockDistribution::new(&dist, 2)?;
    let code = fig3_code();
    let stats = code_stats(&code, &blockdist)?;
    let channel = ChannelConfig::new(2, 1.5)?;
    let dg1_bound = age_upper_bound(&stats, &channel);
    let ee_bound = match ExampleModel::new(q) {
        Ok(model) => model.age_bound(),
        Err(_) => f64::INFINITY,
    };
    if !is_stable(&stats, &channel) {
        return Ok(Fig3Row {
            a,
            q,
            entropy: dist.entropy_bits(),
            sim_age_fluid: f64::INFINITY,
            sim_age_bitslot: f64::INFINITY,
            dg1_bound,
            ee_bound,
            sim_se_fluid: 0.0,
            sim_se_bitslot: 0.0,
            stable: false,
        });
    }
    let fluid = run_age_sim(
        &code,
        &blockdist,
        &channel,
        &TimingModel::Fluid,
        cfg.n_blocks,
        derive_seed(cfg.seed, 2 * index as u64),
    )?;
    let slotted = run_age_sim(
        &code,
        &blockdist,
        &channel,
        &TimingModel::bit_slot(1.5)?,
        cfg.n_blocks,
        derive_seed(cfg.seed, 2 * index as u64 + 1),
    )?;
    Ok(Fig3Row {
        a,
        q,
        entropy: dist.entropy_bits(),
        sim_age_fluid: fluid.age_time_avg,
        sim_age_bitslot: slotted.age_time_avg,
        dg1_bound,
        ee_bound,
        sim_se_fluid: fluid.age_std_err,
        sim_se_bitslot: slotted.age_std_err,
        stable: true,
    })
}

pub fn write_fig3_csv<W: Write>(rows: &[Fig3Row], out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "a,q,H_X,sim_age_fluid,sim_age_bitslot,dg1_bound,ee_bound,flag"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_num(r.a),
            csv_num(r.q),
            csv_num(r.entropy),
            csv_num(r.sim_age_fluid),
            csv_num(r.sim_age_bitslot),
            csv_num(r.dg1_bound),
            csv_num(r.ee_bound),
            if r.stable { "ok" } else { "unstable" }
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fig5a: age-optimal code per (rate, blocklength) point.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig5aConfig {
    pub dist: SourceDistribution,
    pub r_grid: Vec<f64>,
    pub blocklengths: Vec<u32>,
    pub n_blocks: u64,
    pub seed: u64,
    pub timing: TimingKind,
}

impl Default for Fig5aConfig {
    fn default() -> Self {
        Self {
            dist: default_dist(),
            r_grid: default_r_grid(),
            blocklengths: vec![1, 2, 3, 4],
            n_blocks: 100_000,
            seed: 1,
            timing: TimingKind::Fluid,
        }
    }
}

/// The running three-symbol source of the sweeps.
pub fn default_dist() -> SourceDistribution {
    SourceDistribution::new(vec![0.6, 0.3, 0.1]).expect("static distribution")
}

/// Default rate sweep `R = 1.35, 1.40, ..., 3.00`, starting just above the
/// source entropy so the sweep shows both the transition and the flat region.
pub fn default_r_grid() -> Vec<f64> {
    (0..34).map(|i| 1.35 + 0.05 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5aRow {
    pub rate: f64,
    pub blocklength: u32,
    pub age_optimal_penalty: f64,
    pub sim_age: f64,
    pub sim_se: f64,
    /// Whether any code is stable at this (rate, blocklength).
    pub valid: bool,
}

pub fn fig5a_rows(cfg: &Fig5aConfig) -> Result<Vec<Fig5aRow>> {
    fig5a_impl(cfg, false)
}

pub fn fig5a_rows_seq(cfg: &Fig5aConfig) -> Result<Vec<Fig5aRow>> {
    fig5a_impl(cfg, true)
}

fn fig5a_impl(cfg: &Fig5aConfig, sequential: bool) -> Result<Vec<Fig5aRow>> {
    if cfg.n_blocks < MIN_BLOCKS {
        return Err(Error::SimTooShort {
            got: cfg.n_blocks,
            min: MIN_BLOCKS,
        });
    }
    let mut items = Vec::new();
    for &rate in &cfg.r_grid {
        for &blocklength in &cfg.blocklengths {
            items.push((items.len(), rate, blocklength));
        }
    }
    let rows = run_grid(&items, sequential, |&(i, rate, blocklength)| {
        fig5a_row(cfg, i, rate, blocklength)
    });
    rows.into_iter().collect()
}

fn fig5a_row(cfg: &Fig5aConfig, index: usize, rate: f64, blocklength: u32) -> Result<Fig5aRow> {
    match crate::code::age_optimal_code(&cfg.dist, blocklength, rate, None) {
        Ok((code, penalty)) => {
            let blockdist = BlockDistribution::new(&cfg.dist, blocklength)?;
            let channel = ChannelConfig::new(blocklength, rate)?;
            let sim = run_age_sim(
                &code,
                &blockdist,
                &channel,
                &cfg.timing.model(rate)?,
                cfg.n_blocks,
                derive_seed(cfg.seed, index as u64),
            )?;
            Ok(Fig5aRow {
                rate,
                blocklength,
                age_optimal_penalty: penalty,
                sim_age: sim.age_time_avg,
                sim_se: sim.age_std_err,
                valid: true,
            })
        }
        Err(Error::NoStableCode { .. }) => Ok(Fig5aRow {
            rate,
            blocklength,
            age_optimal_penalty: f64::INFINITY,
            sim_age: f64::INFINITY,
            sim_se: 0.0,
            valid: false,
        }),
        Err(e) => Err(e),
    }
}

pub fn write_fig5a_csv<W: Write>(rows: &[Fig5aRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "R,B,age_optimal_penalty,sim_age,valid")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            csv_num(r.rate),
            r.blocklength,
            csv_num(r.age_optimal_penalty),
            csv_num(r.sim_age),
            r.valid
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fig5b: age-optimal vs Huffman vs type code at a fixed blocklength.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig5bConfig {
    pub dist: SourceDistribution,
    pub blocklength: u32,
    pub r_grid: Vec<f64>,
    pub n_blocks: u64,
    pub seed: u64,
    pub timing: TimingKind,
}

impl Default for Fig5bConfig {
    fn default() -> Self {
        Self {
            dist: default_dist(),
            blocklength: 3,
            r_grid: default_r_grid(),
            n_blocks: 100_000,
            seed: 1,
            timing: TimingKind::Fluid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5bRow {
    pub rate: f64,
    pub sim_age_age_optimal: f64,
    pub sim_age_huffman: f64,
    pub sim_age_type: f64,
    pub penalty_age_optimal: f64,
    pub penalty_huffman: f64,
    pub penalty_type: f64,
    pub sim_se_age_optimal: f64,
    pub sim_se_huffman: f64,
    pub sim_se_type: f64,
}

pub fn fig5b_rows(cfg: &Fig5bConfig) -> Result<Vec<Fig5bRow>> {
    fig5b_impl(cfg, false)
}

pub fn fig5b_rows_seq(cfg: &Fig5bConfig) -> Result<Vec<Fig5bRow>> {
    fig5b_impl(cfg, true)
}

fn fig5b_impl(cfg: &Fig5bConfig, sequential: bool) -> Result<Vec<Fig5bRow>> {
    if cfg.n_blocks < MIN_BLOCKS {
        return Err(Error::SimTooShort {
            got: cfg.n_blocks,
            min: MIN_BLOCKS,
        });
    }
    let blockdist = BlockDistribution::new(&cfg.dist, cfg.blocklength)?;
    let huffman_code = huffman(&blockdist)?;
    let huffman_stats = code_stats(&huffman_code, &blockdist)?;
    let typed_code = type_code(cfg.dist.alphabet_size(), cfg.blocklength)?;
    let typed_stats = code_stats(&typed_code, &blockdist)?;

    let items: Vec<(usize, f64)> = cfg.r_grid.iter().copied().enumerate().collect();
    let rows = run_grid(&items, sequential, |&(i, rate)| {
        fig5b_row(
            cfg,
            &blockdist,
            (&huffman_code, &huffman_stats),
            (&typed_code, &typed_stats),
            i,
            rate,
        )
    });
    rows.into_iter().collect()
}

fn fig5b_row(
    cfg: &Fig5bConfig,
    blockdist: &BlockDistribution,
    (huffman_code, huffman_stats): (&CodeLengths, &CodeStats),
    (typed_code, typed_stats): (&CodeLengths, &CodeStats),
    index: usize,
    rate: f64,
) -> Result<Fig5bRow> {
    let channel = ChannelConfig::new(cfg.blocklength, rate)?;
    let timing = cfg.timing.model(rate)?;
    let simulate = |code: &CodeLengths, stats: &CodeStats, sub: u64| -> Result<(f64, f64)> {
        if !is_stable(stats, &channel) {
            return Ok((f64::INFINITY, 0.0));
        }
        let sim = run_age_sim(
            code,
            blockdist,
            &channel,
            &timing,
            cfg.n_blocks,
            derive_seed(cfg.seed, 3 * index as u64 + sub),
        )?;
        Ok((sim.age_time_avg, sim.age_std_err))
    };

    let age_optimal = match crate::code::age_optimal_code(&cfg.dist, cfg.blocklength, rate, None) {
        Ok((code, penalty)) => Some((code, penalty)),
        Err(Error::NoStableCode { .. }) => None,
        Err(e) => return Err(e),
    };
    let (sim_age_age_optimal, sim_se_age_optimal, penalty_age_optimal) = match &age_optimal {
        Some((code, penalty)) => {
            let stats = code_stats(code, blockdist)?;
            let (age, se) = simulate(code, &stats, 0)?;
            (age, se, *penalty)
        }
        None => (f64::INFINITY, 0.0, f64::INFINITY),
    };
    let (sim_age_huffman, sim_se_huffman) = simulate(huffman_code, huffman_stats, 1)?;
    let (sim_age_type, sim_se_type) = simulate(typed_code, typed_stats, 2)?;

    Ok(Fig5bRow {
        rate,
        sim_age_age_optimal,
        sim_age_huffman,
        sim_age_type,
        penalty_age_optimal,
        penalty_huffman: age_penalty(huffman_stats, cfg.blocklength, rate),
        penalty_type: age_penalty(typed_stats, cfg.blocklength, rate),
        sim_se_age_optimal,
        sim_se_huffman,
        sim_se_type,
    })
}

pub fn write_fig5b_csv<W: Write>(rows: &[Fig5bRow], out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "R,sim_age_age_optimal,sim_age_huffman,sim_age_type,\
         penalty_age_optimal,penalty_huffman,penalty_type"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_num(r.rate),
            csv_num(r.sim_age_age_optimal),
            csv_num(r.sim_age_huffman),
            csv_num(r.sim_age_type),
            csv_num(r.penalty_age_optimal),
            csv_num(r.penalty_huffman),
            csv_num(r.penalty_type)
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Design report: every scheme at one (B, R), plus the hull.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SchemeRow {
    pub scheme: &'static str,
    pub code: CodeLengths,
    pub stats: CodeStats,
    pub stable: bool,
    pub age_bound: f64,
}

#[derive(Debug, Clone)]
pub struct DesignReport {
    pub blocklength: u32,
    pub rate: f64,
    pub l_max: u32,
    pub schemes: Vec<SchemeRow>,
    pub hull: Vec<HullPoint>,
    /// Set when no code is stable at this (B, R): (min E[L], B*R).
    pub infeasible: Option<(f64, f64)>,
}

/// Builds codebooks for every scheme (Huffman, minimum second moment,
/// age-optimal when feasible, type code) with their moments, stability, and
/// age bounds, plus the boundary of the moment region.
pub fn design_report(
    dist: &SourceDistribution,
    blocklength: u32,
    rate: f64,
    l_max: Option<u32>,
) -> Result<DesignReport> {
    let blockdist = BlockDistribution::new(dist, blocklength)?;
    let channel = ChannelConfig::new(blocklength, rate)?;
    let l_max = l_max.unwrap_or_else(|| default_l_max(&blockdist));
    let hull = hull_codebooks(&blockdist, l_max)?;

    let mut schemes = Vec::new();
    let mut push = |scheme: &'static str, code: CodeLengths| -> Result<()> {
        let stats = code_stats(&code, &blockdist)?;
        schemes.push(SchemeRow {
            scheme,
            stable: is_stable(&stats, &channel),
            age_bound: age_upper_bound(&stats, &channel),
            code,
            stats,
        });
        Ok(())
    };
    push("huffman", huffman(&blockdist)?)?;
    push(
        "min-second-moment",
        package_merge_linear(&blockdist, &PenaltyWeights::SECOND_MOMENT_ONLY, l_max)?,
    )?;
    let infeasible = match crate::code::age_optimal_code(dist, blocklength, rate, Some(l_max)) {
        Ok((code, _)) => {
            push("age-optimal", code)?;
            None
        }
        Err(Error::NoStableCode {
            min_mean_len,
            capacity,
        }) => Some((min_mean_len, capacity)),
        Err(e) => return Err(e),
    };
    push("type", type_code(dist.alphabet_size(), blocklength)?)?;

    Ok(DesignReport {
        blocklength,
        rate,
        l_max,
        schemes,
        hull,
        infeasible,
    })
}

pub fn write_design_csv<W: Write>(report: &DesignReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "scheme,mean_len,second_moment,stable,age_bound,lengths")?;
    for row in &report.schemes {
        let lengths = row
            .code
            .lengths()
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.scheme,
            csv_num(row.stats.mean_len),
            csv_num(row.stats.second_moment),
            row.stable,
            csv_num(row.age_bound),
            lengths
        )?;
    }
    Ok(())
}

/// Single-row CSV for one simulation run.
pub fn write_sim_result_csv<W: Write>(result: &SimResult, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "age_time_avg,age_via_system_time,mean_system_time,age_std_err,\
         blocks_simulated,warmup_discarded,flag"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        csv_num(result.age_time_avg),
        csv_num(result.age_via_system_time),
        csv_num(result.mean_system_time),
        csv_num(result.age_std_err),
        result.blocks_simulated,
        result.warmup_discarded,
        if result.unstable { "unstable" } else { "stable" }
    )?;
    Ok(())
}

fn run_grid<T, R, F>(items: &[T], sequential: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if sequential {
        crate::par::map_seq(items, f)
    } else {
        crate::par::map(items, f)
    }
}
