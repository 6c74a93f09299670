//! Closed-form queueing machinery: stability, the Kingman-style waiting
//! bound and the resulting age bound, the error-exponent age bound with its
//! series oracle, and the worked two-length-code example with its geometric
//! buffer law and piecewise error bound.

use crate::code::{age_penalty, CodeStats};
use crate::error::{Error, Result};

/// Channel parameters: blocks of `blocklength` symbols arrive every
/// `blocklength` symbol-times and drain at `rate` bits per symbol-time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub blocklength: u32,
    pub rate: f64,
}

impl ChannelConfig {
    pub fn new(blocklength: u32, rate: f64) -> Result<Self> {
        if blocklength == 0 {
            return Err(Error::InvalidBlocklength);
        }
        if rate <= 0.0 || !rate.is_finite() {
            return Err(Error::InvalidRate { rate });
        }
        Ok(Self { blocklength, rate })
    }

    /// Bits the channel delivers per block interval, `B * R`.
    pub fn bits_per_block(&self) -> f64 {
        self.blocklength as f64 * self.rate
    }
}

/// True iff the queue is stable: `E[L] < B * R` strictly.
pub fn is_stable(stats: &CodeStats, cfg: &ChannelConfig) -> bool {
    stats.mean_len < cfg.bits_per_block()
}

/// Kingman-style upper bound on the mean waiting time of the block queue
/// (deterministic interarrivals, general service): `Var[L] / (2R(BR - E[L]))`,
/// infinite when unstable.
pub fn kingman_wait_bound(stats: &CodeStats, cfg: &ChannelConfig) -> f64 {
    if is_stable(stats, cfg) {
        stats.variance / (2.0 * cfg.rate * (cfg.bits_per_block() - stats.mean_len))
    } else {
        f64::INFINITY
    }
}

/// Upper bound on the average status age: waiting bound plus `E[L]/R + B/2`.
/// Single implementation shared with the code-design penalty.
pub fn age_upper_bound(stats: &CodeStats, cfg: &ChannelConfig) -> f64 {
    age_penalty(stats, cfg.blocklength, cfg.rate)
}

/// A delay-constrained error exponent together with its constant multiplier:
/// the symbol-error probability at delay `delta` is at most
/// `constant * 2^(-delta * exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorExponentModel {
    /// Decay rate in bits per symbol-time of delay (base-2 exponent).
    pub exponent: f64,
    /// Constant multiplier of the exponential bound.
    pub constant: f64,
}

/// Age bound implied by an exponential error profile:
/// `K * 2^(2 E) / (2^E - 1)^2`, which tends to `K` as the exponent grows.
pub fn error_exponent_age_bound(model: &ErrorExponentModel) -> Result<f64> {
    if model.exponent <= 0.0 || model.exponent.is_nan() {
        return Err(Error::InvalidExponent {
            value: model.exponent,
        });
    }
    if model.exponent.is_infinite() {
        return Ok(model.constant);
    }
    let pow = model.exponent.exp2();
    Ok(model.constant * pow * pow / ((pow - 1.0) * (pow - 1.0)))
}

/// Truncation of the union-bound double series
/// `sum_{t=0}^{t_cap} K * sum_{delta>=t} 2^(-delta E)`, with each inner tail
/// collapsed by the geometric formula. Converges to
/// [`error_exponent_age_bound`] as `t_cap` grows; serves as its oracle.
pub fn age_bound_partial_sum(constant: f64, exponent: f64, t_cap: u32) -> f64 {
    assert!(exponent > 0.0, "exponent must be positive");
    let r = (-exponent).exp2();
    let tail_factor = 1.0 / (1.0 - r);
    let mut sum = 0.0;
    let mut r_pow = 1.0;
    for _ in 0..=t_cap {
        sum += constant * r_pow * tail_factor;
        r_pow *= r;
    }
    sum
}

/// Closed-form model of the two-length example system: blocks of 2 symbols,
/// a 1-bit codeword with probability `q` and a 4-bit codeword otherwise,
/// drained at 3 bits per 2 symbol-times.
///
/// The buffer occupancy sampled before each arrival is a clipped random walk
/// whose stationary law is geometric with ratio `eta`, the positive root of
/// `q(x^2 + x + 1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleModel {
    /// Probability of the 1-bit codeword.
    pub q: f64,
    /// Geometric ratio of the stationary buffer law, in [0, 1).
    pub eta: f64,
    /// Constant multiplier of the exponential error branch.
    pub constant: f64,
    /// Achievable error exponent, `-(3/2) log2 eta`; infinite at `q = 1`.
    pub exponent: f64,
}

impl ExampleModel {
    /// Builds the model for `q` in `(1/3, 1]`; outside that range the buffer
    /// walk has no stationary law.
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 1.0 / 3.0 && q <= 1.0) {
            return Err(Error::UnstableExample { q });
        }
        let eta = (-1.0 + (1.0 + 4.0 * (1.0 - q) / q).sqrt()) / 2.0;
        let (constant, exponent) = if eta == 0.0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            (
                eta.powf(-4.5) * (1.0 - q * (1.0 - eta * eta * eta)),
                -1.5 * eta.log2(),
            )
        };
        Ok(Self {
            q,
            eta,
            constant,
            exponent,
        })
    }

    pub fn error_exponent_model(&self) -> ErrorExponentModel {
        ErrorExponentModel {
            exponent: self.exponent,
            constant: self.constant,
        }
    }

    /// Stationary probability of `j` bits in the buffer: `(1 - eta) eta^j`.
    pub fn stationary_prob(&self, j: u64) -> f64 {
        (1.0 - self.eta) * self.eta.powi(j as i32)
    }

    /// Piecewise upper bound on the symbol error probability at delay
    /// `delta`, clamped to `[0, 1]`:
    /// 1 below `delta = 1`; `1 - q + q(1 - eta) eta^(3(delta-1)/2)` up to
    /// `delta = 3`; `(1 - q(1 - eta^3)) eta^(3(delta-3)/2)` beyond.
    ///
    /// The exponentials are evaluated as powers of `eta` (equal to
    /// `2^(delta * (3/2) log2 eta)` rescaled by the branch constant), which
    /// stays finite in the `eta -> 0` limit.
    pub fn error_bound(&self, delta: f64) -> Result<f64> {
        if delta < 0.0 {
            return Err(Error::NegativeDelay { delta });
        }
        let value = if delta < 1.0 {
            1.0
        } else if delta < 3.0 {
            self.q.mul_add(
                (1.0 - self.eta) * self.eta.powf(1.5 * (delta - 1.0)) - 1.0,
                1.0,
            )
        } else {
            let head = 1.0 - self.q * (1.0 - self.eta.powi(3));
            head * self.eta.powf(1.5 * (delta - 3.0))
        };
        Ok(value.clamp(0.0, 1.0))
    }

    /// Age bound of the example system obtained by summing the piecewise
    /// error bound over all delays:
    /// `8 - 3q(1 - eta^(3/2) + eta^(5/2) + 2 eta/3)
    ///  + 3K 2^(-2E) / (2^E - 1) + K 2^(-E) / (2^E - 1)^2`.
    ///
    /// With `x = eta^(3/2)` the exponential terms reduce exactly to
    /// `3c/(1-x) + c/(1-x)^2` for `c = 1 - q(1 - eta^3)`, which also covers
    /// the degenerate `eta = 0` endpoint where `K` and `E` diverge.
    pub fn age_bound(&self) -> f64 {
        let eta = self.eta;
        let x = eta.powf(1.5);
        let c = 1.0 - self.q * (1.0 - eta.powi(3));
        let polynomial =
            8.0 - 3.0 * self.q * (1.0 - x + eta.powf(2.5) + 2.0 * eta / 3.0);
        polynomial + 3.0 * c / (1.0 - x) + c / ((1.0 - x) * (1.0 - x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_stats(q: f64) -> CodeStats {
        CodeStats::new(4.0 - 3.0 * q, 16.0 - 15.0 * q)
    }

    #[test]
    fn stability_matches_q_threshold() {
        // Two-length example at B = 2, R = 3/2: stable iff q > 1/3.
        let cfg = ChannelConfig::new(2, 1.5).unwrap();
        assert!(is_stable(&example_stats(0.34), &cfg));
        assert!(!is_stable(&example_stats(1.0 / 3.0), &cfg));
        assert!(!is_stable(&example_stats(0.2), &cfg));
    }

    #[test]
    fn stability_boundary_is_strict() {
        let cfg = ChannelConfig::new(1, 2.0).unwrap();
        assert!(!is_stable(&CodeStats::new(2.0, 4.0), &cfg));
        assert!(is_stable(&CodeStats::new(1.0, 1.0), &cfg));
    }

    #[test]
    fn kingman_bound_values() {
        let cfg = ChannelConfig::new(2, 1.5).unwrap();
        assert_eq!(kingman_wait_bound(&CodeStats::new(2.0, 4.0), &cfg), 0.0);
        let s = example_stats(0.5); // Var = 2.25, BR - E[L] = 0.5
        assert!((kingman_wait_bound(&s, &cfg) - 1.5).abs() < 1e-12);
        assert_eq!(
            kingman_wait_bound(&example_stats(0.2), &cfg),
            f64::INFINITY
        );
    }

    #[test]
    fn age_bound_decomposition() {
        let cfg = ChannelConfig::new(2, 1.5).unwrap();
        let s = example_stats(0.5);
        let total = age_upper_bound(&s, &cfg);
        let wait = kingman_wait_bound(&s, &cfg);
        assert!((total - (wait + s.mean_len / cfg.rate + 1.0)).abs() < 1e-12);
        assert!((total - 25.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_age_bound_direct_values() {
        let f = |constant, exponent| {
            error_exponent_age_bound(&ErrorExponentModel { exponent, constant }).unwrap()
        };
        assert_eq!(f(1.0, 1.0), 4.0);
        assert!((f(1.0, 20.0) - 1.0).abs() <= 1e-5);
        assert!(f(1.0, 2.0) < f(1.0, 1.0));
        assert_eq!(f(3.5, f64::INFINITY), 3.5);
        assert!(matches!(
            error_exponent_age_bound(&ErrorExponentModel {
                exponent: 0.0,
                constant: 1.0
            }),
            Err(Error::InvalidExponent { .. })
        ));
    }

    #[test]
    fn partial_sum_first_term_and_monotonicity() {
        // t_cap = 0 leaves the single tail sum_{d>=0} 2^-d = 2.
        assert!((age_bound_partial_sum(1.0, 1.0, 0) - 2.0).abs() < 1e-12);
        let mut prev = 0.0;
        for t_cap in [0, 1, 2, 5, 10, 100] {
            let s = age_bound_partial_sum(1.0, 0.5, t_cap);
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn partial_sum_converges_to_closed_form() {
        for exponent in [0.1, 0.5, 1.0, 2.0] {
            let closed = error_exponent_age_bound(&ErrorExponentModel {
                exponent,
                constant: 1.0,
            })
            .unwrap();
            let partial = age_bound_partial_sum(1.0, exponent, 10_000);
            assert!(
                (closed - partial).abs() <= 1e-9,
                "exponent {exponent}: {closed} vs {partial}"
            );
        }
    }

    #[test]
    fn example_model_golden_ratio_point() {
        let m = ExampleModel::new(0.5).unwrap();
        assert!((m.eta - 0.6180339887498949).abs() < 1e-15);
        // Characteristic equation q(eta^2 + eta + 1) = 1.
        assert!((0.5 * (m.eta * m.eta + m.eta + 1.0) - 1.0).abs() < 1e-12);
        assert!(m.constant > 0.0 && m.exponent > 0.0);
    }

    #[test]
    fn example_model_rejects_unstable_q() {
        assert!(matches!(
            ExampleModel::new(1.0 / 3.0),
            Err(Error::UnstableExample { .. })
        ));
        assert!(matches!(
            ExampleModel::new(0.2),
            Err(Error::UnstableExample { .. })
        ));
    }

    #[test]
    fn example_model_near_boundary_and_degenerate() {
        let near = ExampleModel::new(1.0 / 3.0 + 1e-9).unwrap();
        assert!(near.eta < 1.0 && near.eta > 0.999_999);
        assert!(near.exponent < 1e-6);
        let sure = ExampleModel::new(1.0).unwrap();
        assert_eq!(sure.eta, 0.0);
        assert!(sure.exponent.is_infinite());
    }

    #[test]
    fn characteristic_equation_across_q() {
        let mut q = 0.3334;
        while q <= 1.0 {
            let m = ExampleModel::new(q).unwrap();
            assert!((q * (m.eta * m.eta + m.eta + 1.0) - 1.0).abs() < 1e-12);
            q += 0.0123;
        }
    }

    #[test]
    fn stationary_law_head_and_total_mass() {
        let m = ExampleModel::new(0.5).unwrap();
        assert!((m.stationary_prob(0) - (1.0 - m.eta)).abs() < 1e-15);
        let total: f64 = (0..400).map(|j| m.stationary_prob(j)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_bound_branches() {
        let m = ExampleModel::new(0.5).unwrap();
        assert_eq!(m.error_bound(0.0).unwrap(), 1.0);
        assert_eq!(m.error_bound(0.5).unwrap(), 1.0);
        // At delta = 3 the exponential factor cancels the branch constant,
        // leaving 1 - q(1 - eta^3) = eta for this root.
        let at3 = m.error_bound(3.0).unwrap();
        assert!((at3 - m.eta).abs() < 1e-12);
        assert!(m.error_bound(80.0).unwrap() < 1e-20);
        assert!(matches!(
            m.error_bound(-0.1),
            Err(Error::NegativeDelay { .. })
        ));
    }

    #[test]
    fn error_bound_matches_literal_piecewise_form() {
        // The implementation folds 2^(delta * (3/2) log2 eta) and the branch
        // constants into plain powers of eta; compare against the literal
        // expressions for interior q.
        for q in [0.36, 0.4, 0.5, 0.7, 0.9, 0.99] {
            let m = ExampleModel::new(q).unwrap();
            let eta = m.eta;
            let mut delta = 0.0;
            while delta <= 12.0 {
                let expo = (delta * 1.5 * eta.log2()).exp2();
                let literal = if delta < 1.0 {
                    1.0
                } else if delta < 3.0 {
                    1.0 - q + eta.powf(-1.5) * (q * (1.0 - eta)) * expo
                } else {
                    eta.powf(-4.5) * (1.0 - q * (1.0 - eta.powi(3))) * expo
                };
                let got = m.error_bound(delta).unwrap();
                assert!(
                    (got - literal.clamp(0.0, 1.0)).abs() <= 1e-12,
                    "q={q} delta={delta}: {got} vs {literal}"
                );
                delta += 0.25;
            }
        }
    }

    #[test]
    fn error_bound_nonincreasing_and_clamped() {
        for q in [0.35, 0.4, 0.5, 0.7, 0.9, 1.0] {
            let m = ExampleModel::new(q).unwrap();
            let mut prev = 1.0;
            let mut delta = 0.0;
            while delta <= 12.0 {
                let b = m.error_bound(delta).unwrap();
                assert!((0.0..=1.0).contains(&b));
                // Nonincreasing within branches; allow the branch seams.
                if (delta - 1.0).abs() > 0.11 && (delta - 3.0).abs() > 0.11 {
                    assert!(b <= prev + 1e-12, "q={q} delta={delta}: {b} > {prev}");
                }
                prev = b;
                delta += 0.1;
            }
        }
    }

    #[test]
    fn age_bound_matches_printed_form_for_interior_q() {
        // The implementation folds K and E into powers of eta; compare with
        // the literal printed expression where both are finite.
        for q in [0.4, 0.5, 0.7, 0.9, 0.99] {
            let m = ExampleModel::new(q).unwrap();
            let e = m.exponent.exp2();
            let printed = 8.0
                - 3.0 * q * (1.0 - m.eta.powf(1.5) + m.eta.powf(2.5) + 2.0 * m.eta / 3.0)
                + 3.0 * m.constant * (-2.0 * m.exponent).exp2() / (e - 1.0)
                + m.constant * (-m.exponent).exp2() / ((e - 1.0) * (e - 1.0));
            assert!(
                (m.age_bound() - printed).abs() < 1e-9 * printed,
                "q={q}: {} vs {printed}",
                m.age_bound()
            );
        }
    }

    #[test]
    fn age_bound_degenerate_source_limit() {
        let m = ExampleModel::new(1.0).unwrap();
        assert!((m.age_bound() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn age_bound_decreases_in_q() {
        let mut prev = f64::INFINITY;
        let mut q = 0.36;
        while q <= 1.0 {
            let b = ExampleModel::new(q).unwrap().age_bound();
            assert!(b < prev, "q={q}: {b} !< {prev}");
            prev = b;
            q += 0.02;
        }
    }
}
