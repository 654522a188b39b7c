//! Closed-form lower bounds, optimal-scheme energies, and the block count
//! that minimizes energy in homogeneous systems.
//!
//! All results are exact rationals so they can be compared for equality with
//! measured scheme energies.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::model::SystemSpec;
use crate::rational;

/// Which closed form produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// Lower bound on any scheme when `k = 1`.
    LowerBoundK1,
    /// Energy of the optimal schemes when `k = 1` (equals the lower bound).
    OptimalK1,
    /// Lower bound on any scheme in a homogeneous system with `k > 1`.
    LowerBoundHomogeneous,
    /// Energy of the near-optimal `k = 2` scheme for `beta > n`.
    NearOptimalK2,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Formula::LowerBoundK1 => "lower_bound_k1",
            Formula::OptimalK1 => "optimal_k1",
            Formula::LowerBoundHomogeneous => "lower_bound_homogeneous",
            Formula::NearOptimalK2 => "near_optimal_k2",
        };
        f.write_str(s)
    }
}

/// A bound value together with the formula that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub joules: BigRational,
    pub formula: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("formula requires k = 1, spec has k = {k}")]
    KNotOne { k: u32 },
    #[error("formula requires beta > n, got beta = {beta}, n = {n}")]
    BetaNotAboveN { n: u32, beta: u32 },
    #[error("n must be positive")]
    ZeroN,
    #[error("inputs must be positive")]
    NonPositiveInput,
}

/// Minimum energy any scheme needs when `k = 1`:
/// `beta * (Delta_S + sum Delta_i) + max(0, n - beta) * min(Delta_S, Delta_0)`.
pub fn lower_bound_k1(spec: &SystemSpec) -> Result<BoundResult, BoundsError> {
    if spec.k() != 1 {
        return Err(BoundsError::KNotOne { k: spec.k() });
    }
    let beta = rational::uint(spec.block_count() as u64);
    let delta_s = spec.delta(crate::model::HostId::Server);
    let sum = spec.sum_client_deltas();
    let slack = spec.n() as i64 - spec.block_count() as i64;
    let tail = if slack > 0 {
        rational::int(slack) * delta_s.clone().min(spec.min_client_delta())
    } else {
        BigRational::zero()
    };
    Ok(BoundResult {
        joules: beta * (delta_s + sum) + tail,
        formula: Formula::LowerBoundK1,
    })
}

/// Energy achieved by the optimal `k = 1` schemes; numerically identical to
/// [`lower_bound_k1`] (the schemes are tight).
pub fn optimal_energy_k1(spec: &SystemSpec) -> Result<BoundResult, BoundsError> {
    let bound = lower_bound_k1(spec)?;
    Ok(BoundResult {
        joules: bound.joules,
        formula: Formula::OptimalK1,
    })
}

/// Minimum energy in a homogeneous system when downloads may run in
/// parallel (`k > 1`): `n * (beta + 1) * Delta`.
pub fn lower_bound_homogeneous(n: u32, beta: u32, delta: &BigRational) -> BoundResult {
    BoundResult {
        joules: rational::uint(n as u64) * rational::uint(beta as u64 + 1) * delta,
        formula: Formula::LowerBoundHomogeneous,
    }
}

/// Energy of the `k = 2` near-optimal scheme for `beta > n`:
/// `(n * (beta + 1) + floor(beta / n) + beta mod n - 1) * Delta`.
pub fn alg4_energy(n: u32, beta: u32, delta: &BigRational) -> Result<BoundResult, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroN);
    }
    if beta <= n {
        return Err(BoundsError::BetaNotAboveN { n, beta });
    }
    let slots = n as u64 * (beta as u64 + 1) + (beta / n) as u64 + (beta % n) as u64 - 1;
    Ok(BoundResult {
        joules: rational::uint(slots) * delta,
        formula: Formula::NearOptimalK2,
    })
}

/// Energy of the optimal `k = 1` scheme in a homogeneous system as a
/// function of the block count:
/// `E(beta) = (n * beta + max(n, beta)) * (P * B / (u * beta) + delta)`.
pub fn homogeneous_opt_energy(
    n: u32,
    beta: u32,
    power_watts: &BigRational,
    file_bits: u64,
    upload_bps: u64,
    per_block_joules: &BigRational,
) -> BigRational {
    assert!(beta >= 1, "beta must be positive");
    let slots = rational::uint(n as u64 * beta as u64 + (n.max(beta)) as u64);
    let delta = power_watts * rational::uint(file_bits)
        / (rational::uint(upload_bps) * rational::uint(beta as u64))
        + per_block_joules;
    slots * delta
}

/// Result of the optimal block count computation. `delta_was_zero` flags the
/// degenerate input where per-block energy vanishes and the continuous
/// optimum is unbounded; the count is then clamped to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimalBlockCount {
    pub beta: u32,
    pub delta_was_zero: bool,
}

/// Block count minimizing [`homogeneous_opt_energy`] for `k = 1`:
/// `beta* = min(round*(sqrt(P * B / (u * delta))), n)` where `round*`
/// evaluates the energy at the two neighboring integers and keeps the
/// cheaper one, ties to the smaller count.
pub fn optimal_block_count(
    power_watts: &BigRational,
    file_bits: u64,
    upload_bps: u64,
    per_block_joules: &BigRational,
    n: u32,
) -> Result<OptimalBlockCount, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroN);
    }
    if file_bits == 0 || upload_bps == 0 || power_watts.is_negative() || per_block_joules.is_negative()
    {
        return Err(BoundsError::NonPositiveInput);
    }
    if per_block_joules.is_zero() {
        return Ok(OptimalBlockCount {
            beta: n,
            delta_was_zero: true,
        });
    }
    let target = power_watts * rational::uint(file_bits)
        / (rational::uint(upload_bps) * per_block_joules);
    let floor = rational::floor_sqrt(&target);
    let clamp = |m: &BigInt| -> u32 {
        if m < &BigInt::one() {
            1
        } else if m > &BigInt::from(n) {
            n
        } else {
            m.to_u32().expect("clamped to u32 range")
        }
    };
    let lo = clamp(&floor);
    let hi = clamp(&(floor + 1));
    let energy =
        |beta: u32| homogeneous_opt_energy(n, beta, power_watts, file_bits, upload_bps, per_block_joules);
    let beta = if lo == hi || energy(lo) <= energy(hi) {
        lo
    } else {
        hi
    };
    Ok(OptimalBlockCount {
        beta,
        delta_was_zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HostSpec;
    use proptest::prelude::*;

    fn unit_delta_spec(n: u32, beta: u32) -> SystemSpec {
        SystemSpec::homogeneous(n, 0.0, 1.0, 10_000_000, 1, beta as u64 * 1024, beta).unwrap()
    }

    #[test]
    fn lower_bound_matches_hand_evaluations() {
        // n = 3, beta = 4, homogeneous Delta = 1.
        let spec = unit_delta_spec(3, 4);
        assert_eq!(lower_bound_k1(&spec).unwrap().joules, rational::int(16));

        // n = 4, beta = 2, Delta_S = 2, Delta_i = 1.
        let server = HostSpec::new(0.0, 2.0, 0.0, 10, 10).unwrap();
        let client = HostSpec::new(0.0, 1.0, 0.0, 10, 10).unwrap();
        let spec = SystemSpec::new(server, vec![client; 4], 2048, 2).unwrap();
        assert_eq!(lower_bound_k1(&spec).unwrap().joules, rational::int(14));

        // n = beta: the slack term vanishes.
        let spec = unit_delta_spec(5, 5);
        assert_eq!(lower_bound_k1(&spec).unwrap().joules, rational::int(30));
    }

    #[test]
    fn lower_bound_requires_unit_capacity_ratio() {
        let spec =
            SystemSpec::homogeneous(2, 80.0, 1.0, 10_000_000, 2, 2 * 2_097_152, 2).unwrap();
        assert!(matches!(
            lower_bound_k1(&spec),
            Err(BoundsError::KNotOne { k: 2 })
        ));
    }

    #[test]
    fn optimal_energy_equals_the_lower_bound() {
        for (n, beta) in [(1u32, 1u32), (3, 4), (7, 2), (2, 9), (6, 6)] {
            let spec = unit_delta_spec(n, beta);
            assert_eq!(
                optimal_energy_k1(&spec).unwrap().joules,
                lower_bound_k1(&spec).unwrap().joules
            );
        }
    }

    #[test]
    fn homogeneous_lower_bound_examples() {
        let one = rational::int(1);
        assert_eq!(
            lower_bound_homogeneous(4, 2, &one).joules,
            rational::int(12)
        );
        assert_eq!(
            lower_bound_homogeneous(4, 2, &rational::int(0)).joules,
            rational::int(0)
        );
        // At beta = n the k = 1 optimum has the same homogeneous value.
        let spec = unit_delta_spec(5, 5);
        assert_eq!(
            lower_bound_homogeneous(5, 5, &one).joules,
            optimal_energy_k1(&spec).unwrap().joules
        );
    }

    #[test]
    fn alg4_energy_examples() {
        let one = rational::int(1);
        assert_eq!(alg4_energy(3, 7, &one).unwrap().joules, rational::int(26));
        assert_eq!(alg4_energy(3, 6, &one).unwrap().joules, rational::int(22));
        assert_eq!(alg4_energy(2, 4, &one).unwrap().joules, rational::int(11));
        assert!(matches!(
            alg4_energy(3, 3, &one),
            Err(BoundsError::BetaNotAboveN { .. })
        ));
    }

    #[test]
    fn alg4_gap_to_lower_bound_is_the_remainder_term() {
        let one = rational::int(1);
        for n in 1u32..20 {
            for beta in (n + 1)..60 {
                let gap = alg4_energy(n, beta, &one).unwrap().joules
                    - lower_bound_homogeneous(n, beta, &one).joules;
                let expected = rational::uint((beta / n) as u64 + (beta % n) as u64 - 1);
                assert_eq!(gap, expected);
                assert!(gap >= rational::int(0));
                assert!(gap < rational::uint(n as u64 * (beta as u64 + 1)));
            }
        }
    }

    #[test]
    fn optimal_block_count_examples() {
        let p = rational::int(80);
        let d = rational::int(1);
        // sqrt(80 * 8e8 / 1e7) = 80.
        let r = optimal_block_count(&p, 800_000_000, 10_000_000, &d, 200).unwrap();
        assert_eq!(r.beta, 80);
        assert!(!r.delta_was_zero);
        // Continuous optimum 300 clamps to n = 200.
        let r = optimal_block_count(&p, 11_250_000_000, 10_000_000, &d, 200).unwrap();
        assert_eq!(r.beta, 200);
        // delta = 0 flags the degenerate case.
        let r = optimal_block_count(&p, 800_000_000, 10_000_000, &rational::int(0), 200).unwrap();
        assert!(r.delta_was_zero);
        assert_eq!(r.beta, 200);
    }

    proptest! {
        // The chosen block count minimizes E(beta) over an exhaustive sweep.
        #[test]
        fn optimal_block_count_wins_the_sweep(
            p in 1u64..200,
            b_mb in 1u64..2_000,
            u in prop::sample::select(vec![1_000_000u64, 10_000_000, 100_000_000]),
            d in 1u64..10,
            n in 1u32..300,
        ) {
            let power = rational::uint(p);
            let delta = rational::uint(d);
            let file = b_mb * 8_000_000;
            let best = optimal_block_count(&power, file, u, &delta, n).unwrap().beta;
            let e_best = homogeneous_opt_energy(n, best, &power, file, u, &delta);
            let sqrt_val = rational::floor_sqrt(
                &(&power * rational::uint(file) / (rational::uint(u) * &delta)),
            )
            .to_u32()
            .unwrap_or(u32::MAX);
            let hi = (2 * n).max(2u32.saturating_mul(sqrt_val));
            for beta in 1..=hi {
                let e = homogeneous_opt_energy(n, beta, &power, file, u, &delta);
                prop_assert!(e_best <= e, "beta* = {best} loses to beta = {beta}");
            }
        }
    }
}
