//! Heterogeneity experiments: sampled host powers leave the optimal scheme's
//! energy untouched whenever the power sum is fixed, while congestion and
//! mixed access speeds raise everyone's bill.
//!
//! Run with: cargo run --example heterogeneous_hosts

use joulecast::energy::{scheme_energy, EnergyModel, EnergyOptions};
use joulecast::model::{HostSpec, SystemSpec};
use joulecast::rational::{self, int, uint};
use joulecast::schedulers::{opt_schedule, SchemeKind};
use joulecast::sim::{sample_hosts, simulate, Congestion, PowerDist, RateDist, SimConfig};
use num::rational::BigRational;
use num::Zero;

fn main() {
    let n = 40u32;
    let beta = 40u32;
    let file = beta as u64 * 2_097_152;

    // Exact invariance: sampled powers vs the uniform population with the
    // same total, same schedule shape.
    let mut config = SimConfig::new(SchemeKind::Opt, n, file, 2_097_152);
    config.power_dist = PowerDist::Gaussian {
        mean: 80.0,
        std: 20.0,
    };
    let sampled = sample_hosts(&config, 7);
    let spec = SystemSpec::new(sampled[0].clone(), sampled[1..].to_vec(), file, beta).unwrap();
    let sampled_energy = scheme_energy(
        &spec,
        &opt_schedule(&spec).unwrap(),
        &EnergyModel::TwoState,
        &EnergyOptions::default(),
    )
    .unwrap()
    .total_joules;

    let total_power: BigRational = sampled
        .iter()
        .map(|h| h.power_watts.clone())
        .fold(BigRational::zero(), |a, b| a + b);
    let uniform = HostSpec::from_rationals(
        total_power / uint(n as u64 + 1),
        int(1),
        int(0),
        10_000_000,
        10_000_000,
    )
    .unwrap();
    let uniform_spec =
        SystemSpec::new(uniform.clone(), vec![uniform; n as usize], file, beta).unwrap();
    let uniform_energy = scheme_energy(
        &uniform_spec,
        &opt_schedule(&uniform_spec).unwrap(),
        &EnergyModel::TwoState,
        &EnergyOptions::default(),
    )
    .unwrap()
    .total_joules;
    println!(
        "sampled powers: {} J, uniform same-sum powers: {} J, equal: {}",
        rational::to_f64(&sampled_energy),
        rational::to_f64(&uniform_energy),
        sampled_energy == uniform_energy
    );

    // Monte Carlo: heterogeneous access speeds plus congestion raise the
    // energy per bit of both schemes.
    println!();
    println!("scheme,setting,mean_energy_per_bit_j");
    for kind in [SchemeKind::Opt, SchemeKind::Serial] {
        let base = SimConfig::new(kind, n, file, 2_097_152);
        let homogeneous = simulate(&base).unwrap().energy.energy_per_bit;
        println!("{kind},homogeneous,{}", rational::to_f64(&homogeneous));

        let mut sum = BigRational::zero();
        let seeds = 10u64;
        for seed in 0..seeds {
            let mut c = base.clone();
            c.rate_dist = RateDist::ExponentialNominal {
                mean_bps: 10_000_000.0,
            };
            c.congestion = Congestion::GaussianFactor { std: 0.07 };
            c.seed = seed;
            sum += simulate(&c).unwrap().energy.energy_per_bit;
        }
        println!(
            "{kind},heterogeneous,{}",
            rational::to_f64(&(sum / uint(seeds)))
        );
    }
}
