//! Query the closed-form bounds and sweep the block count to see where the
//! energy minimum sits.
//!
//! Run with: cargo run --example bounds_and_block_count

use joulecast::bounds::{
    alg4_energy, homogeneous_opt_energy, lower_bound_homogeneous, lower_bound_k1,
    optimal_block_count, optimal_energy_k1,
};
use joulecast::model::SystemSpec;
use joulecast::rational;

fn main() {
    let n = 200u32;
    let file_bits = 800_000_000u64; // 100 MB at 8 bits per byte times 10^6
    let upload = 10_000_000u64;
    let power = rational::int(80);
    let delta = rational::int(1);

    let best = optimal_block_count(&power, file_bits, upload, &delta, n).unwrap();
    println!("optimal block count: {}", best.beta);

    println!("beta,energy_j");
    for beta in [1u32, 10, 40, best.beta, 120, 200] {
        let energy = homogeneous_opt_energy(n, beta, &power, file_bits, upload, &delta);
        println!("{beta},{}", rational::to_f64(&energy));
    }

    // The k = 1 bound and the optimal-scheme energy coincide.
    let beta = best.beta;
    let spec = SystemSpec::homogeneous(n, 80.0, 1.0, upload, 1, file_bits, beta).unwrap();
    let lower = lower_bound_k1(&spec).unwrap();
    let optimal = optimal_energy_k1(&spec).unwrap();
    println!(
        "lower bound {} J == optimal {} J: {}",
        rational::to_f64(&lower.joules),
        rational::to_f64(&optimal.joules),
        lower.joules == optimal.joules
    );

    // With parallel downloads (k = 2) and more blocks than clients the
    // near-optimal scheme sits a known distance above the bound.
    let (n, beta) = (50u32, 170u32);
    let one = rational::int(1);
    let bound = lower_bound_homogeneous(n, beta, &one);
    let scheme = alg4_energy(n, beta, &one).unwrap();
    println!(
        "k=2, n={n}, beta={beta}: bound {} J, scheme {} J, gap {} slots of Delta",
        rational::to_f64(&bound.joules),
        rational::to_f64(&scheme.joules),
        rational::to_f64(&(&scheme.joules - &bound.joules)),
    );
}
