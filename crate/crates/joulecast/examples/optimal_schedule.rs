//! Generate the energy-optimal schedule for a small system, print it in the
//! interchange format, and confirm the measured energy meets the lower
//! bound exactly.
//!
//! Run with: cargo run --example optimal_schedule

use joulecast::bounds;
use joulecast::energy::{scheme_energy, EnergyModel, EnergyOptions};
use joulecast::model::{check_normal, scheme_to_string, validate_scheme, SystemSpec};
use joulecast::rational;
use joulecast::schedulers::opt_schedule;

fn main() {
    // Three clients, a four-block file of 1 MB, 80 W hosts, 10 Mbps links.
    let spec = SystemSpec::homogeneous(3, 80.0, 1.0, 10_000_000, 1, 4 * 2_097_152, 4).unwrap();
    let scheme = opt_schedule(&spec).unwrap();

    println!("# schedule ({} slots)", scheme.makespan());
    print!("{}", scheme_to_string(&scheme));

    let validity = validate_scheme(&spec, &scheme);
    let normality = check_normal(&spec, &scheme);
    println!("# valid: {}, normal: {}", validity.ok(), normality.ok());

    let report = scheme_energy(&spec, &scheme, &EnergyModel::TwoState, &EnergyOptions::default())
        .unwrap();
    let bound = bounds::lower_bound_k1(&spec).unwrap();
    println!(
        "# measured energy: {} J, lower bound: {} J, equal: {}",
        rational::to_f64(&report.total_joules),
        rational::to_f64(&bound.joules),
        report.total_joules == bound.joules
    );
    println!(
        "# energy per bit: {} J/bit over {} delivered bits",
        rational::to_f64(&report.energy_per_bit),
        report.delivered_bits
    );
}
