//! Break a schedule's energy down to individual block deliveries and show
//! that per-slot block costs always sum to the slot cost.
//!
//! Run with: cargo run --example block_cost_accounting

use joulecast::energy::{
    block_costs, scheme_energy, slot_cost, verify_block_slot_consistency, EnergyModel,
    EnergyOptions,
};
use joulecast::model::SystemSpec;
use joulecast::rational;
use joulecast::schedulers::opt_schedule;

fn main() {
    let spec = SystemSpec::homogeneous(3, 80.0, 1.0, 10_000_000, 1, 4 * 2_097_152, 4).unwrap();
    let scheme = opt_schedule(&spec).unwrap();

    println!("block,receiver,slot,d,u,served_by,cost_j");
    for entry in block_costs(&spec, &scheme).unwrap() {
        println!(
            "{},{},{},{},{},{},{}",
            entry.block,
            entry.receiver,
            entry.slot,
            entry.d_indicator as u8,
            entry.u_indicator as u8,
            entry.server_of_block,
            rational::to_f64(&entry.cost_joules),
        );
    }

    println!();
    for slot in 1..=scheme.makespan() {
        println!(
            "slot {slot} cost: {} J",
            rational::to_f64(&slot_cost(&spec, &scheme, slot).unwrap())
        );
    }
    println!(
        "block costs match slot costs in every slot: {}",
        verify_block_slot_consistency(&spec, &scheme)
    );

    let two = scheme_energy(&spec, &scheme, &EnergyModel::TwoState, &EnergyOptions::default())
        .unwrap();
    let four = scheme_energy(
        &spec,
        &scheme,
        &EnergyModel::four_state(),
        &EnergyOptions::default(),
    )
    .unwrap();
    println!(
        "two-state total: {} J, four-state total: {} J",
        rational::to_f64(&two.total_joules),
        rational::to_f64(&four.total_joules),
    );
}
