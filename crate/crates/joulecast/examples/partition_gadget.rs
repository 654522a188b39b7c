//! Walk the Partition hardness gadget: build the distribution instance for a
//! small input, exhibit the low-energy witness schedule, and cross-check the
//! threshold equivalence with the brute-force oracle.
//!
//! Run with: cargo run --example partition_gadget

use joulecast::rational;
use joulecast::reduction::{
    build_instance, check_iff, decide_small, schedule_energy, validate_gadget_schedule,
    witness_schedule, PartitionInput,
};

fn main() {
    let input = PartitionInput::new(vec![1, 1, 2]).unwrap();
    let power = rational::int(1);
    let instance = build_instance(&input, &power).unwrap();

    println!("values: {:?}, blocks: {}", input.values(), instance.block_count);
    println!("host,upload_blocks,download_blocks,power_w");
    for host in &instance.hosts {
        println!(
            "{},{},{},{}",
            host.id,
            host.upload_blocks,
            host.download_blocks,
            rational::to_f64(&host.power)
        );
    }
    println!(
        "sink power: {} W, decision threshold: {} J",
        rational::to_f64(&instance.sink_power),
        rational::to_f64(&instance.threshold)
    );

    let subset = decide_small(&input).unwrap().expect("this input splits evenly");
    println!("oracle subset: {subset:?}");

    let witness = witness_schedule(&instance, &subset).unwrap();
    println!(
        "witness energy {} J < threshold {} J",
        rational::to_f64(&witness.energy),
        rational::to_f64(&instance.threshold)
    );
    println!(
        "witness schedule valid: {}",
        validate_gadget_schedule(&instance, &witness.schedule).is_empty()
    );
    println!(
        "energy recomputed from the schedule: {} J",
        rational::to_f64(&schedule_energy(&instance, &witness.schedule))
    );

    for values in [vec![1u64, 1, 2], vec![3, 5], vec![3, 5, 4, 2]] {
        let input = PartitionInput::new(values.clone()).unwrap();
        println!(
            "values {values:?}: splits evenly = {}, threshold equivalence holds = {}",
            decide_small(&input).unwrap().is_some(),
            check_iff(&input, &power).unwrap()
        );
    }
}
