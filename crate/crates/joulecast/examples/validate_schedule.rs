//! Parse a handwritten schedule from the interchange format, enumerate every
//! rule it breaks, and classify the transfer graph of each healthy slot.
//!
//! Run with: cargo run --example validate_schedule

use joulecast::model::{
    classify_slot, parse_scheme, replay_states, validate_scheme, SlotKind, SystemSpec,
};

const SCHEDULE: &str = "
slot 1
S H0 0
slot 2
S H1 1
H0 H1 1
slot 3
H0 H1 2
H1 H0 1
slot 4
H1 H0 1
";

fn main() {
    let spec = SystemSpec::homogeneous(2, 80.0, 1.0, 10_000_000, 1, 2 * 2_097_152, 2).unwrap();
    let scheme = parse_scheme(SCHEDULE).unwrap();

    let report = validate_scheme(&spec, &scheme);
    println!("valid: {}", report.ok());
    for violation in &report.violations {
        println!("  {violation}");
    }

    for (i, slot) in scheme.slots.iter().enumerate() {
        match classify_slot(&spec, slot) {
            Ok(SlotKind::Tree) => println!("slot {}: tree", i + 1),
            Ok(SlotKind::Unicyclic) => println!("slot {}: unicyclic", i + 1),
            Err(err) => println!("slot {}: {err}", i + 1),
        }
    }

    // A correct schedule replays to complete states.
    let fixed = parse_scheme(
        "slot 1\nS H0 0\nslot 2\nS H1 1\nslot 3\nH0 H1 0\nH1 H0 1\n",
    )
    .unwrap();
    let states = replay_states(&spec, &fixed).unwrap();
    println!("fixed schedule final states:");
    for (i, state) in states.last().unwrap().iter().enumerate() {
        println!("  H{i}: {:?}", state.blocks_held);
    }
}
