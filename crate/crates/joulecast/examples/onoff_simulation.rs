//! Simulate the optimal and serial schemes with on/off switching costs and
//! watch the gap policy trade idle power against power cycles.
//!
//! Run with: cargo run --example onoff_simulation

use joulecast::rational::{self, int};
use joulecast::schedulers::SchemeKind;
use joulecast::sim::{gap_policy, simulate, BlockPolicy, GapDecision, SimConfig};

fn main() {
    // The policy itself: an 80 W host with a 2 s switch time.
    let p = int(80);
    let alpha = int(2);
    for gap in [1i64, 3, 4, 10] {
        let decision = gap_policy(&p, &alpha, &int(gap));
        let charge = match decision {
            GapDecision::StayOn => 80 * gap,
            GapDecision::OffOn => 2 * 80 * 2,
        };
        println!("gap {gap:>2} s -> {decision:?} ({charge} J)");
    }
    println!();

    // A 10 MB file across 40 hosts under increasing switch times.
    let file = 10 * 8 * 1024 * 1024u64;
    println!("alpha_s,scheme,total_j,switch_events,switch_j,idle_gap_j");
    for alpha in [0i64, 2, 4] {
        for kind in [SchemeKind::Opt, SchemeKind::Serial] {
            let mut config = SimConfig::new(kind, 40, file, file);
            let (padded, block) = BlockPolicy::OptimalBeta.plan(file, 40, &config);
            config.file_bits = padded;
            config.block_bits = block;
            config.switch_seconds = int(alpha);
            let report = simulate(&config).unwrap();
            println!(
                "{alpha},{kind},{},{},{},{}",
                rational::to_f64(&report.energy.total_joules),
                report.switch_events,
                rational::to_f64(&report.switch_joules),
                rational::to_f64(&report.idle_gap_joules),
            );
        }
    }
}
