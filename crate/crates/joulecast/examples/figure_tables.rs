//! Produce a plot-ready comparison table: energy per bit against file size
//! for the three schemes, the same sweep the `sweep --preset fig3` command
//! runs at full scale.
//!
//! Run with: cargo run --example figure_tables

use joulecast::schedulers::SchemeKind;
use joulecast::sim::{sweep, BlockPolicy, SimConfig, SweepAxis};

fn main() {
    let n = 20u32;
    let mb = 8 * 1024 * 1024u64;
    let sizes: Vec<u64> = [1u64, 4, 16, 64, 256].iter().map(|s| s * mb).collect();

    println!("series,{}", joulecast::sim::SimReport::CSV_HEADER);
    for kind in [SchemeKind::Opt, SchemeKind::Serial, SchemeKind::Parallel] {
        let base = SimConfig::new(kind, n, mb, mb);
        let rows = sweep(
            &base,
            &SweepAxis::FileSize(sizes.clone()),
            BlockPolicy::Fixed256kB,
            &[42],
        )
        .unwrap();
        for row in rows {
            println!("{kind},{}", row.report.csv_row(&row.config));
        }
    }
}
