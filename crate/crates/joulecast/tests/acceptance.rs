//! Acceptance suite: one test per criterion, each printing a verdict line.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

use std::collections::BTreeSet;
use std::time::Instant;

use num::rational::BigRational;
use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use joulecast::bounds;
use joulecast::energy::{
    block_costs, scheme_energy, slot_cost, verify_block_slot_consistency, EnergyModel,
    EnergyOptions,
};
use joulecast::model::{
    validate_scheme, HostId, HostSpec, Scheme, SlotSchedule, SystemSpec, Transfer,
};
use joulecast::rational::{self, int, ratio, uint};
use joulecast::reduction;
use joulecast::schedulers::{
    alg4_schedule, opt_schedule, parallel_plan, serial_schedule, SchemeKind,
};
use joulecast::sim::{simulate, BlockPolicy, PowerDist, SimConfig};

fn pass(number: u32, name: &str, detail: &str) {
    println!("ACCEPTANCE {number:02} {name}: PASS ({detail})");
}

fn unit_delta_spec(n: u32, beta: u32, k: u32) -> SystemSpec {
    SystemSpec::homogeneous(n, 0.0, 1.0, 10, k, beta as u64 * 10, beta).unwrap()
}

fn heterogeneous_spec(n: u32, beta: u32, k: u32, rng: &mut ChaCha12Rng) -> SystemSpec {
    let mk = |d: u32| HostSpec::new(0.0, d as f64, 0.0, 10, 10 * k as u64).unwrap();
    let server = mk(rng.gen_range(1..100));
    let clients: Vec<HostSpec> = (0..n).map(|_| mk(rng.gen_range(1..100))).collect();
    SystemSpec::new(server, clients, beta as u64 * 10, beta).unwrap()
}

fn total_energy(spec: &SystemSpec, scheme: &Scheme) -> BigRational {
    scheme_energy(spec, scheme, &EnergyModel::TwoState, &EnergyOptions::default())
        .unwrap()
        .total_joules
}

/// Criterion 1: the optimal schemes meet the k = 1 bound with exact
/// arithmetic on the full (n, beta) grid, homogeneous and randomized
/// heterogeneous.
#[test]
fn criterion_01_optimality_identity() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(10_001);
    let mut checked = 0u32;
    for n in 1..=50u32 {
        for beta in 1..=50u32 {
            let spec = unit_delta_spec(n, beta, 1);
            let scheme = opt_schedule(&spec).unwrap();
            assert_eq!(
                total_energy(&spec, &scheme),
                bounds::lower_bound_k1(&spec).unwrap().joules,
                "homogeneous n={n} beta={beta}"
            );
            let spec = heterogeneous_spec(n, beta, 1, &mut rng);
            let scheme = opt_schedule(&spec).unwrap();
            assert_eq!(
                total_energy(&spec, &scheme),
                bounds::lower_bound_k1(&spec).unwrap().joules,
                "heterogeneous n={n} beta={beta}"
            );
            checked += 2;
        }
    }
    for spec in [
        unit_delta_spec(200, 200, 1),
        heterogeneous_spec(200, 200, 1, &mut rng),
    ] {
        let scheme = opt_schedule(&spec).unwrap();
        assert_eq!(
            total_energy(&spec, &scheme),
            bounds::lower_bound_k1(&spec).unwrap().joules,
            "spot check at (200, 200)"
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 1 took {elapsed:?}");
    pass(1, "optimality-identity", &format!("{checked} schemes, {elapsed:?}"));
}

/// Builds a random valid scheme: every slot respects the degree rules and
/// causality, every client ends complete. Used as the quantifier for the
/// block-cost consistency check.
fn random_valid_scheme(spec: &SystemSpec, rng: &mut ChaCha12Rng) -> Scheme {
    let n = spec.n();
    let beta = spec.block_count();
    let k = spec.k() as usize;
    let mut held: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n as usize];
    let mut slots = Vec::new();
    let complete = |held: &[BTreeSet<u32>]| held.iter().all(|h| h.len() as u32 == beta);
    while !complete(&held) {
        let mut transfers: Vec<Transfer> = Vec::new();
        let mut in_deg: Vec<usize> = vec![0; n as usize];
        let mut pending: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n as usize];
        let mut senders: Vec<HostId> = (0..n).map(HostId::Client).collect();
        senders.push(HostId::Server);
        senders.shuffle(rng);
        for sender in senders {
            if rng.gen_bool(0.25) {
                continue; // this host sits the slot out
            }
            let holdings: Vec<u32> = match sender {
                HostId::Server => (0..beta).collect(),
                HostId::Client(i) => held[i as usize].iter().copied().collect(),
            };
            if holdings.is_empty() {
                continue;
            }
            let mut receivers: Vec<u32> = (0..n).collect();
            receivers.shuffle(rng);
            'receiver: for r in receivers {
                if HostId::Client(r) == sender || in_deg[r as usize] >= k {
                    continue;
                }
                let mut blocks = holdings.clone();
                blocks.shuffle(rng);
                for b in blocks {
                    if !held[r as usize].contains(&b) && !pending[r as usize].contains(&b) {
                        transfers.push(Transfer::new(sender, HostId::Client(r), b));
                        in_deg[r as usize] += 1;
                        pending[r as usize].insert(b);
                        break 'receiver;
                    }
                }
            }
        }
        if transfers.is_empty() {
            // Force progress: serve the first missing block from the server.
            let (r, b) = (0..n)
                .find_map(|i| {
                    (0..beta)
                        .find(|b| !held[i as usize].contains(b))
                        .map(|b| (i, b))
                })
                .expect("some client is incomplete");
            transfers.push(Transfer::new(HostId::Server, HostId::Client(r), b));
            pending[r as usize].insert(b);
        }
        for t in &transfers {
            if let HostId::Client(i) = t.to {
                held[i as usize].insert(t.block);
            }
        }
        slots.push(SlotSchedule::new(transfers));
    }
    Scheme::new(slots)
}

/// Criterion 2: block costs sum to slot costs for every slot of 10^4
/// randomized valid schemes and of all generated schemes.
#[test]
fn criterion_02_block_slot_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(10_002);
    let mut slots_checked = 0usize;
    for round in 0..10_000 {
        let n = rng.gen_range(1..=5);
        let beta = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=2);
        let spec = heterogeneous_spec(n, beta, k, &mut rng);
        let scheme = random_valid_scheme(&spec, &mut rng);
        let report = validate_scheme(&spec, &scheme);
        assert!(report.ok(), "round {round}: generator broke validity: {report}");
        assert!(
            verify_block_slot_consistency(&spec, &scheme),
            "round {round}: inconsistent block costs"
        );
        slots_checked += scheme.makespan();
    }
    for n in 1..=12u32 {
        for beta in 1..=12u32 {
            let spec = unit_delta_spec(n, beta, 1);
            let scheme = opt_schedule(&spec).unwrap();
            assert!(verify_block_slot_consistency(&spec, &scheme));
            let serial = serial_schedule(&spec);
            assert!(verify_block_slot_consistency(&spec, &serial));
            slots_checked += scheme.makespan() + serial.makespan();
            if beta > n {
                let spec = unit_delta_spec(n, beta, 2);
                let scheme = alg4_schedule(&spec).unwrap();
                assert!(verify_block_slot_consistency(&spec, &scheme));
                slots_checked += scheme.makespan();
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 2 took {elapsed:?}");
    pass(
        2,
        "block-slot-consistency",
        &format!("{slots_checked} slots, {elapsed:?}"),
    );
}

/// Criterion 3: the k = 2 scheme's measured energy exceeds the homogeneous
/// lower bound by exactly the closed-form remainder term.
#[test]
fn criterion_03_alg4_gap() {
    let start = Instant::now();
    let one = int(1);
    let mut checked = 0u32;
    for n in 2..=50u32 {
        for beta in (n + 1)..=200u32 {
            let spec = unit_delta_spec(n, beta, 2);
            let scheme = alg4_schedule(&spec).unwrap();
            let measured = total_energy(&spec, &scheme);
            let gap = &measured - bounds::lower_bound_homogeneous(n, beta, &one).joules;
            let expected = uint((beta / n) as u64 + (beta % n) as u64 - 1);
            assert_eq!(gap, expected, "n={n} beta={beta}");
            assert_eq!(
                measured,
                bounds::alg4_energy(n, beta, &one).unwrap().joules,
                "n={n} beta={beta}"
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 3 took {elapsed:?}");
    pass(3, "alg4-gap", &format!("{checked} schemes, {elapsed:?}"));
}

/// Criterion 4: the rounded block count is the exact argmin of the
/// homogeneous energy formula over an exhaustive integer sweep.
#[test]
fn criterion_04_optimal_block_count() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(10_004);
    for round in 0..100 {
        let power = uint(rng.gen_range(1..=300));
        let file_bits = rng.gen_range(1..=2_000u64) * 1_000_000;
        let upload = *[1_000_000u64, 10_000_000, 100_000_000]
            .choose(&mut rng)
            .unwrap();
        let delta = uint(rng.gen_range(1..=20));
        let n = rng.gen_range(1..=300u32);
        let best = bounds::optimal_block_count(&power, file_bits, upload, &delta, n)
            .unwrap()
            .beta;
        let e_best = bounds::homogeneous_opt_energy(n, best, &power, file_bits, upload, &delta);
        let sqrt_floor = rational::floor_sqrt(&(&power * uint(file_bits) / (uint(upload) * &delta)));
        let sqrt_floor: u32 = sqrt_floor.try_into().unwrap_or(u32::MAX);
        let hi = (2 * n).max(2u32.saturating_mul(sqrt_floor.saturating_add(1)));
        for beta in 1..=hi {
            let e = bounds::homogeneous_opt_energy(n, beta, &power, file_bits, upload, &delta);
            assert!(
                e_best <= e,
                "round {round}: beta* = {best} loses to beta = {beta}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "criterion 4 took {elapsed:?}");
    pass(4, "optimal-block-count", &format!("100 tuples, {elapsed:?}"));
}

/// Criterion 5: at n = beta = 200 the collaborative optimum halves the
/// serial cost: the ratio is exactly (n + 1) / (2n) = 0.5025, analytically
/// and in simulation with instantaneous switching.
#[test]
fn criterion_05_half_serial_cost() {
    let start = Instant::now();
    let spec =
        SystemSpec::homogeneous(200, 80.0, 1.0, 10_000_000, 1, 200 * 2_097_152, 200).unwrap();
    let opt = total_energy(&spec, &opt_schedule(&spec).unwrap());
    let serial = total_energy(&spec, &serial_schedule(&spec));
    let analytic_ratio = &opt / &serial;
    assert_eq!(analytic_ratio, ratio(201, 400));
    assert_eq!(analytic_ratio, rational::parse_decimal("0.5025").unwrap());
    assert!(
        (rational::to_f64(&analytic_ratio) - 0.5025).abs() < 1e-9,
        "analytic ratio {analytic_ratio}"
    );

    let file_bits = 200 * 2_097_152u64;
    let opt_sim = simulate(&SimConfig::new(SchemeKind::Opt, 200, file_bits, 2_097_152)).unwrap();
    let serial_sim =
        simulate(&SimConfig::new(SchemeKind::Serial, 200, file_bits, 2_097_152)).unwrap();
    let sim_ratio = &opt_sim.energy.total_joules / &serial_sim.energy.total_joules;
    assert_eq!(sim_ratio, ratio(201, 400));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "criterion 5 took {elapsed:?}");
    pass(5, "half-serial-cost", &format!("ratio 201/400, {elapsed:?}"));
}

/// Criterion 6: the parallel baseline burns at least 50x the serial energy
/// in the default homogeneous setting.
#[test]
fn criterion_06_parallel_penalty() {
    let start = Instant::now();
    // 100 MB file at the optimal block count (80 blocks of 10 Mb).
    let spec =
        SystemSpec::homogeneous(200, 80.0, 1.0, 10_000_000, 1, 800_000_000, 80).unwrap();
    let serial = total_energy(&spec, &serial_schedule(&spec));
    let parallel = joulecast::energy::plan_energy(
        &spec,
        &parallel_plan(&spec),
        &EnergyModel::TwoState,
    )
    .total_joules;
    let ratio_analytic = &parallel / &serial;
    assert!(
        ratio_analytic >= int(50),
        "parallel/serial = {}",
        rational::to_f64(&ratio_analytic)
    );

    let opt_cfg = SimConfig::new(SchemeKind::Parallel, 200, 800_000_000, 10_000_000);
    let serial_cfg = SimConfig::new(SchemeKind::Serial, 200, 800_000_000, 10_000_000);
    let sim_ratio = simulate(&opt_cfg).unwrap().energy.total_joules
        / simulate(&serial_cfg).unwrap().energy.total_joules;
    assert!(sim_ratio >= int(50));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "criterion 6 took {elapsed:?}");
    pass(
        6,
        "parallel-penalty",
        &format!(
            "parallel/serial = {:.1}, {elapsed:?}",
            rational::to_f64(&ratio_analytic)
        ),
    );
}

/// Criterion 7: switching costs never lower energy per bit, and the optimal
/// scheme stays at or below serial at every file size for every switch time.
#[test]
fn criterion_07_onoff_monotonicity() {
    let start = Instant::now();
    const MB_BITS: u64 = 8 * 1024 * 1024;
    let sizes_mb = [1u64, 2, 5, 10, 22, 47, 102, 219, 474, 1024];
    let alphas = [0i64, 2, 4];
    let mut per_bit =
        vec![vec![vec![BigRational::zero(); sizes_mb.len()]; alphas.len()]; 2];
    for (s, mb) in sizes_mb.iter().enumerate() {
        let file = mb * MB_BITS;
        for (a, alpha) in alphas.iter().enumerate() {
            for (which, kind) in [SchemeKind::Opt, SchemeKind::Serial].into_iter().enumerate() {
                let mut config = SimConfig::new(kind, 200, file, file);
                let (padded, block) = BlockPolicy::OptimalBeta.plan(file, 200, &config);
                config.file_bits = padded;
                config.block_bits = block;
                config.switch_seconds = int(*alpha);
                let report = simulate(&config).unwrap();
                per_bit[which][a][s] = report.energy.energy_per_bit;
            }
        }
    }
    for series in &per_bit {
        for a in 1..alphas.len() {
            for s in 0..sizes_mb.len() {
                assert!(
                    series[a][s] >= series[a - 1][s],
                    "energy per bit decreased with alpha at size {} MB",
                    sizes_mb[s]
                );
            }
        }
    }
    for a in 0..alphas.len() {
        for s in 0..sizes_mb.len() {
            assert!(
                per_bit[0][a][s] <= per_bit[1][a][s],
                "opt above serial at {} MB, alpha = {}",
                sizes_mb[s],
                alphas[a]
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 7 took {elapsed:?}");
    pass(
        7,
        "onoff-monotonicity",
        &format!("{} runs, {elapsed:?}", 2 * alphas.len() * sizes_mb.len()),
    );
}

/// Criterion 8: with beta >= n the optimal scheme's energy depends on host
/// powers only through their sum (verified exactly), and sampled populations
/// land within 5% of the homogeneous value on average.
#[test]
fn criterion_08_heterogeneous_power_invariance() {
    let start = Instant::now();
    let n = 200u32;
    let beta = 200u32;
    let file_bits = 200 * 41_943_040u64; // 1 GB, 200 blocks
    let homogeneous =
        SystemSpec::homogeneous(n, 80.0, 1.0, 10_000_000, 1, file_bits, beta).unwrap();
    let homogeneous_total = total_energy(&homogeneous, &opt_schedule(&homogeneous).unwrap());

    // Exact arm: replace a sampled power set by the uniform set with the
    // same sum; the optimal scheme's energy must not change at all.
    for dist in [
        PowerDist::Gaussian {
            mean: 80.0,
            std: 20.0,
        },
        PowerDist::Exponential { mean: 80.0 },
    ] {
        let mut config = SimConfig::new(SchemeKind::Opt, n, file_bits, file_bits / beta as u64);
        config.power_dist = dist;
        config.seed = 99;
        let sampled = joulecast::sim::sample_hosts(&config, config.seed);
        let spec = SystemSpec::new(
            sampled[0].clone(),
            sampled[1..].to_vec(),
            file_bits,
            beta,
        )
        .unwrap();
        let sampled_total = total_energy(&spec, &opt_schedule(&spec).unwrap());

        let sum: BigRational = sampled
            .iter()
            .map(|h| h.power_watts.clone())
            .fold(BigRational::zero(), |a, b| a + b);
        let mean_power = sum / uint(n as u64 + 1);
        let uniform = HostSpec::from_rationals(
            mean_power,
            int(1),
            int(0),
            10_000_000,
            10_000_000,
        )
        .unwrap();
        let uniform_spec =
            SystemSpec::new(uniform.clone(), vec![uniform; n as usize], file_bits, beta).unwrap();
        let uniform_total = total_energy(&uniform_spec, &opt_schedule(&uniform_spec).unwrap());
        assert_eq!(sampled_total, uniform_total, "sum invariance must be exact");
    }

    // Statistical arm: across 30 seeds the mean energy per bit stays within
    // 5% of the homogeneous-80 value.
    for dist in [
        PowerDist::Gaussian {
            mean: 80.0,
            std: 20.0,
        },
        PowerDist::Exponential { mean: 80.0 },
    ] {
        let mut sum = BigRational::zero();
        for seed in 0..30u64 {
            let mut config =
                SimConfig::new(SchemeKind::Opt, n, file_bits, file_bits / beta as u64);
            config.power_dist = dist.clone();
            config.seed = seed;
            sum += simulate(&config).unwrap().energy.energy_per_bit;
        }
        let mean = sum / int(30);
        let reference = &homogeneous_total / uint(n as u64 * file_bits);
        let deviation = (rational::to_f64(&mean) - rational::to_f64(&reference)).abs()
            / rational::to_f64(&reference);
        assert!(
            deviation < 0.05,
            "mean energy per bit off by {:.2}% for {dist:?}",
            100.0 * deviation
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 8 took {elapsed:?}");
    pass(
        8,
        "heterogeneous-power-invariance",
        &format!("exact + 60 sampled runs, {elapsed:?}"),
    );
}

/// Criterion 9: the Partition reduction is sound on 1000 random instances
/// and on the worked example.
#[test]
fn criterion_09_reduction_soundness() {
    let start = Instant::now();
    let worked = reduction::PartitionInput::new(vec![1, 1, 2]).unwrap();
    let instance = reduction::build_instance(&worked, &int(1)).unwrap();
    let subset = reduction::decide_small(&worked).unwrap().unwrap();
    let witness = reduction::witness_schedule(&instance, &subset).unwrap();
    assert!(witness.energy < instance.threshold);
    assert_eq!(instance.threshold, int(45));
    let single = reduction::witness_schedule(&instance, &[2]).unwrap();
    assert_eq!(single.energy, int(40));

    let mut rng = ChaCha12Rng::seed_from_u64(10_009);
    let mut checked = 0u32;
    while checked < 1000 {
        let k = rng.gen_range(2..=12);
        let values: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=50)).collect();
        let Ok(input) = reduction::PartitionInput::new(values) else {
            continue;
        };
        let power = uint(rng.gen_range(1..=10));
        assert!(reduction::check_iff(&input, &power).unwrap());
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 9 took {elapsed:?}");
    pass(
        9,
        "reduction-soundness",
        &format!("{checked} instances + worked example, {elapsed:?}"),
    );
}

/// Criterion 10: absolute energy-per-bit curves from the study are not
/// reproduced (exact hardware constants and the survey access-speed data are
/// unavailable); what is checked instead is the scheme ordering on the
/// preset grid, with the exact identities covered by criteria 1-4.
#[test]
fn criterion_10_preset_ordering() {
    let start = Instant::now();
    const MB_BITS: u64 = 8 * 1024 * 1024;
    let sizes_mb = [1u64, 5, 22, 102, 474];
    let n = 16u32;
    for mb in sizes_mb {
        let file = mb * MB_BITS;
        let mut per_bit = Vec::new();
        for kind in [SchemeKind::Opt, SchemeKind::Serial, SchemeKind::Parallel] {
            let mut config = SimConfig::new(kind, n, file, file);
            let (padded, block) = BlockPolicy::Fixed256kB.plan(file, n, &config);
            config.file_bits = padded;
            config.block_bits = block;
            per_bit.push(simulate(&config).unwrap().energy.energy_per_bit);
        }
        assert!(per_bit[0] <= per_bit[1], "opt above serial at {mb} MB");
        assert!(per_bit[1] <= per_bit[2], "serial above parallel at {mb} MB");
    }
    let elapsed = start.elapsed();
    pass(
        10,
        "preset-ordering",
        &format!(
            "absolute curves out of scope; ordering verified on {} sizes, {elapsed:?}",
            sizes_mb.len()
        ),
    );
}

/// The block-cost table itself survives a spot audit: indicators match their
/// definitions on a random scheme (selected entries recomputed by hand).
#[test]
fn block_cost_table_spot_audit() {
    let mut rng = ChaCha12Rng::seed_from_u64(10_017);
    let spec = heterogeneous_spec(4, 4, 2, &mut rng);
    let scheme = random_valid_scheme(&spec, &mut rng);
    let costs = block_costs(&spec, &scheme).unwrap();
    for entry in &costs {
        let slot = &scheme.slots[entry.slot - 1];
        // U: the serving host downloads nothing in this slot.
        let sender_downloads = slot.transfers.iter().any(|t| t.to == entry.server_of_block);
        assert_eq!(entry.u_indicator, !sender_downloads);
        // D: this is the minimum-index block among the receiver's downloads.
        let min_block = slot
            .transfers
            .iter()
            .filter(|t| t.to == entry.receiver)
            .map(|t| t.block)
            .min()
            .unwrap();
        assert_eq!(entry.d_indicator, entry.block == min_block);
        let mut expected = BigRational::zero();
        if entry.d_indicator {
            expected += spec.delta(entry.receiver);
        }
        if entry.u_indicator {
            expected += spec.delta(entry.server_of_block);
        }
        assert_eq!(entry.cost_joules, expected);
    }
    let sums: BigRational = costs.iter().map(|e| e.cost_joules.clone()).sum();
    let slot_sums: BigRational = (1..=scheme.makespan())
        .map(|t| slot_cost(&spec, &scheme, t).unwrap())
        .sum();
    assert_eq!(sums, slot_sums);
}
