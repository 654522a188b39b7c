//! Command-line front end.
//!
//! Subcommands: `schedule` (emit a generated schedule in the interchange
//! format), `energy` (account a schedule read back in), `bounds`,
//! `optimal-beta`, `simulate` (one run from a flat config file), `sweep`
//! (preset experiment tables fig3..fig8) and `nphard` (the Partition
//! workbench). Numeric output is CSV with a header row; exit codes are 0 on
//! success, 1 when validation fails (the message names the failing rule) and
//! 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num::rational::BigRational;

use crate::bounds;
use crate::energy::{self, EnergyModel, EnergyOptions, EnergyReport};
use crate::model::{self, HostSpec, SystemSpec};
use crate::rational;
use crate::reduction;
use crate::schedulers::{self, SchemeKind};
use crate::sim::{self, BlockPolicy, Congestion, PowerDist, RateDist, SimConfig, SweepAxis};

/// One megabyte (2^20 bytes) in bits; preset file-size grids count in MB.
const MB_BITS: u64 = 8 * 1024 * 1024;

/// Preset file sizes: ten points log-spaced from 1 MB to 1 GB.
const PRESET_SIZES_MB: [u64; 10] = [1, 2, 5, 10, 22, 47, 102, 219, 474, 1024];

#[derive(Parser)]
#[command(
    name = "joulecast",
    version,
    about = "Slotted file-distribution schedules, exact energy accounting, bounds and simulation"
)]
struct Cli {
    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn decimal_value(s: &str) -> Result<BigRational, String> {
    rational::parse_decimal(s).map_err(|e| e.to_string())
}

/// Flags describing a homogeneous system.
#[derive(Args, Clone)]
struct SystemArgs {
    /// Number of clients.
    #[arg(long)]
    n: u32,
    /// Number of blocks the file splits into.
    #[arg(long)]
    beta: u32,
    /// Nominal host power in watts.
    #[arg(long = "P", value_parser = decimal_value, default_value = "80")]
    power: BigRational,
    /// Per-block energy in joules.
    #[arg(long, value_parser = decimal_value, default_value = "1")]
    delta: BigRational,
    /// Upload capacity in bits per second.
    #[arg(long = "u", default_value_t = 10_000_000)]
    upload_bps: u64,
    /// Download-to-upload capacity ratio.
    #[arg(long = "k", default_value_t = 1)]
    k: u32,
    /// File size in bits; defaults to beta 256 kB blocks.
    #[arg(long = "B")]
    file_bits: Option<u64>,
    /// Switch on/off time in seconds; enables switching costs when positive.
    #[arg(long, value_parser = decimal_value, default_value = "0")]
    alpha: BigRational,
}

impl SystemArgs {
    fn build(&self) -> Result<SystemSpec, CliError> {
        let file_bits = self
            .file_bits
            .unwrap_or(self.beta as u64 * sim::BLOCK_256KB_BITS);
        if self.k == 0 {
            return Err(CliError::validation("k must be a positive integer"));
        }
        let host = HostSpec::from_rationals(
            self.power.clone(),
            self.delta.clone(),
            self.alpha.clone(),
            self.upload_bps,
            self.upload_bps * self.k as u64,
        )
        .map_err(CliError::from_display)?;
        SystemSpec::new(host.clone(), vec![host; self.n as usize], file_bits, self.beta)
            .map_err(CliError::from_display)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a schedule and print it in the interchange format.
    Schedule {
        /// Schedule family to generate.
        #[arg(long, value_parser = ["opt", "alg4", "serial"])]
        kind: String,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Account the energy of a schedule in the interchange format.
    Energy {
        /// Schedule file to read, or `-` for standard input.
        #[arg(long)]
        schedule: PathBuf,
        /// Power model.
        #[arg(long, value_parser = ["two_state", "four_state"], default_value = "two_state")]
        model: String,
        /// Label for the scheme column of the CSV row.
        #[arg(long, default_value = "schedule")]
        label: String,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Print every closed-form bound that applies to the system.
    Bounds {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Print the energy-minimizing block count.
    OptimalBeta {
        /// Nominal host power in watts.
        #[arg(long = "P", value_parser = decimal_value, default_value = "80")]
        power: BigRational,
        /// File size in bits.
        #[arg(long = "B")]
        file_bits: u64,
        /// Upload capacity in bits per second.
        #[arg(long = "u", default_value_t = 10_000_000)]
        upload_bps: u64,
        /// Per-block energy in joules.
        #[arg(long, value_parser = decimal_value, default_value = "1")]
        delta: BigRational,
        /// Number of clients.
        #[arg(long)]
        n: u32,
    },
    /// Run one simulation described by a flat config file.
    Simulate {
        /// Path to the key = value config file.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a preset experiment sweep and print its table.
    Sweep {
        /// Preset name: fig3, fig4, fig5, fig6, fig7 or fig8.
        #[arg(long, value_parser = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"])]
        preset: String,
        /// Comma-separated seeds, one sweep pass per seed.
        #[arg(long, default_value = "42")]
        seeds: String,
        /// Number of clients.
        #[arg(long, default_value_t = 200)]
        n: u32,
    },
    /// Partition-reduction workbench.
    Nphard {
        #[command(subcommand)]
        command: NphardCommand,
    },
}

#[derive(Subcommand)]
enum NphardCommand {
    /// Emit the distribution instance a Partition input reduces to.
    Gen {
        /// Comma-separated positive integers with an even sum.
        #[arg(long)]
        values: String,
        /// Base host power in watts.
        #[arg(long = "P", value_parser = decimal_value, default_value = "1")]
        power: BigRational,
    },
    /// Decide the instance by brute force and verify the energy threshold.
    Check {
        /// Comma-separated positive integers with an even sum.
        #[arg(long)]
        values: String,
        /// Base host power in watts.
        #[arg(long = "P", value_parser = decimal_value, default_value = "1")]
        power: BigRational,
    },
}

#[derive(Debug)]
pub struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn from_display(err: impl std::fmt::Display) -> Self {
        CliError::validation(err.to_string())
    }
}

/// Parses arguments, runs the selected command and streams its output.
/// Returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    let out_path = cli.out.clone();
    match execute(cli.command) {
        Ok(text) => {
            let result = match out_path {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display()))),
                None => out
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::validation(e.to_string())),
            };
            match result {
                Ok(()) => 0,
                Err(err) => {
                    eprintln!("error: {}", err.message);
                    err.code
                }
            }
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    }
}

fn execute(command: Command) -> Result<String, CliError> {
    match command {
        Command::Schedule { kind, system } => cmd_schedule(&kind, &system),
        Command::Energy {
            schedule,
            model,
            label,
            system,
        } => cmd_energy(&schedule, &model, &label, &system),
        Command::Bounds { system } => cmd_bounds(&system),
        Command::OptimalBeta {
            power,
            file_bits,
            upload_bps,
            delta,
            n,
        } => cmd_optimal_beta(&power, file_bits, upload_bps, &delta, n),
        Command::Simulate { config, seed } => cmd_simulate(&config, seed),
        Command::Sweep { preset, seeds, n } => cmd_sweep(&preset, &seeds, n),
        Command::Nphard { command } => match command {
            NphardCommand::Gen { values, power } => cmd_nphard_gen(&values, &power),
            NphardCommand::Check { values, power } => cmd_nphard_check(&values, &power),
        },
    }
}

fn cmd_schedule(kind: &str, system: &SystemArgs) -> Result<String, CliError> {
    let spec = system.build()?;
    let scheme = match kind {
        "opt" => schedulers::opt_schedule(&spec).map_err(CliError::from_display)?,
        "alg4" => schedulers::alg4_schedule(&spec).map_err(CliError::from_display)?,
        "serial" => schedulers::serial_schedule(&spec),
        _ => unreachable!("clap restricts the values"),
    };
    Ok(model::scheme_to_string(&scheme))
}

fn parse_model(name: &str) -> EnergyModel {
    match name {
        "four_state" => EnergyModel::four_state(),
        _ => EnergyModel::TwoState,
    }
}

fn cmd_energy(
    schedule: &PathBuf,
    model: &str,
    label: &str,
    system: &SystemArgs,
) -> Result<String, CliError> {
    let spec = system.build()?;
    let text = if schedule.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::validation(e.to_string()))?;
        buf
    } else {
        std::fs::read_to_string(schedule).map_err(|e| {
            CliError::validation(format!("cannot read {}: {e}", schedule.display()))
        })?
    };
    let scheme = model::parse_scheme(&text).map_err(CliError::from_display)?;
    let report = model::validate_scheme(&spec, &scheme);
    if !report.ok() {
        return Err(CliError::validation(format!("invalid schedule:\n{report}")));
    }
    use num::Zero;
    let model = parse_model(model);
    let options = EnergyOptions {
        switch_seconds_enabled: !system.alpha.is_zero(),
    };
    let energy_report = energy::scheme_energy(&spec, &scheme, &model, &options)
        .map_err(CliError::from_display)?;
    let mut out = String::new();
    let _ = writeln!(out, "{}", EnergyReport::CSV_HEADER);
    let _ = writeln!(out, "{}", energy_report.csv_row(label, &spec, &model));
    Ok(out)
}

fn cmd_bounds(system: &SystemArgs) -> Result<String, CliError> {
    let spec = system.build()?;
    let mut out = String::new();
    let _ = writeln!(out, "formula,n,beta,k,joules");
    let mut push = |r: &bounds::BoundResult| {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.formula,
            spec.n(),
            spec.block_count(),
            spec.k(),
            rational::to_f64(&r.joules)
        );
    };
    if spec.k() == 1 {
        push(&bounds::lower_bound_k1(&spec).map_err(CliError::from_display)?);
        push(&bounds::optimal_energy_k1(&spec).map_err(CliError::from_display)?);
    } else {
        let delta = spec.delta(crate::model::HostId::Client(0));
        push(&bounds::lower_bound_homogeneous(
            spec.n(),
            spec.block_count(),
            &delta,
        ));
        if spec.block_count() > spec.n() {
            push(
                &bounds::alg4_energy(spec.n(), spec.block_count(), &delta)
                    .map_err(CliError::from_display)?,
            );
        }
    }
    Ok(out)
}

fn cmd_optimal_beta(
    power: &BigRational,
    file_bits: u64,
    upload_bps: u64,
    delta: &BigRational,
    n: u32,
) -> Result<String, CliError> {
    let result = bounds::optimal_block_count(power, file_bits, upload_bps, delta, n)
        .map_err(CliError::from_display)?;
    if result.delta_was_zero {
        eprintln!("note: delta = 0 makes the optimum unbounded; clamped to n");
    }
    Ok(format!("beta\n{}\n", result.beta))
}

fn cmd_simulate(config: &PathBuf, seed: Option<u64>) -> Result<String, CliError> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", config.display())))?;
    let mut config = SimConfig::from_config_str(&text).map_err(CliError::from_display)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let report = sim::simulate(&config).map_err(CliError::from_display)?;
    let mut out = String::new();
    let _ = writeln!(out, "{}", sim::SimReport::CSV_HEADER);
    let _ = writeln!(out, "{}", report.csv_row(&config));
    Ok(out)
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("invalid seed {s:?}")))
        })
        .collect()
}

struct PresetSeries {
    label: String,
    config: SimConfig,
    policy: BlockPolicy,
}

fn preset_series(preset: &str, n: u32) -> Vec<PresetSeries> {
    let base = |scheme: SchemeKind, n: u32| SimConfig::new(scheme, n, MB_BITS, MB_BITS);
    let mut series = Vec::new();
    match preset {
        // Energy per bit vs file size for the three schemes, plus the
        // optimal scheme at other host counts (256 kB blocks).
        "fig3" => {
            for count in [n / 4, n, 2 * n] {
                let count = count.max(1);
                series.push(PresetSeries {
                    label: format!("opt_n{count}"),
                    config: base(SchemeKind::Opt, count),
                    policy: BlockPolicy::Fixed256kB,
                });
            }
            series.push(PresetSeries {
                label: format!("serial_n{n}"),
                config: base(SchemeKind::Serial, n),
                policy: BlockPolicy::Fixed256kB,
            });
            series.push(PresetSeries {
                label: format!("parallel_n{n}"),
                config: base(SchemeKind::Parallel, n),
                policy: BlockPolicy::Fixed256kB,
            });
        }
        // Fixed 256 kB blocks against the energy-minimizing block count.
        "fig4" => {
            series.push(PresetSeries {
                label: "opt_fixed_256kB".into(),
                config: base(SchemeKind::Opt, n),
                policy: BlockPolicy::Fixed256kB,
            });
            series.push(PresetSeries {
                label: "opt_optimal_beta".into(),
                config: base(SchemeKind::Opt, n),
                policy: BlockPolicy::OptimalBeta,
            });
        }
        // On/off switching costs.
        "fig5" => {
            for alpha in [0i64, 2, 4] {
                for scheme in [SchemeKind::Opt, SchemeKind::Serial] {
                    let mut config = base(scheme, n);
                    config.switch_seconds = rational::int(alpha);
                    series.push(PresetSeries {
                        label: format!("{scheme}_a{alpha}"),
                        config,
                        policy: BlockPolicy::Fixed256kB,
                    });
                }
            }
        }
        // Two-state against the load-proportional four-state model.
        "fig6" => {
            for scheme in [SchemeKind::Opt, SchemeKind::Serial] {
                for (tag, model) in [
                    ("two_state", EnergyModel::TwoState),
                    ("four_state", EnergyModel::four_state()),
                ] {
                    let mut config = base(scheme, n);
                    config.energy_model = model;
                    series.push(PresetSeries {
                        label: format!("{scheme}_{tag}"),
                        config,
                        policy: BlockPolicy::Fixed256kB,
                    });
                }
            }
        }
        // Heterogeneous nominal power.
        "fig7" => {
            for scheme in [SchemeKind::Opt, SchemeKind::Serial] {
                for (tag, dist) in [
                    ("fixed", PowerDist::Fixed(rational::int(80))),
                    (
                        "gaussian",
                        PowerDist::Gaussian {
                            mean: 80.0,
                            std: 20.0,
                        },
                    ),
                    ("exponential", PowerDist::Exponential { mean: 80.0 }),
                ] {
                    let mut config = base(scheme, n);
                    config.power_dist = dist;
                    series.push(PresetSeries {
                        label: format!("{scheme}_{tag}"),
                        config,
                        policy: BlockPolicy::Fixed256kB,
                    });
                }
            }
        }
        // Heterogeneous access speeds with congestion.
        "fig8" => {
            for scheme in [SchemeKind::Opt, SchemeKind::Serial] {
                series.push(PresetSeries {
                    label: format!("{scheme}_homogeneous"),
                    config: base(scheme, n),
                    policy: BlockPolicy::Fixed256kB,
                });
                let mut config = base(scheme, n);
                config.rate_dist = RateDist::ExponentialNominal {
                    mean_bps: 10_000_000.0,
                };
                config.congestion = Congestion::GaussianFactor { std: 0.07 };
                series.push(PresetSeries {
                    label: format!("{scheme}_heterogeneous"),
                    config,
                    policy: BlockPolicy::Fixed256kB,
                });
            }
        }
        _ => unreachable!("clap restricts the values"),
    }
    series
}

fn cmd_sweep(preset: &str, seeds: &str, n: u32) -> Result<String, CliError> {
    let seeds = parse_seeds(seeds)?;
    let sizes: Vec<u64> = PRESET_SIZES_MB.iter().map(|mb| mb * MB_BITS).collect();
    let mut out = String::new();
    let _ = writeln!(out, "series,{}", sim::SimReport::CSV_HEADER);
    for series in preset_series(preset, n) {
        let rows = sim::sweep(
            &series.config,
            &SweepAxis::FileSize(sizes.clone()),
            series.policy,
            &seeds,
        )
        .map_err(CliError::from_display)?;
        for row in rows {
            let _ = writeln!(out, "{},{}", series.label, row.report.csv_row(&row.config));
        }
    }
    Ok(out)
}

fn parse_values(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("invalid value {s:?}")))
        })
        .collect()
}

fn cmd_nphard_gen(values: &str, power: &BigRational) -> Result<String, CliError> {
    let input =
        reduction::PartitionInput::new(parse_values(values)?).map_err(CliError::from_display)?;
    let instance = reduction::build_instance(&input, power).map_err(CliError::from_display)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# blocks={} P={} Pprime={} threshold={}",
        instance.block_count,
        rational::to_f64(&instance.power),
        rational::to_f64(&instance.sink_power),
        rational::to_f64(&instance.threshold),
    );
    let _ = writeln!(out, "host,upload_blocks_per_slot,download_blocks_per_slot,power_w");
    for host in &instance.hosts {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            host.id,
            host.upload_blocks,
            host.download_blocks,
            rational::to_f64(&host.power)
        );
    }
    Ok(out)
}

fn cmd_nphard_check(values: &str, power: &BigRational) -> Result<String, CliError> {
    let input =
        reduction::PartitionInput::new(parse_values(values)?).map_err(CliError::from_display)?;
    let instance = reduction::build_instance(&input, power).map_err(CliError::from_display)?;
    let iff = reduction::check_iff(&input, power).map_err(CliError::from_display)?;
    let verdict = match reduction::decide_small(&input).map_err(CliError::from_display)? {
        Some(subset) => {
            let witness =
                reduction::witness_schedule(&instance, &subset).map_err(CliError::from_display)?;
            let indices: Vec<String> = subset.iter().map(|i| i.to_string()).collect();
            format!(
                "partition=yes subset={} witness_j={} threshold_j={} iff={}\n",
                indices.join("+"),
                rational::to_f64(&witness.energy),
                rational::to_f64(&instance.threshold),
                if iff { "ok" } else { "violated" },
            )
        }
        None => format!(
            "partition=no threshold_j={} iff={}\n",
            rational::to_f64(&instance.threshold),
            if iff { "ok" } else { "violated" },
        ),
    };
    if iff {
        Ok(verdict)
    } else {
        Err(CliError::validation(verdict))
    }
}
