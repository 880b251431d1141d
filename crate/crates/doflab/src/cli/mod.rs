//! Command-line front end.
//!
//! Subcommands map one-to-one onto the library's operations and emit CSV
//! with a fixed header per subcommand (documented in `docs/formats.md`):
//!
//! - `bounds` — outer-bound regions, exact LP maxima, and closed forms.
//! - `align` — Monte Carlo alignment/decodability verification.
//! - `slope` — ZF rate sweep and pre-log slope fit.
//! - `replay` — genie replay of the 4-node X network.
//! - `feedback-demo` — the 3-node feedback zero-forcing demo.
//! - `equiv-check` — dual-simulation check of the full-duplex equivalence.
//!
//! Exit codes: 0 = all checks pass, 1 = a check failed, 2 = usage or
//! parameter error. Output goes to stdout or `--out FILE`; identical argv,
//! config and seeds produce byte-identical CSV. `DOFLAB_THREADS` caps
//! trial parallelism; ordering of output rows is by trial index regardless
//! of execution order.

mod config;

pub use config::{load_config, parse_config};

use crate::alignment::{self, verify_trials};
use crate::bounds::{build_fd_region, build_outer_region, formula, max_sum_dof, Formula};
use crate::converse::{genie_replay, simulate_four_node};
use crate::error::{Error, Result};
use crate::network::{
    bitwise_eq, forward_simulate, sample_instance, tags, RandomLinearEncoder, SampleOptions,
    SimConfig, Topology,
};
use crate::ratesim::{dof_slope, feedback_demo, AlignmentRun, RateQuery};
use crate::rng;
use crate::transforms::fd_equivalence;
use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "doflab",
    version,
    about = "Degrees-of-freedom laboratory for time-varying wireless networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outer-bound regions and closed-form DoF values, maximized exactly.
    Bounds(BoundsArgs),
    /// Verify alignment containment and decodability over random seeds.
    Align(AlignArgs),
    /// Zero-forcing rate sweep and pre-log slope regression.
    Slope(SlopeArgs),
    /// Genie replay of the 4-node X network.
    Replay(ReplayArgs),
    /// Feedback zero-forcing demo and its no-feedback baseline.
    FeedbackDemo(FeedbackArgs),
    /// Dual-simulation fidelity of the full-duplex equivalence.
    EquivCheck(EquivArgs),
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Region family: `x` (S x D X network) or `fd` (K-node full duplex).
    #[arg(long)]
    topology: Option<String>,
    /// Closed form only: ic_dof | x_dof | fd_lower | fd_upper |
    /// half_duplex | parallel_relay.
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    sources: Option<usize>,
    #[arg(long)]
    destinations: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    relays: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct AlignArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Draw gains independently instead of the reciprocal default.
    #[arg(long)]
    independent: bool,
    /// Emit one row per check instead of one row per trial.
    #[arg(long)]
    detail: bool,
    #[arg(long)]
    magnitude_min: Option<f64>,
    #[arg(long)]
    magnitude_max: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SlopeArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    snr_min: Option<f64>,
    #[arg(long)]
    snr_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fit_min_db: Option<f64>,
    #[arg(long)]
    independent: bool,
    #[arg(long)]
    magnitude_min: Option<f64>,
    #[arg(long)]
    magnitude_max: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    block_len: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Antennas of the grouped source node.
    #[arg(long)]
    m2: Option<usize>,
    /// Antennas of the grouped destination node.
    #[arg(long)]
    m3: Option<usize>,
    #[arg(long)]
    magnitude_min: Option<f64>,
    #[arg(long)]
    magnitude_max: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct FeedbackArgs {
    #[arg(long)]
    snr_min: Option<f64>,
    #[arg(long)]
    snr_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fit_min_db: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    block_len: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    magnitude_min: Option<f64>,
    #[arg(long)]
    magnitude_max: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Resolves parameters from flags, then the config file, then defaults, and
/// rejects config keys the subcommand does not understand.
struct Resolver {
    config: BTreeMap<String, String>,
}

impl Resolver {
    fn new(common: &CommonArgs, allowed: &[&str]) -> Result<Self> {
        let config = match &common.config {
            Some(path) => load_config(path)?,
            None => BTreeMap::new(),
        };
        for key in config.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidParameter {
                    name: "config",
                    reason: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(Self { config })
    }

    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.config.get(key) {
            Some(raw) => raw.parse::<T>().map_err(|_| Error::InvalidParameter {
                name: "config",
                reason: format!("cannot parse `{raw}` for key `{key}`"),
            }),
            None => Ok(default),
        }
    }

    fn get_flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.config.get(key) {
            Some(raw) => match raw.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::InvalidParameter {
                    name: "config",
                    reason: format!("cannot parse `{other}` for key `{key}`"),
                }),
            },
            None => Ok(false),
        }
    }
}

struct Output {
    csv: String,
    pass: bool,
    out: Option<PathBuf>,
}

fn decimal(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Entry point: parse, execute, write, exit.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> ExitCode {
    let (code, csv, written) = run_inner(argv);
    if !written && !csv.is_empty() {
        print!("{csv}");
    }
    ExitCode::from(code)
}

/// Like [`run`], but returns the CSV text instead of printing it (the
/// `--out` file, if any, is still written). For tests.
pub fn run_captured<I: IntoIterator<Item = String>>(argv: I) -> (u8, String) {
    let (code, csv, _) = run_inner(argv);
    (code, csv)
}

fn run_inner<I: IntoIterator<Item = String>>(argv: I) -> (u8, String, bool) {
    configure_threads();
    let mut full: Vec<String> = vec!["doflab".into()];
    full.extend(argv);
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            if code == 0 {
                return (0, e.to_string(), false);
            }
            eprint!("{e}");
            return (2, String::new(), false);
        }
    };

    match execute(cli) {
        Ok(output) => {
            let written = if let Some(path) = &output.out {
                match std::fs::write(path, &output.csv) {
                    Ok(()) => true,
                    Err(e) => {
                        eprintln!("doflab: cannot write {}: {e}", path.display());
                        return (2, String::new(), false);
                    }
                }
            } else {
                false
            };
            (u8::from(!output.pass), output.csv, written)
        }
        Err(e) => {
            eprintln!("doflab: {e}");
            let code = match e {
                Error::RankDeficient { .. }
                | Error::Unstable { .. }
                | Error::CausalityViolation { .. }
                | Error::PowerExceeded { .. } => 1,
                _ => 2,
            };
            (code, String::new(), false)
        }
    }
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("DOFLAB_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                // Ignore the error if a global pool already exists.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn execute(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Align(args) => cmd_align(args),
        Command::Slope(args) => cmd_slope(args),
        Command::Replay(args) => cmd_replay(args),
        Command::FeedbackDemo(args) => cmd_feedback(args),
        Command::EquivCheck(args) => cmd_equiv(args),
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<Output> {
    let r = Resolver::new(
        &args.common,
        &[
            "topology",
            "formula",
            "sources",
            "destinations",
            "k",
            "relays",
        ],
    )?;
    let topology: String = r.get(args.topology, "topology", String::new())?;
    let formula_kind: String = r.get(args.formula, "formula", String::new())?;
    let sources = r.get(args.sources, "sources", 2)?;
    let destinations = r.get(args.destinations, "destinations", 2)?;
    let k = r.get(args.k, "k", 3)?;
    let relays = r.get(args.relays, "relays", 1)?;

    let mut csv = String::from("quantity,exact,decimal,pass\n");
    let mut pass = true;
    let push = |csv: &mut String, q: &str, exact: String, dec: f64, ok: bool| {
        writeln!(csv, "{q},{exact},{},{ok}", decimal(dec)).unwrap();
    };

    if !formula_kind.is_empty() {
        let f = match formula_kind.as_str() {
            "ic_dof" => Formula::IcDof { users: k },
            "x_dof" => Formula::XDof {
                sources,
                destinations,
            },
            "fd_lower" => Formula::FdLower { nodes: k },
            "fd_upper" => Formula::FdUpper { nodes: k },
            "half_duplex" => Formula::HalfDuplex { nodes: k },
            "parallel_relay" => Formula::ParallelRelay { pairs: k, relays },
            other => {
                return Err(Error::InvalidParameter {
                    name: "formula",
                    reason: format!("unknown formula `{other}`"),
                })
            }
        };
        let v = formula(f)?;
        push(
            &mut csv,
            &formula_kind,
            v.to_string(),
            v.to_f64().unwrap_or(f64::NAN),
            true,
        );
        return Ok(Output {
            csv,
            pass,
            out: args.common.out,
        });
    }

    let (region, closed) = match topology.as_str() {
        "x" | "" => (
            build_outer_region(sources, destinations)?,
            formula(Formula::XDof {
                sources,
                destinations,
            })?,
        ),
        "fd" => (build_fd_region(k)?, formula(Formula::FdUpper { nodes: k })?),
        other => {
            return Err(Error::InvalidParameter {
                name: "topology",
                reason: format!("unknown topology `{other}` (expected `x` or `fd`)"),
            })
        }
    };
    let lp = max_sum_dof(&region);
    let matches = lp == closed;
    pass &= matches;

    push(
        &mut csv,
        "variables",
        region.variable_count().to_string(),
        region.variable_count() as f64,
        true,
    );
    push(
        &mut csv,
        "inequalities",
        region.inequality_count().to_string(),
        region.inequality_count() as f64,
        true,
    );
    push(
        &mut csv,
        "max_sum_dof",
        lp.to_string(),
        lp.to_f64().unwrap_or(f64::NAN),
        matches,
    );
    push(
        &mut csv,
        "closed_form",
        closed.to_string(),
        closed.to_f64().unwrap_or(f64::NAN),
        matches,
    );
    if topology == "fd" {
        for (name, f) in [
            ("fd_lower", Formula::FdLower { nodes: k }),
            ("half_duplex", Formula::HalfDuplex { nodes: k }),
            ("ic_dof", Formula::IcDof { users: k }),
        ] {
            let v = formula(f)?;
            push(
                &mut csv,
                name,
                v.to_string(),
                v.to_f64().unwrap_or(f64::NAN),
                true,
            );
        }
    }
    writeln!(csv, "summary,match,{},{}", u8::from(matches), matches).unwrap();

    Ok(Output {
        csv,
        pass,
        out: args.common.out,
    })
}

fn cmd_align(args: AlignArgs) -> Result<Output> {
    let r = Resolver::new(
        &args.common,
        &[
            "k",
            "n",
            "seed",
            "trials",
            "independent",
            "detail",
            "magnitude_min",
            "magnitude_max",
        ],
    )?;
    let k = r.get(args.k, "k", 3)?;
    let n = r.get(args.n, "n", 1)?;
    let seed = r.get(args.seed, "seed", 0)?;
    let trials = r.get(args.trials, "trials", 20)?;
    let independent = r.get_flag(args.independent, "independent")?;
    let detail = r.get_flag(args.detail, "detail")?;
    let options = SampleOptions {
        reciprocal: Some(!independent),
        magnitude_min: r.get(args.magnitude_min, "magnitude_min", 0.5)?,
        magnitude_max: r.get(args.magnitude_max, "magnitude_max", 2.0)?,
    };

    let checks = verify_trials(k, n, seed, trials, options)?;
    let mut csv = String::from("seed,check,value,pass\n");
    let mut passed = 0usize;
    for c in &checks {
        if c.pass() {
            passed += 1;
        }
        if detail {
            writeln!(
                csv,
                "{},alignment_residual,{:e},{}",
                c.seed, c.alignment.max_residual, c.alignment.pass
            )
            .unwrap();
            let d = &c.decodability;
            writeln!(
                csv,
                "{},rank_i,{},{}",
                c.seed,
                d.i_ranks.iter().min().unwrap_or(&0),
                d.i_ranks.iter().all(|&x| x == d.expected_i_rank)
            )
            .unwrap();
            writeln!(
                csv,
                "{},interference_rank,{},{}",
                c.seed,
                d.interference_dims.iter().min().unwrap_or(&0),
                d.interference_dims
                    .iter()
                    .all(|&x| x == d.expected_interference_dim)
            )
            .unwrap();
            writeln!(
                csv,
                "{},joint_rank,{},{}",
                c.seed,
                d.joint_ranks.iter().min().unwrap_or(&0),
                d.joint_ranks.iter().all(|&x| x == d.expected_joint_rank)
            )
            .unwrap();
        } else {
            writeln!(
                csv,
                "{},verify,{:e},{}",
                c.seed,
                c.alignment.max_residual,
                c.pass()
            )
            .unwrap();
        }
    }
    let all = passed == checks.len();
    writeln!(csv, "summary,trials_passed,{passed},{all}").unwrap();
    Ok(Output {
        csv,
        pass: all,
        out: args.common.out,
    })
}

fn cmd_slope(args: SlopeArgs) -> Result<Output> {
    let r = Resolver::new(
        &args.common,
        &[
            "k",
            "n",
            "snr_min",
            "snr_max",
            "step",
            "trials",
            "seed",
            "fit_min_db",
            "independent",
            "magnitude_min",
            "magnitude_max",
        ],
    )?;
    let k = r.get(args.k, "k", 3)?;
    let n = r.get(args.n, "n", 1)?;
    let trials = r.get(args.trials, "trials", 10)?;
    let seed = r.get(args.seed, "seed", 0)?;
    let run = AlignmentRun {
        k,
        n,
        reciprocal: !r.get_flag(args.independent, "independent")?,
        magnitude_min: r.get(args.magnitude_min, "magnitude_min", 0.5)?,
        magnitude_max: r.get(args.magnitude_max, "magnitude_max", 2.0)?,
    };
    let mut query = RateQuery::from_range(
        r.get(args.snr_min, "snr_min", 40.0)?,
        r.get(args.snr_max, "snr_max", 70.0)?,
        r.get(args.step, "step", 10.0)?,
        trials,
        seed,
    )?;
    query.fit_min_db = r.get(args.fit_min_db, "fit_min_db", 50.0)?;

    let report = dof_slope(&run, &query)?;
    let target = alignment::achieved_dof(k, n)?.to_f64().unwrap();
    let pass = (report.slope - target).abs() <= 0.05 * target;

    let mut csv = String::from("snr_db,trial,receiver,rate_bits_per_use\n");
    for (trial, rates) in report.per_trial_rate.iter().enumerate() {
        for (pi, per_rx) in rates.iter().enumerate() {
            for (rx, rate) in per_rx.iter().enumerate() {
                writeln!(csv, "{},{trial},{rx},{rate}", report.snr_db[pi]).unwrap();
            }
        }
    }
    writeln!(csv, "slope,{},{},{pass}", report.slope, report.fit_residual).unwrap();
    Ok(Output {
        csv,
        pass,
        out: args.common.out,
    })
}

fn cmd_replay(args: ReplayArgs) -> Result<Output> {
    let r = Resolver::new(
        &args.common,
        &[
            "trials",
            "block_len",
            "seed",
            "m2",
            "m3",
            "magnitude_min",
            "magnitude_max",
        ],
    )?;
    let trials = r.get(args.trials, "trials", 100)?;
    let block_len = r.get(args.block_len, "block_len", 20)?;
    let seed = r.get(args.seed, "seed", 0)?;
    let m2 = r.get(args.m2, "m2", 2)?;
    let m3 = r.get(args.m3, "m3", 1)?;
    let options = SampleOptions {
        reciprocal: None,
        magnitude_min: r.get(args.magnitude_min, "magnitude_min", 0.5)?,
        magnitude_max: r.get(args.magnitude_max, "magnitude_max", 2.0)?,
    };

    let mut csv = String::from("seed,n,max_deviation,pass\n");
    let mut all = true;
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let trial_seed = rng::derive(seed, &[tags::TRIAL, trial as u64]);
        let inst = sample_instance(Topology::FourNodeX { m2, m3 }, trial_seed, options)?;
        let encoder = RandomLinearEncoder::new(rng::derive(trial_seed, &[1]), block_len);
        let cfg = SimConfig::new(block_len, rng::derive(trial_seed, &[2]));
        let genie = simulate_four_node(&inst, &encoder, &cfg)?;
        let report = genie_replay(&inst, &genie, &encoder)?;
        let dev = report.max_y_deviation.max(report.max_x1_deviation);
        worst = worst.max(dev);
        all &= report.pass;
        writeln!(csv, "{trial_seed},{block_len},{dev:e},{}", report.pass).unwrap();
    }
    writeln!(csv, "summary,{trials},{worst:e},{all}").unwrap();
    Ok(Output {
        csv,
        pass: all,
        out: args.common.out,
    })
}

fn cmd_feedback(args: FeedbackArgs) -> Result<Output> {
    let r = Resolver::new(
        &args.common,
        &["snr_min", "snr_max", "step", "trials", "seed", "fit_min_db"],
    )?;
    let mut query = RateQuery::from_range(
        r.get(args.snr_min, "snr_min", 40.0)?,
        r.get(args.snr_max, "snr_max", 70.0)?,
        r.get(args.step, "step", 10.0)?,
        r.get(args.trials, "trials", 10)?,
        r.get(args.seed, "seed", 0)?,
    )?;
    query.fit_min_db = r.get(args.fit_min_db, "fit_min_db", 50.0)?;

    let with = feedback_demo(&query, true)?;
    let baseline = feedback_demo(&query, false)?;

    let mut csv = String::from("snr_db,trial,message,rate_bits_per_use\n");
    for (trial, rates) in with.per_trial_rate.iter().enumerate() {
        for (pi, per_msg) in rates.iter().enumerate() {
            for (mi, rate) in per_msg.iter().enumerate() {
                writeln!(csv, "{},{trial},{mi},{rate}", with.snr_db[pi]).unwrap();
            }
        }
    }
    let total_ok = (with.slope - 3.0).abs() <= 0.05 * 3.0;
    let mut per_msg_ok = true;
    writeln!(csv, "slope,total,{},{total_ok}", with.slope).unwrap();
    let names = ["w_1_3", "w_2_1", "w_3_2"];
    for (mi, s) in with.per_message_slope.iter().enumerate() {
        let ok = (s - 1.0).abs() <= 0.05;
        per_msg_ok &= ok;
        writeln!(csv, "slope,{},{s},{ok}", names[mi]).unwrap();
    }
    let baseline_ok = baseline.slope < 2.1;
    writeln!(csv, "slope,baseline_total,{},{baseline_ok}", baseline.slope).unwrap();

    let pass = total_ok && per_msg_ok && baseline_ok;
    Ok(Output {
        csv,
        pass,
        out: args.common.out,
    })
}

fn cmd_equiv(args: EquivArgs) -> Result<Output> {
    let r = Resolver::new(
        &args.common,
        &[
            "k",
            "block_len",
            "trials",
            "seed",
            "magnitude_min",
            "magnitude_max",
        ],
    )?;
    let k = r.get(args.k, "k", 3)?;
    let block_len = r.get(args.block_len, "block_len", 20)?;
    let trials = r.get(args.trials, "trials", 1)?;
    let seed = r.get(args.seed, "seed", 0)?;
    let options = SampleOptions {
        reciprocal: None,
        magnitude_min: r.get(args.magnitude_min, "magnitude_min", 0.5)?,
        magnitude_max: r.get(args.magnitude_max, "magnitude_max", 2.0)?,
    };

    let mut csv = String::from("k,seed,block_len,identical,pass\n");
    let mut all = true;
    for trial in 0..trials {
        let trial_seed = rng::derive(seed, &[tags::TRIAL, trial as u64]);
        let orig = sample_instance(Topology::FullDuplex { nodes: k }, trial_seed, options)?;
        let eq = fd_equivalence(&orig)?;
        let encoder = RandomLinearEncoder::new(rng::derive(trial_seed, &[1]), block_len);
        let cfg = SimConfig::new(block_len, rng::derive(trial_seed, &[2]));
        let a = forward_simulate(&orig, &encoder, &cfg)?;
        let b = forward_simulate(&eq, &encoder, &cfg)?;
        let identical =
            (0..k).all(|i| bitwise_eq(&a.x[i], &b.x[i]) && bitwise_eq(&a.y[i], &b.y[k + i]));
        all &= identical;
        writeln!(csv, "{k},{trial_seed},{block_len},{identical},{identical}").unwrap();
    }
    writeln!(csv, "summary,{trials},{block_len},{all},{all}").unwrap();
    Ok(Output {
        csv,
        pass: all,
        out: args.common.out,
    })
}
