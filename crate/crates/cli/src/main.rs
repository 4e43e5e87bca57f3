//! Command-line driver: protocol simulation, attack optimization, security
//! bounds, trade-off surfaces and the acceptance suite, all reproducible
//! from a single seed.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure,
//! 3 protocol abort (simulate with --fail-on-abort).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use otns_core::adversary::{choice_bit_cprime, Strategy};
use otns_core::attack_opt::optimize_delta;
use otns_core::protocol::{
    run_rot_perfect, run_rot_practical, Mode, Params, Receiver, Transcript,
};
use otns_core::qstate::Basis;
use otns_core::security::{
    security_report, tradeoff_value, Accounting, BoundMode,
};
use otns_core::verify;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_ABORT: u8 = 3;

/// Environment variable overriding the default output directory for
/// relative output paths.
const OUT_DIR_ENV: &str = "OTNS_OUT_DIR";

#[derive(Parser)]
#[command(name = "otns", version, about = "Oblivious transfer under noisy quantum storage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol and write a transcript.
    Simulate(SimulateArgs),
    /// Find the optimal storage attack for a storage rate (or a sweep).
    Optimize(OptimizeArgs),
    /// Print a security report for the given parameters.
    Bound(BoundArgs),
    /// Emit the storage-rate / noise-scaling trade-off surface as CSV.
    Tradeoff(TradeoffArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Key-value config file providing parameter defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "p-erase")]
    p_erase: Option<f64>,
    #[arg(long = "p-error")]
    p_error: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "c-abort")]
    c_abort: Option<f64>,
    /// Receiver: honest:+, honest:x, erase-all, or a strategy descriptor
    /// like store:r=0.7, breidbart, basis:+, partial:alpha=0.3,r=0.9,
    /// beamsplit:mu=0.2.
    #[arg(long, default_value = "honest:+")]
    bob: String,
    /// Number of runs; run i uses seed + i.
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Worker threads for batch runs (0 = logical cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Transcript output path (single run) or prefix (batch).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with code 3 if any run aborts.
    #[arg(long = "fail-on-abort")]
    fail_on_abort: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Storage survival rate.
    #[arg(long)]
    r: Option<f64>,
    /// Rate sweep start:end:step.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,
    /// CSV output path (sweep mode).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value = "perfect")]
    mode: String,
    #[arg(long, default_value_t = 50)]
    ell: u32,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long = "p-error", default_value_t = 0.01)]
    p_error: f64,
    /// Syndrome accounting: asymptotic or concrete:<bits>.
    #[arg(long, default_value = "asymptotic")]
    accounting: String,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Storage-rate grid start:end:step.
    #[arg(long, default_value = "0:1:0.02")]
    r: String,
    /// Noise-scaling grid start:end:step.
    #[arg(long, default_value = "1:2:0.05")]
    a: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// "all" or a comma-separated list of check names.
    #[arg(long, default_value = "all")]
    suite: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Bound(args) => cmd_bound(&args),
        Command::Tradeoff(args) => cmd_tradeoff(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    let target = resolve_out(path);
    if let Some(parent) = target.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| format!("creating {parent:?}: {e}"))?;
        }
    }
    std::fs::File::create(&target)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| format!("writing {target:?}: {e}"))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid {text:?} is not start:end:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("bad number {p:?} in grid")))
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || end < start {
        return Err(format!("grid {text:?} must have positive step and end >= start"));
    }
    let count = ((end - start) / step + 0.5).floor() as usize;
    let mut grid: Vec<f64> = (0..=count)
        .map(|i| start + i as f64 * step)
        .filter(|v| *v <= end + 1e-12)
        .collect();
    if let Some(last) = grid.last_mut() {
        if (*last - end).abs() < 1e-9 {
            *last = end;
        }
    }
    Ok(grid)
}

fn build_params(args: &SimulateArgs) -> Result<Params, String> {
    let mut p = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("reading {path:?}: {e}"))?;
            Params::from_config(&text).map_err(|e| e.to_string())?
        }
        None => Params::default(),
    };
    if let Some(mode) = &args.mode {
        p.mode = match mode.as_str() {
            "perfect" => Mode::Perfect,
            "practical" => Mode::Practical,
            other => return Err(format!("unknown mode {other:?}")),
        };
    }
    if let Some(n) = args.n {
        p.n = n;
    }
    if let Some(ell) = args.ell {
        p.ell = ell;
    }
    if let Some(seed) = args.seed {
        p.seed = seed;
    }
    if let Some(v) = args.p_erase {
        p.p_erase = v;
    }
    if let Some(v) = args.p_error {
        p.p_error = v;
    }
    if let Some(v) = args.r {
        p.r = v;
    }
    if let Some(v) = args.mu {
        p.mu = v;
    }
    if let Some(v) = args.c_abort {
        p.c_abort = v;
    }
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn parse_receiver(text: &str) -> Result<Receiver, String> {
    match text {
        "honest:+" => Ok(Receiver::Honest(Basis::Computational)),
        "honest:x" => Ok(Receiver::Honest(Basis::Hadamard)),
        "erase-all" => Ok(Receiver::EraseAll),
        other => Strategy::from_str(other)
            .map(Receiver::Dishonest)
            .map_err(|e| e.to_string()),
    }
}

/// One-line outcome of a run, comparing the receiver's output to the string
/// he was entitled to (the chosen one when honest, the better-guessed one
/// when attacking).
fn summarize(t: &Transcript, receiver: &Receiver) -> Result<&'static str, String> {
    if t.aborted {
        return Ok("ABORTED");
    }
    let reference = match receiver {
        Receiver::Honest(Basis::Computational) => &t.s_plus,
        Receiver::Honest(Basis::Hadamard) => &t.s_times,
        Receiver::Honest(Basis::Breidbart) => return Err("invalid honest basis".into()),
        Receiver::Dishonest(strategy) => {
            match choice_bit_cprime(strategy, t.x.len()).map_err(|e| e.to_string())? {
                Basis::Computational => &t.s_plus,
                _ => &t.s_times,
            }
        }
        Receiver::EraseAll => return Ok("ABORTED"),
    };
    Ok(if t.bob_output.as_ref() == Some(reference) {
        "CORRECT"
    } else {
        "WRONG"
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8, String> {
    let base = build_params(args)?;
    let receiver = parse_receiver(&args.bob)?;
    if args.runs == 0 {
        return Err("--runs must be at least 1".into());
    }

    let run_one = |idx: u64| -> Result<(Transcript, &'static str), String> {
        let p = Params { seed: base.seed.wrapping_add(idx), ..base.clone() };
        let t = match p.mode {
            Mode::Perfect => run_rot_perfect(&p, &receiver),
            Mode::Practical => run_rot_practical(&p, &receiver),
        }
        .map_err(|e| e.to_string())?;
        let status = summarize(&t, &receiver)?;
        Ok((t, status))
    };

    let results: Vec<Result<(Transcript, &'static str), String>> = if args.runs == 1 {
        vec![run_one(0)]
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            use rayon::prelude::*;
            (0..args.runs).into_par_iter().map(run_one).collect()
        })
    };

    let mut aborted = 0u64;
    let mut correct = 0u64;
    for (idx, result) in results.iter().enumerate() {
        let (t, status) = result.as_ref().map_err(|e| e.clone())?;
        match *status {
            "ABORTED" => aborted += 1,
            "CORRECT" => correct += 1,
            _ => {}
        }
        println!("run {idx}: {status} seed={}", t.seed);
        if let Some(out) = &args.out {
            let path = if args.runs == 1 {
                out.clone()
            } else {
                out.with_file_name(format!(
                    "{}-{idx}.json",
                    out.file_stem().and_then(|s| s.to_str()).unwrap_or("transcript")
                ))
            };
            let json = serde_json::to_string_pretty(t).map_err(|e| e.to_string())?;
            write_file(&path, &json)?;
        }
    }
    println!(
        "summary: {correct}/{} correct, {aborted} aborted",
        args.runs
    );
    if args.fail_on_abort && aborted > 0 {
        return Ok(EXIT_ABORT);
    }
    Ok(0)
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<u8, String> {
    match (&args.r, &args.sweep) {
        (Some(_), Some(_)) | (None, None) => {
            Err("give exactly one of --r or --sweep".into())
        }
        (Some(rate), None) => {
            let opt = optimize_delta(*rate, 0.02, args.tolerance).map_err(|e| e.to_string())?;
            println!(
                "delta_max={:.5} regime={} alpha={:.5} x={:.5} z={:.5}",
                opt.delta_max,
                regime_name(opt.regime),
                opt.best.alpha,
                opt.best.x,
                opt.best.z
            );
            Ok(0)
        }
        (None, Some(sweep)) => {
            let grid = parse_grid(sweep)?;
            let mut csv = String::from("r,delta_max,regime,alpha\n");
            for rate in grid {
                let opt = optimize_delta(rate, 0.02, args.tolerance).map_err(|e| e.to_string())?;
                csv.push_str(&format!(
                    "{rate},{:.10},{},{:.10}\n",
                    opt.delta_max,
                    regime_name(opt.regime),
                    opt.best.alpha
                ));
            }
            match &args.csv {
                Some(path) => write_file(path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

fn regime_name(regime: otns_core::attack_opt::Regime) -> &'static str {
    match regime {
        otns_core::attack_opt::Regime::Breidbart => "breidbart",
        otns_core::attack_opt::Regime::Store => "store",
    }
}

fn cmd_bound(args: &BoundArgs) -> Result<u8, String> {
    let mode = match args.mode.as_str() {
        "perfect" => BoundMode::Perfect,
        "practical" => {
            let accounting = match args.accounting.as_str() {
                "asymptotic" => Accounting::Asymptotic,
                other => match other.strip_prefix("concrete:") {
                    Some(bits) => Accounting::Concrete {
                        k_bits: bits.parse().map_err(|_| format!("bad bit count {bits:?}"))?,
                    },
                    None => return Err(format!("unknown accounting {other:?}")),
                },
            };
            BoundMode::Practical { p_error: args.p_error, accounting }
        }
        other => return Err(format!("unknown mode {other:?}")),
    };
    let report =
        security_report(args.ell, args.n, args.r, mode).map_err(|e| e.to_string())?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    Ok(0)
}

fn cmd_tradeoff(args: &TradeoffArgs) -> Result<u8, String> {
    let r_grid = parse_grid(&args.r)?;
    let a_grid = parse_grid(&args.a)?;
    let mut csv = String::from("r,a,value,secure\n");
    for &r in &r_grid {
        if r <= 0.0 {
            continue;
        }
        for &a in &a_grid {
            if a < 1.0 || a * r > 1.0 + 1e-12 {
                continue;
            }
            let value = tradeoff_value(r, a.min(1.0 / r)).map_err(|e| e.to_string())?;
            csv.push_str(&format!("{r},{a},{value:.10},{}\n", u8::from(value < 0.0)));
        }
    }
    match &args.csv {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, String> {
    let wanted: Option<Vec<&str>> = match args.suite.as_str() {
        "all" => None,
        list => Some(list.split(',').map(str::trim).collect()),
    };
    let results: Vec<verify::CheckResult> = match &wanted {
        None => verify::all_checks(),
        Some(names) => {
            let all = verify::all_checks_lazy();
            let mut picked = Vec::new();
            for name in names {
                match all.iter().find(|(n, _)| n == name) {
                    Some((_, run)) => picked.push(run()),
                    None => return Err(format!("unknown check {name:?}")),
                }
            }
            picked
        }
    };
    let mut failed = 0;
    for check in &results {
        println!("{}", check.line());
        if !check.passed {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    Ok(if failed > 0 { EXIT_VERIFY } else { 0 })
}
