use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use klagg::harness::{self, GapConfig, MRule};
use klagg::{
    decide_by_oracle, encode, exact_search, greedy_approx, io, lower_bound, Decision, Engine, Error, Mode, Pairing,
    ThreePartitionInstance,
};

#[derive(Parser)]
#[command(name = "klagg", version, about = "Minimum relative-entropy aggregation of discrete distributions")]
struct Cli {
    /// Emit newline-delimited JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate a distribution into m components.
    Reduce {
        /// Distribution file: one value per line, or a JSON array.
        #[arg(long)]
        input: PathBuf,
        /// Number of components to keep.
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = EngineArg::Tree)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = PairingArg::Sorted)]
        pairing: PairingArg,
        /// Lift the size cap of the exact solver.
        #[arg(long)]
        force: bool,
    },
    /// Encode a 3-Partition instance as a distribution.
    #[command(name = "encode-3part")]
    Encode3Part {
        /// Instance file: "m T" on the first line, then the 3m integers.
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide a small 3-Partition instance through the exact solver.
    #[command(name = "decide-3part")]
    Decide3Part {
        /// Instance file: "m T" on the first line, then the 3m integers.
        #[arg(long)]
        input: PathBuf,
    },
    /// Greedy-versus-exact gap study on random instances.
    #[command(name = "gap-bench")]
    GapBench {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Time the tree engine for n = 2^k over the given exponents.
    #[command(name = "scale-bench")]
    ScaleBench {
        #[arg(long, default_value_t = 1024)]
        m: usize,
        /// Exponents k, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [17u32, 18, 19, 20])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
    /// Run the invariant suite on one instance.
    Check {
        /// Distribution file: one value per line, or a JSON array.
        #[arg(long)]
        input: PathBuf,
        /// Number of components to keep.
        #[arg(long)]
        m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Greedy,
    Exact,
    LowerBound,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Naive,
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Sorted,
    Bin,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Strict => Mode::Strict,
        }
    }
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Naive => Engine::Naive,
            EngineArg::Tree => Engine::Tree,
        }
    }
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Sorted => Pairing::SortedCanonical,
            PairingArg::Bin => Pairing::BinIndex,
        }
    }
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Violation,
}

/// 12 significant digits, fixed notation where that stays readable.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (11 - mag) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn read_instance(path: &Path) -> Result<ThreePartitionInstance, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?.parse()
}

#[allow(clippy::too_many_arguments)]
fn reduce(
    json_out: bool,
    input: &Path,
    m: usize,
    method: Method,
    mode: Mode,
    engine: Engine,
    pairing: Pairing,
    force: bool,
) -> Result<Status, Error> {
    let p = io::read_distribution(input)?;
    let bound = lower_bound(&p, m)?;
    let (label, result, ties) = match method {
        Method::LowerBound => {
            if json_out {
                println!(
                    "{}",
                    json!({
                        "method": "lower-bound", "n": p.len(), "m": m,
                        "lb": bound.lb, "value_bits": bound.value_bits, "prefix_mass": bound.prefix_mass,
                    })
                );
            } else {
                println!("method\tlower-bound\nn\t{}\nm\t{m}", p.len());
                println!("value_bits\t{}", sig12(bound.value_bits));
                println!("# rank\tlb");
                for (i, v) in bound.lb.iter().enumerate() {
                    println!("{i}\t{}", sig12(*v));
                }
            }
            return Ok(Status::Ok);
        }
        Method::Greedy => {
            let label = format!(
                "greedy/{}/{}",
                if mode == Mode::Paper { "paper" } else { "strict" },
                if engine == Engine::Tree { "tree" } else { "naive" }
            );
            (label, greedy_approx(&p, m, mode, engine)?, None)
        }
        Method::Exact => {
            let s = exact_search(&p, m, force)?;
            ("exact".to_string(), s.best, Some(s.optimal_count))
        }
    };
    let result = result.with_pairing(pairing);
    let block_of = p.to_original(result.partition.block_of());
    let pairing_name = match pairing {
        Pairing::SortedCanonical => "sorted",
        Pairing::BinIndex => "bin",
    };

    if json_out {
        println!(
            "{}",
            json!({
                "method": label, "n": p.len(), "m": m,
                "q": result.q, "block_of": block_of,
                "divergence_bits": result.divergence_bits(), "pairing": pairing_name,
                "sorted_bits": result.sorted_bits, "bin_index_bits": result.bin_index_bits,
                "lower_bound_bits": bound.value_bits, "strict": result.is_strict(),
                "optimal_count": ties,
            })
        );
    } else {
        println!("method\t{label}\nn\t{}\nm\t{m}", p.len());
        println!("divergence_bits\t{} ({pairing_name})", sig12(result.divergence_bits()));
        println!("lower_bound_bits\t{}", sig12(bound.value_bits));
        println!("strict\t{}", result.is_strict());
        if let Some(t) = ties {
            println!("optimal_count\t{t}");
        }
        println!("# block\tmass\titems");
        for (b, mass) in result.q.iter().enumerate() {
            let items: Vec<usize> = (0..block_of.len()).filter(|&i| block_of[i] == b).collect();
            println!("{b}\t{}\t{}", sig12(*mass), join(&items));
        }
    }
    Ok(Status::Ok)
}

fn decide(json_out: bool, input: &Path) -> Result<Status, Error> {
    let inst = read_instance(input)?;
    let decision = decide_by_oracle(&inst)?;
    let target = klagg::target_value(inst.m())?;
    let to_values = |t: &Vec<usize>| t.iter().map(|&i| inst.values()[i]).collect::<Vec<_>>();
    if json_out {
        let cert = match &decision {
            Decision::Yes { certificate, .. } => Some(certificate.iter().map(to_values).collect::<Vec<_>>()),
            Decision::No { .. } => None,
        };
        println!(
            "{}",
            json!({
                "answer": if decision.is_yes() { "yes" } else { "no" },
                "opt_bits": decision.opt_bits(), "target_bits": target, "certificate": cert,
            })
        );
    } else {
        println!("answer\t{}", if decision.is_yes() { "yes" } else { "no" });
        println!("opt_bits\t{}\ntarget_bits\t{}", sig12(decision.opt_bits()), sig12(target));
        if let Decision::Yes { certificate, .. } = &decision {
            for t in certificate {
                println!("triplet\t{}", join(&to_values(t)));
            }
        }
    }
    Ok(Status::Ok)
}

fn gap_bench(json_out: bool, config: GapConfig) -> Result<Status, Error> {
    let report = harness::gap_experiment(&config)?;
    let summary = report.summary();
    if json_out {
        print!("{}", report.to_ndjson());
        println!("{}", json!({ "summary": summary }));
    } else {
        print!("{}", report.to_tsv());
        println!(
            "# instances={} max_gap={} mean_gap={} violations={}",
            summary.instances,
            sig12(summary.max_gap),
            sig12(summary.mean_gap),
            summary.violations
        );
    }
    Ok(if summary.violations == 0 { Status::Ok } else { Status::Violation })
}

fn scale_bench(json_out: bool, m: usize, exponents: &[u32], seed: u64, reps: usize) -> Result<Status, Error> {
    let sizes: Vec<usize> = exponents
        .iter()
        .map(|&k| 1usize.checked_shl(k).ok_or(Error::BadN { n: usize::MAX }))
        .collect::<Result<_, _>>()?;
    let rows = harness::scaling_benchmark(&sizes, m, seed, reps)?;
    if json_out {
        for r in &rows {
            println!("{}", serde_json::to_string(r).expect("rows serialize"));
        }
    } else {
        println!("# n\tm\tseconds\tratio");
        for r in &rows {
            let ratio = r.ratio.map(sig12).unwrap_or_else(|| "-".into());
            println!("{}\t{}\t{}\t{ratio}", r.n, r.m, sig12(r.seconds));
        }
    }
    Ok(Status::Ok)
}

fn check(json_out: bool, input: &Path, m: usize) -> Result<Status, Error> {
    let p = io::read_distribution(input)?;
    let outcomes = harness::check_instance(&p, m)?;
    for c in &outcomes {
        if json_out {
            println!("{}", serde_json::to_string(c).expect("outcomes serialize"));
        } else {
            println!("{}\t{}\t{}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    Ok(if outcomes.iter().all(|c| c.passed) { Status::Ok } else { Status::Violation })
}

fn run(cli: Cli) -> Result<Status, Error> {
    let json_out = cli.json;
    match cli.command {
        Command::Reduce { input, m, method, mode, engine, pairing, force } => {
            reduce(json_out, &input, m, method, mode.into(), engine.into(), pairing.into(), force)
        }
        Command::Encode3Part { input } => {
            let inst = read_instance(&input)?;
            print!("{}", io::format_values(encode(&inst)?.probs()));
            Ok(Status::Ok)
        }
        Command::Decide3Part { input } => decide(json_out, &input),
        Command::GapBench { count, n_min, n_max, seed } => {
            gap_bench(json_out, GapConfig { count, n_min, n_max, m_rule: MRule::Uniform, seed })
        }
        Command::ScaleBench { m, n, seed, reps } => scale_bench(json_out, m, &n, seed, reps),
        Command::Check { input, m } => check(json_out, &input, m),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
