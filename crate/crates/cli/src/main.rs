//! Batch command-line surface over the engine: compatibility reports,
//! mutation, graph exploration, classical comparisons, discriminants and
//! the self-test battery.
//!
//! Exit codes: 0 when every verdict passes, 1 when a mathematical verdict
//! fails, 2 on usage or input errors, 3 when a budget is exceeded.
//! Reports go to stdout, diagnostics to stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ruqca::central::frobenius_check;
use ruqca::discriminant::{
    cluster_discriminant, determinant_central, factor_discriminant, trace_matrix,
    DiscriminantReport, TorusPresentation,
};
use ruqca::error::EngineError;
use ruqca::exchange_graph::{apply_word, explore, GraphLimits};
use ruqca::kacmoody::{
    build_unipotent_seed_data, degree_identity_check, theorem_c_check, unipotent_seed,
    CartanDatum, ReducedWordData,
};
use ruqca::samples;
use ruqca::seeds::Seed;
use ruqca::selftest::{self, BatteryOptions};
use ruqca::weyl::WeylPresentation;

#[derive(Parser)]
#[command(
    name = "ruqca",
    version,
    about = "Exact engine for quantum cluster algebras at roots of unity"
)]
struct Cli {
    /// Worker threads for parallel sections; defaults to the available
    /// parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a compatible pair and report its canonical diagonal.
    Compat(SeedArgs),
    /// Apply a mutation word to a seed and print the result.
    Mutate(WordArgs),
    /// Explore the exchange graph breadth first.
    Explore(ExploreArgs),
    /// Compare order-th powers against the classical engine along a word.
    Frobenius(WordArgs),
    /// Discriminant of a presentation descriptor file.
    Disc(DiscArgs),
    /// Quantized Weyl algebra: seed report and discriminant.
    Weyl(WeylArgs),
    /// Unipotent cell seed data from a Cartan matrix and a reduced word.
    Unip(UnipArgs),
    /// Run the end-to-end check battery.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct SeedArgs {
    /// Seed file in the JSON schema produced by `mutate --format json`.
    #[arg(long, conflicts_with = "sample")]
    seed_file: Option<PathBuf>,
    /// Built-in sample: a2, b2, g2, a1a1, skew1 or skew2.
    #[arg(long)]
    sample: Option<String>,
    /// Order of the root of unity; used with --sample only.
    #[arg(long, default_value_t = 5)]
    l: u64,
}

#[derive(Args)]
struct WordArgs {
    #[command(flatten)]
    seed: SeedArgs,
    /// Comma-separated 1-based directions, for example 1,2,1.
    #[arg(long, default_value = "")]
    word: String,
    /// Division safety budget.
    #[arg(long, default_value_t = 4)]
    safety: u64,
}

#[derive(Args)]
struct ExploreArgs {
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, default_value_t = 256)]
    max_nodes: usize,
    #[arg(long, default_value_t = 32)]
    max_depth: usize,
    #[arg(long, default_value_t = 4)]
    safety: u64,
    /// Emit the graph in DOT format instead of a summary.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct DiscArgs {
    /// Presentation descriptor file; see the module documentation for the
    /// torus, weyl and unipotent presets.
    #[arg(long)]
    input: PathBuf,
    /// Largest presentation rank accepted.
    #[arg(long, default_value_t = 4096)]
    max_rank: usize,
    #[arg(long, default_value_t = 4)]
    safety: u64,
}

#[derive(Args)]
struct WeylArgs {
    /// Number of generator pairs.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Order of the root of unity (odd, at least 3).
    #[arg(long, default_value_t = 3)]
    l: u64,
    /// Skew-symmetric integer parameter matrix file; defaults to zero.
    #[arg(long = "Q", alias = "q")]
    q: Option<PathBuf>,
    /// Largest presentation rank accepted for the discriminant.
    #[arg(long, default_value_t = 64)]
    max_rank: usize,
    #[arg(long, default_value_t = 4)]
    safety: u64,
    /// Skip the discriminant and report the seed only.
    #[arg(long)]
    no_disc: bool,
}

#[derive(Args)]
struct UnipArgs {
    /// Cartan datum file: {"A": [[2,-1],[-1,2]], "d": [1,1]}; d defaults
    /// to all ones.
    #[arg(long)]
    cartan: PathBuf,
    /// Comma-separated 1-based word letters, for example 1,2,1.
    #[arg(long)]
    word: String,
    /// Order of the root of unity (odd, at least 3).
    #[arg(long, default_value_t = 3)]
    l: u64,
    #[arg(long, default_value_t = 4)]
    safety: u64,
    /// Run the cell discriminant even when the word repeats letters.
    #[arg(long)]
    full_disc: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Include the long-running cell discriminant and the order-five Weyl
    /// discriminant.
    #[arg(long)]
    full_disc: bool,
    #[arg(long, default_value_t = 4)]
    safety: u64,
    /// Seed for the deterministic random trials.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        match e {
            EngineError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: thread pool not reconfigured: {e}");
        }
    }
    let format = cli.format;
    let result = match cli.command {
        Command::Compat(args) => cmd_compat(&args, format),
        Command::Mutate(args) => cmd_mutate(&args, format),
        Command::Explore(args) => cmd_explore(&args, format),
        Command::Frobenius(args) => cmd_frobenius(&args, format),
        Command::Disc(args) => cmd_disc(&args, format),
        Command::Weyl(args) => cmd_weyl(&args, format),
        Command::Unip(args) => cmd_unip(&args, format),
        Command::Selftest(args) => cmd_selftest(&args, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_seed_raw(args: &SeedArgs) -> Result<Seed, EngineError> {
    match (&args.seed_file, &args.sample) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| EngineError::InvalidInput(format!("{}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| EngineError::InvalidInput(format!("{}: {e}", path.display())))?;
            Seed::from_json(&value)
        }
        (None, Some(name)) => match name.as_str() {
            "a2" => samples::a2(args.l),
            "b2" => samples::b2(args.l),
            "g2" => samples::g2(args.l),
            "a1a1" => samples::a1a1_principal(args.l),
            "skew1" => samples::skew_poly(args.l, 1),
            "skew2" => samples::skew_poly(args.l, 2),
            other => Err(EngineError::InvalidInput(format!(
                "unknown sample {other}; expected a2, b2, g2, a1a1, skew1 or skew2"
            ))),
        },
        _ => Err(EngineError::InvalidInput(
            "pass exactly one of --seed-file or --sample".into(),
        )),
    }
}

fn load_seed(args: &SeedArgs) -> Result<Seed, Failure> {
    load_seed_raw(args).map_err(Into::into)
}

fn parse_word(text: &str, dim: usize) -> Result<Vec<usize>, Failure> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|piece| {
            let letter: usize = piece
                .trim()
                .parse()
                .map_err(|_| Failure::Input(format!("word letter {piece:?} is not a number")))?;
            if letter == 0 || letter > dim {
                return Err(Failure::Input(format!(
                    "word letter {letter} out of range 1..={dim}"
                )));
            }
            Ok(letter - 1)
        })
        .collect()
}

fn print_value(format: Format, value: &Value, text: impl FnOnce()) {
    match format {
        Format::Json => println!("{value:#}"),
        Format::Text => text(),
    }
}

fn cmd_compat(args: &SeedArgs, format: Format) -> CmdResult {
    let seed = match load_seed_raw(args) {
        Ok(seed) => seed,
        Err(EngineError::Incompatible(detail)) => {
            let value = json!({"compatible": false, "detail": detail});
            print_value(format, &value, || {
                println!("compatible: false");
                println!("detail: {detail}");
            });
            return Ok(1);
        }
        Err(other) => return Err(other.into()),
    };
    let report = seed.compatibility();
    let diagonal: Vec<String> = report.diagonal.iter().map(|d| d.to_string()).collect();
    if !report.coprime {
        eprintln!(
            "warning: the coprimality assumption is violated at order {}",
            seed.ell()
        );
    }
    let value = json!({
        "compatible": true,
        "l": seed.ell(),
        "N": seed.dim(),
        "diagonal": report.diagonal,
        "residues": report.residues,
        "coprime": report.coprime,
    });
    print_value(format, &value, || {
        println!("compatible: true (order {})", seed.ell());
        println!("D = diag({})", diagonal.join(", "));
        println!("coprime: {}", report.coprime);
    });
    Ok(0)
}

fn cmd_mutate(args: &WordArgs, format: Format) -> CmdResult {
    let seed = load_seed(&args.seed)?;
    let word = parse_word(&args.word, seed.dim())?;
    for &k in &word {
        if !seed.exchangeable().contains(&k) {
            return Err(Failure::Input(format!(
                "direction {} is not exchangeable",
                k + 1
            )));
        }
    }
    let reached = apply_word(&seed, &word, args.safety).map_err(Failure::from)?;
    let value = reached.to_json();
    print_value(format, &value, || {
        println!("word: [{}]", args.word);
        for (j, x) in reached.frame().iter().enumerate() {
            println!("M(e_{}) = {}", j + 1, x);
        }
    });
    Ok(0)
}

fn cmd_explore(args: &ExploreArgs, format: Format) -> CmdResult {
    let seed = load_seed(&args.seed)?;
    let limits = GraphLimits {
        max_nodes: args.max_nodes,
        max_depth: args.max_depth,
        safety: args.safety,
    };
    let graph = explore(&seed, &limits).map_err(Failure::from)?;
    if args.dot {
        println!("{}", graph.to_dot());
    } else {
        let value = graph.to_json();
        print_value(format, &value, || {
            println!(
                "nodes: {}\nedges: {}\ncomplete: {}",
                graph.nodes.len(),
                graph.edges.len(),
                graph.complete
            );
        });
    }
    if !graph.complete {
        eprintln!("exploration stopped at the node or depth limit");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_frobenius(args: &WordArgs, format: Format) -> CmdResult {
    let seed = load_seed(&args.seed)?;
    let word = parse_word(&args.word, seed.dim())?;
    let report = frobenius_check(&seed, &word, args.safety).map_err(Failure::from)?;
    let value = json!({
        "holds": report.holds,
        "failed_direction": report.failed_direction.map(|k| k + 1),
    });
    print_value(format, &value, || {
        if report.holds {
            println!("holds: true");
        } else {
            println!(
                "holds: false (direction {})",
                report.failed_direction.map_or(0, |k| k + 1)
            );
        }
    });
    Ok(if report.holds { 0 } else { 1 })
}

fn report_to_json(report: &DiscriminantReport, runtime_ms: u128) -> Value {
    json!({
        "discriminant": report.discriminant.to_json(),
        "expected": report.expected.to_json(),
        "verdict": report.verdict,
        "exponents": report
            .exponents
            .iter()
            .map(|(j, e)| json!({"direction": j + 1, "exponent": e}))
            .collect::<Vec<_>>(),
        "unit": report.unit.as_ref().map(|u| u.to_string()),
        "runtime_ms": runtime_ms,
    })
}

fn print_report(report: &DiscriminantReport, runtime_ms: u128, format: Format) {
    let value = report_to_json(report, runtime_ms);
    print_value(format, &value, || {
        println!("verdict: {}", report.verdict);
        println!("discriminant: {}", report.discriminant);
        println!("expected: {}", report.expected);
        for (j, e) in &report.exponents {
            println!("direction {}: exponent {}", j + 1, e);
        }
        if let Some(unit) = &report.unit {
            println!("unit: {unit}");
        }
        println!("runtime: {runtime_ms} ms");
    });
}

fn parse_cartan(value: &Value) -> Result<CartanDatum, Failure> {
    let a_value = value
        .get("A")
        .ok_or_else(|| Failure::Input("Cartan file needs an \"A\" matrix".into()))?;
    let a: Vec<Vec<i64>> = serde_json::from_value(a_value.clone())
        .map_err(|e| Failure::Input(format!("field A: {e}")))?;
    let d: Vec<u64> = match value.get("d") {
        Some(d_value) => serde_json::from_value(d_value.clone())
            .map_err(|e| Failure::Input(format!("field d: {e}")))?,
        None => vec![1; a.len()],
    };
    CartanDatum::new(a, d).map_err(Into::into)
}

fn descriptor_seeds(value: &Value) -> Result<Vec<Seed>, Failure> {
    let list = value
        .get("seeds")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::Input("torus preset needs a \"seeds\" array".into()))?;
    if list.is_empty() {
        return Err(Failure::Input("the \"seeds\" array is empty".into()));
    }
    list.iter()
        .map(|item| Seed::from_json(item).map_err(Into::into))
        .collect()
}

fn cmd_disc(args: &DiscArgs, format: Format) -> CmdResult {
    let descriptor = read_json(&args.input)?;
    let preset = descriptor
        .get("preset")
        .and_then(Value::as_str)
        .ok_or_else(|| {
            Failure::Input("descriptor needs a \"preset\": torus, weyl or unipotent".into())
        })?;
    let start = Instant::now();
    let report = match preset {
        "torus" => {
            let seeds = descriptor_seeds(&descriptor)?;
            match descriptor.get("basis") {
                None => cluster_discriminant(&seeds, args.max_rank, args.safety)
                    .map_err(Failure::from)?,
                Some(basis_value) => {
                    let exponents: Vec<Vec<i64>> = serde_json::from_value(basis_value.clone())
                        .map_err(|e| Failure::Input(format!("field basis: {e}")))?;
                    ruqca::discriminant::verify_nerve(&seeds, args.safety)
                        .map_err(Failure::from)?;
                    seeds[0].ensure_coprime().map_err(Failure::from)?;
                    if exponents.len() > args.max_rank {
                        return Err(Failure::Input(format!(
                            "basis rank {} exceeds the limit {}",
                            exponents.len(),
                            args.max_rank
                        )));
                    }
                    let p =
                        TorusPresentation::with_basis_exponents(&seeds[0], &exponents, args.safety)
                            .map_err(Failure::from)?;
                    let gram = trace_matrix(&p).map_err(Failure::from)?;
                    let d = determinant_central(&gram, args.safety).map_err(Failure::from)?;
                    factor_discriminant(&seeds[0], &d, args.safety).map_err(Failure::from)?
                }
            }
        }
        "weyl" => {
            let ell = descriptor.get("l").and_then(Value::as_u64).ok_or_else(|| {
                Failure::Input("weyl preset needs an integer \"l\"".into())
            })?;
            let n = descriptor.get("n").and_then(Value::as_u64).ok_or_else(|| {
                Failure::Input("weyl preset needs an integer \"n\"".into())
            })? as usize;
            let q: Option<Vec<Vec<i64>>> = match descriptor.get("Q") {
                Some(q_value) => Some(
                    serde_json::from_value(q_value.clone())
                        .map_err(|e| Failure::Input(format!("field Q: {e}")))?,
                ),
                None => None,
            };
            let p = WeylPresentation::new(ell, n, q).map_err(Failure::from)?;
            p.discriminant(args.max_rank, args.safety).map_err(Failure::from)?
        }
        "unipotent" => {
            let cartan_value = descriptor.get("cartan").ok_or_else(|| {
                Failure::Input("unipotent preset needs a \"cartan\" object".into())
            })?;
            let datum = parse_cartan(cartan_value)?;
            let word_values: Vec<u64> = serde_json::from_value(
                descriptor
                    .get("word")
                    .cloned()
                    .ok_or_else(|| Failure::Input("unipotent preset needs a \"word\"".into()))?,
            )
            .map_err(|e| Failure::Input(format!("field word: {e}")))?;
            let word: Vec<usize> = word_values
                .iter()
                .map(|&v| {
                    if v == 0 || v as usize > datum.rank() {
                        Err(Failure::Input(format!(
                            "word letter {v} out of range 1..={}",
                            datum.rank()
                        )))
                    } else {
                        Ok(v as usize - 1)
                    }
                })
                .collect::<Result<_, _>>()?;
            let ell = descriptor.get("l").and_then(Value::as_u64).ok_or_else(|| {
                Failure::Input("unipotent preset needs an integer \"l\"".into())
            })?;
            theorem_c_check(&datum, &word, ell, args.safety).map_err(Failure::from)?
        }
        other => {
            return Err(Failure::Input(format!(
                "unknown preset {other}; expected torus, weyl or unipotent"
            )))
        }
    };
    let runtime_ms = start.elapsed().as_millis();
    print_report(&report, runtime_ms, format);
    Ok(if report.verdict { 0 } else { 1 })
}

fn cmd_weyl(args: &WeylArgs, format: Format) -> CmdResult {
    let q: Option<Vec<Vec<i64>>> = match &args.q {
        Some(path) => Some(
            serde_json::from_value(read_json(path)?)
                .map_err(|e| Failure::Input(format!("parameter matrix: {e}")))?,
        ),
        None => None,
    };
    let p = WeylPresentation::new(args.l, args.n, q).map_err(Failure::from)?;
    let (_, seed_report) = p.seed().map_err(Failure::from)?;

    let mut value = json!({
        "n": args.n,
        "l": args.l,
        "diagonal": seed_report.diagonal,
        "coprime": seed_report.coprime,
        "block_formula_matches": seed_report.block_formula_matches,
    });
    let mut exit = 0u8;
    if args.no_disc {
        print_value(format, &value, || {
            println!("n = {}, order {}", args.n, args.l);
            println!("diagonal: {:?}", seed_report.diagonal);
            println!("coprime: {}", seed_report.coprime);
        });
        return Ok(exit);
    }

    let start = Instant::now();
    let report = p
        .discriminant(args.max_rank, args.safety)
        .map_err(Failure::from)?;
    let runtime_ms = start.elapsed().as_millis();
    if !report.verdict {
        exit = 1;
    }
    value["discriminant"] = report_to_json(&report, runtime_ms);
    print_value(format, &value, || {
        println!("n = {}, order {}", args.n, args.l);
        println!("diagonal: {:?}", seed_report.diagonal);
        println!("coprime: {}", seed_report.coprime);
        println!("verdict: {}", report.verdict);
        println!("discriminant: {}", report.discriminant);
        for (j, e) in &report.exponents {
            println!("direction {}: exponent {}", j + 1, e);
        }
        println!("runtime: {runtime_ms} ms");
    });
    Ok(exit)
}

fn cmd_unip(args: &UnipArgs, format: Format) -> CmdResult {
    let datum = parse_cartan(&read_json(&args.cartan)?)?;
    let word = parse_word(&args.word, datum.rank())?;
    if word.is_empty() {
        return Err(Failure::Input("the word must be nonempty".into()));
    }
    let words = ReducedWordData::new(&datum, &word).map_err(Failure::from)?;
    let data = build_unipotent_seed_data(&datum, &words).map_err(Failure::from)?;
    let (seed, _) = unipotent_seed(&datum, &words, args.l).map_err(Failure::from)?;
    let degree_ok = degree_identity_check(&datum, &words);

    let mut value = json!({
        "word": word.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "l": args.l,
        "lambda": data.lambda,
        "B": data.btilde,
        "exchangeable": data.exchangeable.iter().map(|k| k + 1).collect::<Vec<_>>(),
        "pairing_diagonal": data.pairing_diagonal,
        "compat_diagonal": seed.compatibility().diagonal,
        "coprime": seed.compatibility().coprime,
        "degree_identity": degree_ok,
    });
    let mut exit = if degree_ok { 0u8 } else { 1 };

    let has_repeats = {
        let mut seen = vec![false; datum.rank()];
        let mut repeated = false;
        for &letter in &word {
            if seen[letter] {
                repeated = true;
            }
            seen[letter] = true;
        }
        repeated
    };
    let disc_line;
    if !has_repeats || args.full_disc {
        let start = Instant::now();
        let report =
            theorem_c_check(&datum, &word, args.l, args.safety).map_err(Failure::from)?;
        let runtime_ms = start.elapsed().as_millis();
        if !report.verdict {
            exit = 1;
        }
        value["discriminant"] = report_to_json(&report, runtime_ms);
        disc_line = format!(
            "discriminant verdict: {} ({} ms)",
            report.verdict, runtime_ms
        );
    } else {
        disc_line = "discriminant skipped: the word repeats letters; pass --full-disc".into();
        value["discriminant"] = Value::String("skipped".into());
    }

    print_value(format, &value, || {
        println!(
            "word: {:?}, order {}",
            word.iter().map(|k| k + 1).collect::<Vec<_>>(),
            args.l
        );
        println!("lambda: {:?}", data.lambda);
        println!("B: {:?}", data.btilde);
        println!(
            "exchangeable: {:?}",
            data.exchangeable.iter().map(|k| k + 1).collect::<Vec<_>>()
        );
        println!("pairing diagonal: {:?}", data.pairing_diagonal);
        println!("compat diagonal: {:?}", seed.compatibility().diagonal);
        println!("degree identity: {degree_ok}");
        println!("{disc_line}");
    });
    Ok(exit)
}

fn cmd_selftest(args: &SelftestArgs, format: Format) -> CmdResult {
    let opts = BatteryOptions {
        include_stretch: args.full_disc,
        full_discriminants: args.full_disc,
        safety: args.safety,
        rng_seed: args.seed,
    };
    let outcomes = selftest::run_all(&opts);
    if format == Format::Json {
        let value: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "name": o.name,
                    "passed": o.passed,
                    "elapsed_ms": o.elapsed.as_millis() as u64,
                    "detail": o.detail,
                })
            })
            .collect();
        println!("{:#}", Value::Array(value));
    } else {
        let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
        for o in &outcomes {
            println!(
                "{:<width$}  {}  {:>6} ms  {}",
                o.name,
                if o.passed { "PASS" } else { "FAIL" },
                o.elapsed.as_millis(),
                o.detail,
            );
        }
    }
    Ok(if selftest::all_passed(&outcomes) { 0 } else { 1 })
}
