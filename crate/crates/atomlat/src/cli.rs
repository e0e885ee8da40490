//! Command-line surface: train and evaluate models, run Queens protocols,
//! generate data, print closed-form predictions. Exit codes: 0 success,
//! 1 usage error, 2 data or consistency error.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algebra::AlgebraState;
use crate::error::{Error, Result};
use crate::inference;
use crate::metrics;
use crate::problems::bars::{BarGenerator, BarLabeler};
use crate::problems::pixels::PixelWorld;
use crate::problems::queens::{self, BoardSpec, QueensWorld, Square};
use crate::problems::{dsl, exact_vertical_bar_atomization};
use crate::trainer::{self, BatchSizing, FitProtocol, ModelSnapshot, QueensSchedule};

#[derive(Parser, Debug)]
#[command(
    name = "atomlat",
    about = "Discrete, parameter-free learning over atomized semilattices",
    version
)]
struct Cli {
    /// key=value file supplying defaults for any long flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model on a generated problem and write snapshots/CSV.
    Train(TrainArgs),
    /// Evaluate snapshots on generated data (single model, vote, misses).
    Eval(EvalArgs),
    /// Run the Queens completion protocol and print boards per epoch.
    Queens(QueensArgs),
    /// Build the exact vertical-bar atomization and verify it exhaustively.
    ExactOracle(ExactOracleArgs),
    /// Generate labeled bar images as relation lines.
    GenData(GenDataArgs),
    /// Print closed-form theory values.
    Theory(TheoryArgs),
}

#[derive(Args, Debug, Default)]
struct TrainArgs {
    /// bars | evenodd
    #[arg(long)]
    problem: Option<String>,
    /// Image size as WxH, e.g. 7x7.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    noise: Option<f64>,
    /// Train on every image of the grid as one repeated batch.
    #[arg(long)]
    exhaustive: bool,
    /// Total examples to stream (ignored with --exhaustive).
    #[arg(long)]
    examples: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    epochs: Option<u32>,
    /// Held-out evaluation examples per record.
    #[arg(long)]
    eval_size: Option<usize>,
    #[arg(long)]
    record_every: Option<u32>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    max_pinning: Option<usize>,
    /// Independent replicas trained in parallel (suffixen output files).
    #[arg(long)]
    replicas: Option<usize>,
    /// Seed; `random` opts into entropy.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct EvalArgs {
    /// Snapshot files; several enable voting.
    #[arg(long, num_args = 1..)]
    model: Vec<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<String>,
    /// Agreements required to call an example positive when voting.
    #[arg(long)]
    threshold: Option<usize>,
    /// Classify through pinning-derived atoms with this misses cutoff.
    #[arg(long)]
    misses: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct QueensArgs {
    #[arg(long)]
    size: Option<usize>,
    /// Comma-separated blocked squares, e.g. b4,d5.
    #[arg(long)]
    blocked: Option<String>,
    #[arg(long)]
    epochs: Option<u32>,
    #[arg(long)]
    seed: Option<String>,
    /// plain | insert
    #[arg(long)]
    schedule: Option<String>,
    /// Idle epoch stride for the plain schedule.
    #[arg(long)]
    idle_every: Option<usize>,
    #[arg(long)]
    max_pinning: Option<usize>,
    /// Keep running after the first complete board.
    #[arg(long)]
    keep_going: bool,
    /// Print only the final board instead of one per epoch.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug, Default)]
struct ExactOracleArgs {
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct GenDataArgs {
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    noise: Option<f64>,
    /// bars | evenodd
    #[arg(long)]
    labeler: Option<String>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct TheoryArgs {
    /// Print (ln3/2)·C/κ.
    #[arg(long)]
    pred_error: bool,
    /// Print the symmetry-corrected (ln3·d² − 2·ln d!)/κ.
    #[arg(long)]
    pred_error_sym: bool,
    /// Print the atom-count bound for a false-positive target.
    #[arg(long)]
    atoms: bool,
    #[arg(long)]
    constants: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    bar_length: Option<u32>,
    #[arg(long)]
    fpr: Option<f64>,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version as "errors" with exit code 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = match cli.config.as_ref().map(|p| load_config(p)).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = match cli.command {
        Command::Train(args) => cmd_train(args, &config),
        Command::Eval(args) => cmd_eval(args, &config),
        Command::Queens(args) => cmd_queens(args, &config),
        Command::ExactOracle(args) => cmd_exact_oracle(args, &config),
        Command::GenData(args) => cmd_gen_data(args, &config),
        Command::Theory(args) => cmd_theory(args, &config),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult = std::result::Result<(), CliError>;

fn load_config(path: &PathBuf) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for line in fs::read_to_string(path)?.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(out)
}

fn cfg<T: std::str::FromStr>(
    flag: Option<T>,
    config: &HashMap<String, String>,
    key: &str,
) -> std::result::Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("bad config value for {key}: {raw:?}"))),
    }
}

fn parse_dims(text: &str) -> std::result::Result<(usize, usize), CliError> {
    let Some((w, h)) = text.split_once('x') else {
        return Err(CliError::Usage(format!("dims must look like 7x7, got {text:?}")));
    };
    let w = w.parse().map_err(|_| CliError::Usage(format!("bad width in {text:?}")))?;
    let h = h.parse().map_err(|_| CliError::Usage(format!("bad height in {text:?}")))?;
    Ok((w, h))
}

fn parse_seed(text: Option<String>, config: &HashMap<String, String>) -> std::result::Result<u64, CliError> {
    // Fixed default keeps runs reproducible; `random` opts into entropy.
    let raw = match text.or_else(|| config.get("seed").cloned()) {
        None => return Ok(7),
        Some(raw) => raw,
    };
    if raw == "random" {
        return Ok(rand::random());
    }
    raw.parse::<u64>()
        .map_err(|_| CliError::Usage(format!("seed must be an integer or `random`, got {raw:?}")))
}

fn parse_labeler(text: &str) -> std::result::Result<BarLabeler, CliError> {
    match text {
        "bars" => Ok(BarLabeler::HasVerticalBar),
        "evenodd" => Ok(BarLabeler::ParityOfBars),
        other => Err(CliError::Usage(format!(
            "unknown problem {other:?}; expected bars or evenodd"
        ))),
    }
}

fn cmd_train(args: TrainArgs, config: &HashMap<String, String>) -> CliResult {
    let problem = cfg(args.problem, config, "problem")?.unwrap_or_else(|| "bars".into());
    let labeler = parse_labeler(&problem)?;
    let dims = cfg(args.dims, config, "dims")?.unwrap_or_else(|| "5x5".into());
    let (width, height) = parse_dims(&dims)?;
    let noise = cfg(args.noise, config, "noise")?.unwrap_or(0.0);
    let seed = parse_seed(args.seed, config)?;
    let batch = cfg(args.batch, config, "batch")?.unwrap_or(200);
    let eval_size = cfg(args.eval_size, config, "eval_size")?.unwrap_or(2000);
    let record_every = cfg(args.record_every, config, "record_every")?.unwrap_or(1);
    let keep_snapshots = cfg(args.snapshots, config, "snapshots")?.unwrap_or(10);
    let max_pinning = cfg(args.max_pinning, config, "max_pinning")?;
    let replicas = cfg(args.replicas, config, "replicas")?.unwrap_or(1).max(1);
    println!("seed: {seed}");

    let exhaustive = args.exhaustive || config.get("exhaustive").map(|v| v == "true").unwrap_or(false);
    let (epochs, protocol_batch) = if exhaustive {
        let total = 1usize << (width * height);
        if width * height > 16 {
            return Err(CliError::Usage(
                "exhaustive training is limited to 16 pixels".into(),
            ));
        }
        (cfg(args.epochs, config, "epochs")?.unwrap_or(8), total)
    } else {
        let examples = cfg(args.examples, config, "examples")?.unwrap_or(4000);
        (
            cfg(args.epochs, config, "epochs")?
                .unwrap_or_else(|| (examples / batch.max(1)).max(1) as u32),
            batch,
        )
    };

    let run_one = |replica: usize| -> Result<(Vec<ModelSnapshot>, Vec<metrics::ExperimentRecord>)> {
        let replica_seed = seed.wrapping_add(replica as u64);
        let mut state = AlgebraState::new(replica_seed);
        let world = PixelWorld::register(&mut state, width, height)?;
        let protocol = FitProtocol {
            sizing: BatchSizing::Fixed(protocol_batch),
            max_epochs: epochs,
            stop_after_zero_error: if exhaustive { Some(2) } else { None },
            keep_snapshots,
            record_every,
            max_pinning_enforced: max_pinning,
            reduce_every: 1,
        };
        let report = if exhaustive {
            let mut source = ExhaustiveSource::new(width, height, labeler);
            let eval = source.all.clone();
            trainer::fit(&mut state, &world, &mut source, &eval, &protocol)?
        } else {
            let mut source = BarGenerator::new(width, height, noise, labeler, replica_seed ^ 0x9e37);
            let eval = BarGenerator::new(width, height, noise, labeler, replica_seed ^ 0x51f1)
                .take(eval_size);
            trainer::fit(&mut state, &world, &mut source, &eval, &protocol)?
        };
        Ok((report.snapshots, report.records))
    };

    let mut results = Vec::new();
    if replicas == 1 {
        results.push(run_one(0)?);
    } else {
        let outcomes: Vec<Result<_>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..replicas).map(|r| scope.spawn(move || run_one(r))).collect();
            handles.into_iter().map(|h| h.join().expect("replica panicked")).collect()
        });
        for o in outcomes {
            results.push(o?);
        }
    }

    for (replica, (snapshots, records)) in results.iter().enumerate() {
        let last = snapshots.last().expect("at least one epoch ran");
        println!(
            "replica {replica}: epochs {}, atoms {}, final test error {}",
            records.last().map(|r| r.epoch + 1).unwrap_or(0),
            last.atoms.len(),
            records.last().map(|r| r.test_err.to_string()).unwrap_or_else(|| "n/a".into()),
        );
        if let Some(out) = &args.out {
            let path = suffixed(out, replica, replicas);
            last.save(&path).map_err(CliError::Data)?;
            println!("wrote {}", path.display());
        }
        if let Some(csv) = &args.csv {
            let path = suffixed(csv, replica, replicas);
            let mut file = fs::File::create(&path).map_err(|e| CliError::Data(e.into()))?;
            metrics::write_csv(records, &mut file).map_err(|e| CliError::Data(e.into()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn suffixed(path: &PathBuf, replica: usize, replicas: usize) -> PathBuf {
    if replicas == 1 {
        return path.clone();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("");
    let name = if ext.is_empty() {
        format!("{stem}.{replica}")
    } else {
        format!("{stem}.{replica}.{ext}")
    };
    path.with_file_name(name)
}

/// Repeats the full grid as every batch; used by --exhaustive.
struct ExhaustiveSource {
    all: Vec<crate::problems::bars::LabeledExample>,
}

impl ExhaustiveSource {
    fn new(width: usize, height: usize, labeler: BarLabeler) -> Self {
        let all = crate::problems::bars::BinaryImage::enumerate(width, height)
            .map(|image| {
                let label = labeler.label(&image);
                crate::problems::bars::LabeledExample { image, label }
            })
            .collect();
        ExhaustiveSource { all }
    }
}

impl trainer::ExampleSource for ExhaustiveSource {
    fn next_batch(&mut self, _n: usize) -> Vec<crate::problems::bars::LabeledExample> {
        self.all.clone()
    }
}

fn cmd_eval(args: EvalArgs, config: &HashMap<String, String>) -> CliResult {
    if args.model.is_empty() {
        return Err(CliError::Usage("eval needs at least one --model".into()));
    }
    let problem = cfg(args.problem, config, "problem")?.unwrap_or_else(|| "bars".into());
    let labeler = parse_labeler(&problem)?;
    let dims = cfg(args.dims, config, "dims")?.unwrap_or_else(|| "5x5".into());
    let (width, height) = parse_dims(&dims)?;
    let noise = cfg(args.noise, config, "noise")?.unwrap_or(0.0);
    let count = cfg(args.count, config, "count")?.unwrap_or(2000);
    let seed = parse_seed(args.seed, config)?;
    println!("seed: {seed}");

    let snapshots: Vec<ModelSnapshot> = args
        .model
        .iter()
        .map(|p| ModelSnapshot::load(p))
        .collect::<Result<_>>()?;
    let mut probe = AlgebraState::new(seed);
    let world = PixelWorld::register(&mut probe, width, height)?;
    for snap in &snapshots {
        if snap.constants.len() != probe.constant_count() {
            return Err(CliError::Data(Error::DimensionMismatch));
        }
    }
    let examples = BarGenerator::new(width, height, noise, labeler, seed).take(count);
    let threshold = cfg(args.threshold, config, "threshold")?.unwrap_or(snapshots.len() / 2 + 1);

    let mut wrong_single = 0usize;
    let mut wrong_vote = 0usize;
    let mut wrong_misses = 0usize;
    for ex in &examples {
        let q = world.query(&ex.image)?;
        let single = inference::contains(snapshots.last().unwrap(), world.class, &q)?;
        if single != ex.label {
            wrong_single += 1;
        }
        if snapshots.len() > 1 {
            let v = inference::vote(&snapshots, world.class, &q, threshold)?;
            if v.decision != ex.label {
                wrong_vote += 1;
            }
        }
        if let Some(cutoff) = args.misses {
            let decision =
                inference::misses_classify(&snapshots.last().unwrap().pinning, world.class, &q, cutoff);
            if decision != ex.label {
                wrong_misses += 1;
            }
        }
    }
    let n = examples.len().max(1) as f64;
    println!("single-model error: {}", wrong_single as f64 / n);
    if snapshots.len() > 1 {
        println!(
            "vote error ({} models, threshold {threshold}): {}",
            snapshots.len(),
            wrong_vote as f64 / n
        );
    }
    if args.misses.is_some() {
        println!("misses-cutoff error: {}", wrong_misses as f64 / n);
    }
    Ok(())
}

fn cmd_queens(args: QueensArgs, config: &HashMap<String, String>) -> CliResult {
    let size = cfg(args.size, config, "size")?.unwrap_or(8);
    let blocked_text = cfg(args.blocked, config, "blocked")?.unwrap_or_default();
    let mut blocked = Vec::new();
    for part in blocked_text.split(',').filter(|s| !s.trim().is_empty()) {
        blocked.push(Square::parse(part.trim(), size)?);
    }
    let spec = BoardSpec { size, blocked };
    spec.validate()?;
    let epochs = cfg(args.epochs, config, "epochs")?.unwrap_or(40);
    let seed = parse_seed(args.seed, config)?;
    let max_pinning = cfg(args.max_pinning, config, "max_pinning")?;
    let schedule_name = cfg(args.schedule, config, "schedule")?.unwrap_or_else(|| "plain".into());
    let idle_every = cfg(args.idle_every, config, "idle_every")?.unwrap_or(8);
    let schedule = match schedule_name.as_str() {
        "plain" => QueensSchedule::with_idle_every(idle_every),
        "insert" => QueensSchedule::insert_then_idle(size, 3),
        other => {
            return Err(CliError::Usage(format!(
                "unknown schedule {other:?}; expected plain or insert"
            )))
        }
    };
    println!("seed: {seed}");

    let mut state = AlgebraState::new(seed);
    let world = QueensWorld::register(&mut state, size)?;
    let reports = trainer::queens_protocol(
        &mut state,
        &world,
        &spec,
        &schedule,
        epochs,
        max_pinning,
        !args.keep_going,
    )?;
    for report in &reports {
        if args.quiet && !report.complete && report.epoch + 1 != reports.len() as u32 {
            continue;
        }
        println!(
            "epoch {} ({:?}){}",
            report.epoch + 1,
            report.kind,
            match report.inserted {
                Some(sq) => format!(", inserted {}", sq.name()),
                None => String::new(),
            }
        );
        print!("{}", queens::render_board(&report.board));
        if report.complete {
            println!("complete board found at epoch {}", report.epoch + 1);
        }
        println!();
    }
    if !reports.iter().any(|r| r.complete) {
        println!("no complete board within {epochs} epochs");
    }
    Ok(())
}

fn cmd_exact_oracle(args: ExactOracleArgs, config: &HashMap<String, String>) -> CliResult {
    let rows = cfg(args.rows, config, "rows")?.unwrap_or(3);
    let cols = cfg(args.cols, config, "cols")?.unwrap_or(2);
    if rows * cols > 16 {
        return Err(CliError::Usage("exhaustive check is limited to 16 pixels".into()));
    }
    let mut state = AlgebraState::new(0);
    let world = PixelWorld::register(&mut state, cols, rows)?;
    let atoms = exact_vertical_bar_atomization(&world, 1 << 20)?;
    println!("{} atoms for a {rows}x{cols} grid", atoms.len());
    let snapshot = snapshot_from_fingerprints(&state, &atoms);
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for image in crate::problems::bars::BinaryImage::enumerate(cols, rows) {
        let q = world.query(&image)?;
        let predicted = inference::contains(&snapshot, world.class, &q)?;
        if predicted != image.has_vertical_bar() {
            mismatches += 1;
        }
        total += 1;
    }
    println!("{total} images checked, {mismatches} mismatches");
    if mismatches > 0 {
        return Err(CliError::Data(Error::InconsistentInput));
    }
    Ok(())
}

pub(crate) fn snapshot_from_fingerprints(
    state: &AlgebraState,
    fingerprints: &[crate::bitset::BitSet],
) -> ModelSnapshot {
    ModelSnapshot {
        version: 1,
        seed: state.seed(),
        epoch: 0,
        constants: state
            .constant_ids()
            .map(|c| state.constant_name(c).to_string())
            .collect(),
        atoms: fingerprints
            .iter()
            .map(|fp| fp.iter().map(|i| i as u32).collect())
            .collect(),
        pinning: Vec::new(),
    }
}

fn cmd_gen_data(args: GenDataArgs, config: &HashMap<String, String>) -> CliResult {
    let dims = cfg(args.dims, config, "dims")?.unwrap_or_else(|| "5x5".into());
    let (width, height) = parse_dims(&dims)?;
    let noise = cfg(args.noise, config, "noise")?.unwrap_or(0.0);
    let labeler = parse_labeler(
        &cfg(args.labeler, config, "labeler")?.unwrap_or_else(|| "bars".into()),
    )?;
    let count = cfg(args.count, config, "count")?.unwrap_or(100);
    let seed = parse_seed(args.seed, config)?;
    println!("seed: {seed}");

    let mut state = AlgebraState::new(seed);
    let world = PixelWorld::register(&mut state, width, height)?;
    let examples = BarGenerator::new(width, height, noise, labeler, seed).take(count);
    let mut relations = Vec::with_capacity(examples.len());
    for ex in &examples {
        relations.push(world.relation(&mut state, &ex.image, ex.label)?);
    }
    let text = dsl::export_relations(&state, &relations);
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Data(e.into()))?;
            println!("wrote {} relations to {}", relations.len(), path.display());
        }
        None => {
            let mut stdout = std::io::stdout();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Data(e.into()))?;
        }
    }
    Ok(())
}

fn cmd_theory(args: TheoryArgs, config: &HashMap<String, String>) -> CliResult {
    let kappa = cfg(args.kappa, config, "kappa")?;
    if args.pred_error_sym {
        let d = cfg(args.d, config, "d")?
            .ok_or_else(|| CliError::Usage("--pred-error-sym needs --d".into()))?;
        let kappa = kappa.ok_or_else(|| CliError::Usage("--pred-error-sym needs --kappa".into()))?;
        println!("{}", metrics::predicted_error_symmetric(d, kappa));
        return Ok(());
    }
    if args.pred_error {
        let c = cfg(args.constants, config, "constants")?
            .ok_or_else(|| CliError::Usage("--pred-error needs --constants".into()))?;
        let kappa = kappa.ok_or_else(|| CliError::Usage("--pred-error needs --kappa".into()))?;
        println!("{}", metrics::predicted_error(c, kappa));
        return Ok(());
    }
    if args.atoms {
        let noise = cfg(args.noise, config, "noise")?
            .ok_or_else(|| CliError::Usage("--atoms needs --noise".into()))?;
        let bar_length = cfg(args.bar_length, config, "bar_length")?
            .ok_or_else(|| CliError::Usage("--atoms needs --bar-length".into()))?;
        let fpr = cfg(args.fpr, config, "fpr")?
            .ok_or_else(|| CliError::Usage("--atoms needs --fpr".into()))?;
        println!(
            "{}",
            crate::problems::bars::required_atom_count(noise, bar_length, fpr)
        );
        return Ok(());
    }
    Err(CliError::Usage(
        "theory needs one of --pred-error, --pred-error-sym, --atoms".into(),
    ))
}
