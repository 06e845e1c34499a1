use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use distillery::bench::{
    check_table1, decompose_mct, expand_to_icm_skeleton, load_table1, monte_carlo, parse_real, table1_fixture,
    CheckStatus, MctCircuit, MctGate, MonteCarloStats, SkeletonParams,
};
use distillery::icm::{parse_circuit, CostModel, IcmCircuit};
use distillery::layout::{render, Metrics, RenderFormat, Schedule};
use distillery::reliability::{min_extra_offline, min_extra_online, BudgetMode, ReliabilityParams};
use distillery::report::{run_with_report, RunConfig};
use distillery::schedulers::{AlapsStrategy, Algorithm, AsapLayout, HeraldOracle, ScheduleError, SchedulerLimits};

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser)]
#[command(name = "distillery", version, about = "Schedule ICM circuits with heralded magic-state distillation")]
struct Cli {
    /// Cost-model JSON replacing the default costs.
    #[arg(long, global = true, env = "DISTILLERY_COSTS")]
    costs: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest redundancy meeting the failure budget, as JSON.
    SolveExtra {
        #[arg(long, default_value_t = 1)]
        ni: u64,
        #[command(flatten)]
        rel: RelArgs,
        /// Solve for one online batch instead of `ni` offline successes.
        #[arg(long)]
        online: bool,
    },
    /// Schedule one circuit and write the schedule and a run report.
    Schedule(ScheduleArgs),
    /// Verify the results-table fixture and/or tabulate a circuit corpus.
    Bench(BenchArgs),
    /// Monte Carlo runs of an online scheduler under the stochastic oracle.
    Mc(McArgs),
    /// Generate an ICM skeleton from random Toffolis or a `.real` file.
    Gen(GenArgs),
    /// Draw a schedule JSON as SVG or ASCII.
    Render {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct RelArgs {
    /// Failure probability of one distillation.
    #[arg(long, default_value_t = 0.2)]
    pf: f64,
    /// Allowed failure probability of the computation.
    #[arg(long, default_value_t = 0.001)]
    pc: f64,
    /// Split the budget across independent guarantees.
    #[arg(long)]
    global_budget: bool,
}

impl RelArgs {
    fn params(self) -> Result<ReliabilityParams, CliError> {
        let p = ReliabilityParams::new(self.pf, self.pc).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(if self.global_budget { p.with_budget(BudgetMode::Global) } else { p })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Asap,
    AsapMatrix,
    Alapt,
    Alaps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Rus,
    Fixed,
}

impl From<Strategy> for AlapsStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Rus => AlapsStrategy::RepeatUntilSuccess,
            Strategy::Fixed => AlapsStrategy::FixedSequence,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Ascii,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Parallel lanes per type for `asap-matrix`.
    #[arg(long, default_value_t = 8)]
    rows: u32,
    #[arg(long, value_enum, default_value = "rus")]
    strategy: Strategy,
    /// `worst`, `stochastic:SEED` or `scripted:FILE`.
    #[arg(long, default_value = "worst")]
    oracle: String,
    #[command(flatten)]
    rel: RelArgs,
    /// Machine qubit limit.
    #[arg(long)]
    m: Option<u32>,
    /// Start a new batch for every need instead of reusing surplus states.
    #[arg(long)]
    no_pool: bool,
    /// Schedule JSON output (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Run report JSON (stderr if omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Check the bundled results-table fixture.
    #[arg(long)]
    fixture: bool,
    /// Check this results-table CSV instead of the bundled one.
    #[arg(long)]
    fixture_file: Option<PathBuf>,
    /// Directory of circuit `.json` and MCT `.real` files to schedule.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Corpus CSV output (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixture check report JSON (stdout if omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    rel: RelArgs,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum, default_value = "alaps")]
    algo: Algo,
    #[arg(long, value_enum, default_value = "rus")]
    strategy: Strategy,
    #[arg(long, default_value_t = 1000)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    rel: RelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of random Toffoli gates.
    #[arg(long, conflicts_with = "real")]
    toffoli: Option<usize>,
    /// Data wires for random Toffolis.
    #[arg(long, default_value_t = 3)]
    width: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RevLib `.real` file to decompose and expand.
    #[arg(long)]
    real: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    a_per_toffoli: u32,
    #[arg(long)]
    no_internal_cnots: bool,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Capacity(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Capacity(_) => EXIT_CAPACITY,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Capacity(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        match e {
            ScheduleError::Capacity(_) => CliError::Capacity(e.to_string()),
            ScheduleError::Oracle(_) => CliError::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let costs = match &cli.costs {
        Some(path) => CostModel::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => CostModel::default(),
    };
    match cli.command {
        Command::SolveExtra { ni, rel, online } => {
            let p = rel.params()?;
            let extra = if online { min_extra_online(&p) } else { min_extra_offline(ni.max(1), &p) };
            emit(None, &json(&extra))?;
            Ok(0)
        }
        Command::Schedule(args) => cmd_schedule(args, costs),
        Command::Bench(args) => cmd_bench(args, costs),
        Command::Mc(args) => cmd_mc(args, costs),
        Command::Gen(args) => cmd_gen(args),
        Command::Render { schedule, format, out } => {
            let s = Schedule::from_json(&read(&schedule)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", schedule.display())))?;
            let format = match format {
                Format::Svg => RenderFormat::Svg,
                Format::Ascii => RenderFormat::Ascii,
            };
            emit_bytes(out.as_deref(), &render(&s, format))?;
            Ok(0)
        }
    }
}

fn algorithm(algo: Algo, rows: u32, strategy: Strategy) -> Algorithm {
    match algo {
        Algo::Asap => Algorithm::Asap { layout: AsapLayout::Column },
        Algo::AsapMatrix => Algorithm::Asap { layout: AsapLayout::Matrix { rows } },
        Algo::Alapt => Algorithm::Alapt,
        Algo::Alaps => Algorithm::Alaps { strategy: strategy.into() },
    }
}

fn parse_oracle(spec: &str, p_f: f64) -> Result<HeraldOracle, CliError> {
    let bad = || CliError::Input(format!("invalid oracle `{spec}`; expected worst, stochastic:SEED or scripted:FILE"));
    match spec.split_once(':') {
        None if spec == "worst" => Ok(HeraldOracle::WorstCase),
        Some(("stochastic", seed)) => Ok(HeraldOracle::stochastic(seed.parse().map_err(|_| bad())?, p_f)),
        Some(("scripted", file)) => {
            HeraldOracle::scripted_from_json(&read(Path::new(file))?).map_err(|e| CliError::Input(format!("{file}: {e}")))
        }
        _ => Err(bad()),
    }
}

fn load_circuit(path: &Path) -> Result<IcmCircuit, CliError> {
    parse_circuit(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn cmd_schedule(args: ScheduleArgs, costs: CostModel) -> Result<u8, CliError> {
    let c = load_circuit(&args.circuit)?;
    let rel = args.rel.params()?;
    let config = RunConfig {
        algorithm: algorithm(args.algo, args.rows, args.strategy),
        oracle: parse_oracle(&args.oracle, rel.p_f())?,
        reliability: rel,
        limits: SchedulerLimits { m: args.m },
        pooling: !args.no_pool,
        costs,
    };
    let (outcome, report) = run_with_report(&config, &c)?;
    emit(args.out.as_deref(), &outcome.schedule.to_json())?;
    if let Some(path) = &args.svg {
        write(path, &render(&outcome.schedule, RenderFormat::Svg))?;
    }
    match &args.report {
        Some(path) => write(path, report.to_json().as_bytes())?,
        None => eprintln!("{}", report.to_json()),
    }
    if report.is_valid() {
        Ok(0)
    } else {
        eprintln!("error: schedule failed validation with {} violation(s)", report.violations.len());
        Ok(EXIT_INPUT)
    }
}

#[derive(Serialize)]
struct CorpusRow {
    circuit: String,
    #[serde(rename = "A")]
    a: u32,
    #[serde(rename = "Y")]
    y: u32,
    asap_t: u64,
    asap_s: u64,
    asap_bb: u64,
    alapt_t: u64,
    alapt_s: u64,
    alapt_bb: u64,
    alaps_t: u64,
    alaps_s: u64,
    alaps_bb: u64,
}

const CORPUS_HEADER: [&str; 12] = [
    "circuit", "A", "Y", "asap_t", "asap_s", "asap_bb", "alapt_t", "alapt_s", "alapt_bb", "alaps_t", "alaps_s", "alaps_bb",
];

fn cmd_bench(args: BenchArgs, costs: CostModel) -> Result<u8, CliError> {
    if !args.fixture && args.fixture_file.is_none() && args.corpus.is_none() {
        return Err(CliError::Input("nothing to do: give --fixture and/or --corpus".into()));
    }
    let rel = args.rel.params()?;
    let mut code = 0;

    if args.fixture || args.fixture_file.is_some() {
        let rows = if let Some(path) = &args.fixture_file {
            let text = String::from_utf8(read(path)?).map_err(|e| CliError::Input(e.to_string()))?;
            load_table1(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        } else {
            table1_fixture()
        };
        let report = check_table1(&rows, &rel, &costs);
        emit(args.report.as_deref(), &json(&report))?;
        let failed = report.rows.len() - report.rows_without_failure();
        let incomplete = report
            .rows
            .iter()
            .filter(|r| r.checks.iter().any(|c| c.status == CheckStatus::Incomplete))
            .count();
        eprintln!(
            "fixture: {} rows, {} without failures ({incomplete} with blank cells), {failed} failing",
            report.rows.len(),
            report.rows_without_failure()
        );
        if failed > 0 {
            code = EXIT_FAILED;
        }
    }

    if let Some(dir) = &args.corpus {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "real")))
            .collect();
        files.sort();
        let mut writer = csv::Writer::from_writer(Vec::new());
        if files.is_empty() {
            writer.write_record(CORPUS_HEADER).map_err(csv_error)?;
        }
        for path in &files {
            let c = corpus_circuit(path)?;
            let mut cells = Vec::with_capacity(3);
            for algo in [
                Algorithm::Asap { layout: AsapLayout::Column },
                Algorithm::Alapt,
                Algorithm::Alaps { strategy: AlapsStrategy::RepeatUntilSuccess },
            ] {
                let mut config = RunConfig::new(algo);
                config.reliability = rel;
                config.costs = costs.clone();
                let (_, report) = run_with_report(&config, &c)?;
                if !report.is_valid() {
                    return Err(CliError::Failed(format!("{}: invalid schedule", path.display())));
                }
                cells.push(report.metrics);
            }
            let s = c.stats();
            let [a, t, p]: [Metrics; 3] = cells.try_into().expect("three schedulers");
            writer
                .serialize(CorpusRow {
                    circuit: c.name().to_string(),
                    a: s.inject_a,
                    y: s.inject_y,
                    asap_t: a.t,
                    asap_s: a.s,
                    asap_bb: a.bb,
                    alapt_t: t.t,
                    alapt_s: t.s,
                    alapt_bb: t.bb,
                    alaps_t: p.t,
                    alaps_s: p.s,
                    alaps_bb: p.bb,
                })
                .map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
        emit_bytes(args.out.as_deref(), &bytes)?;
    }
    Ok(code)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Failed(e.to_string())
}

fn corpus_circuit(path: &Path) -> Result<IcmCircuit, CliError> {
    if path.extension().and_then(|e| e.to_str()) == Some("real") {
        let mct = parse_real(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("circuit");
        skeleton(&mct, SkeletonParams::default(), name)
    } else {
        load_circuit(path)
    }
}

fn skeleton(mct: &MctCircuit, params: SkeletonParams, name: &str) -> Result<IcmCircuit, CliError> {
    expand_to_icm_skeleton(&decompose_mct(mct), params, name).map_err(|e| CliError::Failed(e.to_string()))
}

#[derive(Serialize)]
struct McReport {
    circuit: String,
    stats: MonteCarloStats,
    worst_case: Metrics,
}

fn cmd_mc(args: McArgs, costs: CostModel) -> Result<u8, CliError> {
    let c = load_circuit(&args.circuit)?;
    let rel = args.rel.params()?;
    let algo = match args.algo {
        Algo::Asap | Algo::AsapMatrix => {
            return Err(CliError::Input("ASAP is deterministic; use alapt or alaps".into()));
        }
        a => algorithm(a, 0, args.strategy),
    };
    let stats = monte_carlo(&c, &costs, &rel, algo, args.runs, args.seed)?;
    let mut config = RunConfig::new(algo);
    config.reliability = rel;
    config.costs = costs;
    let worst_case = config.run(&c)?.metrics;
    emit(args.out.as_deref(), &json(&McReport { circuit: c.name().to_string(), stats, worst_case }))?;
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<u8, CliError> {
    let params = SkeletonParams { a_per_toffoli: args.a_per_toffoli, internal_cnots: !args.no_internal_cnots };
    let (mct, default_name) = match (&args.real, args.toffoli) {
        (Some(path), _) => {
            let mct = parse_real(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (mct, path.file_stem().and_then(|s| s.to_str()).unwrap_or("circuit").to_string())
        }
        (None, Some(k)) => {
            if args.width < 3 {
                return Err(CliError::Input("--width must be at least 3 for Toffoli gates".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let wires: Vec<u32> = (0..args.width).collect();
            let gates = (0..k)
                .map(|_| {
                    let w: Vec<u32> = wires.choose_multiple(&mut rng, 3).copied().collect();
                    MctGate::new(vec![w[0], w[1]], w[2])
                })
                .collect();
            let mct = MctCircuit::new(args.width, gates).map_err(|e| CliError::Failed(e.to_string()))?;
            (mct, format!("toffoli_{k}_w{}_s{}", args.width, args.seed))
        }
        (None, None) => return Err(CliError::Input("give --toffoli K or --real FILE".into())),
    };
    let c = skeleton(&mct, params, args.name.as_deref().unwrap_or(&default_name))?;
    emit(args.out.as_deref(), &c.to_json())?;
    Ok(0)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut bytes = text.as_bytes().to_vec();
    if !text.ends_with('\n') {
        bytes.push(b'\n');
    }
    emit_bytes(path, &bytes)
}

fn emit_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, bytes),
        None => match std::io::stdout().write_all(bytes) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Failed(e.to_string())),
            _ => Ok(()),
        },
    }
}
