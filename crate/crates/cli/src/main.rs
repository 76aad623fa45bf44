mod algo;
mod report;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use densub::exact::DEFAULT_MAX_N;
use densub::peel::DegreeMode;
use densub::rewards::parse_reward_tables;
use densub::{parse_hypergraph, Error, Hypergraph, Reward, RewardSpec};

use algo::{Algo, Options, Outcome};
use report::{Format, Row, StatsRow};

#[derive(Parser)]
#[command(name = "densub", version, about = "Densest subhypergraphs under partial-edge rewards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a dense node set with one algorithm.
    Dense(DenseArgs),
    /// Run every dataset × reward × algorithm combination.
    Bench(BenchArgs),
    /// Edge-composition counts of a node set.
    Stats(StatsArgs),
    /// Write the decision ILP for a given density threshold.
    ExportIlp(ExportArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge file: comma-separated node tokens per line, optional `| weight`.
    #[arg(long)]
    input: PathBuf,
    /// Built-in reward name or a file of `m: v0,...,vm` tables.
    #[arg(long)]
    reward: String,
    /// Node label file with `token,class` lines.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Keep the hypergraph as read: no self-loop, dangling-node or
    /// component filtering.
    #[arg(long)]
    no_preprocess: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "peel-zero")]
    algo: Algo,
    /// Project rewards onto their convex hulls before an exact flow solve.
    #[arg(long)]
    project: bool,
    /// Degree peeling counts every edge meeting the current set instead of
    /// only the edges inside it.
    #[arg(long)]
    incident_degree: bool,
    /// Node limit for brute force.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    /// Accepted for reproducible invocations; every algorithm is
    /// deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl SolveArgs {
    fn options(&self) -> Options {
        Options {
            project: self.project,
            degree_mode: if self.incident_degree { DegreeMode::Incident } else { DegreeMode::Contained },
            max_n: self.max_n,
        }
    }
}

#[derive(Args)]
struct FormatArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

impl FormatArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Text
        }
    }
}

#[derive(Args)]
struct DenseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    format: FormatArgs,
    /// Print the node tokens of the answer.
    #[arg(long)]
    members: bool,
    /// Require at least this many nodes.
    #[arg(long, conflicts_with = "class_min")]
    min_size: Option<usize>,
    /// Require at least N nodes of a class, as `class=N`; repeatable.
    #[arg(long, value_name = "CLASS=N", requires = "labels")]
    class_min: Vec<String>,
    /// Write the min-cut network at the final density as `u v cap` lines.
    #[arg(long, value_name = "FILE")]
    dump_network: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Edge files, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', required = true)]
    input: Vec<PathBuf>,
    /// Reward names or files, comma-separated; `all` for every built-in.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    rewards: Vec<String>,
    /// Algorithms, comma-separated; `all` for every one.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    algos: Vec<String>,
    #[arg(long)]
    no_preprocess: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Node tokens, comma-separated.
    #[arg(long, value_delimiter = ',', group = "source")]
    set: Vec<String>,
    /// File of node tokens separated by commas or whitespace.
    #[arg(long, group = "source")]
    set_file: Option<PathBuf>,
    /// Compute the set with this algorithm.
    #[arg(long, value_enum, group = "source")]
    algo: Option<Algo>,
    #[arg(long)]
    project: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    output: PathBuf,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Data(String),
    Limit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge { .. } | Error::CapacityOverflow(_) => Failure::Limit(e.to_string()),
            Error::NotConvex { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn reward_spec(arg: &str) -> CliResult<RewardSpec> {
    if let Ok(r) = arg.parse::<Reward>() {
        return Ok(RewardSpec::Builtin(r));
    }
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(parse_reward_tables(&read(path)?)?);
    }
    Err(Failure::Usage(format!(
        "unknown reward `{arg}`; expected one of {} or a table file",
        Reward::ALL.map(Reward::name).join(", ")
    )))
}

fn load(path: &Path, labels: Option<&Path>, spec: &RewardSpec, preprocess: bool) -> CliResult<Hypergraph> {
    let text = read(path)?;
    let label_text = labels.map(read).transpose()?;
    let (h, warnings) = parse_hypergraph(&text, label_text.as_deref())
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    if warnings.duplicate_tokens > 0 {
        eprintln!("warning: {} repeated node tokens collapsed", warnings.duplicate_tokens);
    }
    if warnings.unknown_label_tokens > 0 {
        eprintln!("warning: {} labels name unknown nodes", warnings.unknown_label_tokens);
    }
    let h = if preprocess { h.preprocess()? } else { h };
    Ok(h.with_rewards(spec)?)
}

fn load_input(args: &InputArgs) -> CliResult<(Hypergraph, RewardSpec)> {
    let spec = reward_spec(&args.reward)?;
    let h = load(&args.input, args.labels.as_deref(), &spec, !args.no_preprocess)?;
    Ok((h, spec))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn class_minimums(h: &Hypergraph, specs: &[String]) -> CliResult<Vec<usize>> {
    let labels = h.labels().ok_or_else(|| Failure::Usage("--class-min needs --labels".into()))?;
    let mut ell = vec![0; labels.num_classes()];
    for spec in specs {
        let (class, count) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--class-min expects CLASS=N, got `{spec}`")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad count in `{spec}`")))?;
        let id = labels
            .class_id(class.trim())
            .ok_or_else(|| Failure::Data(format!("no class named `{}`", class.trim())))?;
        ell[id as usize] = count;
    }
    Ok(ell)
}

fn cmd_dense(args: DenseArgs) -> CliResult<()> {
    let (h, spec) = load_input(&args.input)?;
    let opts = args.solve.options();
    algo::check(&h, args.solve.algo, &opts).map_err(Failure::Usage)?;
    let ell = if args.class_min.is_empty() { None } else { Some(class_minimums(&h, &args.class_min)?) };
    let start = Instant::now();
    let outcome: Outcome = match (args.min_size, &ell) {
        (Some(l), _) => algo::run_min_size(&h, args.solve.algo, &opts, l)?,
        (None, Some(ell)) => algo::run_classes(&h, args.solve.algo, &opts, ell)?,
        (None, None) => algo::run(&h, args.solve.algo, &opts)?,
    };
    let seconds = start.elapsed().as_secs_f64();
    if let Some(path) = &args.dump_network {
        let file = fs::File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        algo::dump_network(&h, &outcome.set, io::BufWriter::new(file))?;
    }
    let row = Row {
        dataset: dataset_name(&args.input.input),
        reward: spec.label(),
        algo: args.solve.algo.name().into(),
        objective: Some(outcome.density),
        size: Some(outcome.set.len()),
        seconds: Some(seconds),
        guarantee: outcome.guarantee,
        error: None,
        members: args.members.then(|| outcome.set.iter().map(|&v| h.name(v)).collect()),
    };
    let mut out = io::stdout().lock();
    report::write_row(&mut out, args.format.format(), &row)?;
    Ok(())
}

fn expand<T: Clone>(list: &[String], all: &[T], parse: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let mut out = Vec::new();
    for item in list {
        if item == "all" {
            out.extend_from_slice(all);
        } else {
            out.push(parse(item)?);
        }
    }
    Ok(out)
}

fn cmd_bench(args: BenchArgs) -> CliResult<()> {
    let builtins: Vec<String> = Reward::ALL.iter().map(|r| r.name().to_string()).collect();
    let rewards = expand(&args.rewards, &builtins, |s| reward_spec(s).map(|_| s.to_string()))?;
    let all_algos: Vec<Algo> = clap::ValueEnum::value_variants().to_vec();
    let algos = expand(&args.algos, &all_algos, |s| {
        <Algo as clap::ValueEnum>::from_str(s, false).map_err(|_| Failure::Usage(format!("unknown algorithm `{s}`")))
    })?;
    let opts = Options { project: false, degree_mode: DegreeMode::Contained, max_n: args.max_n };
    let mut rows = Vec::new();
    for path in &args.input {
        let dataset = dataset_name(path);
        for reward in &rewards {
            let spec = reward_spec(reward)?;
            let loaded = load(path, None, &spec, !args.no_preprocess);
            for &a in &algos {
                let mut row = Row {
                    dataset: dataset.clone(),
                    reward: spec.label(),
                    algo: a.name().into(),
                    objective: None,
                    size: None,
                    seconds: None,
                    guarantee: String::new(),
                    error: None,
                    members: None,
                };
                let h = match &loaded {
                    Ok(h) => h,
                    Err(Failure::Usage(m) | Failure::Data(m) | Failure::Limit(m)) => {
                        row.error = Some(m.clone());
                        rows.push(row);
                        continue;
                    }
                };
                if let Err(m) = algo::check(h, a, &opts) {
                    row.error = Some(m);
                    rows.push(row);
                    continue;
                }
                let start = Instant::now();
                match algo::run(h, a, &opts) {
                    Ok(o) => {
                        row.seconds = Some(start.elapsed().as_secs_f64());
                        row.objective = Some(o.density);
                        row.size = Some(o.set.len());
                        row.guarantee = o.guarantee;
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }
    let format = if args.json { Format::Json } else { Format::Csv };
    report::write_rows(&mut io::stdout().lock(), format, &rows)?;
    Ok(())
}

fn lookup(h: &Hypergraph, tokens: &[String]) -> CliResult<Vec<u32>> {
    let mut ids = BTreeSet::new();
    for tok in tokens {
        let id = (0..h.num_nodes() as u32)
            .find(|&v| h.name(v) == *tok)
            .ok_or_else(|| Failure::Data(format!("node `{tok}` is not in the (preprocessed) hypergraph")))?;
        ids.insert(id);
    }
    if ids.is_empty() {
        return Err(Failure::Usage("the node set is empty".into()));
    }
    Ok(ids.into_iter().collect())
}

fn cmd_stats(args: StatsArgs) -> CliResult<()> {
    let (h, spec) = load_input(&args.input)?;
    let set = if let Some(a) = args.algo {
        let opts = Options { project: args.project, degree_mode: DegreeMode::Contained, max_n: args.max_n };
        algo::check(&h, a, &opts).map_err(Failure::Usage)?;
        algo::run(&h, a, &opts)?.set
    } else if let Some(path) = &args.set_file {
        let text = read(path)?;
        let tokens: Vec<String> = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        lookup(&h, &tokens)?
    } else if !args.set.is_empty() {
        let tokens: Vec<String> = args.set.iter().map(|t| t.trim().to_string()).collect();
        lookup(&h, &tokens)?
    } else {
        return Err(Failure::Usage("give one of --set, --set-file or --algo".into()));
    };
    let stats = h.subset_stats(&set)?;
    let row = StatsRow { dataset: dataset_name(&args.input.input), reward: spec.label(), stats: stats.into() };
    report::write_stats(&mut io::stdout().lock(), args.json, &row)?;
    Ok(())
}

fn cmd_export(args: ExportArgs) -> CliResult<()> {
    let (h, _) = load_input(&args.input)?;
    if !(args.alpha.is_finite() && args.alpha >= 0.0) {
        return Err(Failure::Usage("--alpha must be a nonnegative number".into()));
    }
    let file = fs::File::create(&args.output).map_err(|e| Failure::Data(format!("{}: {e}", args.output.display())))?;
    let mut w = io::BufWriter::new(file);
    let summary = densub::exact::write_ilp(&h, args.alpha, &mut w)?;
    w.flush()?;
    println!("variables: {}", summary.variables);
    println!("constraints: {}", summary.constraints);
    println!("objective terms: {}", summary.objective_terms);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dense(a) => cmd_dense(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Stats(a) => cmd_stats(a),
        Command::ExportIlp(a) => cmd_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Data(m) => (3, m),
                Failure::Limit(m) => (4, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
