//! Command-line entry point for the link-prediction evaluation toolkit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lpeval::harness::pipeline::{load_split, persist_store, stage_evaluate, stage_score, stage_split};
use lpeval::harness::report::{render_pr_svg, write_reports};
use lpeval::harness::store::{FailureKind, OutputLayout, ResultStore};
use lpeval::harness::{compare_all, load_store, HarnessError, RunConfig};
use lpeval::ingest::{dataset_stats, parse_edge_list, ParseOptions};
use lpeval::metrics::pr_curve;
use lpeval::split::{HopClass, PredictionType, Skew};

#[derive(Parser)]
#[command(name = "lpeval", version, about = "Link prediction evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the configured output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated method roster override
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one edge list and print its statistics
    Ingest {
        /// Edge-list file
        #[arg(long)]
        input: PathBuf,
        /// Lines carry a trailing integer timestamp
        #[arg(long)]
        temporal: bool,
        /// Interactions are directed (directions are ignored downstream)
        #[arg(long)]
        directed: bool,
    },
    /// Generate and persist evaluation splits for every configured dataset
    Split,
    /// Score every configured method over the persisted splits
    Score,
    /// Evaluate persisted score sheets into results.csv and manifest.json
    Evaluate,
    /// Run the statistical comparison battery over persisted results
    Compare,
    /// Render reports; optionally a PR-curve SVG for one cell
    Report {
        /// Cell to plot as `dataset:ptype:hop:skew`, e.g. `email:missing:2:imb`
        #[arg(long)]
        pr_cell: Option<String>,
    },
    /// The whole protocol: split, score, evaluate, compare, report
    RunAll,
}

fn load_config(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Config("--config is required for this command".into()))?;
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(methods) = &cli.methods {
        config.methods = Some(methods.clone());
    }
    config.validate()?;
    Ok(config)
}

fn cmd_ingest(input: &PathBuf, temporal: bool, directed: bool) -> Result<(), HarnessError> {
    let file = std::fs::File::open(input)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", input.display())))?;
    let options = ParseOptions { has_timestamps: temporal, directed, ..ParseOptions::default() };
    let log = parse_edge_list(std::io::BufReader::new(file), &options)
        .map_err(|e| HarnessError::Stage(e.to_string()))?;
    let stats = dataset_stats(&log);
    println!("file: {}", input.display());
    println!("records: {}", stats.records);
    println!("distinct node labels: {}", stats.distinct_labels);
    println!("distinct directed pairs: {}", stats.distinct_directed_pairs);
    println!("distinct undirected pairs: {}", stats.distinct_undirected_pairs);
    Ok(())
}

fn cmd_split(config: &RunConfig) -> Result<(), HarnessError> {
    let layout = OutputLayout::new(&config.out_dir);
    layout.ensure_dirs()?;
    for ds in &config.datasets {
        for ptype in ds.prediction_types() {
            let split = stage_split(config, &layout, ds, ptype)?;
            println!(
                "{} {}: |V|={} |E|={} positives hop2={} hop3={} discarded={}",
                ds.name,
                ptype.as_str(),
                split.graph.node_count(),
                split.graph.edge_count(),
                split.positives.hop2.len(),
                split.positives.hop3.len(),
                split.positives.discarded
            );
        }
    }
    Ok(())
}

fn cmd_score(config: &RunConfig) -> Result<Vec<lpeval::harness::store::CellFailure>, HarnessError> {
    let layout = OutputLayout::new(&config.out_dir);
    layout.ensure_dirs()?;
    let mut failures = Vec::new();
    for ds in &config.datasets {
        for ptype in ds.prediction_types() {
            let split = load_split(&layout, &ds.name, ptype)?;
            stage_score(config, &layout, ds, ptype, &split, &mut failures)?;
            println!("scored {} {}", ds.name, ptype.as_str());
        }
    }
    std::fs::write(
        layout.failures_file(),
        serde_json::to_string_pretty(&failures).expect("failures serialize"),
    )
    .map_err(|e| HarnessError::Store(e.to_string()))?;
    for f in &failures {
        eprintln!("warn: {} {} [{}]: {}", f.dataset, f.prediction_type, f.context, f.error);
    }
    Ok(failures)
}

fn cmd_evaluate(config: &RunConfig) -> Result<ResultStore, HarnessError> {
    let layout = OutputLayout::new(&config.out_dir);
    let mut store = ResultStore { roster: config.roster(), ..ResultStore::default() };
    for ds in &config.datasets {
        store.datasets.insert(
            ds.name.clone(),
            lpeval::harness::store::DatasetMeta { directed: ds.directed, temporal: ds.temporal },
        );
    }
    if let Ok(text) = std::fs::read_to_string(layout.failures_file()) {
        store.failures = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Store(format!("failures.json: {e}")))?;
    }
    for ds in &config.datasets {
        for ptype in ds.prediction_types() {
            let split = load_split(&layout, &ds.name, ptype)?;
            stage_evaluate(config, &layout, ds, ptype, &split, &mut store)?;
        }
    }
    persist_store(config, &layout, &store)?;
    println!("wrote {} cells to {}", store.records.len(), layout.results_file().display());
    Ok(store)
}

fn cmd_compare(config: &RunConfig) -> Result<(), HarnessError> {
    let layout = OutputLayout::new(&config.out_dir);
    layout.ensure_dirs()?;
    let store = load_store(config)?;
    let report = compare_all(&store);
    let written = write_reports(&report, &layout.reports_dir())?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_cell(spec: &str) -> Result<(String, PredictionType, HopClass, Skew), HarnessError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || HarnessError::Config(format!("bad --pr-cell {spec:?}; expected dataset:ptype:hop:skew"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let ptype = match parts[1] {
        "future" => PredictionType::Future,
        "missing" => PredictionType::Missing,
        _ => return Err(bad()),
    };
    let hop = match parts[2] {
        "2" => HopClass::Two,
        "3" => HopClass::Three,
        _ => return Err(bad()),
    };
    let skew = match parts[3] {
        "bal" | "balanced" => Skew::Balanced,
        "imb" | "imbalanced" => Skew::Imbalanced,
        _ => return Err(bad()),
    };
    Ok((parts[0].to_string(), ptype, hop, skew))
}

fn cmd_report(config: &RunConfig, pr_cell: Option<&str>) -> Result<(), HarnessError> {
    cmd_compare(config)?;
    let Some(spec) = pr_cell else { return Ok(()) };
    let (dataset, ptype, hop, skew) = parse_cell(spec)?;
    let layout = OutputLayout::new(&config.out_dir);
    let split = load_split(&layout, &dataset, ptype)?;
    let vseed = lpeval::harness::derive_seed(
        config.seed,
        &["view", &dataset, ptype.as_str(), &hop.distance().to_string()],
    );
    let (pairs, labels) = split
        .test_view(hop, skew, vseed)
        .map_err(|e| HarnessError::Stage(e.to_string()))?;
    let mut curves = Vec::new();
    for method in config.roster() {
        let group = lpeval::harness::method_group(&method);
        let sheet_skew = match group {
            Some(lpeval::harness::MethodGroup::Learning) => Some(skew),
            _ => None,
        };
        let path = layout.sheet_file(&dataset, ptype, hop, sheet_skew, &method);
        let Ok(text) = std::fs::read_to_string(&path) else { continue };
        let sheet = lpeval::harness::store::sheet_from_csv(&split.graph, &method, &text)?;
        let by_pair: std::collections::HashMap<_, _> =
            sheet.pairs.iter().copied().zip(sheet.scores.iter().copied()).collect();
        let Some(scores) = pairs.iter().map(|p| by_pair.get(p).copied()).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        if let Ok(curve) = pr_curve(&scores, &labels) {
            curves.push((method, curve));
        }
    }
    let title = format!("{dataset} {} hop{} {}", ptype.as_str(), hop.distance(), skew.as_str());
    let svg = render_pr_svg(&title, &curves);
    let path = layout
        .reports_dir()
        .join(format!("prc_{dataset}_{}_hop{}_{}.svg", ptype.as_str(), hop.distance(), skew.as_str()));
    std::fs::write(&path, svg).map_err(|e| HarnessError::Store(e.to_string()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, HarnessError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Ingest { input, temporal, directed } => {
            cmd_ingest(input, *temporal, *directed)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Split => {
            cmd_split(&load_config(cli)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Score => {
            let failures = cmd_score(&load_config(cli)?)?;
            Ok(exit_for_failures(failures.iter().any(|f| f.kind == FailureKind::Error)))
        }
        Command::Evaluate => {
            let store = cmd_evaluate(&load_config(cli)?)?;
            Ok(exit_for_failures(store.failures.iter().any(|f| f.kind == FailureKind::Error)))
        }
        Command::Compare => {
            cmd_compare(&load_config(cli)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { pr_cell } => {
            cmd_report(&load_config(cli)?, pr_cell.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::RunAll => {
            let config = load_config(cli)?;
            let store = lpeval::harness::run_pipeline(&config)?;
            let layout = OutputLayout::new(&config.out_dir);
            std::fs::write(
                layout.failures_file(),
                serde_json::to_string_pretty(&store.failures).expect("failures serialize"),
            )
            .map_err(|e| HarnessError::Store(e.to_string()))?;
            let report = compare_all(&store);
            write_reports(&report, &layout.reports_dir())?;
            println!(
                "run complete: {} cells, {} failures, results in {}",
                store.records.len(),
                store.failures.len(),
                config.out_dir.display()
            );
            for f in store.failures.iter().filter(|f| f.kind == FailureKind::Error) {
                eprintln!("warn: {} {} [{}]: {}", f.dataset, f.prediction_type, f.context, f.error);
            }
            Ok(exit_for_failures(store.failures.iter().any(|f| f.kind == FailureKind::Error)))
        }
    }
}

fn exit_for_failures(any_error: bool) -> ExitCode {
    if any_error {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e @ HarnessError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
