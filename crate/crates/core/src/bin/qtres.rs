use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qtres::analysis::{closed_form_gp, estimate_all, recall_table};
use qtres::config;
use qtres::corpus::{load_path, AttributeKind, Dataset, GoldLabeling, RefIdx};
use qtres::evalkit::{
    best_of, run_trend_experiment, sweep, sweep_query, synthetic_engine_config, threshold_grid, BaselineKind, TrendKind, TrendSpec,
};
use qtres::query::{Engine, EngineConfig, QueryAnswer};
use qtres::synthgen::{generate, GenParams};

#[derive(Debug, Parser)]
#[command(name = "qtres", version, about = "Query-time entity resolution over co-occurrence data")]
struct Cli {
    /// Engine configuration (TOML). Without it, defaults for the dataset's attribute kind apply.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for synthetic data and experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a record file, report its shape and optionally write a snapshot.
    Ingest {
        input: PathBuf,
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Resolve the references matching a name (or the entity of one reference).
    Query(QueryArgs),
    /// Generate a synthetic dataset with gold labels.
    Synth(SynthArgs),
    /// Score a resolver against gold labels, or run a trend experiment.
    Eval(EvalArgs),
    /// Structural probabilities, predicted recall and the closed form.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Name to resolve.
    name: Option<String>,
    #[arg(long)]
    data: PathBuf,
    /// Resolve the entity of this reference instead of a name.
    #[arg(long, conflicts_with = "name")]
    ref_id: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, conflicts_with = "sweep")]
    threshold: Option<f64>,
    /// Pick the threshold with the best F1 against `--gold` on a 0.05 grid.
    #[arg(long, requires = "gold")]
    sweep: bool,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Also print every expansion level.
    #[arg(long)]
    levels: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    entities: usize,
    #[arg(long, default_value_t = 200)]
    relationships: usize,
    #[arg(long, default_value_t = 500)]
    hyperedges: usize,
    #[arg(long, default_value_t = 0.3)]
    p_a: f64,
    #[arg(long, default_value_t = 0.0)]
    p_r_a: f64,
    #[arg(long, default_value_t = 0.5)]
    p_c: f64,
    #[arg(long, default_value_t = 1.0)]
    p_r: f64,
    /// Directory receiving `records.jsonl` and `gold.txt`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, required_unless_present = "trend")]
    data: Option<PathBuf>,
    #[arg(long, required_unless_present = "trend")]
    gold: Option<PathBuf>,
    /// A, A*, NR, NR* or RC-ER.
    #[arg(long, default_value = "RC-ER")]
    baseline: String,
    /// Fixed threshold; defaults to the configured merge threshold.
    #[arg(long, conflicts_with = "sweep")]
    threshold: Option<f64>,
    /// Report every threshold of a grid plus the best one.
    #[arg(long)]
    sweep: bool,
    /// Trend experiment: pr-recall, pra-precision or level-convergence.
    #[arg(long, conflicts_with_all = ["data", "gold"])]
    trend: Option<String>,
    #[arg(long, default_value_t = 50)]
    runs: usize,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Evaluate the closed-form recall for uniform probabilities.
    #[arg(long, requires_all = ["a", "r", "n"])]
    closed_form: bool,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, requires = "gold", conflicts_with = "closed_form")]
    data: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

fn load_config(path: Option<&Path>) -> Result<Option<EngineConfig>> {
    path.map(|p| config::from_path(p).with_context(|| format!("reading config {}", p.display()))).transpose()
}

/// The configured engine, or defaults suited to the dataset's attribute kind.
fn engine_config(cfg: Option<EngineConfig>, ds: &Dataset) -> EngineConfig {
    cfg.unwrap_or_else(|| match ds.kind() {
        AttributeKind::Name => EngineConfig::default(),
        AttributeKind::Numeric => synthetic_engine_config(),
    })
}

fn load_data(path: &Path) -> Result<Dataset> {
    load_path(path).with_context(|| format!("loading dataset {}", path.display()))
}

fn load_gold(path: &Path, ds: &Dataset) -> Result<GoldLabeling> {
    GoldLabeling::parse_path(path, ds).with_context(|| format!("loading gold labels {}", path.display()))
}

fn ids(ds: &Dataset, refs: &[RefIdx]) -> Vec<String> {
    refs.iter().map(|r| ds.reference(*r).id.clone()).collect()
}

fn cmd_ingest(out: &mut impl Write, mode: Output, input: &Path, snapshot: Option<&Path>) -> Result<()> {
    let ds = load_data(input)?;
    if let Some(p) = snapshot {
        ds.write_snapshot(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))?;
    }
    match mode {
        Output::Text => writeln!(out, "references {}\nhyper-edges {}\ndistinct names {}", ds.len(), ds.hyperedges().len(), ds.num_names())?,
        Output::Json => writeln!(out, "{}", json!({"references": ds.len(), "hyperedges": ds.hyperedges().len(), "names": ds.num_names()}))?,
    }
    Ok(())
}

fn print_answer(out: &mut impl Write, mode: Output, ds: &Dataset, ans: &QueryAnswer, show_levels: bool) -> Result<()> {
    let status = if ans.answerable() { "ok" } else { "empty" };
    // Timings vary between runs, so they go to stderr and stdout stays reproducible.
    eprintln!("extraction {:.3} ms, resolution {:.3} ms", ans.extraction_time.as_secs_f64() * 1e3, ans.resolution_time.as_secs_f64() * 1e3);
    match mode {
        Output::Text => {
            writeln!(out, "query {}", ans.value)?;
            writeln!(out, "status {status}")?;
            let sizes: Vec<String> = ans.relevant.level_sizes().iter().map(usize::to_string).collect();
            writeln!(out, "relevant {} (levels {})", ans.relevant.len(), sizes.join(" "))?;
            if show_levels {
                for (i, level) in ans.relevant.levels.iter().enumerate() {
                    writeln!(out, "level {i}: {}", ids(ds, level).join(" "))?;
                }
            }
            writeln!(out, "threshold {:.4}", ans.threshold)?;
            for (i, c) in ans.clusters.iter().enumerate() {
                writeln!(out, "cluster {}: {}", i + 1, ids(ds, c).join(" "))?;
            }
        }
        Output::Json => {
            writeln!(
                out,
                "{}",
                json!({
                    "query": ans.value,
                    "status": status,
                    "level_sizes": ans.relevant.level_sizes(),
                    "threshold": ans.threshold,
                    "clusters": ans.clusters.len(),
                })
            )?;
            if show_levels {
                for (i, level) in ans.relevant.levels.iter().enumerate() {
                    writeln!(out, "{}", json!({"level": i, "references": ids(ds, level)}))?;
                }
            }
            for (i, c) in ans.clusters.iter().enumerate() {
                writeln!(out, "{}", json!({"cluster": i + 1, "references": ids(ds, c)}))?;
            }
        }
    }
    Ok(())
}

fn cmd_query(out: &mut impl Write, mode: Output, cfg: Option<EngineConfig>, args: &QueryArgs) -> Result<()> {
    let ds = load_data(&args.data)?;
    let mut cfg = engine_config(cfg, &ds);
    if let Some(d) = args.depth {
        cfg.expansion.d_star = d;
    }
    let engine = Engine::new(&ds, cfg)?;
    let value = match (&args.name, &args.ref_id) {
        (Some(n), None) => n.clone(),
        (None, Some(r)) => ds.reference(ds.resolve_ref(r)?).name.clone(),
        _ => bail!("give either a name or --ref-id"),
    };
    let threshold = if args.sweep {
        let gold = load_gold(args.gold.as_deref().expect("clap enforces --gold"), &ds)?;
        let (_, sw) = sweep_query(&engine, &value, &gold, &threshold_grid(0.0, 1.0, 21))?;
        // An empty sweep means the query is unanswerable; any threshold gives the same empty answer.
        best_of(&sw).map(|(t, _)| t).unwrap_or(engine.config().similarity.merge_threshold)
    } else {
        args.threshold.unwrap_or(engine.config().similarity.merge_threshold)
    };
    let ans = match &args.ref_id {
        Some(r) => engine.resolve_ref_at(r, threshold)?,
        None => engine.resolve_at(&value, threshold)?,
    };
    print_answer(out, mode, &ds, &ans, args.levels)
}

fn cmd_synth(out: &mut impl Write, mode: Output, seed: u64, args: &SynthArgs) -> Result<()> {
    let params = GenParams {
        n_entities: args.entities,
        n_relationships: args.relationships,
        n_hyperedges: args.hyperedges,
        p_a: args.p_a,
        p_r_a: args.p_r_a,
        p_c: args.p_c,
        p_r: args.p_r,
        seed,
    };
    let generated = generate(&params)?;
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let records = args.out_dir.join("records.jsonl");
    let gold = args.out_dir.join("gold.txt");
    let mut w = BufWriter::new(File::create(&records).with_context(|| format!("creating {}", records.display()))?);
    generated.dataset.write_records(&mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&gold).with_context(|| format!("creating {}", gold.display()))?);
    generated.gold.write(&generated.dataset, &mut w)?;
    w.flush()?;
    let ds = &generated.dataset;
    match mode {
        Output::Text => writeln!(
            out,
            "references {}\nhyper-edges {}\nentities {}\nrecords {}\ngold {}",
            ds.len(),
            ds.hyperedges().len(),
            generated.gold.num_entities(),
            records.display(),
            gold.display()
        )?,
        Output::Json => writeln!(
            out,
            "{}",
            json!({
                "references": ds.len(),
                "hyperedges": ds.hyperedges().len(),
                "entities": generated.gold.num_entities(),
                "records": records,
                "gold": gold,
            })
        )?,
    }
    Ok(())
}

fn cmd_eval(out: &mut impl Write, mode: Output, seed: u64, cfg: Option<EngineConfig>, args: &EvalArgs) -> Result<()> {
    if let Some(kind) = &args.trend {
        let kind: TrendKind = kind.parse()?;
        if args.runs == 0 {
            bail!("--runs must be positive");
        }
        let spec = TrendSpec::standard(kind, args.runs, seed);
        for report in run_trend_experiment(&spec)? {
            match mode {
                Output::Text => write!(out, "{}", report.to_tsv())?,
                Output::Json => {
                    for row in &report.rows {
                        writeln!(out, "{}", json!({"metric": report.metric, "row": row}))?;
                    }
                }
            }
        }
        return Ok(());
    }
    let kind: BaselineKind = args.baseline.parse()?;
    let ds = load_data(args.data.as_deref().expect("clap enforces --data"))?;
    let gold = load_gold(args.gold.as_deref().expect("clap enforces --gold"), &ds)?;
    let engine = Engine::new(&ds, engine_config(cfg, &ds))?;
    let refs: Vec<RefIdx> = ds.ref_ids().collect();
    let thresholds =
        if args.sweep { threshold_grid(0.0, 1.0, 21) } else { vec![args.threshold.unwrap_or(engine.config().similarity.merge_threshold)] };
    let rows = sweep(&engine, kind, &refs, &gold, &thresholds)?;
    let best = best_of(&rows)?;
    let shown = if args.sweep { rows.as_slice() } else { std::slice::from_ref(&best) };
    for (t, m) in shown {
        match mode {
            Output::Text => writeln!(out, "{kind}\tt={t:.2}\t{m}")?,
            Output::Json => writeln!(out, "{}", json!({"resolver": kind.to_string(), "threshold": t, "metrics": m}))?,
        }
    }
    if args.sweep {
        let (t, m) = best;
        match mode {
            Output::Text => writeln!(out, "best\tt={t:.2}\t{m}")?,
            Output::Json => writeln!(out, "{}", json!({"resolver": kind.to_string(), "best_threshold": t, "metrics": m}))?,
        }
    }
    Ok(())
}

fn cmd_analyze(out: &mut impl Write, mode: Output, cfg: Option<EngineConfig>, args: &AnalyzeArgs) -> Result<()> {
    if args.closed_form {
        let (a, r, n) = (args.a.expect("clap"), args.r.expect("clap"), args.n.expect("clap"));
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&r) {
            bail!("--a and --r must lie in [0, 1]");
        }
        let v = closed_form_gp(a, r, n);
        match mode {
            Output::Text => writeln!(out, "{v:.6}")?,
            Output::Json => writeln!(out, "{}", json!({"a": a, "r": r, "n": n, "recall": v}))?,
        }
        return Ok(());
    }
    let Some(data) = &args.data else {
        bail!("give --closed-form or --data with --gold");
    };
    let ds = load_data(data)?;
    let gold = load_gold(args.gold.as_deref().expect("clap enforces --gold"), &ds)?;
    let engine = Engine::new(&ds, engine_config(cfg, &ds))?;
    let probs = estimate_all(engine.scorer(), &gold);
    match mode {
        Output::Text => write!(out, "{}", recall_table(&probs, &gold, args.depth))?,
        Output::Json => {
            for e in 0..gold.num_entities() as u32 {
                let recall: Vec<f64> = (0..=args.depth).map(|d| qtres::analysis::predict_recall(&probs, e, d)).collect();
                writeln!(out, "{}", json!({"entity": gold.entity_name(e), "a_i": probs.a_i(e), "r_i": probs.r_i(e), "recall": recall}))?;
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match &cli.command {
        Command::Ingest { input, snapshot } => cmd_ingest(&mut out, cli.output, input, snapshot.as_deref())?,
        Command::Query(args) => cmd_query(&mut out, cli.output, load_config(cli.config.as_deref())?, args)?,
        Command::Synth(args) => cmd_synth(&mut out, cli.output, cli.seed, args)?,
        Command::Eval(args) => cmd_eval(&mut out, cli.output, cli.seed, load_config(cli.config.as_deref())?, args)?,
        Command::Analyze(args) => cmd_analyze(&mut out, cli.output, load_config(cli.config.as_deref())?, args)?,
    }
    out.flush()?;
    Ok(())
}
