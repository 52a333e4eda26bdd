//! `gek`: embed graphs, detect communities, run baselines, evaluate and draw.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gek::baselines::{self, Baseline, Selection};
use gek::clustering::{detect_communities, Algorithm, PointCloud, Sweep};
use gek::drawing::{draw_svg, Style};
use gek::embed::{format_tsv, parse_tsv, read_tsv, EmbeddingFile, KAPPA_MAX, KAPPA_MIN};
use gek::graph::{apsp, read_edge_list, Graph};
use gek::metrics::{
    ars, format_partition, modularity, nmi, read_partition, rmrse, rmse, Partition,
};
use gek::neural::{train_neural, NeuralConfig};
use gek::{optimize_direct, EmbeddingSet, KappaMode, LossKind, OptimConfig};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<gek::Error> for CliError {
    fn from(e: gek::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Adds the offending path to a library error.
fn at<T>(path: &Path, r: gek::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

#[derive(Parser)]
#[command(
    name = "gek",
    version,
    about = "Graph embeddings with a learnable distance exponent"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit vertex embeddings and write them as TSV.
    Embed(EmbedArgs),
    /// Cluster an embedding into communities.
    Communities(CommunitiesArgs),
    /// Run a classical community detection algorithm.
    Baselines(BaselineArgs),
    /// Report fit metrics of an embedding.
    Eval(EvalArgs),
    /// Render a two-dimensional embedding as SVG.
    Draw(DrawArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Neural,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Embedding dimension.
    #[arg(long = "m", default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value = "abs", value_parser = parse_loss)]
    loss: LossKind,
    /// `auto` to learn the exponent, or a fixed value in [0.05, 2].
    #[arg(long, default_value = "1.0", value_parser = parse_kappa)]
    kappa: KappaMode,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    method: Method,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Learning rate; defaults to 0.05 (direct) or 0.001 (neural).
    #[arg(long)]
    lr: Option<f64>,
    /// Hidden layer sizes for the neural method.
    #[arg(long, value_parser = parse_sizes)]
    hidden: Option<Sizes>,
    /// Where to save the trained network (neural method).
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Args)]
struct CommunitiesArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long, default_value = "mean_shift,affinity,agglo,dbscan", value_parser = parse_algos)]
    algos: Algos,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Partition file for the top-ranked result.
    #[arg(long)]
    out: PathBuf,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = parse_baseline)]
    algo: Baseline,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Girvan–Newman only: `modularity` or `k=<int>`.
    #[arg(long, default_value = "modularity", value_parser = parse_selection)]
    select: Selection,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    /// Partition to score by modularity.
    #[arg(long)]
    communities: Option<PathBuf>,
    /// Ground truth for ARS and NMI; needs `--communities`.
    #[arg(long, requires = "communities")]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct DrawArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 800.0)]
    width: f64,
    #[arg(long, default_value_t = 800.0)]
    height: f64,
    #[arg(long, default_value_t = 40.0)]
    margin: f64,
    #[arg(long, default_value_t = 5.0)]
    radius: f64,
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

#[derive(Clone)]
struct Algos(Vec<Algorithm>);

fn parse_loss(s: &str) -> Result<LossKind, String> {
    s.parse().map_err(|e: gek::Error| e.to_string())
}

fn parse_kappa(s: &str) -> Result<KappaMode, String> {
    if s == "auto" {
        return Ok(KappaMode::Learned);
    }
    let k: f64 = s
        .parse()
        .map_err(|_| format!("expected `auto` or a number, got `{s}`"))?;
    if !(KAPPA_MIN..=KAPPA_MAX).contains(&k) {
        return Err(format!(
            "kappa must lie in [{KAPPA_MIN}, {KAPPA_MAX}], got {k}"
        ));
    }
    Ok(KappaMode::Fixed(k))
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let sizes = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().ok().filter(|&x| x > 0))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| format!("expected comma-separated positive sizes, got `{s}`"))?;
    Ok(Sizes(sizes))
}

fn parse_algos(s: &str) -> Result<Algos, String> {
    let list: Vec<Algorithm> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e: gek::Error| e.to_string()))
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err("at least one algorithm is required".into());
    }
    Ok(Algos(list))
}

fn parse_baseline(s: &str) -> Result<Baseline, String> {
    s.parse().map_err(|e: gek::Error| e.to_string())
}

fn parse_selection(s: &str) -> Result<Selection, String> {
    s.parse().map_err(|e: gek::Error| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> CliResult<String> {
    let line = serde_json::to_string(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{line}");
    Ok(line)
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    at(path, read_edge_list(path))
}

fn load_embedding(path: &Path, g: &Graph) -> CliResult<(EmbeddingFile, EmbeddingSet)> {
    let file = at(path, read_tsv(path))?;
    let e = at(path, file.reorder(g.names().iter()))?;
    Ok((file, e))
}

fn load_partition(path: &Path, g: &Graph) -> CliResult<Partition> {
    at(path, read_partition(path, g.names()))
}

#[derive(Serialize)]
struct EmbedReport {
    rmse: f64,
    rmrse: f64,
    kappa: f64,
    iterations: usize,
    wall_seconds: f64,
}

fn cmd_embed(a: EmbedArgs) -> CliResult<()> {
    if a.dim == 0 || a.iters == 0 {
        return Err(CliError::Usage("--m and --iters must be at least 1".into()));
    }
    if a.hidden.is_some() && matches!(a.method, Method::Direct) {
        return Err(CliError::Usage(
            "--hidden applies to --method neural only".into(),
        ));
    }
    if a.model_out.is_some() && matches!(a.method, Method::Direct) {
        return Err(CliError::Usage(
            "--model-out applies to --method neural only".into(),
        ));
    }
    let g = load_graph(&a.graph)?;
    if g.n() < 2 {
        return Err(CliError::Runtime(format!(
            "{}: need at least two vertices",
            a.graph.display()
        )));
    }
    let start = Instant::now();
    let d = apsp(&g);
    let base = OptimConfig {
        loss: a.loss,
        kappa: a.kappa,
        dim: a.dim,
        iterations: a.iters,
        seed: a.seed,
        ..OptimConfig::default()
    };
    let embedding = match a.method {
        Method::Direct => {
            let cfg = OptimConfig {
                learning_rate: a.lr.unwrap_or(base.learning_rate),
                ..base
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            optimize_direct(&d, &cfg)?.embedding
        }
        Method::Neural => {
            let defaults = NeuralConfig::default();
            let cfg = NeuralConfig {
                optim: OptimConfig {
                    learning_rate: a.lr.unwrap_or(defaults.optim.learning_rate),
                    ..base
                },
                hidden: a.hidden.map_or(defaults.hidden, |h| h.0),
                input_scale: None,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let fit = train_neural(&d, &cfg)?;
            if let Some(path) = &a.model_out {
                at(path, fit.model().save(path))?;
            }
            fit.embedding
        }
    };
    let text = format_tsv(&embedding, g.names().iter(), Some(a.loss));
    write_file(&a.out, &text)?;
    // score what was written so that `eval` reproduces these numbers
    let written = parse_tsv(&text)?.embedding;
    print_json(&EmbedReport {
        rmse: rmse(&written, &d),
        rmrse: rmrse(&written, &d),
        kappa: written.kappa(),
        iterations: a.iters,
        wall_seconds: start.elapsed().as_secs_f64(),
    })?;
    Ok(())
}

#[derive(Serialize)]
struct CellReport {
    algorithm: &'static str,
    params: gek::clustering::ClusterParams,
    k: usize,
    modularity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ars: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nmi: Option<f64>,
}

#[derive(Serialize)]
struct CommunitiesReport {
    best: usize,
    results: Vec<CellReport>,
}

fn cmd_communities(a: CommunitiesArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let (_, e) = load_embedding(&a.embedding, &g)?;
    let truth = a
        .truth
        .as_deref()
        .map(|p| load_partition(p, &g))
        .transpose()?;
    let sweep = Sweep::default_for(&PointCloud::from_embedding(&e));
    let results = detect_communities(&g, &e, &a.algos.0, &sweep)?;
    let Some(top) = results.first() else {
        return Err(CliError::Runtime(
            "no clustering could be run on this embedding".into(),
        ));
    };
    write_file(&a.out, &format_partition(&top.partition, g.names()))?;
    let report = CommunitiesReport {
        best: 0,
        results: results
            .iter()
            .map(|r| CellReport {
                algorithm: r.algorithm().name(),
                params: r.params,
                k: r.partition.k(),
                modularity: r.modularity,
                converged: r.converged,
                ars: truth.as_ref().map(|t| ars(&r.partition, t)),
                nmi: truth.as_ref().map(|t| nmi(&r.partition, t)),
            })
            .collect(),
    };
    let line = print_json(&report)?;
    if let Some(path) = &a.summary {
        write_file(path, &format!("{line}\n"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BaselineReport {
    algorithm: &'static str,
    k: usize,
    modularity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ars: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nmi: Option<f64>,
}

fn cmd_baselines(a: BaselineArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let truth = a
        .truth
        .as_deref()
        .map(|p| load_partition(p, &g))
        .transpose()?;
    if matches!(a.algo, Baseline::KernighanLin) && g.n() < 2 {
        return Err(CliError::Runtime(
            "bisection needs at least two vertices".into(),
        ));
    }
    let p = match a.algo {
        Baseline::Louvain => baselines::louvain(&g, a.seed),
        Baseline::GirvanNewman => baselines::girvan_newman(&g, a.select),
        Baseline::Greedy => baselines::greedy_modularity(&g),
        Baseline::LabelPropagation => baselines::label_propagation(&g, a.seed),
        Baseline::KernighanLin => baselines::kernighan_lin(&g, a.seed),
    };
    write_file(&a.out, &format_partition(&p, g.names()))?;
    print_json(&BaselineReport {
        algorithm: a.algo.name(),
        k: p.k(),
        modularity: modularity(&g, &p),
        ars: truth.as_ref().map(|t| ars(&p, t)),
        nmi: truth.as_ref().map(|t| nmi(&p, t)),
    })?;
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    rmse: f64,
    rmrse: f64,
    kappa: f64,
    m: usize,
    loss_kind: Option<LossKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modularity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ars: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nmi: Option<f64>,
}

fn cmd_eval(a: EvalArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let (file, e) = load_embedding(&a.embedding, &g)?;
    if g.n() < 2 {
        return Err(CliError::Runtime(
            "metrics need at least two vertices".into(),
        ));
    }
    let d = apsp(&g);
    let communities = a
        .communities
        .as_deref()
        .map(|p| load_partition(p, &g))
        .transpose()?;
    let truth = a
        .truth
        .as_deref()
        .map(|p| load_partition(p, &g))
        .transpose()?;
    let scored = |f: fn(&Partition, &Partition) -> f64| match (&communities, &truth) {
        (Some(c), Some(t)) => Some(f(c, t)),
        _ => None,
    };
    print_json(&EvalReport {
        rmse: rmse(&e, &d),
        rmrse: rmrse(&e, &d),
        kappa: e.kappa(),
        m: e.dim(),
        loss_kind: file.loss,
        modularity: communities.as_ref().map(|c| modularity(&g, c)),
        ars: scored(ars),
        nmi: scored(nmi),
    })?;
    Ok(())
}

fn cmd_draw(a: DrawArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let (_, e) = load_embedding(&a.embedding, &g)?;
    if e.dim() != 2 {
        return Err(CliError::Usage(format!(
            "drawing needs a two-dimensional embedding, {} has {} columns",
            a.embedding.display(),
            e.dim()
        )));
    }
    let style = Style {
        width: a.width,
        height: a.height,
        margin: a.margin,
        node_radius: a.radius,
    };
    if !(style.width > 0.0 && style.height > 0.0 && style.margin >= 0.0 && style.node_radius > 0.0)
    {
        return Err(CliError::Usage("image sizes must be positive".into()));
    }
    let p = a
        .communities
        .as_deref()
        .map(|p| load_partition(p, &g))
        .transpose()?;
    write_file(&a.out, &draw_svg(&g, &e, p.as_ref(), &style))
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("GEK_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "GEK_THREADS must be a positive integer, got `{value}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Embed(a) => cmd_embed(a),
        Command::Communities(a) => cmd_communities(a),
        Command::Baselines(a) => cmd_baselines(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Draw(a) => cmd_draw(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
