//! The `unigraph` command line: `gen`, `run`, `bench` and `validate`.
//!
//! Exit codes: 0 on success, 1 on I/O or numerical failure, 2 on an invalid
//! graph spec, argument or analysis, 3 when the dimension cap is exceeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ensemble::{self, Analysis, EnsembleError, EnsembleOptions, EnsembleReport, EnsembleSpec, Source};
use crate::entropy::ProjectionWeighting;
use crate::graph::{self, presets, GraphError, InteractionGraph};
use crate::sampling::RandomStream;
use crate::spectral::WrapGap;
use crate::tensor::{TensorError, DIM_CAP_ENV};

pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Parser)]
#[command(name = "unigraph", version, about = "Graph-structured random unitaries and their statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one unitary and write it with a provenance header.
    Gen(GenArgs),
    /// Run a Monte Carlo campaign and write report.json plus histogram CSVs.
    Run(RunArgs),
    /// Time structured generation against Haar generation of the same order.
    Bench(BenchArgs),
    /// Check a graph and print its structure.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct SourceArgs {
    /// JSON graph spec file.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Two-colour ring of K particles.
    #[arg(long, value_name = "K")]
    pub ring: Option<usize>,
    /// Chain of K particles, one pair per step.
    #[arg(long, value_name = "K")]
    pub chain: Option<usize>,
    /// Square of four particles (the ring with K = 4).
    #[arg(long)]
    pub square: bool,
    /// Named preset graph.
    #[arg(long, value_name = "NAME", value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
    pub preset: Option<String>,
    /// Bond-vertex graph: bonds as `1-2,3-4`; needs --vertices.
    #[arg(long, value_name = "BONDS", requires = "vertices")]
    pub bonds: Option<String>,
    /// Haar unitaries of order N.
    #[arg(long, value_name = "N")]
    pub cue: Option<usize>,
    /// Composed matrices `P₁ X P₂ X†` of order N.
    #[arg(long, value_name = "N")]
    pub composed: Option<usize>,
    /// Diagonal unitaries with independent uniform phases.
    #[arg(long, value_name = "N")]
    pub diagonal: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BuilderArgs {
    /// Local dimension of every particle for builders and presets.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Per-particle dimensions, e.g. `3,2,3` (chain and three-chain).
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Vertex cliques for --bonds, e.g. `2,3;1,4`.
    #[arg(long, value_name = "CLIQUES")]
    pub vertices: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Master seed (decimal or 0x hex), or `random`.
    #[arg(long, default_value = "0x5EED")]
    pub seed: String,
    /// Largest total dimension accepted.
    #[arg(long, env = DIM_CAP_ENV, default_value_t = crate::tensor::DEFAULT_DIM_CAP)]
    pub dim_cap: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub builder: BuilderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub builder: BuilderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 100)]
    pub draws: u64,
    /// Comma-separated analyses: spacing, phase_density[:BINS], evec_entropy,
    /// entanglement[:1+2], element_entropy, projection[:P[:1+3]],
    /// trace_moments[:P], state_sample[:1+2].
    #[arg(long, value_delimiter = ',', default_value = "spacing")]
    pub analyses: Vec<String>,
    /// Worker threads for draws.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print entropies in bits.
    #[arg(long)]
    pub bits: bool,
    /// Drop the gap that wraps from the last phase to the first.
    #[arg(long)]
    pub strict_spacing: bool,
    /// Average projected slices without their probability weights.
    #[arg(long)]
    pub unweighted_projection: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub builder: BuilderArgs,
    #[arg(long, default_value = "0x5EED")]
    pub seed: String,
    #[arg(long, default_value_t = 100)]
    pub draws: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub builder: BuilderArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(String),
    #[error("dimension {dim} exceeds the cap of {cap} (raise with --dim-cap or {DIM_CAP_ENV})")]
    Cap { dim: usize, cap: usize },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Cap { .. } => 3,
            CliError::Io(_) | CliError::Failure(_) => 1,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Spec(format!("invalid graph: {e}"))
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::DimensionCapExceeded { dim, cap } => CliError::Cap { dim, cap },
            EnsembleError::InvalidSpec(_) | EnsembleError::IncompatibleAnalysis { .. } => CliError::Spec(e.to_string()),
            EnsembleError::Draw { .. } => CliError::Failure(e.to_string()),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Tensor(TensorError::DimensionCapExceeded { dim, cap }) => CliError::Cap { dim, cap },
            crate::Error::Graph(g) => g.into(),
            crate::Error::Ensemble(en) => en.into(),
            other => CliError::Failure(other.to_string()),
        }
    }
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    run_with_args(std::env::args())
}

pub fn run_with_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, &args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, args: &[String]) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, args),
        Command::Run(a) => cmd_run(&a, args),
        Command::Bench(a) => cmd_bench(&a),
        Command::Validate(a) => cmd_validate(&a),
    }
}

/// Resolves `--seed`. `random` draws from the OS and the choice is printed
/// either way.
pub fn parse_seed(text: &str) -> Result<u64, CliError> {
    let seed = if text.eq_ignore_ascii_case("random") {
        rand::random::<u64>()
    } else if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).map_err(|e| CliError::Spec(format!("bad seed {text:?}: {e}")))?
    } else {
        text.parse().map_err(|e| CliError::Spec(format!("bad seed {text:?}: {e}")))?
    };
    eprintln!("seed: {seed}");
    Ok(seed)
}

fn parse_list(text: &str, sep: char) -> Result<Vec<usize>, CliError> {
    text.split(sep)
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Spec(format!("bad particle list {text:?}: {e}")))
        })
        .collect()
}

fn build_graph(source: &SourceArgs, builder: &BuilderArgs) -> Result<Option<InteractionGraph>, CliError> {
    let n = builder.n;
    let graph = if let Some(path) = &source.graph {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
        graph::parse_graph_spec(&text)?
    } else if let Some(k) = source.ring {
        graph::ring_graph(k, n)?
    } else if source.square {
        graph::ring_graph(4, n)?
    } else if let Some(k) = source.chain {
        match &builder.dims {
            Some(dims) if dims.len() != k => {
                return Err(CliError::Spec(format!("--dims has {} entries for a chain of {k}", dims.len())))
            }
            Some(dims) => graph::chain_graph_with_dims(dims.clone())?,
            None => graph::chain_graph(k, n)?,
        }
    } else if let Some(name) = &source.preset {
        presets::by_name(name, n, builder.dims.as_deref())
            .ok_or_else(|| CliError::Spec(format!("unknown preset {name}")))??
    } else if let Some(bonds) = &source.bonds {
        let bonds = bonds
            .split(',')
            .map(|b| match parse_list(b, '-')?.as_slice() {
                &[a, c] => Ok((a, c)),
                _ => Err(CliError::Spec(format!("bond {b:?} must look like 1-2"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let vertices = builder
            .vertices
            .as_deref()
            .unwrap_or_default()
            .split(';')
            .map(|v| parse_list(v, ','))
            .collect::<Result<Vec<_>, _>>()?;
        graph::from_bond_vertex_graph(&bonds, &vertices, n)?
    } else {
        return Ok(None);
    };
    Ok(Some(graph))
}

fn build_source(source: &SourceArgs, builder: &BuilderArgs) -> Result<Source, CliError> {
    if let Some(g) = build_graph(source, builder)? {
        return Ok(Source::Graph(g));
    }
    let checked = |n: usize| {
        if n == 0 {
            Err(CliError::Spec("dimension must be at least 1".into()))
        } else {
            Ok(n)
        }
    };
    Ok(match (source.cue, source.composed, source.diagonal) {
        (Some(n), _, _) => Source::Cue(checked(n)?),
        (_, Some(n), _) => Source::Composed(checked(n)?),
        (_, _, Some(n)) => Source::Diagonal(checked(n)?),
        _ => return Err(CliError::Spec("no source given".into())),
    })
}

/// Canonical text hashed into the provenance header.
fn source_fingerprint(source: &Source) -> String {
    match source {
        Source::Graph(g) => graph::serialize_graph_spec(g),
        other => other.label(),
    }
}

#[derive(Debug, Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: u64,
    spec_sha256: String,
}

impl Provenance {
    fn new(args: &[String], seed: u64, source: &Source) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: replay_command(args, seed),
            seed,
            spec_sha256: hex::encode(Sha256::digest(source_fingerprint(source).as_bytes())),
        }
    }

    fn csv_header(&self) -> String {
        format!(
            "# {} {}\n# command: {}\n# seed: {}\n# spec_sha256: {}\n",
            self.tool, self.version, self.command, self.seed, self.spec_sha256
        )
    }
}

/// The command line with the resolved seed substituted, so that it
/// reproduces the output even after `--seed random`.
fn replay_command(args: &[String], seed: u64) -> String {
    let mut out: Vec<String> = Vec::with_capacity(args.len() + 2);
    out.push("unigraph".into());
    let mut saw_seed = false;
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        if a == "--seed" {
            iter.next();
            out.push(format!("--seed {seed}"));
            saw_seed = true;
        } else if a.starts_with("--seed=") {
            out.push(format!("--seed {seed}"));
            saw_seed = true;
        } else if a.is_empty() || a.contains(|c: char| c.is_whitespace() || c == ';' || c == '\'') {
            out.push(format!("'{}'", a.replace('\'', r"'\''")));
        } else {
            out.push(a.clone());
        }
    }
    if !saw_seed && out.len() > 1 {
        out.insert(2, format!("--seed {seed}"));
    }
    out.join(" ")
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_gen(args: &GenArgs, argv: &[String]) -> Result<(), CliError> {
    let source = build_source(&args.source, &args.builder)?;
    let seed = parse_seed(&args.common.seed)?;
    let dim = source.dim();
    if dim > args.common.dim_cap {
        return Err(CliError::Cap {
            dim,
            cap: args.common.dim_cap,
        });
    }
    let u = source.sample(RandomStream::new(seed, 0), args.common.dim_cap)?;
    let provenance = Provenance::new(argv, seed, &source);
    ensure_dir(&args.common.out)?;
    let path = match args.common.format {
        Format::Csv => {
            let path = args.common.out.join("unitary.csv");
            let mut text = provenance.csv_header();
            let _ = writeln!(text, "# dim: {dim}\n# layout: row-major, re and im interleaved per entry");
            for i in 0..dim {
                for j in 0..dim {
                    let z = u.get(i, j);
                    if j > 0 {
                        text.push(',');
                    }
                    let _ = write!(text, "{},{}", z.re, z.im);
                }
                text.push('\n');
            }
            fs::write(&path, text)?;
            path
        }
        Format::Json => {
            let path = args.common.out.join("unitary.json");
            let rows = |f: fn(crate::c64) -> f64| -> Vec<Vec<f64>> {
                (0..dim).map(|i| (0..dim).map(|j| f(u.get(i, j))).collect()).collect()
            };
            let doc = serde_json::json!({
                "provenance": provenance,
                "dim": dim,
                "re": rows(|z| z.re),
                "im": rows(|z| z.im),
            });
            fs::write(&path, serde_json::to_string(&doc).expect("serializable"))?;
            path
        }
    };
    println!("wrote {dim}x{dim} unitary to {}", path.display());
    Ok(())
}

fn default_keep(k: usize) -> Vec<usize> {
    (1..=(k / 2).max(1)).collect()
}

fn parse_analysis(text: &str, source: &Source) -> Result<Analysis, CliError> {
    let mut parts = text.trim().split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let k = match source {
        Source::Graph(g) => g.particle_count(),
        _ => 0,
    };
    let count = |i: usize, default: usize| -> Result<usize, CliError> {
        match args.get(i) {
            Some(t) => t
                .parse()
                .map_err(|e| CliError::Spec(format!("bad argument in analysis {text:?}: {e}"))),
            None => Ok(default),
        }
    };
    let keep = |i: usize, default: Vec<usize>| -> Result<Vec<usize>, CliError> {
        match args.get(i) {
            Some(t) => parse_list(t, '+'),
            None => Ok(default),
        }
    };
    let max_args = match name {
        "projection" => 2,
        "phase_density" | "entanglement" | "trace_moments" | "state_sample" => 1,
        _ => 0,
    };
    if args.len() > max_args {
        return Err(CliError::Spec(format!("too many arguments in analysis {text:?}")));
    }
    Ok(match name {
        "spacing" => Analysis::Spacing,
        "phase_density" => Analysis::PhaseDensity { bins: count(0, 32)? },
        "evec_entropy" => Analysis::EvecEntropy,
        "element_entropy" => Analysis::ElementEntropy,
        "entanglement" => Analysis::Entanglement {
            keep: keep(0, default_keep(k))?,
        },
        "state_sample" => Analysis::StateSample {
            keep: keep(0, default_keep(k))?,
        },
        "trace_moments" => Analysis::TraceMoments { max_power: count(0, 4)? },
        "projection" => {
            let particle = count(0, 2)?;
            let first_other = (1..=k).find(|&p| p != particle).unwrap_or(1);
            Analysis::Projection {
                particle,
                keep: keep(1, vec![first_other])?,
            }
        }
        other => return Err(CliError::Spec(format!("unknown analysis {other:?}"))),
    })
}

fn cmd_run(args: &RunArgs, argv: &[String]) -> Result<(), CliError> {
    let source = build_source(&args.source, &args.builder)?;
    let analyses = args
        .analyses
        .iter()
        .filter(|a| !a.trim().is_empty())
        .map(|a| parse_analysis(a, &source))
        .collect::<Result<Vec<_>, _>>()?;
    let seed = parse_seed(&args.common.seed)?;
    let options = EnsembleOptions {
        wrap: if args.strict_spacing {
            WrapGap::Exclude
        } else {
            WrapGap::Include
        },
        projection_weighting: if args.unweighted_projection {
            ProjectionWeighting::Unweighted
        } else {
            ProjectionWeighting::Weighted
        },
        dim_cap: args.common.dim_cap,
        workers: args.workers,
    };
    let provenance = Provenance::new(argv, seed, &source);
    let spec = EnsembleSpec::new(source, args.draws, seed, analyses).with_options(options);
    spec.validate()?;
    let report = ensemble::run_ensemble(&spec)?;

    ensure_dir(&args.common.out)?;
    let doc = serde_json::json!({ "provenance": provenance, "report": report });
    fs::write(
        args.common.out.join("report.json"),
        serde_json::to_string_pretty(&doc).expect("serializable"),
    )?;
    if args.common.format == Format::Csv {
        for (name, histogram) in report.histograms() {
            let text = format!("{}{}", provenance.csv_header(), histogram.to_csv());
            fs::write(args.common.out.join(format!("{name}.csv")), text)?;
        }
    }
    print!("{}", summary(&report, args.bits));
    Ok(())
}

/// Human-readable digest of a report. Entropies are shown in bits when
/// `bits` is set; the JSON report always uses nats.
pub fn summary(report: &EnsembleReport, bits: bool) -> String {
    let scale = if bits { std::f64::consts::LN_2 } else { 1.0 };
    let unit = if bits { "bits" } else { "nats" };
    let mut s = String::new();
    let _ = writeln!(s, "{} N={} draws={} seed={}", report.source, report.dim, report.draws, report.master_seed);
    if let Some(r) = &report.spacing {
        let _ = writeln!(
            s,
            "spacing: count={} mean={:.6} variance={:.6} ks_wigner={:.5} ks_poisson={:.5}",
            r.count, r.mean, r.variance, r.ks_wigner, r.ks_poisson
        );
    }
    if let Some(r) = &report.phase_density {
        let _ = writeln!(
            s,
            "phase_density: count={} chi2={:.3} dof={} p={:.4}",
            r.count, r.chi_square.statistic, r.chi_square.dof, r.chi_square.p_value
        );
    }
    if let Some(r) = &report.evec_entropy {
        let _ = writeln!(
            s,
            "evec_entropy: mean={:.5} ± {:.5} {unit} (random vector {:.5})",
            r.entropy.mean / scale,
            r.entropy.stderr / scale,
            r.reference / scale
        );
    }
    for r in &report.entanglement {
        let _ = writeln!(
            s,
            "entanglement {:?}: entropy={:.5} ± {:.5} {unit} (Page {:.5}) purity={:.5} ± {:.5} (mean {:.5})",
            r.keep,
            r.entropy.mean / scale,
            r.entropy.stderr / scale,
            r.page_reference / scale,
            r.purity.mean,
            r.purity.stderr,
            r.purity_reference
        );
    }
    if let Some(r) = &report.element_entropy {
        let _ = writeln!(
            s,
            "element_entropy: mean={:.5} ± {:.5} {unit} variance={:.3e}",
            r.entropy.mean / scale,
            r.entropy.stderr / scale,
            r.entropy.variance / (scale * scale)
        );
    }
    for r in &report.projection {
        let _ = writeln!(
            s,
            "projection particle {} keep {:?}: entropy={:.5} ± {:.5} {unit} purity={:.5} ± {:.5} (mean {:.5})",
            r.particle,
            r.keep,
            r.entropy.mean / scale,
            r.entropy.stderr / scale,
            r.purity.mean,
            r.purity.stderr,
            r.purity_reference
        );
    }
    if let Some(moments) = &report.trace_moments {
        for m in moments {
            let _ = writeln!(
                s,
                "trace_moment {}: re={:.4} ± {:.4} im={:.4} ± {:.4} |.|²={:.4}",
                m.power, m.re.mean, m.re.stderr, m.im.mean, m.im.stderr, m.abs_sq.mean
            );
        }
    }
    for r in &report.state_sample {
        let _ = writeln!(
            s,
            "state_sample {:?}: entropy={:.5} ± {:.5} {unit} purity={:.5} ± {:.5}",
            r.keep,
            r.entropy.mean / scale,
            r.entropy.stderr / scale,
            r.purity.mean,
            r.purity.stderr
        );
    }
    let _ = writeln!(s, "wall time: {:.3} s", report.timing.wall_seconds);
    s
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let graph = build_graph(&args.source, &args.builder)?
        .ok_or_else(|| CliError::Spec("bench needs a graph source".into()))?;
    let seed = parse_seed(&args.seed)?;
    let t = ensemble::benchmark_generation(&graph, args.draws, seed)?;
    let blocks: usize = graph.layers().iter().map(|l| l.cliques().len()).sum();
    println!("{:<40} {:>8} {:>12} {:>12}", "matrix type", "count", "seconds", "rel. time %");
    println!(
        "{:<40} {:>8} {:>12.4} {:>12.1}",
        format!("structured, {blocks} blocks, N={}", t.dim),
        t.draws,
        t.structured_seconds,
        100.0 * t.ratio
    );
    println!(
        "{:<40} {:>8} {:>12.4} {:>12.1}",
        format!("CUE, N={}", t.dim),
        t.draws,
        t.cue_seconds,
        100.0
    );
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let graph = build_graph(&args.source, &args.builder)?
        .ok_or_else(|| CliError::Spec("validate needs a graph source".into()))?;
    println!("valid: k={} dims={:?} N={}", graph.particle_count(), graph.dims(), graph.total_dim());
    for (i, layer) in graph.layers().iter().enumerate() {
        let cliques: Vec<String> = layer.cliques().iter().map(|c| c.to_string()).collect();
        println!("layer {} [{}]: {}", i + 1, layer.color(), cliques.join(" "));
    }
    let components: Vec<Vec<usize>> = graph
        .components()
        .into_iter()
        .map(|c| c.into_iter().map(|p| p + 1).collect())
        .collect();
    if graph.is_connected() {
        println!("connected");
    } else {
        println!("disconnected: components {components:?}");
    }
    Ok(())
}
