//! `mono-clt`: generate graphs, evaluate bounds, simulate, enumerate and
//! verify from the command line.
//!
//! Exit codes: 0 success (for `verify`, every verdict passed), 1 runtime
//! error or failed verdict, 2 usage error, 3 exact enumeration infeasible
//! under the cap.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mono_clt::bounds::{BoundReport, RegimeConfig};
use mono_clt::coloring::{simulate, ColoringConfig};
use mono_clt::exact::{exact_pmf, DEFAULT_CAP};
use mono_clt::graph::{generate, Family, Graph};
use mono_clt::verify::{sweep, sweep_csv, verify_graph, ColorRule, FamilyKind, Method, VerifyOptions, SCHEMA};

#[derive(Parser, Debug)]
#[command(
    name = "mono-clt",
    version,
    about = "Monochromatic edge counts under uniform random vertex coloring"
)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
    /// Print the closed-form bounds for (m, c) as JSON.
    Bound(BoundArgs),
    /// Monte Carlo histogram of the monochromatic count (`y,count` CSV).
    Simulate(SimulateArgs),
    /// Exact pmf of the monochromatic count (`y,prob` CSV).
    Exact(ExactArgs),
    /// Compare measured distances against the bounds (JSON report).
    Verify(VerifyArgs),
    /// Verify a family over a size schedule (CSV).
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyName {
    Complete,
    Cycle,
    Path,
    Star,
    Matching,
    CompleteBipartite,
    ErdosRenyi,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Vertex count (edge count for `matching`, left side for `complete_bipartite`).
    #[arg(long)]
    n: usize,
    /// Right side of `complete_bipartite` (defaults to n).
    #[arg(long)]
    right: Option<usize>,
    /// Edge probability for `erdos_renyi`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    c: u32,
    /// Sum of per-edge minimum endpoint degrees, enables the structural rate.
    #[arg(long)]
    km: Option<u64>,
    /// Multiplier of the structural rate.
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Edge-list file, `-` for stdin.
    graph: PathBuf,
    #[arg(long)]
    c: u32,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Provenance JSON path (defaults to `<output>.json` when -o is given).
    #[arg(long)]
    provenance: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    graph: PathBuf,
    #[arg(long)]
    c: u32,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "method", required = true, multiple = false, args = ["exact", "mc"])]
struct MethodArgs {
    /// Exact enumeration.
    #[arg(long)]
    exact: bool,
    /// Monte Carlo with --samples and --seed.
    #[arg(long)]
    mc: bool,
}

impl MethodArgs {
    fn method(&self) -> Method {
        if self.mc {
            Method::MonteCarlo
        } else {
            Method::Exact
        }
    }
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
}

impl BudgetArgs {
    fn options(&self, method: Method) -> VerifyOptions {
        VerifyOptions {
            method,
            cap: self.cap,
            samples: self.samples,
            seed: self.seed,
            stream_id: 0,
            c0: self.c0,
            regime: RegimeConfig::default(),
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    graph: PathBuf,
    #[arg(long)]
    c: u32,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Comma-separated size schedule.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// `sqrt` (ceil of sqrt m), `<k>m` (k times m) or a fixed count.
    #[arg(long)]
    colors: String,
    /// Edge probability for `erdos_renyi`.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<mono_clt::Error>() {
        Some(mono_clt::Error::InvalidParameter(_)) => 2,
        Some(mono_clt::Error::CapExceeded { .. }) => 3,
        _ => 1,
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(text.parse::<Graph>()?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn family(name: FamilyName, n: usize, right: Option<usize>, p: Option<f64>) -> Result<Family> {
    Ok(match name {
        FamilyName::Complete => Family::Complete { n },
        FamilyName::Cycle => Family::Cycle { n },
        FamilyName::Path => Family::Path { n },
        FamilyName::Star => Family::Star { n },
        FamilyName::Matching => Family::Matching { edges: n },
        FamilyName::CompleteBipartite => Family::CompleteBipartite {
            left: n,
            right: right.unwrap_or(n),
        },
        FamilyName::ErdosRenyi => Family::ErdosRenyi {
            n,
            p: p.ok_or_else(|| usage("erdos_renyi needs --p"))?,
        },
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => {
            let fam = family(args.family, args.n, args.right, args.p)?;
            let g = generate(fam, args.seed)?;
            emit(args.output.as_deref(), &g.to_edge_list_string())?;
        }
        Command::Bound(args) => {
            let report = BoundReport::new(args.m, args.c, args.km, args.c0, RegimeConfig::default())?;
            let mut value = serde_json::to_value(&report)?;
            value["schema"] = SCHEMA.into();
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Command::Simulate(args) => {
            let g = read_graph(&args.graph)?;
            let cfg = ColoringConfig::new(args.c, args.seed)?.with_stream(args.stream);
            let summary = simulate(&g, &cfg, args.samples)?;
            emit(args.output.as_deref(), &summary.to_csv())?;
            let sidecar = args.provenance.or_else(|| {
                args.output
                    .as_ref()
                    .map(|p| PathBuf::from(format!("{}.json", p.display())))
            });
            if let Some(path) = sidecar {
                let provenance = json!({
                    "schema": SCHEMA,
                    "seed": summary.seed,
                    "stream_id": summary.stream_id,
                    "stream_count": summary.stream_count,
                    "n_samples": summary.n_samples,
                    "colors": args.c,
                    "graph_hash": g.content_hash(),
                    "mean": summary.mean,
                    "variance": summary.variance,
                });
                fs::write(&path, serde_json::to_string_pretty(&provenance)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Exact(args) => {
            let g = read_graph(&args.graph)?;
            let law = exact_pmf(&g, args.c, args.cap)?;
            emit(args.output.as_deref(), &law.to_csv())?;
        }
        Command::Verify(args) => {
            let g = read_graph(&args.graph)?;
            let report = verify_graph(&g, args.c, &args.budget.options(args.method.method()))?;
            emit(args.output.as_deref(), &(report.to_json() + "\n"))?;
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sweep(args) => {
            let rule: ColorRule = args.colors.parse()?;
            let kind = match args.family {
                FamilyName::ErdosRenyi => FamilyKind::ErdosRenyi {
                    p: args.p.ok_or_else(|| usage("erdos_renyi needs --p"))?,
                },
                FamilyName::Complete => FamilyKind::Complete,
                FamilyName::Cycle => FamilyKind::Cycle,
                FamilyName::Path => FamilyKind::Path,
                FamilyName::Star => FamilyKind::Star,
                FamilyName::Matching => FamilyKind::Matching,
                FamilyName::CompleteBipartite => FamilyKind::CompleteBipartite,
            };
            let rows = sweep(kind, &args.sizes, rule, &args.budget.options(args.method.method()))?;
            emit(args.output.as_deref(), &sweep_csv(&rows))?;
            if !rows.iter().all(|r| r.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
