use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chipfire::graph::parse_rational;
use chipfire::grid::{common_granularity, rational_gcd};
use chipfire::paths::{enumerate_paths, enumerate_symmetric_paths};
use chipfire::pencil::path_to_divisor;
use chipfire::verify::{
    lambda_table, render_table, verify_bijection, verify_brill_noether, verify_prop_double,
    verify_prop_sigma, BrillNoetherConfig, SuiteConfig,
};
use chipfire::{
    refine, ChainOfLoops, Divisor, Error, LatticePath, MetricPoint, ModelGraph, OutputFormat, Rational64,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "chipfire", version, about = "Chip-firing and linear pencils on metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Tsv => OutputFormat::Tsv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print pencil counts lambda and lambda' per degree.
    Table {
        #[arg(long, default_value_t = 2)]
        d_min: u64,
        #[arg(long, default_value_t = 10)]
        d_max: u64,
    },
    /// Run a verification suite on the chain of loops.
    Verify(VerifyArgs),
    /// Rank of a divisor on a graph.
    Rank(DivisorArgs),
    /// Reduced divisor equivalent to a divisor.
    Reduce {
        #[command(flatten)]
        input: DivisorArgs,
        /// Base point: a vertex name or `edge@offset`.
        #[arg(long)]
        at: String,
    },
    /// List lattice paths of length g.
    Paths {
        #[arg(long)]
        g: usize,
        /// Only palindromic paths.
        #[arg(long)]
        symmetric: bool,
    },
    /// Emit the chain of loops in the graph text format.
    Chain(ChainArgs),
    /// Emit the divisor k*D_p of a lattice path in the divisor text format.
    Pencil {
        #[arg(long)]
        path: String,
        #[arg(long, default_value_t = 1)]
        multiple: i64,
        #[arg(long, value_parser = rational)]
        ell: Option<Rational64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Prop2,
    Sigma,
    Bijection,
    BrillNoether,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: Suite,
    #[arg(long)]
    g: usize,
    #[arg(long, value_parser = rational)]
    ell: Option<Rational64>,
    #[arg(long, value_parser = rational, default_value = "1")]
    granularity: Rational64,
    /// Rank for brill-noether.
    #[arg(long, default_value_t = 1)]
    r: i64,
    /// Degree for brill-noether (default g/2 + 1).
    #[arg(long)]
    d: Option<i64>,
    /// Largest accepted genus (defaults: 8, brill-noether 4).
    #[arg(long)]
    max_g: Option<usize>,
    /// Soft time budget; unfinished cases are reported as a failure.
    #[arg(long)]
    max_seconds: Option<u64>,
}

#[derive(Args, Debug)]
struct DivisorArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    divisor: PathBuf,
    /// Grid granularity (default: gcd of all lengths and chip offsets).
    #[arg(long, value_parser = rational)]
    granularity: Option<Rational64>,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    g: usize,
    #[arg(long, value_parser = rational)]
    ell: Option<Rational64>,
    #[arg(long, value_parser = rational, default_value = "1")]
    m: Rational64,
}

fn rational(s: &str) -> Result<Rational64, String> {
    parse_rational(s)
}

/// Distinguishes failed checks (exit 1) from bad input (exit 2).
enum Failure {
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CheckFailed(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let format: OutputFormat = cli.format.into();
    match &cli.command {
        Command::Table { d_min, d_max } => {
            print!("{}", render_table(&lambda_table(*d_min, *d_max)?, format));
            Ok(0)
        }
        Command::Verify(args) => verify(args, format),
        Command::Rank(args) => {
            let (graph, divisor, h) = load(args)?;
            let grid = refine(&graph, h)?;
            let result = grid.rank(&divisor)?;
            match format {
                OutputFormat::Text => {
                    println!("rank: {}", result.rank);
                    println!("witness: {}", result.witness.display(&graph));
                }
                OutputFormat::Tsv => {
                    println!("rank\twitness");
                    println!("{}\t{}", result.rank, result.witness.display(&graph));
                }
            }
            Ok(0)
        }
        Command::Reduce { input, at } => {
            let (graph, divisor, h) = load(input)?;
            let base = parse_point(&graph, at)?;
            let grid = refine(&graph, h)?;
            print!("{}", grid.reduce(&divisor, &base)?.to_text(&graph));
            Ok(0)
        }
        Command::Paths { g, symmetric } => {
            let paths = if *symmetric {
                enumerate_symmetric_paths(*g)?
            } else {
                enumerate_paths(*g)?
            };
            for p in paths {
                println!("{p}");
            }
            Ok(0)
        }
        Command::Chain(args) => {
            let ell = args.ell.unwrap_or_else(|| ChainOfLoops::default_long_length(args.g));
            let chain = ChainOfLoops::new(args.g, ell, args.m)?;
            if chain.length_warning() {
                eprintln!("warning: ell/m below 2g - 2; lengths may not be generic");
            }
            print!("{}", chain.graph().to_text());
            Ok(0)
        }
        Command::Pencil { path, multiple, ell } => {
            let p: LatticePath = path.parse()?;
            let g = p.genus();
            let chain = ChainOfLoops::new(g, ell.unwrap_or_else(|| ChainOfLoops::default_long_length(g)), 1.into())?;
            let grid = refine(chain.graph(), 1.into())?;
            let pencil = path_to_divisor(&p, &chain, &grid)?;
            print!("{}", (*multiple * &pencil.divisor).to_text(chain.graph()));
            Ok(0)
        }
    }
}

fn verify(args: &VerifyArgs, format: OutputFormat) -> Result<u8, Failure> {
    let mut cfg = SuiteConfig::new(args.g);
    cfg.ell = args.ell;
    cfg.granularity = args.granularity;
    cfg.deadline = args.max_seconds.map(|s| Instant::now() + Duration::from_secs(s));
    cfg.max_genus = args.max_g.unwrap_or(match args.suite {
        Suite::BrillNoether => 4,
        _ => 8,
    });
    let report = match args.suite {
        Suite::Prop2 => verify_prop_double(&cfg)?,
        Suite::Sigma => verify_prop_sigma(&cfg)?,
        Suite::Bijection => verify_bijection(&cfg)?,
        Suite::BrillNoether => verify_brill_noether(&BrillNoetherConfig {
            rank: args.r,
            degree: args.d.unwrap_or(args.g as i64 / 2 + 1),
            suite: cfg,
        })?,
    };
    print!("{}", report.render(format));
    Ok(report.exit_code() as u8)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn load(args: &DivisorArgs) -> Result<(ModelGraph, Divisor, Rational64), Failure> {
    let graph = ModelGraph::parse(&read(&args.graph)?).map_err(|e| in_file(&args.graph, e))?;
    let divisor = Divisor::parse(&read(&args.divisor)?, &graph).map_err(|e| in_file(&args.divisor, e))?;
    let h = match args.granularity {
        Some(h) => h,
        None => divisor.iter().fold(common_granularity(&graph), |h, (p, _)| match p {
            MetricPoint::Vertex(_) => h,
            MetricPoint::Edge { offset, .. } => rational_gcd(h, *offset),
        }),
    };
    Ok((graph, divisor, h))
}

fn parse_point(graph: &ModelGraph, s: &str) -> Result<MetricPoint, Failure> {
    if let Some((edge, offset)) = s.split_once('@') {
        let e = graph
            .edge_id(edge)
            .ok_or_else(|| Failure::Usage(format!("unknown edge `{edge}`")))?;
        let offset = parse_rational(offset).map_err(Failure::Usage)?;
        Ok(graph.point(e, offset)?)
    } else {
        graph
            .vertex_id(s)
            .map(MetricPoint::Vertex)
            .ok_or_else(|| Failure::Usage(format!("unknown vertex `{s}`")))
    }
}
