use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treeflip::claims::{self, ClaimOptions, ClaimStatus};
use treeflip::export::{slice_to_dot, slice_to_json};
use treeflip::instances::{by_name, Instance, InstanceError};
use treeflip::search::{shortest_sequences, SearchError, SearchOptions};

use crate::service::{build_slice, router, Corpus, FirstFlip, SliceKind};

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    ClaimMismatch = 1,
    Input = 2,
    Cap = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Self {
            exit: Exit::Input,
            message: e.to_string(),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        let exit = match e {
            SearchError::PointMismatch { .. } => Exit::Input,
            _ => Exit::Cap,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        exit: Exit::Input,
        message: format!("{}: {e}", path.display()),
    }
}

#[derive(Parser, Debug)]
#[command(name = "treeflip", version, about = "Flip distances between plane spanning trees on convex point sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal flip distance and number of shortest sequences.
    Distance(DistanceArgs),
    /// Export the flip graph reachable within a non-perfect budget.
    Slice(SliceArgs),
    /// Re-run the published numbers and property suites.
    VerifyPaper(VerifyArgs),
    /// Serve the JSON API used by the explorer.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    /// Instance file, or the name of a built-in instance.
    pub instance: String,
    /// Only park on hull edges (inserted chords not in either tree must be hull edges).
    #[arg(long)]
    pub hull_parking_only: bool,
    #[arg(long)]
    pub compatible_only: bool,
    #[arg(long, value_name = "N")]
    pub max_nonperfect: Option<usize>,
    /// Never remove an edge shared by both trees.
    #[arg(long)]
    pub forbid_happy_flips: bool,
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    pub max_sequences: usize,
    /// Print the first N sequences found.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub show: usize,
    #[arg(long, default_value_t = 500_000_000)]
    pub node_cap: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SliceFormat {
    Dot,
    Structured,
}

#[derive(Args, Debug)]
pub struct SliceArgs {
    pub instance: String,
    /// Where to write the export; stdout if omitted.
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub budget: usize,
    /// The first non-perfect flip must insert a hull edge.
    #[arg(long)]
    pub first_flip_hull: bool,
    #[arg(long, value_enum, default_value_t = SliceFormat::Structured)]
    pub format: SliceFormat,
    /// Keep every path within the budget instead of only those that can
    /// still finish at optimal length.
    #[arg(long)]
    pub all_paths: bool,
    #[arg(long, default_value_t = 50_000_000)]
    pub node_cap: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Also run the slow claims.
    #[arg(long)]
    pub include_slow: bool,
    /// Read instance files from here before the built-in ones.
    #[arg(long)]
    pub corpus_dir: Option<PathBuf>,
    /// Run only these claims (e.g. `--only P1 --only P3`).
    #[arg(long, value_name = "ID")]
    pub only: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub random_instances: usize,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Extra instance files to serve.
    #[arg(long)]
    pub corpus_dir: Option<PathBuf>,
}

/// A path to an instance file, or a built-in name when no such file exists.
pub fn load_instance(arg: &str) -> Result<Instance, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(Instance::load(path)?);
    }
    match by_name(arg) {
        Err(InstanceError::Unknown { .. }) => Err(Failure {
            exit: Exit::Input,
            message: format!("{arg}: no such file or built-in instance"),
        }),
        other => Ok(other?),
    }
}

pub fn distance(args: &DistanceArgs) -> Result<String, Failure> {
    let inst = load_instance(&args.instance)?;
    let opts = SearchOptions {
        max_nonperfect: args.max_nonperfect,
        restrict_parking_to_hull: args.hull_parking_only,
        forbid_flipping_happy: args.forbid_happy_flips,
        compatible_only: args.compatible_only,
        max_sequences: args.max_sequences.max(args.show),
        node_cap: args.node_cap,
        ..SearchOptions::default()
    };
    let start = Instant::now();
    let r = shortest_sequences(&inst.t_initial, &inst.t_final, &opts)?;
    let mut out = String::new();
    let _ = writeln!(out, "instance {} (n={})", inst.name, inst.n);
    let _ = writeln!(out, "optimum {}, sequences {}", r.optimum, r.count);
    let _ = writeln!(out, "lower bound {}", r.lower_bound);
    let _ = writeln!(out, "time {:.3?} ({} nodes)", start.elapsed(), r.stats.nodes_expanded);
    for s in r.sequences.iter().take(args.show) {
        let moves: Vec<String> = s.moves.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  {}", moves.join(" "));
    }
    Ok(out)
}

/// Writes the export and returns the count line.
pub fn slice(args: &SliceArgs) -> Result<String, Failure> {
    let inst = load_instance(&args.instance)?;
    let first = if args.first_flip_hull { FirstFlip::Hull } else { FirstFlip::Any };
    let kind = if args.all_paths { SliceKind::Budget } else { SliceKind::Pruned };
    let s = build_slice(&inst, args.budget, first, kind, args.node_cap)?;
    let text = match args.format {
        SliceFormat::Dot => slice_to_dot(&s),
        SliceFormat::Structured => slice_to_json(&s) + "\n",
    };
    let counts = format!("{} nodes, {} arcs", s.node_count(), s.arc_count());
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e))?,
        None => print!("{text}"),
    }
    Ok(counts)
}

/// The claim table and whether every claim that ran passed.
pub fn verify(args: &VerifyArgs) -> Result<(String, bool), Failure> {
    let opts = ClaimOptions {
        include_slow: args.include_slow,
        corpus_dir: args.corpus_dir.clone(),
        random_instances: args.random_instances,
        ..ClaimOptions::default()
    };
    let ids: Vec<&str> = if args.only.is_empty() {
        claims::IDS.to_vec()
    } else {
        args.only.iter().map(String::as_str).collect()
    };
    let mut out = format!("{:<4}  {:<6}  {:<44}  {:<60}  {}\n", "id", "result", "claim", "expected", "observed");
    let mut ok = true;
    for id in ids {
        let Some(c) = claims::run(id, &opts) else {
            return Err(Failure {
                exit: Exit::Input,
                message: format!("unknown claim {id}; known: {}", claims::IDS.join(", ")),
            });
        };
        let result = match c.status {
            ClaimStatus::Pass => "pass",
            ClaimStatus::Fail => "FAIL",
            ClaimStatus::Skipped => "skip",
        };
        ok &= c.status != ClaimStatus::Fail;
        let _ = writeln!(out, "{:<4}  {:<6}  {:<44}  {:<60}  {}", c.id, result, c.claim, c.expected, c.observed);
    }
    Ok((out, ok))
}

pub fn serve(args: &ServeArgs) -> Result<(), Failure> {
    let corpus = Corpus::load(args.corpus_dir.as_deref())?;
    let addr = format!("{}:{}", args.host, args.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure {
        exit: Exit::Input,
        message: format!("cannot start runtime: {e}"),
    })?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|e| Failure {
            exit: Exit::Input,
            message: format!("cannot bind {addr}: {e}"),
        })?;
        eprintln!("serving {} instances on http://{addr}/api/instances", corpus.names().count());
        axum::serve(listener, router(Arc::new(corpus))).await.map_err(|e| Failure {
            exit: Exit::Input,
            message: e.to_string(),
        })
    })
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Distance(a) => distance(a).map(|out| {
            print!("{out}");
            Exit::Ok
        }),
        Command::Slice(a) => slice(a).map(|counts| {
            if a.out.is_some() {
                println!("{counts}");
            } else {
                eprintln!("{counts}");
            }
            Exit::Ok
        }),
        Command::VerifyPaper(a) => verify(a).map(|(table, ok)| {
            print!("{table}");
            if ok {
                Exit::Ok
            } else {
                Exit::ClaimMismatch
            }
        }),
        Command::Serve(a) => serve(a).map(|()| Exit::Ok),
    };
    match result {
        Ok(exit) => exit.into(),
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.exit.into()
        }
    }
}
