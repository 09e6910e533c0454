use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use icehive::optimizer::DEFAULT_MAX_DEPTH;
use icehive_cli::commands::{self, parse_pair, read_quiver, read_seed, triangulation_arg, Format, Output};
use icehive_cli::suites::{self, Suite};

#[derive(Parser)]
#[command(name = "icehive", version, about = "Exact ice-quiver mutation, hive gluing and verification tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The hive quiver of size l.
    Hive {
        #[arg(long)]
        l: u32,
        /// Drop the frozen vertices on these edges (1, 2, 3).
        #[arg(long, value_delimiter = ',')]
        drop_edges: Vec<u8>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Glue hives along a triangulation of a disk.
    Glue {
        #[arg(long)]
        triangulation: Option<PathBuf>,
        /// Use the zigzag triangulation of the m-gon instead of a file.
        #[arg(long)]
        zigzag: Option<u32>,
        #[arg(long)]
        l: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Mutate a quiver along a sequence of vertices.
    Mutate {
        #[arg(long)]
        quiver: PathBuf,
        /// Comma-separated vertex ids, or labels with --by-label.
        #[arg(long)]
        seq: String,
        #[arg(long)]
        by_label: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Mutate a seed, tracking cluster variables as Laurent polynomials.
    SeedMutate {
        /// A quiver file (initial seed) or a seed file.
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        seq: String,
        #[arg(long)]
        by_label: bool,
        /// Report the new cluster variable after every step.
        #[arg(long)]
        track_laurent: bool,
    },
    /// The mutation sequence realizing a flip of the glued quiver.
    Flip {
        #[arg(long)]
        triangulation: Option<PathBuf>,
        #[arg(long)]
        zigzag: Option<u32>,
        /// The diagonal as two points, e.g. 2,4.
        #[arg(long)]
        diagonal: String,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        verify: bool,
    },
    /// The mutation sequence realizing a twist of one triangle.
    Twist {
        #[arg(long)]
        triangulation: Option<PathBuf>,
        #[arg(long)]
        zigzag: Option<u32>,
        /// Index of the triangle in the triangulation.
        #[arg(long)]
        triangle: usize,
        /// The fixed edge of the triangle as two points.
        #[arg(long)]
        edge: String,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        verify: bool,
    },
    /// Shortest mutation sequence making a vertex a sink or source.
    Optimize {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        by_label: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Delete a glued disk quiver down to a single hive.
    DiskPipeline {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Run a verification suite; exits nonzero when a case fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Seed for the random trials.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The g-vector of a Laurent polynomial with respect to a seed.
    Gvector {
        /// A quiver or seed file.
        #[arg(long)]
        seed: PathBuf,
        /// A Laurent polynomial as `[[exponents], "num/den"]` pairs.
        #[arg(long)]
        poly: PathBuf,
    },
    /// Serve one interactive session over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Hive { l, drop_edges, format } => commands::hive(l, &drop_edges, format),
        Command::Glue { triangulation, zigzag, l, format } => {
            commands::glue_cmd(&triangulation_arg(triangulation.as_deref(), zigzag)?, l, format)
        }
        Command::Mutate { quiver, seq, by_label, format } => commands::mutate(&read_quiver(&quiver)?, &seq, by_label, format),
        Command::SeedMutate { quiver, seq, by_label, track_laurent } => {
            commands::seed_mutate(&read_seed(&quiver)?, &seq, by_label, track_laurent)
        }
        Command::Flip { triangulation, zigzag, diagonal, l, verify } => {
            let t = triangulation_arg(triangulation.as_deref(), zigzag)?;
            commands::flip_cmd(&t, parse_pair(&diagonal)?, l, verify)
        }
        Command::Twist { triangulation, zigzag, triangle, edge, l, verify } => {
            let t = triangulation_arg(triangulation.as_deref(), zigzag)?;
            commands::twist_cmd(&t, triangle, parse_pair(&edge)?, l, verify)
        }
        Command::Optimize { quiver, vertex, by_label, max_depth } => {
            commands::optimize(&read_quiver(&quiver)?, &vertex, by_label, max_depth)
        }
        Command::DiskPipeline { m, l, max_depth } => commands::pipeline(m, l, max_depth),
        Command::Verify { suite, seed } => {
            let r = suites::run(suite, seed)?;
            Ok(Output::json(&r.to_json(suite, seed)).failing(r.ok()))
        }
        Command::Gvector { seed, poly } => commands::gvector(&read_seed(&seed)?, &commands::read_json(&poly)?),
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(icehive_cli::server::serve(SocketAddr::new(host, port)))?;
            Ok(Output { text: String::new(), ok: true })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            if !out.text.is_empty() {
                let mut stdout = std::io::stdout().lock();
                if let Err(e) = writeln!(stdout, "{}", out.text) {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
