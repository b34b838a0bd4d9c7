use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use cellcode::bench::{reference_cases, run_suite, timed, Scale};
use cellcode::shapes::{
    digital_ball, export_mesh, read_volume, write_volume, MeshFormat, VolumeImage,
};
use cellcode::tracking::{extract_boundary, BelAdjacency, Method, SurfelStorage};
use cellcode::{CellSet, SpaceLayout};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cellcode", version, about = "Cell coding of nD digital images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetOp {
    Union,
    Intersection,
    Difference,
    Complement,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Table3,
}

#[derive(Subcommand)]
enum Command {
    /// Write a digital ball centred in the image.
    GenBall {
        #[arg(long, num_args = 1.., required = true)]
        dims: Vec<u64>,
        #[arg(long)]
        radius: u64,
        /// Centre of the ball (defaults to dims / 2).
        #[arg(long, num_args = 1..)]
        center: Option<Vec<u64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the boundary of the object stored in a volume file.
    Boundary {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// `interior`, `exterior` or `i,j=mode;...`
        #[arg(long, default_value = "interior")]
        adjacency: String,
        /// off, svg or csv
        #[arg(long, value_parser = parse_format, requires = "out")]
        export: Option<MeshFormat>,
        #[arg(long, requires = "export")]
        out: Option<PathBuf>,
    },
    /// Set algebra on volume files.
    SetOp {
        #[arg(long, value_enum)]
        op: SetOp,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark suite.
    Bench {
        #[arg(long, value_enum, default_value = "table3")]
        suite: Suite,
        #[arg(long, value_parser = parse_scale, default_value = "small")]
        scale: Scale,
        /// Comma-separated methods (default: all).
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        methods: Vec<Method>,
        #[arg(long)]
        csv: bool,
    },
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    Method::parse(s).ok_or_else(|| format!("unknown method {s:?}"))
}

fn parse_format(s: &str) -> std::result::Result<MeshFormat, String> {
    MeshFormat::parse(s).ok_or_else(|| format!("unknown export format {s:?}"))
}

fn parse_scale(s: &str) -> std::result::Result<Scale, String> {
    Scale::parse(s).ok_or_else(|| format!("unknown scale {s:?}"))
}

fn load(path: &PathBuf) -> Result<VolumeImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_volume(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn save(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenBall {
            dims,
            radius,
            center,
            out,
        } => {
            let space = SpaceLayout::from_sizes(&dims)?;
            let center = center.unwrap_or_else(|| dims.iter().map(|d| d / 2).collect());
            let ball = digital_ball(&space, &center, radius)?;
            save(&out, &write_volume(&ball))?;
            println!("{}", ball.spel_count());
        }
        Command::Boundary {
            input,
            method,
            adjacency,
            export,
            out,
        } => {
            let image = load(&input)?;
            let n = image.space().dimension();
            let adjacency = BelAdjacency::parse(n, &adjacency)?;
            let t = Instant::now();
            let surfels =
                extract_boundary(method, image.occupancy(), &adjacency, SurfelStorage::Signed)?;
            let time = t.elapsed();
            let count = surfels.cardinality();
            println!("{count}");
            eprintln!(
                "{}: {:.3} ms, {:.1} ns/bel",
                method.name(),
                time.as_secs_f64() * 1e3,
                time.as_nanos() as f64 / count.max(1) as f64
            );
            if let (Some(format), Some(out)) = (export, out) {
                save(&out, &export_mesh(&surfels, format)?)?;
            }
        }
        Command::SetOp { op, a, b, out } => {
            let a = load(&a)?;
            let b = match (op, b) {
                (SetOp::Complement, _) => None,
                (_, Some(b)) => Some(load(&b)?),
                (_, None) => bail!("--b is required for this operation"),
            };
            let mut set = a.into_occupancy();
            let (res, time) = timed(|| -> cellcode::Result<()> {
                match (op, &b) {
                    (SetOp::Complement, _) => set.complement_in_place(),
                    (SetOp::Union, Some(b)) => set.union_with(b.occupancy())?,
                    (SetOp::Intersection, Some(b)) => set.intersect_with(b.occupancy())?,
                    (SetOp::Difference, Some(b)) => set.difference_with(b.occupancy())?,
                    _ => unreachable!(),
                }
                Ok(())
            });
            res?;
            let spels = set.space().spel_count();
            let result = VolumeImage::from_occupancy(set)?;
            save(&out, &write_volume(&result))?;
            println!("{}", result.spel_count());
            eprintln!(
                "{:.3} ms, {:.3} ns/spel",
                time.as_secs_f64() * 1e3,
                time.as_nanos() as f64 / spels as f64
            );
        }
        Command::Bench {
            suite: Suite::Table3,
            scale,
            methods,
            csv,
        } => {
            let methods = if methods.is_empty() {
                Method::ALL.to_vec()
            } else {
                methods
            };
            let report = run_suite(&reference_cases(scale), &methods)?;
            if csv {
                print!("{}", report.to_csv());
            } else {
                print!("{}", report.to_table());
            }
            if !report.all_match() {
                return Err(anyhow!("counts differ from the reference values"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
