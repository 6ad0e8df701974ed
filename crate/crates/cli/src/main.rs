//! Command-line front end: sampling, analytics, verification, and plot-data
//! export with deterministic seeding and stable file formats.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage
//! or domain errors. Domain errors are emitted as one JSON object on stderr.

mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use copula_forge::analytic::{mixture_field, perm_field};
use copula_forge::checkerboard;
use copula_forge::copula::GridPoint;
use copula_forge::formats;
use copula_forge::rational::{format_rational, parse_rational, to_f64, Rat};
use copula_forge::sampling::{
    sample_mixture_grid, sample_mixture_value, sample_pairs, sample_perm_copula, SeededRng,
};
use copula_forge::Error;

#[derive(Parser)]
#[command(
    name = "copula-forge",
    version,
    about = "Random discrete copulas: exact laws, seeded samplers, and brute-force verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact value law at a mesh point, or of the checkerboard extension at
    /// any rational point (--hat).
    Pmf(PmfArgs),
    /// Draw copula realizations, point values, or synthetic data pairs.
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Exact mean and variance of a field value.
    Moments(MomentsArgs),
    /// Re-derive closed forms by brute force and report agreement.
    Verify(verify::VerifyArgs),
    /// Evaluation lattice of one realization's checkerboard surface plus
    /// the analytic variance surface, as CSV.
    Heatmap(HeatmapArgs),
}

#[derive(Args)]
struct PmfArgs {
    /// Mesh resolution.
    #[arg(long)]
    k: u32,
    /// Mesh point indices i j (value law of the grid field).
    #[arg(long, num_args = 2, value_names = ["I", "J"], conflicts_with = "hat")]
    point: Option<Vec<u32>>,
    /// Evaluate the checkerboard-extended field instead of the grid field.
    #[arg(long, requires = "u", requires = "v")]
    hat: bool,
    /// First coordinate as a rational, e.g. 1/4 (with --hat).
    #[arg(long)]
    u: Option<String>,
    /// Second coordinate as a rational (with --hat).
    #[arg(long)]
    v: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SampleCommand {
    /// Realizations of the permutation field: one grid file per sample.
    X(SampleGridArgs),
    /// Realizations of the mixture field: grid files (k <= 8), or point
    /// values with --point for any k.
    Y(SampleYArgs),
    /// Synthetic data pairs from the checkerboard density of a seeded
    /// random permutation copula.
    Pairs(SamplePairsArgs),
}

#[derive(Args)]
struct SampleGridArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of realizations.
    #[arg(long, default_value_t = 1)]
    samples: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; with --samples > 1 it is a prefix and files are written
    /// as <out><index>.<ext>.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleYArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    samples: u64,
    /// Sample scalar values at this mesh point instead of whole grids;
    /// works for any k.
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    point: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplePairsArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of (u, v) pairs.
    #[arg(long)]
    samples: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    k: u32,
    /// Mixture field instead of the permutation field.
    #[arg(long)]
    y: bool,
    /// Checkerboard-extended field (allows off-mesh points).
    #[arg(long)]
    hat: bool,
    /// First coordinate as a rational, e.g. 1/2.
    #[arg(long)]
    u: String,
    /// Second coordinate as a rational.
    #[arg(long)]
    v: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lattice size per axis (at least 2).
    #[arg(long)]
    grid: u32,
    /// Realize the mixture field instead of the permutation field.
    #[arg(long)]
    y: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(2)
        }
    }
}

fn error_json(err: &Error) -> String {
    serde_json::json!({
        "error": { "kind": error_kind(err), "message": err.to_string() }
    })
    .to_string()
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::MeshTooSmall { .. }
        | Error::PointOutOfRange { .. }
        | Error::OutsideUnitSquare { .. }
        | Error::NotAMeshPoint { .. }
        | Error::OffMeshRect { .. }
        | Error::LevelOutOfSupport { .. }
        | Error::InvalidParameter { .. }
        | Error::EmptyInput => "domain",
        Error::CapacityExceeded { .. } => "capacity",
        Error::ShapeMismatch { .. }
        | Error::NotBistochastic { .. }
        | Error::NoPerfectMatching { .. }
        | Error::InvalidCopula { .. } => "constraint",
        Error::BadRational { .. } | Error::Format(_) => "format",
        Error::Io(_) => "io",
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Pmf(args) => cmd_pmf(args).map(|()| ExitCode::SUCCESS),
        Command::Sample(args) => cmd_sample(args).map(|()| ExitCode::SUCCESS),
        Command::Moments(args) => cmd_moments(args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => verify::run(args),
        Command::Heatmap(args) => cmd_heatmap(args).map(|()| ExitCode::SUCCESS),
    }
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn parse_coord(name: &'static str, raw: &str) -> Result<Rat, Error> {
    parse_rational(raw).map_err(|_| Error::InvalidParameter {
        name,
        requirement: "a rational like 1/4 or a decimal with at most 12 fractional digits",
        value: raw.to_string(),
    })
}

fn cmd_pmf(args: PmfArgs) -> Result<(), Error> {
    let law = if args.hat {
        let (u, v) = match (&args.u, &args.v) {
            (Some(u), Some(v)) => (parse_coord("u", u)?, parse_coord("v", v)?),
            _ => {
                return Err(Error::InvalidParameter {
                    name: "--hat",
                    requirement: "--u and --v rationals",
                    value: "missing coordinate".into(),
                })
            }
        };
        perm_field::extended_pmf(args.k, &u, &v)?
    } else {
        let point = match &args.point {
            Some(p) if p.len() == 2 => GridPoint::new(p[0], p[1]),
            _ => {
                return Err(Error::InvalidParameter {
                    name: "--point",
                    requirement: "two mesh indices i j (or use --hat with --u/--v)",
                    value: "missing".into(),
                })
            }
        };
        perm_field::pmf(args.k, point)?
    };
    let content = match args.format {
        Format::Json => {
            let mut s = formats::law_to_json(&law);
            s.push('\n');
            s
        }
        Format::Csv => formats::law_to_csv(&law),
    };
    emit(args.out.as_ref(), &content)
}

fn indexed_path(prefix: &std::path::Path, index: u64, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(format!("{index:03}.{ext}"));
    PathBuf::from(name)
}

/// One realization goes to `--out` verbatim; several go to
/// `<out><index>.<ext>`.
fn write_realization(
    out: &Option<PathBuf>,
    samples: u64,
    idx: u64,
    ext: &str,
    content: &str,
) -> Result<(), Error> {
    match out {
        Some(prefix) if samples > 1 => std::fs::write(indexed_path(prefix, idx, ext), content)?,
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_sample(cmd: SampleCommand) -> Result<(), Error> {
    match cmd {
        SampleCommand::X(args) => {
            let mut rng = SeededRng::new(args.seed);
            let ext = match args.format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            if args.out.is_none() && args.samples > 1 {
                return Err(Error::InvalidParameter {
                    name: "--out",
                    requirement: "a file prefix when --samples > 1",
                    value: "missing".into(),
                });
            }
            for idx in 0..args.samples {
                let copula = sample_perm_copula(&mut rng, args.k)?;
                let content = match args.format {
                    Format::Json => {
                        let mut s = formats::grid_to_json(&copula);
                        s.push('\n');
                        s
                    }
                    Format::Csv => formats::grid_to_csv(&copula),
                };
                write_realization(&args.out, args.samples, idx, ext, &content)?;
            }
            Ok(())
        }
        SampleCommand::Y(args) => {
            let mut rng = SeededRng::new(args.seed);
            if let Some(p) = &args.point {
                let point = GridPoint::new(p[0], p[1]);
                let values: Vec<f64> = (0..args.samples)
                    .map(|_| sample_mixture_value(&mut rng, args.k, point))
                    .collect::<Result<_, _>>()?;
                let content = match args.format {
                    Format::Json => {
                        let mut s = serde_json::to_string(&values)?;
                        s.push('\n');
                        s
                    }
                    Format::Csv => {
                        let mut s = String::from("value\n");
                        for v in &values {
                            let _ = writeln!(s, "{v:.16e}");
                        }
                        s
                    }
                };
                return emit(args.out.as_ref(), &content);
            }
            let ext = match args.format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            if args.out.is_none() && args.samples > 1 {
                return Err(Error::InvalidParameter {
                    name: "--out",
                    requirement: "a file prefix when --samples > 1",
                    value: "missing".into(),
                });
            }
            for idx in 0..args.samples {
                let grid = sample_mixture_grid(&mut rng, args.k)?;
                let content = match args.format {
                    Format::Json => {
                        let mut s = formats::grid_f64_to_json(&grid);
                        s.push('\n');
                        s
                    }
                    Format::Csv => formats::grid_f64_to_csv(&grid),
                };
                write_realization(&args.out, args.samples, idx, ext, &content)?;
            }
            Ok(())
        }
        SampleCommand::Pairs(args) => {
            // stream 0 draws the source permutation copula, stream 1 the pairs
            let mut copula_rng = SeededRng::with_stream(args.seed, 0);
            let copula = sample_perm_copula(&mut copula_rng, args.k)?;
            let mut pair_rng = SeededRng::with_stream(args.seed, 1);
            let pairs = sample_pairs(&mut pair_rng, &copula, args.samples as usize)?;
            let content = match args.format {
                Format::Json => {
                    let mut s = formats::pairs_to_json(&pairs);
                    s.push('\n');
                    s
                }
                Format::Csv => formats::pairs_to_csv(&pairs),
            };
            emit(args.out.as_ref(), &content)
        }
    }
}

fn cmd_moments(args: MomentsArgs) -> Result<(), Error> {
    let u = parse_coord("u", &args.u)?;
    let v = parse_coord("v", &args.v)?;
    let (mean, variance) = match (args.y, args.hat) {
        (false, false) => (
            perm_field::mean_at(args.k, &u, &v)?,
            perm_field::variance_at(args.k, &u, &v)?,
        ),
        (false, true) => (
            perm_field::extended_mean(args.k, &u, &v)?,
            perm_field::extended_variance(args.k, &u, &v)?,
        ),
        (true, false) => (
            mixture_field::mean_at(args.k, &u, &v)?,
            mixture_field::variance_at(args.k, &u, &v)?,
        ),
        (true, true) => (
            mixture_field::extended_mean(args.k, &u, &v)?,
            mixture_field::extended_variance(args.k, &u, &v)?,
        ),
    };
    let field = match (args.y, args.hat) {
        (false, false) => "perm",
        (false, true) => "perm-extended",
        (true, false) => "mixture",
        (true, true) => "mixture-extended",
    };
    let content = match args.format {
        Format::Json => {
            let record = serde_json::json!({
                "k": args.k,
                "field": field,
                "u": format_rational(&u),
                "v": format_rational(&v),
                "mean": format_rational(&mean),
                "variance": format_rational(&variance),
                "mean_decimal": to_f64(&mean),
                "variance_decimal": to_f64(&variance),
            });
            format!("{record}\n")
        }
        Format::Csv => {
            let mut s = String::from("k,field,u,v,mean,variance,mean_exact,variance_exact\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                args.k,
                field,
                to_f64(&u),
                to_f64(&v),
                to_f64(&mean),
                to_f64(&variance),
                format_rational(&mean),
                format_rational(&variance),
            );
            s
        }
    };
    emit(args.out.as_ref(), &content)
}

fn cmd_heatmap(args: HeatmapArgs) -> Result<(), Error> {
    if args.grid < 2 {
        return Err(Error::InvalidParameter {
            name: "--grid",
            requirement: "at least 2",
            value: args.grid.to_string(),
        });
    }
    let mut rng = SeededRng::new(args.seed);
    let surface = if args.y {
        sample_mixture_grid(&mut rng, args.k)?
    } else {
        sample_perm_copula(&mut rng, args.k)?.to_f64()
    };
    let n = args.grid;
    let mut out = String::from("u,v,value,variance\n");
    for a in 0..n {
        for b in 0..n {
            let u = Rat::new(a.into(), (n - 1).into());
            let v = Rat::new(b.into(), (n - 1).into());
            let value = checkerboard::eval_f64(&surface, to_f64(&u), to_f64(&v))?;
            let variance = if args.y {
                mixture_field::extended_variance(args.k, &u, &v)?
            } else {
                perm_field::extended_variance(args.k, &u, &v)?
            };
            let _ = writeln!(
                out,
                "{},{},{value},{}",
                to_f64(&u),
                to_f64(&v),
                to_f64(&variance)
            );
        }
    }
    emit(args.out.as_ref(), &out)
}
