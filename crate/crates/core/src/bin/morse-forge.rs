//! `morse-forge` command line.
//!
//! Exit codes: 0 success, 1 computation error, 2 malformed input (syntax,
//! or a mesh or field that fails validation), 3 invariant violation (from
//! `verify`, which also reports invalid meshes and fields this way), 4 I/O
//! error, 5 pair not cancelable, 64 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, LevelFilter};

use morse_forge::cancel::PlanSummary;
use morse_forge::report::{self, RunReport};
use morse_forge::synth::Mixture;
use morse_forge::{
    cancel_1d, cancel_pair, is_cancelable, persistence_pairs, realize_function, sample_deformation, simplify,
    CellComplex, CellId, DiscreteGradient, MorseError, ScalarField,
};
use morse_forge::{io, meshes};

#[derive(Parser)]
#[command(name = "morse-forge", version, about = "Discrete Morse cancellation on surfaces and graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical census, critical cells and connecting-path counts as JSON.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Persistence pairs of the lower-star filtration as CSV.
    Pairs {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cancel one critical pair and write the realized field.
    CancelPair {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = parse_cell)]
        p: CellId,
        #[arg(long, value_parser = parse_cell)]
        q: CellId,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        census_scan: Option<usize>,
    },
    /// Cancel every pair of persistence at most the threshold.
    Simplify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        census_scan: Option<usize>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Re-check all invariants; exits 3 on any violation.
    Verify {
        #[command(flatten)]
        input: Input,
    },
    /// Monotone replacement of a sampled 1-D profile.
    #[command(name = "cancel-1d")]
    Cancel1d {
        #[arg(long)]
        values: PathBuf,
        #[arg(long, default_value_t = 1)]
        margin: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the seeded two-bump grid fixture.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        field: PathBuf,
    },
}

#[derive(Args)]
struct Input {
    /// OFF surface; pair with --field.
    #[arg(long, requires = "field", conflicts_with = "values")]
    mesh: Option<PathBuf>,
    /// `vertex_id,value` CSV for --mesh.
    #[arg(long)]
    field: Option<PathBuf>,
    /// One value per line, read as a path graph.
    #[arg(long, required_unless_present = "mesh")]
    values: Option<PathBuf>,
    /// Close the --values path into a cycle.
    #[arg(long, requires = "values")]
    cyclic: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("({p}, {q}) is not cancelable: {why}")]
    NotCancelable { p: CellId, q: CellId, why: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Morse(e) if matches!(e, MorseError::Parse(_)) || e.is_input() => 2,
            CliError::Morse(MorseError::InvariantViolation(_)) => 3,
            CliError::Morse(_) => 1,
            CliError::Io { .. } => 4,
            CliError::NotCancelable { .. } => 5,
            CliError::Usage(_) => 64,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_cell(s: &str) -> std::result::Result<CellId, String> {
    s.parse().map_err(|e: MorseError| e.to_string())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    info!("wrote {}", path.display());
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Loaded {
    complex: CellComplex,
    field: ScalarField,
    one_dim: bool,
}

impl Input {
    fn load(&self) -> CliResult<Loaded> {
        if let Some(mesh) = &self.mesh {
            let field = self.field.as_ref().expect("clap enforces --field");
            let complex = io::parse_off(&read(mesh)?)?;
            let values = io::parse_field_csv(&read(field)?, complex.n_vertices())?;
            let field = ScalarField::load(&complex, &values)?;
            return Ok(Loaded { complex, field, one_dim: false });
        }
        let path = self.values.as_ref().expect("clap enforces --values");
        let values = io::parse_values(&read(path)?)?;
        let complex = match (self.cyclic, values.len()) {
            (true, n) if n >= 3 => meshes::cycle_graph(n),
            (true, n) => return Err(CliError::Usage(format!("--cyclic needs at least 3 values, got {n}"))),
            (false, 0) => return Err(MorseError::Parse(format!("{}: no values", path.display())).into()),
            (false, n) => meshes::path_graph(n),
        };
        let field = ScalarField::load(&complex, &values)?;
        Ok(Loaded { complex, field, one_dim: true })
    }
}

impl Loaded {
    fn field_text(&self, f: &ScalarField) -> String {
        if self.one_dim {
            io::write_values(f.values())
        } else {
            io::write_field_csv(f)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze { input, out, svg } => {
            let l = input.load()?;
            let r = report::analyze(&l.complex, &l.field)?;
            if let Some(p) = svg {
                write(&p, &report::svg(&l.complex, &l.field)?)?;
            }
            emit(out.as_deref(), &report::to_json(&r))
        }
        Command::Pairs { input, out } => {
            let l = input.load()?;
            emit(out.as_deref(), &io::write_pairs_csv(&persistence_pairs(&l.complex, &l.field)))
        }
        Command::CancelPair { input, p, q, epsilon, out, report: rep, census_scan } => {
            let l = input.load()?;
            let (c, f) = (&l.complex, &l.field);
            let g = DiscreteGradient::build(c, f);
            let plan = match is_cancelable(c, &g, f, p, q, epsilon)? {
                Ok(plan) => plan,
                Err(why) => return Err(CliError::NotCancelable { p, q, why: why.to_string() }),
            };
            let g2 = cancel_pair(c, &g, &plan)?;
            let f2 = realize_function(c, &g2, f, &plan)?;
            let transition = match census_scan {
                Some(n) => sample_deformation(c, f, &f2, &plan, n)?.transition,
                None => None,
            };
            let moved = f2.max_abs_diff(f);
            write(&out, &l.field_text(&f2))?;
            if let Some(path) = rep {
                let r = RunReport {
                    plans: vec![PlanSummary::of(&plan, moved, transition)],
                    final_census: g2.census().into(),
                    euler: c.euler_characteristic(),
                    transitions: transition.into_iter().collect(),
                    total_perturbation: moved,
                    perturbation_bound: plan.persistence + plan.epsilon,
                };
                write(&path, &report::to_json(&r))?;
            }
            Ok(())
        }
        Command::Simplify { input, threshold, out, report: rep, census_scan, svg } => {
            let l = input.load()?;
            let (f2, r) = simplify(&l.complex, &l.field, threshold, census_scan)?;
            write(&out, &l.field_text(&f2))?;
            if let Some(path) = rep {
                write(&path, &report::to_json(&RunReport::from(&r)))?;
            }
            if let Some(path) = svg {
                write(&path, &report::svg(&l.complex, &f2)?)?;
            }
            Ok(())
        }
        Command::Verify { input } => {
            let l = match input.load() {
                Err(CliError::Morse(e)) if e.is_input() => {
                    return Err(MorseError::InvariantViolation(e.to_string()).into());
                }
                other => other?,
            };
            let r = report::verify(&l.complex, &l.field);
            print!("{}", report::to_json(&r));
            if r.ok {
                Ok(())
            } else {
                let failed: Vec<&str> = r.checks.iter().filter(|c| !c.ok).map(|c| c.name).collect();
                Err(MorseError::InvariantViolation(failed.join(", ")).into())
            }
        }
        Command::Cancel1d { values, margin, out } => {
            let h = io::parse_values(&read(&values)?)?;
            let profile = cancel_1d(&h, margin)?;
            emit(out.as_deref(), &io::write_values(&profile.h1))
        }
        Command::Generate { seed, mesh, field } => {
            let (c, f) = Mixture::two_bumps().sample(seed)?;
            write(&mesh, &io::write_off(&c))?;
            write(&field, &io::write_field_csv(&f))
        }
    }
}

fn init_logging() -> CliResult<()> {
    let level = match std::env::var("MORSE_FORGE_LOG").as_deref() {
        Err(_) | Ok("") => LevelFilter::Warn,
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("trace") => LevelFilter::Trace,
        Ok(other) => {
            return Err(CliError::Usage(format!("MORSE_FORGE_LOG must be quiet, info or trace, got `{other}`")))
        }
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    if let Err(e) = init_logging().and_then(|()| run(cli)) {
        eprintln!("morse-forge: {e}");
        return ExitCode::from(e.code());
    }
    ExitCode::SUCCESS
}
