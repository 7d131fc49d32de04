use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anosovlab::entropy::{RMethod, ReportOptions, DEFAULT_CLASSIFY_TOL};
use anosovlab::geodesic::{CurvatureMethod, SuspensionPoint};
use anosovlab::matrix::IntegerMatrix;
use anosovlab::spectrum::{IndexConvention, FITTED_CONVENTION, SOLVER_REL_TOL};
use anosovlab_cli::bundle::{cmd_report_bundle, read_bundle, verify_bundle, write_bundle, BUNDLE_FILE};
use anosovlab_cli::commands::{
    cmd_constants, cmd_curvature, cmd_entropy, cmd_gen, cmd_geodesic, cmd_predict, cmd_spectrum, cmd_stats,
    parse_triple, read_spectrum_csv, write_trajectory_csv, BatteryFile, SampleFormat,
};
use anosovlab_cli::config::{parse_seed, read_matrix, MatrixSpec, RunConfig};
use anosovlab_cli::table::{cmd_table, parse_rows, table_csv};
use anosovlab_cli::{CliError, CliResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "anosovlab", version, about = "Hyperbolic torus automorphisms: matrices, spectra, entropies, generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Mixmax,
    Cat,
    Rcarry,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, value_enum, default_value = "mixmax")]
    family: FamilyArg,
    /// dimension of the mixmax matrix
    #[arg(long = "N", default_value_t = 256)]
    n: usize,
    /// magic integer of the mixmax matrix
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    s: i64,
}

impl MatrixArgs {
    fn spec(&self) -> MatrixSpec {
        match self.family {
            FamilyArg::Mixmax => MatrixSpec::Mixmax { n: self.n, s: self.s },
            FamilyArg::Cat => MatrixSpec::Cat {},
            FamilyArg::Rcarry => MatrixSpec::Rcarry {},
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Literal,
    Symmetric,
}

impl From<ConventionArg> for IndexConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Literal => IndexConvention::Literal,
            ConventionArg::Symmetric => IndexConvention::Symmetric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tuple,
    Split,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurvatureMethodArg {
    Analytic,
    Fd,
}

#[derive(Subcommand)]
enum Command {
    /// Write a matrix in the plain-text format
    Matrix {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues as CSV (re, im, modulus, phase, class)
    Spectrum {
        /// matrix file; overrides the family flags
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// use the closed-form mixmax spectrum
        #[arg(long)]
        analytic: bool,
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        #[arg(long, default_value_t = SOLVER_REL_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy report of a spectrum
    Entropy {
        /// spectrum CSV; without it the spectrum of the family flags is computed
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        orders: Vec<usize>,
        #[arg(long, value_enum, default_value = "tuple")]
        method: MethodArg,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        q: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
        tol: f64,
        /// write the report here instead of stdout
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integral constants or large-N estimates
    Asymptotics {
        #[arg(long)]
        constants: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        predict: Option<f64>,
    },
    /// Generator output
    Gen {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// hex-encoded seed bytes
        #[arg(long)]
        seed: String,
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        #[arg(long, default_value = "f64-text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Statistical battery over several generators
    Stats {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature of the cat-map suspension at a point
    Curvature {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        w1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        w2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, value_enum, default_value = "analytic")]
        method: CurvatureMethodArg,
        /// finite-difference step
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
        #[arg(long)]
        json: bool,
    },
    /// Integrate a geodesic of the cat-map suspension
    Geodesic {
        /// start point w1,w2,u
        #[arg(long, value_delimiter = ',', default_value = "0,0,0", allow_negative_numbers = true)]
        x: Vec<f64>,
        /// initial velocity
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Entropy table for mixmax dimensions
    Table {
        /// rows as N:s
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        rows: Vec<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full pipeline into a hashed report bundle
    Bundle {
        #[arg(long, required_unless_present_any = ["verify", "validate"])]
        config: Option<PathBuf>,
        /// output directory; overrides the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// seed override (hex)
        #[arg(long)]
        seed: Option<String>,
        /// sample budget override
        #[arg(long)]
        samples: Option<usize>,
        /// rerun the config embedded in a bundle and compare hashes
        #[arg(long, conflicts_with_all = ["config", "validate"])]
        verify: Option<PathBuf>,
        /// check a bundle against the schema only
        #[arg(long, conflicts_with = "config")]
        validate: Option<PathBuf>,
    },
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::invalid(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    let mut w = sink(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(path, &text)
}

fn load_matrix(input: Option<&Path>, args: &MatrixArgs) -> CliResult<IntegerMatrix> {
    match input {
        Some(p) => read_matrix(p),
        None => args.spec().build(),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Matrix { matrix, out } => emit_text(out.as_deref(), &matrix.spec().build()?.to_text()),
        Command::Spectrum { input, matrix, analytic, convention, tol, out } => {
            let m = load_matrix(input.as_deref(), &matrix)?;
            let conv = analytic.then(|| convention.map(Into::into).unwrap_or(FITTED_CONVENTION));
            emit_text(out.as_deref(), &cmd_spectrum(&m, conv, tol)?.to_csv())
        }
        Command::Entropy { input, matrix, orders, method, q, tol, json } => {
            let spec = match input {
                Some(p) => read_spectrum_csv(
                    &std::fs::read_to_string(&p).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", p.display())))?,
                )?,
                None => cmd_spectrum(&matrix.spec().build()?, None, SOLVER_REL_TOL)?,
            };
            let method = match method {
                MethodArg::Tuple => RMethod::Tuple,
                MethodArg::Split => RMethod::Split,
            };
            emit_json(json.as_deref(), &cmd_entropy(&spec, &ReportOptions { orders, method, qs: q, tol })?)
        }
        Command::Asymptotics { constants, tol, predict } => {
            if !constants && predict.is_none() {
                return Err(CliError::invalid("asymptotics needs --constants or --predict N"));
            }
            let mut out = serde_json::Map::new();
            if constants {
                out.insert("constants".into(), serde_json::to_value(cmd_constants(tol)?)?);
            }
            if let Some(n) = predict {
                out.insert("prediction".into(), serde_json::to_value(cmd_predict(n)?)?);
            }
            emit_json(None, &out)
        }
        Command::Gen { matrix, seed, count, format, out } => {
            let m = matrix.spec().build()?;
            let mut w = sink(out.as_deref())?;
            cmd_gen(&m, &parse_seed(&seed)?, count, format.parse::<SampleFormat>()?, &mut w)
        }
        Command::Stats { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", config.display())))?;
            let file: BatteryFile = toml::from_str(&text)?;
            emit_json(out.as_deref(), &cmd_stats(&file)?)
        }
        Command::Curvature { w1, w2, u, method, h, json } => {
            let method = match method {
                CurvatureMethodArg::Analytic => CurvatureMethod::Analytic,
                CurvatureMethodArg::Fd => CurvatureMethod::FiniteDifference,
            };
            let r = cmd_curvature(&SuspensionPoint::cat(w1, w2, u), method, h)?;
            if json {
                emit_json(None, &r)
            } else {
                emit_text(
                    None,
                    &format!(
                        "K12 {:.12}\nK13 {:.12}\nK23 {:.12}\nR {:.12}\n|e1|^2 {:.12}\n|e2|^2 {:.12}\n|e3|^2 {:.12}\n",
                        r.k12, r.k13, r.k23, r.scalar, r.frame_lengths[0], r.frame_lengths[1], r.frame_lengths[2]
                    ),
                )
            }
        }
        Command::Geodesic { x, v, t, dt, csv } => {
            let x = parse_triple(&x, "--x")?;
            let v = parse_triple(&v, "--v")?;
            let traj = cmd_geodesic(&SuspensionPoint::cat(x[0], x[1], x[2]), &v, t, dt)?;
            if let Some(p) = &csv {
                write_trajectory_csv(&traj, sink(Some(p))?)?;
            }
            let last = traj.samples.last().expect("at least the initial sample");
            emit_json(
                None,
                &serde_json::json!({
                    "steps": traj.samples.len() - 1,
                    "max_relative_energy_drift": traj.max_relative_energy_drift,
                    "final": last,
                }),
            )
        }
        Command::Table { rows, csv } => {
            let table = cmd_table(&parse_rows(&rows)?)?;
            match csv {
                Some(p) => emit_text(Some(&p), &table_csv(&table)?),
                None => emit_json(None, &table),
            }
        }
        Command::Bundle { config, out, seed, samples, verify, validate } => {
            if let Some(p) = validate {
                read_bundle(&p)?;
                return emit_json(None, &serde_json::json!({ "valid": true }));
            }
            if let Some(p) = verify {
                let report = verify_bundle(&read_bundle(&p)?)?;
                emit_json(None, &report)?;
                return if report.reproduced {
                    Ok(())
                } else {
                    Err(CliError::numeric("bundle hash was not reproduced"))
                };
            }
            let path = config.expect("clap requires --config here");
            let mut cfg = RunConfig::load(&path)?;
            if let Some(d) = out {
                cfg.output.dir = d;
            }
            if let Some(s) = seed {
                cfg.sampling.seed = s;
            }
            if let Some(n) = samples {
                cfg.sampling.samples = n;
            }
            let result = cmd_report_bundle(&cfg)?;
            write_bundle(&result, &cfg.output.dir)?;
            emit_json(
                None,
                &serde_json::json!({
                    "bundle": cfg.output.dir.join(BUNDLE_FILE),
                    "content_hash": result.bundle.content_hash,
                }),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
