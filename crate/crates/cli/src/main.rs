//! `qtv` command-line driver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use qtv_core::circuit::depth::{closed_form, depth, DepthConvention};
use qtv_core::circuit::qasm::export_qasm;
use qtv_core::circuit::{ModuleTag, RegisterLayout};
use qtv_core::degrade::{error_rate, DegradeError, NoiseSpec};
use qtv_core::image::{read_image, write_image, Image, ImageError};
use qtv_core::modules::{build_neqr, build_qtv, ModuleError};
use qtv_core::pipeline::{qtv_denoise, rmse, PipelineError};
use qtv_core::reproduce::{format_table, reproduce, to_csv, Figure, ReproConfig};
use qtv_core::tv::{
    tv_denoise, ArithmeticMode, TvError, TvParams, DEFAULT_EPSILON, DEFAULT_MAX_ITERS,
};

const WORKERS_ENV: &str = "QTV_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "qtv",
    version,
    about = "Quantum total-variation denoising toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Add seeded noise to an image and write a JSON sidecar describing it.
    Corrupt(CorruptArgs),
    /// Denoise an image with classical TV or the quantum pipeline.
    Denoise(DenoiseArgs),
    /// Check that the quantum pipeline matches integer TV on an image.
    Verify(VerifyArgs),
    /// Report circuit depth per module next to the closed-form values.
    Depth(DepthArgs),
    /// Export a circuit as OpenQASM 2.0.
    Export(ExportArgs),
    /// Re-measure a reference RMSE table on the shipped test images.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Noise {
    Awgn,
    Spn,
}

#[derive(Debug, Args)]
struct CorruptArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum)]
    noise: Noise,
    /// Standard deviation in intensity units (awgn).
    #[arg(long, required_if_eq("noise", "awgn"))]
    sigma: Option<f64>,
    /// Percentage of pixels replaced (spn).
    #[arg(long, required_if_eq("noise", "spn"))]
    rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Tv,
    Qtv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Float,
    Integer,
}

impl From<Mode> for ArithmeticMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Float => ArithmeticMode::Float,
            Mode::Integer => ArithmeticMode::IntegerRounded,
        }
    }
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum, default_value = "tv")]
    method: Method,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, value_enum, default_value = "integer")]
    mode: Mode,
    /// Clean image to report RMSE against.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 5)]
    max_iters: usize,
}

#[derive(Debug, Args)]
struct DepthArgs {
    /// Bits per pixel.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=8))]
    q: u8,
    /// Coordinate bits per axis; the patch is 2^n x 2^n.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=4))]
    n: u8,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "paper")]
    convention: Convention,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    Paper,
    Strict,
}

impl From<Convention> for DepthConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Paper => DepthConvention::Paper,
            Convention::Strict => DepthConvention::Strict,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["patch", "demo_2x2"])))]
struct ExportArgs {
    /// Square patch image with side 2^n.
    #[arg(long)]
    patch: Option<PathBuf>,
    /// NEQR encoding of the 2x2 example image (240, 148; 68, 73).
    #[arg(long)]
    demo_2x2: bool,
    /// Export only the NEQR encoding of the patch.
    #[arg(long)]
    neqr_only: bool,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(long)]
    figure: Figure,
    /// Crop the test image to 64x64.
    #[arg(long)]
    scale: bool,
    #[arg(long, default_value_t = qtv_core::reproduce::DEFAULT_SEED)]
    seed: u64,
    /// Write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full result as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Contract(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Contract(_) => 4,
        }
    }
}

fn contract(e: impl std::fmt::Display) -> CliError {
    CliError::Contract(e.to_string())
}

fn image_error(path: &Path, e: ImageError) -> CliError {
    match e {
        ImageError::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Contract(format!("{}: {other}", path.display())),
    }
}

fn load(path: &Path) -> Result<Image, CliError> {
    read_image(path).map_err(|e| image_error(path, e))
}

fn save(img: &Image, path: &Path) -> Result<(), CliError> {
    write_image(img, path).map_err(|e| image_error(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

fn tv_error(e: TvError) -> CliError {
    CliError::Usage(e.to_string())
}

fn degrade_error(e: DegradeError) -> CliError {
    match e {
        DegradeError::Sigma(_) | DegradeError::Rate(_) => CliError::Usage(e.to_string()),
        other => contract(other),
    }
}

fn module_error(e: ModuleError) -> CliError {
    match e {
        ModuleError::Lambda(_) => CliError::Usage(e.to_string()),
        other => contract(other),
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    input: &'a Path,
    noise: NoiseSpec,
    error_rate: f64,
    rmse: f64,
}

fn cmd_corrupt(a: CorruptArgs) -> Result<(), CliError> {
    let spec = match a.noise {
        Noise::Awgn => NoiseSpec::awgn(a.sigma.expect("required by clap"), a.seed),
        Noise::Spn => NoiseSpec::spn(a.rate.expect("required by clap"), a.seed),
    };
    let img = load(&a.input)?;
    let noisy = spec.apply(&img).map_err(degrade_error)?;
    save(&noisy, &a.output)?;
    let sidecar = Sidecar {
        input: &a.input,
        noise: spec,
        error_rate: error_rate(&img, &noisy).map_err(contract)?,
        rmse: rmse(&img, &noisy).map_err(contract)?,
    };
    write_text(&sidecar_path(&a.output), &to_json(&sidecar))
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn cmd_denoise(a: DenoiseArgs) -> Result<(), CliError> {
    if a.method == Method::Qtv && a.mode == Mode::Float {
        return Err(CliError::Usage(
            "--method qtv requires --mode integer".into(),
        ));
    }
    let params = TvParams::new(a.lambda, a.mode.into())
        .and_then(|p| p.with_epsilon(a.epsilon))
        .and_then(|p| p.with_max_iters(a.max_iters))
        .map_err(tv_error)?;
    let img = load(&a.input)?;
    let reference = a.reference.as_deref().map(load).transpose()?;
    let out = match a.method {
        Method::Tv => tv_denoise(&img, &params),
        Method::Qtv => qtv_denoise(&img, &params).map_err(pipeline_error)?,
    };
    save(&out.image, &a.output)?;
    println!("iterations: {}", out.iterations);
    println!("converged: {}", out.converged);
    let trace: Vec<String> = out.ratios.iter().map(|r| format!("{r:.6e}")).collect();
    println!("ratios: {}", trace.join(" "));
    if let Some(r) = reference {
        println!("rmse: {:.4}", rmse(&out.image, &r).map_err(contract)?);
    }
    Ok(())
}

fn pipeline_error(e: PipelineError) -> CliError {
    match e {
        PipelineError::FloatMode => CliError::Usage(e.to_string()),
        other => contract(other),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let params = TvParams::new(a.lambda, ArithmeticMode::IntegerRounded)
        .and_then(|p| p.with_max_iters(a.max_iters))
        .map_err(tv_error)?;
    let img = load(&a.input)?;
    let classical = tv_denoise(&img, &params);
    let quantum = qtv_denoise(&img, &params).map_err(pipeline_error)?;
    let differing = classical
        .image
        .pixels()
        .iter()
        .zip(quantum.image.pixels())
        .filter(|(a, b)| a != b)
        .count();
    println!(
        "iterations: tv {} qtv {}; differing pixels: {differing}",
        classical.iterations, quantum.iterations
    );
    if differing != 0 || classical.iterations != quantum.iterations {
        return Err(CliError::Contract(
            "quantum pipeline differs from integer TV".into(),
        ));
    }
    println!("ok");
    Ok(())
}

#[derive(Serialize)]
struct ModuleRow {
    module: ModuleTag,
    instances: usize,
    gates: usize,
    closed_form: Option<u64>,
    depth: u64,
    strict_depth: u64,
}

#[derive(Serialize)]
struct DepthOutput {
    lambda: f64,
    report: qtv_core::circuit::depth::DepthReport,
    modules: Vec<ModuleRow>,
}

fn cmd_depth(a: DepthArgs) -> Result<(), CliError> {
    let (q, n) = (a.q as usize, a.n as usize);
    let side = 1 << n;
    let patch = Image::filled(side, side, a.q, 0).map_err(contract)?;
    let c = build_qtv(&patch, a.lambda, q)
        .map_err(module_error)?
        .circuit;
    let report = depth(&c, a.convention.into());
    let strict = depth(&c, DepthConvention::Strict);
    let modules = report
        .per_tag
        .iter()
        .map(|t| ModuleRow {
            module: t.tag,
            instances: t.instances,
            gates: t.gates,
            closed_form: closed_form(t.tag, q, n),
            depth: t.depth,
            strict_depth: strict.tag(t.tag).map_or(0, |s| s.depth),
        })
        .collect();
    println!(
        "{}",
        to_json(&DepthOutput {
            lambda: a.lambda,
            report,
            modules
        })
    );
    Ok(())
}

fn cmd_export(a: ExportArgs) -> Result<(), CliError> {
    let (patch, neqr_only) = match &a.patch {
        Some(p) => (load(p)?, a.neqr_only),
        None => (
            Image::from_rows(8, &[[240, 148], [68, 73]]).expect("valid example"),
            true,
        ),
    };
    let circuit = if neqr_only {
        let side = patch.width();
        if side != patch.height() || !side.is_power_of_two() || side < 2 {
            return Err(contract(format!(
                "patch must be square with side 2^n, got {}x{}",
                patch.width(),
                patch.height()
            )));
        }
        let (l, c) =
            RegisterLayout::neqr(patch.bit_depth() as usize, side.trailing_zeros() as usize);
        build_neqr(&patch, &l, c, true).map_err(module_error)?
    } else {
        build_qtv(&patch, a.lambda, patch.bit_depth() as usize)
            .map_err(module_error)?
            .circuit
    };
    write_text(&a.output, &export_qasm(&circuit))
}

fn cmd_reproduce(a: ReproduceArgs) -> Result<(), CliError> {
    let cfg = ReproConfig {
        seed: a.seed,
        scaled: a.scale,
        ..ReproConfig::default()
    };
    let rows = reproduce(a.figure, &cfg).map_err(contract)?;
    print!("{}", format_table(&rows));
    if let Some(p) = &a.csv {
        write_text(p, &to_csv(&rows))?;
    }
    if let Some(p) = &a.json {
        write_text(p, &to_json(&rows))?;
    }
    Ok(())
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{WORKERS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(contract)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    match cli.command {
        Command::Corrupt(a) => cmd_corrupt(a),
        Command::Denoise(a) => cmd_denoise(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Depth(a) => cmd_depth(a),
        Command::Export(a) => cmd_export(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
