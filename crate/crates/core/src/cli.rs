//! The `recthresh` command-line front end.
//!
//! ```text
//! recthresh segment --input in.pgm --levels 5 --output out.pgm [--report run.json]
//! recthresh sweep   --input in.pgm --max-levels 15 --epsilon 0.3 --csv sweep.csv
//! recthresh otsu    --input in.pgm --classes 4 [--report otsu.json]
//! recthresh bench   --input images/ --levels 3,5,7,9 --csv bench.csv
//! ```
//!
//! Exit codes: 0 on success, 1 when a file cannot be read or written, 2 for
//! invalid arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::otsu_multilevel_exhaustive_with;
use crate::metrics::{median_timed, timed, Psnr, QualityReport};
use crate::pgm::{read_pgm_file, write_pgm_file};
use crate::report::{format_thresholds, OtsuReport, RunReport};
use crate::thresholder::{auto_select_n, quantize_with};
use crate::{Exec, GrayImage, Histogram, KappaPair, Replacement, SegmentationParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "recthresh",
    version,
    about = "Recursive mean/std multilevel thresholding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantize an image and report thresholds and PSNR.
    Segment(SegmentArgs),
    /// PSNR as a function of the threshold count, with automatic selection.
    Sweep(SweepArgs),
    /// Exhaustive Otsu baseline.
    Otsu(OtsuArgs),
    /// Median timings and PSNR over a set of images and threshold counts.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct AlgorithmArgs {
    /// Symmetric kappa used at every step.
    #[arg(long, conflicts_with = "kappa_schedule")]
    kappa: Option<f64>,
    /// Per-step kappa pairs `k1:k2,k1:k2,...`; the last pair repeats.
    #[arg(long, value_parser = parse_schedule)]
    kappa_schedule: Option<Schedule>,
    #[arg(long, value_enum, default_value_t = ReplacementArg::WeightedMean)]
    replacement: ReplacementArg,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of thresholds (odd, at least 3).
    #[arg(long)]
    levels: usize,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long)]
    output: PathBuf,
    /// Write a JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    /// Largest threshold count evaluated (odd).
    #[arg(long)]
    max_levels: usize,
    /// Saturation tolerance in dB.
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long)]
    csv: PathBuf,
    /// Timed runs per threshold count (median reported).
    #[arg(long, default_value_t = 5)]
    runs: usize,
}

#[derive(Debug, Args)]
struct OtsuArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of classes, 2 to 4 (one to three thresholds).
    #[arg(long)]
    classes: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// PGM files and/or directories containing `.pgm` files.
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9")]
    levels: Vec<usize>,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value_t = 20)]
    runs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReplacementArg {
    WeightedMean,
    Midpoint,
}

#[derive(Clone, Debug)]
struct Schedule(Vec<KappaPair>);

fn parse_schedule(text: &str) -> Result<Schedule, String> {
    text.split(',')
        .map(|pair| {
            let (lo, hi) = pair
                .split_once(':')
                .ok_or_else(|| format!("expected k1:k2, got {pair:?}"))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad kappa {s:?}: {e}"))
            };
            Ok(KappaPair {
                lower: parse(lo)?,
                upper: parse(hi)?,
            })
        })
        .collect::<Result<_, _>>()
        .map(Schedule)
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl AlgorithmArgs {
    fn params(&self, n: usize) -> CliResult<SegmentationParams> {
        let base = SegmentationParams::new(n).map_err(usage)?;
        let base = match (&self.kappa, &self.kappa_schedule) {
            (Some(k), _) => base.with_kappa(*k).map_err(usage)?,
            (None, Some(s)) => base.with_kappa_schedule(s.0.clone()).map_err(usage)?,
            (None, None) => base,
        };
        Ok(base.with_replacement(match self.replacement {
            ReplacementArg::WeightedMean => Replacement::WeightedMean,
            ReplacementArg::Midpoint => Replacement::Midpoint,
        }))
    }
}

fn load(path: &Path) -> CliResult<GrayImage> {
    read_pgm_file(path).map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| io_err(path, e))
}

/// Parses `args` (including the program name) and runs the command,
/// writing human-readable output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Segment(a) => cmd_segment(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Otsu(a) => cmd_otsu(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("error: {m}"),
            }
            e.code()
        }
    }
}

fn cmd_segment(args: &SegmentArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = args.algorithm.params(args.levels)?;
    let image = load(&args.input)?;
    let (outcome, elapsed_ms) = timed(|| quantize_with(&image, &params, Exec::default()));
    let (result, quantized) = outcome.map_err(usage)?;
    write_pgm_file(&args.output, &quantized).map_err(|e| io_err(&args.output, e))?;
    let quality = QualityReport::new(&image, &quantized, elapsed_ms, params).map_err(usage)?;

    let _ = writeln!(
        out,
        "thresholds: {}",
        format_thresholds(result.thresholds())
    );
    let _ = writeln!(out, "effective_n: {}", result.effective_n());
    let _ = writeln!(out, "mse: {:.4}", quality.mse);
    let _ = writeln!(out, "psnr_db: {:.2}", quality.psnr_db);
    let _ = writeln!(out, "elapsed_ms: {elapsed_ms:.3}");

    if let Some(path) = &args.report {
        let report = RunReport::new(args.input.display().to_string(), &result, quality);
        write_text(path, &report.to_json())?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let base = args.algorithm.params(3)?;
    SegmentationParams::new(args.max_levels).map_err(usage)?;
    if !(args.epsilon.is_finite() && args.epsilon > 0.0) {
        return Err(usage(format!(
            "--epsilon must be positive, got {}",
            args.epsilon
        )));
    }
    let image = load(&args.input)?;
    let selection = auto_select_n(&image, &base, args.epsilon, args.max_levels).map_err(usage)?;

    let mut csv = csv_writer(&args.csv)?;
    let write_err = |e: csv::Error| io_err(&args.csv, e);
    csv.write_record(["n", "psnr_db", "elapsed_ms"])
        .map_err(write_err)?;
    let _ = writeln!(out, "n\tpsnr_db\telapsed_ms");
    for point in &selection.sweep {
        let params = base.with_n(point.n).map_err(usage)?;
        let (_, ms) = median_timed(args.runs, || {
            quantize_with(&image, &params, Exec::Sequential)
        });
        let psnr = format!("{:.4}", point.psnr);
        let elapsed = format!("{ms:.4}");
        csv.write_record([point.n.to_string(), psnr.clone(), elapsed.clone()])
            .map_err(write_err)?;
        let _ = writeln!(out, "{}\t{psnr}\t{elapsed}", point.n);
    }
    csv.flush().map_err(|e| io_err(&args.csv, e))?;
    let _ = writeln!(out, "chosen_n: {}", selection.chosen_n);
    Ok(())
}

fn cmd_otsu(args: &OtsuArgs, out: &mut dyn Write) -> CliResult<()> {
    if !(2..=4).contains(&args.classes) {
        return Err(usage(format!(
            "--classes must be 2, 3 or 4, got {}",
            args.classes
        )));
    }
    let image = load(&args.input)?;
    let (outcome, elapsed_ms) = timed(|| {
        let hist = Histogram::from_image_with(&image, Exec::Sequential);
        otsu_multilevel_exhaustive_with(&hist, args.classes - 1, Exec::Sequential)
    });
    let result = outcome.map_err(usage)?;
    let _ = writeln!(out, "thresholds: {}", format_thresholds(&result.thresholds));
    let _ = writeln!(out, "criterion: {:.6}", result.criterion);
    let _ = writeln!(out, "elapsed_ms: {elapsed_ms:.3}");
    if let Some(path) = &args.report {
        let report = OtsuReport {
            input_path: args.input.display().to_string(),
            classes: args.classes,
            thresholds: result.thresholds,
            criterion: result.criterion,
            elapsed_ms,
        };
        write_text(
            path,
            &serde_json::to_string_pretty(&report).expect("report serializes"),
        )?;
    }
    Ok(())
}

/// Expands directories to their `.pgm` entries; the result is sorted and
/// deduplicated.
fn collect_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let entries = std::fs::read_dir(path).map_err(|e| io_err(path, e))?;
            for entry in entries {
                let p = entry.map_err(|e| io_err(path, e))?.path();
                let is_pgm = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
                if is_pgm && p.is_file() {
                    files.push(p);
                }
            }
        } else {
            files.push(path.clone());
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut levels = args.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    let params: Vec<SegmentationParams> = levels
        .iter()
        .map(|&n| args.algorithm.params(n))
        .collect::<CliResult<_>>()?;
    let files = collect_inputs(&args.input)?;
    if files.is_empty() {
        return Err(usage("no input images found"));
    }

    let mut csv = csv_writer(&args.csv)?;
    let write_err = |e: csv::Error| io_err(&args.csv, e);
    csv.write_record([
        "image",
        "width",
        "height",
        "n",
        "effective_n",
        "median_ms",
        "psnr_db",
    ])
    .map_err(write_err)?;
    // Measurements run one at a time so timings do not contend.
    for file in &files {
        let image = load(file)?;
        for p in &params {
            let (outcome, ms) =
                median_timed(args.runs, || quantize_with(&image, p, Exec::Sequential));
            let (result, quantized) = outcome.map_err(usage)?;
            let psnr = Psnr::from_mse(crate::mse(&image, &quantized).map_err(usage)?);
            let row = [
                file.display().to_string(),
                image.width().to_string(),
                image.height().to_string(),
                p.n().to_string(),
                result.effective_n().to_string(),
                format!("{ms:.4}"),
                format!("{psnr:.4}"),
            ];
            let _ = writeln!(out, "{}", row.join("\t"));
            csv.write_record(&row).map_err(write_err)?;
        }
    }
    csv.flush().map_err(|e| io_err(&args.csv, e))?;
    Ok(())
}
