//! Subcommand definitions and implementations.
//!
//! Every command follows the same discipline: parse flags, read and validate
//! every input, do the work, and only then write any output file — so a bad
//! invocation or a missing input never leaves partial artifacts behind.
//! Each command is fully deterministic given its flags (randomness only
//! enters through `--seed`), prints a one-line summary to stdout, and leaves
//! the data in files.
//!
//! Exit codes: `0` success, `1` usage error (bad flags, out-of-range values,
//! inconsistent inputs), `2` I/O error (missing or malformed files, write
//! failures), `3` solver diagnostic (numerical failure inside the solver).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tcomp_core::{
    metrics::score, solver::tubal_nn_complete, solver::ttnn_complete, Method, ObservationMask,
    SolverConfig, SolverReport, Tensor3,
};

use crate::data::{
    load_input, random_mask_from, save_image, synthetic_low_rank, DataError, InputKind, MaskMode,
};
use crate::formats::{read_mask, write_mask, write_tensor, FormatError};
use crate::report::{save_report, save_sweep_csv, ReportError, SweepRow};
use crate::rng::SeededRng;

/// Tensor completion toolkit: recover missing entries of images, videos, and
/// third-order tensors from partial observations.
#[derive(Debug, Parser)]
#[command(name = "tcomp", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover the missing entries of a partially observed input.
    Complete(CompleteArgs),
    /// Generate a reproducible random observation mask file.
    Mask(MaskArgs),
    /// Grade a recovery against its ground truth over the missing entries.
    Score(ScoreArgs),
    /// Run the solver across a range of truncation counts and report the best.
    Sweep(SweepArgs),
    /// Generate a synthetic low-tubal-rank ground truth (and optional mask).
    Synth(SynthArgs),
}

/// A failed command, classified for the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> CliError {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> CliError {
        CliError::Io(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> CliError {
        CliError::Io(e.to_string())
    }
}

/// Maps a solver-side failure onto an exit class: configuration complaints
/// are the caller's fault, everything else is a numerical diagnostic.
fn from_core(e: tcomp_core::Error) -> CliError {
    match e {
        tcomp_core::Error::InvalidConfig(_) | tcomp_core::Error::RankOutOfRange { .. } => {
            CliError::Usage(e.to_string())
        }
        tcomp_core::Error::NothingToScore => CliError::Usage(
            "the mask observes every entry; there is nothing to recover or score".into(),
        ),
        other => CliError::Solver(other.to_string()),
    }
}

/// The completion method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    /// Truncated tensor nuclear norm (the main solver).
    Ttnn,
    /// Plain tubal nuclear norm baseline.
    Tubal,
}

impl MethodArg {
    fn run(
        self,
        m: &Tensor3,
        mask: &ObservationMask,
        cfg: &SolverConfig,
    ) -> Result<SolverReport, CliError> {
        match self {
            MethodArg::Ttnn => ttnn_complete(m, mask, cfg).map_err(from_core),
            MethodArg::Tubal => tubal_nn_complete(m, mask, cfg).map_err(from_core),
        }
    }
}

impl std::fmt::Display for MethodArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodArg::Ttnn => Method::Ttnn.fmt(f),
            MethodArg::Tubal => Method::TubalNn.fmt(f),
        }
    }
}

/// Where the data to complete comes from (exactly one must be given).
#[derive(Debug, Args)]
pub struct InputArgs {
    /// 8-bit RGB or grayscale PNG image.
    #[arg(long, value_name = "FILE")]
    pub image: Option<PathBuf>,
    /// TNS1 binary tensor.
    #[arg(long, value_name = "FILE")]
    pub tensor: Option<PathBuf>,
    /// Directory of equally-sized 8-bit grayscale PNG frames.
    #[arg(long, value_name = "DIR")]
    pub frames: Option<PathBuf>,
}

impl InputArgs {
    /// Checks exclusivity and loads the input.
    fn load(&self) -> Result<(Tensor3, InputKind, String), CliError> {
        let given: Vec<&PathBuf> = [&self.image, &self.tensor, &self.frames]
            .into_iter()
            .flatten()
            .collect();
        match given.as_slice() {
            [path] => {
                let (tensor, kind) = load_input(path)?;
                Ok((tensor, kind, path.display().to_string()))
            }
            _ => Err(CliError::Usage(
                "give exactly one of --image, --tensor, or --frames".into(),
            )),
        }
    }
}

/// Where the observation mask comes from: an MSK1 file, or randomly
/// generated loss (exactly one of --mask / --loss must be given).
#[derive(Debug, Args)]
pub struct MaskSourceArgs {
    /// MSK1 mask file saying which entries are observed.
    #[arg(long, value_name = "FILE")]
    pub mask: Option<PathBuf>,
    /// Fraction of the data to drop at random, strictly between 0 and 1.
    #[arg(long, value_name = "FRACTION")]
    pub loss: Option<f64>,
    /// How random loss is applied (default: pixel for images, element for
    /// tensors and frame directories).
    #[arg(long, value_enum, value_name = "MODE")]
    pub mode: Option<MaskMode>,
    /// Seed for mask generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl MaskSourceArgs {
    /// Resolves the mask for data of the given dimensions and kind.
    fn resolve(
        &self,
        dims: (usize, usize, usize),
        kind: InputKind,
    ) -> Result<ObservationMask, CliError> {
        let mask = match (&self.mask, self.loss) {
            (Some(path), None) => {
                if self.mode.is_some() {
                    return Err(CliError::Usage(
                        "--mode only applies when generating a mask with --loss".into(),
                    ));
                }
                read_mask(path)?
            }
            (None, Some(loss)) => {
                let mode = self.mode.unwrap_or_else(|| kind.default_mask_mode());
                random_mask_from(&mut SeededRng::new(self.seed), dims, loss, mode)?
            }
            _ => {
                return Err(CliError::Usage(
                    "give exactly one of --mask or --loss".into(),
                ))
            }
        };
        if mask.dims() != dims {
            let (m1, m2, m3) = mask.dims();
            let (d1, d2, d3) = dims;
            return Err(CliError::Usage(format!(
                "mask dimensions {m1}x{m2}x{m3} do not match input dimensions {d1}x{d2}x{d3}"
            )));
        }
        Ok(mask)
    }
}

/// Solver parameters shared by `complete` and `sweep`; names mirror the
/// configuration fields one-to-one so reports are self-describing.
#[derive(Debug, Args)]
pub struct SolverArgs {
    /// ADMM penalty parameter μ.
    #[arg(long, default_value_t = SolverConfig::default().mu)]
    pub mu: f64,
    /// Outer-loop stop threshold on the change between iterates.
    #[arg(long, default_value_t = SolverConfig::default().outer_eps)]
    pub outer_eps: f64,
    /// Maximum number of outer iterations.
    #[arg(long, default_value_t = SolverConfig::default().outer_max)]
    pub outer_max: usize,
    /// Inner-loop stop threshold (relative to the observed data norm).
    #[arg(long, default_value_t = SolverConfig::default().inner_eps)]
    pub inner_eps: f64,
    /// Maximum inner iterations per outer step.
    #[arg(long, default_value_t = SolverConfig::default().inner_max)]
    pub inner_max: usize,
}

impl SolverArgs {
    fn to_config(&self, r: usize) -> SolverConfig {
        SolverConfig {
            r,
            mu: self.mu,
            outer_eps: self.outer_eps,
            outer_max: self.outer_max,
            inner_eps: self.inner_eps,
            inner_max: self.inner_max,
        }
    }
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mask_source: MaskSourceArgs,
    /// Completion method.
    #[arg(long, value_enum, default_value_t = MethodArg::Ttnn)]
    pub method: MethodArg,
    /// Number of leading singular values excluded from shrinkage.
    #[arg(long, default_value_t = SolverConfig::default().r)]
    pub r: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output for the recovery: .png (quantized) or .tns (raw values).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Report path (default: the output path with extension `txt`); a
    /// residual-history CSV lands next to it with extension `csv`.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Also write the observation mask that was used (MSK1).
    #[arg(long, value_name = "FILE")]
    pub mask_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaskArgs {
    /// Dimensions of the mask as `N1,N2,N3` (e.g. 64,64,3).
    #[arg(long, value_name = "N1,N2,N3", value_parser = parse_dims)]
    pub dims: Option<(usize, usize, usize)>,
    /// Take the dimensions (and default mode) from an existing input.
    #[arg(long, value_name = "PATH")]
    pub like: Option<PathBuf>,
    /// Fraction of the data to drop at random, strictly between 0 and 1.
    #[arg(long, value_name = "FRACTION")]
    pub loss: f64,
    /// How random loss is applied (default: element, or pixel when --like
    /// names an image).
    #[arg(long, value_enum, value_name = "MODE")]
    pub mode: Option<MaskMode>,
    /// Seed for mask generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output MSK1 path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Ground truth (.png, .tns, or a directory of frames).
    #[arg(long, value_name = "PATH")]
    pub truth: PathBuf,
    /// Recovered data to grade (.png, .tns, or a directory of frames).
    #[arg(long, value_name = "PATH")]
    pub recovered: PathBuf,
    /// MSK1 mask saying which entries the solver observed.
    #[arg(long, value_name = "FILE")]
    pub mask: PathBuf,
    /// Optional path for a small `key = value` score file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mask_source: MaskSourceArgs,
    /// Completion method.
    #[arg(long, value_enum, default_value_t = MethodArg::Ttnn)]
    pub method: MethodArg,
    /// Smallest truncation count to try.
    #[arg(long, default_value_t = 1)]
    pub r_min: usize,
    /// Largest truncation count to try.
    #[arg(long)]
    pub r_max: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output CSV path (`r,psnr,outer_iters,inner_iters`).
    #[arg(long, value_name = "FILE")]
    pub out_csv: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Dimensions of the generated tensor as `N1,N2,N3`.
    #[arg(long, value_name = "N1,N2,N3", value_parser = parse_dims)]
    pub dims: (usize, usize, usize),
    /// Tubal rank of the generated truth.
    #[arg(long)]
    pub rank: usize,
    /// Seed for factor (and mask) generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output TNS1 path for the ground truth.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Also generate an observation mask here (MSK1); needs --loss.
    #[arg(long, value_name = "FILE", requires = "loss")]
    pub mask_out: Option<PathBuf>,
    /// Loss fraction for the generated mask.
    #[arg(long, value_name = "FRACTION", requires = "mask_out")]
    pub loss: Option<f64>,
    /// Loss mode for the generated mask (default: element).
    #[arg(long, value_enum, value_name = "MODE", requires = "mask_out")]
    pub mode: Option<MaskMode>,
}

/// Parses `N1,N2,N3` into a dimension triple.
fn parse_dims(raw: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = raw.split(',').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated sizes, got {raw:?}"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{s:?} is not a positive size"))
    };
    Ok((parse(a)?, parse(b)?, parse(c)?))
}

/// Runs a parsed command line; returns the one-line stdout summary.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Complete(args) => cmd_complete(args),
        Command::Mask(args) => cmd_mask(args),
        Command::Score(args) => cmd_score(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

/// Writes a recovery to `path`, choosing the format by extension.
fn write_recovery(path: &Path, recovered: &Tensor3) -> Result<(), CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("png") => Ok(save_image(path, recovered)?),
        Some(ext) if ext.eq_ignore_ascii_case("tns") => Ok(write_tensor(path, recovered)?),
        _ => Err(CliError::Usage(format!(
            "{}: output must end in .png or .tns",
            path.display()
        ))),
    }
}

fn cmd_complete(args: CompleteArgs) -> Result<String, CliError> {
    let (truth, kind, _) = args.input.load()?;
    let mask = args.mask_source.resolve(truth.dims(), kind)?;
    // Refuse the output path up front so a long solve cannot end in a usage
    // error.
    let out_ext = args.out.extension().and_then(|e| e.to_str());
    if !matches!(out_ext, Some(ext) if ext.eq_ignore_ascii_case("png") || ext.eq_ignore_ascii_case("tns"))
    {
        return Err(CliError::Usage(format!(
            "{}: output must end in .png or .tns",
            args.out.display()
        )));
    }

    let cfg = args.solver.to_config(args.r);
    let report = args.method.run(&truth, &mask, &cfg)?;
    let quality = score(&report.recovered, &truth, &mask).map_err(from_core)?;

    write_recovery(&args.out, &report.recovered)?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.with_extension("txt"));
    save_report(&report, &quality, args.mask_source.seed, &report_path)?;
    if let Some(mask_out) = &args.mask_out {
        write_mask(mask_out, &mask)?;
    }

    Ok(format!(
        "complete: method={} r={} psnr={} outer={} inner={} -> {} (report {})",
        args.method,
        cfg.r,
        quality.psnr,
        report.outer_iterations,
        report.total_inner_iterations,
        args.out.display(),
        report_path.display()
    ))
}

fn cmd_mask(args: MaskArgs) -> Result<String, CliError> {
    let (dims, default_mode) = match (args.dims, &args.like) {
        (Some(dims), None) => (dims, MaskMode::Element),
        (None, Some(path)) => {
            let (tensor, kind) = load_input(path)?;
            (tensor.dims(), kind.default_mask_mode())
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --dims or --like".into(),
            ))
        }
    };
    let mode = args.mode.unwrap_or(default_mode);
    let mask = random_mask_from(&mut SeededRng::new(args.seed), dims, args.loss, mode)?;
    write_mask(&args.out, &mask)?;
    let (n1, n2, n3) = dims;
    Ok(format!(
        "mask: dims={n1}x{n2}x{n3} mode={mode} seed={} missing={}/{} -> {}",
        args.seed,
        mask.missing_count(),
        n1 * n2 * n3,
        args.out.display()
    ))
}

fn cmd_score(args: ScoreArgs) -> Result<String, CliError> {
    let (truth, _) = load_input(&args.truth)?;
    let (recovered, _) = load_input(&args.recovered)?;
    let mask = read_mask(&args.mask)?;
    if recovered.dims() != truth.dims() || truth.dims() != mask.dims() {
        return Err(CliError::Usage(format!(
            "shape mismatch: truth {:?}, recovered {:?}, mask {:?}",
            truth.dims(),
            recovered.dims(),
            mask.dims()
        )));
    }
    let quality = score(&recovered, &truth, &mask).map_err(from_core)?;

    if let Some(out) = &args.out {
        let text = format!(
            "mse = {}\npsnr = {}\nmissing = {}\n",
            quality.mse, quality.psnr, quality.missing_count
        );
        std::fs::write(out, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    }
    Ok(format!(
        "score: mse={} psnr={} missing={}",
        quality.mse, quality.psnr, quality.missing_count
    ))
}

fn cmd_sweep(args: SweepArgs) -> Result<String, CliError> {
    let (truth, kind, _) = args.input.load()?;
    let mask = args.mask_source.resolve(truth.dims(), kind)?;
    let (n1, n2, _) = truth.dims();
    if args.r_min == 0 || args.r_min > args.r_max {
        return Err(CliError::Usage(format!(
            "need 1 <= r-min <= r-max, got r-min={} r-max={}",
            args.r_min, args.r_max
        )));
    }
    if args.r_max > n1.min(n2) {
        return Err(CliError::Usage(format!(
            "r-max={} exceeds min(n1, n2) = {}",
            args.r_max,
            n1.min(n2)
        )));
    }

    let mut rows = Vec::with_capacity(args.r_max - args.r_min + 1);
    let mut best: Option<&SweepRow> = None;
    for r in args.r_min..=args.r_max {
        let cfg = args.solver.to_config(r);
        let report = args.method.run(&truth, &mask, &cfg)?;
        let quality = score(&report.recovered, &truth, &mask).map_err(from_core)?;
        log::info!(
            "sweep r={r}: psnr={} outer={} inner={}",
            quality.psnr,
            report.outer_iterations,
            report.total_inner_iterations
        );
        rows.push(SweepRow {
            r,
            psnr: quality.psnr,
            outer_iters: report.outer_iterations,
            inner_iters: report.total_inner_iterations,
        });
    }
    for row in &rows {
        // Strictly-greater keeps the smallest r on ties.
        if best.is_none_or(|b| row.psnr > b.psnr) {
            best = Some(row);
        }
    }
    let best = best.expect("range is non-empty");
    save_sweep_csv(&args.out_csv, &rows)?;
    Ok(format!(
        "sweep: best r={} psnr={} rows={} -> {}",
        best.r,
        best.psnr,
        rows.len(),
        args.out_csv.display()
    ))
}

fn cmd_synth(args: SynthArgs) -> Result<String, CliError> {
    let mut rng = SeededRng::new(args.seed);
    let truth = synthetic_low_rank(args.dims, args.rank, &mut rng)?;
    let mask = match (args.mask_out.as_ref(), args.loss) {
        (Some(_), Some(loss)) => {
            let mode = args.mode.unwrap_or(MaskMode::Element);
            Some(random_mask_from(&mut rng, args.dims, loss, mode)?)
        }
        _ => None,
    };

    write_tensor(&args.out, &truth)?;
    let mut summary = format!(
        "synth: dims={}x{}x{} rank={} seed={} -> {}",
        args.dims.0,
        args.dims.1,
        args.dims.2,
        args.rank,
        args.seed,
        args.out.display()
    );
    if let (Some(mask), Some(path)) = (mask, args.mask_out.as_ref()) {
        write_mask(path, &mask)?;
        summary.push_str(&format!(
            " (mask missing={} -> {})",
            mask.missing_count(),
            path.display()
        ));
    }
    Ok(summary)
}
