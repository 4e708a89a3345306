//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 concept cap exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fca::{concept_summary, contranominal_scale, fca_profile, nominal_scale, FormalContext, DEFAULT_CONCEPT_CAP};
use crate::io::{
    emit_profile_csv, emit_report_json, parse_csv_context, parse_cxt, parse_point_csv, InputSpec, RunConfig,
    ScaleKind,
};
use crate::metric::{
    chavez_id, levy_defect_distance, obs_diam_distance_with, scaling_study, MetricKind, StudyKind, SweepOptions,
};
use crate::profile::{delta, ObsDiamProfile};
use crate::report::{rational_to_f64, ChavezId, DimensionReport, ExactDimension};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "obsdim", version, about = "Intrinsic dimension from observable-diameter profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Point cloud from a CSV file, using distance features.
    Points {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
        metric: MetricArg,
        /// Keep raw distances instead of rescaling to unit diameter.
        #[arg(long)]
        no_normalize: bool,
        /// Also report the Chavez intrinsic dimension.
        #[arg(long)]
        chavez: bool,
        /// Leave self-pairs out of the Chavez statistics.
        #[arg(long)]
        chavez_exclude_diagonal: bool,
        /// Also report the Lévy concentration defect.
        #[arg(long)]
        levy: bool,
        #[arg(long)]
        profile_out: Option<PathBuf>,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Formal context from a Burmeister .cxt or CSV file.
    Context {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Option<ContextFormat>,
        #[arg(long, default_value_t = DEFAULT_CONCEPT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        #[arg(long)]
        profile_out: Option<PathBuf>,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Built-in nominal or contranominal scale.
    Scale {
        #[arg(long, value_enum)]
        kind: ScaleArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_CONCEPT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        #[arg(long)]
        profile_out: Option<PathBuf>,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Δ of sampled spheres or hypercubes across dimensions, as CSV.
    Study {
        #[arg(value_enum)]
        kind: StudyArg,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1500)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    GeodesicSphere,
    NormalizedHamming,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => MetricKind::Euclidean,
            MetricArg::GeodesicSphere => MetricKind::GeodesicSphere,
            MetricArg::NormalizedHamming => MetricKind::NormalizedHamming,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ContextFormat {
    Cxt,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Nominal,
    Contranominal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StudyArg {
    Sphere,
    Hypercube,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match run(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Overflow { .. } => EXIT_OVERFLOW,
                _ => EXIT_DATA,
            }
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

fn deliver(contents: &str, target: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match target {
        Some(path) => write_output(path, contents),
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|e| Error::invalid(format!("cannot write output: {e}"))),
    }
}

fn run(command: Command, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Points {
            file,
            metric,
            no_normalize,
            chavez,
            chavez_exclude_diagonal,
            levy,
            profile_out,
            report_out,
        } => {
            let mut config = RunConfig::new(InputSpec::PointsCsv(file.clone()));
            config.metric = metric.into();
            config.normalize = !no_normalize;
            config.chavez = chavez;
            config.chavez_include_diagonal = !chavez_exclude_diagonal;
            config.levy = levy;
            config.profile_out = profile_out;
            config.report_out = report_out;
            let bytes = read_input(&file)?;
            let (report, profile) = run_points(&bytes, &config)?;
            finish(&report, &profile, &config, stdout)?;
            Ok(())
        }
        Command::Context {
            file,
            format,
            cap,
            profile_out,
            report_out,
        } => {
            let format = format.unwrap_or_else(|| {
                let is_csv = file
                    .extension()
                    .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
                if is_csv {
                    ContextFormat::Csv
                } else {
                    ContextFormat::Cxt
                }
            });
            let input = match format {
                ContextFormat::Cxt => InputSpec::ContextCxt(file.clone()),
                ContextFormat::Csv => InputSpec::ContextCsv(file.clone()),
            };
            let mut config = RunConfig::new(input);
            config.concept_cap = cap;
            config.profile_out = profile_out;
            config.report_out = report_out;
            let bytes = read_input(&file)?;
            let ctx = match format {
                ContextFormat::Cxt => parse_cxt(&bytes)?,
                ContextFormat::Csv => parse_csv_context(&bytes)?,
            };
            let (report, profile) = run_context(&ctx, cap)?;
            finish(&report, &profile, &config, stdout)?;
            Ok(())
        }
        Command::Scale {
            kind,
            n,
            cap,
            profile_out,
            report_out,
        } => {
            let kind = match kind {
                ScaleArg::Nominal => ScaleKind::Nominal,
                ScaleArg::Contranominal => ScaleKind::Contranominal,
            };
            let n = usize::try_from(n).map_err(|_| Failure::Usage(format!("scale size {n} too large")))?;
            let mut config = RunConfig::new(InputSpec::BuiltinScale { kind, n });
            config.concept_cap = cap;
            config.profile_out = profile_out;
            config.report_out = report_out;
            let ctx = match kind {
                ScaleKind::Nominal => nominal_scale(n)?,
                ScaleKind::Contranominal => contranominal_scale(n)?,
            };
            let (report, profile) = run_context(&ctx, cap)?;
            finish(&report, &profile, &config, stdout)?;
            Ok(())
        }
        Command::Study {
            kind,
            dims,
            count,
            seed,
            out,
        } => {
            if dims.is_empty() || dims.contains(&0) {
                return Err(Failure::Usage("--dims needs positive dimensions".into()));
            }
            if count == 0 {
                return Err(Failure::Usage("--count must be positive".into()));
            }
            let kind = match kind {
                StudyArg::Sphere => StudyKind::Sphere,
                StudyArg::Hypercube => StudyKind::Hypercube,
            };
            let rows = scaling_study(kind, &dims, count, seed, &SweepOptions::default())?;
            let mut csv = String::from("n,delta,sqrt_n_delta,intrinsic_dimension\n");
            for r in rows {
                let dim = if r.dimension.is_infinite() {
                    "inf".to_string()
                } else {
                    r.dimension.to_string()
                };
                let _ = writeln!(csv, "{},{},{},{}", r.dim, r.delta, r.sqrt_n_delta, dim);
            }
            deliver(&csv, out.as_deref(), stdout)?;
            Ok(())
        }
    }
}

/// Distance-feature pipeline for a point CSV.
pub fn run_points(bytes: &[u8], config: &RunConfig) -> Result<(DimensionReport, ObsDiamProfile)> {
    let cloud = parse_point_csv(bytes)?;
    let opts = SweepOptions::default();
    let raw = obs_diam_distance_with(&cloud, config.metric, &opts)?;
    // For distance features ObsDiam at alpha = 0 is the diameter.
    let diameter = raw.values()[0];
    let factor = if config.normalize && diameter > 0.0 {
        1.0 / diameter
    } else {
        1.0
    };
    let profile = if factor == 1.0 { raw } else { raw.scaled(factor) };
    let mut report = DimensionReport::from_delta(delta(&profile), cloud.len(), cloud.len())?;
    if config.chavez {
        report.chavez_id = Some(if cloud.len() < 2 {
            ChavezId::Undefined
        } else {
            chavez_id(&cloud, config.metric, config.chavez_include_diagonal)?
        });
    }
    if config.levy {
        report.levy_defect = Some(levy_defect_distance(&cloud, config.metric, factor, &opts)?);
    }
    Ok((report, profile))
}

/// Exact concept pipeline for a formal context.
pub fn run_context(ctx: &FormalContext, cap: u64) -> Result<(DimensionReport, ObsDiamProfile)> {
    let summary = concept_summary(ctx, cap)?;
    let exact_profile = fca_profile(&summary, ctx.n_objects(), ctx.n_attributes());
    let exact = ExactDimension::from_delta(delta(&exact_profile));
    let report = DimensionReport::from_exact(exact, ctx.n_attributes(), summary.total() as usize)?;
    Ok((report, to_float_profile(&exact_profile)?))
}

fn to_float_profile(p: &ObsDiamProfile<BigRational>) -> Result<ObsDiamProfile> {
    ObsDiamProfile::new(
        p.breakpoints().iter().map(rational_to_f64).collect(),
        p.values().iter().map(rational_to_f64).collect(),
    )
}

fn finish(
    report: &DimensionReport,
    profile: &ObsDiamProfile,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> Result<()> {
    if let Some(path) = &config.profile_out {
        write_output(path, &emit_profile_csv(profile))?;
    }
    deliver(&emit_report_json(report, config), config.report_out.as_deref(), stdout)
}
