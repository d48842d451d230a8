//! Argument parsing and dispatch. Flags override the config file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{CurveSource, ExperimentConfig, ExperimentKind, FamilyKind, FieldFormat};
use crate::exec::Pool;
use crate::random::RandomFamily;
use crate::{commands, CliError};

#[derive(Debug, Parser)]
#[command(name = "torsionlab", version, about = "Torsion, decompositions and extension operators for polynomial curves")]
pub struct Cli {
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; reports go to stdout without it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Reduced sample counts and grids.
    #[arg(long, global = true)]
    pub quick: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Torsion, profile, decomposition pieces and dyadic level sets.
    Analyze(AnalyzeArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
    /// Best norm ratios over a random curve family.
    Sweep(SweepArgs),
    /// Dump an extension field.
    Field(FieldArgs),
    /// Exponent table on the scaling line.
    Exponents(ExponentArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Components, comma separated, e.g. `t,t^2,t^4`.
    #[arg(long, value_delimiter = ',')]
    pub curve: Option<Vec<String>>,
    /// JSON curve file.
    #[arg(long, conflicts_with = "curve")]
    pub curve_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Quadrature nodes on the support.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Parameter interval `lo,hi`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub support: Option<Vec<f64>>,
    /// Use `F_γ` (plain `dt`) instead of the affine arclength measure.
    #[arg(long)]
    pub unweighted: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub level_min: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    pub level_max: Option<i32>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// algebra, decompose, geometric, oscillatory, exponents or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Random curves in the geometric ratio scan.
    #[arg(long)]
    pub curves: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub coeff_box: Option<f64>,
    /// Scale factor for all but the first component.
    #[arg(long)]
    pub near_degenerate: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma separated rationals, e.g. `2,7/2,4`.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Indicator,
    Both,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
    Both,
}

fn apply_curve(config: &mut ExperimentConfig, args: &CurveArgs) {
    if let Some(c) = &args.curve {
        config.curve = Some(CurveSource::Exprs(c.iter().map(|s| s.trim().to_string()).collect()));
    }
    if let Some(p) = &args.curve_file {
        config.curve = Some(CurveSource::Path(p.clone()));
    }
}

fn apply_grid(config: &mut ExperimentConfig, args: &GridArgs) -> Result<(), CliError> {
    let g = &mut config.grid;
    if let Some(v) = args.half_width {
        g.half_width = v;
    }
    if let Some(v) = args.resolution {
        g.resolution = v;
    }
    if let Some(v) = args.nodes {
        g.nodes = v;
    }
    if let Some(v) = &args.support {
        let &[lo, hi] = v.as_slice() else {
            return Err(CliError::usage("--support takes two numbers, lo,hi"));
        };
        g.support = [lo, hi];
    }
    if args.unweighted {
        g.weighted = false;
    }
    Ok(())
}

/// The effective config: file contents overridden by flags.
pub fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if cli.quick {
        config.quick = true;
    }
    if let Some(out) = &cli.out {
        config.output.dir = Some(out.clone());
    }
    let kind = match &cli.command {
        Command::Analyze(a) => {
            apply_curve(&mut config, &a.curve);
            if let Some(n) = a.level_min {
                config.levels.min = n;
            }
            if let Some(n) = a.level_max {
                config.levels.max = n;
            }
            ExperimentKind::Analyze
        }
        Command::Verify(a) => {
            if let Some(s) = &a.suite {
                config.verify.suite = s.clone();
            }
            if let Some(n) = a.curves {
                config.verify.curves = n;
            }
            if config.seed.is_none() {
                config.seed = Some(commands::DEFAULT_VERIFY_SEED);
            }
            ExperimentKind::Verify
        }
        Command::Sweep(a) => {
            let mut fam = match config.curve.take() {
                Some(CurveSource::Random(f)) => f,
                _ => RandomFamily { dim: 2, degree: 4, coeff_box: 1.0, count: 20, seed: None, near_degenerate: None },
            };
            if let Some(v) = a.dim {
                fam.dim = v;
            }
            if let Some(v) = a.degree {
                fam.degree = v;
            }
            if let Some(v) = a.count {
                fam.count = v;
            }
            if let Some(v) = a.coeff_box {
                fam.coeff_box = v;
            }
            if a.near_degenerate.is_some() {
                fam.near_degenerate = a.near_degenerate;
            }
            config.curve = Some(CurveSource::Random(fam));
            let s = &mut config.search;
            if let Some(v) = a.p {
                s.p = v;
            }
            if let Some(v) = a.q {
                s.q = v;
            }
            if let Some(v) = a.budget {
                s.budget = v;
            }
            if let Some(f) = a.family {
                s.family = match f {
                    FamilyArg::Gaussian => FamilyKind::Gaussian,
                    FamilyArg::Indicator => FamilyKind::Indicator,
                    FamilyArg::Both => FamilyKind::Both,
                };
            }
            apply_grid(&mut config, &a.grid)?;
            ExperimentKind::Sweep
        }
        Command::Field(a) => {
            apply_curve(&mut config, &a.curve);
            apply_grid(&mut config, &a.grid)?;
            if let Some(f) = a.format {
                config.output.format = match f {
                    FormatArg::Csv => FieldFormat::Csv,
                    FormatArg::Binary => FieldFormat::Binary,
                    FormatArg::Both => FieldFormat::Both,
                };
            }
            ExperimentKind::Field
        }
        Command::Exponents(a) => {
            if let Some(d) = a.dim {
                config.exponents.dim = d;
            }
            if let Some(q) = &a.q {
                config.exponents.q = q.iter().map(|s| s.trim().to_string()).collect();
            }
            ExperimentKind::Exponents
        }
    };
    if config.kind.is_some_and(|k| k != kind) {
        return Err(CliError::usage(format!("config is for {:?}, not this command", config.kind.unwrap())));
    }
    config.kind = Some(kind);
    config.validate()?;
    Ok(config)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = effective_config(cli)?;
    let pool = || Pool::from_env().map_err(|e| CliError::usage(e.to_string()));
    match &cli.command {
        Command::Analyze(_) => commands::analyze(&config).map(drop),
        Command::Verify(_) => commands::verify(&config, &pool()?).map(drop),
        Command::Sweep(_) => commands::sweep(&config, &pool()?).map(drop),
        Command::Field(_) => commands::field(&config, &pool()?).map(drop),
        Command::Exponents(_) => commands::exponents(&config),
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { crate::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
