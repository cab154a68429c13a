use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entropy_core::harness::{run, ExperimentConfig, ExperimentKind, OutputFormat};
use entropy_core::Error;

#[derive(Parser)]
#[command(name = "entropy-lab", version, about = "Entropy-number and discretization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case WCGA residual against m on octahedron samples.
    SigmaDecay(Common),
    /// Entropy profile of the l_p ball in l_inf.
    BallEntropy(Common),
    /// Entropy sums of the octahedron versus the dual ball in the U-norm.
    DualityCheck(Common),
    /// Nikol'skii constant from the direct and the dual problem, per point.
    MpDuality(Common),
    /// Entropy of the L_p ball of a subspace in L_inf on a point set.
    It1(Common),
    /// Entropy profile of the octahedron of a dictionary.
    It2Octahedron(Common),
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Common {
    /// TOML (.toml) or JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Data file to write; the summary goes to `<out>.summary.txt`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Comma-separated, e.g. 4,8,16.
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    weakness: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    subspace_file: Option<PathBuf>,
    #[arg(long)]
    points_file: Option<PathBuf>,
}

impl Common {
    fn overrides(&self, kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            experiment: Some(kind),
            seed: self.seed,
            q: self.q,
            p: self.p,
            n: self.n,
            dim: self.dim,
            s: self.s,
            k_list: self.k_list.clone(),
            m_list: self.m_list.clone(),
            m: self.m,
            samples: self.samples,
            weakness: self.weakness,
            tolerance: self.tolerance,
            subspace_file: self.subspace_file.clone(),
            points_file: self.points_file.clone(),
            output: self.out.clone(),
            format: self.format,
            ..Default::default()
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } => 2,
        Error::PropertyViolation(_) => 3,
        _ => 1,
    }
}

fn execute(kind: ExperimentKind, args: &Common) -> Result<bool, Error> {
    let base = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(other) = base.experiment.filter(|&k| k != kind) {
        return Err(Error::Validation(vec![format!(
            "experiment: config names `{}` but the subcommand is `{}`",
            other.name(),
            kind.name()
        )]));
    }
    let config = base.merge(&args.overrides(kind));
    let report = run(&config)?;
    let format = report.config.format.unwrap_or_default();
    let out = report.config.output.clone().unwrap_or_else(|| {
        let ext = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        PathBuf::from(format!("{}.{ext}", kind.name()))
    });
    let written = report.write(&out, format)?;
    print!("{}", report.summary_text());
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(report.is_ok())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::SigmaDecay(a) => (ExperimentKind::SigmaDecay, a),
        Command::BallEntropy(a) => (ExperimentKind::BallEntropy, a),
        Command::DualityCheck(a) => (ExperimentKind::DualityCheck, a),
        Command::MpDuality(a) => (ExperimentKind::MpDuality, a),
        Command::It1(a) => (ExperimentKind::It1, a),
        Command::It2Octahedron(a) => (ExperimentKind::It2Octahedron, a),
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("property violation; see the summary above");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
