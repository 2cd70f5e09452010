use std::path::PathBuf;
use std::process::ExitCode;

use cellmorph_cli::config::{load_config_file, RunConfig};
use cellmorph_cli::{run_batch, ConfigError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cellmorph", about = "Morphometry of segmented cell images", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a dataset of label masks and write CSV/SVG reports.
    Analyze(AnalyzeArgs),
    /// Check a configuration file and print the resolved settings.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the version.
    Version,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Dataset root with one folder per group.
    #[arg(long)]
    root: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pixel pitch in µm.
    #[arg(long)]
    pitch: Option<f64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Reject labels split into several components.
    #[arg(long)]
    strict_labels: bool,
    /// Minimum subject size in pixels.
    #[arg(long)]
    min_size: Option<usize>,
    /// CSV manifest listing images instead of folder discovery.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn resolve(args: AnalyzeArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => load_config_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.root {
        cfg.root = v;
    }
    if let Some(v) = args.out {
        cfg.out = v;
    }
    if let Some(v) = args.pitch {
        cfg.pitch = v;
    }
    if let Some(v) = args.jobs {
        cfg.jobs = v;
    }
    if args.strict_labels {
        cfg.strict_labels = true;
    }
    if let Some(v) = args.min_size {
        cfg.min_size = v;
    }
    if let Some(v) = args.manifest {
        cfg.manifest = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("cellmorph {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load_config_file(&config).and_then(|c| c.validate().map(|_| c)) {
            Ok(cfg) => {
                print!("{}", cfg.to_text());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Analyze(args) => {
            let cfg = match resolve(args) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match run_batch(&cfg) {
                Ok(report) => {
                    for w in &report.warnings {
                        eprintln!("warning: {w}");
                    }
                    eprintln!(
                        "processed {} image(s), skipped {}, {} warning(s); reports in {}",
                        report.images_processed,
                        report.images_skipped,
                        report.warnings.len(),
                        report.out.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
