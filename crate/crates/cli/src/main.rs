use annulus_lab::config::{Command, ConfigError, ExperimentConfig};
use annulus_lab::plot::{emit_plot_data, PlotKind};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    version,
    about = "Run annulus-core experiments from JSON configurations"
)]
struct Args {
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for result.json and plot data; the result goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; ANNULUS_LAB_THREADS takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    /// CSV plot data to write next to the result.
    #[arg(long = "plot", value_enum)]
    plots: Vec<PlotKind>,
}

fn threads(args: &Args) -> Result<Option<usize>, ConfigError> {
    match std::env::var("ANNULUS_LAB_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ConfigError(format!("ANNULUS_LAB_THREADS: not a thread count: {v:?}"))),
        Err(_) => Ok(args.threads),
    }
}

fn load(args: &Args) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| ConfigError(format!("{}: {e}", args.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if config.command != args.command {
        return Err(ConfigError(format!(
            "config is for {}, not {}",
            config.command.name(),
            args.command.name()
        )));
    }
    if let Some(seed) = args.seed {
        config = config.with_seed(seed)?;
    }
    for kind in &args.plots {
        if !kind.supports(&config.parameters) {
            return Err(ConfigError(format!(
                "plot kind {} is not available for this {} run",
                kind.name(),
                config.command.name()
            )));
        }
    }
    if !args.plots.is_empty() && args.out.is_none() {
        return Err(ConfigError("--plot needs --out".into()));
    }
    Ok(config)
}

fn run(args: Args) -> Result<u8, Box<dyn std::error::Error>> {
    if let Some(n) = threads(&args)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let config = load(&args)?;
    let doc = annulus_lab::execute(config);
    let json = serde_json::to_string_pretty(&doc)?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("result.json"), json + "\n")?;
            for &kind in &args.plots {
                emit_plot_data(&doc, kind, dir)?;
            }
        }
        None => println!("{json}"),
    }
    if let Some(e) = &doc.error {
        eprintln!("annulus-lab: {}: {}", e.kind, e.message);
    }
    Ok(doc.exit_code as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("annulus-lab: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
