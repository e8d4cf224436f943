use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fsr_cli::config::sweep_spec;
use fsr_cli::render::{read_records, write_aggregate};
use fsr_cli::{aggregate, run_experiment, run_sweep, CliError, ExperimentConfig, RawConfig};

#[derive(Parser)]
#[command(name = "fsr", version, about = "Fourier-space and real-space readout experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration at every seed.
    Run(ConfigArgs),
    /// Run a configuration across values of one axis and fit the error slope.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// m | n-shot | n
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated ascending values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Aggregate run CSVs into mean ± std per sweep point.
    RenderData {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output CSV; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    margin: Option<String>,
    #[arg(long)]
    n_shot: Option<String>,
    #[arg(long)]
    n_shot1: Option<String>,
    #[arg(long)]
    n_shot2: Option<String>,
    #[arg(long)]
    n_iter: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    name: Option<String>,
    /// Output directory (default: $FSR_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<String>,
    /// Use exact outcome probabilities instead of shots.
    #[arg(long)]
    statevector: bool,
}

impl ConfigArgs {
    fn raw(&self) -> Result<RawConfig, CliError> {
        let mut raw = match &self.config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        let flags = [
            ("function", &self.function),
            ("method", &self.method),
            ("n", &self.n),
            ("m", &self.m),
            ("margin", &self.margin),
            ("n-shot", &self.n_shot),
            ("n-shot1", &self.n_shot1),
            ("n-shot2", &self.n_shot2),
            ("n-iter", &self.n_iter),
            ("delta", &self.delta),
            ("seeds", &self.seeds),
            ("points", &self.points),
            ("threads", &self.threads),
            ("name", &self.name),
            ("out-dir", &self.out),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                raw.set(k, v)?;
            }
        }
        if self.statevector {
            raw.set("statevector", "true")?;
        }
        for pair in &self.set {
            raw.set_pair(pair)?;
        }
        Ok(raw)
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = ExperimentConfig::resolve(&args.raw()?)?;
            let out = run_experiment(&cfg)?;
            out.write_all("run")?;
            for o in &out.rows {
                log::info!("seed {}: rmse {:.3e}", o.record.seed, o.record.rmse);
            }
            println!("{}", cfg.csv_path().display());
        }
        Command::Sweep { config, axis, values } => {
            let mut raw = config.raw()?;
            if let Some(a) = axis {
                raw.set("axis", &a)?;
            }
            if let Some(v) = values {
                raw.set("values", &v)?;
            }
            let cfg = ExperimentConfig::resolve(&raw)?;
            let (axis, values) = sweep_spec(&raw)?;
            let out = run_sweep(&cfg, axis, &values)?;
            out.write_all("sweep")?;
            if let Some(s) = out.slope {
                println!("slope {s:.4}");
            }
            println!("{}", cfg.csv_path().display());
        }
        Command::RenderData { inputs, out } => {
            let mut records = Vec::new();
            for p in &inputs {
                records.extend(read_records(p)?);
            }
            let rows = aggregate(&records)?;
            match out {
                Some(p) => write_aggregate(&rows, std::fs::File::create(p)?)?,
                None => write_aggregate(&rows, std::io::stdout().lock())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
