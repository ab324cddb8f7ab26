use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pathot::experiment::{
    exit_code, report_json, run_experiment, sample_transcript, sweep, to_csv, Attack, ExperimentConfig, SweepSpec,
};
use pathot::{Error, Result};

/// Oblivious transfer across a network of link-OT channels.
#[derive(Parser)]
#[command(name = "pathot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its security report as JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// claim2, collude, tamper or reduction.
        #[arg(long)]
        attack: Option<String>,
        /// Also write one execution's transcript as JSON lines.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Run a grid of experiments and write one CSV row each.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    ExperimentConfig::from_json(&text)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(
    config: &PathBuf,
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    attack: Option<String>,
    transcript: Option<PathBuf>,
) -> Result<i32> {
    let mut cfg = load_config(config)?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(a) = attack {
        cfg.attack = Some(Attack::parse(&a).ok_or_else(|| Error::config("--attack", format!("unknown attack {a:?}")))?);
    }
    if let Some(path) = transcript {
        sample_transcript(&cfg)?.write_jsonl(BufWriter::new(File::create(path)?))?;
    }
    let result = run_experiment(&cfg);
    let code = exit_code(&result);
    let report = result?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    emit(out.or(cfg.out.as_ref().map(PathBuf::from)).as_ref(), &report_json(&report)?)?;
    Ok(code)
}

fn run_sweep(config: &PathBuf, spec: &PathBuf, out: Option<PathBuf>) -> Result<i32> {
    let cfg = load_config(config)?;
    let text = fs::read_to_string(spec).map_err(|e| Error::config(spec.display().to_string(), e.to_string()))?;
    let reports = sweep(&cfg, &SweepSpec::from_json(&text)?)?;
    emit(out.as_ref(), &to_csv(&reports))?;
    Ok(if reports.iter().all(|r| r.is_clean()) { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, trials, seed, out, attack, transcript } => run(&config, trials, seed, out, attack, transcript),
        Command::Sweep { config, sweep, out } => run_sweep(&config, &sweep, out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
