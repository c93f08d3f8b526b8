use clap::{Parser, Subcommand};
use lab::calibration::{self, Budget, Calibration};
use lab::config::ExperimentConfig;
use lab::{experiments, suites, LabError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dyadic-lab", about = "Run experiments and verification suites for dyadic paraproducts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write `<experiment>.csv` and `<experiment>.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Run a verification suite; exits 1 if any assertion fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = calibration::VERIFY_SEED)]
        seed: u64,
        /// Optional path for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Measure the ratio families and write the frozen calibration file.
    Calibrate {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace an existing calibration file.
        #[arg(long)]
        force: bool,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::Run { config, seed, out, calibration: cal_path } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out.or_else(|| cfg.out.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
            let cal = Calibration::load(&cal_path.unwrap_or_else(calibration::default_path)).ok();
            let report = experiments::run(&cfg, cal.as_ref())?;
            let (csv, json) = experiments::write(&report, &dir)?;
            for c in &report.summary.assertions {
                println!("{}", c.line());
            }
            println!("wrote {} and {}", csv.display(), json.display());
            Ok(report.summary.pass)
        }
        Command::Verify { suite, seed, out, calibration: cal_path } => {
            if !suites::SUITES.contains(&suite.as_str()) {
                return Err(LabError::Suite(format!("{suite} (known: {})", suites::SUITES.join(", "))));
            }
            let report = suites::verify(&suite, seed, &cal_path.unwrap_or_else(calibration::default_path))?;
            for c in &report.assertions {
                println!("{}", c.line());
            }
            for c in report.assertions.iter().filter(|c| !c.pass) {
                eprintln!("violated: {}: {}", c.name, c.property);
            }
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_vec_pretty(&report)?)?;
            }
            println!("{}: {}", suite, if report.pass { "pass" } else { "FAIL" });
            Ok(report.pass)
        }
        Command::Calibrate { out, force } => {
            let path = out.unwrap_or_else(calibration::default_path);
            if path.exists() && !force {
                return Err(LabError::Calibration(format!("{} exists; pass --force to recalibrate", path.display())));
            }
            let cal = calibration::calibrate(Budget::default())?;
            std::fs::write(&path, cal.to_toml()?)?;
            println!("wrote {} entries to {}", cal.entries.len(), path.display());
            Ok(true)
        }
    }
}
