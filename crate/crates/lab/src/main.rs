use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cusp_core::RealSpec;
use cusp_lab::config::{Command, ExperimentConfig};
use cusp_lab::experiment::{build_all, calibrate};
use cusp_lab::output::write_outcome;
use cusp_lab::LabError;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Expand,
    Rates,
    Stats,
    Levy,
    Loglaw,
    Zonal,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Expand => Command::Expand,
            Cmd::Rates => Command::Rates,
            Cmd::Stats => Command::Stats,
            Cmd::Levy => Command::Levy,
            Cmd::Loglaw => Command::Loglaw,
            Cmd::Zonal => Command::Zonal,
        }
    }
}

/// Cusp excursion experiments on the modular surface and Hecke orbifolds.
///
/// Exit codes: 0 success, 1 bad input or domain, 2 precision exhausted,
/// 3 tolerance not met, 4 oracle mismatch.
#[derive(Debug, Parser)]
#[command(name = "cusp-lab", version)]
struct Cli {
    command: Cmd,
    /// JSON config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Point to study, e.g. `quad:golden`, `rat:2/7`, `dec:0.1234`,
    /// `rand:SEED:DIGITS`. Repeatable.
    #[arg(long)]
    x: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    digits: Option<usize>,
    #[arg(long)]
    terms: Option<usize>,
    /// Comma-separated depth thresholds in (0, 2].
    #[arg(long)]
    k: Option<String>,
    /// Height floor for `zonal`, `1e-6` or `exp:-3000`.
    #[arg(long)]
    hmin: Option<String>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "CUSP_LAB_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Band file for `loglaw`.
    #[arg(long)]
    band: Option<PathBuf>,
    /// With `loglaw`: rerun the pilot and overwrite the band file.
    #[arg(long)]
    calibrate: bool,
    /// Write the resolved config to this file and exit.
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let command: Command = cli.command.into();
    let mut cfg = match &cli.config {
        Some(path) => {
            let c = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
            if c.command != command {
                return Err(LabError::Config(format!(
                    "config is for `{}`, not `{command}`",
                    c.command
                )));
            }
            c
        }
        None => {
            let mut c = ExperimentConfig::defaults(command);
            if let (Command::Zonal, Some(q)) = (command, cli.q) {
                c.set_zonal_q(q);
            }
            c
        }
    };
    if !cli.x.is_empty() {
        cfg.x = cli
            .x
            .iter()
            .map(|s| s.parse::<RealSpec>())
            .collect::<Result<_, _>>()?;
        cfg.samples = cfg.x.len();
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.samples {
        cfg.samples = v;
    }
    if let Some(v) = cli.digits {
        cfg.digits = v;
    }
    if let Some(v) = cli.terms {
        cfg.terms = v;
    }
    if let Some(list) = &cli.k {
        cfg.k = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| LabError::Config(format!("bad k value {s:?}")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = &cli.hmin {
        cfg.hmin = v.clone();
    }
    if let Some(v) = cli.q {
        cfg.q = v;
    }
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    if let Some(v) = cli.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = cli.burn_in {
        cfg.burn_in = v;
    }
    if let Some(v) = &cli.band {
        cfg.band = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main_inner(cli: &Cli) -> Result<(), LabError> {
    let cfg = resolve(cli)?;
    if let Some(path) = &cli.dump_config {
        std::fs::write(path, cfg.to_json())?;
        return Ok(());
    }
    if cli.calibrate {
        if cfg.command != Command::Loglaw {
            return Err(LabError::Config(
                "--calibrate only applies to loglaw".into(),
            ));
        }
        let series = build_all(&cfg)?;
        let band = calibrate(&cfg, &series)?;
        let mut text = serde_json::to_string_pretty(&band).map_err(std::io::Error::other)?;
        text.push('\n');
        if let Some(dir) = cfg.band.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&cfg.band, text)?;
        println!(
            "band [{:.6}, {:.6}] (median {:.6}) written to {}",
            band.q25,
            band.q75,
            band.median,
            cfg.band.display()
        );
        return Ok(());
    }
    let outcome = cusp_lab::run(&cfg)?;
    write_outcome(&cfg.out, &outcome)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("wrote {}", cfg.out.display());
    match outcome.verdict() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
