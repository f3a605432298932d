//! Command-line surface for the amplifier simulation toolkit.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numeric
//! failures, 1 for I/O problems.

mod check;
mod commands;
mod config;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use table::{config_hash, to_csv, to_json, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qamp",
    version,
    about = "Entanglement-assisted qubit-amplifier simulations: gain laws, \
             entanglement distillation and DI-QKD key rates as CSV/JSON tables"
)]
struct Cli {
    /// TOML configuration file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Output file path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<String>,

    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Worker threads for grid sweeps (0 = all cores). Results are assembled
    /// in deterministic order regardless.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Success probability and nominal gain along a gain grid.
    GainSweep(GainSweepArgs),
    /// A single amplification, with the brute-force consistency deltas.
    Amplify(AmplifyArgs),
    /// Entanglement distillation tables (curves, optimal gains or summary).
    Distill(DistillArgs),
    /// Coherent-attenuation trade-off and entangling efficiency.
    Attenuate(AttenuateArgs),
    /// DI-QKD key rate versus channel loss with reflectivity optimization.
    Diqkd(DiqkdArgs),
    /// Re-runs the built-in oracle equivalence suites.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct GainSweepArgs {
    /// Vacuum weights |α|²; repeatable.
    #[arg(long = "alpha-sq")]
    alpha_sq: Vec<f64>,
    #[arg(long)]
    gain_min: Option<f64>,
    #[arg(long)]
    gain_max: Option<f64>,
    #[arg(long)]
    gain_steps: Option<usize>,
}

#[derive(Args, Debug)]
struct AmplifyArgs {
    #[arg(long)]
    reflectivity: Option<f64>,
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<f64>,
    /// Herald on DA/AD as well, with the V → −V feed-forward (r = 0 only).
    #[arg(long)]
    feed_forward: bool,
}

#[derive(Args, Debug)]
struct DistillArgs {
    /// curves | optimal | summary
    #[arg(long)]
    mode: Option<String>,
    /// Channel transmissivities; repeatable.
    #[arg(long = "transmissivity")]
    transmissivities: Vec<f64>,
    #[arg(long)]
    gain_max: Option<f64>,
    #[arg(long)]
    gain_steps: Option<usize>,
    /// Skip the relative-entropy column.
    #[arg(long)]
    skip_ree: bool,
}

#[derive(Args, Debug)]
struct AttenuateArgs {
    /// tradeoff | efficiency
    #[arg(long)]
    mode: Option<String>,
    #[arg(long = "transmissivity")]
    transmissivities: Vec<f64>,
    #[arg(long)]
    nu_steps: Option<usize>,
}

#[derive(Args, Debug)]
struct DiqkdArgs {
    #[arg(long)]
    loss_db_min: Option<f64>,
    #[arg(long)]
    loss_db_max: Option<f64>,
    #[arg(long)]
    loss_db_steps: Option<usize>,
    /// Dark-count probability per pulse; repeatable.
    #[arg(long = "dark")]
    dark_count_probs: Vec<f64>,
    #[arg(long)]
    r_grid_points: Option<usize>,
    #[arg(long)]
    pair_prob: Option<f64>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (mut cfg, raw) = RunConfig::load(cli.config.as_deref())?;
    let overrides = apply_overrides(&mut cfg, &cli.command);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;

    let (table, check_failed) = pool.install(|| -> Result<(Table, bool), CliError> {
        match &cli.command {
            Command::GainSweep(_) => Ok((commands::gain_sweep(&cfg.gain_sweep)?, false)),
            Command::Amplify(_) => Ok((commands::amplify(&cfg.amplify)?, false)),
            Command::Distill(_) => Ok((commands::distill(&cfg.distill)?, false)),
            Command::Attenuate(_) => Ok((commands::attenuate(&cfg.attenuate)?, false)),
            Command::Diqkd(_) => Ok((commands::diqkd(&cfg.diqkd)?, false)),
            Command::Check(_) => {
                let (table, all_pass) = check::run(&cfg.check)?;
                Ok((table, !all_pass))
            }
        }
    })?;

    table.validate()?;
    let hash = config_hash(&raw, &overrides);
    let format = cli
        .format
        .or_else(|| cfg.output.format.clone())
        .unwrap_or_else(|| "csv".into());
    let rendered = match format.as_str() {
        "csv" => to_csv(&table, hash),
        "json" => to_json(&table),
        other => {
            return Err(CliError::Config(format!(
                "unknown format {other:?} (expected \"csv\" or \"json\")"
            )))
        }
    };

    let out_path = cli.out.or_else(|| cfg.output.path.clone());
    match out_path {
        Some(path) => {
            let mut f = std::fs::File::create(&path)
                .map_err(|e| CliError::Io(format!("cannot create {path}: {e}")))?;
            f.write_all(rendered.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
        }
        None => {
            print!("{rendered}");
        }
    }

    if check_failed {
        return Err(CliError::Numeric(
            "oracle equivalence checks exceeded tolerance".into(),
        ));
    }
    Ok(())
}

/// Merges command-line flags into the config; returns a canonical override
/// description string that feeds the config hash.
fn apply_overrides(cfg: &mut RunConfig, command: &Command) -> String {
    let mut desc = String::new();
    let note = |desc: &mut String, name: &str, value: String| {
        desc.push_str(name);
        desc.push('=');
        desc.push_str(&value);
        desc.push(';');
    };
    match command {
        Command::GainSweep(a) => {
            if !a.alpha_sq.is_empty() {
                cfg.gain_sweep.alpha_sq = a.alpha_sq.clone();
                note(&mut desc, "alpha_sq", format!("{:?}", a.alpha_sq));
            }
            if let Some(v) = a.gain_min {
                cfg.gain_sweep.gain_min = v;
                note(&mut desc, "gain_min", v.to_string());
            }
            if let Some(v) = a.gain_max {
                cfg.gain_sweep.gain_max = v;
                note(&mut desc, "gain_max", v.to_string());
            }
            if let Some(v) = a.gain_steps {
                cfg.gain_sweep.gain_steps = v;
                note(&mut desc, "gain_steps", v.to_string());
            }
        }
        Command::Amplify(a) => {
            if let Some(v) = a.reflectivity {
                cfg.amplify.reflectivity = v;
                note(&mut desc, "reflectivity", v.to_string());
            }
            if let Some(v) = a.alpha_sq {
                cfg.amplify.alpha_sq = v;
                note(&mut desc, "alpha_sq", v.to_string());
            }
            if a.feed_forward {
                cfg.amplify.policy = "feed-forward".into();
                note(&mut desc, "policy", "feed-forward".into());
            }
        }
        Command::Distill(a) => {
            if let Some(v) = &a.mode {
                cfg.distill.mode = v.clone();
                note(&mut desc, "mode", v.clone());
            }
            if !a.transmissivities.is_empty() {
                cfg.distill.transmissivities = a.transmissivities.clone();
                note(
                    &mut desc,
                    "transmissivities",
                    format!("{:?}", a.transmissivities),
                );
            }
            if let Some(v) = a.gain_max {
                cfg.distill.gain_max = v;
                note(&mut desc, "gain_max", v.to_string());
            }
            if let Some(v) = a.gain_steps {
                cfg.distill.gain_steps = v;
                note(&mut desc, "gain_steps", v.to_string());
            }
            if a.skip_ree {
                cfg.distill.skip_ree = true;
                note(&mut desc, "skip_ree", "true".into());
            }
        }
        Command::Attenuate(a) => {
            if let Some(v) = &a.mode {
                cfg.attenuate.mode = v.clone();
                note(&mut desc, "mode", v.clone());
            }
            if !a.transmissivities.is_empty() {
                cfg.attenuate.transmissivities = a.transmissivities.clone();
                note(
                    &mut desc,
                    "transmissivities",
                    format!("{:?}", a.transmissivities),
                );
            }
            if let Some(v) = a.nu_steps {
                cfg.attenuate.nu_steps = v;
                note(&mut desc, "nu_steps", v.to_string());
            }
        }
        Command::Diqkd(a) => {
            if let Some(v) = a.loss_db_min {
                cfg.diqkd.loss_db_min = v;
                note(&mut desc, "loss_db_min", v.to_string());
            }
            if let Some(v) = a.loss_db_max {
                cfg.diqkd.loss_db_max = v;
                note(&mut desc, "loss_db_max", v.to_string());
            }
            if let Some(v) = a.loss_db_steps {
                cfg.diqkd.loss_db_steps = v;
                note(&mut desc, "loss_db_steps", v.to_string());
            }
            if !a.dark_count_probs.is_empty() {
                cfg.diqkd.dark_count_probs = a.dark_count_probs.clone();
                note(
                    &mut desc,
                    "dark_count_probs",
                    format!("{:?}", a.dark_count_probs),
                );
            }
            if let Some(v) = a.r_grid_points {
                cfg.diqkd.r_grid_points = v;
                note(&mut desc, "r_grid_points", v.to_string());
            }
            if let Some(v) = a.pair_prob {
                cfg.diqkd.pair_prob = v;
                note(&mut desc, "pair_prob", v.to_string());
            }
        }
        Command::Check(a) => {
            if let Some(v) = a.samples {
                cfg.check.samples = v;
                note(&mut desc, "samples", v.to_string());
            }
            if let Some(v) = a.seed {
                cfg.check.seed = v;
                note(&mut desc, "seed", v.to_string());
            }
        }
    }
    desc
}
