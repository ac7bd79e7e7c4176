mod config;
mod run;
mod svg;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use run::RunError;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "groupspectra", version, about = "Config-driven harmonic analysis experiments on finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the irreducible representations of a group.
    Reps(RunArgs),
    /// Fourier transform of a function on a group.
    Dft(RunArgs),
    /// Monte Carlo recovery of a perturbed subgroup's spectrum.
    Perturb(RunArgs),
    /// Evaluate recovery bounds without sampling.
    Bound(RunArgs),
    /// Spectral denoising from one realization.
    Denoise(RunArgs),
    /// Discretize-then-refine convergence sweep.
    Limit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for output artifacts.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
    /// Replace the seed given in the config.
    #[arg(long)]
    seed_override: Option<u64>,
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn exit_for(e: RunError) -> ExitCode {
    match e {
        RunError::Config(m) => fail("config", &m, 1),
        RunError::Io(m) => fail("io", &m, 4),
        RunError::Lib(e) => {
            let code = match e {
                groupspectra::Error::Domain(_) | groupspectra::Error::Parse(_) => 1,
                groupspectra::Error::Precondition(_) => 2,
                groupspectra::Error::Resource(_) => 3,
                _ => 4,
            };
            fail(e.kind(), &e.to_string(), code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => return fail("usage", e.to_string().trim(), 1),
    };
    let (name, args) = match &cli.command {
        Command::Reps(a) => ("reps", a),
        Command::Dft(a) => ("dft", a),
        Command::Perturb(a) => ("perturb", a),
        Command::Bound(a) => ("bound", a),
        Command::Denoise(a) => ("denoise", a),
        Command::Limit(a) => ("limit", a),
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail("config", &format!("cannot read {}: {e}", args.config.display()), 1),
    };
    let mut config: RunConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return fail("config", &e.to_string(), 1),
    };
    if config.command() != name {
        return fail("config", &format!("config is for `{}`, not `{name}`", config.command()), 1);
    }
    if let Some(seed) = args.seed_override {
        config.override_seed(seed);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        if t == 0 {
            return fail("usage", "--threads must be positive", 1);
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail("resource", &e.to_string(), 3),
    };
    let start = Instant::now();
    let out_dir = args.out_dir.clone();
    match pool.install(|| run::run(config, &out_dir)) {
        Ok(mut files) => {
            let timing = json!({ "command": name, "wall_time_s": start.elapsed().as_secs_f64() });
            if let Err(e) = std::fs::write(out_dir.join("timing.json"), format!("{timing:#}\n")) {
                return fail("io", &e.to_string(), 4);
            }
            files.push("timing.json".into());
            for f in files {
                println!("{}", out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => exit_for(e),
    }
}
