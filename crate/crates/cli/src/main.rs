use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slowsep_cli::{parse_config, run_experiment, Verb};

#[derive(Parser)]
#[command(name = "slowsep", version, about = "Exclusion process with slow reservoirs: exact, Monte Carlo and continuum experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact generator identities on small lattices.
    Exact(Common),
    /// Monte Carlo density profiles against continuum references.
    Simulate(Common),
    /// Continuum solvers only.
    Pde(Common),
    /// Fluctuation-field statistics.
    Fluct(Common),
    /// Any experiment kind.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `experiment.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; SLOWSEP_THREADS takes precedence.
    #[arg(long)]
    threads: Option<usize>,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, String> {
    match std::env::var("SLOWSEP_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .map(Some)
            .ok_or_else(|| format!("SLOWSEP_THREADS must be a positive integer, got `{v}`")),
        Err(_) => Ok(flag),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, args) = match cli.verb {
        Command::Exact(a) => (Verb::Exact, a),
        Command::Simulate(a) => (Verb::Simulate, a),
        Command::Pde(a) => (Verb::Pde, a),
        Command::Fluct(a) => (Verb::Fluct, a),
        Command::Sweep(a) => (Verb::Sweep, a),
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    match thread_count(args.threads) {
        Ok(Some(k)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                eprintln!("cannot start {k} worker threads: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    }
    match run_experiment(&cfg, verb) {
        Ok((cells, status)) => {
            for c in &cells {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                let failed: Vec<&str> = c
                    .statistics
                    .iter()
                    .filter(|s| !s.pass)
                    .map(|s| s.statistic.as_str())
                    .collect();
                let mut line = format!("cell {:03} n={:?} theta={} {verdict}", c.cell, c.n, c.theta);
                if !failed.is_empty() {
                    line.push_str(&format!(" failed: {}", failed.join(", ")));
                }
                if let Some(e) = &c.error {
                    line.push_str(&format!(" error: {e}"));
                }
                println!("{line}");
            }
            println!("reports in {}", cfg.out.display());
            ExitCode::from(status as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
