//! `ncfree`: command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure (including a
//! failed `verify-all`), 3 numerical guard.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncfree::Error;

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "ncfree", version, about = "q-Gaussian free-probability workbench")]
struct Cli {
    /// `key = value` file; its values override command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON and CSV outputs.
    #[arg(long, global = true, env = "NCFREE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Model and run parameters shared by the subcommands.
#[derive(Args, Debug, Default, Clone)]
struct Common {
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Number of generators.
    #[arg(long = "N", value_name = "N")]
    alphabet: Option<usize>,
    /// Matrix size.
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Time horizon.
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// Cutoff level of the kernel expansion.
    #[arg(long = "D")]
    depth: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    seeds: Option<usize>,
    /// `ito` or `literal`.
    #[arg(long)]
    drift: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram matrix of tensor level n.
    Gram {
        #[arg(long, value_name = "LEVEL")]
        n: usize,
        /// `brute`, `recursive` or `both`.
        #[arg(long, default_value = "both")]
        method: String,
        #[command(flatten)]
        common: Common,
    },
    /// Wick polynomial of a word such as `1,2,1`.
    Wick {
        #[arg(long)]
        word: String,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated kernel expansion and its tail bounds.
    Xi {
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate variables of the q-semicircular derivation.
    Conjugate {
        #[command(flatten)]
        common: Common,
    },
    /// Free Fisher information and transport constant.
    Fisher {
        #[command(flatten)]
        common: Common,
    },
    /// Stationarity residuals of the generator.
    Stationarity {
        #[command(flatten)]
        common: Common,
    },
    /// Euler–Maruyama runs of the matrix SDE.
    Simulate {
        /// Burn-in time used to prepare a start state when q ≠ 0.
        #[arg(long, default_value_t = 1.0)]
        burn_in: f64,
        #[arg(long, default_value_t = 100)]
        sample_every: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Distance between the SDE and its linearization at time 0.
    Coupling {
        #[arg(long, default_value_t = 1e-3)]
        tmin: f64,
        #[arg(long, default_value_t = 1e-1)]
        tmax: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Free entropy dimension lower bounds.
    Bounds {
        /// Number of generators.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated q values for a convergence table.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the acceptance criteria.
    VerifyAll {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, allow_hyphen_values = true)]
        criteria: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Gram { common, .. }
            | Command::Wick { common, .. }
            | Command::Xi { common }
            | Command::Conjugate { common }
            | Command::Fisher { common }
            | Command::Stationarity { common }
            | Command::Simulate { common, .. }
            | Command::Coupling { common, .. }
            | Command::Bounds { common, .. }
            | Command::VerifyAll { common, .. } => common,
        }
    }

    /// Defaults that differ between subcommands.
    fn defaults(&self) -> RunConfig {
        let base = RunConfig::default();
        match self {
            Command::Conjugate { .. } | Command::Fisher { .. } => RunConfig { depth: 2, ..base },
            Command::Stationarity { .. } => RunConfig { degree: 6, ..base },
            Command::Coupling { .. } => RunConfig { dt: 1e-4, seeds: 4, ..base },
            _ => base,
        }
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let c = cli.command.common();
    let mut cfg = cli.command.defaults();
    macro_rules! take {
        ($($f:ident),*) => { $(if let Some(v) = c.$f.clone() { cfg.$f = v; })* };
    }
    take!(q, alphabet, k, dt, horizon, depth, degree, seed, seeds);
    if let Command::Bounds { n: Some(n), .. } = &cli.command {
        cfg.alphabet = *n;
    }
    if let Some(d) = &c.drift {
        cfg.drift = d.parse()?;
    }
    cfg.out_dir = cli.out_dir.clone();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NormGuard { .. } | Error::NonFinite { .. } | Error::NearSingular { .. } | Error::Divergent { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(&cli).and_then(|cfg| commands::run(&cli.command, &cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
