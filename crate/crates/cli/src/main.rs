//! `voatwist`: command-line front end for twisted Zhu algebras, conformal
//! blocks and fusion rules.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on a usage error.

mod commands;
mod config;
mod latex;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{CheckKind, CorrArgs, Output};
use config::{RawSettings, UsageError};

#[derive(Parser, Debug)]
#[command(name = "voatwist", version, about = "Twisted Zhu algebras, conformal blocks and fusion rules in exact arithmetic")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Vertex algebra: heisenberg or lattice-a1.
    #[arg(long, global = true)]
    voa: Option<String>,
    /// Automorphism: id or theta.
    #[arg(long, global = true)]
    twist: Option<String>,
    /// Truncation degree (number of terms for kernels).
    #[arg(long, global = true)]
    trunc: Option<String>,
    /// Global denominator D; must be divisible by the twist order.
    #[arg(long, global = true)]
    denominator: Option<String>,
    /// Output format (json by default; latex and text are also accepted).
    #[arg(long, global = true)]
    format: Option<String>,
    /// Seed of the random sweeps.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Read defaults from a key=value file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a kernel function with its three expansions.
    Kernels {
        /// The exponent n.
        #[arg(long, default_value = "1/2")]
        n: String,
        /// The derivative order i.
        #[arg(long, default_value_t = 1)]
        i: u32,
    },
    /// Compute the twisted Zhu algebra.
    Zhu,
    /// Compute a bimodule with its action matrices.
    Bimodule {
        /// The module M.
        #[arg(long)]
        module: Option<String>,
        /// Ag or Bg:<lambda>.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Check properties of the restricted conformal blocks, or emit a correlation function.
    Corr {
        /// The property check.
        #[arg(long, value_enum)]
        check: Option<CheckKind>,
        /// A key=value file naming the modules m1 to m3, optionally with trunc.
        #[arg(long)]
        datum: Option<PathBuf>,
        /// Emit a correlation function (n-point).
        #[arg(long)]
        emit: Option<String>,
        /// JSON file with the insertions for --emit.
        #[arg(long)]
        inputs: Option<PathBuf>,
        #[command(flatten)]
        modules: ModuleArgs,
    },
    /// Compute a fusion rule by both routes, or the whole table.
    Fusion {
        /// Emit the whole table.
        #[arg(long)]
        table: bool,
        #[command(flatten)]
        modules: ModuleArgs,
    },
    /// Run every invariant suite.
    Selftest,
}

#[derive(Args, Debug)]
struct ModuleArgs {
    /// The untwisted module M1.
    #[arg(long)]
    m1: Option<String>,
    /// The source twisted module M2.
    #[arg(long)]
    m2: Option<String>,
    /// The target twisted module M3.
    #[arg(long)]
    m3: Option<String>,
}

impl ModuleArgs {
    fn refs(&self) -> [Option<&String>; 3] {
        [self.m1.as_ref(), self.m2.as_ref(), self.m3.as_ref()]
    }
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("VOATWIST_THREADS") else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| UsageError::new("VOATWIST_THREADS", format!("`{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| UsageError::new("VOATWIST_THREADS", e.to_string()))
}

fn run(cli: Cli) -> Result<Output> {
    configure_threads()?;
    let g = cli.global;
    let mut flags = RawSettings::default();
    flags.set("voa", g.voa);
    flags.set("twist", g.twist);
    flags.set("trunc", g.trunc);
    flags.set("denominator", g.denominator);
    flags.set("format", g.format);
    flags.set("seed", g.seed);
    flags.set("out", g.out.map(|p| p.display().to_string()));
    let mut settings = commands::read_settings(g.config.as_deref(), "--config")?;
    if let Command::Corr { datum: Some(path), .. } = &cli.command {
        settings = settings.merged(RawSettings::read(path, "--datum")?);
    }
    let cfg = settings.merged(flags).resolve()?;
    let out = match &cli.command {
        Command::Kernels { n, i } => commands::kernels(&cfg, n, *i)?,
        Command::Zhu => commands::zhu(&cfg)?,
        Command::Bimodule { module, mode } => commands::bimodule(&cfg, module.as_ref(), mode.as_ref())?,
        Command::Corr { check, emit, inputs, modules, .. } => {
            commands::corr(&cfg, CorrArgs { check: *check, emit: emit.as_deref(), inputs: inputs.as_deref(), modules: modules.refs() })?
        }
        Command::Fusion { table, modules } => commands::fusion(&cfg, *table, modules.refs())?,
        Command::Selftest => commands::selftest(&cfg)?,
    };
    commands::emit(&cfg, &out)?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(out) if out.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("error: a check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
