//! Command-line front end: argument parsing, command dispatch and the
//! CSV / JSON / plot renderings of an [`record::OutputRecord`].

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use urnpde::{Regime, Rule};

pub mod commands;
pub mod format;
pub mod record;

use commands::{SimulateArgs, Target, UsageError, VerifyArgs};
use format::Format;
use record::OutputRecord;

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse().map_err(|e: urnpde::Error| e.to_string())
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: urnpde::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "urnpde",
    version,
    about = "Exact and simulated remaining-ball distributions for urn removal games"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the simulation streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact distribution of the remaining count.
    Dist {
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        w: u64,
    },
    /// Monte Carlo run compared against the exact distribution.
    Simulate {
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        w: Option<u64>,
        /// Black balls for p4.
        #[arg(long)]
        m: Option<u64>,
        /// White balls for p4.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = urnpde::simulator::DEFAULT_STREAMS)]
        streams: u64,
    },
    /// Exact cross-checks.
    Verify {
        #[arg(value_enum)]
        target: Target,
        #[arg(long, default_value_t = 4)]
        kmax: u64,
        #[arg(long, default_value_t = 10)]
        order: u64,
        #[arg(long, default_value_t = 30)]
        rmax: u64,
        #[arg(long, default_value_t = 30)]
        wmax: u64,
        /// Grid bound for the identity and generating-function sweeps.
        #[arg(long, default_value_t = 25)]
        max: u64,
    },
    /// Most likely remaining count.
    Argmax {
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        w: u64,
    },
    /// Leading-order approximation against the exact value.
    Asym {
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, value_parser = parse_regime)]
        regime: Regime,
    },
}

pub fn run(cli: &Cli) -> Result<OutputRecord, UsageError> {
    match cli.command {
        Command::Dist { rule, r, w } => commands::cmd_dist(rule, r, w),
        Command::Simulate {
            rule,
            r,
            w,
            m,
            n,
            trials,
            streams,
        } => commands::cmd_simulate(&SimulateArgs {
            rule,
            r,
            w,
            m,
            n,
            trials,
            seed: cli.seed,
            streams,
        }),
        Command::Verify {
            target,
            kmax,
            order,
            rmax,
            wmax,
            max,
        } => commands::cmd_verify(&VerifyArgs {
            target,
            kmax,
            order,
            rmax,
            wmax,
            max,
        }),
        Command::Argmax { rule, r, w } => commands::cmd_argmax(rule, r, w),
        Command::Asym {
            rule,
            r,
            w,
            k,
            regime,
        } => commands::cmd_asym(rule, r, w, k, regime),
    }
}
