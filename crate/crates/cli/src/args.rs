// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Flag definitions. Every flag can also come from an environment variable
//! named `SCAUTH_` plus the flag name in upper snake case.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use scauth_core::{Mode, Scheme};

#[derive(Debug, Parser)]
#[command(name = "scauth", version, about = "Smart-card authentication testbed")]
pub struct Cli {
    /// Directory holding params.toml, server.key and the registries.
    #[arg(long, global = true, env = "SCAUTH_DIR", default_value = ".")]
    pub dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a prime, the server secret and the public parameters.
    Setup(SetupArgs),
    /// Issue a smart card for an identity.
    Register(RegisterArgs),
    /// Run one login through the simulated channel and authenticate it.
    Login(LoginArgs),
    /// Run one attack cell, or the whole matrix with `matrix`.
    Attack(AttackArgs),
    /// Print the operation counts of every phase.
    Costs(CostsArgs),
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    /// Bit length of p.
    #[arg(long, env = "SCAUTH_BITS", default_value_t = 64, value_parser = clap::value_parser!(u64).range(8..=4096))]
    pub bits: u64,
    /// Decimal digits in the check digit.
    #[arg(long, env = "SCAUTH_DIGITS", default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=18))]
    pub digits: u8,
    /// Freshness window in clock ticks.
    #[arg(long, env = "SCAUTH_DELTA_T", default_value_t = 60)]
    pub delta_t: u64,
    #[arg(long, env = "SCAUTH_MODE", default_value = "hardened")]
    pub mode: Mode,
    /// Omitted: drawn from the OS and echoed on stderr.
    #[arg(long, env = "SCAUTH_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    #[arg(long, env = "SCAUTH_SCHEME")]
    pub scheme: Scheme,
    #[arg(long, env = "SCAUTH_ID")]
    pub id: BigUint,
    /// Where to write the credential.
    #[arg(long, env = "SCAUTH_OUT")]
    pub out: PathBuf,
    /// Defaults to `registry-<scheme>.toml` under `--dir`.
    #[arg(long, env = "SCAUTH_REGISTRY")]
    pub registry: Option<PathBuf>,
    #[arg(long, env = "SCAUTH_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    C1,
    C2,
    T,
    /// The identity the server raises to x_s: ID, or SID.
    Id,
    Cid,
    /// The registration number of the proposed scheme.
    R,
}

#[derive(Debug, Args)]
pub struct LoginArgs {
    /// Credential file written by `register`.
    #[arg(long, env = "SCAUTH_CRED")]
    pub cred: PathBuf,
    #[arg(long, env = "SCAUTH_REGISTRY")]
    pub registry: Option<PathBuf>,
    /// Card clock at login.
    #[arg(long, env = "SCAUTH_TIME", default_value_t = 1000)]
    pub time: u64,
    /// Ticks the channel holds the frame.
    #[arg(long, env = "SCAUTH_DELAY", default_value_t = 0)]
    pub delay: u64,
    /// Alter one field in transit.
    #[arg(long, env = "SCAUTH_TAMPER")]
    pub tamper: Option<Field>,
    /// Deliver the tapped frame a second time and report that decision.
    #[arg(long, env = "SCAUTH_REPLAY")]
    pub replay: bool,
    #[arg(long, env = "SCAUTH_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    /// An attack name (chan-cheng, mech1, mech2, shen, leung, cid-guess,
    /// primitive-root) or `matrix`.
    pub target: String,
    #[arg(long, env = "SCAUTH_SEED", required = true)]
    pub seed: u64,
    /// Required for a single attack.
    #[arg(long, env = "SCAUTH_SCHEME")]
    pub scheme: Option<Scheme>,
    /// Bit length of the generated prime.
    #[arg(long, env = "SCAUTH_BITS", default_value_t = 12, value_parser = clap::value_parser!(u64).range(8..=64))]
    pub bits: u64,
    /// Use this prime instead of generating one.
    #[arg(long, env = "SCAUTH_PRIME", conflicts_with = "bits")]
    pub prime: Option<u64>,
    /// Logins attempted per cell.
    #[arg(long, env = "SCAUTH_TRIALS", default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, env = "SCAUTH_DIGITS", default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=18))]
    pub digits: u8,
    #[arg(long, env = "SCAUTH_MODE", default_value = "paper")]
    pub mode: Mode,
    #[arg(long, env = "SCAUTH_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CostsArgs {
    #[arg(long, env = "SCAUTH_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Compare against this JSON table instead of the built-in one.
    #[arg(long, hide = true)]
    pub golden: Option<PathBuf>,
}
