// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scauth_core::attacks::{
    run_attack_matrix, run_cell, AttackError, AttackId, CellReport, MatrixConfig, MatrixReport,
};
use scauth_core::channel::{decode, encode, to_hex, Channel, SimClock};
use scauth_core::costmodel::{golden_table, measure_table, CostTable};
use scauth_core::modmath::{sample_exponent, Coprimality};
use scauth_core::schemes::{authenticate, login, register};
use scauth_core::{CheckDigit, Credential, Identity, LoginMessage, Prime, Registry, Scheme, SystemParams};

use crate::args::{AttackArgs, Cli, Command, CostsArgs, Field, Format, LoginArgs, RegisterArgs, SetupArgs};

const PARAMS_FILE: &str = "params.toml";
const KEY_FILE: &str = "server.key";
/// Floor on `p` when loading parameters; matches what `setup` accepts.
const MIN_BITS: u64 = 8;
/// Kept clear of the per-cell streams the matrix runner uses.
const PRIME_STREAM: u64 = u64::MAX;

pub enum Outcome {
    Done,
    Rejected,
    Mismatch,
}

/// A flag combination that parses but makes no sense.
#[derive(Debug)]
pub struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Runs one command, appending its stdout to `out`.
pub fn run(cli: Cli, out: &mut String) -> Result<Outcome> {
    match cli.command {
        Command::Setup(a) => setup(&cli.dir, a, out),
        Command::Register(a) => register_cmd(&cli.dir, a, out),
        Command::Login(a) => login_cmd(&cli.dir, a, out),
        Command::Attack(a) => attack(a, out),
        Command::Costs(a) => costs(a, out),
    }
}

fn seeded(seed: Option<u64>) -> ChaCha8Rng {
    let seed = seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed {s}");
        s
    });
    ChaCha8Rng::seed_from_u64(seed)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load_params(dir: &Path) -> Result<SystemParams> {
    let text = read_text(&dir.join(PARAMS_FILE))?;
    let key_path = dir.join(KEY_FILE);
    let key = fs::read(&key_path).with_context(|| format!("reading {}", key_path.display()))?;
    SystemParams::from_files(&text, &key, MIN_BITS).context("loading parameters")
}

fn registry_path(dir: &Path, scheme: Scheme, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| dir.join(format!("registry-{}.toml", scheme.name())))
}

fn setup(dir: &Path, a: SetupArgs, out: &mut String) -> Result<Outcome> {
    let mut rng = seeded(a.seed);
    let params = SystemParams::generate(a.bits, &mut rng)?
        .digits(a.digits)
        .delta_t(a.delta_t)
        .mode(a.mode)
        .build()?;
    let (text, key) = params.to_files()?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join(PARAMS_FILE), &text)?;
    write(&dir.join(KEY_FILE), &key)?;
    out.push_str(&text);
    Ok(Outcome::Done)
}

fn register_cmd(dir: &Path, a: RegisterArgs, out: &mut String) -> Result<Outcome> {
    let params = load_params(dir)?;
    let reg_path = registry_path(dir, a.scheme, a.registry);
    let mut registry = if reg_path.exists() {
        Registry::from_toml(&read_text(&reg_path)?).context("loading registry")?
    } else {
        Registry::new(a.scheme)
    };
    if registry.scheme() != a.scheme {
        bail!("registry holds {} cards, not {}", registry.scheme(), a.scheme);
    }
    let mut rng = seeded(a.seed);
    let cred = register(&params, &mut registry, &a.id, &mut rng)?;
    write(&a.out, cred.to_toml()?)?;
    write(&reg_path, registry.to_toml()?)?;
    writeln!(out, "identity {}", cred.identity())?;
    writeln!(out, "pw       {}", cred.pw())?;
    Ok(Outcome::Done)
}

fn bump(x: &BigUint, p: &Prime) -> BigUint {
    let y = (x + 1u32) % p.value();
    if y.bits() == 0 {
        BigUint::from(1u32)
    } else {
        y
    }
}

/// Alters `field` so that it still decodes but no longer matches what the
/// card computed.
fn tamper(msg: &mut LoginMessage, field: Field, p: &Prime) -> Result<()> {
    match (field, &mut msg.identity) {
        (Field::C1, _) => msg.c1 = bump(&msg.c1, p),
        (Field::C2, _) => msg.c2 = bump(&msg.c2, p),
        (Field::T, _) => msg.t_stamp = msg.t_stamp.checked_sub(1).unwrap_or(1),
        (Field::Id, Identity::Hl { id } | Identity::Proposed { id, .. }) => *id = bump(id, p),
        (Field::Id, Identity::Slh { sid } | Identity::Kumar { sid, .. }) => *sid = bump(sid, p),
        (Field::Cid, Identity::Kumar { c_id, .. } | Identity::Proposed { c_id, .. }) => {
            let bound = 10u64.pow(c_id.digits() as u32);
            *c_id = CheckDigit::new((c_id.value() + 1) % bound, c_id.digits())?;
        }
        (Field::R, Identity::Proposed { reg_number, .. }) => *reg_number += 1u32,
        (field, identity) => {
            return Err(usage(format!(
                "{} logins have no {field:?} field",
                identity.scheme().name()
            )))
        }
    }
    Ok(())
}

fn login_cmd(dir: &Path, a: LoginArgs, out: &mut String) -> Result<Outcome> {
    let params = load_params(dir)?;
    let cred = Credential::from_toml(&read_text(&a.cred)?).context("loading credential")?;
    if cred.prime() != params.prime() {
        bail!("credential was issued under a different prime");
    }
    let reg_path = registry_path(dir, cred.scheme(), a.registry);
    let mut registry = Registry::from_toml(&read_text(&reg_path)?).context("loading registry")?;

    let mut rng = seeded(a.seed);
    let r = sample_exponent(params.prime(), Coprimality::Unconstrained, &mut rng);
    let mut msg = login(&cred, a.time, &r)?;
    if let Some(field) = a.tamper {
        tamper(&mut msg, field, params.prime())?;
    }

    let mut wire = Channel::new(SimClock::new(a.time), a.delay).with_tap();
    let got = wire.deliver(encode(&msg));
    writeln!(out, "frame    {}", to_hex(&got.frame))?;
    writeln!(out, "sent     {}", got.sent_at)?;
    writeln!(out, "arrived  {}", got.arrival)?;
    let mut decision = authenticate(&params, &mut registry, &decode(&got.frame)?, got.arrival)?;
    writeln!(out, "decision {decision}")?;
    if a.replay {
        let captured = wire.tapped()[0].clone();
        let again = wire.deliver(captured);
        decision = authenticate(&params, &mut registry, &decode(&again.frame)?, again.arrival)?;
        writeln!(out, "replay   {decision}")?;
    }
    write(&reg_path, registry.to_toml()?)?;
    Ok(if decision.accepted() {
        Outcome::Done
    } else {
        Outcome::Rejected
    })
}

fn attack_prime(a: &AttackArgs) -> Result<Prime> {
    match a.prime {
        Some(v) => Prime::from_u64(v).map_err(|e| usage(format!("--prime {v}: {e}"))),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            rng.set_stream(PRIME_STREAM);
            Ok(Prime::generate(a.bits, &mut rng)?)
        }
    }
}

fn single_cell(config: &MatrixConfig, a: &AttackArgs) -> Result<CellReport> {
    let attack: AttackId = a.target.parse().map_err(usage)?;
    let scheme = a.scheme.ok_or_else(|| usage("a single attack needs --scheme"))?;
    match run_cell(config, scheme, attack) {
        Err(e @ AttackError::NotApplicable { .. }) => Err(usage(e.to_string())),
        other => Ok(other?),
    }
}

fn attack(a: AttackArgs, out: &mut String) -> Result<Outcome> {
    let config = MatrixConfig::new(attack_prime(&a)?, a.digits, a.trials, a.seed).with_policy(a.mode.policy());
    let single = a.target != "matrix";
    let report = if single {
        MatrixReport {
            p: config.p.to_string(),
            digits: config.digits,
            policy: config.policy,
            seed: config.seed,
            cells: vec![single_cell(&config, &a)?],
        }
    } else {
        let mut report = run_attack_matrix(&config)?;
        if let Some(s) = a.scheme {
            report.cells.retain(|c| c.scheme == s);
        }
        report
    };

    match a.format {
        Format::Json if single => writeln!(out, "{}", serde_json::to_string_pretty(&report.cells[0])?)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Text => {
            writeln!(
                out,
                "p {}  digits {}  mode {}  trials {}  seed {}",
                report.p, report.digits, a.mode, a.trials, report.seed
            )?;
            out.push_str(&report.render_text());
            if single {
                if let Some(sample) = &report.cells[0].sample {
                    writeln!(out, "sample   {sample}")?;
                }
            }
        }
    }
    match report.check() {
        Ok(()) => Ok(Outcome::Done),
        Err(e) => {
            eprintln!("{e}");
            Ok(Outcome::Mismatch)
        }
    }
}

fn costs(a: CostsArgs, out: &mut String) -> Result<Outcome> {
    let measured = measure_table()?;
    let golden = match &a.golden {
        Some(path) => CostTable::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?,
        None => golden_table(),
    };
    match a.format {
        Format::Text => out.push_str(&measured.render_text()),
        Format::Json => writeln!(out, "{}", measured.to_json())?,
    }
    match measured.compare(&golden) {
        Ok(()) => Ok(Outcome::Done),
        Err(e) => {
            eprintln!("{e}");
            Ok(Outcome::Mismatch)
        }
    }
}
