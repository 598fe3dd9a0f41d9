// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Scheme × attack matrix.
//!
//! Each cell owns its parameters, registry and RNG stream, so cells are
//! independent and reproducible from `(seed, scheme, attack)`, and
//! [`run_attack_matrix`] runs them on separate threads. A draw whose forgery
//! is unusable (trivial base, base equal to an existing user's, or a
//! registration that the server refuses) is counted as skipped and redrawn;
//! `trials` counts attempted logins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

use super::{
    chan_cheng_forge, chang_hwang_mech1, chang_hwang_mech2, forged_card, leung_forge, primitive_root,
    prop_attack_attempt, shen_masquerade, shen_recover_pw, AttackError, AttackId, ForgedPair, Presentation,
};
use crate::channel::{self, Channel, SimClock};
use crate::modmath::{mod_exp, sample_exponent, Coprimality, Exponent, Prime, Residue};
use crate::primitives::{digit_bound, CheckDigit, ServerSecret};
use crate::schemes::{
    authenticate, login, register, AuthDecision, Credential, IdCheck, Identity, Policy, Reason, Registry, Scheme,
    SchemeError, SystemParams,
};

/// Two-sided coverage of the binomial interval used by rate expectations.
pub const CONFIDENCE: f64 = 0.99;

/// Legitimate users registered before forging.
const POOL_SIZE: usize = 8;
const POOL_DRAWS: usize = 64;
const MAX_COALITION: usize = 4;
/// Largest prime for which the primitive-root sweep is run.
const PRIMITIVE_ROOT_MAX_BITS: u64 = 16;
const BASE_TIME: u64 = 1_000;
/// Draws allowed per requested trial before a cell gives up.
const MAX_DRAWS_PER_TRIAL: u64 = 20;
/// Candidate server answers evaluated per trial when measuring chance level;
/// smaller candidate sets are enumerated in full.
const CHANCE_SAMPLES: usize = 64;

/// `[lo, hi]` such that `Binomial(n, rate)` falls outside with probability
/// at most `1 - CONFIDENCE`, split evenly between the tails.
pub fn binomial_interval(n: u64, rate: f64) -> (u64, u64) {
    let tail = (1.0 - CONFIDENCE) / 2.0;
    let dist = Binomial::new(rate.clamp(0.0, 1.0), n).expect("rate clamped to [0, 1]");
    let lo = if rate <= 0.0 { 0 } else { dist.inverse_cdf(tail) };
    let hi = if rate <= 0.0 { 0 } else { dist.inverse_cdf(1.0 - tail) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Expected {
    /// Every attempt is accepted.
    Accept,
    /// Every rejection carries `reason`; acceptances stay within the upper
    /// bound for per-attempt probability `leak`.
    Reject { reason: Reason, leak: f64 },
    /// The attack does no better than chance: rejections are
    /// `VERIFY_FAILED` and acceptances stay within the one-sided bound around
    /// the chance level measured alongside the trials.
    Blocked,
    /// Acceptances fall inside the binomial interval around `rate`; every
    /// rejection is `BAD_CHECK_DIGIT`.
    GuessRate { rate: f64 },
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Accept => f.write_str("ACCEPT"),
            Expected::Reject { reason, .. } => write!(f, "REJECT({})", reason.code()),
            Expected::Blocked => f.write_str("BLOCKED"),
            Expected::GuessRate { rate } => write!(f, "RATE({rate:.1e})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixConfig {
    pub p: Prime,
    pub digits: u8,
    pub trials: u64,
    pub seed: u64,
    pub policy: Policy,
}

impl MatrixConfig {
    /// Format-only identity validation, no replay cache.
    pub fn new(p: Prime, digits: u8, trials: u64, seed: u64) -> Self {
        MatrixConfig {
            p,
            digits,
            trials,
            seed,
            policy: Policy::paper(),
        }
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    fn expected(&self, scheme: Scheme, attack: AttackId) -> Result<Expected, AttackError> {
        let guess = 1.0 / digit_bound(self.digits).map_err(SchemeError::from)? as f64;
        let bad_cid = Expected::Reject {
            reason: Reason::BadCheckDigit,
            leak: guess,
        };
        let expected = match (scheme, attack) {
            (Scheme::Hl, AttackId::Shen) => Expected::Accept,
            (_, AttackId::Shen) => Expected::Blocked,
            _ if self.policy.id_check == IdCheck::Registry => Expected::Reject {
                reason: Reason::BadIdFormat,
                leak: 0.0,
            },
            (Scheme::Hl, AttackId::ChanCheng | AttackId::Mech1 | AttackId::Mech2 | AttackId::PrimitiveRoot) => {
                Expected::Accept
            }
            (Scheme::Slh, AttackId::ChanCheng | AttackId::Leung | AttackId::Mech2) => Expected::Accept,
            (Scheme::Kumar, AttackId::ChanCheng | AttackId::Leung | AttackId::Mech2) => bad_cid,
            (Scheme::Proposed, AttackId::ChanCheng | AttackId::Mech1 | AttackId::Mech2) => bad_cid,
            (Scheme::Kumar | Scheme::Proposed, AttackId::CidGuess) => Expected::GuessRate { rate: guess },
            (scheme, attack) => return Err(AttackError::NotApplicable { attack, scheme }),
        };
        Ok(expected)
    }

    /// The cells run for this prime, in report order.
    pub fn cells(&self) -> Vec<(Scheme, AttackId)> {
        use AttackId::*;
        let mut hl = vec![ChanCheng, Mech1, Mech2, Shen];
        if self.p.bits() <= PRIMITIVE_ROOT_MAX_BITS {
            hl.push(PrimitiveRoot);
        }
        let table = [
            (Scheme::Hl, hl),
            (Scheme::Slh, vec![ChanCheng, Leung, Mech2, Shen]),
            (Scheme::Kumar, vec![ChanCheng, Leung, Mech2, Shen, CidGuess]),
            (Scheme::Proposed, vec![ChanCheng, Mech1, Mech2, Shen, CidGuess]),
        ];
        table
            .into_iter()
            .flat_map(|(s, attacks)| attacks.into_iter().map(move |a| (s, a)))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub scheme: Scheme,
    pub attack: AttackId,
    pub attempts: u64,
    pub skipped: u64,
    pub accepted: u64,
    /// Rejection counts by reason.
    pub reasons: BTreeMap<Reason, u64>,
    pub expected: Expected,
    pub passed: bool,
    /// First attempted forgery and its outcome.
    pub sample: Option<String>,
    /// Expected acceptances, and their variance, had the server's answer to
    /// the attacker been independent of the attack. Filled for
    /// [`Expected::Blocked`] cells.
    pub chance_mean: f64,
    pub chance_var: f64,
}

impl CellReport {
    fn new(scheme: Scheme, attack: AttackId, expected: Expected) -> Self {
        CellReport {
            scheme,
            attack,
            attempts: 0,
            skipped: 0,
            accepted: 0,
            reasons: BTreeMap::new(),
            expected,
            passed: false,
            sample: None,
            chance_mean: 0.0,
            chance_var: 0.0,
        }
    }

    fn record(&mut self, decision: AuthDecision, what: impl FnOnce() -> String) {
        self.attempts += 1;
        if decision.accepted() {
            self.accepted += 1;
        } else {
            *self.reasons.entry(decision.reason()).or_default() += 1;
        }
        if self.sample.is_none() {
            self.sample = Some(format!("{} -> {decision}", what()));
        }
    }

    fn only_reason(&self, reason: Reason) -> bool {
        self.reasons.keys().all(|r| *r == reason)
    }

    fn judge(&mut self) {
        self.passed = self.attempts > 0
            && match self.expected {
                Expected::Accept => self.accepted == self.attempts,
                Expected::Reject { reason, leak } => {
                    self.only_reason(reason) && self.accepted <= binomial_interval(self.attempts, leak).1
                }
                Expected::Blocked => {
                    self.only_reason(Reason::VerifyFailed) && self.accepted as f64 <= self.chance_bound()
                }
                Expected::GuessRate { rate } => {
                    let (lo, hi) = binomial_interval(self.attempts, rate);
                    self.only_reason(Reason::BadCheckDigit) && (lo..=hi).contains(&self.accepted)
                }
            };
    }

    /// One-sided upper bound on chance acceptances, normal approximation
    /// to the Poisson-binomial count.
    pub fn chance_bound(&self) -> f64 {
        let z = Normal::standard().inverse_cdf(1.0 - (1.0 - CONFIDENCE) / 2.0);
        self.chance_mean + z * self.chance_var.sqrt()
    }

    fn expected_label(&self) -> String {
        match self.expected {
            Expected::Blocked => format!("BLOCKED(chance {:.1})", self.chance_mean),
            e => e.to_string(),
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "FAIL"
        }
    }

    /// One whitespace-separated row.
    pub fn row(&self) -> String {
        format!(
            "{:<9} {:<15} {:>9} {:>9} {:>9}  {:<26} {}",
            self.scheme.name(),
            self.attack.name(),
            self.attempts,
            self.skipped,
            self.accepted,
            self.expected_label(),
            self.verdict()
        )
    }

    pub fn header() -> String {
        format!(
            "{:<9} {:<15} {:>9} {:>9} {:>9}  {:<26} {}",
            "scheme", "attack", "trials", "skipped", "accepted", "expected", "verdict"
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixReport {
    pub p: String,
    pub digits: u8,
    pub policy: Policy,
    pub seed: u64,
    pub cells: Vec<CellReport>,
}

impl MatrixReport {
    pub fn cell(&self, scheme: Scheme, attack: AttackId) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.scheme == scheme && c.attack == attack)
    }

    pub fn check(&self) -> Result<(), AttackError> {
        let failures: Vec<String> = self
            .cells
            .iter()
            .filter(|c| !c.passed)
            .map(|c| {
                format!(
                    "{}/{}: {} of {} accepted, expected {}",
                    c.scheme.name(),
                    c.attack,
                    c.accepted,
                    c.attempts,
                    c.expected_label()
                )
            })
            .collect();
        if failures.is_empty() {
            Ok(())
        } else {
            Err(AttackError::MatrixMismatch(failures))
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = CellReport::header();
        out.push('\n');
        for c in &self.cells {
            out.push_str(&c.row());
            out.push('\n');
        }
        out
    }
}

/// Runs every applicable cell.
pub fn run_attack_matrix(config: &MatrixConfig) -> Result<MatrixReport, AttackError> {
    let cells = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .cells()
            .into_iter()
            .map(|(scheme, attack)| scope.spawn(move || run_cell(config, scheme, attack)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("matrix cell panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(MatrixReport {
        p: config.p.to_string(),
        digits: config.digits,
        policy: config.policy,
        seed: config.seed,
        cells,
    })
}

fn cell_rng(config: &MatrixConfig, scheme: Scheme, attack: AttackId) -> ChaCha8Rng {
    let attack_index = AttackId::ALL.iter().position(|a| *a == attack).unwrap_or(0) as u64;
    let scheme_index = Scheme::ALL.iter().position(|s| *s == scheme).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(scheme_index << 8 | attack_index);
    rng
}

fn draw_budget(config: &MatrixConfig) -> u64 {
    config.trials.saturating_mul(MAX_DRAWS_PER_TRIAL)
}

fn fresh_params<R: Rng + ?Sized>(config: &MatrixConfig, rng: &mut R) -> Result<SystemParams, AttackError> {
    Ok(
        SystemParams::builder(config.p.clone(), ServerSecret::generate(&config.p, rng))
            .digits(config.digits)
            .policy(config.policy)
            .min_bits(config.p.bits())
            .build()?,
    )
}

fn random_id<R: Rng + ?Sized>(p: &Prime, rng: &mut R) -> BigUint {
    rng.gen_biguint_range(&BigUint::from(2u32), &p.group_order())
}

fn random_exponent<R: Rng + ?Sized>(p: &Prime, rng: &mut R) -> BigUint {
    sample_exponent(p, Coprimality::Unconstrained, rng).value().clone()
}

/// Server refusals that only mean this draw was unlucky.
fn is_refusal(e: &SchemeError) -> bool {
    matches!(
        e,
        SchemeError::DuplicateId(_)
            | SchemeError::BadIdFormat(_)
            | SchemeError::ShadowCollision(_)
            | SchemeError::DuplicateRegistrationNumber(_)
            | SchemeError::RegistrationExhausted(_)
    )
}

fn try_register<R: Rng + ?Sized>(
    params: &SystemParams,
    registry: &mut Registry,
    id: &BigUint,
    rng: &mut R,
) -> Result<Option<Credential>, AttackError> {
    match register(params, registry, id, rng) {
        Ok(c) => Ok(Some(c)),
        Err(e) if is_refusal(&e) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

struct Pool {
    params: SystemParams,
    registry: Registry,
    users: Vec<Credential>,
    bases: BTreeSet<BigUint>,
}

fn build_pool<R: Rng + ?Sized>(config: &MatrixConfig, scheme: Scheme, rng: &mut R) -> Result<Pool, AttackError> {
    let params = fresh_params(config, rng)?;
    let mut registry = Registry::new(scheme);
    let mut users = Vec::new();
    for _ in 0..POOL_DRAWS {
        if users.len() == POOL_SIZE {
            break;
        }
        let id = random_id(&config.p, rng);
        if let Some(cred) = try_register(&params, &mut registry, &id, rng)? {
            users.push(cred);
        }
    }
    let bases = users.iter().map(Credential::registration_base).collect();
    Ok(Pool {
        params,
        registry,
        users,
        bases,
    })
}

fn pair_of(cred: &Credential) -> Result<(Residue, Residue), AttackError> {
    let base = Residue::new(cred.registration_base(), cred.prime()).map_err(SchemeError::from)?;
    Ok((base, cred.pw().clone()))
}

fn random_guess<R: Rng + ?Sized>(digits: u8, rng: &mut R) -> Result<CheckDigit, AttackError> {
    let bound = digit_bound(digits).map_err(SchemeError::from)?;
    Ok(CheckDigit::new(rng.gen_range(0..bound), digits).map_err(SchemeError::from)?)
}

/// Builds the forgery for one trial, or `None` when the pool cannot supply
/// its inputs.
fn forge<R: Rng + ?Sized>(
    pool: &Pool,
    scheme: Scheme,
    attack: AttackId,
    rng: &mut R,
) -> Result<Option<(ForgedPair, CheckDigit)>, AttackError> {
    let p = pool.params.prime();
    if pool.users.is_empty() {
        return Ok(None);
    }
    let source = &pool.users[rng.gen_range(0..pool.users.len())];
    let (base, pw) = pair_of(source)?;
    // The attacker's own tag, the best available without the check key.
    let own_cid = source
        .c_id()
        .unwrap_or(CheckDigit::new(0, 1).map_err(SchemeError::from)?);
    let forged = match attack {
        AttackId::ChanCheng => chan_cheng_forge(&base, &pw)?,
        AttackId::Mech1 if scheme == Scheme::Proposed => {
            let r = source.reg_number().expect("proposed credential");
            prop_attack_attempt(source.id(), r, &pw, &random_exponent(p, rng))?
        }
        AttackId::Mech1 => chang_hwang_mech1(&base, &pw, &random_exponent(p, rng))?,
        AttackId::Leung => leung_forge(&base, &pw, &random_exponent(p, rng))?,
        AttackId::Mech2 => {
            if pool.users.len() < 2 {
                return Ok(None);
            }
            let size = rng.gen_range(2..=MAX_COALITION.min(pool.users.len()));
            let mut picked: Vec<usize> = (0..pool.users.len()).collect();
            for i in 0..size {
                let j = rng.gen_range(i..picked.len());
                picked.swap(i, j);
            }
            let pairs = picked[..size]
                .iter()
                .map(|&i| pair_of(&pool.users[i]))
                .collect::<Result<Vec<_>, _>>()?;
            chang_hwang_mech2(&pairs)?
        }
        AttackId::CidGuess => {
            let k = random_exponent(p, rng);
            let forged = match scheme {
                Scheme::Proposed => {
                    prop_attack_attempt(source.id(), source.reg_number().expect("proposed credential"), &pw, &k)?
                }
                _ => leung_forge(&base, &pw, &k)?,
            };
            return Ok(Some((forged, random_guess(pool.params.digits(), rng)?)));
        }
        AttackId::Shen | AttackId::PrimitiveRoot => return Err(AttackError::NotApplicable { attack, scheme }),
    };
    Ok(Some((forged, own_cid)))
}

fn present<R: Rng + ?Sized>(scheme: Scheme, p: &Prime, c_id: CheckDigit, rng: &mut R) -> Presentation {
    match scheme {
        Scheme::Hl | Scheme::Slh => Presentation::Plain,
        Scheme::Kumar => Presentation::CheckDigit(c_id),
        Scheme::Proposed => Presentation::Split {
            id_b: random_id(p, rng),
            c_id,
        },
    }
}

fn attempt<R: Rng + ?Sized>(
    params: &SystemParams,
    registry: &mut Registry,
    card: &Credential,
    t_stamp: u64,
    rng: &mut R,
) -> Result<AuthDecision, AttackError> {
    let r = sample_exponent(params.prime(), Coprimality::Unconstrained, rng);
    attempt_with(params, registry, card, t_stamp, &r)
}

fn attempt_with(
    params: &SystemParams,
    registry: &mut Registry,
    card: &Credential,
    t_stamp: u64,
    r: &Exponent,
) -> Result<AuthDecision, AttackError> {
    let msg = login(card, t_stamp, r)?;
    Ok(authenticate(params, registry, &msg, t_stamp)?)
}

/// Runs a single cell until `config.trials` logins have been attempted or
/// the draw budget runs out. The primitive-root cell instead sweeps every
/// exponent once.
pub fn run_cell(config: &MatrixConfig, scheme: Scheme, attack: AttackId) -> Result<CellReport, AttackError> {
    let expected = config.expected(scheme, attack)?;
    let mut report = CellReport::new(scheme, attack, expected);
    let mut rng = cell_rng(config, scheme, attack);
    match attack {
        AttackId::Shen => run_shen(config, scheme, &mut report, &mut rng)?,
        AttackId::PrimitiveRoot => run_primitive_root(config, &mut report, &mut rng)?,
        _ => run_pair_forgeries(config, scheme, attack, &mut report, &mut rng)?,
    }
    report.judge();
    Ok(report)
}

fn run_pair_forgeries<R: Rng + ?Sized>(
    config: &MatrixConfig,
    scheme: Scheme,
    attack: AttackId,
    report: &mut CellReport,
    rng: &mut R,
) -> Result<(), AttackError> {
    let mut pool = build_pool(config, scheme, rng)?;
    let p = config.p.clone();
    while report.attempts < config.trials && report.attempts + report.skipped < draw_budget(config) {
        let trial = report.attempts + report.skipped;
        let Some((forged, c_id)) = forge(&pool, scheme, attack, rng)? else {
            report.skipped += 1;
            continue;
        };
        let base = forged.base.value();
        if !p.is_nontrivial(base) || pool.bases.contains(base) {
            report.skipped += 1;
            continue;
        }
        let card = forged_card(scheme, &forged, present(scheme, &p, c_id, rng), pool.params.owf())?;
        let decision = attempt(&pool.params, &mut pool.registry, &card, BASE_TIME + trial, rng)?;
        report.record(decision, || format!("{} as {}", forged.provenance, card.identity()));
    }
    Ok(())
}

/// A card for `identity` carrying password `pw`.
fn card_for(identity: &Identity, pw: &Residue, params: &SystemParams) -> Result<Credential, SchemeError> {
    let p = params.prime().clone();
    let owf = params.owf().clone();
    let pw = pw.value().clone();
    let zero = BigUint::default();
    match identity {
        Identity::Hl { id } => Credential::from_parts(Scheme::Hl, p, owf, id.clone(), pw, None, None, None),
        Identity::Slh { sid } => Credential::from_parts(Scheme::Slh, p, owf, zero, pw, Some(sid.clone()), None, None),
        Identity::Kumar { sid, c_id } => {
            Credential::from_parts(Scheme::Kumar, p, owf, zero, pw, Some(sid.clone()), None, Some(*c_id))
        }
        Identity::Proposed { id, reg_number, c_id } => Credential::from_parts(
            Scheme::Proposed,
            p,
            owf,
            id.clone(),
            pw,
            None,
            Some(reg_number.clone()),
            Some(*c_id),
        ),
    }
}

/// Each trial uses fresh server keys: a victim registers and logs in once
/// over a tapped channel, the attacker registers `ID_k^r`, pulls back the
/// issued password and replays the victim's identity fields with it.
///
/// Where the server derives the attacker's base from a keyed function or a
/// fresh registration number, the same login is also evaluated against the
/// other bases the server could have issued; the fraction accepted is the
/// trial's chance level.
fn run_shen<R: Rng + ?Sized>(
    config: &MatrixConfig,
    scheme: Scheme,
    report: &mut CellReport,
    rng: &mut R,
) -> Result<(), AttackError> {
    let p = config.p.clone();
    while report.attempts < config.trials && report.attempts + report.skipped < draw_budget(config) {
        let trial = report.attempts + report.skipped;
        let params = fresh_params(config, rng)?;
        let mut registry = Registry::new(scheme);
        let id_k = random_id(&p, rng);
        let Some(victim) = try_register(&params, &mut registry, &id_k, rng)? else {
            report.skipped += 1;
            continue;
        };

        let t_stamp = BASE_TIME + 2 * trial;
        let mut wire = Channel::new(SimClock::new(t_stamp), 0).with_tap();
        let honest = login(&victim, t_stamp, &sample_exponent(&p, Coprimality::Unconstrained, rng))?;
        wire.deliver(channel::encode(&honest));
        let tapped = channel::decode(&wire.tapped()[0]).expect("frame produced by encode");

        let r = sample_exponent(&p, Coprimality::GroupOrder, rng).value().clone();
        let id_b = shen_masquerade(&Residue::new(id_k.clone(), &p).map_err(SchemeError::from)?, &r)?;
        if id_b.value() == &id_k {
            report.skipped += 1;
            continue;
        }
        let Some(own) = try_register(&params, &mut registry, id_b.value(), rng)? else {
            report.skipped += 1;
            continue;
        };
        let pw_k = shen_recover_pw(own.pw(), &r)?;

        let r_login = sample_exponent(&p, Coprimality::Unconstrained, rng);
        let t_login = t_stamp + 1;
        if scheme != Scheme::Hl {
            let candidates = server_alternatives(&victim, id_b.value(), &p, rng);
            let mut hits = 0usize;
            for base in &candidates {
                let issued = mod_exp(
                    &Residue::new(base.clone(), &p).map_err(SchemeError::from)?,
                    params.secret().x_s().value(),
                );
                let card = card_for(&tapped.identity, &shen_recover_pw(&issued, &r)?, &params)?;
                if attempt_with(&params, &mut registry.clone(), &card, t_login, &r_login)?.accepted() {
                    hits += 1;
                }
            }
            let q = hits as f64 / candidates.len().max(1) as f64;
            report.chance_mean += q;
            report.chance_var += q * (1.0 - q);
        }

        let card = card_for(&tapped.identity, &pw_k, &params)?;
        let decision = attempt_with(&params, &mut registry, &card, t_login, &r_login)?;
        report.record(decision, || {
            format!(
                "victim {id_k}, r = {r}, registered {} and recovered pw {}",
                id_b.value(),
                pw_k.value()
            )
        });
    }
    Ok(())
}

/// Bases the server could have issued to the attacker's registration of
/// `id_b`: any shadow value other than the victim's, or `id_b ⊕ R` over the
/// registration numbers still free. Sampled when the set is large.
fn server_alternatives<R: Rng + ?Sized>(victim: &Credential, id_b: &BigUint, p: &Prime, rng: &mut R) -> Vec<BigUint> {
    let two = BigUint::from(2u32);
    let order = p.group_order();
    let usable = |b: &BigUint| -> Option<BigUint> {
        match victim.scheme() {
            Scheme::Proposed => {
                let number = b ^ id_b;
                let taken = victim.reg_number() == Some(&number);
                let in_range = number.bits() > 0 && number.bits() <= p.bits();
                (in_range && !taken && p.is_nontrivial(b)).then(|| b.clone())
            }
            _ => (victim.sid().map(Residue::value) != Some(b)).then(|| b.clone()),
        }
    };
    let span = &order - &two;
    if span <= BigUint::from(CHANCE_SAMPLES as u64) {
        let mut out = Vec::new();
        let mut b = two.clone();
        while b < order {
            out.extend(usable(&b));
            b += 1u32;
        }
        out
    } else {
        let mut out = Vec::with_capacity(CHANCE_SAMPLES);
        while out.len() < CHANCE_SAMPLES {
            out.extend(usable(&rng.gen_biguint_range(&two, &order)));
        }
        out
    }
}

/// Registers a generator `g` and reaches every other identity as `g^e`.
fn run_primitive_root<R: Rng + ?Sized>(
    config: &MatrixConfig,
    report: &mut CellReport,
    rng: &mut R,
) -> Result<(), AttackError> {
    let p = config.p.clone();
    let params = fresh_params(config, rng)?;
    let mut registry = Registry::new(Scheme::Hl);
    let Some(g) = primitive_root(&p) else {
        return Err(AttackError::NotApplicable {
            attack: AttackId::PrimitiveRoot,
            scheme: Scheme::Hl,
        });
    };
    let Some(own) = try_register(&params, &mut registry, g.value(), rng)? else {
        return Err(AttackError::NotApplicable {
            attack: AttackId::PrimitiveRoot,
            scheme: Scheme::Hl,
        });
    };
    let mut e = BigUint::from(2u32);
    let order = p.group_order();
    while e < order {
        let forged = chang_hwang_mech1(&g, own.pw(), &e)?;
        e += 1u32;
        if !p.is_nontrivial(forged.base.value()) {
            report.skipped += 1;
            continue;
        }
        let card = forged_card(Scheme::Hl, &forged, Presentation::Plain, params.owf())?;
        let decision = attempt(&params, &mut registry, &card, BASE_TIME, rng)?;
        report.record(decision, || format!("{} as {}", forged.provenance, card.identity()));
    }
    Ok(())
}
