// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::num::NonZeroU64;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{fixture, n, p23, pinned_owf, primes_up_to, random_params, T};
use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scauth_core::attacks::{
    binomial_interval, run_attack_matrix, run_cell, shen_masquerade, shen_recover_pw, AttackId, Expected, MatrixConfig,
    CONFIDENCE,
};
use scauth_core::channel::{decode, encode, Channel, SimClock};
use scauth_core::costmodel::cost_table;
use scauth_core::modmath::{mod_exp, mod_inv, sample_exponent, Coprimality, Exponent, MathError};
use scauth_core::schemes::{
    authenticate, hl_authenticate, hl_login, hl_register, login, login_core, prop_authenticate, prop_login,
    prop_register_with_number, register, verify_core,
};
use scauth_core::{CostVector, Mode, Phase, Prime, Reason, Registry, Residue, Scheme, SchemeError};

/// Wall-clock budget for the completeness suite.
const COMPLETENESS_BUDGET: Duration = Duration::from_secs(60);
const SMALL_ROUNDS: usize = 1000;
const LARGE_ROUNDS: usize = 10;
const LARGE_BITS: u64 = 1024;
/// Random check-digit guesses per scheme and the digit count they target.
const GUESS_TRIALS: u64 = 1_000_000;
const GUESS_DIGITS: u8 = 4;
const MATRIX_TRIALS: u64 = 10_000;
const SEED: u64 = 0xacce_97ed;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn honest_round(params: &scauth_core::SystemParams, scheme: Scheme, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut reg = Registry::new(scheme);
    let p = params.prime();
    let id = rng.gen_biguint_below_p(p);
    let cred = register(params, &mut reg, &id, rng).map_err(|e| format!("{scheme} register {id}: {e}"))?;
    let t = rng.gen_range(0..1u64 << 40);
    let r = sample_exponent(p, Coprimality::Unconstrained, rng);
    let msg = login(&cred, t, &r).map_err(|e| e.to_string())?;
    let d = authenticate(params, &mut reg, &msg, t + rng.gen_range(0..=params.delta_t())).map_err(|e| e.to_string())?;
    ensure(d.accepted(), || format!("{scheme} p = {p}: {d}"))
}

trait IdDraw {
    fn gen_biguint_below_p(&mut self, p: &Prime) -> BigUint;
}

impl IdDraw for ChaCha8Rng {
    /// Uniform identity in `[2, p - 2]`.
    fn gen_biguint_below_p(&mut self, p: &Prime) -> BigUint {
        num_bigint::RandBigInt::gen_biguint_range(self, &n(2), &p.group_order())
    }
}

fn completeness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for scheme in Scheme::ALL {
        for _ in 0..SMALL_ROUNDS {
            let bits = rng.gen_range(8..=16);
            let params = random_params(bits, Mode::Hardened, &mut rng);
            honest_round(&params, scheme, &mut rng)?;
        }
        let params = random_params(LARGE_BITS, Mode::Hardened, &mut rng);
        for _ in 0..LARGE_ROUNDS {
            honest_round(&params, scheme, &mut rng)?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < COMPLETENESS_BUDGET, || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "{} rounds at 8-16 bits and {} at {LARGE_BITS} bits per scheme accepted in {elapsed:.1?}",
        SMALL_ROUNDS, LARGE_ROUNDS
    ))
}

fn worked_fixtures() -> Outcome {
    let params = fixture(Mode::Hardened);
    let e4 = Exponent::from_u64(4, params.prime()).unwrap();

    let mut reg = Registry::new(Scheme::Hl);
    let cred = hl_register(&params, &mut reg, &n(5)).map_err(|e| e.to_string())?;
    ensure(cred.pw().value() == &n(17), || format!("pw(5) = {}", cred.pw()))?;
    let msg = hl_login(&cred, T, &e4).map_err(|e| e.to_string())?;
    ensure((msg.c1.clone(), msg.c2.clone()) == (n(4), n(11)), || {
        format!("HL (C1, C2) = ({}, {})", msg.c1, msg.c2)
    })?;
    let d = hl_authenticate(&params, &mut reg, &msg, T).map_err(|e| e.to_string())?;
    ensure(d.accepted(), || format!("HL fixture {d}"))?;

    let mut reg = Registry::new(Scheme::Proposed);
    let cred = prop_register_with_number(&params, &mut reg, &n(9), &n(12)).map_err(|e| e.to_string())?;
    ensure(cred.pw().value() == &n(17), || format!("proposed pw = {}", cred.pw()))?;
    let msg = prop_login(&cred, T, &e4).map_err(|e| e.to_string())?;
    ensure((msg.c1.clone(), msg.c2.clone()) == (n(4), n(13)), || {
        format!("proposed (C1, C2) = ({}, {})", msg.c1, msg.c2)
    })?;
    let d = prop_authenticate(&params, &mut reg, &msg, T).map_err(|e| e.to_string())?;
    ensure(d.accepted(), || format!("proposed fixture {d}"))?;
    Ok("pw(5) = 17, HL (4, 11), proposed id 9 R 12 pw 17 (4, 13), both verify".into())
}

fn attack_matrix() -> Outcome {
    let mut notes = Vec::new();

    let config = MatrixConfig::new(p23(), 6, MATRIX_TRIALS, SEED);
    let report = run_attack_matrix(&config).map_err(|e| e.to_string())?;
    report.check().map_err(|e| format!("{e}\n{}", report.render_text()))?;
    for cell in &report.cells {
        let required = match (cell.scheme, cell.attack) {
            (Scheme::Hl, AttackId::ChanCheng | AttackId::Mech1 | AttackId::Mech2 | AttackId::Shen)
            | (Scheme::Slh, AttackId::Leung) => Some(Expected::Accept),
            (
                Scheme::Kumar | Scheme::Proposed,
                AttackId::ChanCheng | AttackId::Leung | AttackId::Mech1 | AttackId::Mech2,
            ) => Some(Expected::Reject {
                reason: Reason::BadCheckDigit,
                leak: 1e-6,
            }),
            _ => None,
        };
        if let Some(want) = required {
            ensure(cell.expected == want, || {
                format!("{}/{} expected {}", cell.scheme, cell.attack, cell.expected)
            })?;
        }
        if cell.scheme.uses_check_digit() && cell.attack != AttackId::Shen && cell.attack != AttackId::CidGuess {
            ensure(
                cell.accepted == 0 && cell.reasons.keys().all(|r| *r == Reason::BadCheckDigit),
                || format!("{}/{}: {:?}", cell.scheme, cell.attack, cell.reasons),
            )?;
        }
    }
    notes.push(format!(
        "matrix p = 23, d = 6, {MATRIX_TRIALS} trials: {} cells as expected",
        report.cells.len()
    ));

    let mut exhaustive = 0u64;
    for q in primes_up_to(50) {
        let p = Prime::from_u64(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(q);
        let params = random_params_over(&p, &mut rng);
        for id_k in 2..q - 1 {
            for r in (1..q - 1).filter(|r| r.gcd(&(q - 1)) == 1) {
                let mut reg = Registry::new(Scheme::Hl);
                let victim = hl_register(&params, &mut reg, &n(id_k)).map_err(|e| e.to_string())?;
                let id_b = shen_masquerade(&Residue::from_u64(id_k, &p).unwrap(), &n(r)).map_err(|e| e.to_string())?;
                let pw_b = if id_b.value() == &n(id_k) {
                    victim.pw().clone()
                } else {
                    hl_register(&params, &mut reg, id_b.value())
                        .map_err(|e| e.to_string())?
                        .pw()
                        .clone()
                };
                let pw_k = shen_recover_pw(&pw_b, &n(r)).map_err(|e| e.to_string())?;
                ensure(&pw_k == victim.pw(), || format!("shen p = {q} id = {id_k} r = {r}"))?;
                let card = victim.clone().with_pw(pw_k);
                let msg = login(&card, T, &sample_exponent(&p, Coprimality::Unconstrained, &mut rng))
                    .map_err(|e| e.to_string())?;
                ensure(
                    authenticate(&params, &mut reg, &msg, T)
                        .map_err(|e| e.to_string())?
                        .accepted(),
                    || format!("shen login p = {q} id = {id_k} r = {r}"),
                )?;
                exhaustive += 1;
            }
        }
    }
    notes.push(format!("shen recovered all {exhaustive} (p, id, r) cases for p <= 50"));

    let rate = 10f64.powi(-i32::from(GUESS_DIGITS));
    let (lo, hi) = binomial_interval(GUESS_TRIALS, rate);
    let guess_prime = Prime::from_u64(65_521).unwrap();
    for scheme in [Scheme::Kumar, Scheme::Proposed] {
        let config = MatrixConfig::new(guess_prime.clone(), GUESS_DIGITS, GUESS_TRIALS, SEED);
        let cell = run_cell(&config, scheme, AttackId::CidGuess).map_err(|e| e.to_string())?;
        ensure(cell.attempts == GUESS_TRIALS, || {
            format!("{scheme}: only {} guesses attempted", cell.attempts)
        })?;
        ensure(cell.reasons.keys().all(|r| *r == Reason::BadCheckDigit), || {
            format!("{scheme}: {:?}", cell.reasons)
        })?;
        ensure((lo..=hi).contains(&cell.accepted), || {
            format!(
                "{scheme}: {} of {GUESS_TRIALS} guesses accepted, interval [{lo}, {hi}]",
                cell.accepted
            )
        })?;
        notes.push(format!(
            "{scheme} guesses {}/{GUESS_TRIALS} in [{lo}, {hi}] at {:.0}%",
            cell.accepted,
            CONFIDENCE * 100.0
        ));
    }
    Ok(notes.join("; "))
}

fn random_params_over(p: &Prime, rng: &mut ChaCha8Rng) -> scauth_core::SystemParams {
    scauth_core::SystemParams::builder(p.clone(), scauth_core::ServerSecret::generate(p, rng))
        .min_bits(p.bits())
        .mode(Mode::Paper)
        .build()
        .unwrap()
}

fn cost_table_cells() -> Outcome {
    let table = cost_table().map_err(|e| e.to_string())?;
    let expected = [
        (Scheme::Hl, "E", "3E+H+M"),
        (Scheme::Slh, "R+E", "3E+H+M"),
        (Scheme::Kumar, "R+E+C", "3E+H+M+C"),
        (Scheme::Proposed, "E+C", "3E+H+M+C"),
    ];
    for (scheme, reg, auth) in expected {
        for (phase, want) in [
            (Phase::Registration, reg),
            (Phase::Login, "3E+H+M"),
            (Phase::Authentication, auth),
        ] {
            let got = table
                .get(scheme, phase)
                .ok_or_else(|| format!("missing {scheme} {phase}"))?;
            ensure(got.to_string() == want, || format!("{scheme} {phase}: {got} != {want}"))?;
        }
    }
    let kumar = table.get(Scheme::Kumar, Phase::Registration).unwrap();
    let proposed = table.get(Scheme::Proposed, Phase::Registration).unwrap();
    ensure(kumar == proposed + CostVector::new(0, 0, 0, 1, 0), || {
        format!("{kumar} vs {proposed}")
    })?;
    Ok("12 cells match; proposed registration = Kumar's minus one R".into())
}

fn duplicate_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut checked = 0;
    for _ in 0..50 {
        let bits = rng.gen_range(12..=32);
        let params = random_params(bits, Mode::Hardened, &mut rng);
        let id = rng.gen_biguint_below_p(params.prime());
        for scheme in [Scheme::Hl, Scheme::Slh, Scheme::Kumar] {
            let mut reg = Registry::new(scheme);
            register(&params, &mut reg, &id, &mut rng).map_err(|e| e.to_string())?;
            let again = register(&params, &mut reg, &id, &mut rng);
            ensure(matches!(again, Err(SchemeError::DuplicateId(_))), || {
                format!("{scheme}: {again:?}")
            })?;
        }
        let mut reg = Registry::new(Scheme::Proposed);
        let a = register(&params, &mut reg, &id, &mut rng).map_err(|e| e.to_string())?;
        let b = register(&params, &mut reg, &id, &mut rng).map_err(|e| e.to_string())?;
        ensure(a.reg_number() != b.reg_number() && a.pw() != b.pw(), || {
            format!("R/PW not distinct for {id}")
        })?;
        // Independent tags collide with probability 10^-d.
        if a.c_id() == b.c_id() {
            return Err(format!("C_ID collision for {id} at d = {}", params.digits()));
        }
        for cred in [&a, &b] {
            let msg = login(
                cred,
                T,
                &sample_exponent(params.prime(), Coprimality::Unconstrained, &mut rng),
            )
            .map_err(|e| e.to_string())?;
            let d = authenticate(&params, &mut reg, &msg, T).map_err(|e| e.to_string())?;
            ensure(d.accepted(), || format!("duplicate registration of {id}: {d}"))?;
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} identities: proposed issues distinct (R, PW, C_ID), others refuse"
    ))
}

fn freshness_and_replay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    for scheme in Scheme::ALL {
        let params = random_params(32, Mode::Hardened, &mut rng);
        let dt = params.delta_t();
        let mut reg = Registry::new(scheme);
        let cred = register(&params, &mut reg, &n(4242), &mut rng).map_err(|e| e.to_string())?;
        let mut wire = Channel::new(SimClock::new(T), 0);
        for delay in 0..=2 * dt {
            wire.set_delay(delay);
            wire.clock_mut().advance(NonZeroU64::MIN);
            let r = sample_exponent(params.prime(), Coprimality::Unconstrained, &mut rng);
            let msg = login(&cred, wire.clock().now(), &r).map_err(|e| e.to_string())?;
            let got = wire.deliver(encode(&msg));
            let d = authenticate(
                &params,
                &mut reg,
                &decode(&got.frame).map_err(|e| e.to_string())?,
                got.arrival,
            )
            .map_err(|e| e.to_string())?;
            ensure(d.accepted() == (delay <= dt), || format!("{scheme} delay {delay}: {d}"))?;
        }
        for mode in [Mode::Hardened, Mode::Paper] {
            let params = params.with_policy(mode.policy());
            let mut reg = Registry::new(scheme);
            let cred = register(&params, &mut reg, &n(777), &mut rng).map_err(|e| e.to_string())?;
            let mut wire = Channel::new(SimClock::new(T), 1).with_tap();
            let r = sample_exponent(params.prime(), Coprimality::Unconstrained, &mut rng);
            let msg = login(&cred, wire.clock().now(), &r).map_err(|e| e.to_string())?;
            let first = wire.deliver(encode(&msg));
            let d = authenticate(&params, &mut reg, &decode(&first.frame).unwrap(), first.arrival)
                .map_err(|e| e.to_string())?;
            ensure(d.accepted(), || format!("{scheme} {mode}: first delivery {d}"))?;
            let replay = wire.deliver(wire.tapped()[0].clone());
            let d = authenticate(&params, &mut reg, &decode(&replay.frame).unwrap(), replay.arrival)
                .map_err(|e| e.to_string())?;
            match mode {
                Mode::Hardened => ensure(d.reason() == Reason::Replay, || format!("{scheme} hardened replay {d}"))?,
                Mode::Paper => ensure(d.accepted(), || format!("{scheme} paper replay {d}"))?,
            }
        }
    }
    Ok("delay 0..=2dT accepted exactly up to dT; replay rejected hardened, accepted paper".into())
}

fn naive_pow(b: u64, e: u64, q: u64) -> u64 {
    (0..e).fold(1 % q, |acc, _| acc * b % q)
}

/// Timestamp carrying `t`; the spacing keeps `T ⊕ pw` distinct for `pw < 256`.
fn stamp(t: u64) -> u64 {
    T + (t << 8)
}

fn oracle_equivalence() -> Outcome {
    let mut count = 0u64;
    for q in primes_up_to(50).chain([2, 3]) {
        let p = Prime::from_u64(q).unwrap();
        for b in 0..q {
            let base = Residue::from_u64(b, &p).unwrap();
            for e in 0..2 * q {
                let got = mod_exp(&base, &n(e));
                ensure(got.value() == &n(naive_pow(b, e, q)), || {
                    format!("{b}^{e} mod {q} = {got}")
                })?;
                count += 1;
            }
            let inv = mod_inv(&base);
            match (0..q).find(|x| b * x % q == 1) {
                Some(x) => ensure(inv.as_ref().map(|v| v.value().clone()) == Ok(n(x)), || {
                    format!("inv {b} mod {q}: {inv:?}")
                })?,
                None => ensure(inv == Err(MathError::ZeroInverse), || {
                    format!("inv {b} mod {q}: {inv:?}")
                })?,
            }
        }
    }

    let p = p23();
    let mut identities = 0u64;
    let mut entries = Vec::new();
    for base in 1..23u64 {
        for t in 0..22u8 {
            entries.push((stamp(u64::from(t)), naive_pow(base, 7, 23), t));
        }
    }
    let owf = pinned_owf(&p, &entries);
    let x_s = Exponent::from_u64(7, &p).unwrap();
    for base in 1..23u64 {
        let b = Residue::from_u64(base, &p).unwrap();
        let pw = Residue::from_u64(naive_pow(base, 7, 23), &p).unwrap();
        for r in 2..22u64 {
            for t in 0..22u64 {
                let (c1, c2) = login_core(&b, &b, &pw, stamp(t), &Exponent::from_u64(r, &p).unwrap(), &owf)
                    .map_err(|e| e.to_string())?;
                let c1x = naive_pow(u64::try_from(c1.value()).unwrap(), 7, 23);
                let c1x_inv = (1..23).find(|x| c1x * x % 23 == 1).unwrap();
                let lhs = u64::try_from(c2.value()).unwrap() * c1x_inv % 23;
                ensure(lhs == naive_pow(base, t, 23), || {
                    format!("identity fails base {base} r {r} t {t}")
                })?;
                ensure(
                    verify_core(&x_s, &c1, &c2, &b, &pw, stamp(t), &owf).map_err(|e| e.to_string())?,
                    || format!("verify_core base {base} r {r} t {t}"),
                )?;
                identities += 1;
            }
        }
    }
    Ok(format!(
        "{count} exponentiations and all inverses for p <= 50; {identities} (base, r, t) identities at p = 23"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("completeness", completeness),
        ("worked fixtures", worked_fixtures),
        ("attack matrix", attack_matrix),
        ("cost table", cost_table_cells),
        ("duplicate identities", duplicate_identities),
        ("freshness and replay", freshness_and_replay),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
