// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Registration, login and authentication for each scheme.
//!
//! Every phase has a `*_metered` form that reports primitive invocations to a
//! [`Meter`]; the plain forms discard the counts.

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use super::core::{login_core_metered, verify_core_metered};
use super::registry::{Record, Registry};
use super::{AuthDecision, Credential, IdCheck, Identity, LoginMessage, Reason, Scheme, SchemeError, SystemParams};
use crate::costmodel::Meter;
use crate::modmath::{Exponent, Residue};

/// Random draws before falling back to enumerating registration numbers.
const RANDOM_NUMBER_ATTEMPTS: usize = 1024;
/// Enumeration fallback is only attempted for primes up to this size.
const ENUMERABLE_BITS: u64 = 24;

fn ensure(expected: Scheme, found: Scheme) -> Result<(), SchemeError> {
    if expected == found {
        Ok(())
    } else {
        Err(SchemeError::SchemeMismatch { expected, found })
    }
}

// ---------------------------------------------------------------------------
// Registration

/// Registers `id` under the registry's scheme. `rng` draws the registration
/// number for the proposed scheme and is unused otherwise.
pub fn register<R: Rng + ?Sized>(
    params: &SystemParams,
    registry: &mut Registry,
    id: &BigUint,
    rng: &mut R,
) -> Result<Credential, SchemeError> {
    register_metered(params, registry, id, rng, &mut Meter::new())
}

pub fn register_metered<R: Rng + ?Sized>(
    params: &SystemParams,
    registry: &mut Registry,
    id: &BigUint,
    rng: &mut R,
    meter: &mut Meter,
) -> Result<Credential, SchemeError> {
    match registry.scheme() {
        Scheme::Proposed => {
            let number = pick_registration_number(params, registry, id, rng)?;
            register_proposed(params, registry, id, number, meter)
        }
        scheme => register_classic(params, registry, scheme, id, meter),
    }
}

/// `PW = ID^x_s`.
pub fn hl_register(params: &SystemParams, registry: &mut Registry, id: &BigUint) -> Result<Credential, SchemeError> {
    register_classic(params, registry, Scheme::Hl, id, &mut Meter::new())
}

/// `SID = Red(ID)`, `PW = SID^x_s`.
pub fn slh_register(params: &SystemParams, registry: &mut Registry, id: &BigUint) -> Result<Credential, SchemeError> {
    register_classic(params, registry, Scheme::Slh, id, &mut Meter::new())
}

/// `SID = Red(ID)`, `C_ID = C_K(SID)`, `PW = SID^x_s`.
pub fn kumar_register(params: &SystemParams, registry: &mut Registry, id: &BigUint) -> Result<Credential, SchemeError> {
    register_classic(params, registry, Scheme::Kumar, id, &mut Meter::new())
}

/// Assigns a fresh registration number `R`, then `PW = (ID ⊕ R)^x_s` and
/// `C_ID = C_K(ID ⊕ R)`.
pub fn prop_register<R: Rng + ?Sized>(
    params: &SystemParams,
    registry: &mut Registry,
    id: &BigUint,
    rng: &mut R,
) -> Result<Credential, SchemeError> {
    ensure(Scheme::Proposed, registry.scheme())?;
    register(params, registry, id, rng)
}

/// [`prop_register`] with a caller-chosen registration number.
pub fn prop_register_with_number(
    params: &SystemParams,
    registry: &mut Registry,
    id: &BigUint,
    number: &BigUint,
) -> Result<Credential, SchemeError> {
    register_proposed(params, registry, id, number.clone(), &mut Meter::new())
}

fn register_classic(
    params: &SystemParams,
    registry: &mut Registry,
    scheme: Scheme,
    id: &BigUint,
    meter: &mut Meter,
) -> Result<Credential, SchemeError> {
    ensure(scheme, registry.scheme())?;
    if !params.id_format_ok(id) {
        return Err(SchemeError::BadIdFormat(id.clone()));
    }
    if registry.has_id(id) {
        return Err(SchemeError::DuplicateId(id.clone()));
    }
    let p = params.prime();
    let secret = params.secret();

    let (base, sid) = if scheme.uses_shadow() {
        let sid = meter.shadow(secret, id, p);
        (sid.clone(), Some(sid))
    } else {
        (Residue::new(id.clone(), p)?, None)
    };
    if sid.as_ref().is_some_and(|s| registry.has_sid(s.value())) {
        return Err(SchemeError::ShadowCollision(id.clone()));
    }
    let c_id = if scheme.uses_check_digit() {
        Some(meter.check_digit(secret, base.value(), params.digits())?)
    } else {
        None
    };
    let pw = meter.exp(&base, secret.x_s().value());

    let sid = sid.map(Residue::into_value);
    registry.insert(Record {
        id: id.clone(),
        sid: sid.clone(),
        reg_number: None,
    })?;
    Credential::from_parts(
        scheme,
        p.clone(),
        params.owf().clone(),
        id.clone(),
        pw.into_value(),
        sid,
        None,
        c_id,
    )
}

fn register_proposed(
    params: &SystemParams,
    registry: &mut Registry,
    id: &BigUint,
    number: BigUint,
    meter: &mut Meter,
) -> Result<Credential, SchemeError> {
    ensure(Scheme::Proposed, registry.scheme())?;
    if !params.id_format_ok(id) {
        return Err(SchemeError::BadIdFormat(id.clone()));
    }
    if registry.has_reg_number(&number) {
        return Err(SchemeError::DuplicateRegistrationNumber(number));
    }
    let p = params.prime();
    let secret = params.secret();
    let base_value = id ^ &number;
    if !p.is_nontrivial(&base_value) {
        return Err(SchemeError::BadIdFormat(id.clone()));
    }
    let base = Residue::new(base_value, p)?;
    let c_id = meter.check_digit(secret, base.value(), params.digits())?;
    let pw = meter.exp(&base, secret.x_s().value());

    registry.insert(Record {
        id: id.clone(),
        sid: None,
        reg_number: Some(number.clone()),
    })?;
    Credential::from_parts(
        Scheme::Proposed,
        p.clone(),
        params.owf().clone(),
        id.clone(),
        pw.into_value(),
        None,
        Some(number),
        Some(c_id),
    )
}

/// Uniform over `[1, 2^bits(p))`, restricted to unused numbers that give a
/// usable base `ID ⊕ R`.
fn pick_registration_number<R: Rng + ?Sized>(
    params: &SystemParams,
    registry: &Registry,
    id: &BigUint,
    rng: &mut R,
) -> Result<BigUint, SchemeError> {
    let p = params.prime();
    let usable = |r: &BigUint| !registry.has_reg_number(r) && p.is_nontrivial(&(id ^ r));
    let one = BigUint::from(1u32);
    let bound = BigUint::from(1u32) << p.bits();
    for _ in 0..RANDOM_NUMBER_ATTEMPTS {
        let r = rng.gen_biguint_range(&one, &bound);
        if usable(&r) {
            return Ok(r);
        }
    }
    if p.bits() <= ENUMERABLE_BITS {
        let candidates: Vec<u64> = (1..1u64 << p.bits()).filter(|r| usable(&BigUint::from(*r))).collect();
        if !candidates.is_empty() {
            return Ok(BigUint::from(candidates[rng.gen_range(0..candidates.len())]));
        }
    }
    Err(SchemeError::RegistrationExhausted(id.clone()))
}

// ---------------------------------------------------------------------------
// Login

/// Builds the login message for any credential.
pub fn login(cred: &Credential, t_stamp: u64, r: &Exponent) -> Result<LoginMessage, SchemeError> {
    login_metered(cred, t_stamp, r, &mut Meter::new())
}

pub fn login_metered(
    cred: &Credential,
    t_stamp: u64,
    r: &Exponent,
    meter: &mut Meter,
) -> Result<LoginMessage, SchemeError> {
    let p = cred.prime();
    let identity = cred.identity();
    let c1_base = Residue::new(identity.registration_base(), p)?;
    let m_base = Residue::new(identity.message_base(), p)?;
    let (c1, c2) = login_core_metered(&c1_base, &m_base, cred.pw(), t_stamp, r, cred.owf(), meter)?;
    Ok(LoginMessage {
        identity,
        c1: c1.into_value(),
        c2: c2.into_value(),
        t_stamp,
    })
}

/// `(ID, C1, C2, T)`.
pub fn hl_login(cred: &Credential, t_stamp: u64, r: &Exponent) -> Result<LoginMessage, SchemeError> {
    ensure(Scheme::Hl, cred.scheme())?;
    login(cred, t_stamp, r)
}

/// `(SID, C1, C2, T)`: the Hwang-Li computation over the shadow identity.
pub fn slh_login(cred: &Credential, t_stamp: u64, r: &Exponent) -> Result<LoginMessage, SchemeError> {
    ensure(Scheme::Slh, cred.scheme())?;
    login(cred, t_stamp, r)
}

/// `(SID ‖ C_ID, C1, C2, T)`.
pub fn kumar_login(cred: &Credential, t_stamp: u64, r: &Exponent) -> Result<LoginMessage, SchemeError> {
    ensure(Scheme::Kumar, cred.scheme())?;
    login(cred, t_stamp, r)
}

/// `(ID, R, C_ID, C1, C2, T)` with `C1 = (ID ⊕ R)^r` and `m = ID^t`.
pub fn prop_login(cred: &Credential, t_stamp: u64, r: &Exponent) -> Result<LoginMessage, SchemeError> {
    ensure(Scheme::Proposed, cred.scheme())?;
    login(cred, t_stamp, r)
}

// ---------------------------------------------------------------------------
// Authentication

/// Runs the server's checks in the order the scheme prescribes and reports
/// the first one that fails:
///
/// 1. identity validity (format, plus registry membership under
///    [`IdCheck::Registry`]),
/// 2. check digit (Kumar and proposed only),
/// 3. freshness `0 <= T' - T <= ΔT`, then the replay cache if enabled,
/// 4. the verification identity.
///
/// `Err` is reserved for misconfiguration (wrong scheme, missing test
/// vector); every protocol-level failure is an [`AuthDecision`].
pub fn authenticate(
    params: &SystemParams,
    registry: &mut Registry,
    msg: &LoginMessage,
    t_now: u64,
) -> Result<AuthDecision, SchemeError> {
    authenticate_metered(params, registry, msg, t_now, &mut Meter::new())
}

pub fn authenticate_metered(
    params: &SystemParams,
    registry: &mut Registry,
    msg: &LoginMessage,
    t_now: u64,
    meter: &mut Meter,
) -> Result<AuthDecision, SchemeError> {
    ensure(registry.scheme(), msg.scheme())?;
    let p = params.prime();
    let secret = params.secret();
    let policy = params.policy();
    let identity = &msg.identity;
    let base = identity.registration_base();

    let format_ok = match identity {
        Identity::Hl { id } => params.id_format_ok(id),
        Identity::Slh { sid } | Identity::Kumar { sid, .. } => p.is_nontrivial(sid),
        Identity::Proposed { id, .. } => params.id_format_ok(id) && p.is_nontrivial(&base),
    };
    if !format_ok || (policy.id_check == IdCheck::Registry && !registry.contains(identity)) {
        return Ok(AuthDecision::reject(Reason::BadIdFormat));
    }

    if let Some(presented) = identity.check_digit() {
        let expected = meter.check_digit(secret, &base, params.digits())?;
        if presented != expected {
            return Ok(AuthDecision::reject(Reason::BadCheckDigit));
        }
    }

    if !params.is_fresh(msg.t_stamp, t_now) {
        return Ok(AuthDecision::reject(Reason::StaleTimestamp));
    }
    if policy.replay_cache && registry.was_seen(identity, msg.t_stamp) {
        return Ok(AuthDecision::reject(Reason::Replay));
    }

    let (Ok(c1), Ok(c2)) = (Residue::new(msg.c1.clone(), p), Residue::new(msg.c2.clone(), p)) else {
        return Ok(AuthDecision::reject(Reason::VerifyFailed));
    };
    if c1.is_zero() || c2.is_zero() {
        return Ok(AuthDecision::reject(Reason::VerifyFailed));
    }
    let base = Residue::new(base, p)?;
    let m_base = Residue::new(identity.message_base(), p)?;
    let pw = meter.exp(&base, secret.x_s().value());
    if !verify_core_metered(secret.x_s(), &c1, &c2, &m_base, &pw, msg.t_stamp, params.owf(), meter)? {
        return Ok(AuthDecision::reject(Reason::VerifyFailed));
    }

    if policy.replay_cache {
        registry.remember(identity, msg.t_stamp, t_now, 2 * params.delta_t());
    }
    Ok(AuthDecision::accept())
}

pub fn hl_authenticate(
    params: &SystemParams,
    registry: &mut Registry,
    msg: &LoginMessage,
    t_now: u64,
) -> Result<AuthDecision, SchemeError> {
    ensure(Scheme::Hl, msg.scheme())?;
    authenticate(params, registry, msg, t_now)
}

pub fn slh_authenticate(
    params: &SystemParams,
    registry: &mut Registry,
    msg: &LoginMessage,
    t_now: u64,
) -> Result<AuthDecision, SchemeError> {
    ensure(Scheme::Slh, msg.scheme())?;
    authenticate(params, registry, msg, t_now)
}

pub fn kumar_authenticate(
    params: &SystemParams,
    registry: &mut Registry,
    msg: &LoginMessage,
    t_now: u64,
) -> Result<AuthDecision, SchemeError> {
    ensure(Scheme::Kumar, msg.scheme())?;
    authenticate(params, registry, msg, t_now)
}

pub fn prop_authenticate(
    params: &SystemParams,
    registry: &mut Registry,
    msg: &LoginMessage,
    t_now: u64,
) -> Result<AuthDecision, SchemeError> {
    ensure(Scheme::Proposed, msg.scheme())?;
    authenticate(params, registry, msg, t_now)
}
