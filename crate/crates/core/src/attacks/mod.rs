// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Published attacks as executable forgery procedures.
//!
//! All authentication-phase forgeries exploit the same structure: if
//! `PW = B^x_s` then `PW^r = (B^r)^x_s` and `PW_1 · PW_2 = (B_1 · B_2)^x_s`,
//! so a legitimate `(base, password)` pair yields new valid pairs without the
//! server secret. The schemes differ only in what `base` is and whether a
//! keyed check digit must accompany it.
//!
//! Erratum handled here: the masquerade attack states its condition as
//! `gcd(r, p) = 1` and recovers `PW_k = PW_b^-r`. Inverting the exponent
//! needs `gcd(r, p - 1) = 1` and the recovery is `PW_b^(r^-1 mod (p - 1))`;
//! that is what [`shen_masquerade`] and [`shen_recover_pw`] implement.

mod matrix;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modmath::{mod_exp, Prime, Residue};
use crate::primitives::{CheckDigit, Owf};
use crate::schemes::{Credential, Scheme, SchemeError};

pub use matrix::{
    binomial_interval, run_attack_matrix, run_cell, CellReport, Expected, MatrixConfig, MatrixReport, CONFIDENCE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("a coalition needs at least two pairs, got {0}")]
    EmptyCoalition(usize),
    #[error("exponent {0} is not invertible modulo p - 1")]
    NonInvertibleExponent(BigUint),
    #[error("forgery exponent must be at least 1")]
    ZeroExponent,
    #[error("inputs live under different moduli")]
    ModulusMismatch,
    #[error("attack {attack} does not apply to scheme {scheme}")]
    NotApplicable { attack: AttackId, scheme: Scheme },
    #[error("attack matrix deviates from expectation in {} cell(s): {}", .0.len(), .0.join("; "))]
    MatrixMismatch(Vec<String>),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackId {
    /// Square a legitimate pair.
    ChanCheng,
    /// Raise a legitimate pair to an arbitrary power.
    Mech1,
    /// Multiply the pairs of a coalition.
    Mech2,
    /// Register a power of the victim's identity, then take the root of the
    /// issued password.
    Shen,
    /// Mechanism I over shadow identities.
    Leung,
    /// Forgery with a uniformly guessed check digit.
    CidGuess,
    /// Mechanism I from a primitive-root identity, swept over every target.
    PrimitiveRoot,
}

impl AttackId {
    pub const ALL: [AttackId; 7] = [
        AttackId::ChanCheng,
        AttackId::Mech1,
        AttackId::Mech2,
        AttackId::Shen,
        AttackId::Leung,
        AttackId::CidGuess,
        AttackId::PrimitiveRoot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackId::ChanCheng => "chan-cheng",
            AttackId::Mech1 => "mech1",
            AttackId::Mech2 => "mech2",
            AttackId::Shen => "shen",
            AttackId::Leung => "leung",
            AttackId::CidGuess => "cid-guess",
            AttackId::PrimitiveRoot => "primitive-root",
        }
    }
}

impl fmt::Display for AttackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown attack {s:?}"))
    }
}

/// A `(base, password)` pair produced without the server secret. Whether
/// it authenticates is for the scheme to decide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForgedPair {
    /// `ID`, `SID` or `ID ⊕ R` depending on the scheme.
    pub base: Residue,
    pub pw: Residue,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub attack: AttackId,
    /// Source pairs as `(base, pw)`.
    pub sources: Vec<(BigUint, BigUint)>,
    pub exponent: Option<BigUint>,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} from", self.attack)?;
        for (b, pw) in &self.sources {
            write!(f, " ({b}, {pw})")?;
        }
        if let Some(e) = &self.exponent {
            write!(f, " with exponent {e}")?;
        }
        Ok(())
    }
}

fn same_modulus(a: &Residue, b: &Residue) -> Result<(), AttackError> {
    if a.modulus() == b.modulus() {
        Ok(())
    } else {
        Err(AttackError::ModulusMismatch)
    }
}

fn power_pair(attack: AttackId, base: &Residue, pw: &Residue, r: &BigUint) -> Result<ForgedPair, AttackError> {
    same_modulus(base, pw)?;
    if r.is_zero() {
        return Err(AttackError::ZeroExponent);
    }
    Ok(ForgedPair {
        base: mod_exp(base, r),
        pw: mod_exp(pw, r),
        provenance: Provenance {
            attack,
            sources: vec![(base.value().clone(), pw.value().clone())],
            exponent: Some(r.clone()),
        },
    })
}

/// `(ID_b², PW_b²) mod p`.
pub fn chan_cheng_forge(id_b: &Residue, pw_b: &Residue) -> Result<ForgedPair, AttackError> {
    let mut f = power_pair(AttackId::ChanCheng, id_b, pw_b, &BigUint::from(2u32))?;
    f.provenance.exponent = None;
    Ok(f)
}

/// `(ID_b^r, PW_b^r) mod p`, `r >= 1`.
pub fn chang_hwang_mech1(id_b: &Residue, pw_b: &Residue, r: &BigUint) -> Result<ForgedPair, AttackError> {
    power_pair(AttackId::Mech1, id_b, pw_b, r)
}

/// `(∏ ID, ∏ PW) mod p` over a coalition of at least two pairs.
pub fn chang_hwang_mech2(pairs: &[(Residue, Residue)]) -> Result<ForgedPair, AttackError> {
    if pairs.len() < 2 {
        return Err(AttackError::EmptyCoalition(pairs.len()));
    }
    let p = pairs[0].0.modulus();
    let mut base = Residue::one(p);
    let mut pw = Residue::one(p);
    for (b, w) in pairs {
        same_modulus(&base, b)?;
        same_modulus(&base, w)?;
        base = base.mul(b).map_err(|_| AttackError::ModulusMismatch)?;
        pw = pw.mul(w).map_err(|_| AttackError::ModulusMismatch)?;
    }
    Ok(ForgedPair {
        base,
        pw,
        provenance: Provenance {
            attack: AttackId::Mech2,
            sources: pairs
                .iter()
                .map(|(b, w)| (b.value().clone(), w.value().clone()))
                .collect(),
            exponent: None,
        },
    })
}

fn invert_exponent(r: &BigUint, p: &Prime) -> Result<BigUint, AttackError> {
    let order = p.group_order();
    if !r.gcd(&order).is_one() {
        return Err(AttackError::NonInvertibleExponent(r.clone()));
    }
    r.modinv(&order)
        .ok_or_else(|| AttackError::NonInvertibleExponent(r.clone()))
}

/// The identity the attacker registers: `ID_b = ID_k^r mod p`. Requires
/// `gcd(r, p - 1) = 1` so the password can be pulled back afterwards.
pub fn shen_masquerade(id_k: &Residue, r: &BigUint) -> Result<Residue, AttackError> {
    invert_exponent(r, id_k.modulus())?;
    Ok(mod_exp(id_k, r))
}

/// Victim password from the attacker's issued one:
/// `PW_k = PW_b^(r^-1 mod (p - 1))`.
pub fn shen_recover_pw(pw_b: &Residue, r: &BigUint) -> Result<Residue, AttackError> {
    let inv = invert_exponent(r, pw_b.modulus())?;
    Ok(mod_exp(pw_b, &inv))
}

/// `(SID_b^r, PW_b^r) mod p`: mechanism I applied to shadow identities.
pub fn leung_forge(sid_b: &Residue, pw_b: &Residue, r: &BigUint) -> Result<ForgedPair, AttackError> {
    power_pair(AttackId::Leung, sid_b, pw_b, r)
}

/// Against the proposed scheme: shift the registration base to
/// `(ID_i ⊕ R)^k` with password `PW_i^k`. Any split `ID_b ⊕ R' ` of the new
/// base verifies algebraically; what it lacks is the matching check digit.
pub fn prop_attack_attempt(
    id_i: &BigUint,
    reg_number: &BigUint,
    pw_i: &Residue,
    k: &BigUint,
) -> Result<ForgedPair, AttackError> {
    let p = pw_i.modulus();
    let base = Residue::new(id_i ^ reg_number, p).map_err(SchemeError::from)?;
    power_pair(AttackId::Mech1, &base, pw_i, k)
}

/// Every `(ID_b, R')` with `ID_b ⊕ R' = base` and `ID_b` a usable identity
/// (`2 <= ID_b <= p - 2`). Intended for small primes.
pub fn splits(base: &BigUint, p: &Prime) -> impl Iterator<Item = (BigUint, BigUint)> {
    let base = base.clone();
    num_iter(BigUint::from(2u32), p.group_order()).map(move |id_b| {
        let r = &id_b ^ &base;
        (id_b, r)
    })
}

fn num_iter(from: BigUint, to: BigUint) -> impl Iterator<Item = BigUint> {
    let mut cur = from;
    std::iter::from_fn(move || {
        if cur < to {
            let out = cur.clone();
            cur += 1u32;
            Some(out)
        } else {
            None
        }
    })
}

/// Smallest generator of `(Z/pZ)*`, found by brute force. Practical for
/// primes up to a few million.
pub fn primitive_root(p: &Prime) -> Option<Residue> {
    let order = p.group_order();
    let factors = small_prime_factors(&order)?;
    num_iter(BigUint::from(2u32), p.value().clone())
        .map(|g| Residue::new(g, p).expect("below p"))
        .find(|g| factors.iter().all(|q| !mod_exp(g, &(&order / q)).value().is_one()))
}

fn small_prime_factors(n: &BigUint) -> Option<Vec<BigUint>> {
    let mut n = u64::try_from(n).ok()?;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigUint::from(d));
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(BigUint::from(n));
    }
    Some(out)
}

/// How a forged pair is presented on the wire.
#[derive(Debug, Clone)]
pub enum Presentation {
    /// Hwang-Li or Shen-Lin-Hwang: the base is the identity.
    Plain,
    /// Kumar: `SID ‖ C_ID` with an attacker-chosen tag.
    CheckDigit(CheckDigit),
    /// Proposed: `(ID_b, R', C_ID)` with `R' = ID_b ⊕ base`.
    Split { id_b: BigUint, c_id: CheckDigit },
}

/// Loads a forged pair onto a smart card so the honest login code can
/// produce the forged message.
pub fn forged_card(
    scheme: Scheme,
    forged: &ForgedPair,
    presentation: Presentation,
    owf: &Owf,
) -> Result<Credential, AttackError> {
    let p = forged.base.modulus().clone();
    let base = forged.base.value().clone();
    let pw = forged.pw.value().clone();
    let owf = owf.clone();
    let cred = match (scheme, presentation) {
        (Scheme::Hl, Presentation::Plain) => Credential::from_parts(scheme, p, owf, base, pw, None, None, None),
        (Scheme::Slh, Presentation::Plain) => {
            Credential::from_parts(scheme, p, owf, BigUint::zero(), pw, Some(base), None, None)
        }
        (Scheme::Kumar, Presentation::CheckDigit(c)) => {
            Credential::from_parts(scheme, p, owf, BigUint::zero(), pw, Some(base), None, Some(c))
        }
        (Scheme::Proposed, Presentation::Split { id_b, c_id }) => {
            let r = &id_b ^ &base;
            Credential::from_parts(scheme, p, owf, id_b, pw, None, Some(r), Some(c_id))
        }
        (scheme, _) => {
            return Err(AttackError::NotApplicable {
                attack: forged.provenance.attack,
                scheme,
            })
        }
    };
    Ok(cred?)
}
