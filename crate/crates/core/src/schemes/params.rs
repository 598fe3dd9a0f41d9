// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SchemeError;
use crate::modmath::{MathError, Prime};
use crate::primitives::{self, Owf, ServerSecret, DEFAULT_CHECK_DIGITS};

/// Default freshness window in clock ticks.
pub const DEFAULT_DELTA_T: u64 = 60;

const DEFAULT_MIN_BITS: u64 = 8;

/// How "test the validity of the identity" is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdCheck {
    /// Structural format only; the published schemes as written.
    FormatOnly,
    /// Format plus membership in the server's registry.
    Registry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub id_check: IdCheck,
    /// Reject a second acceptance of the same `(identity, T)` pair.
    pub replay_cache: bool,
}

impl Policy {
    pub fn paper() -> Self {
        Policy {
            id_check: IdCheck::FormatOnly,
            replay_cache: false,
        }
    }

    pub fn hardened() -> Self {
        Policy {
            id_check: IdCheck::Registry,
            replay_cache: true,
        }
    }
}

/// Named presets for [`Policy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Format-only identity check, no replay cache. The published attacks
    /// succeed where the literature says they do.
    Paper,
    Hardened,
}

impl Mode {
    pub fn policy(self) -> Policy {
        match self {
            Mode::Paper => Policy::paper(),
            Mode::Hardened => Policy::hardened(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Hardened => "hardened",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Mode::Paper),
            "hardened" => Ok(Mode::Hardened),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// Server-side configuration: the prime, the secrets, and the policy knobs.
#[derive(Debug, Clone)]
pub struct SystemParams {
    p: Prime,
    secret: ServerSecret,
    owf: Owf,
    delta_t: u64,
    digits: u8,
    id_bits: Option<u64>,
    policy: Policy,
}

impl SystemParams {
    pub fn builder(p: Prime, secret: ServerSecret) -> ParamsBuilder {
        ParamsBuilder {
            p,
            secret,
            owf: Owf::Sha256,
            delta_t: DEFAULT_DELTA_T,
            digits: DEFAULT_CHECK_DIGITS,
            id_bits: None,
            policy: Policy::hardened(),
            min_bits: DEFAULT_MIN_BITS,
        }
    }

    /// Fresh prime of `bits` bits plus a fresh secret, everything else default.
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<ParamsBuilder, MathError> {
        let p = Prime::generate(bits, rng)?;
        let secret = ServerSecret::generate(&p, rng);
        Ok(Self::builder(p, secret))
    }

    pub fn prime(&self) -> &Prime {
        &self.p
    }

    pub fn secret(&self) -> &ServerSecret {
        &self.secret
    }

    pub fn owf(&self) -> &Owf {
        &self.owf
    }

    pub fn delta_t(&self) -> u64 {
        self.delta_t
    }

    pub fn digits(&self) -> u8 {
        self.digits
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn id_bits(&self) -> Option<u64> {
        self.id_bits
    }

    /// Returns a copy with a different policy.
    pub fn with_policy(&self, policy: Policy) -> Self {
        SystemParams { policy, ..self.clone() }
    }

    /// Structural identity check: `2 <= id <= p - 2`, within the configured
    /// bit width. `0`, `1` and `p - 1` are excluded because their powers are
    /// trivially predictable.
    pub fn id_format_ok(&self, id: &BigUint) -> bool {
        self.p.is_nontrivial(id) && self.id_bits.is_none_or(|b| id.bits() <= b)
    }

    /// Freshness per the one-sided bound, with future-dated stamps rejected.
    pub fn is_fresh(&self, t_stamp: u64, t_now: u64) -> bool {
        t_now >= t_stamp && t_now - t_stamp <= self.delta_t
    }
}

pub struct ParamsBuilder {
    p: Prime,
    secret: ServerSecret,
    owf: Owf,
    delta_t: u64,
    digits: u8,
    id_bits: Option<u64>,
    policy: Policy,
    min_bits: u64,
}

impl ParamsBuilder {
    pub fn owf(mut self, owf: Owf) -> Self {
        self.owf = owf;
        self
    }

    pub fn delta_t(mut self, delta_t: u64) -> Self {
        self.delta_t = delta_t;
        self
    }

    pub fn digits(mut self, digits: u8) -> Self {
        self.digits = digits;
        self
    }

    pub fn id_bits(mut self, bits: u64) -> Self {
        self.id_bits = Some(bits);
        self
    }

    pub fn policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn mode(self, mode: Mode) -> Self {
        self.policy(mode.policy())
    }

    /// Lowers or raises the bit-length floor for `p`. Desk fixtures such as
    /// `p = 23` need this below the default of 8.
    pub fn min_bits(mut self, bits: u64) -> Self {
        self.min_bits = bits;
        self
    }

    pub fn build(self) -> Result<SystemParams, SchemeError> {
        let err = |m: String| Err(SchemeError::Params(m));
        if self.p.value() < &BigUint::from(5u32) {
            return err(format!("p = {} leaves no room for exponents in [2, p - 2]", self.p));
        }
        if self.p.bits() < self.min_bits {
            return err(format!("p has {} bits, minimum is {}", self.p.bits(), self.min_bits));
        }
        if self.delta_t == 0 {
            return err("delta_t must be positive".into());
        }
        primitives::digit_bound(self.digits)?;
        if self.secret.x_s().value() >= &self.p.group_order() {
            return err("x_s must be below p - 1".into());
        }
        Ok(SystemParams {
            p: self.p,
            secret: self.secret,
            owf: self.owf,
            delta_t: self.delta_t,
            digits: self.digits,
            id_bits: self.id_bits,
            policy: self.policy,
        })
    }
}
