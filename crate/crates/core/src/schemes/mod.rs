// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! The four protocol variants and the data they exchange.
//!
//! | scheme     | registration base | login identity part      | check digit over |
//! |------------|-------------------|--------------------------|------------------|
//! | `Hl`       | `ID`              | `ID`                     | -                |
//! | `Slh`      | `SID = Red(ID)`   | `SID`                    | -                |
//! | `Kumar`    | `SID = Red(ID)`   | `SID ‖ C_ID`             | `SID`            |
//! | `Proposed` | `ID ⊕ R`          | `ID, R, C_ID`            | `ID ⊕ R`         |
//!
//! All four share one login computation ([`login_core`]) and one
//! verification identity ([`verify_core`]):
//! `C2 · (C1^x_s)^-1 ≡ m_base^t (mod p)`.

mod core;
mod params;
mod persist;
mod phases;
mod registry;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modmath::{MathError, Prime, Residue};
use crate::primitives::{CheckDigit, Owf, PrimitiveError};

pub use self::core::{login_core, login_core_metered, verify_core, verify_core_metered};
pub use self::params::{IdCheck, Mode, ParamsBuilder, Policy, SystemParams, DEFAULT_DELTA_T};
pub use self::persist::{FileError, ParamsFile, FORMAT_VERSION};
pub use self::phases::{
    authenticate, authenticate_metered, hl_authenticate, hl_login, hl_register, kumar_authenticate, kumar_login,
    kumar_register, login, login_metered, prop_authenticate, prop_login, prop_register, prop_register_with_number,
    register, register_metered, slh_authenticate, slh_login, slh_register,
};
pub use self::registry::{Record, Registry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("identity {0} is already registered")]
    DuplicateId(BigUint),
    #[error("identity {0} fails the format check")]
    BadIdFormat(BigUint),
    #[error("shadow identity of {0} collides with an existing registration")]
    ShadowCollision(BigUint),
    #[error("registration number {0} is already assigned")]
    DuplicateRegistrationNumber(BigUint),
    #[error("no unused registration number yields a valid base for identity {0}")]
    RegistrationExhausted(BigUint),
    #[error("expected a {expected} object, got {found}")]
    SchemeMismatch { expected: Scheme, found: Scheme },
    #[error("login exponent must lie in [2, p - 2]")]
    ExponentOutOfRange,
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("malformed credential: {0}")]
    Credential(&'static str),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Math(#[from] MathError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Hl,
    Slh,
    Kumar,
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Hl, Scheme::Slh, Scheme::Kumar, Scheme::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Hl => "hl",
            Scheme::Slh => "slh",
            Scheme::Kumar => "kumar",
            Scheme::Proposed => "proposed",
        }
    }

    /// Human-readable label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Hl => "Hwang-Li",
            Scheme::Slh => "Shen-Lin-Hwang",
            Scheme::Kumar => "Kumar",
            Scheme::Proposed => "Proposed",
        }
    }

    pub(crate) fn wire_tag(self) -> u8 {
        match self {
            Scheme::Hl => 1,
            Scheme::Slh => 2,
            Scheme::Kumar => 3,
            Scheme::Proposed => 4,
        }
    }

    pub(crate) fn from_wire_tag(tag: u8) -> Option<Self> {
        Scheme::ALL.into_iter().find(|s| s.wire_tag() == tag)
    }

    pub fn uses_shadow(self) -> bool {
        matches!(self, Scheme::Slh | Scheme::Kumar)
    }

    pub fn uses_check_digit(self) -> bool {
        matches!(self, Scheme::Kumar | Scheme::Proposed)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown scheme {s:?}"))
    }
}

/// The identity fields of a login message, shaped per scheme.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    Hl {
        id: BigUint,
    },
    Slh {
        sid: BigUint,
    },
    Kumar {
        sid: BigUint,
        c_id: CheckDigit,
    },
    Proposed {
        id: BigUint,
        reg_number: BigUint,
        c_id: CheckDigit,
    },
}

impl Identity {
    pub fn scheme(&self) -> Scheme {
        match self {
            Identity::Hl { .. } => Scheme::Hl,
            Identity::Slh { .. } => Scheme::Slh,
            Identity::Kumar { .. } => Scheme::Kumar,
            Identity::Proposed { .. } => Scheme::Proposed,
        }
    }

    /// The value the server raises to `x_s` to recompute the password.
    pub fn registration_base(&self) -> BigUint {
        match self {
            Identity::Hl { id } => id.clone(),
            Identity::Slh { sid } | Identity::Kumar { sid, .. } => sid.clone(),
            Identity::Proposed { id, reg_number, .. } => id ^ reg_number,
        }
    }

    /// The value raised to `t` in the login computation.
    pub fn message_base(&self) -> BigUint {
        match self {
            Identity::Hl { id } | Identity::Proposed { id, .. } => id.clone(),
            Identity::Slh { sid } | Identity::Kumar { sid, .. } => sid.clone(),
        }
    }

    pub fn check_digit(&self) -> Option<CheckDigit> {
        match self {
            Identity::Kumar { c_id, .. } | Identity::Proposed { c_id, .. } => Some(*c_id),
            _ => None,
        }
    }
}

/// Colon-separated text form: `hl:<id>`, `slh:<sid>`, `kumar:<sid>:<cid>`,
/// `proposed:<id>:<R>:<cid>`.
impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identity::Hl { id } => write!(f, "hl:{id}"),
            Identity::Slh { sid } => write!(f, "slh:{sid}"),
            Identity::Kumar { sid, c_id } => write!(f, "kumar:{sid}:{c_id}"),
            Identity::Proposed { id, reg_number, c_id } => write!(f, "proposed:{id}:{reg_number}:{c_id}"),
        }
    }
}

impl FromStr for Identity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let int = |x: &str| x.parse::<BigUint>().map_err(|e| format!("{x:?}: {e}"));
        let cd = |x: &str| x.parse::<CheckDigit>().map_err(|e| e.to_string());
        match parts.as_slice() {
            ["hl", id] => Ok(Identity::Hl { id: int(id)? }),
            ["slh", sid] => Ok(Identity::Slh { sid: int(sid)? }),
            ["kumar", sid, c] => Ok(Identity::Kumar {
                sid: int(sid)?,
                c_id: cd(c)?,
            }),
            ["proposed", id, r, c] => Ok(Identity::Proposed {
                id: int(id)?,
                reg_number: int(r)?,
                c_id: cd(c)?,
            }),
            _ => Err(format!("malformed identity {s:?}")),
        }
    }
}

/// What the card sends to the server.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LoginMessage {
    pub identity: Identity,
    pub c1: BigUint,
    pub c2: BigUint,
    pub t_stamp: u64,
}

impl LoginMessage {
    pub fn scheme(&self) -> Scheme {
        self.identity.scheme()
    }
}

/// Why a login was accepted or rejected. Only [`Reason::Ok`] accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reason {
    Ok,
    BadIdFormat,
    BadCheckDigit,
    StaleTimestamp,
    Replay,
    VerifyFailed,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::Ok => "OK",
            Reason::BadIdFormat => "BAD_ID_FORMAT",
            Reason::BadCheckDigit => "BAD_CHECK_DIGIT",
            Reason::StaleTimestamp => "STALE_TIMESTAMP",
            Reason::Replay => "REPLAY",
            Reason::VerifyFailed => "VERIFY_FAILED",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AuthDecision {
    reason: Reason,
}

impl AuthDecision {
    pub fn accept() -> Self {
        AuthDecision { reason: Reason::Ok }
    }

    pub fn reject(reason: Reason) -> Self {
        debug_assert_ne!(reason, Reason::Ok);
        AuthDecision { reason }
    }

    pub fn accepted(&self) -> bool {
        self.reason == Reason::Ok
    }

    pub fn reason(&self) -> Reason {
        self.reason
    }
}

impl fmt::Display for AuthDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.accepted() { "accepted" } else { "rejected" };
        write!(f, "{verdict} ({})", self.reason)
    }
}

/// What the user and their smart card hold after registration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credential {
    scheme: Scheme,
    p: Prime,
    owf: Owf,
    id: BigUint,
    pw: Residue,
    sid: Option<Residue>,
    reg_number: Option<BigUint>,
    c_id: Option<CheckDigit>,
}

impl Credential {
    /// Assembles a credential, checking that exactly the fields the scheme
    /// needs are present.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        scheme: Scheme,
        p: Prime,
        owf: Owf,
        id: BigUint,
        pw: BigUint,
        sid: Option<BigUint>,
        reg_number: Option<BigUint>,
        c_id: Option<CheckDigit>,
    ) -> Result<Self, SchemeError> {
        if sid.is_some() != scheme.uses_shadow() {
            return Err(SchemeError::Credential(
                "shadow identity presence does not match scheme",
            ));
        }
        if reg_number.is_some() != (scheme == Scheme::Proposed) {
            return Err(SchemeError::Credential(
                "registration number presence does not match scheme",
            ));
        }
        if c_id.is_some() != scheme.uses_check_digit() {
            return Err(SchemeError::Credential("check digit presence does not match scheme"));
        }
        let pw = Residue::new(pw, &p)?;
        let sid = sid.map(|s| Residue::new(s, &p)).transpose()?;
        Ok(Credential {
            scheme,
            p,
            owf,
            id,
            pw,
            sid,
            reg_number,
            c_id,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn prime(&self) -> &Prime {
        &self.p
    }

    pub fn owf(&self) -> &Owf {
        &self.owf
    }

    pub fn id(&self) -> &BigUint {
        &self.id
    }

    pub fn pw(&self) -> &Residue {
        &self.pw
    }

    pub fn sid(&self) -> Option<&Residue> {
        self.sid.as_ref()
    }

    pub fn reg_number(&self) -> Option<&BigUint> {
        self.reg_number.as_ref()
    }

    pub fn c_id(&self) -> Option<CheckDigit> {
        self.c_id
    }

    /// Replaces the password, e.g. to model a user keying the wrong one.
    pub fn with_pw(mut self, pw: Residue) -> Self {
        self.pw = pw;
        self
    }

    /// Replaces the one-way function handle on the card.
    pub fn with_owf(mut self, owf: Owf) -> Self {
        self.owf = owf;
        self
    }

    /// The identity part this card puts on the wire.
    pub fn identity(&self) -> Identity {
        match self.scheme {
            Scheme::Hl => Identity::Hl { id: self.id.clone() },
            Scheme::Slh => Identity::Slh {
                sid: self.sid.as_ref().expect("validated").value().clone(),
            },
            Scheme::Kumar => Identity::Kumar {
                sid: self.sid.as_ref().expect("validated").value().clone(),
                c_id: self.c_id.expect("validated"),
            },
            Scheme::Proposed => Identity::Proposed {
                id: self.id.clone(),
                reg_number: self.reg_number.clone().expect("validated"),
                c_id: self.c_id.expect("validated"),
            },
        }
    }

    /// The base whose `x_s`-th power is the password.
    pub fn registration_base(&self) -> BigUint {
        self.identity().registration_base()
    }
}
