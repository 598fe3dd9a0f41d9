// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Smart-card remote user authentication over `Z/pZ`.
//!
//! Four related schemes share one ElGamal-style login computation:
//!
//! * Hwang-Li, where the password is `ID^x_s mod p`;
//! * Shen-Lin-Hwang, which hides `ID` behind a keyed shadow identity;
//! * Kumar, which adds a keyed check digit over the shadow identity;
//! * the proposed scheme, which drops the shadow identity in favor of a
//!   per-registration number `R` and a check digit over `ID ⊕ R`.
//!
//! [`attacks`] implements every published forgery against them and a matrix
//! runner asserting which schemes fall to which attack. [`costmodel`]
//! measures the primitive operations each phase performs. [`channel`]
//! carries login messages over a simulated link with a tap for the attacker.
//!
//! Not constant time. This is a protocol-logic testbed.

pub mod attacks;
pub mod channel;
pub mod costmodel;
pub mod modmath;
pub mod primitives;
pub mod schemes;

pub use costmodel::{CostVector, Phase};
pub use modmath::{Exponent, Prime, Residue};
pub use primitives::{CheckDigit, Owf, ServerSecret};
pub use schemes::{
    AuthDecision, Credential, Identity, LoginMessage, Mode, Policy, Reason, Registry, Scheme, SchemeError, SystemParams,
};
