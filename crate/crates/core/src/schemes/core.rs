// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! The exponentiation core shared by every scheme.

use super::SchemeError;
use crate::costmodel::Meter;
use crate::modmath::{mod_inv, Exponent, Residue};
use crate::primitives::{owf_input, reduce_to_exponent, Owf};

/// `t = h(T ⊕ PW) mod (p - 1)`.
fn derive_t(owf: &Owf, t_stamp: u64, pw: &Residue, meter: &mut Meter) -> Result<Exponent, SchemeError> {
    let p = pw.modulus();
    let digest = meter.hash(owf, &owf_input(t_stamp, pw.value(), p))?;
    Ok(reduce_to_exponent(&digest, p))
}

/// Card-side computation: `C1 = c1_base^r`, `C2 = m_base^t · pw^r`.
pub fn login_core(
    c1_base: &Residue,
    m_base: &Residue,
    pw: &Residue,
    t_stamp: u64,
    r: &Exponent,
    owf: &Owf,
) -> Result<(Residue, Residue), SchemeError> {
    login_core_metered(c1_base, m_base, pw, t_stamp, r, owf, &mut Meter::new())
}

pub fn login_core_metered(
    c1_base: &Residue,
    m_base: &Residue,
    pw: &Residue,
    t_stamp: u64,
    r: &Exponent,
    owf: &Owf,
    meter: &mut Meter,
) -> Result<(Residue, Residue), SchemeError> {
    let p = pw.modulus();
    if !p.is_nontrivial(r.value()) {
        return Err(SchemeError::ExponentOutOfRange);
    }
    let c1 = meter.exp(c1_base, r.value());
    let t = derive_t(owf, t_stamp, pw, meter)?;
    let m = meter.exp(m_base, t.value());
    let masked = meter.exp(pw, r.value());
    let c2 = meter.mul(&m, &masked)?;
    Ok((c1, c2))
}

/// Server-side check: `C2 · (C1^x_s)^-1 == m_base^t` with `t` derived from
/// the recomputed password.
pub fn verify_core(
    x_s: &Exponent,
    c1: &Residue,
    c2: &Residue,
    m_base: &Residue,
    pw_recomputed: &Residue,
    t_stamp: u64,
    owf: &Owf,
) -> Result<bool, SchemeError> {
    verify_core_metered(x_s, c1, c2, m_base, pw_recomputed, t_stamp, owf, &mut Meter::new())
}

#[allow(clippy::too_many_arguments)]
pub fn verify_core_metered(
    x_s: &Exponent,
    c1: &Residue,
    c2: &Residue,
    m_base: &Residue,
    pw_recomputed: &Residue,
    t_stamp: u64,
    owf: &Owf,
    meter: &mut Meter,
) -> Result<bool, SchemeError> {
    let masked = meter.exp(c1, x_s.value());
    let unmasked = meter.mul(c2, &mod_inv(&masked)?)?;
    let t = derive_t(owf, t_stamp, pw_recomputed, meter)?;
    let expected = meter.exp(m_base, t.value());
    Ok(unmasked == expected)
}
