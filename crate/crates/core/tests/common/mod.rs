// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use num_bigint::BigUint;
use scauth_core::modmath::Exponent;
use scauth_core::primitives::owf_input;
use scauth_core::{Mode, Owf, Prime, ServerSecret, SystemParams};

pub const T: u64 = 1000;

pub fn n(v: u64) -> BigUint {
    BigUint::from(v)
}

pub fn p23() -> Prime {
    Prime::from_u64(23).unwrap()
}

/// One-way function that maps `T ⊕ pw` to `t` for each listed `(T, pw, t)`.
pub fn pinned_owf(p: &Prime, entries: &[(u64, u64, u8)]) -> Owf {
    Owf::table(
        entries
            .iter()
            .map(|&(t_stamp, pw, t)| (owf_input(t_stamp, &n(pw), p), vec![t])),
    )
}

/// `p = 23`, `x_s = 7`, `t = 3` pinned at `T` for `pw = 17`.
pub fn fixture(mode: Mode) -> SystemParams {
    let p = p23();
    let secret = ServerSecret::new(Exponent::from_u64(7, &p).unwrap(), vec![1; 32], vec![2; 32]).unwrap();
    SystemParams::builder(p.clone(), secret)
        .owf(pinned_owf(&p, &[(T, 17, 3)]))
        .min_bits(5)
        .mode(mode)
        .build()
        .unwrap()
}

/// Fresh parameters over a random prime of `bits` bits.
pub fn random_params<R: rand::Rng>(bits: u64, mode: Mode, rng: &mut R) -> SystemParams {
    SystemParams::generate(bits, rng)
        .unwrap()
        .min_bits(bits)
        .mode(mode)
        .build()
        .unwrap()
}

pub fn primes_up_to(limit: u64) -> impl Iterator<Item = u64> {
    (5..=limit).filter(|&q| (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0))
}
