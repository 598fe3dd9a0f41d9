// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision arithmetic in the multiplicative group modulo a prime.
//!
//! Every value that travels through the schemes is a [`Residue`] tied to the
//! [`Prime`] it lives under. Exponents are reduced modulo `p - 1` and carried
//! as [`Exponent`].

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Miller-Rabin rounds used by [`is_probable_prime`]. Error probability is
/// bounded by `4^-40 = 2^-80`.
pub const MILLER_RABIN_ROUNDS: usize = 40;

/// Smallest bit length accepted by [`Prime::generate`].
pub const MIN_PRIME_BITS: u64 = 8;

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("prime bit length {0} is below the minimum of {MIN_PRIME_BITS}")]
    BitsTooSmall(u64),
    #[error("value {value} is out of range for modulus {modulus}")]
    OutOfRange { value: BigUint, modulus: BigUint },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands live under different moduli")]
    ModulusMismatch,
}

/// A probable prime modulus. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Prime(Arc<BigUint>);

impl Prime {
    /// Wraps `value` after a primality check.
    pub fn new(value: BigUint) -> Result<Self, MathError> {
        if is_probable_prime(&value) {
            Ok(Prime(Arc::new(value)))
        } else {
            Err(MathError::NotPrime(value))
        }
    }

    /// Shorthand for small fixtures.
    pub fn from_u64(value: u64) -> Result<Self, MathError> {
        Self::new(BigUint::from(value))
    }

    /// Draws a probable prime of exactly `bits` bits.
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<Self, MathError> {
        if bits < MIN_PRIME_BITS {
            return Err(MathError::BitsTooSmall(bits));
        }
        loop {
            let mut candidate = rng.gen_biguint(bits);
            candidate.set_bit(bits - 1, true);
            candidate.set_bit(0, true);
            if is_probable_prime(&candidate) {
                return Ok(Prime(Arc::new(candidate)));
            }
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// Order of the multiplicative group, `p - 1`.
    pub fn group_order(&self) -> BigUint {
        self.value() - 1u32
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    /// Whether `x` is a residue usable as an exponentiation base in the
    /// schemes: `2 <= x <= p - 2`.
    pub fn is_nontrivial(&self, x: &BigUint) -> bool {
        *x >= BigUint::from(2u32) && *x < self.group_order()
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prime({})", self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element of `Z/pZ`, always in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigUint,
    modulus: Prime,
}

impl Residue {
    pub fn new(value: BigUint, modulus: &Prime) -> Result<Self, MathError> {
        if &value >= modulus.value() {
            return Err(MathError::OutOfRange {
                value,
                modulus: modulus.value().clone(),
            });
        }
        Ok(Residue {
            value,
            modulus: modulus.clone(),
        })
    }

    /// Reduces an arbitrary integer into the residue range.
    pub fn reduce(value: &BigUint, modulus: &Prime) -> Self {
        Residue {
            value: value % modulus.value(),
            modulus: modulus.clone(),
        }
    }

    pub fn from_u64(value: u64, modulus: &Prime) -> Result<Self, MathError> {
        Self::new(BigUint::from(value), modulus)
    }

    pub fn one(modulus: &Prime) -> Self {
        Self::reduce(&BigUint::one(), modulus)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    pub fn modulus(&self) -> &Prime {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Product modulo `p`.
    pub fn mul(&self, other: &Residue) -> Result<Residue, MathError> {
        if self.modulus != other.modulus {
            return Err(MathError::ModulusMismatch);
        }
        Ok(Residue::reduce(&(&self.value * &other.value), &self.modulus))
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// An exponent reduced modulo the group order: `0 <= value < p - 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(BigUint);

impl Exponent {
    pub fn new(value: BigUint, modulus: &Prime) -> Result<Self, MathError> {
        let order = modulus.group_order();
        if value >= order {
            return Err(MathError::OutOfRange { value, modulus: order });
        }
        Ok(Exponent(value))
    }

    pub fn from_u64(value: u64, modulus: &Prime) -> Result<Self, MathError> {
        Self::new(BigUint::from(value), modulus)
    }

    /// Reduces `value` modulo `p - 1`.
    pub fn reduce(value: &BigUint, modulus: &Prime) -> Self {
        Exponent(value % modulus.group_order())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({})", self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `base^exp mod p`. Total: `x^0 = 1` for every `x`, including zero.
pub fn mod_exp(base: &Residue, exp: &BigUint) -> Residue {
    let p = base.modulus();
    let value = match (u64::try_from(p.value()), u64::try_from(base.value())) {
        (Ok(m), Ok(b)) => BigUint::from(word_modpow(b, exp, m)),
        _ => base.value().modpow(exp, p.value()),
    };
    Residue {
        value,
        modulus: p.clone(),
    }
}

/// Left-to-right square and multiply in machine words, for moduli below
/// 2^64 where the general routine is dominated by allocation.
fn word_modpow(base: u64, exp: &BigUint, m: u64) -> u64 {
    let mul = |a: u64, b: u64| (u128::from(a) * u128::from(b) % u128::from(m)) as u64;
    let mut acc = 1 % m;
    for i in (0..exp.bits()).rev() {
        acc = mul(acc, acc);
        if exp.bit(i) {
            acc = mul(acc, base);
        }
    }
    acc
}

/// Multiplicative inverse modulo `p`.
pub fn mod_inv(a: &Residue) -> Result<Residue, MathError> {
    let p = a.modulus();
    let inv = a.value().modinv(p.value()).ok_or(MathError::ZeroInverse)?;
    Ok(Residue {
        value: inv,
        modulus: p.clone(),
    })
}

/// Constraint applied by [`sample_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coprimality {
    Unconstrained,
    /// `gcd(r, p - 1) = 1`, so that `r` is invertible modulo the group order.
    GroupOrder,
}

/// Uniform `r` in `[2, p - 2]`, rejection-sampled until the coprimality
/// constraint holds. Requires `p >= 5`.
pub fn sample_exponent<R: Rng + ?Sized>(modulus: &Prime, coprime: Coprimality, rng: &mut R) -> Exponent {
    let low = BigUint::from(2u32);
    let high = modulus.group_order();
    assert!(high > low, "sample_exponent needs p >= 5, got {modulus}");
    loop {
        let r = rng.gen_biguint_range(&low, &high);
        if coprime == Coprimality::Unconstrained || r.gcd(&high).is_one() {
            return Exponent(r);
        }
    }
}

/// Miller-Rabin with [`MILLER_RABIN_ROUNDS`] witnesses drawn from a stream
/// seeded by `n`, so the verdict for a given `n` never changes between runs.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;

    let mut seed = [0u8; 32];
    for (i, b) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= b;
    }
    let mut rng = ChaCha20Rng::from_seed(seed);

    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p23() -> Prime {
        Prime::from_u64(23).unwrap()
    }

    fn r(v: u64, p: &Prime) -> Residue {
        Residue::from_u64(v, p).unwrap()
    }

    fn naive_pow(base: u64, exp: u64, p: u64) -> u64 {
        let mut acc = 1 % p;
        for _ in 0..exp {
            acc = acc * base % p;
        }
        acc
    }

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn mod_exp_worked_example() {
        let p = p23();
        assert_eq!(mod_exp(&r(5, &p), &BigUint::from(7u32)), r(17, &p));
    }

    #[test]
    fn mod_exp_zero_exponent_is_one() {
        let p = p23();
        for x in 0..23 {
            assert_eq!(mod_exp(&r(x, &p), &BigUint::zero()), r(1, &p));
        }
    }

    #[test]
    fn mod_exp_unit_base() {
        let p = p23();
        for k in 0..100u32 {
            assert_eq!(mod_exp(&r(1, &p), &BigUint::from(k)), r(1, &p));
        }
    }

    #[test]
    fn mod_inv_examples() {
        let p = p23();
        assert_eq!(mod_inv(&r(8, &p)).unwrap(), r(3, &p));
        assert_eq!(mod_inv(&r(1, &p)).unwrap(), r(1, &p));
        assert_eq!(mod_inv(&r(0, &p)), Err(MathError::ZeroInverse));
    }

    #[test]
    fn residue_rejects_out_of_range() {
        let p = p23();
        assert!(matches!(Residue::from_u64(23, &p), Err(MathError::OutOfRange { .. })));
        assert_eq!(Residue::reduce(&BigUint::from(25u32), &p), r(2, &p));
    }

    #[test]
    fn exponent_rejects_group_order() {
        let p = p23();
        assert!(Exponent::from_u64(21, &p).is_ok());
        assert!(Exponent::from_u64(22, &p).is_err());
        assert_eq!(
            Exponent::reduce(&BigUint::from(25u32), &p).value(),
            &BigUint::from(3u32)
        );
    }

    #[test]
    fn prime_rejects_composites() {
        assert!(matches!(Prime::from_u64(21), Err(MathError::NotPrime(_))));
        assert!(Prime::from_u64(1).is_err());
        // Carmichael numbers fool Fermat but not Miller-Rabin.
        for c in [561u64, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_probable_prime(&BigUint::from(c)), "{c}");
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000u64 {
            assert_eq!(is_probable_prime(&BigUint::from(n)), naive_is_prime(n), "{n}");
        }
    }

    #[test]
    fn generate_exact_bit_lengths() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for bits in [8u64, 16, 64, 1024] {
            let p = Prime::generate(bits, &mut rng).unwrap();
            assert_eq!(p.bits(), bits);
            assert!(is_probable_prime(p.value()));
        }
        let p8 = Prime::generate(8, &mut rng).unwrap();
        let v = p8.value().to_u64_digits()[0];
        assert!((128..=255).contains(&v) && naive_is_prime(v));
        assert_eq!(Prime::generate(7, &mut rng), Err(MathError::BitsTooSmall(7)));
    }

    #[test]
    fn sample_exponent_range() {
        let p = p23();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let e = sample_exponent(&p, Coprimality::Unconstrained, &mut rng);
            let v = e.value().to_u64_digits().first().copied().unwrap_or(0);
            assert!((2..=21).contains(&v));
        }
    }

    #[test]
    fn sample_exponent_units_mod_group_order() {
        // Units of Z/22Z in [2, 21], enumerated by brute force.
        let units: Vec<u64> = (2..=21u64).filter(|r| num_integer::gcd(*r, 22) == 1).collect();
        assert_eq!(units, vec![3, 5, 7, 9, 13, 15, 17, 19, 21]);

        let p = p23();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            let e = sample_exponent(&p, Coprimality::GroupOrder, &mut rng);
            let v = e.value().to_u64_digits()[0];
            assert!(units.contains(&v), "{v}");
            seen.insert(v);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), units);
    }

    #[test]
    fn sample_exponent_is_reproducible() {
        let p = Prime::from_u64(1_000_003).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| sample_exponent(&p, Coprimality::Unconstrained, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn exhaustive_oracle_agreement_small_primes() {
        for p in (5..=50u64).filter(|n| naive_is_prime(*n)) {
            let prime = Prime::from_u64(p).unwrap();
            for base in 0..p {
                let b = r(base, &prime);
                for exp in 0..=2 * (p - 1) {
                    let got = mod_exp(&b, &BigUint::from(exp));
                    assert_eq!(got, r(naive_pow(base, exp, p), &prime), "{base}^{exp} mod {p}");
                }
                if base != 0 {
                    let inv = mod_inv(&b).unwrap();
                    let brute = (1..p).find(|c| base * c % p == 1).unwrap();
                    assert_eq!(inv, r(brute, &prime));
                }
            }
        }
    }

    fn arb_prime() -> impl Strategy<Value = Prime> {
        prop::sample::select(vec![23u64, 101, 65_537, 1_000_003, 2_147_483_647])
            .prop_map(|p| Prime::from_u64(p).unwrap())
    }

    proptest! {
        #[test]
        fn word_path_matches_bigint(m in 2u64..=u64::MAX, b in any::<u64>(), e in any::<u128>()) {
            let e = BigUint::from(e);
            let expected = BigUint::from(b % m).modpow(&e, &BigUint::from(m));
            prop_assert_eq!(BigUint::from(word_modpow(b % m, &e, m)), expected);
        }

        #[test]
        fn fermat(p in arb_prime(), a in 1u64..u64::MAX) {
            let a = Residue::reduce(&BigUint::from(a), &p);
            prop_assume!(!a.is_zero());
            prop_assert_eq!(mod_exp(&a, &p.group_order()), Residue::one(&p));
        }

        #[test]
        fn power_times_inverse_is_one(p in arb_prime(), a in 1u64..u64::MAX, e in 0u64..10_000) {
            let a = Residue::reduce(&BigUint::from(a), &p);
            prop_assume!(!a.is_zero());
            let x = mod_exp(&a, &BigUint::from(e));
            prop_assert_eq!(x.mul(&mod_inv(&x).unwrap()).unwrap(), Residue::one(&p));
        }

        #[test]
        fn exponents_add(p in arb_prime(), a in 0u64..u64::MAX, e1 in 0u64..1_000_000, e2 in 0u64..1_000_000) {
            let a = Residue::reduce(&BigUint::from(a), &p);
            let lhs = mod_exp(&a, &BigUint::from(e1 + e2));
            let rhs = mod_exp(&a, &BigUint::from(e1)).mul(&mod_exp(&a, &BigUint::from(e2))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
