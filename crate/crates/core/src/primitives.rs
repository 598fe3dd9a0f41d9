// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! The opaque functions the schemes are built from.
//!
//! * the public one-way function used to derive the login exponent,
//! * the server-keyed shadow function mapping identities to shadow identities,
//! * the server-keyed check-digit function binding an identity to a short
//!   decimal tag,
//!
//! plus the bit-level XOR used to combine identities with registration
//! numbers. The two keyed functions are HMAC-SHA256 under independent keys.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use hmac::{Hmac, KeyInit, Mac};
use num_bigint::BigUint;
use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::modmath::{self, Coprimality, Exponent, MathError, Prime, Residue};

type HmacSha256 = Hmac<Sha256>;

/// Largest supported check-digit width; `10^18` still fits in a `u64`.
pub const MAX_CHECK_DIGITS: u8 = 18;

/// Default check-digit width.
pub const DEFAULT_CHECK_DIGITS: u8 = 6;

/// Key length produced by [`ServerSecret::generate`].
pub const SECRET_KEY_BYTES: usize = 32;

const KEY_FILE_MAGIC: &[u8; 4] = b"SCAK";
const KEY_FILE_VERSION: u8 = 1;

const SHADOW_DOMAIN: &[u8] = b"scauth/shadow/v1";
const CHECK_DIGIT_DOMAIN: &[u8] = b"scauth/check-digit/v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimitiveError {
    #[error("test-injected one-way function has no entry for input {0}")]
    TestVectorMissing(String),
    #[error("check-digit width must be in 1..={MAX_CHECK_DIGITS}, got {0}")]
    BadDigitCount(u8),
    #[error("malformed check digit {0:?}")]
    BadCheckDigit(String),
    #[error("server secret keys must be non-empty")]
    EmptyKey,
    #[error("key file: {0}")]
    KeyFile(&'static str),
    #[error("unknown one-way function {0:?}")]
    UnknownOwf(String),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// Handle to the public one-way function `h` (also written `f`).
#[derive(Clone, PartialEq, Eq)]
pub enum Owf {
    Sha256,
    /// Fixed lookup table. Lets worked examples pin the derived exponent.
    Table(Arc<BTreeMap<Vec<u8>, Vec<u8>>>),
}

impl Owf {
    pub const SHA256_NAME: &'static str = "sha256";
    pub const TABLE_NAME: &'static str = "test-table";

    /// Builds a table-backed handle. All digests must share one width.
    pub fn table<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u8>, Vec<u8>)>,
    {
        let map: BTreeMap<_, _> = entries.into_iter().collect();
        let mut widths = map.values().map(Vec::len);
        if let Some(first) = widths.next() {
            assert!(widths.all(|w| w == first), "digest width must be fixed");
        }
        Owf::Table(Arc::new(map))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Owf::Sha256 => Self::SHA256_NAME,
            Owf::Table(_) => Self::TABLE_NAME,
        }
    }

    /// Only the standard digest can be named in a parameter file.
    pub fn from_name(name: &str) -> Result<Self, PrimitiveError> {
        match name {
            Self::SHA256_NAME => Ok(Owf::Sha256),
            other => Err(PrimitiveError::UnknownOwf(other.to_owned())),
        }
    }

    pub fn digest(&self, input: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
        match self {
            Owf::Sha256 => Ok(Sha256::digest(input).to_vec()),
            Owf::Table(map) => map
                .get(input)
                .cloned()
                .ok_or_else(|| PrimitiveError::TestVectorMissing(hex_string(input))),
        }
    }
}

impl fmt::Debug for Owf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owf::Sha256 => f.write_str("Owf::Sha256"),
            Owf::Table(map) => write!(f, "Owf::Table({} entries)", map.len()),
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Byte width used to encode `T` and `PW` before XOR: `max(bits(p), 64)`
/// rounded up to whole bytes.
pub fn owf_input_width(p: &Prime) -> usize {
    (p.bits().max(64) as usize).div_ceil(8)
}

/// Canonical encoding of `T xor PW` fed to the one-way function.
pub fn owf_input(t_stamp: u64, pw: &BigUint, p: &Prime) -> Vec<u8> {
    let mixed = xor_align(&BigUint::from(t_stamp), pw);
    to_fixed_be(&mixed, owf_input_width(p))
}

fn to_fixed_be(value: &BigUint, width: usize) -> Vec<u8> {
    let raw = value.to_bytes_be();
    let raw = if value.bits() == 0 { &[][..] } else { &raw[..] };
    assert!(raw.len() <= width, "value wider than {width} bytes");
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(raw);
    out
}

/// Digest read as a big-endian integer, reduced modulo `p - 1`.
pub fn reduce_to_exponent(digest: &[u8], p: &Prime) -> Exponent {
    Exponent::reduce(&BigUint::from_bytes_be(digest), p)
}

/// Bitwise XOR; the shorter operand is implicitly zero-extended.
pub fn xor_align(a: &BigUint, b: &BigUint) -> BigUint {
    a ^ b
}

/// Everything only the authentication server knows.
#[derive(Clone, PartialEq, Eq)]
pub struct ServerSecret {
    x_s: Exponent,
    shadow_key: Vec<u8>,
    check_key: Vec<u8>,
}

impl ServerSecret {
    pub fn new(x_s: Exponent, shadow_key: Vec<u8>, check_key: Vec<u8>) -> Result<Self, PrimitiveError> {
        if shadow_key.is_empty() || check_key.is_empty() {
            return Err(PrimitiveError::EmptyKey);
        }
        Ok(ServerSecret {
            x_s,
            shadow_key,
            check_key,
        })
    }

    /// Fresh secret exponent in `[2, p - 2]` and two independent 256-bit keys.
    pub fn generate<R: Rng + ?Sized>(p: &Prime, rng: &mut R) -> Self {
        let x_s = modmath::sample_exponent(p, Coprimality::Unconstrained, rng);
        let mut shadow_key = vec![0u8; SECRET_KEY_BYTES];
        let mut check_key = vec![0u8; SECRET_KEY_BYTES];
        rng.fill_bytes(&mut shadow_key);
        rng.fill_bytes(&mut check_key);
        ServerSecret {
            x_s,
            shadow_key,
            check_key,
        }
    }

    pub fn x_s(&self) -> &Exponent {
        &self.x_s
    }

    pub fn shadow_key(&self) -> &[u8] {
        &self.shadow_key
    }

    pub fn check_key(&self) -> &[u8] {
        &self.check_key
    }

    pub fn with_x_s(mut self, x_s: Exponent) -> Self {
        self.x_s = x_s;
        self
    }

    pub fn with_shadow_key(mut self, key: Vec<u8>) -> Self {
        self.shadow_key = key;
        self
    }

    /// Serializes the secret together with the modulus it was drawn for.
    ///
    /// Layout: `"SCAK"`, version byte, field count byte, then four fields
    /// (`p`, `x_s`, shadow key, check key), each a `u32` big-endian length
    /// followed by that many bytes. Integers are minimal big-endian.
    pub fn to_key_file(&self, p: &Prime) -> Vec<u8> {
        let fields: [Vec<u8>; 4] = [
            minimal_be(p.value()),
            minimal_be(self.x_s.value()),
            self.shadow_key.clone(),
            self.check_key.clone(),
        ];
        let mut out = Vec::with_capacity(64 + self.shadow_key.len() + self.check_key.len());
        out.extend_from_slice(KEY_FILE_MAGIC);
        out.push(KEY_FILE_VERSION);
        out.push(fields.len() as u8);
        for f in &fields {
            out.extend_from_slice(&(f.len() as u32).to_be_bytes());
            out.extend_from_slice(f);
        }
        out
    }

    pub fn from_key_file(bytes: &[u8]) -> Result<(Prime, Self), PrimitiveError> {
        let rest = bytes
            .strip_prefix(KEY_FILE_MAGIC.as_slice())
            .ok_or(PrimitiveError::KeyFile("bad magic"))?;
        let (&version, rest) = rest.split_first().ok_or(PrimitiveError::KeyFile("truncated"))?;
        if version != KEY_FILE_VERSION {
            return Err(PrimitiveError::KeyFile("unsupported version"));
        }
        let (&count, mut rest) = rest.split_first().ok_or(PrimitiveError::KeyFile("truncated"))?;
        if count != 4 {
            return Err(PrimitiveError::KeyFile("unexpected field count"));
        }
        let mut fields = Vec::with_capacity(4);
        for _ in 0..count {
            if rest.len() < 4 {
                return Err(PrimitiveError::KeyFile("truncated"));
            }
            let (len, tail) = rest.split_at(4);
            let len = u32::from_be_bytes(len.try_into().expect("4 bytes")) as usize;
            if tail.len() < len {
                return Err(PrimitiveError::KeyFile("truncated"));
            }
            let (field, tail) = tail.split_at(len);
            fields.push(field);
            rest = tail;
        }
        if !rest.is_empty() {
            return Err(PrimitiveError::KeyFile("trailing bytes"));
        }
        let p = Prime::new(BigUint::from_bytes_be(fields[0]))?;
        let x_s = Exponent::new(BigUint::from_bytes_be(fields[1]), &p)?;
        let secret = ServerSecret::new(x_s, fields[2].to_vec(), fields[3].to_vec())?;
        Ok((p, secret))
    }
}

impl fmt::Debug for ServerSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ServerSecret").finish_non_exhaustive()
    }
}

fn minimal_be(value: &BigUint) -> Vec<u8> {
    if value.bits() == 0 {
        Vec::new()
    } else {
        value.to_bytes_be()
    }
}

fn keyed(key: &[u8], domain: &[u8], counter: u32, value: &BigUint) -> [u8; 32] {
    let mut mac = HmacSha256::new_from_slice(key).expect("HMAC accepts any key length");
    mac.update(domain);
    mac.update(&counter.to_be_bytes());
    mac.update(&minimal_be(value));
    mac.finalize().into_bytes().into()
}

/// Shadow identity of `id`: keyed, deterministic, lands in `[2, p - 2]`.
///
/// The keyed stream is expanded to `bits(p) + 64` bits before reduction so
/// the output is statistically close to uniform. Requires `p >= 5`.
pub fn shadow(secret: &ServerSecret, id: &BigUint, p: &Prime) -> Residue {
    let want = (p.bits() as usize + 64).div_ceil(8);
    let mut stream = Vec::with_capacity(want + 32);
    let mut counter = 0u32;
    while stream.len() < want {
        stream.extend_from_slice(&keyed(&secret.shadow_key, SHADOW_DOMAIN, counter, id));
        counter += 1;
    }
    let span = p.value() - 3u32;
    let value = BigUint::from_bytes_be(&stream) % span + 2u32;
    Residue::new(value, p).expect("value below p")
}

/// A keyed decimal tag of fixed width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CheckDigit {
    value: u64,
    digits: u8,
}

impl CheckDigit {
    pub fn new(value: u64, digits: u8) -> Result<Self, PrimitiveError> {
        let bound = digit_bound(digits)?;
        if value >= bound {
            return Err(PrimitiveError::BadCheckDigit(value.to_string()));
        }
        Ok(CheckDigit { value, digits })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn digits(&self) -> u8 {
        self.digits
    }
}

/// Zero-padded to the full width, so `007` and `7` are distinct tags.
impl fmt::Display for CheckDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$}", self.value, width = self.digits as usize)
    }
}

impl FromStr for CheckDigit {
    type Err = PrimitiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PrimitiveError::BadCheckDigit(s.to_owned());
        if s.is_empty() || s.len() > MAX_CHECK_DIGITS as usize || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let value = s.parse::<u64>().map_err(|_| bad())?;
        CheckDigit::new(value, s.len() as u8)
    }
}

/// `10^digits`, the size of the tag space.
pub fn digit_bound(digits: u8) -> Result<u64, PrimitiveError> {
    if digits == 0 || digits > MAX_CHECK_DIGITS {
        return Err(PrimitiveError::BadDigitCount(digits));
    }
    Ok(10u64.pow(digits as u32))
}

/// Keyed check digit of `value`, truncated to `digits` decimal digits.
pub fn check_digit(secret: &ServerSecret, value: &BigUint, digits: u8) -> Result<CheckDigit, PrimitiveError> {
    let bound = digit_bound(digits)?;
    let tag = keyed(&secret.check_key, CHECK_DIGIT_DOMAIN, 0, value);
    let wide = u128::from_be_bytes(tag[..16].try_into().expect("16 bytes"));
    CheckDigit::new((wide % bound as u128) as u64, digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn p23() -> Prime {
        Prime::from_u64(23).unwrap()
    }

    fn secret(seed: u64, p: &Prime) -> ServerSecret {
        ServerSecret::generate(p, &mut ChaCha20Rng::seed_from_u64(seed))
    }

    #[test]
    fn owf_is_deterministic_and_fixed_width() {
        let h = Owf::Sha256;
        let a = h.digest(b"input").unwrap();
        assert_eq!(a, h.digest(b"input").unwrap());
        assert_eq!(a.len(), 32);
        assert_eq!(h.digest(b"").unwrap().len(), 32);
    }

    #[test]
    fn owf_table_lookup() {
        let x0 = vec![1u8, 2, 3];
        let h = Owf::table([(x0.clone(), vec![3u8])]);
        assert_eq!(h.digest(&x0).unwrap(), vec![3]);
        assert!(matches!(h.digest(b"other"), Err(PrimitiveError::TestVectorMissing(_))));
        assert_eq!(h.name(), Owf::TABLE_NAME);
        assert!(Owf::from_name(Owf::TABLE_NAME).is_err());
        assert_eq!(Owf::from_name("sha256").unwrap(), Owf::Sha256);
    }

    #[test]
    fn owf_distinct_inputs_distinct_digests() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let (a, b): (u64, u64) = (rng.gen(), rng.gen());
            if a != b {
                assert_ne!(
                    Owf::Sha256.digest(&a.to_be_bytes()).unwrap(),
                    Owf::Sha256.digest(&b.to_be_bytes()).unwrap()
                );
            }
        }
    }

    #[test]
    fn reduce_to_exponent_examples() {
        let p = p23();
        assert_eq!(reduce_to_exponent(&[25], &p).value(), &BigUint::from(3u32));
        assert_eq!(reduce_to_exponent(&[0], &p).value(), &BigUint::from(0u32));
        assert_eq!(reduce_to_exponent(&[], &p).value(), &BigUint::from(0u32));
        assert_eq!(reduce_to_exponent(&[22], &p).value(), &BigUint::from(0u32));
        assert_eq!(reduce_to_exponent(&[0, 0, 25], &p).value(), &BigUint::from(3u32));
    }

    #[test]
    fn xor_align_examples() {
        let n = |v: u64| BigUint::from(v);
        assert_eq!(xor_align(&n(9), &n(12)), n(5));
        assert_eq!(xor_align(&n(77), &n(77)), n(0));
        assert_eq!(xor_align(&n(77), &n(0)), n(77));
        assert_eq!(xor_align(&n(1), &(n(1) << 200)), (n(1) << 200) + 1u32);
    }

    #[test]
    fn owf_input_width_floor_is_64_bits() {
        let p = p23();
        let input = owf_input(1, &BigUint::from(17u32), &p);
        assert_eq!(input, vec![0, 0, 0, 0, 0, 0, 0, 16]);
        let big = Prime::new((BigUint::from(1u32) << 127) - 1u32).unwrap();
        assert_eq!(owf_input(0, &BigUint::from(1u32), &big).len(), 16);
    }

    #[test]
    fn shadow_contract() {
        let p = p23();
        let s = secret(1, &p);
        for id in 0..200u64 {
            let id = BigUint::from(id);
            let sid = shadow(&s, &id, &p);
            assert_eq!(sid, shadow(&s, &id, &p));
            assert!(p.is_nontrivial(sid.value()));
        }
        let big = Prime::new((BigUint::from(1u32) << 127) - 1u32).unwrap();
        let s = secret(2, &big);
        let sids: std::collections::BTreeSet<_> = (0..500u64)
            .map(|i| shadow(&s, &BigUint::from(i), &big).into_value())
            .collect();
        assert_eq!(sids.len(), 500);
    }

    #[test]
    fn check_digit_contract() {
        let p = p23();
        let s = secret(3, &p);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let v = BigUint::from(rng.gen::<u64>());
            let c = check_digit(&s, &v, 4).unwrap();
            assert!(c.value() < 10_000);
            assert_eq!(c.digits(), 4);
            assert_eq!(c, check_digit(&s, &v, 4).unwrap());
        }
        assert_eq!(
            check_digit(&s, &BigUint::from(1u32), 0),
            Err(PrimitiveError::BadDigitCount(0))
        );
        assert_eq!(
            check_digit(&s, &BigUint::from(1u32), 19),
            Err(PrimitiveError::BadDigitCount(19))
        );
    }

    #[test]
    fn check_digit_ignores_unrelated_secret_fields() {
        let p = p23();
        let s = secret(5, &p);
        let other = s
            .clone()
            .with_x_s(Exponent::from_u64(9, &p).unwrap())
            .with_shadow_key(vec![0xAA; 32]);
        for v in 0..100u64 {
            let v = BigUint::from(v);
            assert_eq!(check_digit(&s, &v, 6).unwrap(), check_digit(&other, &v, 6).unwrap());
        }
    }

    #[test]
    fn keyed_functions_differ_across_secrets() {
        let p = Prime::new((BigUint::from(1u32) << 61) - 1u32).unwrap();
        let (a, b) = (secret(10, &p), secret(11, &p));
        let mut same_shadow = 0;
        let mut same_check = 0;
        for v in 0..1000u64 {
            let v = BigUint::from(v);
            same_shadow += (shadow(&a, &v, &p) == shadow(&b, &v, &p)) as u32;
            same_check += (check_digit(&a, &v, 6).unwrap() == check_digit(&b, &v, 6).unwrap()) as u32;
        }
        assert_eq!(same_shadow, 0);
        assert!(same_check <= 1);
    }

    #[test]
    fn check_digit_text_form() {
        let c = CheckDigit::new(42, 6).unwrap();
        assert_eq!(c.to_string(), "000042");
        assert_eq!("000042".parse::<CheckDigit>().unwrap(), c);
        assert_ne!("42".parse::<CheckDigit>().unwrap(), c);
        assert!("".parse::<CheckDigit>().is_err());
        assert!("12a".parse::<CheckDigit>().is_err());
        assert!(CheckDigit::new(10_000, 4).is_err());
    }

    #[test]
    fn key_file_round_trip_and_errors() {
        let p = Prime::generate(64, &mut ChaCha20Rng::seed_from_u64(6)).unwrap();
        let s = secret(7, &p);
        let bytes = s.to_key_file(&p);
        assert_eq!(&bytes[..6], b"SCAK\x01\x04");
        let (p2, s2) = ServerSecret::from_key_file(&bytes).unwrap();
        assert_eq!((p2, s2), (p.clone(), s));

        assert_eq!(
            ServerSecret::from_key_file(b"NOPE\x01\x04"),
            Err(PrimitiveError::KeyFile("bad magic"))
        );
        let mut v2 = bytes.clone();
        v2[4] = 2;
        assert_eq!(
            ServerSecret::from_key_file(&v2),
            Err(PrimitiveError::KeyFile("unsupported version"))
        );
        assert_eq!(
            ServerSecret::from_key_file(&bytes[..bytes.len() - 1]),
            Err(PrimitiveError::KeyFile("truncated"))
        );
        let mut long = bytes;
        long.push(0);
        assert_eq!(
            ServerSecret::from_key_file(&long),
            Err(PrimitiveError::KeyFile("trailing bytes"))
        );
    }

    #[test]
    fn debug_hides_keys() {
        let s = secret(8, &p23());
        assert_eq!(format!("{s:?}"), "ServerSecret { .. }");
    }

    proptest! {
        #[test]
        fn xor_align_is_an_involution(a in any::<u128>(), b in any::<u64>()) {
            let (a, b) = (BigUint::from(a), BigUint::from(b));
            prop_assert_eq!(xor_align(&xor_align(&a, &b), &b), a);
        }
    }
}
