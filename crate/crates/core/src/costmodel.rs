// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Operation counts per scheme and phase.
//!
//! Scheme code performs every counted primitive through a [`Meter`], so the
//! table produced here is measured from real executions rather than written
//! down. The counting boundary:
//!
//! * `E`: modular exponentiations,
//! * `H`: one-way function evaluations,
//! * `M`: residue multiplications outside exponentiation,
//! * `R`: shadow function evaluations,
//! * `C`: check-digit evaluations.
//!
//! Inversions, comparisons and XOR are not counted.

use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modmath::{self, MathError, Prime, Residue};
use crate::primitives::{self, CheckDigit, Owf, PrimitiveError, ServerSecret};
use crate::schemes::{self, Registry, Scheme, SchemeError, SystemParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostVector {
    #[serde(rename = "E")]
    pub exp: u32,
    #[serde(rename = "H")]
    pub hash: u32,
    #[serde(rename = "M")]
    pub mul: u32,
    #[serde(rename = "R")]
    pub shadow: u32,
    #[serde(rename = "C")]
    pub check: u32,
}

impl CostVector {
    pub const fn new(exp: u32, hash: u32, mul: u32, shadow: u32, check: u32) -> Self {
        CostVector {
            exp,
            hash,
            mul,
            shadow,
            check,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == CostVector::default()
    }
}

impl Add for CostVector {
    type Output = CostVector;

    fn add(self, o: CostVector) -> CostVector {
        CostVector {
            exp: self.exp + o.exp,
            hash: self.hash + o.hash,
            mul: self.mul + o.mul,
            shadow: self.shadow + o.shadow,
            check: self.check + o.check,
        }
    }
}

/// Symbolic form in the order `R+E+C` / `3E+H+M+C`, e.g. `3E+H+M`.
impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (self.shadow, "R"),
            (self.exp, "E"),
            (self.hash, "H"),
            (self.mul, "M"),
            (self.check, "C"),
        ];
        let mut out = Vec::new();
        for (n, sym) in terms {
            match n {
                0 => {}
                1 => out.push(sym.to_string()),
                n => out.push(format!("{n}{sym}")),
            }
        }
        if out.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&out.join("+"))
        }
    }
}

/// Performs counted primitives and tallies them.
#[derive(Debug, Default)]
pub struct Meter {
    counts: CostVector,
}

impl Meter {
    pub fn new() -> Self {
        Meter::default()
    }

    pub fn counts(&self) -> CostVector {
        self.counts
    }

    pub fn take(&mut self) -> CostVector {
        std::mem::take(&mut self.counts)
    }

    pub fn exp(&mut self, base: &Residue, exp: &BigUint) -> Residue {
        self.counts.exp += 1;
        modmath::mod_exp(base, exp)
    }

    pub fn mul(&mut self, a: &Residue, b: &Residue) -> Result<Residue, MathError> {
        self.counts.mul += 1;
        a.mul(b)
    }

    pub fn hash(&mut self, owf: &Owf, input: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
        self.counts.hash += 1;
        owf.digest(input)
    }

    pub fn shadow(&mut self, secret: &ServerSecret, id: &BigUint, p: &Prime) -> Residue {
        self.counts.shadow += 1;
        primitives::shadow(secret, id, p)
    }

    pub fn check_digit(
        &mut self,
        secret: &ServerSecret,
        value: &BigUint,
        digits: u8,
    ) -> Result<CheckDigit, PrimitiveError> {
        self.counts.check += 1;
        primitives::check_digit(secret, value, digits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Registration,
    Login,
    Authentication,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Registration, Phase::Login, Phase::Authentication];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Registration => "registration",
            Phase::Login => "login",
            Phase::Authentication => "authentication",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("cell ({scheme}, {phase}): measured {measured}, expected {expected}")]
    TableMismatch {
        scheme: Scheme,
        phase: Phase,
        expected: CostVector,
        measured: CostVector,
    },
    #[error("table has no cell for ({0}, {1})")]
    MissingCell(Scheme, Phase),
    #[error("fixture run failed: {0}")]
    Fixture(#[from] SchemeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostCell {
    pub scheme: Scheme,
    pub phase: Phase,
    #[serde(flatten)]
    pub cost: CostVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostTable {
    pub cells: Vec<CostCell>,
}

impl CostTable {
    pub fn get(&self, scheme: Scheme, phase: Phase) -> Option<CostVector> {
        self.cells
            .iter()
            .find(|c| c.scheme == scheme && c.phase == phase)
            .map(|c| c.cost)
    }

    /// Checks every cell of `expected` against `self`, reporting the first
    /// deviation in scheme-then-phase order.
    pub fn compare(&self, expected: &CostTable) -> Result<(), CostError> {
        for want in &expected.cells {
            let got = self
                .get(want.scheme, want.phase)
                .ok_or(CostError::MissingCell(want.scheme, want.phase))?;
            if got != want.cost {
                return Err(CostError::TableMismatch {
                    scheme: want.scheme,
                    phase: want.phase,
                    expected: want.cost,
                    measured: got,
                });
            }
        }
        Ok(())
    }

    /// Aligned plain-text rendering, one row per scheme.
    pub fn render_text(&self) -> String {
        let row = |a: &str, b: &str, c: &str, d: &str| format!("{a:<16} {b:<14} {c:<14} {d}\n");
        let mut out = row("scheme", "registration", "login", "authentication");
        for scheme in Scheme::ALL {
            let cell = |phase| {
                self.get(scheme, phase)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "-".into())
            };
            out.push_str(&row(
                scheme.label(),
                &cell(Phase::Registration),
                &cell(Phase::Login),
                &cell(Phase::Authentication),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// The published comparison table, in symbolic operation counts.
pub fn golden_table() -> CostTable {
    let reg = |e, r, c| CostVector::new(e, 0, 0, r, c);
    let core = CostVector::new(3, 1, 1, 0, 0);
    let with_check = CostVector::new(3, 1, 1, 0, 1);
    let rows = [
        (Scheme::Hl, reg(1, 0, 0), core, core),
        (Scheme::Slh, reg(1, 1, 0), core, core),
        (Scheme::Kumar, reg(1, 1, 1), core, with_check),
        (Scheme::Proposed, reg(1, 0, 1), core, with_check),
    ];
    let mut cells = Vec::new();
    for (scheme, r, l, a) in rows {
        for (phase, cost) in [(Phase::Registration, r), (Phase::Login, l), (Phase::Authentication, a)] {
            cells.push(CostCell { scheme, phase, cost });
        }
    }
    CostTable { cells }
}

const FIXTURE_SEED: u64 = 0x5eed_c057;
const FIXTURE_BITS: u64 = 32;
const FIXTURE_T: u64 = 1_000;

/// Runs one honest register, login, authenticate round under a metered
/// fixture and returns the counts of the requested phase.
pub fn count_phase(scheme: Scheme, phase: Phase) -> Result<CostVector, CostError> {
    let [r, l, a] = measure_round(scheme)?;
    Ok(match phase {
        Phase::Registration => r,
        Phase::Login => l,
        Phase::Authentication => a,
    })
}

fn measure_round(scheme: Scheme) -> Result<[CostVector; 3], CostError> {
    let mut rng = ChaCha20Rng::seed_from_u64(FIXTURE_SEED);
    let params = SystemParams::generate(FIXTURE_BITS, &mut rng)
        .map_err(SchemeError::from)?
        .build()?;
    let mut registry = Registry::new(scheme);
    let mut meter = Meter::new();

    let id = rng_id(&params, &mut rng);
    let cred = schemes::register_metered(&params, &mut registry, &id, &mut rng, &mut meter)?;
    let registration = meter.take();

    let r = modmath::sample_exponent(params.prime(), modmath::Coprimality::Unconstrained, &mut rng);
    let msg = schemes::login_metered(&cred, FIXTURE_T, &r, &mut meter)?;
    let login = meter.take();

    let decision = schemes::authenticate_metered(&params, &mut registry, &msg, FIXTURE_T, &mut meter)?;
    let authentication = meter.take();
    assert!(decision.accepted(), "honest fixture round rejected: {decision}");

    Ok([registration, login, authentication])
}

fn rng_id(params: &SystemParams, rng: &mut ChaCha20Rng) -> BigUint {
    modmath::sample_exponent(params.prime(), modmath::Coprimality::Unconstrained, rng)
        .value()
        .clone()
}

/// Measures all twelve cells.
pub fn measure_table() -> Result<CostTable, CostError> {
    let mut cells = Vec::new();
    for scheme in Scheme::ALL {
        let costs = measure_round(scheme)?;
        for (phase, cost) in Phase::ALL.into_iter().zip(costs) {
            cells.push(CostCell { scheme, phase, cost });
        }
    }
    Ok(CostTable { cells })
}

/// Measured table, checked against [`golden_table`].
pub fn cost_table() -> Result<CostTable, CostError> {
    let measured = measure_table()?;
    measured.compare(&golden_table())?;
    Ok(measured)
}
