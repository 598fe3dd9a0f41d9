// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulated transport between card holder and server.
//!
//! # Frame format
//!
//! ```text
//! +---------+-----------+-------------+------------------------------+
//! | version | scheme    | field count | fields ...                   |
//! | 1 byte  | 1 byte    | 1 byte      | (u32 BE length, bytes) * n   |
//! +---------+-----------+-------------+------------------------------+
//! ```
//!
//! Version is `0x01`. Scheme tags: `1` Hwang-Li, `2` Shen-Lin-Hwang,
//! `3` Kumar, `4` proposed. Field order per scheme:
//!
//! * HL:       `ID, C1, C2, T`
//! * SLH:      `SID, C1, C2, T`
//! * Kumar:    `SID, C_ID, C1, C2, T`
//! * proposed: `ID, R, C_ID, C1, C2, T`
//!
//! Integers are minimal big-endian (zero is the empty field, no leading zero
//! bytes). `C_ID` is its zero-padded ASCII decimal form, so its length is the
//! digit count. `T` must fit in 64 bits. Decoding rejects anything that would
//! not re-encode to the same bytes.

use num_bigint::BigUint;
use thiserror::Error;

use crate::primitives::{CheckDigit, MAX_CHECK_DIGITS};
use crate::schemes::{Identity, LoginMessage, Scheme};

pub const FRAME_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("malformed frame: {0}")]
    MalformedFrame(&'static str),
}

fn malformed<T>(why: &'static str) -> Result<T, ChannelError> {
    Err(ChannelError::MalformedFrame(why))
}

fn int_bytes(v: &BigUint) -> Vec<u8> {
    if v.bits() == 0 {
        Vec::new()
    } else {
        v.to_bytes_be()
    }
}

pub fn encode(msg: &LoginMessage) -> Vec<u8> {
    let mut fields: Vec<Vec<u8>> = match &msg.identity {
        Identity::Hl { id } => vec![int_bytes(id)],
        Identity::Slh { sid } => vec![int_bytes(sid)],
        Identity::Kumar { sid, c_id } => vec![int_bytes(sid), c_id.to_string().into_bytes()],
        Identity::Proposed { id, reg_number, c_id } => {
            vec![int_bytes(id), int_bytes(reg_number), c_id.to_string().into_bytes()]
        }
    };
    fields.push(int_bytes(&msg.c1));
    fields.push(int_bytes(&msg.c2));
    fields.push(int_bytes(&BigUint::from(msg.t_stamp)));

    let mut out = vec![FRAME_VERSION, msg.scheme().wire_tag(), fields.len() as u8];
    for f in fields {
        out.extend_from_slice(&(f.len() as u32).to_be_bytes());
        out.extend_from_slice(&f);
    }
    out
}

fn field_count(scheme: Scheme) -> usize {
    match scheme {
        Scheme::Hl | Scheme::Slh => 4,
        Scheme::Kumar => 5,
        Scheme::Proposed => 6,
    }
}

fn read_int(bytes: &[u8]) -> Result<BigUint, ChannelError> {
    if bytes.first() == Some(&0) {
        return malformed("integer field has a leading zero byte");
    }
    Ok(BigUint::from_bytes_be(bytes))
}

fn read_check_digit(bytes: &[u8]) -> Result<CheckDigit, ChannelError> {
    if bytes.is_empty() || bytes.len() > MAX_CHECK_DIGITS as usize {
        return malformed("check digit length");
    }
    std::str::from_utf8(bytes)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or(ChannelError::MalformedFrame("check digit is not decimal"))
}

fn read_t(bytes: &[u8]) -> Result<u64, ChannelError> {
    if bytes.len() > 8 {
        return malformed("timestamp wider than 64 bits");
    }
    let v = read_int(bytes)?;
    Ok(v.to_u64_digits().first().copied().unwrap_or(0))
}

pub fn decode(frame: &[u8]) -> Result<LoginMessage, ChannelError> {
    let [version, tag, count, body @ ..] = frame else {
        return malformed("truncated header");
    };
    if *version != FRAME_VERSION {
        return malformed("unsupported version");
    }
    let Some(scheme) = Scheme::from_wire_tag(*tag) else {
        return malformed("unknown scheme tag");
    };
    if *count as usize != field_count(scheme) {
        return malformed("field count does not match scheme");
    }

    let mut fields = Vec::with_capacity(*count as usize);
    let mut rest = body;
    for _ in 0..*count {
        if rest.len() < 4 {
            return malformed("truncated length prefix");
        }
        let (len, tail) = rest.split_at(4);
        let len = u32::from_be_bytes(len.try_into().expect("4 bytes")) as usize;
        if tail.len() < len {
            return malformed("truncated field");
        }
        let (f, tail) = tail.split_at(len);
        fields.push(f);
        rest = tail;
    }
    if !rest.is_empty() {
        return malformed("trailing bytes");
    }

    let n = fields.len();
    let identity = match scheme {
        Scheme::Hl => Identity::Hl {
            id: read_int(fields[0])?,
        },
        Scheme::Slh => Identity::Slh {
            sid: read_int(fields[0])?,
        },
        Scheme::Kumar => Identity::Kumar {
            sid: read_int(fields[0])?,
            c_id: read_check_digit(fields[1])?,
        },
        Scheme::Proposed => Identity::Proposed {
            id: read_int(fields[0])?,
            reg_number: read_int(fields[1])?,
            c_id: read_check_digit(fields[2])?,
        },
    };
    Ok(LoginMessage {
        identity,
        c1: read_int(fields[n - 3])?,
        c2: read_int(fields[n - 2])?,
        t_stamp: read_t(fields[n - 1])?,
    })
}

/// Lowercase hex dump of a frame.
pub fn to_hex(frame: &[u8]) -> String {
    frame.iter().map(|b| format!("{b:02x}")).collect()
}

/// Integer tick clock shared by sender and receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimClock {
    now: u64,
}

impl SimClock {
    pub fn new(start: u64) -> Self {
        SimClock { now: start }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    /// Moves forward by at least one tick.
    pub fn advance(&mut self, ticks: std::num::NonZeroU64) -> u64 {
        self.now += ticks.get();
        self.now
    }
}

/// A delivered frame and when it arrived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub frame: Vec<u8>,
    pub sent_at: u64,
    pub arrival: u64,
}

/// One-way link with a fixed delay and an optional passive tap.
#[derive(Debug)]
pub struct Channel {
    clock: SimClock,
    delay: u64,
    tap: Option<Vec<Vec<u8>>>,
}

impl Channel {
    pub fn new(clock: SimClock, delay: u64) -> Self {
        Channel {
            clock,
            delay,
            tap: None,
        }
    }

    /// Attaches a tap that keeps a copy of every frame delivered afterwards.
    pub fn with_tap(mut self) -> Self {
        self.tap = Some(Vec::new());
        self
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    pub fn clock_mut(&mut self) -> &mut SimClock {
        &mut self.clock
    }

    pub fn delay(&self) -> u64 {
        self.delay
    }

    pub fn set_delay(&mut self, delay: u64) {
        self.delay = delay;
    }

    /// Frames captured by the tap, oldest first.
    pub fn tapped(&self) -> &[Vec<u8>] {
        self.tap.as_deref().unwrap_or(&[])
    }

    /// Sends `frame` at the current tick; the clock moves to the arrival tick.
    pub fn deliver(&mut self, frame: Vec<u8>) -> Delivery {
        let sent_at = self.clock.now();
        if let Some(nz) = std::num::NonZeroU64::new(self.delay) {
            self.clock.advance(nz);
        }
        if let Some(tap) = &mut self.tap {
            tap.push(frame.clone());
        }
        Delivery {
            frame,
            sent_at,
            arrival: self.clock.now(),
        }
    }
}
