// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Text file formats for public parameters, credentials and registries.
//!
//! All three are TOML documents with a leading `version` key. Big integers
//! are canonical decimal strings; keys appear in the order of the structs
//! below, so loading and saving a file reproduces it byte for byte. Optional
//! keys are omitted entirely when absent. See `docs/file-formats.md`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::params::{IdCheck, Policy};
use super::registry::{Record, Registry};
use super::{Credential, Identity, Scheme, SchemeError, SystemParams};
use crate::modmath::Prime;
use crate::primitives::{CheckDigit, Owf, PrimitiveError, ServerSecret};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error("the {0} one-way function cannot be persisted")]
    Unpersistable(&'static str),
    #[error("key file does not match parameter file: {0}")]
    KeyMismatch(&'static str),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
}

fn int_field(name: &'static str, raw: &str) -> Result<BigUint, FileError> {
    let canonical = !raw.is_empty() && raw.bytes().all(|b| b.is_ascii_digit()) && (raw == "0" || !raw.starts_with('0'));
    if !canonical {
        return Err(FileError::Field {
            field: name,
            reason: format!("{raw:?} is not a canonical decimal integer"),
        });
    }
    raw.parse().map_err(|e: num_bigint::ParseBigIntError| FileError::Field {
        field: name,
        reason: e.to_string(),
    })
}

fn check_version(v: u32) -> Result<(), FileError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FileError::Version(v))
    }
}

fn persistable_owf(owf: &Owf) -> Result<&'static str, FileError> {
    match owf {
        Owf::Sha256 => Ok(owf.name()),
        Owf::Table(_) => Err(FileError::Unpersistable(owf.name())),
    }
}

/// Public parameters. The secrets live in the separate binary key file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub version: u32,
    pub p: String,
    pub owf: String,
    pub delta_t: u64,
    pub digits: u8,
    pub id_check: IdCheck,
    pub replay_cache: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_bits: Option<u64>,
}

impl SystemParams {
    /// Public parameter document plus the server key file bytes.
    pub fn to_files(&self) -> Result<(String, Vec<u8>), FileError> {
        let doc = ParamsFile {
            version: FORMAT_VERSION,
            p: self.prime().to_string(),
            owf: persistable_owf(self.owf())?.to_owned(),
            delta_t: self.delta_t(),
            digits: self.digits(),
            id_check: self.policy().id_check,
            replay_cache: self.policy().replay_cache,
            id_bits: self.id_bits(),
        };
        let text = toml::to_string(&doc).map_err(|e| FileError::Syntax(e.to_string()))?;
        Ok((text, self.secret().to_key_file(self.prime())))
    }

    /// Loads parameters; `min_bits` is the floor enforced on `p`.
    pub fn from_files(params_text: &str, key_file: &[u8], min_bits: u64) -> Result<Self, FileError> {
        let doc: ParamsFile = toml::from_str(params_text).map_err(|e| FileError::Syntax(e.to_string()))?;
        check_version(doc.version)?;
        let p_value: BigUint = int_field("p", &doc.p)?;
        let (key_p, secret) = ServerSecret::from_key_file(key_file)?;
        if key_p.value() != &p_value {
            return Err(FileError::KeyMismatch("prime differs"));
        }
        let mut builder = SystemParams::builder(key_p, secret)
            .owf(Owf::from_name(&doc.owf)?)
            .delta_t(doc.delta_t)
            .digits(doc.digits)
            .policy(Policy {
                id_check: doc.id_check,
                replay_cache: doc.replay_cache,
            })
            .min_bits(min_bits);
        if let Some(bits) = doc.id_bits {
            builder = builder.id_bits(bits);
        }
        Ok(builder.build()?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CredentialFile {
    version: u32,
    scheme: Scheme,
    p: String,
    owf: String,
    id: String,
    pw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reg_number: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_id: Option<String>,
}

impl Credential {
    pub fn to_toml(&self) -> Result<String, FileError> {
        let doc = CredentialFile {
            version: FORMAT_VERSION,
            scheme: self.scheme(),
            p: self.prime().to_string(),
            owf: persistable_owf(self.owf())?.to_owned(),
            id: self.id().to_string(),
            pw: self.pw().to_string(),
            sid: self.sid().map(ToString::to_string),
            reg_number: self.reg_number().map(ToString::to_string),
            c_id: self.c_id().map(|c| c.to_string()),
        };
        toml::to_string(&doc).map_err(|e| FileError::Syntax(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, FileError> {
        let doc: CredentialFile = toml::from_str(text).map_err(|e| FileError::Syntax(e.to_string()))?;
        check_version(doc.version)?;
        let p = Prime::new(int_field("p", &doc.p)?).map_err(SchemeError::from)?;
        let cred = Credential::from_parts(
            doc.scheme,
            p,
            Owf::from_name(&doc.owf)?,
            int_field("id", &doc.id)?,
            int_field("pw", &doc.pw)?,
            doc.sid.as_deref().map(|s| int_field("sid", s)).transpose()?,
            doc.reg_number
                .as_deref()
                .map(|s| int_field("reg_number", s))
                .transpose()?,
            doc.c_id
                .as_deref()
                .map(|s| s.parse::<CheckDigit>().map_err(FileError::from))
                .transpose()?,
        )?;
        Ok(cred)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    version: u32,
    scheme: Scheme,
    #[serde(default, rename = "record", skip_serializing_if = "Vec::is_empty")]
    records: Vec<RecordEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    seen: Vec<SeenEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordEntry {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reg_number: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeenEntry {
    identity: String,
    t: u64,
}

impl Registry {
    /// Records in issue order, then the replay cache in sorted order.
    pub fn to_toml(&self) -> Result<String, FileError> {
        let doc = RegistryFile {
            version: FORMAT_VERSION,
            scheme: self.scheme(),
            records: self
                .records()
                .iter()
                .map(|r| RecordEntry {
                    id: r.id.to_string(),
                    sid: r.sid.as_ref().map(ToString::to_string),
                    reg_number: r.reg_number.as_ref().map(ToString::to_string),
                })
                .collect(),
            seen: self
                .seen()
                .map(|(who, t)| SeenEntry {
                    identity: who.to_string(),
                    t: *t,
                })
                .collect(),
        };
        toml::to_string(&doc).map_err(|e| FileError::Syntax(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, FileError> {
        let doc: RegistryFile = toml::from_str(text).map_err(|e| FileError::Syntax(e.to_string()))?;
        check_version(doc.version)?;
        let mut registry = Registry::new(doc.scheme);
        for entry in doc.records {
            registry.insert(Record {
                id: int_field("id", &entry.id)?,
                sid: entry.sid.as_deref().map(|s| int_field("sid", s)).transpose()?,
                reg_number: entry
                    .reg_number
                    .as_deref()
                    .map(|s| int_field("reg_number", s))
                    .transpose()?,
            })?;
        }
        for entry in doc.seen {
            let identity: Identity = entry.identity.parse().map_err(|reason| FileError::Field {
                field: "seen.identity",
                reason,
            })?;
            if identity.scheme() != doc.scheme {
                return Err(FileError::Scheme(SchemeError::SchemeMismatch {
                    expected: doc.scheme,
                    found: identity.scheme(),
                }));
            }
            registry.restore_seen(identity, entry.t);
        }
        Ok(registry)
    }
}
