// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::{Identity, Scheme, SchemeError};

/// One issued registration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: BigUint,
    pub sid: Option<BigUint>,
    pub reg_number: Option<BigUint>,
}

impl Record {
    /// `(identity base on the wire, registration number)`: the pair the
    /// server looks up when it checks membership.
    fn lookup_key(&self) -> (BigUint, Option<BigUint>) {
        match (&self.sid, &self.reg_number) {
            (Some(sid), _) => (sid.clone(), None),
            (None, r) => (self.id.clone(), r.clone()),
        }
    }
}

/// Server-side state for one scheme: issued identities and the replay cache.
///
/// Under the proposed scheme one identity may hold several registrations,
/// each with its own registration number. The other schemes refuse a second
/// registration of the same identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    scheme: Scheme,
    records: Vec<Record>,
    ids: BTreeSet<BigUint>,
    lookup: BTreeSet<(BigUint, Option<BigUint>)>,
    numbers: BTreeSet<BigUint>,
    seen: BTreeSet<(Identity, u64)>,
}

impl Registry {
    pub fn new(scheme: Scheme) -> Self {
        Registry {
            scheme,
            records: Vec::new(),
            ids: BTreeSet::new(),
            lookup: BTreeSet::new(),
            numbers: BTreeSet::new(),
            seen: BTreeSet::new(),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_id(&self, id: &BigUint) -> bool {
        self.ids.contains(id)
    }

    pub fn has_sid(&self, sid: &BigUint) -> bool {
        self.lookup.contains(&(sid.clone(), None))
    }

    pub fn has_reg_number(&self, r: &BigUint) -> bool {
        self.numbers.contains(r)
    }

    /// Registry membership of a wire identity.
    pub fn contains(&self, identity: &Identity) -> bool {
        let key = match identity {
            Identity::Hl { id } => (id.clone(), None),
            Identity::Slh { sid } | Identity::Kumar { sid, .. } => (sid.clone(), None),
            Identity::Proposed { id, reg_number, .. } => (id.clone(), Some(reg_number.clone())),
        };
        self.lookup.contains(&key)
    }

    pub(crate) fn insert(&mut self, record: Record) -> Result<(), SchemeError> {
        if self.scheme != Scheme::Proposed && self.ids.contains(&record.id) {
            return Err(SchemeError::DuplicateId(record.id));
        }
        if let Some(r) = &record.reg_number {
            if self.numbers.contains(r) {
                return Err(SchemeError::DuplicateRegistrationNumber(r.clone()));
            }
        }
        let key = record.lookup_key();
        if self.lookup.contains(&key) {
            return Err(SchemeError::ShadowCollision(record.id));
        }
        self.ids.insert(record.id.clone());
        if let Some(r) = &record.reg_number {
            self.numbers.insert(r.clone());
        }
        self.lookup.insert(key);
        self.records.push(record);
        Ok(())
    }

    pub fn seen(&self) -> impl Iterator<Item = &(Identity, u64)> {
        self.seen.iter()
    }

    pub fn was_seen(&self, identity: &Identity, t_stamp: u64) -> bool {
        self.seen.contains(&(identity.clone(), t_stamp))
    }

    /// Records an accepted `(identity, T)` and forgets entries whose stamp
    /// is more than `retain` ticks behind `t_now`.
    pub(crate) fn remember(&mut self, identity: &Identity, t_stamp: u64, t_now: u64, retain: u64) {
        let horizon = t_now.saturating_sub(retain);
        self.seen.retain(|(_, t)| *t >= horizon);
        self.seen.insert((identity.clone(), t_stamp));
    }

    pub(crate) fn restore_seen(&mut self, identity: Identity, t_stamp: u64) {
        self.seen.insert((identity, t_stamp));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::CheckDigit;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn rec(id: u64) -> Record {
        Record {
            id: n(id),
            sid: None,
            reg_number: None,
        }
    }

    #[test]
    fn duplicate_ids_rejected_outside_proposed() {
        let mut reg = Registry::new(Scheme::Hl);
        reg.insert(rec(5)).unwrap();
        assert_eq!(reg.insert(rec(5)), Err(SchemeError::DuplicateId(n(5))));
        assert!(reg.contains(&Identity::Hl { id: n(5) }));
        assert!(!reg.contains(&Identity::Hl { id: n(6) }));
    }

    #[test]
    fn proposed_allows_same_id_distinct_numbers() {
        let mut reg = Registry::new(Scheme::Proposed);
        let with = |r| Record {
            id: n(9),
            sid: None,
            reg_number: Some(n(r)),
        };
        reg.insert(with(12)).unwrap();
        reg.insert(with(13)).unwrap();
        assert_eq!(
            reg.insert(with(12)),
            Err(SchemeError::DuplicateRegistrationNumber(n(12)))
        );
        assert_eq!(reg.len(), 2);
        let c_id = CheckDigit::new(0, 1).unwrap();
        assert!(reg.contains(&Identity::Proposed {
            id: n(9),
            reg_number: n(13),
            c_id
        }));
        assert!(!reg.contains(&Identity::Proposed {
            id: n(9),
            reg_number: n(14),
            c_id
        }));
    }

    #[test]
    fn shadow_collisions_are_refused() {
        let mut reg = Registry::new(Scheme::Slh);
        let with = |id, sid| Record {
            id: n(id),
            sid: Some(n(sid)),
            reg_number: None,
        };
        reg.insert(with(5, 17)).unwrap();
        assert_eq!(reg.insert(with(6, 17)), Err(SchemeError::ShadowCollision(n(6))));
        assert!(reg.has_sid(&n(17)));
    }

    #[test]
    fn replay_cache_expires() {
        let mut reg = Registry::new(Scheme::Hl);
        let who = Identity::Hl { id: n(5) };
        reg.remember(&who, 100, 100, 20);
        assert!(reg.was_seen(&who, 100));
        reg.remember(&who, 115, 120, 20);
        assert!(reg.was_seen(&who, 100));
        reg.remember(&who, 125, 125, 20);
        assert!(!reg.was_seen(&who, 100));
        assert!(reg.was_seen(&who, 115));
    }
}
