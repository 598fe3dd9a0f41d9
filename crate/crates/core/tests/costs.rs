// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

use scauth_core::costmodel::{cost_table, golden_table, measure_table, CostError};
use scauth_core::{CostVector, Phase, Scheme};

fn symbolic(scheme: Scheme, phase: Phase) -> &'static str {
    match (scheme, phase) {
        (Scheme::Hl, Phase::Registration) => "E",
        (Scheme::Slh, Phase::Registration) => "R+E",
        (Scheme::Kumar, Phase::Registration) => "R+E+C",
        (Scheme::Proposed, Phase::Registration) => "E+C",
        (_, Phase::Login) => "3E+H+M",
        (Scheme::Hl | Scheme::Slh, Phase::Authentication) => "3E+H+M",
        (Scheme::Kumar | Scheme::Proposed, Phase::Authentication) => "3E+H+M+C",
    }
}

#[test]
fn measured_counts_match_every_cell() {
    let table = cost_table().unwrap();
    for scheme in Scheme::ALL {
        for phase in Phase::ALL {
            let cost = table.get(scheme, phase).unwrap();
            assert_eq!(cost.to_string(), symbolic(scheme, phase), "{scheme} {phase}");
        }
    }
    assert_eq!(table.cells.len(), 12);
}

#[test]
fn proposed_registration_saves_exactly_one_shadow() {
    let table = measure_table().unwrap();
    let kumar = table.get(Scheme::Kumar, Phase::Registration).unwrap();
    let proposed = table.get(Scheme::Proposed, Phase::Registration).unwrap();
    assert_eq!(kumar, proposed + CostVector::new(0, 0, 0, 1, 0));
}

#[test]
fn a_wrong_golden_cell_is_reported() {
    let mut golden = golden_table();
    golden.cells[5].cost.exp += 1;
    let cell = golden.cells[5];
    match measure_table().unwrap().compare(&golden) {
        Err(CostError::TableMismatch { scheme, phase, .. }) => assert_eq!((scheme, phase), (cell.scheme, cell.phase)),
        other => panic!("expected a mismatch, got {other:?}"),
    }
}

#[test]
fn json_round_trip() {
    let table = measure_table().unwrap();
    let json = table.to_json();
    assert!(json.contains("\"E\": 3"));
    assert_eq!(scauth_core::costmodel::CostTable::from_json(&json).unwrap(), table);
}
