use std::time::Instant;

use swe_symmetry::lie::{catalog, search_corrections, EditKind};
use swe_symmetry::swe::{AdvectionReading, PdeSystem, SystemKind};

#[test]
fn every_printed_generator_except_z8_z9_verifies() {
    for kind in SystemKind::ALL {
        let cat = catalog(kind);
        let sys = cat.pde();
        for e in &cat.entries {
            let ok = e.printed_field().is_symmetry(&sys).verified;
            assert_eq!(
                ok,
                !matches!(e.label, "Z8" | "Z9"),
                "{} on {}",
                e.label,
                kind.name()
            );
            assert!(
                e.field().is_symmetry(&sys).verified,
                "corrected {}",
                e.label
            );
        }
    }
}

#[test]
fn printed_advection_term_breaks_pole_symmetries() {
    let sys = PdeSystem::build(SystemKind::Pole, AdvectionReading::AsPrinted);
    let cat = catalog(SystemKind::Pole);
    let failing: Vec<_> = cat
        .entries
        .iter()
        .filter(|e| !e.field().is_symmetry(&sys).verified)
        .map(|e| e.label)
        .collect();
    assert!(
        failing.contains(&"Z5") && failing.contains(&"Z6"),
        "{failing:?}"
    );
}

#[test]
fn correction_search_z8_single_swap() {
    let cat = catalog(SystemKind::Pole);
    let z8 = cat.entries.iter().find(|e| e.label == "Z8").unwrap();
    let t = Instant::now();
    let s = search_corrections("Z8", &z8.printed, &cat.pde(), 2).unwrap();
    assert_eq!(s.minimal_edits(), Some(1));
    assert_eq!(s.corrections.len(), 1);
    assert_eq!(s.corrections[0].edits[0].kind, EditKind::SwapUV);
    assert_eq!(s.corrections[0].field.components(), z8.field().components());
    eprintln!(
        "Z8 search: {} candidates in {:?}",
        s.candidate_edits,
        t.elapsed()
    );
}

#[test]
fn correction_search_z9_needs_two_edits() {
    let cat = catalog(SystemKind::Pole);
    let z9 = cat.entries.iter().find(|e| e.label == "Z9").unwrap();
    let t = Instant::now();
    let s = search_corrections("Z9", &z9.printed, &cat.pde(), 2).unwrap();
    eprintln!(
        "Z9 search: {} candidates in {:?}",
        s.candidate_edits,
        t.elapsed()
    );
    assert_eq!(s.minimal_edits(), Some(2));
    let kinds: Vec<Vec<EditKind>> = s
        .corrections
        .iter()
        .map(|c| c.edits.iter().map(|e| e.kind).collect())
        .collect();
    assert!(
        kinds.contains(&vec![EditKind::InsertH, EditKind::DoubleOmega]),
        "{kinds:?}"
    );
    assert!(s
        .corrections
        .iter()
        .any(|c| c.field.components() == z9.field().components()));
}
