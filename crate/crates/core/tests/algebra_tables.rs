use swe_symmetry::algebra::{
    builtin_fixture, structure_constants, LieAlgebra, TableKind, TableReport,
};
use swe_symmetry::expr::{names, Bindings, Symbol};
use swe_symmetry::lie::catalog;
use swe_symmetry::swe::SystemKind;

fn algebra(kind: SystemKind) -> LieAlgebra {
    structure_constants(&catalog(kind).fields()).unwrap()
}

fn report(name: &str) -> TableReport {
    let fx = builtin_fixture(name).unwrap();
    let alg = algebra(fx.system);
    match fx.kind {
        TableKind::Commutator => TableReport::commutators(&alg, &fx).unwrap(),
        TableKind::Adjoint => {
            let samples: Vec<(f64, f64)> = [0.1, 0.3, 0.5, 1.0]
                .iter()
                .flat_map(|&e| [0.5, 1.0].map(move |o| (e, o)))
                .collect();
            TableReport::adjoint(&alg, &fx, &samples, 1e-10).unwrap()
        }
    }
}

#[test]
fn abelian_and_equator_tables_match() {
    for name in ["table1", "table2", "table3", "table4"] {
        let r = report(name);
        assert!(r.all_match(), "{name}\n{}", r.to_text());
    }
}

#[test]
fn pole_tables_produce_complete_verdicts() {
    for name in ["table5", "table6", "table6b"] {
        let r = report(name);
        eprintln!("{}", r.to_text());
        assert_eq!(
            r.summary.cells,
            r.summary.matches + r.summary.mismatches + r.summary.unparseable
        );
        assert_eq!(r.summary.unparseable, 0, "{name}");
    }
}

#[test]
fn adjoint_inverse_and_automorphism() {
    for kind in SystemKind::ALL {
        let alg = algebra(kind);
        for omega in [0.5, 1.0] {
            let mut p = Bindings::new();
            p.insert(Symbol::param(names::OMEGA), omega);
            for i in 0..alg.dim() {
                for eps in [0.1, 0.3, 1.0] {
                    let a = alg.adjoint_numeric(i, eps, &p).unwrap();
                    let b = alg.adjoint_numeric(i, -eps, &p).unwrap();
                    let id = nalgebra::DMatrix::<f64>::identity(alg.dim(), alg.dim());
                    assert!((&a * &b - id).amax() < 1e-12);
                    assert!(alg.automorphism_defect(&a, &p).unwrap() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn general_optimal_system_not_refuted() {
    use swe_symmetry::algebra::{builtin_optimal_system, optimal_system_screen, ScreenGrid};
    let fx = builtin_optimal_system("general").unwrap();
    let reps: Vec<&str> = fx.representatives.iter().map(String::as_str).collect();
    let r = optimal_system_screen(&algebra(SystemKind::General), &reps, &ScreenGrid::default())
        .unwrap();
    assert!(r
        .findings
        .iter()
        .all(|f| f.kind != swe_symmetry::algebra::FindingKind::Conjugate));
    assert!(r.not_refuted.values().all(|&b| b));
}

#[test]
fn equator_screen_absorbs_y1_plus_a4_y4() {
    use swe_symmetry::algebra::{builtin_optimal_system, optimal_system_screen, ScreenGrid};
    let fx = builtin_optimal_system("equator").unwrap();
    assert_eq!(
        fx.representatives
            .iter()
            .filter(|r| r.as_str() == "Y1 + a5*Y5")
            .count(),
        1
    );
    let reps: Vec<&str> = fx.representatives.iter().map(String::as_str).collect();
    let t = std::time::Instant::now();
    let r = optimal_system_screen(&algebra(SystemKind::Equator), &reps, &ScreenGrid::default())
        .unwrap();
    eprintln!(
        "equator screen: {} findings in {:?}",
        r.findings.len(),
        t.elapsed()
    );
    let f = r
        .conjugate("Y1 + a4*Y4", "Y4")
        .expect("Y1 + a4*Y4 maps onto Y4");
    let a4 = f.constants["a4"];
    assert_eq!(f.path.len(), 1);
    assert!((f.path[0].eps - 1.0 / a4).abs() < 1e-9, "{f:?}");
    assert_eq!(r.not_refuted["Y1 + a4*Y4"], false);
    for f in &r.findings {
        eprintln!(
            "{:?} {} -> {} via {:?}",
            f.kind,
            f.from,
            f.to,
            f.path
                .iter()
                .map(|s| (&s.generator, s.eps))
                .collect::<Vec<_>>()
        );
    }
}
