use serde_json::Value;
use swe_symmetry::cli::{exit, run};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("swe-sym").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = call(args);
    let v =
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}\nstdout: {out}\nstderr: {err}"));
    (code, v)
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| {
            (
                g["label"].as_str().unwrap().to_string(),
                g["status"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn verify_exit_codes() {
    for system in ["general", "equator"] {
        let (code, v) = json(&["verify", "--system", system]);
        assert_eq!(code, exit::OK);
        assert!(statuses(&v).iter().all(|(_, s)| s == "verified"));
    }
    let (code, v) = json(&["verify", "--system", "pole"]);
    assert_eq!(code, exit::FAILED);
    let st = statuses(&v);
    assert!(st[..7].iter().all(|(_, s)| s == "verified"));
    assert_eq!(st[7], ("Z8".into(), "corrected".into()));
    assert_eq!(st[8], ("Z9".into(), "unresolved".into()));
    assert_eq!(v["generators"][8]["minimal_edits"], 2);
    assert_eq!(v["unresolved"], serde_json::json!(["Z9"]));
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["verify", "--system", "tropics"]).0, exit::USAGE);
    assert_eq!(call(&["verify"]).0, exit::USAGE);
    assert_eq!(call(&["tables", "--tol", "-1"]).0, exit::USAGE);
    assert_eq!(
        call(&["integrate", "--reduction", "equator_y4y5", "--ic", "1,2"]).0,
        exit::USAGE
    );
    assert_eq!(
        call(&["integrate", "--figure", "fig1", "--method", "rk4"]).0,
        exit::USAGE
    );
    assert_eq!(
        call(&["residual", "--reduction", "equator_y4y5", "--omega", "nan"]).0,
        exit::USAGE
    );
    assert_eq!(call(&["frobnicate"]).0, exit::USAGE);
    assert_eq!(call(&["--help"]).0, exit::OK);
}

#[test]
fn missing_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(&["tables", "--fixtures", dir.path().to_str().unwrap()]).0,
        exit::NO_INPUT
    );
    assert_eq!(call(&["integrate", "--figure", "fig9"]).0, exit::NO_INPUT);
    assert_eq!(
        call(&["reduce", "--fixtures", dir.path().to_str().unwrap()]).0,
        exit::NO_INPUT
    );
}

#[test]
fn tables_report_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, v) = json(&["tables", "--out", out]);
    assert_eq!(code, exit::OK);
    let tables = v["tables"].as_array().unwrap();
    for t in tables {
        let s = &t["summary"];
        let name = t["table"].as_str().unwrap();
        if ["table1", "table2", "table3", "table4"].contains(&name) {
            assert_eq!(s["mismatches"], 0, "{name}");
        }
        assert_eq!(s["unparseable"], 0, "{name}");
        assert!(dir
            .path()
            .join("tables")
            .join(format!("{name}.txt"))
            .exists());
    }
    for a in v["algebras"].as_array().unwrap() {
        assert_eq!(a["antisymmetry_defects"], 0);
        assert_eq!(a["jacobi_defects"], 0);
        assert!(a["max_automorphism_defect"].as_f64().unwrap() < 1e-9);
    }
    let written = std::fs::read_to_string(dir.path().join("tables.json")).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&written).unwrap(), v);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["tables", "--table", "table6"][..],
        &["reduce"][..],
        &["integrate", "--figure", "fig2"][..],
        &["residual", "--reduction", "travelling_wave"][..],
    ] {
        let a = call(args);
        let b = call(args);
        assert_eq!(a.0, exit::OK, "{args:?}: {}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn reduce_listing() {
    let (code, v) = json(&["reduce"]);
    assert_eq!(code, exit::OK);
    let by_name = |n: &str| {
        v.as_array()
            .unwrap()
            .iter()
            .find(|r| r["reduction"] == n)
            .unwrap()
            .clone()
    };
    let y2 = by_name("equator_y2y5");
    assert_eq!(y2["closed_form"]["exact"], true);
    let y4 = by_name("equator_y4y5");
    let verdicts: Vec<(&str, &str)> = y4["comparisons"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["label"].as_str().unwrap(), c["verdict"].as_str().unwrap()))
        .collect();
    assert_eq!(
        verdicts,
        [
            ("L", "match"),
            ("e1", "match"),
            ("e2", "sign_flip"),
            ("e3", "sign_flip")
        ]
    );
    let tw = by_name("travelling_wave");
    assert_eq!(tw["loci"].as_array().unwrap().len(), 2);

    // numeric parameters flow into both sides of the comparison
    let (_, v) = json(&["reduce", "--reduction", "equator_y4y5", "--omega", "0"]);
    assert_eq!(v[0]["loci"][0]["expr"], "-2*w*U + w^2 - H*g + U^2");
}

#[test]
fn integrate_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, v) = json(&["integrate", "--figure", "fig1", "--out", out]);
    assert_eq!(code, exit::OK);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs[0]["summary"]["termination"], "completed");
    let csv = std::fs::read_to_string(dir.path().join("fig1_a.csv")).unwrap();
    assert!(csv.starts_with("w,H,U,V,dH,dU,dV\n"));
    assert!(!csv.contains("NaN") && !csv.contains("inf"));
    assert!(dir.path().join("fig1_a.events.json").exists());

    let (_, v) = json(&["integrate", "--figure", "fig2"]);
    let ev = &v["runs"][0]["summary"]["events"][0];
    assert_eq!(ev["locus"], "U - w");
    assert!(ev["locus_value"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn integrate_custom_fixed_step() {
    let (code, v) = json(&[
        "integrate",
        "--reduction",
        "equator_y2y5",
        "--ic",
        "1,0,1",
        "--from",
        "1",
        "--to",
        "2",
        "--method",
        "rk4",
        "--step",
        "1e-3",
        "--omega",
        "1",
        "--g",
        "10",
    ]);
    assert_eq!(code, exit::OK);
    let run = &v["runs"][0]["summary"];
    assert_eq!(run["termination"], "completed");
    assert_eq!(run["method"], "rk4");
}

#[test]
fn residual_norms() {
    let (code, v) = json(&["residual", "--reduction", "equator_y2y5"]);
    assert_eq!(code, exit::OK);
    assert_eq!(v["closed_form_exact"], true);
    for o in v["orders"].as_array().unwrap() {
        assert!((o.as_f64().unwrap() - 2.0).abs() < 0.3);
    }
    let (_, v) = json(&[
        "residual",
        "--reduction",
        "travelling_wave",
        "--constant",
        "--ic",
        "1,0,0",
    ]);
    assert!(v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["max"].as_f64() == Some(0.0)));
    let (_, v) = json(&["residual", "--reduction", "equator_y4y5"]);
    for r in v["reports"].as_array().unwrap() {
        let d = r["delta"].as_f64().unwrap();
        assert!(r["max"].as_f64().unwrap() <= 50.0 * (d * d + 1e-8));
    }
}
