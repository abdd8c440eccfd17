//! End-to-end checks of the `mhh` binary: the documented invocations, exit
//! codes, config-file precedence, and byte-determinism of every writer.

use std::process::{Command, Output};

fn mhh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn tor_at_stem_zero_is_a_single_unit_row() {
    let out = mhh(&["tor", "--prime", "2", "--stem-max", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "filtration\tdegree\tweight\tdim\tbasis-labels");
    assert_eq!(lines[1..], ["0\t0\t0\t1\t[]"]);
}

#[test]
fn tor_mod_tau_matches_the_truncated_polynomial_pattern() {
    let out = mhh(&["tor", "--prime", "2", "--variant", "mod-tau", "--stem-max", "8"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // Truncated height-2 towers on μ_0, μ_1, μ_2 within stems ≤ 8: the unit,
    // the three generators, and the square-free products that fit.
    for row in [
        "0\t0\t0\t1\t",
        "1\t1\t0\t1\t",
        "1\t3\t1\t1\t",
        "1\t7\t3\t1\t",
        "2\t2\t0\t1\t",
        "2\t4\t1\t1\t",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(row)),
            "missing row {row:?} in:\n{text}"
        );
    }
}

#[test]
fn composite_modulus_is_a_usage_error() {
    let out = mhh(&["tor", "--prime", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("modulus must be prime"));
}

#[test]
fn unknown_variant_ring_and_suite_are_usage_errors() {
    for args in [
        &["tor", "--variant", "quantum"][..],
        &["hilbert", "galois"][..],
        &["chart", "galois"][..],
        &["verify", "nonsense"][..],
    ] {
        let out = mhh(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn verify_cube_contractibility_covers_many_cubes() {
    let out = mhh(&["verify", "cube-contractibility", "--prime", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    assert_eq!(v["suite"], "cube-contractibility");
    assert!(v["cells_checked"].as_u64().expect("count") >= 80);
    assert_eq!(v["failures"].as_array().expect("list").len(), 0);
}

#[test]
fn verify_report_has_exactly_the_contract_fields() {
    let out = mhh(&["verify", "intro-relations", "--prime", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).expect("json report");
    let obj = v.as_object().expect("object");
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["cells_checked", "failures", "suite"]);
    // Fixed field order in the serialized report.
    let pos = |k: &str| text.find(k).expect("field present");
    assert!(pos("suite") < pos("cells_checked"));
    assert!(pos("cells_checked") < pos("failures"));
}

#[test]
fn verify_rejects_characteristic_two_relations_at_odd_primes() {
    let out = mhh(&["verify", "intro-relations", "--prime", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_fills_defaults_and_flags_override_it() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, "{\"prime\": 3, \"stem-max\": 4}\n").expect("write config");
    let cfg = cfg.to_str().expect("utf8 path");

    let from_file = mhh(&["tor", "--config", cfg]);
    let from_flags = mhh(&["tor", "--prime", "3", "--stem-max", "4"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&from_flags));

    let overridden = mhh(&["tor", "--config", cfg, "--stem-max", "2"]);
    let direct = mhh(&["tor", "--prime", "3", "--stem-max", "2"]);
    assert_eq!(stdout(&overridden), stdout(&direct));
}

#[test]
fn unknown_config_keys_are_usage_errors() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\"primez\": 3}\n").expect("write config");
    let out = mhh(&["tor", "--config", cfg.to_str().expect("utf8 path")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("primez"));
}

#[test]
fn empty_weight_windows_are_usage_errors() {
    let out = mhh(&["chart", "etale", "--weight-min", "5", "--weight-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty weight window"));
}

#[test]
fn file_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().expect("tempdir");
    for (name, args) in [
        ("hilbert.tsv", &["hilbert", "integral", "--prime", "2", "--stem-max", "8"][..]),
        ("tor.json", &["tor", "--prime", "3", "--stem-max", "6", "--format", "json"][..]),
        ("chart.svg", &["chart", "reduced", "--prime", "3", "--stem-max", "9"][..]),
    ] {
        let a = dir.path().join(format!("a-{name}"));
        let b = dir.path().join(format!("b-{name}"));
        for path in [&a, &b] {
            let mut full: Vec<&str> = args.to_vec();
            full.push("--out");
            full.push(path.to_str().expect("utf8 path"));
            let out = mhh(&full);
            assert!(out.status.success(), "{name}: {}", stderr(&out));
        }
        let bytes_a = std::fs::read(&a).expect("first run output");
        let bytes_b = std::fs::read(&b).expect("second run output");
        assert_eq!(bytes_a, bytes_b, "{name} differs between runs");
    }
}

#[test]
fn chart_marks_round_trip_with_the_hilbert_table() {
    for ring in ["etale", "reduced", "integral"] {
        let chart = mhh(&["chart", ring, "--prime", "2", "--stem-max", "8", "--format", "tsv"]);
        let hilbert = mhh(&["hilbert", ring, "--prime", "2", "--stem-max", "8"]);
        assert!(chart.status.success(), "{}", stderr(&chart));
        assert_eq!(stdout(&chart), stdout(&hilbert), "ring {ring}");
    }
}

#[test]
fn integral_chart_shows_the_isolated_torsion_dots() {
    let out = mhh(&["chart", "integral", "--prime", "2", "--stem-max", "12", "--format", "tsv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for row in ["3\t1\t1\tx{;1*d0}", "7\t3\t1\tx{;1*d1}"] {
        assert!(text.lines().any(|l| l == row), "missing {row:?} in:\n{text}");
    }
}

#[test]
fn svg_charts_are_valid_and_carry_one_dot_per_class() {
    let out = mhh(&["chart", "etale", "--prime", "2", "--stem-max", "6", "--weight-min", "0", "--weight-max", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let svg = stdout(&out);
    assert!(svg.starts_with("<?xml version=\"1.0\""));
    assert!(svg.contains("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    // Stems 0, 2, 4, 6 × weights 0..2 are all occupied in the τ-inverted
    // ring: 12 dots, and each column carries two vertical τ-lines.
    assert_eq!(svg.matches("<circle").count(), 12);
    let tau_lines = svg.matches("stroke=\"#888888\"").count();
    assert_eq!(tau_lines, 8);
}

#[test]
fn tsv_and_json_report_the_same_cells() {
    let tsv = mhh(&["tor", "--prime", "2", "--stem-max", "6"]);
    let json = mhh(&["tor", "--prime", "2", "--stem-max", "6", "--format", "json"]);
    let data_rows = stdout(&tsv).lines().count() - 1;
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("json table");
    assert_eq!(v["rows"].as_array().expect("rows").len(), data_rows);
}
