//! End-to-end tests of the qfe binary: exit codes, certificate round-trips,
//! catalog behavior.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qfe"))
}

fn write(dir: &Path, name: &str, v: &Value) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let gp = write(dir.path(), "gp.json", &json!({"diag": ["1","1","1","-7"]}));
    let out = bin().arg("analyze").arg(&gp).output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["profile"]["disc"], "-7");
    assert_eq!(cert["verdicts"]["isotropic"], json!(false));
    assert_eq!(cert["verdicts"]["admissible"], json!(true));
    for p in ["inf", "2", "7"] {
        assert_eq!(cert["verdicts"]["profile"]["hasse"][p], json!(1));
    }
}

#[test]
fn analyze_batch_matches_sequential() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &json!({"diag": ["1","-1"]}));
    let b = write(dir.path(), "b.json", &json!({"diag": ["1","1","-1"]}));
    let batch = bin().arg("analyze").arg(&a).arg(&b).output().unwrap();
    assert!(batch.status.success());
    let sa = bin().arg("analyze").arg(&a).output().unwrap();
    let sb = bin().arg("analyze").arg(&b).output().unwrap();
    // identical apart from timestamps: compare verdict blocks in order
    let text = String::from_utf8(batch.stdout).unwrap();
    let docs: Vec<Value> = serde_json::Deserializer::from_str(&text)
        .into_iter::<Value>()
        .map(|d| d.unwrap())
        .collect();
    assert_eq!(docs.len(), 2);
    assert_eq!(docs[0]["verdicts"], stdout_json(&sa)["verdicts"]);
    assert_eq!(docs[1]["verdicts"], stdout_json(&sb)["verdicts"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage/parse error: malformed JSON
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "not json").unwrap();
    let out = bin().arg("analyze").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // mathematical error: degenerate form
    let dg = write(dir.path(), "dg.json", &json!({"gram": [["1","0"],["0","0"]]}));
    let out = bin().arg("analyze").arg(&dg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // not equivalent -> exit 1
    let a = write(dir.path(), "a.json", &json!({"diag": ["1","1","1","-7"]}));
    let b = write(dir.path(), "b.json", &json!({"diag": ["1","1","1","-1"]}));
    let out = bin().arg("equiv").arg(&a).arg(&b).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdicts"]["equivalent"], json!(false));
    // equivalent -> exit 0
    let g = write(dir.path(), "g.json", &json!({"diag": ["21","1","1","-3"]}));
    let out = bin().arg("equiv").arg(&g).arg(&a).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn isotropy_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &json!({"diag": ["1","1","1","1","-1"]}));
    let out = bin()
        .args(["isotropy"])
        .arg(&f)
        .args(["--places", "5,11"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["global"], json!(true));
    assert_eq!(cert["verdicts"]["local"]["5"], json!(true));
    assert!(cert["witnesses"]["isotropy"].is_array());
    let aniso = write(dir.path(), "a.json", &json!({"diag": ["1","1","-3"]}));
    let out = bin().arg("isotropy").arg(&aniso).output().unwrap();
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["global"], json!(false));
    assert_eq!(cert["verdicts"]["local"]["3"], json!(false));
}

#[test]
fn represents_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &json!({"diag": ["1","1","1"]}));
    let out = bin().arg("represents").arg(&f).arg("6").output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["represents"], json!(true));
    assert!(cert["witnesses"]["vector"].is_array());
    let out = bin().arg("represents").arg(&f).arg("7").output().unwrap();
    assert_eq!(stdout_json(&out)["verdicts"]["represents"], json!(false));
}

#[test]
fn extend_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &json!({"diag": ["1","1","-3"]}));
    let out = bin().arg("extend").arg(&f).args(["--q", "21"]).output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["case"], "anisotropic_ternary");
    assert_eq!(cert["verdicts"]["q"], "21");
    assert_eq!(cert["verdicts"]["output_isotropic"], json!(false));
    assert_eq!(cert["verdicts"]["obstruction"]["place"], "2");
    // default policy
    let out = bin().arg("extend").arg(&f).output().unwrap();
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["admissible"], json!(true));
    // represented -q rejected with math exit code
    let out = bin().arg("extend").arg(&f).args(["--q", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin().arg("missing").arg(&f).args(["--sign", "-"]).output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["represented"], json!(false));
    let out = bin().arg("missing").arg(&f).args(["--sign", "+"]).output().unwrap();
    assert_eq!(stdout_json(&out)["verdicts"]["t"], "3");
}

#[test]
fn lift_and_psl2() {
    let dir = tempfile::tempdir().unwrap();
    let j2 = write(dir.path(), "j2.json", &json!({"diag": ["1","1","-1"]}));
    let refl = r#"[["-1","0","0"],["0","1","0"],["0","0","1"]]"#;
    let out = bin().arg("lift").arg(&j2).arg(refl).output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["det"], "1");
    assert_eq!(cert["verdicts"]["sheet_preserving"], json!(true));

    let elem = r#"{"a":"1","b":{"a":"0","b":"1"},"c":"0","d":"1"}"#;
    let out = bin().arg("psl2").arg(elem).output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["isometry"], json!(true));
    assert_eq!(cert["verdicts"]["det_one"], json!(true));
    assert_eq!(cert["verdicts"]["integral"], json!(true));
    // non-unimodular input -> math error
    let bad = r#"{"a":"2","b":"0","c":"0","d":"1"}"#;
    let out = bin().arg("psl2").arg(bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demos() {
    let out = bin().args(["demo", "tau-cert"]).output().unwrap();
    assert!(out.status.success());
    let cert = stdout_json(&out);
    assert_eq!(cert["verdicts"]["entry_squared"], "1/5");
    assert_eq!(cert["verdicts"]["entry_rational"], json!(false));

    let out = bin().args(["demo", "sl3", "--n", "2", "--P", "1"]).output().unwrap();
    assert_eq!(stdout_json(&out)["verdicts"]["integral"], json!(false));

    let out = bin().args(["demo", "gamma0", "--n", "5"]).output().unwrap();
    let cert = stdout_json(&out);
    for c in cert["verdicts"]["conjugations"].as_array().unwrap() {
        assert_eq!(c["member"], json!(true));
    }

    let out = bin().args(["demo", "squares", "--L", "2"]).output().unwrap();
    assert_eq!(stdout_json(&out)["verdicts"]["all_rational"], json!(true));

    let out = bin().args(["demo", "bianchi"]).output().unwrap();
    assert_eq!(
        stdout_json(&out)["verdicts"]["generators_map_into_so_f_z"],
        json!(true)
    );

    let out = bin().args(["demo", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_roundtrip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &json!({"diag": ["21","1","1","-3"]}));
    let cert_path = dir.path().join("cert.json");
    let out = bin()
        .arg("analyze")
        .arg(&f)
        .arg("--json-out")
        .arg(&cert_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin().arg("verify").arg(&cert_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    // tamper with a Hasse value
    let mut cert: Value =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    cert["verdicts"]["profile"]["hasse"]["3"] = json!(-1);
    let tampered = write(dir.path(), "tampered.json", &cert);
    let out = bin().arg("verify").arg(&tampered).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("mismatch"), "stderr: {err}");

    // unsupported schema version
    cert["schema_version"] = json!("0");
    let old = write(dir.path(), "old.json", &cert);
    let out = bin().arg("verify").arg(&old).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("schema_version"), "stderr: {err}");
}

#[test]
fn verify_all_pure_commands_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &json!({"diag": ["1","1","-3"]}));
    let j2 = write(dir.path(), "j2.json", &json!({"diag": ["1","1","-1"]}));
    let cert = dir.path().join("c.json");
    let runs: Vec<Vec<String>> = vec![
        vec!["analyze".into(), f.display().to_string()],
        vec!["isotropy".into(), f.display().to_string()],
        vec!["represents".into(), f.display().to_string(), "1".into()],
        vec![
            "extend".into(),
            f.display().to_string(),
            "--q".into(),
            "21".into(),
        ],
        vec![
            "missing".into(),
            f.display().to_string(),
            "--sign".into(),
            "-".into(),
        ],
        vec![
            "lift".into(),
            j2.display().to_string(),
            r#"[["1","0","0"],["0","-1","0"],["0","0","1"]]"#.into(),
        ],
        vec![
            "psl2".into(),
            r#"{"a":"1","b":"1","c":"0","d":"1"}"#.into(),
        ],
        vec!["demo".into(), "tau-cert".into()],
        vec!["demo".into(), "squares".into()],
    ];
    for args in runs {
        let out = bin()
            .args(&args)
            .arg("--json-out")
            .arg(&cert)
            .output()
            .unwrap();
        assert!(out.status.success(), "command {args:?} failed");
        let out = bin().arg("verify").arg(&cert).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "verify failed for {args:?}");
    }
}

#[test]
fn catalog_flow() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("cat.jsonl");
    let g = write(dir.path(), "g.json", &json!({"diag": ["21","1","1","-3"]}));
    let gp = write(dir.path(), "gp.json", &json!({"diag": ["1","1","1","-7"]}));
    let j2 = write(dir.path(), "j2.json", &json!({"diag": ["1","1","-1"]}));

    let out = bin()
        .arg("catalog")
        .arg("add")
        .arg(&g)
        .env("QFE_CATALOG", &catalog)
        .output()
        .unwrap();
    assert!(out.status.success());

    // equivalent form lands in the same class
    let out = bin()
        .arg("catalog")
        .arg("query")
        .arg(&gp)
        .env("QFE_CATALOG", &catalog)
        .output()
        .unwrap();
    assert!(out.status.success());
    let res = stdout_json(&out);
    assert_eq!(res["matches"].as_array().unwrap().len(), 1);

    // unknown form -> empty result
    let out = bin()
        .arg("catalog")
        .arg("query")
        .arg(&j2)
        .env("QFE_CATALOG", &catalog)
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["matches"].as_array().unwrap().len(), 0);

    // record an extension edge
    let out = bin()
        .arg("catalog")
        .arg("link")
        .arg(&j2)
        .env("QFE_CATALOG", &catalog)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stored = stdout_json(&out);
    assert_eq!(stored["stored"]["kind"], "link");
    assert_eq!(stored["stored"]["q"], "1");

    // --catalog flag overrides the environment
    let alt = dir.path().join("alt.jsonl");
    let out = bin()
        .arg("catalog")
        .arg("add")
        .arg(&j2)
        .arg("--catalog")
        .arg(&alt)
        .env("QFE_CATALOG", &catalog)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(alt.exists());
}

#[test]
fn catalog_key_completeness_smoke() {
    // random inserts never collide between inequivalent forms (the add
    // command errors on integrity violations)
    use rand::{Rng, SeedableRng};
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("cat.jsonl");
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(0xCA7);
    for i in 0..60 {
        let rank = r.gen_range(2..=4usize);
        let coeffs: Vec<String> = (0..rank)
            .map(|_| loop {
                let x: i64 = r.gen_range(-12..=12);
                if x != 0 {
                    break x.to_string();
                }
            })
            .collect();
        let file = write(dir.path(), &format!("f{i}.json"), &json!({ "diag": coeffs }));
        let out = bin()
            .arg("catalog")
            .arg("add")
            .arg(&file)
            .env("QFE_CATALOG", &catalog)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "integrity failure on insert {i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
