use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use keylease::skl::QuantumKey;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tempfile::TempDir;

fn keylease(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keylease"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = keylease(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// keygen, encrypt, decrypt, lease-return; returns the printed plaintext.
fn lifecycle(dir: &Path, scheme_args: &[&str], message: &str) -> String {
    let mut args = vec!["keygen", "--seed", "1", "--out", "k"];
    args.extend_from_slice(scheme_args);
    ok(dir, &args);
    ok(dir, &["encrypt", "k/ek.json", message, "--seed", "2"]);
    let plain = ok(dir, &["decrypt", "k/qdk.json", "ct.json", "--seed", "3"]);
    let verdict = ok(dir, &["lease-return", "k/vk.json", "k/qdk.json", "--seed", "4"]);
    assert_eq!(verdict.trim(), "⊤");
    plain.trim().to_string()
}

#[test]
fn basic_lifecycle_exits_zero_and_accepts() {
    let dir = TempDir::new().unwrap();
    assert_eq!(lifecycle(dir.path(), &["--scheme", "basic"], "c0de"), "c0de");
    assert!(dir.path().join("returned_qdk.json").exists());
}

#[test]
fn every_scheme_round_trips_through_files() {
    let cases: [(&[&str], &str); 5] = [
        (&["--scheme", "basic", "--msg-bits", "8"], "a5"),
        (&["--scheme", "ow", "--lambda-blocks", "2", "--msg-bits", "4"], "3c"),
        (&["--scheme", "ind", "--lambda-blocks", "2", "--msg-bits", "4"], "1"),
        (&["--scheme", "abe1", "--msg-bits", "4", "--id-bits", "2"], "9"),
        (&["--scheme", "qabe", "--msg-bits", "4", "--id-bits", "1", "--q", "2"], "6"),
    ];
    for (args, m) in cases {
        let dir = TempDir::new().unwrap();
        assert_eq!(lifecycle(dir.path(), args, m), m, "{args:?}");
    }
}

fn run_all(dir: &Path) -> Vec<String> {
    vec![
        ok(dir, &["keygen", "--scheme", "ow", "--lambda-blocks", "2", "--msg-bits", "8", "--seed", "5", "--out", "k"]),
        ok(dir, &["encrypt", "k/ek.json", "77ff", "--seed", "6"]),
        ok(dir, &["decrypt", "k/qdk.json", "ct.json", "--seed", "7"]),
        ok(dir, &["lease-return", "k/vk.json", "k/qdk.json", "--seed", "8"]),
        ok(dir, &["attack", "measure_keep", "--scheme", "ow", "--lambda-blocks", "2", "--msg-bits", "8", "--trials", "40", "--seed", "9", "--out", "report.json"]),
        ok(dir, &["bench", "--scheme", "basic", "--msg-bits", "8", "--trials", "20", "--seed", "10", "--out", "bench.json"]),
    ]
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("k")] {
        for e in fs::read_dir(&sub).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                files.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn identical_invocations_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(run_all(a.path()), run_all(b.path()));
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert_eq!(sa.len(), 7);
    assert_eq!(sa, sb);
}

#[test]
fn mismatched_files_are_rejected() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["keygen", "--scheme", "basic", "--seed", "1", "--out", "b"]);
    ok(d, &["keygen", "--scheme", "ow", "--lambda-blocks", "2", "--seed", "1", "--out", "o"]);
    ok(d, &["encrypt", "b/ek.json", "0001", "--seed", "2"]);
    let out = keylease(d, &["decrypt", "o/qdk.json", "ct.json", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("scheme mismatch"), "{}", stderr(&out));

    let out = keylease(d, &["encrypt", "b/ek.json", "0001", "--scheme", "ind", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("scheme mismatch"));

    ok(d, &["keygen", "--scheme", "basic", "--msg-bits", "8", "--seed", "1", "--out", "b8"]);
    let out = keylease(d, &["lease-return", "b8/vk.json", "b/qdk.json", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("configuration mismatch"));
}

#[test]
fn malformed_files_name_the_field() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["keygen", "--scheme", "basic", "--seed", "1", "--out", "k"]);
    ok(d, &["encrypt", "k/ek.json", "0001", "--seed", "2"]);

    fs::write(d.join("bad.json"), r#"{"kind":"ciphertext"}"#).unwrap();
    let out = keylease(d, &["decrypt", "k/qdk.json", "bad.json", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("config"), "{}", stderr(&out));

    let mut qdk: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("k/qdk.json")).unwrap()).unwrap();
    qdk["body"].as_object_mut().unwrap().remove("state");
    fs::write(d.join("nostate.json"), qdk.to_string()).unwrap();
    let out = keylease(d, &["decrypt", "nostate.json", "ct.json", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("state"), "{}", stderr(&out));

    let mut qdk: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("k/qdk.json")).unwrap()).unwrap();
    qdk.as_object_mut().unwrap().remove("banner");
    fs::write(d.join("nobanner.json"), qdk.to_string()).unwrap();
    let out = keylease(d, &["decrypt", "nobanner.json", "ct.json", "--seed", "3"]);
    assert!(stderr(&out).contains("banner"), "{}", stderr(&out));

    let out = keylease(d, &["decrypt", "ct.json", "ct.json", "--seed", "3"]);
    assert!(stderr(&out).contains("kind"), "{}", stderr(&out));

    let out = keylease(d, &["encrypt", "k/ek.json", "12345", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_is_mandatory() {
    let dir = TempDir::new().unwrap();
    let out = keylease(dir.path(), &["keygen", "--scheme", "basic"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--seed"));
}

/// Replaces the state in a key file by its computational-basis collapse.
fn collapse(path: &Path, seed: u64) {
    let mut file: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let key: QuantumKey = serde_json::from_value(file["body"]["state"].clone()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (_, collapsed) = key.measure_blocks(&[0], &mut rng).unwrap();
    file["body"]["state"] = serde_json::to_value(&collapsed).unwrap();
    fs::write(path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
}

#[test]
fn collapsed_key_is_rejected_about_half_the_time() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let runs = 40;
    let mut rejected = 0;
    for seed in 0..runs {
        let out_dir = format!("k{seed}");
        ok(d, &["keygen", "--scheme", "basic", "--msg-bits", "8", "--seed", &seed.to_string(), "--out", &out_dir]);
        collapse(&d.join(&out_dir).join("qdk.json"), seed);
        let qdk = format!("{out_dir}/qdk.json");
        let vk = format!("{out_dir}/vk.json");
        let out = keylease(d, &["lease-return", &vk, &qdk, "--seed", &seed.to_string()]);
        match out.status.code() {
            Some(0) => assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "⊤"),
            Some(2) => {
                assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "⊥");
                rejected += 1;
            }
            other => panic!("unexpected exit {other:?}: {}", stderr(&out)),
        }
    }
    // Binomial(40, 1/2): [8, 32] holds with probability > 0.9999.
    assert!((8..=32).contains(&rejected), "{rejected} of {runs} rejected");
}

#[test]
fn attack_report_matches_analytic_value() {
    let dir = TempDir::new().unwrap();
    let json = ok(
        dir.path(),
        &["attack", "measure_keep", "--scheme", "ow", "--lambda-blocks", "2", "--msg-bits", "4", "--trials", "400", "--seed", "3"],
    );
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(report["analytic"], 0.25);
    let est = report["estimate"].as_f64().unwrap();
    assert!((est - 0.25).abs() < 0.08, "{est}");
}

#[test]
fn attack_games_and_errors() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let base = ["--scheme", "basic", "--msg-bits", "4", "--trials", "20", "--seed", "1"];
    for (strategy, game) in [
        ("honest", "ow-kla"),
        ("measure_keep", "ind-kla"),
        ("measure_clone_twice", "omur"),
        ("random_guess", "coic"),
        ("coherent_consistency_test", "coic-anytime"),
    ] {
        let mut args = vec!["attack", strategy, game];
        args.extend_from_slice(&base);
        let report: serde_json::Value = serde_json::from_str(&ok(d, &args)).unwrap();
        assert_eq!(report["trials"], 20);
    }
    for (strategy, game) in [("honest", "nope"), ("bogus", "verification"), ("coherent_consistency_test", "coic")] {
        let mut args = vec!["attack", strategy, game];
        args.extend_from_slice(&base);
        assert_eq!(keylease(d, &args).status.code(), Some(1), "{strategy} {game}");
    }
    let out = keylease(d, &["attack", "honest", "omur", "--scheme", "abe1", "--msg-bits", "2", "--id-bits", "1", "--trials", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
