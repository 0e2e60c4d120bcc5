use std::path::Path;
use std::process::{Command, Output};

fn assouad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assouad"))
        .args(args)
        .env_remove("ASSOUAD_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_embed_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let emb = dir.path().join("emb.json");
    let rep = dir.path().join("rep.json");
    let rep2 = dir.path().join("rep2.json");
    let levels = dir.path().join("levels.json");

    assert_eq!(code(&assouad(&["generate", "cantor:2", "--out", p(&inst)])), 0);
    let out = assouad(&[
        "embed", "--instance", p(&inst), "--alpha", "0.8", "--out", p(&emb), "--report", p(&rep), "--levels",
        p(&levels),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&assouad(&["verify", "--instance", p(&inst), "--embedding", p(&emb), "--report", p(&rep2)])), 0);

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep2).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(std::fs::read(&rep).unwrap(), std::fs::read(&rep2).unwrap());
    let embedding: serde_json::Value = serde_json::from_slice(&std::fs::read(&emb).unwrap()).unwrap();
    let n = embedding["dimension_n"].as_u64().unwrap();
    assert_eq!(n, 2 * embedding["chi"].as_u64().unwrap() * embedding["m"].as_u64().unwrap());
    assert_eq!(embedding["coordinates"]["0"].as_array().unwrap().len() as u64, n);
    assert!(levels.exists());
}

#[test]
fn tampered_embedding_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let emb = dir.path().join("emb.json");
    let rep = dir.path().join("rep.json");
    assert_eq!(code(&assouad(&["generate", "line:6", "--out", p(&inst)])), 0);
    assert_eq!(code(&assouad(&["embed", "--instance", p(&inst), "--out", p(&emb), "--no-verify"])), 0);
    assert!(!rep.exists());

    let mut e: serde_json::Value = serde_json::from_slice(&std::fs::read(&emb).unwrap()).unwrap();
    let first = &mut e["coordinates"]["0"][0];
    *first = serde_json::json!(first.as_f64().unwrap() + 1.0);
    std::fs::write(&emb, serde_json::to_vec(&e).unwrap()).unwrap();
    assert_eq!(code(&assouad(&["verify", "--instance", p(&inst), "--embedding", p(&emb), "--report", p(&rep)])), 5);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["violations"][0]["check"], "coordinate_mismatch");
}

#[test]
fn parameter_rejection_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(code(&assouad(&["embed", "--generate", "line:2", "--tau", "0.2", "--out", p(&out)])), 2);
    assert_eq!(code(&assouad(&["embed", "--generate", "line:2", "--alpha", "0.6", "--out", p(&out)])), 2);
    assert_eq!(code(&assouad(&["embed", "--generate", "line:4", "--m", "3", "--out", p(&out)])), 2);
    assert!(!out.exists());
}

#[test]
fn metric_rejection_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.json");
    std::fs::write(&inst, r#"{"points":[0,1,2],"metric":"matrix","matrix":[[0,1,5],[1,0,1],[5,1,0]]}"#).unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(code(&assouad(&["embed", "--instance", p(&inst), "--out", p(&out)])), 3);
}

#[test]
fn usage_and_other_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(code(&assouad(&["embed", "--out", p(&out)])), 1);
    assert_eq!(code(&assouad(&["embed", "--generate", "line:600", "--out", p(&out)])), 1);
    assert_eq!(code(&assouad(&["generate", "blob:3", "--out", p(&out)])), 1);
}

#[test]
fn seed_variable_overrides_generator_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, kind: &str, seed: Option<&str>| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_assouad"));
        cmd.args(["generate", kind, "--out", p(&path)]).env_remove("ASSOUAD_SEED");
        if let Some(s) = seed {
            cmd.env("ASSOUAD_SEED", s);
        }
        assert!(cmd.status().unwrap().success());
        std::fs::read(path).unwrap()
    };
    let explicit = run("a.json", "random:20,7", None);
    let from_env = run("b.json", "random:20,1", Some("7"));
    let default = run("c.json", "random:20", None);
    assert_eq!(explicit, from_env);
    assert_ne!(explicit, default);
    assert_eq!(run("d.json", "random:20,7", None), explicit);
}
