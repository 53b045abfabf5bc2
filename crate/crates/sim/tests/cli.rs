use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_idchain"));
    c.env_remove(idchain_sim::SEED_ENV);
    c
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}.json"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

fn run_to(name: &str, out: &Path, extra: &[&str]) -> Output {
    bin()
        .args(["run", "--scenario"])
        .arg(scenario(name))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn terminal_hash(dir: &Path) -> String {
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    summary["terminal_hash"].as_str().unwrap().to_string()
}

#[test]
fn run_replay_verify_and_inspect() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("hp");
    let run = run_to("happy_path", &out, &[]);
    assert!(run.status.success(), "{}", stderr(&run));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(summary["scenario"], "happy_path");
    for f in [
        "events.jsonl",
        "inputs.jsonl",
        "state.json",
        "ground_truth.json",
        "summary.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }

    let replay = bin()
        .args(["replay", "--events"])
        .arg(out.join("events.jsonl"))
        .output()
        .unwrap();
    assert!(replay.status.success(), "{}", stderr(&replay));
    assert!(stdout(&replay).contains(&terminal_hash(&out)));

    let state = out.join("state.json");
    let asd = out.join("asds/alice-1.json");
    let ok = bin()
        .args(["verify-asd", "--state"])
        .arg(&state)
        .arg("--asd")
        .arg(&asd)
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert_eq!(stdout(&ok).trim(), "true");

    let mut tampered: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&asd).unwrap()).unwrap();
    let x = tampered["statement"]["x"].as_u64().unwrap();
    tampered["statement"]["x"] = (x + 1).into();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, tampered.to_string()).unwrap();
    let rejected = bin()
        .args(["verify-asd", "--state"])
        .arg(&state)
        .arg("--asd")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(4));
    assert!(
        stdout(&rejected).starts_with("false: "),
        "{}",
        stdout(&rejected)
    );

    let mut tampered: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&asd).unwrap()).unwrap();
    let mut proof = tampered["proof"].as_str().unwrap().as_bytes().to_vec();
    let at = proof.len() - 3;
    proof[at] = if proof[at] == b'0' { b'1' } else { b'0' };
    tampered["proof"] = String::from_utf8(proof).unwrap().into();
    std::fs::write(&bad, tampered.to_string()).unwrap();
    let rejected = bin()
        .args(["verify-asd", "--state"])
        .arg(&state)
        .arg("--asd")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(4));
    assert!(
        stdout(&rejected).contains("clause"),
        "{}",
        stdout(&rejected)
    );

    let public = bin()
        .args(["inspect", "--state"])
        .arg(&state)
        .args(["--board", "proposals"])
        .output()
        .unwrap();
    assert!(public.status.success());
    let view: serde_json::Value = serde_json::from_str(&stdout(&public)).unwrap();
    assert_eq!(view["redacted"], true);
    let member = bin()
        .args(["inspect", "--state"])
        .arg(&state)
        .args(["--board", "proposals", "--as", "sc1"])
        .output()
        .unwrap();
    let view: serde_json::Value = serde_json::from_str(&stdout(&member)).unwrap();
    assert!(view.get("redacted").is_none());
}

#[test]
fn truncated_log_fails_replay_with_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tf");
    assert!(run_to("threshold_failure", &out, &[]).status.success());
    let events = std::fs::read_to_string(out.join("events.jsonl")).unwrap();
    let lines: Vec<&str> = events.lines().collect();
    std::fs::write(
        out.join("events.jsonl"),
        lines[..lines.len() / 2].join("\n"),
    )
    .unwrap();
    let replay = bin()
        .args(["replay", "--events"])
        .arg(out.join("events.jsonl"))
        .output()
        .unwrap();
    assert_eq!(replay.status.code(), Some(4));
    assert!(stderr(&replay).contains("error:"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = bin().arg("frobnicate").output().unwrap();
    assert_eq!(unknown.status.code(), Some(1));
    let help = bin().arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));

    let malformed = tmp.path().join("bad.json");
    std::fs::write(
        &malformed,
        r#"{"name":"bad","actors":{},"steps":[{"op":"advance_time","days":1,"bogus":true}]}"#,
    )
    .unwrap();
    let parse = bin()
        .args(["run", "--scenario"])
        .arg(&malformed)
        .output()
        .unwrap();
    assert_eq!(parse.status.code(), Some(2));
    assert!(stderr(&parse).contains("bogus"));

    let failing = tmp.path().join("fail.json");
    std::fs::write(
        &failing,
        r#"{"name":"fail","actors":{"sc":[{"id":"s1"},{"id":"s2"},{"id":"s3"}]},
            "steps":[{"op":"expect","check":{"burned_total":{"eq":1}}}]}"#,
    )
    .unwrap();
    let step = bin()
        .args(["run", "--scenario"])
        .arg(&failing)
        .arg("--out")
        .arg(tmp.path().join("fail"))
        .output()
        .unwrap();
    assert_eq!(step.status.code(), Some(3), "{}", stderr(&step));
    assert!(stderr(&step).contains("step 1"));
}

#[test]
fn seed_flag_and_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert!(run_to("threshold_failure", &a, &["--seed", "42"])
        .status
        .success());
    let env = bin()
        .env(idchain_sim::SEED_ENV, "42")
        .args(["run", "--scenario"])
        .arg(scenario("threshold_failure"))
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert!(env.status.success());
    assert!(run_to("threshold_failure", &c, &[]).status.success());
    assert_eq!(terminal_hash(&a), terminal_hash(&b));
    assert_ne!(terminal_hash(&a), terminal_hash(&c));

    let bad = bin()
        .env(idchain_sim::SEED_ENV, "nope")
        .args(["run", "--scenario"])
        .arg(scenario("threshold_failure"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn seeded_keygen_is_deterministic() {
    let gen = |seed: &str, role: &str| {
        let o = bin()
            .args(["keygen", "--role", role, "--seed", seed])
            .output()
            .unwrap();
        assert!(o.status.success());
        serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap()
    };
    assert_eq!(gen("1", "ca"), gen("1", "ca"));
    assert_ne!(gen("1", "ca"), gen("2", "ca"));
    let ca = gen("3", "ca");
    assert!(ca["issuer"].is_object());
    assert!(gen("3", "user")["issuer"].is_null());
    let unseeded = |_| {
        let o = bin().args(["keygen", "--role", "sc"]).output().unwrap();
        stdout(&o)
    };
    assert_ne!(unseeded(0), unseeded(1));
}
