use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hpa_sim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpa-sim"))
        .args(args)
        .current_dir(dir)
        .env_remove("HPA_SIM_SEED")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn simulate_writes_a_full_session() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpa_sim(
        &[
            "simulate",
            "--profile",
            "anxious",
            "--human",
            "control",
            "--paradigm",
            "sf",
            "--seed",
            "1",
            "--out",
            "t.jsonl",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let l = lines(&dir.path().join("t.jsonl"));
    assert_eq!(l.len(), 1201);
    let header: Value = serde_json::from_str(&l[0]).unwrap();
    assert_eq!(header["schema_version"], 1);
    assert_eq!(header["kind"], "trace");
    assert_eq!(header["seed"], 1);
    assert_eq!(header["config"]["robot_profile"]["kind"], "anxious");
}

#[test]
fn analyze_reports_phase_means_and_interactivity() {
    let dir = tempfile::tempdir().unwrap();
    for (profile, file) in [("anxious", "a.jsonl"), ("avoidant", "b.jsonl")] {
        let out = hpa_sim(
            &[
                "simulate",
                "--profile",
                profile,
                "--human",
                "anxious",
                "--paradigm",
                "sft",
                "--seed",
                "2",
                "--out",
                file,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let out = hpa_sim(&["analyze", "--trace", "a.jsonl", "b.jsonl"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let reports: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        let means = r["metrics"]["phase_means"].as_object().unwrap();
        let keys: Vec<&str> = means.keys().map(String::as_str).collect();
        assert_eq!(keys, ["free_play", "free_play2", "paradigm", "reunion"]);
        assert!(r["metrics"]["interactive"].is_boolean());
        assert_eq!(r["records"], 1200);
    }
    assert_ne!(reports[0]["metrics"]["match"], reports[1]["metrics"]["match"]);
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpa_sim(&["simulate", "--profile", "bold"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown profile"), "{}", stderr(&out));

    let out = hpa_sim(
        &[
            "simulate",
            "--profile",
            "anxious",
            "--human",
            "control",
            "--paradigm",
            "sf",
            "--out",
            "t.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "missing seed");

    let out = hpa_sim(
        &[
            "gen-stimuli",
            "--human",
            "shy",
            "--paradigm",
            "sf",
            "--seed",
            "1",
            "--out",
            "s.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hpa_sim(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpa_sim(&["analyze", "--trace", "missing.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = hpa_sim(&["compare", "--stimuli-set", "."], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn env_seed_is_a_default_that_the_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_hpa-sim"));
        cmd.args(["gen-stimuli", "--human", "control", "--paradigm", "sf"])
            .args(args)
            .current_dir(dir.path());
        match env {
            Some(v) => cmd.env("HPA_SIM_SEED", v),
            None => cmd.env_remove("HPA_SIM_SEED"),
        };
        assert!(cmd.status().unwrap().success());
    };
    gen(&["--seed", "5", "--out", "flag5.jsonl"], None);
    gen(&["--out", "env5.jsonl"], Some("5"));
    gen(&["--seed", "5", "--out", "both.jsonl"], Some("9"));
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("flag5.jsonl"), read("env5.jsonl"));
    assert_eq!(read("flag5.jsonl"), read("both.jsonl"));
}

#[test]
fn stimulus_file_drives_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let ok = |args: &[&str]| {
        let out = hpa_sim(args, dir.path());
        assert!(out.status.success(), "{}", stderr(&out));
    };
    ok(&[
        "gen-stimuli",
        "--human",
        "avoidant",
        "--paradigm",
        "sft",
        "--seed",
        "4",
        "--out",
        "s.jsonl",
    ]);
    ok(&[
        "simulate",
        "--profile",
        "avoidant",
        "--stimuli",
        "s.jsonl",
        "--out",
        "from_file.jsonl",
    ]);
    ok(&[
        "simulate",
        "--profile",
        "avoidant",
        "--human",
        "avoidant",
        "--paradigm",
        "sft",
        "--seed",
        "4",
        "--out",
        "direct.jsonl",
    ]);
    // identical records; only the header's stimulus source differs
    assert_eq!(
        lines(&dir.path().join("from_file.jsonl"))[1..],
        lines(&dir.path().join("direct.jsonl"))[1..]
    );
}

#[test]
fn schema_violation_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpa_sim(
        &[
            "gen-stimuli",
            "--human",
            "control",
            "--paradigm",
            "sf",
            "--seed",
            "1",
            "--out",
            "s.jsonl",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let path = dir.path().join("s.jsonl");
    let mut l = lines(&path);
    let mut frame: Value = serde_json::from_str(&l[11]).unwrap();
    frame["touch_taxels"] = 0.into();
    frame["touch_pressure"] = 12.5.into();
    l[11] = frame.to_string();
    std::fs::write(&path, l.join("\n") + "\n").unwrap();

    let out = hpa_sim(
        &[
            "simulate",
            "--profile",
            "anxious",
            "--stimuli",
            "s.jsonl",
            "--out",
            "t.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("line 12") && msg.contains("touch_pressure"), "{msg}");
}

#[test]
fn replay_to_stdout_matches_the_recording() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpa_sim(
        &[
            "simulate",
            "--profile",
            "avoidant",
            "--human",
            "control",
            "--paradigm",
            "sft",
            "--seed",
            "3",
            "--out",
            "t.jsonl",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = hpa_sim(&["replay", "--trace", "t.jsonl", "--profile", "avoidant"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let replayed: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    assert_eq!(replayed[1..], lines(&dir.path().join("t.jsonl"))[1..]);

    // the other profile on the same stimuli: same frames, different cortisol
    let out = hpa_sim(&["replay", "--trace", "t.jsonl", "--profile", "anxious"], dir.path());
    let other: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let orig: Vec<Value> = lines(&dir.path().join("t.jsonl"))
        .iter()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(other.iter().zip(&orig).all(|(a, b)| a["frame"] == b["frame"]));
    assert!(other.iter().zip(&orig).any(|(a, b)| a["cortisol"] != b["cortisol"]));
}
