use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> String {
    root().join("configs").join(name).to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilpotent-actions"))
        .args(args)
        .env_remove("NILPOTENT_ACTIONS_BOUND")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn pipeline_reports_are_byte_identical() {
    for p in [2, 3, 5] {
        let cfg = config(&format!("extraspecial_p{p}.json"));
        let a = cli(&["pipeline", "run", "--config", &cfg, "--mode", "both"]);
        let b = cli(&["pipeline", "run", "--config", &cfg, "--mode", "both"]);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
        let v = json(&a);
        assert_eq!(v["ok"], true);
        assert_eq!(v["variety_params"]["torus_power"], 2);
        assert_eq!(v["variety_params"]["projective_dim"], 2);
        assert_eq!(v["manifold_params"]["torus_dim"], 4);
        assert_eq!(v["manifold_params"]["t"], 3);
        // The summary goes to stderr, not into the JSON.
        assert!(String::from_utf8_lossy(&a.stderr).contains("all pass"));
    }
}

#[test]
fn mode_flag_overrides_config() {
    let out = cli(&["pipeline", "run", "--config", &config("extraspecial_p3_diff.json")]);
    assert_eq!(json(&out)["mode"], "diff");
    let out = cli(&["pipeline", "run", "--config", &config("extraspecial_p3_diff.json"), "--mode", "birational"]);
    let v = json(&out);
    assert_eq!(v["mode"], "birational");
    assert_eq!(v["per_factor"][0]["admissible_tuple"], serde_json::json!([3]));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let out = cli(&["pipeline", "run", "--config", &config("coprimality.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());

    let out = cli(&["pipeline", "run", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cli(&["pipeline", "run", "--config", &config("extraspecial_p2.json"), "--mode", "sideways"]);
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_nilpotent-actions"))
        .args(["pipeline", "run", "--config", &config("extraspecial_p5.json")])
        .env("NILPOTENT_ACTIONS_BOUND", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    let out = Command::new(env!("CARGO_BIN_EXE_nilpotent-actions"))
        .args(["pipeline", "run", "--config", &config("extraspecial_p5.json")])
        .env("NILPOTENT_ACTIONS_BOUND", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // A declared rank below the exhaustive one is a verification failure.
    let dir = std::env::temp_dir().join(format!("nilpotent-actions-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("low_rank.json");
    std::fs::write(&path, r#"{"group": {"extraspecial": {"p": 3}}, "rank_bound": 1}"#).unwrap();
    let out = cli(&["pipeline", "run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["ok"], false);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn waring_solve() {
    let out = cli(&["waring", "solve", "--n", "3", "--delta", "7", "--set", "1,-2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries: Vec<i64> = serde_json::from_value(v["entries"].clone()).unwrap();
    for k in 1..=3u32 {
        assert_eq!(entries.iter().map(|&t| t.pow(k)).sum::<i64>().rem_euclid(7), 0);
    }
    assert!(entries.contains(&1) && entries.contains(&-2));
    assert!(v["checks"]["congruences"].as_bool().unwrap());
    assert!(v["trace"].is_object() && v["bound"].is_number());

    let out = cli(&["waring", "solve", "--n", "2", "--delta", "5", "--set", "1", "--minimal", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["minimal"]["entries"].is_array());

    let out = cli(&["waring", "solve", "--n", "2", "--delta", "0", "--set", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chern_certify() {
    let out = cli(&["chern", "certify", "--dim", "4", "--c1", "e12:1,e34:-1", "--d", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["target_rank"], 20);
    assert_eq!(v["total"]["trivial"], true);

    let out = cli(&["chern", "certify", "--dim", "4", "--c1", "e12:1/2", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_subcommands() {
    for (cmd, cfg) in [
        ("theta", "admissible.json"),
        ("theta", "extraspecial_p3.json"),
        ("lattice", "sublattice.json"),
        ("lattice", "extraspecial_p2.json"),
    ] {
        let out = cli(&[cmd, "check", "--config", &config(cfg)]);
        assert_eq!(out.status.code(), Some(0), "{cmd} {cfg}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["ok"], true);
    }
}
