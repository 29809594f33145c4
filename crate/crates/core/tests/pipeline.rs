use nilpotent_actions::chern::r3_bound;
use nilpotent_actions::pipeline::{self, lattice_check, run, theta_check, Config, Mode, PipelineReport, Verdict};
use nilpotent_actions::{Bounds, Error};

fn config(text: &str) -> Config {
    Config::from_json(text).unwrap()
}

fn run_default(text: &str, mode: Mode) -> PipelineReport {
    run(&config(text), mode, &Bounds::default()).unwrap()
}

/// Invariants every passing report must satisfy.
fn assert_report_invariants(r: &PipelineReport) {
    let used = r.input_summary.rank.used as u128;
    let tuple_total: u128 = r
        .per_factor
        .iter()
        .map(|f| f.admissible_tuple.as_ref().map_or(0, |t| t.len() as u128))
        .sum();
    if r.mode.birational() {
        assert_eq!(r.realized.torus_power, tuple_total);
        assert!(tuple_total <= used * (used / 2));
        assert!(r.realized.projective_factors <= used);
    }
    assert_eq!(r.variety_params.torus_power, used * (used / 2));
    assert_eq!(r.variety_params.projective_dim, used);
    assert_eq!(r.manifold_params.torus_dim, 2 * used * (used / 2));
    assert_eq!(r.manifold_params.t, r3_bound(2 * (used as u32 / 2)));
    if let Some(b) = r.input_summary.rank.bruteforce {
        assert!(b as u128 <= used);
    }
}

#[test]
fn birational_p2() {
    let r = run_default(include_str!("../../../configs/extraspecial_p2.json"), Mode::Birational);
    assert!(r.ok, "{}", r.summary());
    assert_eq!(r.per_factor[0].admissible_tuple, Some(vec![2]));
    assert!(r.per_factor[0].lattice_data.is_none());
    assert_eq!((r.variety_params.torus_power, r.variety_params.projective_dim), (2, 2));
    assert_eq!(r.input_summary.rank.bruteforce, Some(2));
    assert_report_invariants(&r);
}

#[test]
fn diff_p3() {
    let r = run_default(include_str!("../../../configs/extraspecial_p3.json"), Mode::Diff);
    assert!(r.ok, "{}", r.summary());
    let f = &r.per_factor[0];
    let data = f.lattice_data.as_ref().unwrap();
    assert_eq!((data.n, data.c), (1, 3));
    assert!(f.waring_certificate.as_ref().unwrap().checks.all());
    let plan = f.chern_certificate.as_ref().unwrap();
    assert_eq!((plan.m, plan.target_rank), (2, 3));
    assert!(plan.ok());
    assert_eq!(r.manifold_params.t, 3);
    assert!(f.admissible_tuple.is_none());
    assert_report_invariants(&r);
}

#[test]
fn config_mode_is_read() {
    let cfg = config(include_str!("../../../configs/extraspecial_p3_diff.json"));
    assert_eq!(cfg.mode, Some(Mode::Diff));
    let cfg = config(include_str!("../../../configs/extraspecial_p2_birational.json"));
    assert_eq!(cfg.mode, Some(Mode::Birational));
}

#[test]
fn coprimality_is_an_error() {
    let err = run(
        &config(include_str!("../../../configs/coprimality.json")),
        Mode::Both,
        &Bounds::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Coprimality { p: 2, .. }), "{err:?}");
    // Coprime characteristic is fine.
    let r = run_default(r#"{"group": {"extraspecial": {"p": 2}}, "char_exclusion": 3}"#, Mode::Both);
    assert!(r.ok);
}

#[test]
fn other_groups_pass() {
    for text in [
        include_str!("../../../configs/heisenberg_z4_z2.json"),
        include_str!("../../../configs/product.json"),
        include_str!("../../../configs/abelian.json"),
        include_str!("../../../configs/extraspecial_p5.json"),
    ] {
        let r = run_default(text, Mode::Both);
        assert!(r.ok, "{}", r.summary());
        assert_report_invariants(&r);
    }
}

#[test]
fn abelian_input_uses_centre_only_factors() {
    let r = run_default(include_str!("../../../configs/abelian.json"), Mode::Both);
    assert_eq!(r.per_factor.len(), 2);
    assert_eq!(r.realized.torus_power, 0);
    assert_eq!(r.realized.torus_dim, 0);
    for f in &r.per_factor {
        assert_eq!(f.admissible_tuple, Some(vec![]));
        assert_eq!(f.lattice_data.as_ref().unwrap().n, 0);
    }
    assert_eq!(r.input_summary.rank.used, 2);
}

#[test]
fn declared_rank() {
    let r = run_default(include_str!("../../../configs/product.json"), Mode::Both);
    assert_eq!(r.input_summary.rank.declared, Some(3));
    assert_eq!(r.input_summary.rank.used, 3);
    assert!(r.input_summary.rank.bruteforce.unwrap() <= 3);

    // Below the exhaustive rank: reported, and the report fails.
    let r = run_default(r#"{"group": {"extraspecial": {"p": 3}}, "rank_bound": 1}"#, Mode::Both);
    assert!(!r.ok);
    assert!(!r.verification["params.rank"].ok);
}

#[test]
fn reports_are_deterministic() {
    for p in [2, 3, 5] {
        let text = format!(r#"{{"group": {{"extraspecial": {{"p": {p}}}}}}}"#);
        let a = run_default(&text, Mode::Both).to_json();
        let b = run_default(&text, Mode::Both).to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema"], pipeline::SCHEMA_VERSION);
    }
}

#[test]
fn bounds_are_enforced() {
    let err = run(
        &config(include_str!("../../../configs/extraspecial_p5.json")),
        Mode::Both,
        &Bounds::with_order_cap(16),
    )
    .unwrap_err();
    assert!(matches!(err, Error::BoundExceeded { .. }), "{err:?}");
}

#[test]
fn config_errors() {
    for text in [
        r#"{"grup": {}}"#,
        r#"{"group": {"abelian": [2, 4]}}"#,
        r#"{"group": {"extraspecial": {"p": 3, "exponent": "p^2"}}}"#,
        r#"{"group": {"extraspecial": {"p": 2}}, "d": 0}"#,
        r#"{"group": {"heisenberg": {"A": [2], "B": [2], "C": [4], "matrix": [[1]]}}}"#,
    ] {
        let res = Config::from_json(text).and_then(|c| run(&c, Mode::Both, &Bounds::default()));
        assert!(
            matches!(res, Err(Error::InvalidInput(_)) | Err(Error::InvalidGroup(_))),
            "{text}: {res:?}"
        );
    }
    let err = Config::from_json("{}").and_then(|c| run(&c, Mode::Both, &Bounds::default()));
    assert!(err.is_err());
}

#[test]
fn witnesses_are_capped() {
    let v = Verdict::from_failures((0..150).map(|i| i.to_string()).collect());
    assert!(!v.ok);
    assert_eq!(v.witnesses.len(), pipeline::WITNESS_CAP);
    assert_eq!(v.truncated, 50);
    let v = Verdict::from_failures(vec![]);
    assert!(v.ok && v.truncated == 0);
}

#[test]
fn check_commands() {
    let b = Bounds::default();
    let out = theta_check(&config(include_str!("../../../configs/admissible.json")), &b).unwrap();
    assert!(out.ok, "{}", out.summary());
    let out = theta_check(&config(include_str!("../../../configs/heisenberg_z4_z2.json")), &b).unwrap();
    assert!(out.ok, "{}", out.summary());
    let out = lattice_check(&config(include_str!("../../../configs/sublattice.json")), &b).unwrap();
    assert!(out.ok, "{}", out.summary());
    let out = lattice_check(&config(include_str!("../../../configs/extraspecial_p3.json")), &b).unwrap();
    assert!(out.ok, "{}", out.summary());

    // Pairing values outside the value group fail validation.
    let bad = r#"{"sublattice": {"n": 1, "c": 2, "H": [[["1/3", 0]]], "lambda": [[2]], "gamma_denominator": 2}}"#;
    let out = lattice_check(&config(bad), &b).unwrap();
    assert!(!out.ok);
    assert!(!out.verification["sublattice.validation"].ok);
}
