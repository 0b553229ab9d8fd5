use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vvhecke"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vvhecke-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn gram(name: &str, text: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn discform_tables() {
    let a1 = gram("a1.txt", "2\n");
    let o = run(&["discform", "--gram", s(&a1)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("divisors: [2]"));
    assert!(out.contains("[1]\t1/4"));
    let o = run(&["discform", "--gram", s(&a1), "--scale", "4"]);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with('[')).count(), 8);
    let h = gram("h.json", "[[0,1],[1,0]]");
    assert!(stdout(&run(&["discform", "--gram", s(&h)])).contains("order: 1"));
    for bad in ["3\n", "2 1\n1 2 3\n", "[[2,2],[2,2]]"] {
        let g = gram("bad.txt", bad);
        assert_eq!(
            run(&["discform", "--gram", s(&g)]).status.code(),
            Some(2),
            "{bad:?}"
        );
    }
}

#[test]
fn weil_words() {
    let a1 = gram("a1w.json", "[[2]]");
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["weil", "--gram", s(&a1), "--word", "T"]).stdout).unwrap();
    assert_eq!(v["rho"][1][1]["order"], 4);
    assert_eq!(v["rho"][0][1]["terms"].as_array().unwrap().len(), 0);
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["weil", "--gram", s(&a1)]).stdout).unwrap();
    assert_eq!(v["rho"][0][0]["terms"][0][1], "1");
    assert_eq!(
        run(&["weil", "--gram", s(&a1), "--word", "SX"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn theta_apply_and_round_trips() {
    let a1 = gram("a1t.json", "[[2]]");
    let th = tmp("theta.json");
    assert!(
        run(&["theta", "--gram", s(&a1), "--trunc", "4", "--out", s(&th)])
            .status
            .success()
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&th).unwrap()).unwrap();
    let zero: Vec<_> = v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["coset"][0] == 0)
        .map(|r| {
            (
                r["exp"].as_str().unwrap().to_string(),
                r["value"]["terms"][0][1].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(
        zero,
        [("0", "1"), ("1", "2"), ("4", "2")].map(|(a, b)| (a.to_string(), b.to_string()))
    );

    // T with r = 1 leaves the coefficients untouched
    let t1 = tmp("t1.json");
    assert!(run(&[
        "apply",
        "--in",
        s(&th),
        "--op",
        "T",
        "--r",
        "1",
        "--out",
        s(&t1)
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&th).unwrap());

    // P∘U is the identity
    let (u, pu) = (tmp("u.json"), tmp("pu.json"));
    assert!(run(&[
        "apply",
        "--in",
        s(&th),
        "--op",
        "U",
        "--n",
        "2",
        "--out",
        s(&u)
    ])
    .status
    .success());
    assert!(run(&[
        "apply",
        "--in",
        s(&u),
        "--op",
        "P",
        "--n",
        "2",
        "--out",
        s(&pu)
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&pu).unwrap(), std::fs::read(&th).unwrap());

    // H = P∘T
    let (h, t4, pt) = (tmp("h.json"), tmp("t4.json"), tmp("pt.json"));
    assert!(run(&[
        "apply",
        "--in",
        s(&th),
        "--op",
        "H",
        "--n",
        "2",
        "--out",
        s(&h)
    ])
    .status
    .success());
    assert!(run(&[
        "apply",
        "--in",
        s(&th),
        "--op",
        "T",
        "--r",
        "4",
        "--out",
        s(&t4)
    ])
    .status
    .success());
    assert!(run(&[
        "apply",
        "--in",
        s(&t4),
        "--op",
        "P",
        "--n",
        "2",
        "--out",
        s(&pt)
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&h).unwrap(), std::fs::read(&pt).unwrap());

    // determinism: same flags, same bytes
    let again = tmp("h2.json");
    assert!(run(&[
        "apply",
        "--in",
        s(&th),
        "--op",
        "H",
        "--n",
        "2",
        "--out",
        s(&again)
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&h).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn contract_violations_exit_2() {
    let a1 = gram("a1c.json", "[[2]]");
    let th = tmp("thc.json");
    assert!(
        run(&["theta", "--gram", s(&a1), "--trunc", "2", "--out", s(&th)])
            .status
            .success()
    );
    for args in [
        vec!["apply", "--in", s(&th), "--op", "P", "--n", "2"],
        vec![
            "apply",
            "--in",
            s(&th),
            "--op",
            "BS",
            "--p",
            "2",
            "--l",
            "1",
        ],
        vec!["apply", "--in", s(&th), "--op", "T", "--r", "2", "--n", "2"],
        vec!["apply", "--in", s(&th), "--op", "T"],
        vec![
            "apply",
            "--in",
            "/nonexistent.json",
            "--op",
            "T",
            "--r",
            "2",
        ],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let ind = gram("ind.json", "[[2,0],[0,-2]]");
    assert_eq!(
        run(&["theta", "--gram", s(&ind), "--trunc", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn check_suites_and_exit_codes() {
    let o = run(&["check", "--suite", "bs"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    let o = run(&["check", "--suite", "weil", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "pass");
    }
    let o = run(&["check", "--suite", "hecke", "--tamper", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let located = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .any(|v| v["status"] == "fail" && v["first_mismatch"]["exponent"].is_string());
    assert!(located);
}
