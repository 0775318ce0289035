use std::path::Path;
use std::process::{Command, Output};

fn kdnls(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdnls"))
        .args(args)
        .current_dir(dir)
        .env_remove("KDNLS_PRECISION")
        .output()
        .expect("binary runs")
}

#[test]
fn generate_rogue1_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = kdnls(
        &[
            "generate",
            "--solution",
            "rogue1",
            "--grid",
            "-4:4:401,-4:4:401",
            "--format",
            "csv",
            "-o",
            "r1.csv",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("r1.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,intensity,re,im"));
    assert_eq!(lines.clone().count(), 401 * 401);
    // Row-major with x fastest; node (200, 200) is the origin.
    let centre: Vec<&str> = text
        .lines()
        .nth(1 + 200 * 401 + 200)
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(centre[0], "0.0000000000000000e0");
    assert!((centre[2].parse::<f64>().unwrap() - 9.0).abs() < 1e-12);
    assert!(!text.contains('\r'));

    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("r1.csv.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["solution"], "rogue1");
    assert_eq!(meta["variant"], "sign=+1,v12=g_independent");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert!(meta["precision"].is_string());
}

#[test]
fn artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = kdnls(
            &[
                "generate",
                "--figure",
                "10",
                "--grid=-16:16:161,-16:16:161",
                "--format",
                "json",
                "--components",
                "-o",
                name,
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["data"].as_array().unwrap().len(), 161);
    assert_eq!(v["re"][0].as_array().unwrap().len(), 161);
    assert_eq!(v["params"]["S2"].as_f64(), Some(1000.0));
    assert_eq!(v["grid"]["nx"].as_u64(), Some(161));
}

#[test]
fn pgm_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = kdnls(
        &[
            "generate",
            "--solution",
            "breather",
            "--grid=-10:10:101,-5:5:51",
            "--format",
            "pgm",
            "-o",
            "b.pgm",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let bytes = std::fs::read(dir.path().join("b.pgm")).unwrap();
    let header = b"P5\n101 51\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 101 * 51);
}

#[test]
fn analyze_split_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = kdnls(
        &[
            "analyze",
            "--solution",
            "rogue2",
            "--param",
            "S1=500",
            "--grid=-25:8:331,-14:14:281",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["peak_count"], 3);
    assert_eq!(v["peak_set"]["classification"], "triangular");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("job.json"),
        r#"{"solution":"engine-degenerate","params":{"n":2,"eps":0.001},"grid":"-1:1:5,-1:1:5","format":"json","output":"d.json"}"#,
    )
    .unwrap();
    let out = kdnls(
        &["generate", "--config", "job.json", "--param", "S1=3"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("d.json.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["params"]["S1"].as_f64(), Some(3.0));
    assert_eq!(meta["params"]["eps"].as_f64(), Some(0.001));
    assert_eq!(meta["precision"], "extended");

    let out = Command::new(env!("CARGO_BIN_EXE_kdnls"))
        .args(["generate", "--config", "job.json", "-o", "e.json"])
        .current_dir(dir.path())
        .env("KDNLS_PRECISION", "double")
        .output()
        .unwrap();
    assert!(out.status.success());
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("e.json.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["precision"], "double");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| kdnls(args, dir.path()).status.code();
    assert_eq!(
        code(&[
            "generate",
            "--solution",
            "rogue1",
            "--param",
            "S1=1",
            "-o",
            "x.csv"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "generate",
            "--solution",
            "rogue1",
            "--grid",
            "0:1:1,0:1:5",
            "-o",
            "x.csv"
        ]),
        Some(2)
    );
    assert_eq!(code(&["generate", "--figure", "12"]), Some(2));
    assert_eq!(code(&["generate", "--config", "missing.json"]), Some(3));
    assert_eq!(
        code(&[
            "generate",
            "--solution",
            "rogue1",
            "--grid=-1:1:5,-1:1:5",
            "-o",
            "no/such/dir/x.csv"
        ]),
        Some(3)
    );
    assert_eq!(code(&["frobnicate"]), Some(2));
    let bad_env = Command::new(env!("CARGO_BIN_EXE_kdnls"))
        .args([
            "generate",
            "--solution",
            "rogue1",
            "--grid=-1:1:5,-1:1:5",
            "-o",
            "y.csv",
        ])
        .current_dir(dir.path())
        .env("KDNLS_PRECISION", "quad")
        .status()
        .unwrap();
    assert_eq!(bad_env.code(), Some(2));
}

#[test]
fn quick_verification_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = kdnls(
        &["verify", "--suite", "quick", "-o", "report.json"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.contains(" PASS: ")).count(), 4);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 4);
}
