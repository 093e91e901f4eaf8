use std::path::Path;
use std::process::{Command, Output};

fn radsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radsim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("failed to launch radsim")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn layout_matches_shipped_file() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&radsim(&["layout", "--out", "frame.json"], dir.path()));
    let written = std::fs::read_to_string(dir.path().join("frame.json")).unwrap();
    let shipped =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/layouts/frame-94.json")).unwrap();
    assert_eq!(written, shipped);
}

#[test]
fn stage_commands_chain() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_ok(&radsim(&["scaffold", "--out", "."], p));
    std::fs::write(
        p.join("array.json"),
        r#"{"tx": [[-0.02, 0, 0], [0.02, 0, 0]], "rx": [[0, -0.02, 0], [0, 0.02, 0]]}"#,
    )
    .unwrap();
    std::fs::write(
        p.join("grid.json"),
        r#"{"origin": [-0.04, -0.04, 0.27], "spacing": [0.005, 0.005, 0.005], "counts": [16, 16, 12]}"#,
    )
    .unwrap();
    let traced = radsim(
        &[
            "trace",
            "--mesh",
            "A.obj",
            "--array",
            "array.json",
            "--view",
            "5,-5,0",
            "--alpha",
            "0.4",
            "--rays",
            "5000",
            "--radius",
            "0.004",
            "--out",
            "a.rsps",
        ],
        p,
    );
    assert_ok(&traced);
    assert!(String::from_utf8_lossy(&traced.stdout).contains("paths from 10000 rays"));
    assert_ok(&radsim(&["synth", "--paths", "a.rsps", "--out", "a.rsif"], p));
    assert_ok(&radsim(
        &[
            "image",
            "--cube",
            "a.rsif",
            "--array",
            "array.json",
            "--grid",
            "grid.json",
            "--out",
            "a.rimg",
            "--preview-png",
        ],
        p,
    ));
    for f in ["a.rimg", "a.intensity.png", "a.depth.png"] {
        assert!(p.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn generate_and_augment_small_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_ok(&radsim(&["scaffold", "--out", "."], p));
    // shrink the scaffolded config further for test time
    let cfg = std::fs::read_to_string(p.join("config.json")).unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&cfg).unwrap();
    cfg["classes"] = serde_json::Value::Array(cfg["classes"].as_array().unwrap()[..2].to_vec());
    cfg["samples_per_class"] = 1.into();
    cfg["trace"]["rays_per_tx"] = 2000.into();
    cfg["grid"]["counts"] = serde_json::json!([16, 16, 8]);
    cfg["array"] = serde_json::json!({
        "kind": "grids",
        "tx": {"rows": 3, "cols": 3, "pitch": 0.03, "origin": [-0.03, -0.03, 0.0]},
        "rx": {"rows": 3, "cols": 3, "pitch": 0.03, "origin": [-0.015, -0.015, 0.0]}
    });
    std::fs::write(p.join("small.json"), cfg.to_string()).unwrap();

    assert_ok(&radsim(&["generate", "--config", "small.json", "--out", "raw"], p));
    let manifest = std::fs::read_to_string(p.join("raw/manifest.jsonl")).unwrap();
    assert_eq!(manifest.lines().count(), 2);
    assert_ok(&radsim(&["augment", "--in", "raw", "--out", "aug", "--seed", "3"], p));
    let augmented = std::fs::read_to_string(p.join("aug/manifest.jsonl")).unwrap();
    assert_eq!(augmented.lines().count(), 2);
    assert!(augmented.contains("augment_seed"));
}

#[test]
fn bad_input_exits_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.obj"), "v 0 0 0\nf 1 2 3\n").unwrap();
    let out = radsim(&["trace", "--mesh", "broken.obj", "--out", "x.rsps"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = radsim(&["generate", "--config", "missing.json"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}
