use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cornersim::dsl::default_catalog_dir;
use cornersim::model::WeatherPresetId;

fn cornersim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cornersim"))
        .args(args)
        .current_dir(cwd)
        .env_remove("CORNERSIM_CATALOG")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn listing_and_bad_arguments() {
    let t = tmp();
    let o = cornersim(&["list", "--category", "evidence"], t.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 9);
    assert!(stdout(&o).lines().all(|l| l.split_whitespace().nth(1) == Some("evidence")));
    assert_eq!(code(&cornersim(&["list", "--category", "bogus"], t.path())), 2);
    assert_eq!(code(&cornersim(&["run", "no-such-scenario"], t.path())), 2);
    assert_eq!(code(&cornersim(&["run", "luggage-fall", "--policy", "nope"], t.path())), 2);
    assert_eq!(code(&cornersim(&[], t.path())), 2);
}

#[test]
fn run_exit_codes_follow_the_outcome() {
    let t = tmp();
    let ok = cornersim(&["run", "luggage-fall", "--out", "runs"], t.path());
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).contains("outcome success"));
    // the seed directory follows the scenario default seed
    assert!(t.path().join("runs/luggage-fall/42/manifest.json").is_file());
    let bad = cornersim(&["run", "luggage-fall", "--policy", "builtin:constant_speed"], t.path());
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("collision_failure"));
    let agent = format!("exec:{} bad-version", env!("CARGO_BIN_EXE_cornersim-fixture-agent"));
    assert_eq!(code(&cornersim(&["run", "luggage-fall", "--policy", &agent], t.path())), 3);
    let dying = format!("exec:{} die-after:3", env!("CARGO_BIN_EXE_cornersim-fixture-agent"));
    let o = cornersim(&["run", "luggage-fall", "--policy", &dying, "--tick-timeout-ms", "2000"], t.path());
    assert_eq!(code(&o), 3);
}

fn recorded_run(t: &Path) -> std::path::PathBuf {
    let o = cornersim(&["run", "luggage-fall", "--seed", "7", "--out", "runs", "--record", "all"], t);
    assert_eq!(code(&o), 0);
    t.join("runs/luggage-fall/7")
}

#[test]
fn replay_integrity_and_version() {
    let t = tmp();
    let dir = recorded_run(t.path());
    let o = cornersim(&["replay", dir.to_str().unwrap()], t.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("replay ok"));

    let trace = dir.join("trace.jsonl");
    let original = fs::read(&trace).unwrap();
    let mut flipped = original.clone();
    let i = flipped.len() / 3;
    flipped[i] ^= 0x20;
    fs::write(&trace, &flipped).unwrap();
    assert_eq!(code(&cornersim(&["replay", dir.to_str().unwrap()], t.path())), 4);
    assert_eq!(code(&cornersim(&["export", dir.to_str().unwrap(), "--format", "flat-csv"], t.path())), 4);
    fs::write(&trace, &original).unwrap();

    let manifest = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest).unwrap();
    fs::write(&manifest, text.replacen("\"engine_version\": \"1.0.0\"", "\"engine_version\": \"2.0.0\"", 1)).unwrap();
    assert_eq!(code(&cornersim(&["replay", manifest.to_str().unwrap()], t.path())), 5);
}

#[test]
fn export_writes_requested_formats() {
    let t = tmp();
    let dir = recorded_run(t.path());
    let dest = t.path().join("exported");
    for f in ["full-jsonl", "flat-csv", "raster-pack"] {
        let o = cornersim(&["export", dir.to_str().unwrap(), "--format", f, "--out", dest.to_str().unwrap()], t.path());
        assert_eq!(code(&o), 0, "{f}");
    }
    assert_eq!(fs::read(dest.join("trace.jsonl")).unwrap(), fs::read(dir.join("trace.jsonl")).unwrap());
    assert_eq!(fs::read(dest.join("trace.csv")).unwrap(), fs::read(dir.join("trace.csv")).unwrap());
    assert_eq!(fs::read(dest.join("rasters.bin")).unwrap(), fs::read(dir.join("rasters.bin")).unwrap());
}

#[test]
fn validate_reports_bad_files() {
    let t = tmp();
    let good = default_catalog_dir().join("evidence/luggage-fall.3cs");
    let text = fs::read_to_string(&good).unwrap();
    let bad = t.path().join("bad.3cs");
    fs::write(&bad, text.replace("tn = 30.0", "tn = 0.0")).unwrap();
    assert_eq!(code(&cornersim(&["validate", good.to_str().unwrap()], t.path())), 0);
    let o = cornersim(&["validate", good.to_str().unwrap(), bad.to_str().unwrap()], t.path());
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("invalid") && stdout(&o).contains("bad.3cs"));
    // a file path works wherever a catalog id does
    let o = cornersim(&["show", good.to_str().unwrap()], t.path());
    assert_eq!(stdout(&o), text);
}

#[test]
fn batch_matrix() {
    let t = tmp();
    let empty = t.path().join("empty.toml");
    fs::write(&empty, "scenarios = [\"luggage-fall\"]\nweathers = []\n").unwrap();
    assert_eq!(code(&cornersim(&["batch", empty.to_str().unwrap()], t.path())), 2);

    let m = t.path().join("weathers.toml");
    fs::write(
        &m,
        format!(
            "scenarios = [\"luggage-fall\"]\nweathers = [{}]\noutput = \"out\"\n",
            WeatherPresetId::ALL.map(|w| format!("\"{}\"", w.as_str())).join(", ")
        ),
    )
    .unwrap();
    let o = cornersim(&["batch", m.to_str().unwrap(), "--jobs", "2"], t.path());
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("matrix: 9 cells"), "{text}");
    let summary = fs::read_to_string(t.path().join("out/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 10);
    let manifests = walk(&t.path().join("out")).into_iter().filter(|p| p.ends_with("manifest.json")).count();
    assert_eq!(manifests, 9);
    assert!(code(&o) == 0 || code(&o) == 1);
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn catalog_directory_override() {
    let t = tmp();
    let cat = t.path().join("mini");
    fs::create_dir_all(cat.join("evidence")).unwrap();
    fs::copy(default_catalog_dir().join("evidence/luggage-fall.3cs"), cat.join("evidence/luggage-fall.3cs")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cornersim"))
        .arg("list")
        .env("CORNERSIM_CATALOG", &cat)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2, "a partial catalog misses required scenarios");
    let o = cornersim(&["list", "--catalog", default_catalog_dir().to_str().unwrap()], t.path());
    assert_eq!(stdout(&o).lines().count(), 32);
}
