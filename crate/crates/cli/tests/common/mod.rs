#![allow(dead_code)]

use std::path::{Path, PathBuf};

use histories_kit_cli::{execute, Options};

/// Version string pinned into golden reports.
pub const STUB_VERSION: &str = "0.0.0-test";

pub struct Run {
    pub code: i32,
    pub out: String,
    pub err: String,
}

pub fn cli(args: &[&str]) -> Run {
    let mut argv = vec!["histories-kit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let opts = Options {
        version: STUB_VERSION.into(),
        tol_env: None,
    };
    let code = execute(&argv, &mut out, &mut err, &opts);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn corpus() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "spec"))
        .collect();
    files.sort();
    files
}

/// Pinned outputs: `(name, argv)`; `<name>` is the file under `golden/`.
pub fn pinned_cases() -> Vec<(String, Vec<String>)> {
    let mut cases = Vec::new();
    for spec in corpus() {
        let stem = spec.file_stem().unwrap().to_string_lossy().into_owned();
        let path = spec.to_string_lossy().into_owned();
        cases.push((
            format!("{stem}.json"),
            vec!["--format".into(), "json".into(), "run".into(), path],
        ));
    }
    let builtin = |name: &str, args: &[&str]| {
        (
            name.to_string(),
            args.iter().map(|s| s.to_string()).collect(),
        )
    };
    cases.push(builtin(
        "cmd_neon.json",
        &[
            "--format", "json", "neon", "--shots", "20000", "--seed", "1",
        ],
    ));
    cases.push(builtin(
        "cmd_neon.txt",
        &["neon", "--shots", "20000", "--seed", "1"],
    ));
    cases.push(builtin("cmd_epr.json", &["--format", "json", "epr"]));
    cases.push(builtin("cmd_epr.txt", &["epr"]));
    cases
}

/// Compares `actual` with the pinned file; `BLESS=1` rewrites it instead.
pub fn check_pinned(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(name);
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected =
        std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or(expected.lines().count().min(actual.lines().count()));
    Err(format!(
        "{name}: output differs from pinned file at line {}",
        line + 1
    ))
}
