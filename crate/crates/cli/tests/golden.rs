mod common;

use common::{check_pinned, cli, corpus, pinned_cases};
use histories_kit::dsl::{load, parse_spec, render_spec};

#[test]
fn corpus_has_neon_and_epr() {
    let names: Vec<String> = corpus()
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert!(names.len() >= 6, "{names:?}");
    assert!(names.contains(&"neon.spec".to_string()));
    assert!(names.contains(&"epr.spec".to_string()));
}

#[test]
fn corpus_round_trips_and_loads() {
    for path in corpus() {
        let src = std::fs::read_to_string(&path).unwrap();
        let spec = parse_spec(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_spec(&render_spec(&spec)).unwrap();
        assert_eq!(again, spec, "{}", path.display());
        // rendering is a fixed point after one pass
        assert_eq!(render_spec(&again), render_spec(&spec));
        load(&spec).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn pinned_outputs_match() {
    let mut failures = Vec::new();
    for (name, argv) in pinned_cases() {
        let args: Vec<&str> = argv.iter().map(String::as_str).collect();
        let r = cli(&args);
        let expected_code = if name == "interference.json" { 2 } else { 0 };
        assert_eq!(r.code, expected_code, "{name}: {}", r.err);
        if let Err(e) = check_pinned(&name, &r.out) {
            failures.push(e);
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn human_and_json_agree_on_printed_digits() {
    let json = cli(&["--format", "json", "run", &corpus_file("epr.spec")]).out;
    let human = cli(&["run", &corpus_file("epr.spec")]).out;
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let probs = &v["report"]["queries"][2]["result"]["histories"];
    for entry in probs.as_array().unwrap() {
        let p = entry["probability"].as_f64().unwrap();
        let shown = histories_kit_cli::format::h(p);
        assert!(human.contains(&shown), "{shown} missing from human report");
    }
    let cond = v["report"]["queries"][3]["result"]["probability"]
        .as_f64()
        .unwrap();
    assert!(human.contains(&histories_kit_cli::format::h(cond)));
}

fn corpus_file(name: &str) -> String {
    common::golden_dir()
        .join(name)
        .to_string_lossy()
        .into_owned()
}
