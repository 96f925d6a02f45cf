use std::path::PathBuf;

use logjet::corpus::{cases, check_case, render_case};

/// Set `LOGJET_BLESS=1` to rewrite the expected reports.
#[test]
fn corpus_matches_golden_files() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/expected");
    let bless = std::env::var("LOGJET_BLESS").is_ok_and(|v| v == "1");
    let mut failures = Vec::new();
    for case in cases() {
        if bless {
            let (human, json) = render_case(&case).unwrap_or_else(|e| panic!("{}: {e}", case.name));
            std::fs::write(dir.join(format!("{}.txt", case.name)), human).unwrap();
            std::fs::write(dir.join(format!("{}.json", case.name)), json).unwrap();
            continue;
        }
        let outcome = check_case(&case);
        if !outcome.passed {
            failures.push(format!("{}: {}", outcome.name, outcome.detail.unwrap_or_default()));
        }
    }
    assert!(failures.is_empty(), "golden mismatches:\n{}", failures.join("\n"));
}
