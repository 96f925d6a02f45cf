//! Bundled example descriptions with their expected reports.

use crate::logmodel::Semantics;
use crate::report::{render_report, run_text, Command, Format, RunError, RunOptions};

pub struct Case {
    pub name: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    pub command: Command,
    pub options: RunOptions,
    pub expected_human: &'static str,
    pub expected_json: &'static str,
}

macro_rules! case {
    ($name:literal, $file:literal, $command:expr, $options:expr) => {
        Case {
            name: $name,
            file: $file,
            source: include_str!(concat!("../corpus/", $file)),
            command: $command,
            options: $options,
            expected_human: include_str!(concat!("../corpus/expected/", $name, ".txt")),
            expected_json: include_str!(concat!("../corpus/expected/", $name, ".json")),
        }
    };
}

fn order(m: u32, log: bool) -> RunOptions {
    RunOptions { order: Some(m), log, ..RunOptions::default() }
}

fn semantics(s: Semantics) -> RunOptions {
    RunOptions { semantics: Some(s), ..RunOptions::default() }
}

fn count(q: u64, m: u32, truncate: Option<u32>) -> RunOptions {
    RunOptions { q: Some(q), m: Some(m), truncate, ..RunOptions::default() }
}

pub fn cases() -> Vec<Case> {
    use Command::*;
    let none = RunOptions::default;
    vec![
        case!("cuspidal-cubic-analyze", "cuspidal-cubic.logjet", Analyze, none()),
        case!("cuspidal-cubic-jets", "cuspidal-cubic.logjet", Jets, order(1, false)),
        case!("two-lines-analyze", "two-lines.logjet", Analyze, none()),
        case!("two-lines-verdict", "two-lines.logjet", Verdict, none()),
        case!("plane-standard-verdict", "plane-standard.logjet", Verdict, none()),
        case!("plane-xy-verdict", "plane-xy.logjet", Verdict, none()),
        case!("quadric-cone-associated", "quadric-cone.logjet", Verdict, semantics(Semantics::Associated)),
        case!("quadric-cone-image", "quadric-cone.logjet", Verdict, semantics(Semantics::Image)),
        case!("diagonal-verdict", "diagonal.logjet", Verdict, none()),
        case!("three-lines-verdict", "three-lines.logjet", Verdict, none()),
        case!("a1-two-charts-jets", "a1-two-charts.logjet", Jets, order(1, true)),
        case!("line-log-jets", "line-log.logjet", Jets, order(1, true)),
        case!("line-log-count", "line-log.logjet", Count, count(3, 1, None)),
        case!("positive-char-verdict", "positive-char.logjet", Verdict, none()),
        case!("positive-char-count", "positive-char.logjet", Count, count(2, 3, Some(1))),
    ]
}

/// Rendered human and JSON reports of a case.
pub fn render_case(case: &Case) -> Result<(String, String), RunError> {
    let doc = run_text(case.command, case.source, &case.options)?;
    Ok((render_report(&doc, Format::Human), render_report(&doc, Format::Json)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

fn first_difference(expected: &str, actual: &str) -> String {
    for (i, (e, a)) in expected.lines().zip(actual.lines()).enumerate() {
        if e != a {
            return format!("line {}: expected `{e}`, got `{a}`", i + 1);
        }
    }
    format!("expected {} lines, got {}", expected.lines().count(), actual.lines().count())
}

pub fn check_case(case: &Case) -> CaseOutcome {
    let (passed, detail) = match render_case(case) {
        Err(e) => (false, Some(format!("run failed: {e}"))),
        Ok((human, json)) => {
            if human != case.expected_human {
                (false, Some(format!("human report differs, {}", first_difference(case.expected_human, &human))))
            } else if json != case.expected_json {
                (false, Some(format!("JSON report differs, {}", first_difference(case.expected_json, &json))))
            } else {
                (true, None)
            }
        }
    };
    CaseOutcome { name: case.name, passed, detail }
}

pub fn check_all() -> Vec<CaseOutcome> {
    cases().iter().map(check_case).collect()
}
