//! Running commands on a description and rendering the resulting report.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{Body, BuildError, ParseError, SchemeDescription};
use crate::jets::PresentationDocument;
use crate::logmodel::{
    abstract_verdict, dimensional_regularity, LogError, RegularityVerdict, Semantics, StratumTable, Verdict,
};
use crate::monoid::{AffineMonoid, MonoidError};
use crate::oracle::{
    closed_form_count, enumerate_log_jets, enumerate_scheme_points, truncation_image_count, OracleCount, OracleError,
    TruncationImage,
};

pub const SCHEMA: &str = "logjet-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Stratify,
    Verdict,
    Jets,
    Count,
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "analyze" => Ok(Command::Analyze),
            "stratify" => Ok(Command::Stratify),
            "verdict" => Ok(Command::Verdict),
            "jets" => Ok(Command::Jets),
            "count" => Ok(Command::Count),
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected human or json)")),
        }
    }
}

/// Command-line overrides of the description's options.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub semantics: Option<Semantics>,
    pub characteristic: Option<u64>,
    pub order: Option<u32>,
    pub log: bool,
    pub q: Option<u64>,
    pub m: Option<u32>,
    pub truncate: Option<u32>,
    pub budget: Option<u64>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 1,
            RunError::Parse(_) => 2,
            RunError::Validation(_) => 3,
            RunError::Budget(_) => 4,
        }
    }
}

fn monoid_error(e: MonoidError) -> RunError {
    match e {
        MonoidError::Cap(_) | MonoidError::Budget(_) => RunError::Budget(e.to_string()),
        other => RunError::Validation(other.to_string()),
    }
}

impl From<BuildError> for RunError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Monoid(m) | BuildError::Log(LogError::Monoid(m)) => monoid_error(m),
            BuildError::Kind(k) => RunError::Usage(k),
            other => RunError::Validation(other.to_string()),
        }
    }
}

impl From<LogError> for RunError {
    fn from(e: LogError) -> Self {
        BuildError::Log(e).into()
    }
}

impl From<OracleError> for RunError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget { .. } => RunError::Budget(e.to_string()),
            other => RunError::Validation(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub name: String,
    pub coordinates: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSummary {
    pub label: String,
    pub rank: usize,
    pub group: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PPowerFlag {
    pub p: u64,
    pub saturated: bool,
}

/// Invariants of the ambient monoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidSummary {
    pub group: String,
    pub generators: Vec<Element>,
    pub presentation: Vec<String>,
    pub saturated: bool,
    pub saturation: Vec<Element>,
    pub adjoined: Vec<String>,
    pub sharp: bool,
    pub units: Vec<String>,
    pub faces: Vec<FaceSummary>,
    pub p_power_saturated: Vec<PPowerFlag>,
}

fn elements(p: &AffineMonoid) -> Vec<Element> {
    p.names().iter().zip(p.images()).map(|(n, v)| Element { name: n.clone(), coordinates: v.clone() }).collect()
}

pub fn monoid_summary(p: &AffineMonoid, cap: i64, characteristic: u64) -> Result<MonoidSummary, RunError> {
    let sat = p.saturate(cap).map_err(monoid_error)?;
    let reduced = sat.monoid.reduced().map_err(monoid_error)?;
    let mut primes = vec![2, 3, 5];
    if characteristic != 0 && !primes.contains(&characteristic) {
        primes.push(characteristic);
    }
    let p_power_saturated = primes
        .into_iter()
        .map(|q| {
            p.is_p_power_saturated(q as i64, crate::monoid::DEFAULT_MEMBERSHIP_BUDGET)
                .map(|saturated| PPowerFlag { p: q, saturated })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(monoid_error)?;
    Ok(MonoidSummary {
        group: p.gp().to_string(),
        generators: elements(p),
        presentation: p.presentation().iter().map(|r| r.to_string()).collect(),
        saturated: sat.was_saturated,
        adjoined: sat.adjoined.iter().filter(|n| reduced.names().contains(n)).cloned().collect(),
        saturation: elements(&reduced),
        sharp: p.is_sharp(),
        units: p.units().iter().map(|&i| p.names()[i].clone()).collect(),
        faces: p
            .faces()
            .iter()
            .map(|f| FaceSummary { label: p.label(&f.generators), rank: f.gp_rank, group: f.gp.to_string() })
            .collect(),
        p_power_saturated,
    })
}

/// Everything a command produces, in a stable serializable shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub command: Command,
    pub name: Option<String>,
    pub input: String,
    pub analysis: Option<MonoidSummary>,
    pub semantics: Option<Semantics>,
    pub table: Option<StratumTable>,
    pub regularity: Option<RegularityVerdict>,
    pub verdict: Option<Verdict>,
    pub presentation: Option<PresentationDocument>,
    pub counts: Vec<OracleCount>,
    pub truncation: Option<TruncationImage>,
    pub warnings: Vec<String>,
}

fn apply_overrides(desc: &mut SchemeDescription, opts: &RunOptions) {
    if let Some(s) = opts.semantics {
        desc.options.semantics = s;
    }
    if let Some(c) = opts.characteristic {
        desc.options.characteristic = c;
    }
    if let Some(b) = opts.budget {
        desc.options.budget = b;
    }
}

pub fn run_text(command: Command, text: &str, opts: &RunOptions) -> Result<ReportDocument, RunError> {
    let desc = SchemeDescription::parse(text)?;
    run(command, desc, opts)
}

pub fn run(command: Command, mut desc: SchemeDescription, opts: &RunOptions) -> Result<ReportDocument, RunError> {
    apply_overrides(&mut desc, opts);
    let mut doc = ReportDocument {
        schema: SCHEMA.into(),
        command,
        name: desc.name.clone(),
        input: desc.to_string(),
        analysis: None,
        semantics: None,
        table: None,
        regularity: None,
        verdict: None,
        presentation: None,
        counts: Vec::new(),
        truncation: None,
        warnings: Vec::new(),
    };
    let is_monoid = matches!(desc.body, Body::Monoid { .. });
    if is_monoid {
        doc.semantics = Some(desc.options.semantics);
    }
    match command {
        Command::Analyze => {
            let p = desc.ambient()?;
            doc.analysis = Some(monoid_summary(&p, desc.options.cap, desc.options.characteristic)?);
        }
        Command::Stratify => {
            let table = desc.table()?;
            doc.regularity = Some(dimensional_regularity(&table)?);
            doc.table = Some(table);
        }
        Command::Verdict => {
            let table = desc.table()?;
            let verdict = if is_monoid {
                desc.scheme()?.verdict()?
            } else {
                abstract_verdict(&table, desc.options.characteristic)?
            };
            doc.warnings = verdict.warnings.clone();
            doc.regularity = Some(verdict.regularity.clone());
            doc.verdict = Some(verdict);
            doc.table = Some(table);
        }
        Command::Jets => {
            let order = opts.order.unwrap_or(1);
            let input = desc.jet_input()?;
            if opts.log && input.chart.is_empty() {
                doc.warnings
                    .push("no chart element has a nonzero image; the log presentation has no log relations".into());
            }
            let pres = input
                .presentation(order, opts.log)
                .and_then(|p| p.with_characteristic(desc.options.characteristic))
                .map_err(|e| RunError::Validation(e.to_string()))?;
            doc.presentation = Some(pres.document());
        }
        Command::Count => {
            let (Some(q), Some(m)) = (opts.q, opts.m) else {
                return Err(RunError::Usage("count needs --q and --m".into()));
            };
            let scheme = desc.scheme()?;
            let budget = desc.options.budget;
            let enumerated = if scheme.is_standard() {
                enumerate_log_jets(scheme.ambient(), q, m, budget)?
            } else {
                let (points, used) = enumerate_scheme_points(&scheme, q, m, budget)?;
                OracleCount { q, m, count: points.len() as u64, method: "enumeration".into(), budget_used: used }
            };
            doc.counts.push(enumerated);
            match closed_form_count(&scheme, q, m, budget) {
                Ok(c) => doc.counts.push(c),
                Err(e @ OracleError::Hypothesis { .. }) => doc.warnings.push(format!("closed form refused: {e}")),
                Err(e) => return Err(e.into()),
            }
            if let Some(n) = opts.truncate {
                doc.truncation = Some(truncation_image_count(&scheme, q, m, n, budget)?);
            }
        }
    }
    Ok(doc)
}

fn table_text(out: &mut String, table: &StratumTable) {
    let header = ["label", "rank", "dim", "codim", "components", "closure"];
    let rows: Vec<[String; 6]> = table
        .components
        .iter()
        .map(|c| {
            let closure = if c.closure_parents.is_empty() { "-".to_string() } else { c.closure_parents.join(" ") };
            [
                c.label.clone(),
                c.rank.to_string(),
                c.dim.to_string(),
                table.codim(c).to_string(),
                c.component_count.to_string(),
                closure,
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

fn regularity_text(out: &mut String, reg: &RegularityVerdict) {
    let _ = writeln!(
        out,
        "dimensionally regular: {} (r = {})",
        if reg.dimensionally_regular { "yes" } else { "no" },
        reg.r
    );
    for f in &reg.failures {
        let _ = writeln!(
            out,
            "  failure: {} has rank {} and codimension {}, expected {}",
            f.label, f.rank, f.actual_codim, f.expected_codim
        );
    }
}

fn coords(v: &[i64]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn human(doc: &ReportDocument) -> String {
    let mut out = String::new();
    if let Some(n) = &doc.name {
        let _ = writeln!(out, "# {n}");
    }
    if let Some(a) = &doc.analysis {
        let _ = writeln!(out, "group completion: {}", a.group);
        for e in &a.generators {
            let _ = writeln!(out, "  {} -> {}", e.name, coords(&e.coordinates));
        }
        if !a.presentation.is_empty() {
            let _ = writeln!(out, "presentation: {}", a.presentation.join("; "));
        }
        let _ = writeln!(out, "saturated: {}", if a.saturated { "yes" } else { "no" });
        let _ = writeln!(out, "saturation generators:");
        for e in &a.saturation {
            let mark = if a.adjoined.contains(&e.name) { " (adjoined)" } else { "" };
            let _ = writeln!(out, "  {} -> {}{mark}", e.name, coords(&e.coordinates));
        }
        let units = if a.units.is_empty() { "(none)".to_string() } else { a.units.join(", ") };
        let _ = writeln!(out, "sharp: {}; units: {units}", if a.sharp { "yes" } else { "no" });
        let _ = writeln!(out, "faces:");
        for f in &a.faces {
            let _ = writeln!(out, "  {} rank {} group {}", f.label, f.rank, f.group);
        }
        let flags: Vec<String> = a
            .p_power_saturated
            .iter()
            .map(|f| format!("p={}: {}", f.p, if f.saturated { "yes" } else { "no" }))
            .collect();
        let _ = writeln!(out, "p-power saturated: {}", flags.join(", "));
    }
    if let Some(t) = &doc.table {
        let sem = doc.semantics.map(|s| format!(", semantics {s}")).unwrap_or_default();
        let _ = writeln!(out, "stratum table (ambient dim {}{sem})", t.ambient_dim);
        table_text(&mut out, t);
    }
    if let Some(v) = &doc.verdict {
        let _ = writeln!(out, "verdict: {}", v.status);
        let _ = writeln!(out, "summary: {}", v.summary);
        let _ = writeln!(out, "characteristic: {}", v.characteristic);
        regularity_text(&mut out, &v.regularity);
        if let Some(w) = &v.witness {
            let _ = writeln!(
                out,
                "witness: m={} from component {} of rank {} ({} > {})",
                w.witness_order, w.component, w.offending_rank, w.dims.0, w.dims.1
            );
        }
        if v.component_count > 1 {
            let _ = writeln!(out, "components of X: {}", v.component_count);
        }
        if let Some(c) = &v.char_p {
            let _ = writeln!(out, "char-p checklist (p = {}):", c.p);
            for item in &c.items {
                let _ = writeln!(
                    out,
                    "  [{}] {} at {}: {}",
                    if item.holds { "ok" } else { "fails" },
                    item.condition,
                    item.location,
                    item.detail
                );
            }
            for u in &c.unchecked {
                let _ = writeln!(out, "  [unchecked] {u}");
            }
        }
        let _ = writeln!(out, "citations: {}", v.citations.join(", "));
    } else if let Some(r) = &doc.regularity {
        regularity_text(&mut out, r);
    }
    if let Some(p) = &doc.presentation {
        let _ = writeln!(out, "order: {}", p.order);
        if p.characteristic != 0 {
            let _ = writeln!(out, "characteristic: {}", p.characteristic);
        }
        let _ = writeln!(out, "variables: {}", p.variables.join(", "));
        let _ = writeln!(out, "relations:");
        for r in &p.relations {
            let _ = writeln!(out, "  {}", r.polynomial);
        }
    }
    for c in &doc.counts {
        let _ = writeln!(
            out,
            "count ({}): {} log jets over F_{} at order {} [{} candidates]",
            c.method, c.count, c.q, c.m, c.budget_used
        );
    }
    if let Some(t) = &doc.truncation {
        let _ = writeln!(out, "truncation from order {} to order {} over F_{}:", t.m, t.n, t.q);
        let _ = writeln!(out, "  all points: image {} of {}", t.image, t.full_fiber);
        let _ = writeln!(out, "  over the origin: image {} of {}", t.image_over_origin, t.full_fiber_over_origin);
    }
    if !doc.warnings.is_empty() {
        let _ = writeln!(out, "warnings:");
        for w in &doc.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

pub fn render_report(doc: &ReportDocument, format: Format) -> String {
    match format {
        Format::Human => human(doc),
        Format::Json => serde_json::to_string_pretty(doc).expect("report serializes") + "\n",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let o = RunOptions::default();
        assert_eq!(run_text(Command::Verdict, "monoid x", &o).unwrap_err().exit_code(), 2);
        assert_eq!(run_text(Command::Jets, "strata:\n  A 0 1\n", &o).unwrap_err().exit_code(), 1);
        assert_eq!(run_text(Command::Verdict, "monoid: x\nchart: p -> y\n", &o).unwrap_err().exit_code(), 3);
        let big = RunOptions { q: Some(5), m: Some(2), budget: Some(10), ..o.clone() };
        assert_eq!(run_text(Command::Count, "monoid: x, y\n", &big).unwrap_err().exit_code(), 4);
        assert_eq!(run_text(Command::Count, "monoid: x\n", &o).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn json_shape() {
        let doc = run_text(Command::Verdict, "monoid: x, y\n", &RunOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&render_report(&doc, Format::Json)).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["warnings"], serde_json::json!([]));
        assert_eq!(v["verdict"]["citations"], serde_json::json!(["theorem-1", "dimreg"]));
        let back: ReportDocument = serde_json::from_value(v).unwrap();
        assert_eq!(back, doc);
    }
}
