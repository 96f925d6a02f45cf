//! Text format for monoid log schemes, abstract stratifications and
//! polynomial jet inputs.
//!
//! ```text
//! # comment
//! name: diagonal
//! monoid: x, y
//! relations: (none)
//! chart: p -> x, q -> y, r -> x+y
//! semantics: image
//! ```
//!
//! An abstract stratification replaces the monoid block by indented rows
//! `label rank dim [closure-of=a,b]` under `strata:`. A polynomial jet input
//! uses `variables:`, `equations:` and `log-charts: p -> x*(x-1)`.

use std::fmt;

use thiserror::Error;

use crate::jets::JetInput;
use crate::logmodel::{abstract_table, AbstractRow, ChartImage, LogError, MonomialLogScheme, Semantics, StratumTable};
use crate::monoid::{AffineMonoid, MonoidError, Relation, Word, DEFAULT_CAP};
use crate::oracle::DEFAULT_BUDGET;
use crate::poly::{PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Kind(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartSpec {
    Standard,
    Explicit { names: Vec<String>, images: Vec<ChartImage>, relations: Vec<Relation> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Monoid { generators: Vec<String>, relations: Vec<Relation>, chart: ChartSpec },
    Abstract { rows: Vec<AbstractRow> },
    Polynomial { variables: Vec<String>, equations: Vec<String>, log_charts: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub characteristic: u64,
    pub semantics: Semantics,
    pub budget: u64,
    pub cap: i64,
}

impl Default for Options {
    fn default() -> Self {
        Options { characteristic: 0, semantics: Semantics::Associated, budget: DEFAULT_BUDGET, cap: DEFAULT_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeDescription {
    pub name: Option<String>,
    pub body: Body,
    pub options: Options,
}

const KEYS: &[&str] = &[
    "name",
    "monoid",
    "relations",
    "chart",
    "chart-relations",
    "char",
    "semantics",
    "budget",
    "cap",
    "strata",
    "variables",
    "equations",
    "log-charts",
];

struct Field<'a> {
    line: usize,
    column: usize,
    value: &'a str,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `value` on `sep`, returning trimmed pieces with their columns.
fn pieces<'a>(f: &Field<'a>, sep: char) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in f.value.char_indices().chain(std::iter::once((f.value.len(), sep))) {
        if c == sep {
            let raw = &f.value[start..i];
            let lead = raw.len() - raw.trim_start().len();
            out.push((f.column + start + lead, raw.trim()));
            start = i + c.len_utf8();
        }
    }
    out
}

fn names(f: &Field) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::new();
    for (col, piece) in pieces(f, ',') {
        if !is_identifier(piece) {
            return Err(err(f.line, col, format!("`{piece}` is not a valid name")));
        }
        if out.iter().any(|n| n == piece) {
            return Err(err(f.line, col, format!("name `{piece}` repeated")));
        }
        out.push(piece.to_string());
    }
    Ok(out)
}

fn relations(f: &Field) -> Result<Vec<Relation>, ParseError> {
    if f.value.trim() == "(none)" {
        return Ok(Vec::new());
    }
    pieces(f, ';')
        .into_iter()
        .map(|(col, piece)| {
            Relation::parse(piece).map_err(|e| match e {
                MonoidError::Syntax { offset, message } => err(f.line, col + offset, message),
                other => err(f.line, col, other.to_string()),
            })
        })
        .collect()
}

fn number<T: std::str::FromStr>(f: &Field, what: &str) -> Result<T, ParseError> {
    f.value.trim().parse().map_err(|_| err(f.line, f.column, format!("expected {what}, found `{}`", f.value.trim())))
}

fn arrows<'a>(f: &Field<'a>) -> Result<Vec<(usize, String, usize, &'a str)>, ParseError> {
    pieces(f, ',')
        .into_iter()
        .map(|(col, piece)| {
            let Some(at) = piece.find("->") else {
                return Err(err(f.line, col, "expected `name -> image`"));
            };
            let name = piece[..at].trim();
            if !is_identifier(name) {
                return Err(err(f.line, col, format!("`{name}` is not a valid name")));
            }
            let rhs = &piece[at + 2..];
            let lead = rhs.len() - rhs.trim_start().len();
            Ok((col, name.to_string(), col + at + 2 + lead, rhs.trim()))
        })
        .collect()
}

fn strata_row(line: usize, indent: usize, text: &str) -> Result<AbstractRow, ParseError> {
    let mut cols = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                cols.push((indent + s + 1, &text[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if cols.len() < 3 || cols.len() > 4 {
        return Err(err(line, indent + 1, "expected `label rank dim [closure-of=labels]`"));
    }
    let (label_col, label) = cols[0];
    if !is_identifier(label) {
        return Err(err(line, label_col, format!("`{label}` is not a valid label")));
    }
    let int = |(col, s): (usize, &str)| {
        s.parse::<usize>().map_err(|_| err(line, col, format!("expected a non-negative integer, found `{s}`")))
    };
    let rank = int(cols[1])?;
    let dim = int(cols[2])?;
    let mut closure_of = Vec::new();
    if let Some(&(col, s)) = cols.get(3) {
        let Some(list) = s.strip_prefix("closure-of=") else {
            return Err(err(line, col, "expected `closure-of=labels`"));
        };
        for l in list.split(',') {
            if !is_identifier(l) {
                return Err(err(line, col, format!("`{l}` is not a valid label")));
            }
            closure_of.push(l.to_string());
        }
    }
    Ok(AbstractRow { label: label.to_string(), rank, dim, closure_of })
}

impl SchemeDescription {
    pub fn parse(text: &str) -> Result<SchemeDescription, ParseError> {
        let mut fields: Vec<(&str, Field)> = Vec::new();
        let mut rows: Option<(usize, Vec<AbstractRow>)> = None;
        let mut in_strata = false;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if indent > 0 {
                if !in_strata {
                    return Err(err(line, 1, "unexpected indented line"));
                }
                let row = strata_row(line, indent, content.trim_start())?;
                rows.as_mut().expect("strata block open").1.push(row);
                continue;
            }
            in_strata = false;
            let Some(colon) = content.find(':') else {
                return Err(err(line, 1, "expected `key: value`"));
            };
            let key = content[..colon].trim();
            if !KEYS.contains(&key) {
                return Err(err(line, 1, format!("unknown key `{key}`")));
            }
            let value = &content[colon + 1..];
            let column = colon + 2;
            if key == "strata" {
                if rows.is_some() {
                    return Err(err(line, 1, "duplicate key `strata`"));
                }
                if !value.trim().is_empty() {
                    return Err(err(line, column, "strata rows go on the following indented lines"));
                }
                rows = Some((line, Vec::new()));
                in_strata = true;
                continue;
            }
            let repeatable = key == "relations" || key == "chart-relations" || key == "equations";
            if !repeatable && fields.iter().any(|(k, _)| *k == key) {
                return Err(err(line, 1, format!("duplicate key `{key}`")));
            }
            fields.push((key, Field { line, column, value }));
        }
        let get = |k: &str| fields.iter().find(|(key, _)| *key == k).map(|(_, f)| f);
        let all = |k: &'static str| fields.iter().filter(move |(key, _)| *key == k).map(|(_, f)| f);
        let kinds = [get("monoid").is_some(), rows.is_some(), get("variables").is_some()];
        if kinds.iter().filter(|&&b| b).count() != 1 {
            return Err(err(1, 1, "a description needs exactly one of `monoid:`, `strata:` or `variables:`"));
        }
        let reject = |keys: &[&str], kind: &str| -> Result<(), ParseError> {
            for (k, f) in &fields {
                if keys.contains(k) {
                    return Err(err(f.line, 1, format!("key `{k}` is not allowed in a {kind} description")));
                }
            }
            Ok(())
        };
        let mut options = Options::default();
        if let Some(f) = get("char") {
            options.characteristic = number(f, "a characteristic")?;
        }
        if let Some(f) = get("semantics") {
            options.semantics = f.value.trim().parse().map_err(|e: String| err(f.line, f.column, e))?;
        }
        if let Some(f) = get("budget") {
            options.budget = number(f, "a budget")?;
        }
        if let Some(f) = get("cap") {
            options.cap = number(f, "a cap")?;
        }
        let name = get("name").map(|f| f.value.trim().to_string());
        let body = if let Some(f) = get("monoid") {
            reject(&["variables", "equations", "log-charts"], "monoid")?;
            let generators = names(f)?;
            let mut rels = Vec::new();
            for f in all("relations") {
                rels.extend(relations(f)?);
            }
            let chart = match get("chart") {
                None => ChartSpec::Standard,
                Some(f) if f.value.trim() == "standard" => ChartSpec::Standard,
                Some(f) => {
                    let mut names = Vec::new();
                    let mut images = Vec::new();
                    for (col, name, icol, image) in arrows(f)? {
                        if names.contains(&name) {
                            return Err(err(f.line, col, format!("chart name `{name}` repeated")));
                        }
                        names.push(name);
                        images.push(if image == "ZERO" {
                            ChartImage::Zero
                        } else {
                            ChartImage::Monomial(Word::parse(image).map_err(|e| match e {
                                MonoidError::Syntax { offset, message } => err(f.line, icol + offset, message),
                                other => err(f.line, icol, other.to_string()),
                            })?)
                        });
                    }
                    let mut relations_q = Vec::new();
                    for f in all("chart-relations") {
                        relations_q.extend(relations(f)?);
                    }
                    ChartSpec::Explicit { names, images, relations: relations_q }
                }
            };
            if matches!(chart, ChartSpec::Standard) {
                if let Some(f) = get("chart-relations") {
                    return Err(err(f.line, 1, "`chart-relations` needs an explicit chart"));
                }
            }
            Body::Monoid { generators, relations: rels, chart }
        } else if let Some((_, rows)) = rows {
            reject(&["relations", "chart", "chart-relations", "variables", "equations", "log-charts"], "strata")?;
            Body::Abstract { rows }
        } else {
            reject(&["relations", "chart", "chart-relations"], "polynomial")?;
            let f = get("variables").expect("checked above");
            let variables = names(f)?;
            let mut equations = Vec::new();
            for f in all("equations") {
                if f.value.trim() == "(none)" {
                    continue;
                }
                for (col, piece) in pieces(f, ';') {
                    Polynomial::parse(piece, &variables).map_err(|e| poly_err(f.line, col, e))?;
                    equations.push(piece.to_string());
                }
            }
            let mut log_charts: Vec<(String, String)> = Vec::new();
            if let Some(f) = get("log-charts") {
                for (col, name, icol, poly) in arrows(f)? {
                    if log_charts.iter().any(|(n, _)| *n == name) {
                        return Err(err(f.line, col, format!("chart name `{name}` repeated")));
                    }
                    Polynomial::parse(poly, &variables).map_err(|e| poly_err(f.line, icol, e))?;
                    log_charts.push((name, poly.to_string()));
                }
            }
            Body::Polynomial { variables, equations, log_charts }
        };
        Ok(SchemeDescription { name, body, options })
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            Body::Monoid { .. } => "monoid",
            Body::Abstract { .. } => "strata",
            Body::Polynomial { .. } => "polynomial",
        }
    }

    pub fn ambient(&self) -> Result<AffineMonoid, BuildError> {
        match &self.body {
            Body::Monoid { generators, relations, .. } => Ok(AffineMonoid::from_presentation(generators, relations)?),
            _ => Err(BuildError::Kind(format!("a {} description has no monoid", self.kind()))),
        }
    }

    pub fn scheme(&self) -> Result<MonomialLogScheme, BuildError> {
        let ambient = self.ambient()?;
        let Body::Monoid { chart, .. } = &self.body else { unreachable!("ambient checked the kind") };
        let o = &self.options;
        let scheme = match chart {
            ChartSpec::Standard => {
                MonomialLogScheme::standard(ambient, o.characteristic)?.with_semantics(o.semantics)?
            }
            ChartSpec::Explicit { names, images, relations } => {
                let q = AffineMonoid::from_presentation(names, relations)?;
                MonomialLogScheme::new(ambient, q, images.clone(), o.characteristic, o.semantics)?
            }
        };
        Ok(scheme)
    }

    pub fn table(&self) -> Result<StratumTable, BuildError> {
        match &self.body {
            Body::Abstract { rows } => Ok(abstract_table(rows)?),
            Body::Monoid { .. } => Ok(self.scheme()?.stratify()?),
            Body::Polynomial { .. } => Err(BuildError::Kind("a polynomial description has no stratification".into())),
        }
    }

    pub fn jet_input(&self) -> Result<JetInput, BuildError> {
        match &self.body {
            Body::Monoid { .. } => Ok(JetInput::from_scheme(&self.scheme()?)),
            Body::Polynomial { variables, equations, log_charts } => {
                let relations =
                    equations.iter().map(|e| Polynomial::parse(e, variables)).collect::<Result<Vec<_>, _>>()?;
                let chart = log_charts
                    .iter()
                    .map(|(n, p)| Ok((n.clone(), Polynomial::parse(p, variables)?)))
                    .collect::<Result<Vec<_>, PolyError>>()?;
                Ok(JetInput { base: variables.clone(), relations, relation_text: equations.clone(), chart })
            }
            Body::Abstract { .. } => Err(BuildError::Kind("a strata description has no equations".into())),
        }
    }
}

fn poly_err(line: usize, col: usize, e: PolyError) -> ParseError {
    match e {
        PolyError::Syntax { offset, message } => err(line, col + offset, message),
        other => err(line, col, other.to_string()),
    }
}

fn relation_list(rels: &[Relation]) -> String {
    if rels.is_empty() {
        "(none)".into()
    } else {
        rels.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; ")
    }
}

/// Canonical text; parsing it gives back the same description.
impl fmt::Display for SchemeDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            writeln!(f, "name: {n}")?;
        }
        match &self.body {
            Body::Monoid { generators, relations, chart } => {
                writeln!(f, "monoid: {}", generators.join(", "))?;
                writeln!(f, "relations: {}", relation_list(relations))?;
                match chart {
                    ChartSpec::Standard => writeln!(f, "chart: standard")?,
                    ChartSpec::Explicit { names, images, relations } => {
                        let entries: Vec<String> =
                            names.iter().zip(images).map(|(n, i)| format!("{n} -> {i}")).collect();
                        writeln!(f, "chart: {}", entries.join(", "))?;
                        if !relations.is_empty() {
                            writeln!(f, "chart-relations: {}", relation_list(relations))?;
                        }
                    }
                }
            }
            Body::Abstract { rows } => {
                writeln!(f, "strata:")?;
                for r in rows {
                    write!(f, "  {} {} {}", r.label, r.rank, r.dim)?;
                    if !r.closure_of.is_empty() {
                        write!(f, " closure-of={}", r.closure_of.join(","))?;
                    }
                    writeln!(f)?;
                }
            }
            Body::Polynomial { variables, equations, log_charts } => {
                writeln!(f, "variables: {}", variables.join(", "))?;
                let eq = if equations.is_empty() { "(none)".to_string() } else { equations.join("; ") };
                writeln!(f, "equations: {eq}")?;
                if !log_charts.is_empty() {
                    let entries: Vec<String> = log_charts.iter().map(|(n, p)| format!("{n} -> {p}")).collect();
                    writeln!(f, "log-charts: {}", entries.join(", "))?;
                }
            }
        }
        let d = Options::default();
        let o = &self.options;
        if o.characteristic != d.characteristic {
            writeln!(f, "char: {}", o.characteristic)?;
        }
        if o.semantics != d.semantics {
            writeln!(f, "semantics: {}", o.semantics)?;
        }
        if o.budget != d.budget {
            writeln!(f, "budget: {}", o.budget)?;
        }
        if o.cap != d.cap {
            writeln!(f, "cap: {}", o.cap)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_round_trip() {
        let d = SchemeDescription::parse("monoid: x\nrelations: (none)\n").unwrap();
        assert!(d.scheme().unwrap().is_standard());
        let text = "name: quadric\nmonoid: x, y, z, w\nrelations: x+w = y+z\nchart: a -> x, b -> y\nsemantics: image\n";
        let d = SchemeDescription::parse(text).unwrap();
        assert_eq!(d.to_string(), text);
        assert_eq!(SchemeDescription::parse(&d.to_string()).unwrap(), d);
        let s = d.scheme().unwrap();
        assert_eq!(s.chart().names(), ["a", "b"]);
    }

    #[test]
    fn diagnostics() {
        let e = SchemeDescription::parse("monoid: x, y\nrelations: x+ = y\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 14));
        let e = SchemeDescription::parse("monoid: x\nfoo: 1\n").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "unknown key `foo`"));
        let e = SchemeDescription::parse("monoid: x\nstrata:\n  A 0 1\n").unwrap_err();
        assert!(e.message.contains("exactly one"));
        let e = SchemeDescription::parse("variables: x\nequations: x^\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn strata_and_polynomials() {
        let text = "strata:\n  X0 0 2\n  L 1 1 closure-of=X0\n  O 2 0 closure-of=L\n";
        let d = SchemeDescription::parse(text).unwrap();
        assert_eq!(d.to_string(), text);
        assert_eq!(d.table().unwrap().components.len(), 3);
        let text = "variables: x\nequations: (none)\nlog-charts: p -> x*(x-1)\n";
        let d = SchemeDescription::parse(text).unwrap();
        assert_eq!(d.to_string(), text);
        let pres = d.jet_input().unwrap().presentation(1, true).unwrap();
        assert_eq!(pres.rendered_relations(), vec!["2*x*d1_x - d1_x - x^2*dlog1_p + x*dlog1_p"]);
    }
}
