//! Hasse–Schmidt presentations of ordinary and log jet algebras.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmodel::{ChartImage, MonomialLogScheme, StratumTable};
use crate::monoid::Word;
use crate::poly::{Monomial, PolyError, Polynomial, Var, VarKind, VarNames};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("chart element `{0}` has the zero polynomial as image")]
    ZeroChart(String),
    #[error("cannot truncate from order {from} to the higher order {to}")]
    Truncation { from: u32, to: u32 },
    #[error("variable `{0}` declared twice")]
    DuplicateName(String),
}

/// Where a relation of a presentation comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum RelationSource {
    /// A defining relation of the base scheme.
    Defining(usize),
    /// The compatibility relation of a chart element.
    Chart(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationLabel {
    pub source: RelationSource,
    pub order: u32,
}

/// The algebra of order-`m` (log) jets: generators and relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSPresentation {
    pub order: u32,
    pub names: VarNames,
    pub variables: Vec<Var>,
    pub relations: Vec<Polynomial>,
    pub labels: Vec<RelationLabel>,
    pub characteristic: u64,
}

fn base_series(index: usize, m: u32) -> Vec<Polynomial> {
    (0..=m).map(|i| Polynomial::var(Var::d(i, index))).collect()
}

fn series_mul(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    let n = a.len();
    let mut out = vec![Polynomial::zero(); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            if !b[j].is_zero() {
                out[i + j] = &out[i + j] + &(&a[i] * &b[j]);
            }
        }
    }
    out
}

/// Coefficients of `t⁰ … tᵐ` after substituting `x ↦ Σ dᵢx·tⁱ` for every
/// base variable. Variables other than base variables are kept as constants.
pub fn hs_expand(f: &Polynomial, m: u32) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::zero(); m as usize + 1];
    for (mono, c) in f.terms() {
        let mut constant = Monomial::new();
        let mut series: Vec<Polynomial> = vec![Polynomial::zero(); m as usize + 1];
        for (v, e) in mono {
            if !(v.kind == VarKind::Ordinary && v.order == 0) {
                constant.insert(*v, *e);
            }
        }
        series[0] = Polynomial::monomial(c.clone(), constant);
        for (v, e) in mono {
            if v.kind == VarKind::Ordinary && v.order == 0 {
                let s = base_series(v.index, m);
                for _ in 0..*e {
                    series = series_mul(&series, &s);
                }
            }
        }
        for (o, s) in out.iter_mut().zip(&series) {
            *o = &*o + s;
        }
    }
    out
}

fn check_names(names: &[String]) -> Result<(), JetError> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(JetError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

/// Presentation of the order-`m` jet algebra of `k[vars]/(relations)`.
pub fn jet_presentation(base: &[String], relations: &[Polynomial], m: u32) -> Result<HSPresentation, JetError> {
    log_jet_presentation(base, relations, &[], m)
}

/// Adds, for every chart element `p` with polynomial `P`, the relations
/// `dᵢP − P·∂ᵢp` for `1 ≤ i ≤ m`.
pub fn log_jet_presentation(
    base: &[String],
    relations: &[Polynomial],
    chart: &[(String, Polynomial)],
    m: u32,
) -> Result<HSPresentation, JetError> {
    check_names(base)?;
    let chart_names: Vec<String> = chart.iter().map(|(n, _)| n.clone()).collect();
    check_names(&chart_names)?;
    if let Some((n, _)) = chart.iter().find(|(_, p)| p.is_zero()) {
        return Err(JetError::ZeroChart(n.clone()));
    }
    let mut variables: Vec<Var> = Vec::new();
    for i in 0..=m {
        variables.extend((0..base.len()).map(|k| Var::d(i, k)));
    }
    for i in 1..=m {
        variables.extend((0..chart.len()).map(|l| Var::dlog(i, l)));
    }
    let mut rels = Vec::new();
    let mut labels = Vec::new();
    for (s, f) in relations.iter().enumerate() {
        for (i, c) in hs_expand(f, m).into_iter().enumerate() {
            rels.push(c);
            labels.push(RelationLabel { source: RelationSource::Defining(s), order: i as u32 });
        }
    }
    for (l, (_, p)) in chart.iter().enumerate() {
        let expanded = hs_expand(p, m);
        for (i, c) in expanded.iter().enumerate().skip(1) {
            rels.push(c - &(p * &Polynomial::var(Var::dlog(i as u32, l))));
            labels.push(RelationLabel { source: RelationSource::Chart(l), order: i as u32 });
        }
    }
    Ok(HSPresentation {
        order: m,
        names: VarNames { base: base.to_vec(), chart: chart_names },
        variables,
        relations: rels,
        labels,
        characteristic: 0,
    })
}

impl HSPresentation {
    /// Reduces all coefficients modulo `p`.
    pub fn with_characteristic(mut self, p: u64) -> Result<HSPresentation, JetError> {
        if p != 0 {
            self.relations = self.relations.iter().map(|r| r.reduce_mod_p(p)).collect::<Result<_, _>>()?;
            self.characteristic = p;
        }
        Ok(self)
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables.iter().map(|v| self.names.name(*v)).collect()
    }

    pub fn rendered_relations(&self) -> Vec<String> {
        self.relations.iter().map(|r| r.render(&self.names)).collect()
    }

    /// Relations of a given chart element, indexed by order.
    pub fn chart_relations(&self, l: usize) -> Vec<&Polynomial> {
        self.labels
            .iter()
            .zip(&self.relations)
            .filter(|(lab, _)| lab.source == RelationSource::Chart(l))
            .map(|(_, r)| r)
            .collect()
    }

    pub fn describe_source(&self, label: &RelationLabel, defining: &[String]) -> String {
        match label.source {
            RelationSource::Defining(s) => defining.get(s).cloned().unwrap_or_else(|| format!("relation {}", s + 1)),
            RelationSource::Chart(l) => format!("chart {}", self.names.chart[l]),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("order: {}\n", self.order);
        if self.characteristic != 0 {
            out.push_str(&format!("characteristic: {}\n", self.characteristic));
        }
        out.push_str(&format!("variables: {}\n", self.variable_names().join(", ")));
        if self.relations.is_empty() {
            out.push_str("relations: (none)\n");
        } else {
            out.push_str("relations:\n");
            for r in self.rendered_relations() {
                out.push_str(&format!("  {r}\n"));
            }
        }
        out
    }

    pub fn document(&self) -> PresentationDocument {
        PresentationDocument {
            order: self.order,
            characteristic: self.characteristic,
            variables: self.variable_names(),
            chart: self.names.chart.clone(),
            relations: self
                .labels
                .iter()
                .zip(self.rendered_relations())
                .map(|(l, p)| RelationEntry {
                    source: match l.source {
                        RelationSource::Defining(s) => format!("relation {}", s + 1),
                        RelationSource::Chart(c) => format!("chart {}", self.names.chart[c]),
                    },
                    order: l.order,
                    polynomial: p,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub source: String,
    pub order: u32,
    pub polynomial: String,
}

/// Serializable form of a presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationDocument {
    pub order: u32,
    pub characteristic: u64,
    pub variables: Vec<String>,
    pub chart: Vec<String>,
    pub relations: Vec<RelationEntry>,
}

/// The natural map from order-`from` jets to order-`to` jets. On
/// presentations it is the inclusion of the lower-order algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationMap {
    pub from: u32,
    pub to: u32,
}

impl TruncationMap {
    pub fn new(from: u32, to: u32) -> Result<TruncationMap, JetError> {
        if to > from {
            return Err(JetError::Truncation { from, to });
        }
        Ok(TruncationMap { from, to })
    }

    pub fn is_identity(&self) -> bool {
        self.from == self.to
    }

    /// Image of a variable of the order-`to` algebra in the order-`from` one.
    pub fn apply(&self, v: Var) -> Option<Var> {
        (v.order <= self.to).then_some(v)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TruncationMap) -> Result<TruncationMap, JetError> {
        if next.from != self.to {
            return Err(JetError::Truncation { from: next.from, to: self.to });
        }
        TruncationMap::new(self.from, next.to)
    }

    /// The order-`to` presentation read off from the order-`from` one.
    pub fn restrict(&self, p: &HSPresentation) -> Result<HSPresentation, JetError> {
        if p.order != self.from {
            return Err(JetError::Truncation { from: p.order, to: self.to });
        }
        let keep: Vec<usize> = (0..p.labels.len()).filter(|&i| p.labels[i].order <= self.to).collect();
        Ok(HSPresentation {
            order: self.to,
            names: p.names.clone(),
            variables: p.variables.iter().copied().filter(|v| v.order <= self.to).collect(),
            relations: keep.iter().map(|&i| p.relations[i].clone()).collect(),
            labels: keep.iter().map(|&i| p.labels[i]).collect(),
            characteristic: p.characteristic,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedDimension {
    pub rank: usize,
    pub stratum_dim: usize,
    /// `(m+1)(j + dim X_j) − j`
    pub jet_dim: i64,
    /// Fibre dimension `m·j` of the log jets over ordinary jets of the stratum.
    pub bundle_offset: u64,
}

pub fn expected_dimensions(table: &StratumTable, m: u32) -> Vec<ExpectedDimension> {
    table
        .ranks()
        .into_iter()
        .map(|j| {
            let d = table.stratum_dim(j).unwrap_or(0);
            ExpectedDimension {
                rank: j,
                stratum_dim: d,
                jet_dim: crate::logmodel::log_jet_dimension(m as u64, j, d),
                bundle_offset: m as u64 * j as u64,
            }
        })
        .collect()
}

/// `x^a·y^b` for an additive word.
pub fn word_monomial(word: &Word, names: &[String]) -> Result<Polynomial, crate::monoid::MonoidError> {
    let v = word.vector(names)?;
    let m: Monomial = v.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (Var::base(i), e as u32)).collect();
    Ok(Polynomial::monomial(BigRational::one(), m))
}

/// Base variables, binomial relations and chart polynomials of a monomial
/// log scheme. Chart generators mapped to zero carry no relation and are
/// left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetInput {
    pub base: Vec<String>,
    pub relations: Vec<Polynomial>,
    pub relation_text: Vec<String>,
    pub chart: Vec<(String, Polynomial)>,
}

impl JetInput {
    pub fn from_scheme(scheme: &MonomialLogScheme) -> JetInput {
        let p = scheme.ambient();
        let base = p.names().to_vec();
        let mut relations = Vec::new();
        let mut relation_text = Vec::new();
        for rel in p.presentation() {
            let l = word_monomial(&rel.lhs, &base).expect("validated presentation");
            let r = word_monomial(&rel.rhs, &base).expect("validated presentation");
            relations.push(&l - &r);
            relation_text.push(rel.to_string());
        }
        let chart = scheme
            .chart()
            .names()
            .iter()
            .zip(scheme.images())
            .filter_map(|(n, img)| match img {
                ChartImage::Zero => None,
                ChartImage::Monomial(w) => Some((n.clone(), word_monomial(w, &base).expect("validated chart"))),
            })
            .collect();
        JetInput { base, relations, relation_text, chart }
    }

    pub fn presentation(&self, m: u32, log: bool) -> Result<HSPresentation, JetError> {
        if log {
            log_jet_presentation(&self.base, &self.relations, &self.chart, m)
        } else {
            jet_presentation(&self.base, &self.relations, m)
        }
    }
}
