//! Monomial log structures on monoid algebras, their rank stratification,
//! dimensional regularity and the irreducibility verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{rank as lattice_rank, FGAbelianGroup, Quotient};
use crate::monoid::{AffineMonoid, Face, MonoidError, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("invalid log scheme: {0}")]
    Invalid(String),
    #[error("invalid stratum table: {0}")]
    Table(String),
    #[error("semicontinuity violated: `{parent}` (rank {parent_rank}) lies over `{child}` (rank {child_rank})")]
    Semicontinuity { parent: String, parent_rank: usize, child: String, child_rank: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// How the rank of the log structure along an orbit is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// Rank of the associated log structure: `Q^gp / S^gp` where `S` is the
    /// set of chart elements that are units along the orbit.
    #[default]
    Associated,
    /// Rank of the image of the nonzero chart elements in `P^gp / F^gp`.
    Image,
}

impl Semantics {
    pub fn other(self) -> Semantics {
        match self {
            Semantics::Associated => Semantics::Image,
            Semantics::Image => Semantics::Associated,
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Associated => "associated",
            Semantics::Image => "image",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "associated" => Ok(Semantics::Associated),
            "image" => Ok(Semantics::Image),
            other => Err(format!("unknown semantics `{other}` (expected associated or image)")),
        }
    }
}

/// Image of a chart generator: a monomial of the ambient monoid or zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartImage {
    Zero,
    Monomial(Word),
}

impl fmt::Display for ChartImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartImage::Zero => write!(f, "ZERO"),
            ChartImage::Monomial(w) => write!(f, "{w}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `Spec k[P]` with the log structure generated by a monomial chart `Q → P ∪ {0}`.
#[derive(Clone, Debug)]
pub struct MonomialLogScheme {
    ambient: AffineMonoid,
    chart: AffineMonoid,
    images: Vec<ChartImage>,
    characteristic: u64,
    semantics: Semantics,
    /// Exponent vectors over the ambient generators, `None` for zero.
    exponents: Vec<Option<Vec<i64>>>,
    nonzero: Vec<usize>,
}

impl MonomialLogScheme {
    pub fn new(
        ambient: AffineMonoid,
        chart: AffineMonoid,
        images: Vec<ChartImage>,
        characteristic: u64,
        semantics: Semantics,
    ) -> Result<MonomialLogScheme, LogError> {
        if images.len() != chart.len() {
            return Err(LogError::Invalid(format!(
                "{} chart images for {} chart generators",
                images.len(),
                chart.len()
            )));
        }
        if characteristic != 0 && !is_prime(characteristic) {
            return Err(LogError::Invalid(format!("characteristic must be 0 or a prime, got {characteristic}")));
        }
        let mut exponents = Vec::new();
        for img in &images {
            exponents.push(match img {
                ChartImage::Zero => None,
                ChartImage::Monomial(w) => Some(w.vector(ambient.names())?),
            });
        }
        let nonzero: Vec<usize> = (0..images.len()).filter(|&i| exponents[i].is_some()).collect();
        if semantics == Semantics::Image && nonzero.len() != images.len() {
            return Err(LogError::Invalid(
                "image semantics requires every chart generator to have a nonzero image".into(),
            ));
        }
        if chart.face_with(&nonzero).is_none() {
            return Err(LogError::Invalid(format!(
                "chart generators with nonzero image {} do not form a face of the chart monoid",
                chart.label(&nonzero)
            )));
        }
        let scheme = MonomialLogScheme { ambient, chart, images, characteristic, semantics, exponents, nonzero };
        scheme.check_chart_relations()?;
        Ok(scheme)
    }

    /// The standard chart: `Q = P` mapping each generator to itself.
    pub fn standard(ambient: AffineMonoid, characteristic: u64) -> Result<Self, LogError> {
        let images = ambient.names().iter().map(|n| ChartImage::Monomial(Word::generator(n))).collect();
        let chart = ambient.clone();
        MonomialLogScheme::new(ambient, chart, images, characteristic, Semantics::Associated)
    }

    fn check_chart_relations(&self) -> Result<(), LogError> {
        let names = self.chart.names();
        for rel in self.chart.presentation() {
            let sides = [&rel.lhs, &rel.rhs];
            let mut values = Vec::new();
            for side in sides {
                let v = side.vector(names)?;
                let zero = v.iter().enumerate().any(|(i, &k)| k > 0 && self.exponents[i].is_none());
                if zero {
                    values.push(None);
                } else {
                    let mut acc = vec![0i64; self.ambient.len()];
                    for (i, &k) in v.iter().enumerate() {
                        if let Some(e) = &self.exponents[i] {
                            for (a, b) in acc.iter_mut().zip(e) {
                                *a += k * b;
                            }
                        }
                    }
                    values.push(Some(self.ambient.combine(&acc)));
                }
            }
            if values[0] != values[1] {
                return Err(LogError::Invalid(format!("chart relation `{rel}` does not hold in the ambient monoid")));
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> &AffineMonoid {
        &self.ambient
    }

    pub fn chart(&self) -> &AffineMonoid {
        &self.chart
    }

    pub fn images(&self) -> &[ChartImage] {
        &self.images
    }

    pub fn exponents(&self) -> &[Option<Vec<i64>>] {
        &self.exponents
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn with_semantics(&self, semantics: Semantics) -> Result<Self, LogError> {
        MonomialLogScheme::new(
            self.ambient.clone(),
            self.chart.clone(),
            self.images.clone(),
            self.characteristic,
            semantics,
        )
    }

    pub fn with_characteristic(&self, characteristic: u64) -> Result<Self, LogError> {
        MonomialLogScheme::new(
            self.ambient.clone(),
            self.chart.clone(),
            self.images.clone(),
            characteristic,
            self.semantics,
        )
    }

    /// Whether the chart is the identity of the ambient monoid.
    pub fn is_standard(&self) -> bool {
        self.chart.names() == self.ambient.names()
            && self
                .exponents
                .iter()
                .enumerate()
                .all(|(i, e)| e.as_ref().is_some_and(|v| v.iter().enumerate().all(|(k, &c)| c == (k == i) as i64)))
    }

    /// Chart generators with nonzero image.
    pub fn nonzero_generators(&self) -> &[usize] {
        &self.nonzero
    }

    /// Chart generators whose image is a unit along the orbit of `face`.
    pub fn units_at(&self, face: &Face) -> Vec<usize> {
        self.nonzero
            .iter()
            .copied()
            .filter(|&i| {
                self.exponents[i]
                    .as_ref()
                    .is_some_and(|e| e.iter().enumerate().all(|(k, &c)| c == 0 || face.contains(k)))
            })
            .collect()
    }

    /// Rank of the log structure at the generic point of the orbit of `face`.
    pub fn rank_at_face(&self, face: &Face) -> usize {
        self.rank_at_face_with(face, self.semantics)
    }

    pub fn rank_at_face_with(&self, face: &Face, semantics: Semantics) -> usize {
        match semantics {
            Semantics::Associated => {
                let s = self.units_at(face);
                self.chart.gp().rank - self.chart.subgroup_of(&s).rank
            }
            Semantics::Image => {
                let r = self.ambient.gp().rank;
                let mut vecs: Vec<Vec<i64>> = self
                    .nonzero
                    .iter()
                    .map(|&i| {
                        let e = self.exponents[i].as_ref().expect("nonzero image");
                        self.ambient.combine(e)[..r].to_vec()
                    })
                    .collect();
                let face_vecs: Vec<Vec<i64>> =
                    face.generators.iter().map(|&k| self.ambient.image(k)[..r].to_vec()).collect();
                vecs.extend(face_vecs.iter().cloned());
                lattice_rank(r, &vecs) - lattice_rank(r, &face_vecs)
            }
        }
    }

    /// `rank(Q^gp / N^gp)` for the face `N` of nonzero chart generators.
    pub fn zero_ideal_height(&self) -> usize {
        self.chart.gp().rank - self.chart.subgroup_of(&self.nonzero).rank
    }

    pub fn stratify(&self) -> Result<StratumTable, LogError> {
        self.stratify_with(self.semantics)
    }

    /// One row per face orbit of the ambient monoid.
    pub fn stratify_with(&self, semantics: Semantics) -> Result<StratumTable, LogError> {
        let p = &self.ambient;
        let faces = p.faces();
        let mut rows: Vec<StratumComponent> = faces
            .iter()
            .map(|f| StratumComponent {
                label: p.label(&f.generators),
                face: Some(f.generators.iter().map(|&k| p.names()[k].clone()).collect()),
                rank: self.rank_at_face_with(f, semantics),
                dim: f.gp_rank,
                component_count: f.gp.torsion_order(),
                closure_parents: faces
                    .iter()
                    .filter(|g| g.generators != f.generators && f.is_subface_of(g))
                    .map(|g| p.label(&g.generators))
                    .collect(),
            })
            .collect();
        sort_rows(&mut rows);
        let table = StratumTable::from_rows(rows, p.gp().rank);
        table.check_semicontinuity()?;
        table
            .check_codimension_one()
            .map_err(|e| LogError::Internal(format!("stratification is not realizable: {e}")))?;
        Ok(table)
    }
}

fn sort_rows(rows: &mut [StratumComponent]) {
    rows.sort_by(|a, b| (a.rank, a.dim, &a.label).cmp(&(b.rank, b.dim, &b.label)));
    let order: BTreeMap<String, usize> = rows.iter().enumerate().map(|(i, r)| (r.label.clone(), i)).collect();
    for r in rows.iter_mut() {
        r.closure_parents.sort_by_key(|l| order.get(l).copied().unwrap_or(usize::MAX));
    }
}

/// One orbit (or abstract component) of the rank stratification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumComponent {
    pub label: String,
    /// Generators of the ambient face, absent for abstract rows.
    pub face: Option<Vec<String>>,
    pub rank: usize,
    pub dim: usize,
    /// Irreducible components of the orbit over an algebraically closed
    /// field of characteristic zero.
    pub component_count: i64,
    /// Labels of the rows whose closure contains this one.
    pub closure_parents: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumTable {
    pub components: Vec<StratumComponent>,
    pub ambient_dim: usize,
    pub min_rank: usize,
}

impl StratumTable {
    fn from_rows(components: Vec<StratumComponent>, ambient_dim: usize) -> StratumTable {
        let min_rank = components.iter().map(|c| c.rank).min().unwrap_or(0);
        StratumTable { components, ambient_dim, min_rank }
    }

    pub fn get(&self, label: &str) -> Option<&StratumComponent> {
        self.components.iter().find(|c| c.label == label)
    }

    pub fn codim(&self, c: &StratumComponent) -> usize {
        self.ambient_dim - c.dim
    }

    /// Nonempty ranks in increasing order.
    pub fn ranks(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.rank).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Irreducible components of the stratum `X_j`: its rows that do not lie
    /// in the closure of another row of the same rank.
    pub fn stratum_components(&self, j: usize) -> Vec<&StratumComponent> {
        self.components
            .iter()
            .filter(|c| c.rank == j && !c.closure_parents.iter().any(|p| self.get(p).is_some_and(|q| q.rank == j)))
            .collect()
    }

    /// Dimension of `X_j`, if nonempty.
    pub fn stratum_dim(&self, j: usize) -> Option<usize> {
        self.components.iter().filter(|c| c.rank == j).map(|c| c.dim).max()
    }

    pub fn check_semicontinuity(&self) -> Result<(), LogError> {
        for c in &self.components {
            for p in &c.closure_parents {
                let Some(q) = self.get(p) else {
                    return Err(LogError::Table(format!("`{}` refers to unknown row `{p}`", c.label)));
                };
                if q.rank > c.rank {
                    return Err(LogError::Semicontinuity {
                        parent: q.label.clone(),
                        parent_rank: q.rank,
                        child: c.label.clone(),
                        child_rank: c.rank,
                    });
                }
            }
        }
        Ok(())
    }

    /// Inside the closure of each row, the rows of strictly larger rank
    /// form a locus of pure codimension one.
    pub fn check_codimension_one(&self) -> Result<(), String> {
        for y in &self.components {
            let below: Vec<&StratumComponent> =
                self.components.iter().filter(|c| c.rank > y.rank && c.closure_parents.contains(&y.label)).collect();
            for c in &below {
                let maximal = !below.iter().any(|d| c.closure_parents.contains(&d.label));
                if maximal && c.dim + 1 != y.dim {
                    return Err(format!(
                        "`{}` (dim {}) is a maximal higher-rank row inside the closure of `{}` (dim {})",
                        c.label, c.dim, y.label, y.dim
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityFailure {
    pub label: String,
    pub rank: usize,
    pub expected_codim: i64,
    pub actual_codim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub dimensionally_regular: bool,
    pub r: usize,
    pub failures: Vec<RegularityFailure>,
    /// Result of the interval-and-closure characterization.
    pub interval_check: bool,
}

/// Checks `codim X_j = j − r` on every stratum component.
pub fn definition_check(table: &StratumTable) -> Vec<RegularityFailure> {
    let r = table.min_rank;
    let mut failures = Vec::new();
    for j in table.ranks() {
        for c in table.stratum_components(j) {
            let expected = j as i64 - r as i64;
            let actual = table.codim(c);
            if actual as i64 != expected {
                failures.push(RegularityFailure {
                    label: c.label.clone(),
                    rank: j,
                    expected_codim: expected,
                    actual_codim: actual,
                });
            }
        }
    }
    failures
}

/// The nonempty ranks form an interval `[a, b]` and every row of rank `ℓ`
/// lies in the closure of a row of each rank `a ≤ j < ℓ`.
pub fn interval_check(table: &StratumTable) -> bool {
    let ranks = table.ranks();
    let (Some(&a), Some(&b)) = (ranks.first(), ranks.last()) else {
        return true;
    };
    if ranks.len() != b - a + 1 {
        return false;
    }
    table
        .components
        .iter()
        .all(|c| (a..c.rank).all(|j| c.closure_parents.iter().any(|p| table.get(p).is_some_and(|q| q.rank == j))))
}

pub fn dimensional_regularity(table: &StratumTable) -> Result<RegularityVerdict, LogError> {
    if table.components.is_empty() {
        return Err(LogError::Precondition("empty stratum table".into()));
    }
    let failures = definition_check(table);
    let interval = interval_check(table);
    if failures.is_empty() != interval {
        return Err(LogError::Internal(format!(
            "regularity characterizations disagree (definition: {}, interval: {interval})",
            failures.is_empty()
        )));
    }
    Ok(RegularityVerdict {
        dimensionally_regular: failures.is_empty(),
        r: table.min_rank,
        failures,
        interval_check: interval,
    })
}

/// Log jet dimension over the smooth locus of a stratum: `(m+1)(j + d) − j`.
pub fn log_jet_dimension(m: u64, j: usize, dim: usize) -> i64 {
    (m as i64 + 1) * (j + dim) as i64 - j as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibilityWitness {
    pub offending_rank: usize,
    pub component: String,
    pub witness_order: u64,
    /// Jet dimensions at the witness order over `X_j` and over `X_r`.
    pub dims: (i64, i64),
}

/// Smallest jet order at which an over-dimensioned stratum contributes more
/// log jets than the dense stratum.
pub fn reducibility_witness(table: &StratumTable) -> Result<ReducibilityWitness, LogError> {
    let r = table.min_rank;
    let d = table.ambient_dim;
    let mut best: Option<ReducibilityWitness> = None;
    for j in table.ranks() {
        for c in table.stratum_components(j) {
            let excess = (j + c.dim) as i64 - (r + d) as i64;
            if excess <= 0 {
                continue;
            }
            let m = ((j - r) as i64 / excess) as u64;
            let dims = (log_jet_dimension(m, j, c.dim), log_jet_dimension(m, r, d));
            debug_assert!(dims.0 > dims.1);
            let w = ReducibilityWitness { offending_rank: j, component: c.label.clone(), witness_order: m, dims };
            if best.as_ref().is_none_or(|b| m < b.witness_order) {
                best = Some(w);
            }
        }
    }
    best.ok_or_else(|| LogError::Precondition("no stratum has codimension smaller than j − r".into()))
}

/// A user-supplied stratum row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractRow {
    pub label: String,
    pub rank: usize,
    pub dim: usize,
    /// Rows whose closure contains this one.
    pub closure_of: Vec<String>,
}

/// Validates a stratification given directly as rows.
pub fn abstract_table(rows: &[AbstractRow]) -> Result<StratumTable, LogError> {
    if rows.is_empty() {
        return Err(LogError::Table("no rows".into()));
    }
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if index.insert(&r.label, i).is_some() {
            return Err(LogError::Table(format!("duplicate label `{}`", r.label)));
        }
    }
    let n = rows.len();
    let mut parents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, r) in rows.iter().enumerate() {
        for p in &r.closure_of {
            let Some(&k) = index.get(p.as_str()) else {
                return Err(LogError::Table(format!("`{}` refers to unknown row `{p}`", r.label)));
            };
            if k == i {
                return Err(LogError::Table(format!("`{}` lists itself in closure-of", r.label)));
            }
            parents[i].insert(k);
        }
    }
    let max_dim = rows.iter().map(|r| r.dim).max().unwrap_or(0);
    let top: Vec<usize> = (0..n).filter(|&i| rows[i].dim == max_dim).collect();
    if top.len() != 1 {
        return Err(LogError::Table(format!(
            "expected exactly one row of maximal dimension {max_dim}, found {}",
            top.len()
        )));
    }
    let generic = top[0];
    let min_rank = rows.iter().map(|r| r.rank).min().unwrap_or(0);
    if rows[generic].rank != min_rank {
        return Err(LogError::Table(format!(
            "the row of maximal dimension `{}` must have the minimum rank {min_rank}",
            rows[generic].label
        )));
    }
    for (i, ps) in parents.iter_mut().enumerate() {
        if i != generic {
            ps.insert(generic);
        }
    }
    // transitive closure, rejecting cycles
    let mut closed: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = parents[i].iter().copied().collect();
        while let Some(k) = stack.pop() {
            if k == i {
                return Err(LogError::Table(format!("closure relation has a cycle through `{}`", rows[i].label)));
            }
            if seen.insert(k) {
                stack.extend(parents[k].iter().copied());
            }
        }
        closed.push(seen);
    }
    for i in 0..n {
        for &k in &closed[i] {
            if rows[k].dim <= rows[i].dim {
                return Err(LogError::Table(format!(
                    "`{}` (dim {}) cannot lie in the closure of `{}` (dim {})",
                    rows[i].label, rows[i].dim, rows[k].label, rows[k].dim
                )));
            }
        }
    }
    let mut comps: Vec<StratumComponent> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| StratumComponent {
            label: r.label.clone(),
            face: None,
            rank: r.rank,
            dim: r.dim,
            component_count: 1,
            closure_parents: closed[i].iter().map(|&k| rows[k].label.clone()).collect(),
        })
        .collect();
    sort_rows(&mut comps);
    let table = StratumTable::from_rows(comps, max_dim);
    table.check_semicontinuity()?;
    table.check_codimension_one().map_err(LogError::Table)?;
    Ok(table)
}

/// Converts a table back to rows accepted by [`abstract_table`].
pub fn table_rows(table: &StratumTable) -> Vec<AbstractRow> {
    table
        .components
        .iter()
        .map(|c| AbstractRow {
            label: c.label.clone(),
            rank: c.rank,
            dim: c.dim,
            closure_of: c.closure_parents.clone(),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    /// The log arc scheme is irreducible.
    Irreducible,
    /// The log arc scheme has one irreducible component over each
    /// irreducible component of `X`.
    IrreducibleComponents,
    Reducible,
    /// Positive characteristic: irreducibility is neither asserted nor denied.
    NotAsserted,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Irreducible => "irreducible",
            VerdictStatus::IrreducibleComponents => "irreducible-components",
            VerdictStatus::Reducible => "reducible",
            VerdictStatus::NotAsserted => "not-asserted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckItem {
    pub condition: String,
    pub location: String,
    pub holds: bool,
    pub detail: String,
}

/// Monoid-computable part of the sufficient criterion in characteristic `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPChecklist {
    pub p: u64,
    pub dimensionally_regular: bool,
    pub items: Vec<CheckItem>,
    pub checked_conditions_hold: bool,
    pub unchecked: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub summary: String,
    pub characteristic: u64,
    pub semantics: Option<Semantics>,
    pub regularity: RegularityVerdict,
    pub witness: Option<ReducibilityWitness>,
    pub min_rank: usize,
    /// Height of the zero ideal of the chart.
    pub zero_ideal_height: Option<usize>,
    pub component_count: i64,
    pub char_p: Option<CharPChecklist>,
    pub warnings: Vec<String>,
    pub citations: Vec<String>,
}

const UNCHECKED_NORMALITY: &str =
    "closures of strata non-singular in codimension one (not computable from the monoid data)";

fn base_verdict(table: &StratumTable, characteristic: u64) -> Result<(Verdict, RegularityVerdict), LogError> {
    let regularity = dimensional_regularity(table)?;
    let witness = if regularity.dimensionally_regular { None } else { reducibility_witness(table).ok() };
    let component_count = table
        .components
        .first()
        .map(|c| table.components.iter().find(|g| g.dim == table.ambient_dim).unwrap_or(c).component_count);
    let v = Verdict {
        status: VerdictStatus::NotAsserted,
        summary: String::new(),
        characteristic,
        semantics: None,
        regularity: regularity.clone(),
        witness,
        min_rank: table.min_rank,
        zero_ideal_height: None,
        component_count: component_count.unwrap_or(1),
        char_p: None,
        warnings: Vec::new(),
        citations: vec!["theorem-1".into(), "dimreg".into()],
    };
    Ok((v, regularity))
}

fn finish_char0(v: &mut Verdict) {
    if v.regularity.dimensionally_regular {
        if v.component_count > 1 {
            v.status = VerdictStatus::IrreducibleComponents;
            v.summary = format!("dimensionally regular: irreducible over each of the {} components", v.component_count);
        } else {
            v.status = VerdictStatus::Irreducible;
            v.summary = "irreducible".into();
        }
    } else {
        v.status = VerdictStatus::Reducible;
        v.summary = match &v.witness {
            Some(w) => format!("reducible, witness m={}", w.witness_order),
            None => "reducible".into(),
        };
    }
    if v.component_count > 1 {
        v.warnings.push(format!(
            "ambient group has torsion: X has {} irreducible components over an algebraically \
             closed field of characteristic 0, and the criterion applies to each of them",
            v.component_count
        ));
    }
}

fn finish_char_p(v: &mut Verdict, checklist: CharPChecklist) {
    v.status = VerdictStatus::NotAsserted;
    v.summary = if !checklist.dimensionally_regular {
        "not dimensionally regular; irreducibility not asserted in positive characteristic".into()
    } else if let Some(bad) = checklist.items.iter().find(|i| !i.holds) {
        format!("sufficient criterion fails: {}", bad.detail)
    } else {
        "checked sufficient conditions hold; remaining conditions unchecked, irreducibility not asserted".into()
    };
    v.warnings.push(format!(
        "characteristic {}: only a sufficient criterion is checked and irreducibility is never asserted",
        checklist.p
    ));
    v.char_p = Some(checklist);
}

/// Verdict for a table given without a chart.
pub fn abstract_verdict(table: &StratumTable, characteristic: u64) -> Result<Verdict, LogError> {
    let (mut v, reg) = base_verdict(table, characteristic)?;
    if characteristic == 0 {
        finish_char0(&mut v);
    } else {
        let checklist = CharPChecklist {
            p: characteristic,
            dimensionally_regular: reg.dimensionally_regular,
            items: Vec::new(),
            checked_conditions_hold: reg.dimensionally_regular,
            unchecked: vec![
                UNCHECKED_NORMALITY.into(),
                "valuation condition along codimension-one strata (no chart given)".into(),
            ],
        };
        finish_char_p(&mut v, checklist);
    }
    Ok(v)
}

impl MonomialLogScheme {
    pub fn verdict(&self) -> Result<Verdict, LogError> {
        let table = self.stratify()?;
        let (mut v, reg) = base_verdict(&table, self.characteristic)?;
        v.semantics = Some(self.semantics);
        v.zero_ideal_height = Some(self.zero_ideal_height());
        if self.characteristic == 0 {
            finish_char0(&mut v);
        } else {
            let checklist = self.char_p_checklist(&table, reg.dimensionally_regular)?;
            finish_char_p(&mut v, checklist);
            if self.semantics == Semantics::Image {
                v.warnings.push("the positive-characteristic checklist uses the associated log structure".into());
            }
        }
        if self.nonzero.len() == self.images.len() {
            let other = self.semantics.other();
            let alt = self.stratify_with(other)?;
            let differing: Vec<String> = table
                .components
                .iter()
                .filter(|c| alt.get(&c.label).is_some_and(|a| a.rank != c.rank))
                .map(|c| c.label.clone())
                .collect();
            if !differing.is_empty() {
                let alt_regular = dimensional_regularity(&alt)?.dimensionally_regular;
                v.warnings.push(format!(
                    "rank semantics disagree on {}; under {other} semantics the scheme is {}",
                    differing.join(", "),
                    if alt_regular { "dimensionally regular" } else { "not dimensionally regular" }
                ));
            }
        }
        Ok(v)
    }

    /// Orbit pairs `G ⊂ F` where `G` is a codimension-one stratum component
    /// inside the closure of `F` with rank one higher.
    fn codimension_one_pairs(&self, table: &StratumTable) -> Vec<(Face, Face)> {
        let faces = self.ambient.faces();
        let rank_of = |f: &Face| table.get(&self.ambient.label(&f.generators)).map(|c| c.rank);
        let mut pairs = Vec::new();
        for f in faces {
            for g in faces {
                if g.generators != f.generators
                    && g.is_subface_of(f)
                    && g.gp_rank + 1 == f.gp_rank
                    && rank_of(g).zip(rank_of(f)).is_some_and(|(a, b)| a == b + 1)
                {
                    pairs.push((g.clone(), f.clone()));
                }
            }
        }
        pairs
    }

    fn char_p_checklist(&self, table: &StratumTable, regular: bool) -> Result<CharPChecklist, LogError> {
        let p = self.characteristic as i64;
        let mut items = Vec::new();
        for (g, f) in self.codimension_one_pairs(table) {
            let location = format!("{} in {}", self.ambient.label(&g.generators), self.ambient.label(&f.generators));
            let sf = self.units_at(&f);
            let sg = self.units_at(&g);
            let group = relative_group(self.chart.gp(), self.chart.images(), &sf, &sg);
            items.push(CheckItem {
                condition: "rank-one".into(),
                location: location.clone(),
                holds: group.rank == 1,
                detail: format!("units gained along the divisor form {group}"),
            });
            items.push(CheckItem {
                condition: "no-p-torsion".into(),
                location: location.clone(),
                holds: !group.has_p_torsion(p),
                detail: format!("units gained along the divisor form {group}"),
            });
            let vals = self.valuations(&g, &f, &sf);
            let holds = vals.iter().any(|v| v % p != 0);
            items.push(CheckItem {
                condition: "not-in-pN".into(),
                location,
                holds,
                detail: if holds {
                    format!("chart valuations {vals:?} not all divisible by {p}")
                } else {
                    "chart image lies in pN".into()
                },
            });
        }
        let checked_conditions_hold = regular && items.iter().all(|i| i.holds);
        Ok(CharPChecklist {
            p: self.characteristic,
            dimensionally_regular: regular,
            items,
            checked_conditions_hold,
            unchecked: vec![UNCHECKED_NORMALITY.into()],
        })
    }

    /// Orders of vanishing along `g` of the chart monomials that are units on `f`.
    fn valuations(&self, g: &Face, f: &Face, sf: &[usize]) -> Vec<i64> {
        let k = f.generators.len();
        let imgs: Vec<Vec<i64>> = f.generators.iter().map(|&i| self.ambient.image(i).to_vec()).collect();
        let mut rels = crate::monoid::relation_lattice_of(self.ambient.gp(), &imgs);
        for (pos, i) in f.generators.iter().enumerate() {
            if g.contains(*i) {
                let mut e = vec![0; k];
                e[pos] = 1;
                rels.push(e);
            }
        }
        let q = Quotient::new(k, &rels);
        let mut v: Vec<i64> = (0..k)
            .map(|pos| {
                let mut e = vec![0; k];
                e[pos] = 1;
                q.project(&e).first().copied().unwrap_or(0)
            })
            .collect();
        if v.iter().any(|&x| x < 0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        sf.iter()
            .filter_map(|&s| self.exponents[s].as_ref())
            .map(|e| f.generators.iter().enumerate().map(|(pos, &i)| e[i] * v[pos]).sum::<i64>())
            .filter(|&x| x != 0)
            .collect()
    }
}

/// `⟨S_F⟩ / ⟨S_G⟩` inside a group, for generator subsets `sg ⊆ sf`.
fn relative_group(gp: &FGAbelianGroup, images: &[Vec<i64>], sf: &[usize], sg: &[usize]) -> FGAbelianGroup {
    let k = sf.len();
    let imgs: Vec<Vec<i64>> = sf.iter().map(|&i| images[i].clone()).collect();
    let mut rels = crate::monoid::relation_lattice_of(gp, &imgs);
    for (pos, i) in sf.iter().enumerate() {
        if sg.contains(i) {
            let mut e = vec![0; k];
            e[pos] = 1;
            rels.push(e);
        }
    }
    Quotient::new(k, &rels).group
}
