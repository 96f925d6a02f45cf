//! Fine commutative monoids realized inside their group completions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{CapExceeded, Cone};
use crate::lattice::{
    canonicalize_images, group_quotient, lattice_basis, left_kernel, solve_left, subgroup, FGAbelianGroup, Matrix,
    Quotient, SubgroupMembership,
};

/// Default per-coordinate cap for lattice point searches.
pub const DEFAULT_CAP: i64 = 64;
/// Default node budget for membership searches.
pub const DEFAULT_MEMBERSHIP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("cap exceeded: {0}")]
    Cap(#[from] CapExceeded),
    #[error("search budget of {0} exceeded")]
    Budget(u64),
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("map does not respect relation `{0}`")]
    MapViolation(String),
}

/// An additive word `2x + y` in named generators. The empty word is `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub terms: Vec<(String, u64)>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Word {
    pub fn zero() -> Word {
        Word::default()
    }

    pub fn generator(name: &str) -> Word {
        Word { terms: vec![(name.to_string(), 1)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, k)| *k == 0)
    }

    /// Parses `x + 2y`, `2*x`, or `0`. Repeated names are merged.
    pub fn parse(text: &str) -> Result<Word, MonoidError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(MonoidError::Syntax { offset: 0, message: "empty word".into() });
        }
        if trimmed == "0" {
            return Ok(Word::zero());
        }
        let mut terms: Vec<(String, u64)> = Vec::new();
        let mut offset = 0;
        for piece in text.split('+') {
            let lead = piece.len() - piece.trim_start().len();
            let term = piece.trim();
            let at = offset + lead;
            offset += piece.len() + 1;
            if term.is_empty() {
                return Err(MonoidError::Syntax { offset: at - lead, message: "missing term".into() });
            }
            let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
            let (coef, rest) = term.split_at(digits);
            let rest = rest.trim_start();
            let rest = rest.strip_prefix('*').map(str::trim_start).unwrap_or(rest);
            let k: u64 = if coef.is_empty() {
                1
            } else {
                coef.parse()
                    .map_err(|_| MonoidError::Syntax { offset: at, message: format!("bad multiplicity `{coef}`") })?
            };
            if rest.is_empty() && !coef.is_empty() && k == 0 {
                continue;
            }
            if !is_identifier(rest) {
                return Err(MonoidError::Syntax {
                    offset: at + (term.len() - rest.len()),
                    message: format!("expected a generator name, found `{rest}`"),
                });
            }
            match terms.iter_mut().find(|(n, _)| n == rest) {
                Some(t) => t.1 += k,
                None => terms.push((rest.to_string(), k)),
            }
        }
        terms.retain(|(_, k)| *k > 0);
        Ok(Word { terms })
    }

    /// Exponent vector over `names`.
    pub fn vector(&self, names: &[String]) -> Result<Vec<i64>, MonoidError> {
        let mut v = vec![0i64; names.len()];
        for (name, k) in &self.terms {
            let i = names.iter().position(|n| n == name).ok_or_else(|| MonoidError::UnknownGenerator(name.clone()))?;
            v[i] += *k as i64;
        }
        Ok(v)
    }

    pub fn from_vector(names: &[String], v: &[i64]) -> Word {
        Word { terms: names.iter().zip(v).filter(|(_, &k)| k > 0).map(|(n, &k)| (n.clone(), k as u64)).collect() }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(n, _)| n.as_str())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .filter(|(_, k)| *k > 0)
            .map(|(n, k)| if *k == 1 { n.clone() } else { format!("{k}{n}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// An identity `lhs = rhs` between additive words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(lhs: Word, rhs: Word) -> Relation {
        Relation { lhs, rhs }
    }

    pub fn parse(text: &str) -> Result<Relation, MonoidError> {
        let Some(eq) = text.find('=') else {
            return Err(MonoidError::Syntax { offset: 0, message: "expected `=`".into() });
        };
        let shift = |e: MonoidError, by: usize| match e {
            MonoidError::Syntax { offset, message } => MonoidError::Syntax { offset: offset + by, message },
            other => other,
        };
        if text[eq + 1..].contains('=') {
            return Err(MonoidError::Syntax { offset: eq, message: "more than one `=`".into() });
        }
        let lhs = Word::parse(&text[..eq]).map_err(|e| shift(e, 0))?;
        let rhs = Word::parse(&text[eq + 1..]).map_err(|e| shift(e, eq + 1))?;
        Ok(Relation { lhs, rhs })
    }

    /// `lhs − rhs` as an exponent vector.
    pub fn difference(&self, names: &[String]) -> Result<Vec<i64>, MonoidError> {
        let l = self.lhs.vector(names)?;
        let r = self.rhs.vector(names)?;
        Ok(l.iter().zip(&r).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// A face of a monoid, given by the generators it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub generators: Vec<usize>,
    /// Rank of the subgroup generated by the face.
    pub gp_rank: usize,
    /// The subgroup generated by the face.
    pub gp: FGAbelianGroup,
}

impl Face {
    pub fn contains(&self, i: usize) -> bool {
        self.generators.contains(&i)
    }

    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.generators.iter().all(|i| other.generators.contains(i))
    }
}

#[derive(Clone, Debug)]
struct Structure {
    cone: Cone,
    faces: Vec<Face>,
    units: Vec<usize>,
    grading: Vec<i64>,
    unit_group: SubgroupMembership,
}

/// A fine monoid: generators inside a finitely generated abelian group.
#[derive(Clone, Debug)]
pub struct AffineMonoid {
    gp: FGAbelianGroup,
    names: Vec<String>,
    images: Vec<Vec<i64>>,
    presentation: Vec<Relation>,
    structure: OnceLock<Structure>,
}

impl PartialEq for AffineMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.gp == other.gp && self.names == other.names && self.images == other.images
    }
}

fn check_names(names: &[String]) -> Result<(), MonoidError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !is_identifier(n) {
            return Err(MonoidError::Malformed(format!("`{n}` is not a valid generator name")));
        }
        if !seen.insert(n) {
            return Err(MonoidError::Malformed(format!("generator `{n}` declared twice")));
        }
    }
    Ok(())
}

impl AffineMonoid {
    /// Integral monoid presented by generators and additive relations.
    pub fn from_presentation(names: &[String], relations: &[Relation]) -> Result<AffineMonoid, MonoidError> {
        if names.is_empty() && !relations.is_empty() {
            return Err(MonoidError::Malformed("relations given without generators".into()));
        }
        check_names(names)?;
        let n = names.len();
        let diffs = relations.iter().map(|r| r.difference(names)).collect::<Result<Vec<_>, _>>()?;
        let q = Quotient::new(n, &diffs);
        let mut images: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                q.project(&e)
            })
            .collect();
        canonicalize_images(&q.group, &mut images);
        Ok(AffineMonoid {
            gp: q.group,
            names: names.to_vec(),
            images,
            presentation: relations.to_vec(),
            structure: OnceLock::new(),
        })
    }

    /// Monoid generated by given elements of `gp`. The stored presentation is
    /// read off from a basis of the relation lattice.
    pub fn from_images(
        gp: FGAbelianGroup,
        names: Vec<String>,
        images: Vec<Vec<i64>>,
    ) -> Result<AffineMonoid, MonoidError> {
        check_names(&names)?;
        if names.len() != images.len() {
            return Err(MonoidError::Malformed("one image per generator required".into()));
        }
        if images.iter().any(|v| v.len() != gp.dim()) {
            return Err(MonoidError::Malformed("image length does not match the group".into()));
        }
        let images: Vec<Vec<i64>> = images.into_iter().map(|v| gp.reduce(v)).collect();
        let mut m = AffineMonoid { gp, names, images, presentation: Vec::new(), structure: OnceLock::new() };
        m.presentation = m
            .relation_lattice()
            .iter()
            .map(|v| {
                let pos: Vec<i64> = v.iter().map(|&c| c.max(0)).collect();
                let neg: Vec<i64> = v.iter().map(|&c| (-c).max(0)).collect();
                Relation::new(Word::from_vector(&m.names, &pos), Word::from_vector(&m.names, &neg))
            })
            .collect();
        Ok(m)
    }

    /// Convenience constructor from string slices and relation strings.
    pub fn parse(names: &[&str], relations: &[&str]) -> Result<AffineMonoid, MonoidError> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let rels = relations.iter().map(|r| Relation::parse(r)).collect::<Result<Vec<_>, _>>()?;
        AffineMonoid::from_presentation(&names, &rels)
    }

    /// The free monoid `ℕⁿ` on the given names.
    pub fn free(names: &[&str]) -> AffineMonoid {
        AffineMonoid::parse(names, &[]).expect("valid names")
    }

    pub fn gp(&self) -> &FGAbelianGroup {
        &self.gp
    }

    /// Group completion with generator images.
    pub fn group_completion(&self) -> (&FGAbelianGroup, &[Vec<i64>]) {
        (&self.gp, &self.images)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn images(&self) -> &[Vec<i64>] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &[i64] {
        &self.images[i]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn presentation(&self) -> &[Relation] {
        &self.presentation
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Element of `gp` named by a word.
    pub fn evaluate(&self, word: &Word) -> Result<Vec<i64>, MonoidError> {
        let v = word.vector(&self.names)?;
        Ok(self.combine(&v))
    }

    /// `Σ vᵢ·gᵢ` in `gp`.
    pub fn combine(&self, v: &[i64]) -> Vec<i64> {
        let mut acc = self.gp.zero();
        for (k, img) in v.iter().zip(&self.images) {
            if *k != 0 {
                for (a, b) in acc.iter_mut().zip(img) {
                    *a += k * b;
                }
            }
        }
        self.gp.reduce(acc)
    }

    /// Basis of the lattice of integer relations among the generators.
    pub fn relation_lattice(&self) -> Vec<Vec<i64>> {
        relation_lattice_of(&self.gp, &self.images)
    }

    /// Subgroup of `gp` generated by a subset of the generators.
    pub fn subgroup_of(&self, indices: &[usize]) -> FGAbelianGroup {
        let gens: Vec<Vec<i64>> = indices.iter().map(|&i| self.images[i].clone()).collect();
        subgroup(&self.gp, &gens)
    }

    /// Label `{x,y}` for a set of generators.
    pub fn label(&self, indices: &[usize]) -> String {
        let names: Vec<&str> = indices.iter().map(|&i| self.names[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Kernel of `ℤⁿ → G` sending `eᵢ` to `images[i]`.
pub(crate) fn relation_lattice_of(gp: &FGAbelianGroup, images: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = images.len();
    if n == 0 {
        return Vec::new();
    }
    let mut rows = images.to_vec();
    rows.extend(gp.torsion_relations());
    if gp.dim() == 0 {
        return (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
    }
    let ker = left_kernel(&Matrix::from_rows(gp.dim(), &rows));
    let vs: Vec<Vec<i64>> = ker.into_iter().map(|v| v[..n].to_vec()).collect();
    lattice_basis(n, &vs)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Result of [`AffineMonoid::saturate`].
#[derive(Clone, Debug)]
pub struct Saturation {
    pub monoid: AffineMonoid,
    pub was_saturated: bool,
    /// Names of the generators that had to be adjoined.
    pub adjoined: Vec<String>,
}

/// An ideal generated by finitely many elements of the monoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidIdeal {
    pub generators: Vec<Vec<i64>>,
}

/// The pointed monoid `(P − I) ∪ {∞}`.
#[derive(Clone, Debug)]
pub struct PointedQuotient {
    /// Generators of `P` outside the ideal.
    pub surviving: Vec<usize>,
    pub is_prime: bool,
    /// When the ideal is prime, the face `P − I`.
    pub face: Option<Face>,
    /// Nonzero classes of degree at most the requested bound.
    pub classes: Vec<Vec<i64>>,
}

/// Kernel and cokernel of the induced map of group completions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpMapInvariants {
    pub kernel: FGAbelianGroup,
    pub cokernel: FGAbelianGroup,
    pub is_isogeny: bool,
    pub notes: Vec<String>,
}

impl AffineMonoid {
    fn structure(&self) -> &Structure {
        self.structure.get_or_init(|| {
            let r = self.gp.rank;
            let free: Vec<Vec<i64>> = self.images.iter().map(|v| v[..r].to_vec()).collect();
            let cone = Cone::new(r, free);
            let faces = cone
                .faces()
                .into_iter()
                .map(|generators| {
                    let gp = self.subgroup_of(&generators);
                    Face { gp_rank: gp.rank, gp, generators }
                })
                .collect();
            let units = cone.lineality();
            let grading = cone.grading();
            let unit_images: Vec<Vec<i64>> = units.iter().map(|&i| self.images[i].clone()).collect();
            let unit_group = SubgroupMembership::new(&self.gp, &unit_images);
            Structure { cone, faces, units, grading, unit_group }
        })
    }

    pub fn cone(&self) -> &Cone {
        &self.structure().cone
    }

    /// All faces, smallest first. The first is the unit face, the last is `P`.
    pub fn faces(&self) -> &[Face] {
        &self.structure().faces
    }

    pub fn face_lattice(&self) -> &[Face] {
        self.faces()
    }

    pub fn unit_face(&self) -> &Face {
        &self.faces()[0]
    }

    /// Generators that are units.
    pub fn units(&self) -> &[usize] {
        &self.structure().units
    }

    pub fn is_sharp(&self) -> bool {
        self.unit_face().gp.is_trivial()
    }

    /// The face whose generator set is exactly `indices`, if any.
    pub fn face_with(&self, indices: &[usize]) -> Option<&Face> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.faces().iter().find(|f| f.generators == sorted)
    }

    /// Smallest face containing the given generators.
    pub fn face_closure(&self, indices: &[usize]) -> &Face {
        self.faces().iter().find(|f| indices.iter().all(|i| f.contains(*i))).expect("P itself is a face")
    }

    pub fn contains(&self, g: &[i64]) -> Result<bool, MonoidError> {
        self.contains_with_budget(g, DEFAULT_MEMBERSHIP_BUDGET)
    }

    /// Whether `g ∈ gp` is a nonnegative combination of the generators.
    ///
    /// Non-unit generators are chosen by a search bounded by a grading that
    /// is positive on them; the remainder must lie in the unit group.
    pub fn contains_with_budget(&self, g: &[i64], budget: u64) -> Result<bool, MonoidError> {
        let s = self.structure();
        let r = self.gp.rank;
        let g = self.gp.reduce(g.to_vec());
        if !s.cone.contains(&g[..r]) {
            return Ok(false);
        }
        let level = dot(&s.grading, &g[..r]);
        let movers: Vec<(usize, i64)> = (0..self.len())
            .filter(|i| !s.units.contains(i))
            .map(|i| (i, dot(&s.grading, &self.images[i][..r])))
            .collect();
        debug_assert!(movers.iter().all(|(_, l)| *l > 0));
        let mut nodes = 0u64;
        self.search(&movers, 0, level, g, &mut nodes, budget)
    }

    fn search(
        &self,
        movers: &[(usize, i64)],
        idx: usize,
        remaining: i64,
        residual: Vec<i64>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool, MonoidError> {
        *nodes += 1;
        if *nodes > budget {
            return Err(MonoidError::Budget(budget));
        }
        if idx == movers.len() {
            return Ok(remaining == 0 && self.structure().unit_group.contains(&residual));
        }
        if remaining == 0 {
            return Ok(self.structure().unit_group.contains(&residual));
        }
        let (gen, lvl) = movers[idx];
        let mut res = residual;
        let mut rem = remaining;
        loop {
            if self.search(movers, idx + 1, rem, res.clone(), nodes, budget)? {
                return Ok(true);
            }
            if rem < lvl {
                return Ok(false);
            }
            rem -= lvl;
            res = self.gp.sub(&res, &self.images[gen]);
        }
    }

    fn fresh_name(&self, used: &BTreeSet<String>, prefix: &str, k: &mut usize) -> String {
        loop {
            *k += 1;
            let name = format!("{prefix}{k}");
            if !used.contains(&name) {
                return name;
            }
        }
    }

    /// `P^sat`: all `g ∈ gp` with some positive multiple in `P`.
    ///
    /// The free directions come from lattice generators of the cone of
    /// free parts. The whole torsion subgroup is adjoined exactly, since a
    /// torsion element always has a multiple equal to `0 ∈ P`.
    pub fn saturate(&self, cap: i64) -> Result<Saturation, MonoidError> {
        let r = self.gp.rank;
        let hb = self.cone().lattice_generators(cap)?;
        let mut candidates: Vec<(&str, Vec<i64>)> = Vec::new();
        for (j, _) in self.gp.invariant_factors.iter().enumerate() {
            let mut e = self.gp.zero();
            e[r + j] = 1;
            candidates.push(("t", e));
        }
        for h in hb {
            let mut e = h;
            e.resize(self.gp.dim(), 0);
            candidates.push(("h", e));
        }
        let mut used: BTreeSet<String> = self.names.iter().cloned().collect();
        let mut names = self.names.clone();
        let mut images = self.images.clone();
        let mut adjoined = Vec::new();
        let (mut kt, mut kh) = (0, 0);
        for (prefix, e) in candidates {
            if self.contains(&e)? {
                continue;
            }
            let k = if prefix == "t" { &mut kt } else { &mut kh };
            let name = self.fresh_name(&used, prefix, k);
            used.insert(name.clone());
            names.push(name.clone());
            images.push(e);
            adjoined.push(name);
        }
        let was_saturated = adjoined.is_empty();
        let monoid =
            if was_saturated { self.clone() } else { AffineMonoid::from_images(self.gp.clone(), names, images)? };
        Ok(Saturation { monoid, was_saturated, adjoined })
    }

    /// Drops generators lying in the monoid generated by the others,
    /// scanning from the last generator to the first.
    pub fn reduced(&self) -> Result<AffineMonoid, MonoidError> {
        let mut keep: Vec<usize> = (0..self.len()).collect();
        for i in (0..self.len()).rev() {
            let others: Vec<usize> = keep.iter().copied().filter(|&k| k != i).collect();
            let sub = AffineMonoid::from_images(
                self.gp.clone(),
                others.iter().map(|&k| self.names[k].clone()).collect(),
                others.iter().map(|&k| self.images[k].clone()).collect(),
            )?;
            if sub.contains(&self.images[i])? {
                keep = others;
            }
        }
        if keep.len() == self.len() {
            return Ok(self.clone());
        }
        AffineMonoid::from_images(
            self.gp.clone(),
            keep.iter().map(|&k| self.names[k].clone()).collect(),
            keep.iter().map(|&k| self.images[k].clone()).collect(),
        )
    }

    /// Whether every `g ∈ gp` with `p·g ∈ P` already lies in `P`.
    ///
    /// The set of such `g` is generated over `P` by the solutions of
    /// `p·h = Σ sₖ gₖ` with `0 ≤ sₖ < p`, so only those are tested.
    pub fn is_p_power_saturated(&self, p: i64, budget: u64) -> Result<bool, MonoidError> {
        let n = self.len();
        let total = (p as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if total > budget {
            return Err(MonoidError::Budget(budget));
        }
        let mut s = vec![0i64; n];
        loop {
            let v = self.combine(&s);
            for h in self.divide(&v, p) {
                if !self.contains(&h)? {
                    return Ok(false);
                }
            }
            let mut i = 0;
            while i < n {
                s[i] += 1;
                if s[i] < p {
                    break;
                }
                s[i] = 0;
                i += 1;
            }
            if i == n {
                return Ok(true);
            }
        }
    }

    /// All `h ∈ gp` with `p·h = v`.
    fn divide(&self, v: &[i64], p: i64) -> Vec<Vec<i64>> {
        let r = self.gp.rank;
        if v[..r].iter().any(|c| c % p != 0) {
            return Vec::new();
        }
        let mut sols: Vec<Vec<i64>> = vec![v[..r].iter().map(|c| c / p).collect()];
        for (j, &d) in self.gp.invariant_factors.iter().enumerate() {
            let b = v[r + j];
            let g = p.gcd(&d);
            if b % g != 0 {
                return Vec::new();
            }
            let (pp, dd) = (p / g, d / g);
            let inv = crate::lattice::mod_inverse(pp.rem_euclid(dd), dd).unwrap_or(0);
            let x0 = ((b / g) * inv).rem_euclid(dd);
            let mut next = Vec::new();
            for s in &sols {
                for k in 0..g {
                    let mut t = s.clone();
                    t.push((x0 + k * dd).rem_euclid(d));
                    next.push(t);
                }
            }
            sols = next;
        }
        sols
    }

    /// `P / P*`: the quotient by the unit group.
    pub fn sharp_quotient(&self) -> AffineMonoid {
        let units = self.units().to_vec();
        if units.is_empty() {
            return self.clone();
        }
        let unit_images: Vec<Vec<i64>> = units.iter().map(|&i| self.images[i].clone()).collect();
        let q = group_quotient(&self.gp, &unit_images);
        let keep: Vec<usize> = (0..self.len()).filter(|i| !units.contains(i)).collect();
        let mut images: Vec<Vec<i64>> = keep.iter().map(|&i| q.project(&self.images[i])).collect();
        canonicalize_images(&q.group, &mut images);
        let names: Vec<String> = keep.iter().map(|&i| self.names[i].clone()).collect();
        let strip = |w: &Word| Word { terms: w.terms.iter().filter(|(n, _)| names.contains(n)).cloned().collect() };
        let mut presentation: Vec<Relation> = Vec::new();
        for rel in &self.presentation {
            let r = Relation::new(strip(&rel.lhs), strip(&rel.rhs));
            let trivial = r.difference(&names).map(|d| d.iter().all(|&c| c == 0)).unwrap_or(true);
            if !trivial && !presentation.contains(&r) {
                presentation.push(r);
            }
        }
        AffineMonoid { gp: q.group, names, images, presentation, structure: OnceLock::new() }
    }

    pub fn ideal(&self, words: &[Word]) -> Result<MonoidIdeal, MonoidError> {
        let generators = words.iter().map(|w| self.evaluate(w)).collect::<Result<Vec<_>, _>>()?;
        let ideal = MonoidIdeal { generators };
        self.check_ideal(&ideal)?;
        Ok(ideal)
    }

    fn check_ideal(&self, ideal: &MonoidIdeal) -> Result<(), MonoidError> {
        for e in &ideal.generators {
            if e.len() != self.gp.dim() || !self.contains(e)? {
                return Err(MonoidError::NotAnIdeal(format!("generator {e:?} is not an element of the monoid")));
            }
        }
        Ok(())
    }

    pub fn in_ideal(&self, ideal: &MonoidIdeal, x: &[i64]) -> Result<bool, MonoidError> {
        for e in &ideal.generators {
            if self.contains(&self.gp.sub(x, e))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The pointed monoid `P − I` with an absorbing zero. Classes are listed
    /// up to `degree_bound` generators per element.
    pub fn quotient_by_ideal(&self, ideal: &MonoidIdeal, degree_bound: u32) -> Result<PointedQuotient, MonoidError> {
        self.check_ideal(ideal)?;
        let mut surviving = Vec::new();
        for i in 0..self.len() {
            if !self.in_ideal(ideal, &self.images[i])? {
                surviving.push(i);
            }
        }
        let mut face = None;
        if let Some(f) = self.face_with(&surviving) {
            let sub = AffineMonoid::from_images(
                self.gp.clone(),
                f.generators.iter().map(|&k| self.names[k].clone()).collect(),
                f.generators.iter().map(|&k| self.images[k].clone()).collect(),
            )?;
            let mut meets = false;
            for e in &ideal.generators {
                if sub.contains(e)? {
                    meets = true;
                    break;
                }
            }
            if !meets {
                face = Some(f.clone());
            }
        }
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut layer: BTreeSet<Vec<i64>> = BTreeSet::from([self.gp.zero()]);
        for _ in 0..=degree_bound {
            let mut next = BTreeSet::new();
            for x in &layer {
                if seen.insert(x.clone()) {
                    for img in &self.images {
                        next.insert(self.gp.add(x, img));
                    }
                }
            }
            layer = next;
        }
        let mut classes = Vec::new();
        for x in seen {
            if !self.in_ideal(ideal, &x)? {
                classes.push(x);
            }
        }
        Ok(PointedQuotient { surviving, is_prime: face.is_some(), face, classes })
    }
}

/// Kernel and cokernel of `source^gp → target^gp` for a homomorphism given
/// by words in the target generators, one per source generator.
pub fn gp_map_invariants(
    source: &AffineMonoid,
    target: &AffineMonoid,
    images: &[Word],
) -> Result<GpMapInvariants, MonoidError> {
    if images.len() != source.len() {
        return Err(MonoidError::Malformed(format!("{} images given for {} generators", images.len(), source.len())));
    }
    let phi = images.iter().map(|w| target.evaluate(w)).collect::<Result<Vec<_>, _>>()?;
    let nq = source.len();
    let tg = target.gp();
    let lq = source.relation_lattice();
    for l in &lq {
        let mut acc = tg.zero();
        for (k, img) in l.iter().zip(&phi) {
            for (a, b) in acc.iter_mut().zip(img) {
                *a += k * b;
            }
        }
        if tg.reduce(acc).iter().any(|&c| c != 0) {
            let pos: Vec<i64> = l.iter().map(|&c| c.max(0)).collect();
            let neg: Vec<i64> = l.iter().map(|&c| (-c).max(0)).collect();
            let rel = Relation::new(Word::from_vector(source.names(), &pos), Word::from_vector(source.names(), &neg));
            return Err(MonoidError::MapViolation(rel.to_string()));
        }
    }
    let cokernel = group_quotient(tg, &phi).group;
    let kernel = if nq == 0 {
        FGAbelianGroup::trivial()
    } else {
        let k_basis: Vec<Vec<i64>> = if tg.dim() == 0 {
            (0..nq)
                .map(|i| {
                    let mut e = vec![0; nq];
                    e[i] = 1;
                    e
                })
                .collect()
        } else {
            let mut rows = phi.clone();
            rows.extend(tg.torsion_relations());
            let ker = left_kernel(&Matrix::from_rows(tg.dim(), &rows));
            let vs: Vec<Vec<i64>> = ker.into_iter().map(|v| v[..nq].to_vec()).collect();
            lattice_basis(nq, &vs)
        };
        if k_basis.is_empty() {
            FGAbelianGroup::trivial()
        } else {
            let km = Matrix::from_rows(nq, &k_basis);
            let rels: Vec<Vec<i64>> =
                lq.iter().map(|l| solve_left(&km, l).expect("relations lie in the kernel")).collect();
            Quotient::new(k_basis.len(), &rels).group
        }
    };
    let is_isogeny = kernel.is_finite() && cokernel.is_finite();
    let mut notes = Vec::new();
    if is_isogeny && !(kernel.is_trivial() && cokernel.is_trivial()) {
        let order = kernel.torsion_order() * cokernel.torsion_order();
        notes.push(format!(
            "finite kernel and cokernel of combined order {order}: the induced map becomes an \
             isomorphism after tensoring with k only in characteristic zero or prime to {order}"
        ));
    }
    Ok(GpMapInvariants { kernel, cokernel, is_isogeny, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_lines() -> AffineMonoid {
        AffineMonoid::parse(&["x", "y"], &["2x = 2y"]).unwrap()
    }

    fn cusp() -> AffineMonoid {
        AffineMonoid::parse(&["u", "v"], &["3u = 2v"]).unwrap()
    }

    #[test]
    fn words_parse() {
        let w = Word::parse("x + 2*y+3z").unwrap();
        assert_eq!(w.to_string(), "x+2y+3z");
        assert!(Word::parse("0").unwrap().is_zero());
        assert!(matches!(Word::parse("x+ "), Err(MonoidError::Syntax { offset: 2, .. })));
        assert!(matches!(Relation::parse("x+ = y"), Err(MonoidError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn presentations() {
        let n = AffineMonoid::free(&["a"]);
        assert_eq!(n.gp(), &FGAbelianGroup::free(1));
        assert_eq!(n.images(), &[vec![1]]);
        let q = two_lines();
        assert_eq!(q.gp().to_string(), "Z + Z/2");
        assert_eq!(q.images(), &[vec![1, 0], vec![1, 1]]);
        let c = cusp();
        assert_eq!(c.gp(), &FGAbelianGroup::free(1));
        assert_eq!(c.images(), &[vec![2], vec![3]]);
        assert!(AffineMonoid::parse(&[], &["0 = 0"]).is_err());
        assert!(AffineMonoid::parse(&["x"], &["x = y"]).is_err());
    }

    #[test]
    fn saturation_examples() {
        let s = cusp().saturate(DEFAULT_CAP).unwrap();
        assert!(!s.was_saturated);
        let r = s.monoid.reduced().unwrap();
        assert_eq!(r.images(), &[vec![1]]);
        let s = two_lines().saturate(DEFAULT_CAP).unwrap();
        assert!(!s.was_saturated);
        assert_eq!(s.adjoined, vec!["t1"]);
        let r = s.monoid.reduced().unwrap();
        assert_eq!(r.names(), &["x", "t1"]);
        assert_eq!(r.images(), &[vec![1, 0], vec![0, 1]]);
        let plane = AffineMonoid::free(&["x", "y"]);
        assert!(plane.saturate(DEFAULT_CAP).unwrap().was_saturated);
    }

    #[test]
    fn face_examples() {
        assert_eq!(AffineMonoid::free(&["x", "y"]).faces().len(), 4);
        assert_eq!(cusp().faces().len(), 2);
        let quad = AffineMonoid::parse(&["x", "y", "z", "w"], &["x+w = y+z"]).unwrap();
        let faces = quad.faces();
        assert_eq!(faces.len(), 10);
        let facets: Vec<String> = faces.iter().filter(|f| f.gp_rank == 2).map(|f| quad.label(&f.generators)).collect();
        assert_eq!(facets, vec!["{x,y}", "{x,z}", "{y,w}", "{z,w}"]);
        for f in faces {
            let q =
                group_quotient(quad.gp(), &f.generators.iter().map(|&i| quad.image(i).to_vec()).collect::<Vec<_>>());
            assert_eq!(f.gp_rank + q.group.rank, quad.gp().rank);
        }
    }

    #[test]
    fn sharp_quotients() {
        let p = AffineMonoid::parse(&["a", "b", "c"], &["a+b = 0"]).unwrap();
        assert_eq!(p.units(), &[0, 1]);
        let s = p.sharp_quotient();
        assert_eq!(s.names(), &["c"]);
        assert_eq!(s.gp(), &FGAbelianGroup::free(1));
        assert!(s.is_sharp());
        let q = two_lines();
        assert!(q.is_sharp());
        assert_eq!(q.sharp_quotient(), q);
    }

    #[test]
    fn ideal_quotients() {
        let n = AffineMonoid::free(&["x"]);
        let i = n.ideal(&[Word::parse("x").unwrap()]).unwrap();
        let pq = n.quotient_by_ideal(&i, 4).unwrap();
        assert!(pq.is_prime);
        assert_eq!(pq.classes, vec![vec![0]]);
        let plane = AffineMonoid::free(&["x", "y"]);
        let i = plane.ideal(&[Word::parse("x").unwrap(), Word::parse("y").unwrap()]).unwrap();
        let pq = plane.quotient_by_ideal(&i, 4).unwrap();
        assert!(pq.is_prime);
        assert_eq!(pq.classes.len(), 1);
        let i = plane.ideal(&[Word::parse("x+y").unwrap()]).unwrap();
        let pq = plane.quotient_by_ideal(&i, 3).unwrap();
        assert!(!pq.is_prime);
        assert_eq!(pq.classes.len(), 7);
        let bad = MonoidIdeal { generators: vec![vec![-1, 0]] };
        assert!(matches!(plane.quotient_by_ideal(&bad, 1), Err(MonoidError::NotAnIdeal(_))));
    }

    #[test]
    fn p_power_saturation() {
        let n = AffineMonoid::free(&["x"]);
        assert!(n.is_p_power_saturated(2, 1000).unwrap());
        assert!(!cusp().is_p_power_saturated(2, 1000).unwrap());
        assert!(two_lines().is_p_power_saturated(3, 1000).unwrap());
        assert!(!two_lines().is_p_power_saturated(2, 1000).unwrap());
    }

    #[test]
    fn map_invariants() {
        let plane = AffineMonoid::free(&["x", "y"]);
        let id = gp_map_invariants(&plane, &plane, &[Word::generator("x"), Word::generator("y")]).unwrap();
        assert!(id.kernel.is_trivial() && id.cokernel.is_trivial() && id.is_isogeny);
        assert!(id.notes.is_empty());
        let line = AffineMonoid::free(&["x"]);
        let frob = gp_map_invariants(&line, &line, &[Word::parse("3x").unwrap()]).unwrap();
        assert!(frob.kernel.is_trivial());
        assert_eq!(frob.cokernel.invariant_factors, vec![3]);
        assert!(frob.is_isogeny);
        assert_eq!(frob.notes.len(), 1);
        let diag = gp_map_invariants(&line, &plane, &[Word::parse("x+y").unwrap()]).unwrap();
        assert_eq!(diag.cokernel.rank, 1);
        assert!(!diag.is_isogeny);
        let collapse = gp_map_invariants(&plane, &line, &[Word::generator("x"), Word::generator("x")]).unwrap();
        assert_eq!(collapse.kernel, FGAbelianGroup::free(1));
        let bad = gp_map_invariants(&two_lines(), &plane, &[Word::generator("x"), Word::generator("y")]);
        assert!(matches!(bad, Err(MonoidError::MapViolation(_))));
        let ok = gp_map_invariants(&two_lines(), &line, &[Word::generator("x"), Word::generator("x")]).unwrap();
        assert_eq!(ok.kernel.invariant_factors, vec![2]);
    }
}
