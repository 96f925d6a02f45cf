//! Brute-force counts of log jets over prime fields, and the stratum-wise
//! closed form they are checked against.
//!
//! Candidates are enumerated by a mixed-radix index. Each base variable (or
//! chart generator) owns `m+1` consecutive digits in base `q`, least
//! significant first, so runs are reproducible and parallel partitions are
//! disjoint ranges of indices.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jets::{jet_presentation, JetInput};
use crate::lattice::group_quotient;
use crate::logmodel::{is_prime, ChartImage, LogError, MonomialLogScheme, Semantics};
use crate::monoid::AffineMonoid;
use crate::poly::{mul_mod, pow_mod, PolyError, Var};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("field size {0} is not a prime")]
    NotPrime(u64),
    #[error("enumeration needs {needed} candidates but the budget is {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error(
        "p-torsion condition fails: {p} divides the torsion of the log group {group} along the orbit of face {face}"
    )]
    Hypothesis { p: u64, face: String, group: String },
    #[error("cannot truncate order-{from} jets to the higher order {to}")]
    Truncation { from: u32, to: u32 },
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Jet(#[from] crate::jets::JetError),
}

/// An element of `F_q[t]/(t^{m+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncatedSeries {
    q: u64,
    coeffs: Vec<u64>,
}

impl TruncatedSeries {
    pub fn new(q: u64, coeffs: Vec<u64>) -> TruncatedSeries {
        assert!(!coeffs.is_empty(), "a series has at least a constant term");
        TruncatedSeries { q, coeffs: coeffs.into_iter().map(|c| c % q).collect() }
    }

    pub fn constant(q: u64, m: u32, c: u64) -> TruncatedSeries {
        let mut coeffs = vec![0; m as usize + 1];
        coeffs[0] = c % q;
        TruncatedSeries { q, coeffs }
    }

    pub fn one(q: u64, m: u32) -> TruncatedSeries {
        TruncatedSeries::constant(q, m, 1)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs[0] != 0
    }

    pub fn is_principal_unit(&self) -> bool {
        self.coeffs[0] == 1
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.q)) % self.q;
            }
        }
        TruncatedSeries { q: self.q, coeffs: out }
    }

    pub fn scale(&self, c: u64) -> TruncatedSeries {
        TruncatedSeries { q: self.q, coeffs: self.coeffs.iter().map(|&a| mul_mod(a, c % self.q, self.q)).collect() }
    }

    pub fn pow(&self, mut e: u64) -> TruncatedSeries {
        let mut base = self.clone();
        let mut acc = TruncatedSeries::one(self.q, self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Reduction modulo `t^{n+1}`.
    pub fn truncate(&self, n: u32) -> TruncatedSeries {
        TruncatedSeries { q: self.q, coeffs: self.coeffs[..=n as usize].to_vec() }
    }

    /// Splits a unit as `a·u` with `a ∈ F_q^*` and `u` a principal unit.
    pub fn unit_split(&self) -> Option<(u64, TruncatedSeries)> {
        if !self.is_unit() {
            return None;
        }
        let a = self.coeffs[0];
        Some((a, self.scale(pow_mod(a, self.q - 2, self.q))))
    }

    /// The principal unit whose higher coefficients are the base-`q` digits
    /// of `index`.
    pub fn principal_unit(q: u64, m: u32, index: u64) -> TruncatedSeries {
        let mut coeffs = vec![1u64];
        coeffs.extend(digits(q, index, m as usize));
        TruncatedSeries { q, coeffs }
    }
}

fn digits(q: u64, mut index: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = index % q;
            index /= q;
            d
        })
        .collect()
}

fn product(q: u64, m: u32, factors: &[TruncatedSeries], exps: &[i64]) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(q, m);
    for (f, &e) in factors.iter().zip(exps) {
        if e > 0 {
            acc = acc.mul(&f.pow(e as u64));
        }
    }
    acc
}

fn scalar_product(q: u64, values: &[u64], exps: &[i64]) -> u64 {
    values.iter().zip(exps).fold(1, |acc, (&a, &e)| if e > 0 { mul_mod(acc, pow_mod(a, e as u64, q), q) } else { acc })
}

/// A k-valued log jet: per chart generator a constant `a` and a principal
/// unit `u`, together with the underlying ordinary jet of the base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogJetPoint {
    pub ordinary: Vec<TruncatedSeries>,
    pub pairs: Vec<(u64, TruncatedSeries)>,
}

impl LogJetPoint {
    pub fn truncate(&self, n: u32) -> LogJetPoint {
        LogJetPoint {
            ordinary: self.ordinary.iter().map(|s| s.truncate(n)).collect(),
            pairs: self.pairs.iter().map(|(a, u)| (*a, u.truncate(n))).collect(),
        }
    }

    pub fn lies_over_origin(&self) -> bool {
        self.ordinary.iter().all(|s| !s.is_unit())
    }
}

/// Result of a count, as emitted to callers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCount {
    pub q: u64,
    pub m: u32,
    pub count: u64,
    pub method: String,
    pub budget_used: u64,
}

fn check_field(q: u64) -> Result<(), OracleError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(OracleError::NotPrime(q))
    }
}

fn space(q: u64, slots: usize, m: u32) -> u128 {
    (q as u128).saturating_pow(slots as u32 * (m + 1))
}

fn reserve(used: &mut u128, extra: u128, budget: u64) -> Result<(), OracleError> {
    *used = used.saturating_add(extra);
    if *used > budget as u128 {
        return Err(OracleError::Budget { needed: *used, budget });
    }
    Ok(())
}

fn decode_pairs(q: u64, m: u32, n: usize, index: u64) -> Vec<(u64, TruncatedSeries)> {
    let per = space(q, 1, m) as u64;
    let mut rest = index;
    (0..n)
        .map(|_| {
            let block = rest % per;
            rest /= per;
            (block % q, TruncatedSeries::principal_unit(q, m, block / q))
        })
        .collect()
}

fn decode_jet(q: u64, m: u32, n: usize, index: u64) -> Vec<TruncatedSeries> {
    let per = space(q, 1, m) as u64;
    let mut rest = index;
    (0..n)
        .map(|_| {
            let block = rest % per;
            rest /= per;
            TruncatedSeries { q, coeffs: digits(q, block, m as usize + 1) }
        })
        .collect()
}

struct RelationExponents {
    lhs: Vec<i64>,
    rhs: Vec<i64>,
}

fn relation_exponents(p: &AffineMonoid) -> Vec<RelationExponents> {
    p.presentation()
        .iter()
        .map(|r| RelationExponents {
            lhs: r.lhs.vector(p.names()).expect("validated presentation"),
            rhs: r.rhs.vector(p.names()).expect("validated presentation"),
        })
        .collect()
}

fn pairs_respect(q: u64, m: u32, rels: &[RelationExponents], pairs: &[(u64, TruncatedSeries)]) -> bool {
    let a: Vec<u64> = pairs.iter().map(|(a, _)| *a).collect();
    let u: Vec<TruncatedSeries> = pairs.iter().map(|(_, u)| u.clone()).collect();
    rels.iter().all(|r| {
        scalar_product(q, &a, &r.lhs) == scalar_product(q, &a, &r.rhs)
            && product(q, m, &u, &r.lhs) == product(q, m, &u, &r.rhs)
    })
}

/// Counts assignments `generator ↦ (a, u)` of the standard chart of `p`
/// that respect every relation of its presentation.
pub fn enumerate_log_jets(p: &AffineMonoid, q: u64, m: u32, budget: u64) -> Result<OracleCount, OracleError> {
    check_field(q)?;
    let total = space(q, p.len(), m);
    reserve(&mut 0, total, budget)?;
    let rels = relation_exponents(p);
    let n = p.len();
    let count =
        (0..total as u64).into_par_iter().filter(|&i| pairs_respect(q, m, &rels, &decode_pairs(q, m, n, i))).count()
            as u64;
    Ok(OracleCount { q, m, count, method: "enumeration".into(), budget_used: total as u64 })
}

/// The points counted by [`enumerate_log_jets`], in enumeration order.
pub fn enumerate_log_jet_points(
    p: &AffineMonoid,
    q: u64,
    m: u32,
    budget: u64,
) -> Result<Vec<LogJetPoint>, OracleError> {
    check_field(q)?;
    let total = space(q, p.len(), m);
    reserve(&mut 0, total, budget)?;
    let rels = relation_exponents(p);
    let n = p.len();
    Ok((0..total as u64)
        .map(|i| decode_pairs(q, m, n, i))
        .filter(|pairs| pairs_respect(q, m, &rels, pairs))
        .map(|pairs| LogJetPoint { ordinary: pairs.iter().map(|(a, u)| u.scale(*a)).collect(), pairs })
        .collect())
}

/// Whether a list of base series satisfies the presentation of `p`.
pub fn is_ordinary_jet(p: &AffineMonoid, jet: &[TruncatedSeries]) -> bool {
    let (q, m) = (jet[0].q, jet[0].order());
    relation_exponents(p).iter().all(|r| product(q, m, jet, &r.lhs) == product(q, m, jet, &r.rhs))
}

enum Lift {
    Unique(u64, TruncatedSeries),
    Free,
}

/// Log jets of an arbitrary monomial log scheme: ordinary jets of the base
/// together with every compatible choice of `(a, u)` per chart generator.
pub fn enumerate_scheme_points(
    scheme: &MonomialLogScheme,
    q: u64,
    m: u32,
    budget: u64,
) -> Result<(Vec<LogJetPoint>, u64), OracleError> {
    check_field(q)?;
    let p = scheme.ambient();
    let mut used = 0u128;
    reserve(&mut used, space(q, p.len(), m), budget)?;
    let base_rels = relation_exponents(p);
    let chart_rels = relation_exponents(scheme.chart());
    let mut points = Vec::new();
    for i in 0..space(q, p.len(), m) as u64 {
        let jet = decode_jet(q, m, p.len(), i);
        if !base_rels.iter().all(|r| product(q, m, &jet, &r.lhs) == product(q, m, &jet, &r.rhs)) {
            continue;
        }
        let mut lifts = Vec::new();
        for (img, exps) in scheme.images().iter().zip(scheme.exponents()) {
            let lift = match (img, exps) {
                (ChartImage::Monomial(_), Some(e)) => {
                    let s = product(q, m, &jet, e);
                    if let Some((a, u)) = s.unit_split() {
                        Some(Lift::Unique(a, u))
                    } else if s.is_zero() {
                        Some(Lift::Free)
                    } else {
                        None
                    }
                }
                _ => Some(Lift::Free),
            };
            match lift {
                Some(l) => lifts.push(l),
                None => break,
            }
        }
        if lifts.len() < scheme.images().len() {
            continue;
        }
        let free: Vec<usize> =
            lifts.iter().enumerate().filter(|(_, l)| matches!(l, Lift::Free)).map(|(k, _)| k).collect();
        let choices = (q as u128).saturating_pow(m * free.len() as u32);
        reserve(&mut used, choices, budget)?;
        for c in 0..choices as u64 {
            let us = decode_units(q, m, free.len(), c);
            let mut it = us.into_iter();
            let pairs: Vec<(u64, TruncatedSeries)> = lifts
                .iter()
                .map(|l| match l {
                    Lift::Unique(a, u) => (*a, u.clone()),
                    Lift::Free => (0, it.next().expect("one unit per free slot")),
                })
                .collect();
            if pairs_respect(q, m, &chart_rels, &pairs) {
                points.push(LogJetPoint { ordinary: jet.clone(), pairs });
            }
        }
    }
    Ok((points, used as u64))
}

fn decode_units(q: u64, m: u32, n: usize, index: u64) -> Vec<TruncatedSeries> {
    let per = (q as u128).pow(m) as u64;
    let mut rest = index;
    (0..n)
        .map(|_| {
            let block = rest % per;
            rest /= per;
            TruncatedSeries::principal_unit(q, m, block)
        })
        .collect()
}

/// `Σ_F |J_m(O_F)(F_q)| · q^{m·rank(F)}` over the orbits `O_F` of the
/// ambient monoid. Jets of an orbit are solutions of the ordinary jet
/// presentation whose constant terms are units exactly on `F`, and along
/// which every chart monomial that is not a unit on `F` vanishes.
pub fn closed_form_count(scheme: &MonomialLogScheme, q: u64, m: u32, budget: u64) -> Result<OracleCount, OracleError> {
    check_field(q)?;
    let p = scheme.ambient();
    let chart = scheme.chart();
    for face in p.faces() {
        let units = scheme.units_at(face);
        let gens: Vec<Vec<i64>> = units.iter().map(|&i| chart.image(i).to_vec()).collect();
        let group = group_quotient(chart.gp(), &gens).group;
        if group.has_p_torsion(q as i64) {
            return Err(OracleError::Hypothesis { p: q, face: p.label(&face.generators), group: group.to_string() });
        }
    }
    let input = JetInput::from_scheme(scheme);
    let pres = jet_presentation(&input.base, &input.relations, m)?;
    let n = p.len();
    let per_face = space(q, n, m);
    let mut used = 0u128;
    let mut count = 0u64;
    for face in p.faces() {
        reserve(&mut used, per_face, budget)?;
        let units = scheme.units_at(face);
        let vanishing: Vec<&Vec<i64>> = scheme
            .nonzero_generators()
            .iter()
            .filter(|i| !units.contains(i))
            .map(|&i| scheme.exponents()[i].as_ref().expect("nonzero image"))
            .collect();
        let jets = (0..per_face as u64)
            .into_par_iter()
            .map(|i| -> Result<bool, PolyError> {
                let jet = decode_jet(q, m, n, i);
                if (0..n).any(|k| jet[k].is_unit() != face.contains(k)) {
                    return Ok(false);
                }
                for r in &pres.relations {
                    if r.eval_mod(q, |v: Var| jet[v.index].coeffs[v.order as usize])? != 0 {
                        return Ok(false);
                    }
                }
                Ok(vanishing.iter().all(|e| product(q, m, &jet, e).is_zero()))
            })
            .try_fold(|| 0u64, |acc, ok| ok.map(|ok| acc + ok as u64))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        let rank = scheme.rank_at_face_with(face, Semantics::Associated) as u32;
        count += jets * q.pow(m * rank);
    }
    Ok(OracleCount { q, m, count, method: "closed-form".into(), budget_used: used as u64 })
}

/// Order-`n` log jets versus the image of order-`m` log jets under truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationImage {
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub full_fiber: u64,
    pub image: u64,
    pub full_fiber_over_origin: u64,
    pub image_over_origin: u64,
    pub budget_used: u64,
}

impl TruncationImage {
    pub fn collapses_over_origin(&self) -> bool {
        self.image_over_origin < self.full_fiber_over_origin
    }
}

pub fn truncation_image_count(
    scheme: &MonomialLogScheme,
    q: u64,
    m: u32,
    n: u32,
    budget: u64,
) -> Result<TruncationImage, OracleError> {
    if n > m {
        return Err(OracleError::Truncation { from: m, to: n });
    }
    let (high, used_high) = enumerate_scheme_points(scheme, q, m, budget)?;
    let (low, used_low) = enumerate_scheme_points(scheme, q, n, budget.saturating_sub(used_high))?;
    let image: HashSet<LogJetPoint> = high.iter().map(|pt| pt.truncate(n)).collect();
    Ok(TruncationImage {
        q,
        m,
        n,
        full_fiber: low.len() as u64,
        image: image.len() as u64,
        full_fiber_over_origin: low.iter().filter(|pt| pt.lies_over_origin()).count() as u64,
        image_over_origin: image.iter().filter(|pt| pt.lies_over_origin()).count() as u64,
        budget_used: used_high + used_low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::Word;

    fn standard(names: &[&str], rels: &[&str]) -> MonomialLogScheme {
        MonomialLogScheme::standard(AffineMonoid::parse(names, rels).unwrap(), 0).unwrap()
    }

    fn line_chart(image: &str) -> MonomialLogScheme {
        let line = AffineMonoid::free(&["x"]);
        let chart = AffineMonoid::free(&["p"]);
        MonomialLogScheme::new(
            line,
            chart,
            vec![ChartImage::Monomial(Word::parse(image).unwrap())],
            0,
            Semantics::Associated,
        )
        .unwrap()
    }

    #[test]
    fn series_arithmetic() {
        let s = TruncatedSeries::new(3, vec![2, 1, 0]);
        assert_eq!(s.mul(&s).coeffs(), &[1, 1, 1]);
        assert_eq!(s.pow(3).coeffs(), &[2, 0, 0]);
        let (a, u) = s.unit_split().unwrap();
        assert_eq!((a, u.coeffs()), (2, &[1, 2, 0][..]));
        assert!(TruncatedSeries::new(3, vec![0, 1]).unit_split().is_none());
        assert_eq!(TruncatedSeries::principal_unit(3, 2, 5).coeffs(), &[1, 2, 1]);
    }

    #[test]
    fn reference_counts() {
        let line = AffineMonoid::free(&["x"]);
        assert_eq!(enumerate_log_jets(&line, 3, 1, DEFAULT_BUDGET).unwrap().count, 9);
        assert_eq!(enumerate_log_jets(&line, 2, 0, DEFAULT_BUDGET).unwrap().count, 2);
        let two = AffineMonoid::parse(&["x", "y"], &["2x = 2y"]).unwrap();
        assert_eq!(enumerate_log_jets(&two, 3, 1, DEFAULT_BUDGET).unwrap().count, 15);
        let s = standard(&["x"], &[]);
        assert_eq!(closed_form_count(&s, 3, 1, DEFAULT_BUDGET).unwrap().count, 9);
        let t = MonomialLogScheme::standard(two, 0).unwrap();
        assert_eq!(closed_form_count(&t, 3, 1, DEFAULT_BUDGET).unwrap().count, 15);
        assert!(matches!(closed_form_count(&t, 2, 1, DEFAULT_BUDGET), Err(OracleError::Hypothesis { .. })));
    }

    #[test]
    fn budgets_and_fields() {
        let plane = AffineMonoid::free(&["x", "y"]);
        assert!(matches!(enumerate_log_jets(&plane, 5, 2, 100), Err(OracleError::Budget { .. })));
        assert!(matches!(enumerate_log_jets(&plane, 4, 0, 100), Err(OracleError::NotPrime(4))));
    }

    #[test]
    fn general_charts_agree_with_standard() {
        let s = standard(&["x", "y"], &["3x = 2y"]);
        let (pts, _) = enumerate_scheme_points(&s, 3, 1, DEFAULT_BUDGET).unwrap();
        let direct = enumerate_log_jets(s.ambient(), 3, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts.len() as u64, direct.count);
        for pt in enumerate_log_jet_points(s.ambient(), 3, 1, DEFAULT_BUDGET).unwrap() {
            assert!(is_ordinary_jet(s.ambient(), &pt.ordinary));
        }
    }

    #[test]
    fn truncation_collapse() {
        let sq = line_chart("2x");
        let r = truncation_image_count(&sq, 2, 3, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!((r.full_fiber_over_origin, r.image_over_origin), (4, 2));
        assert!(r.collapses_over_origin());
        let lin = line_chart("x");
        let r = truncation_image_count(&lin, 3, 3, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.image, r.full_fiber);
        assert_eq!(r.image_over_origin, r.full_fiber_over_origin);
        let r = truncation_image_count(&sq, 2, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.image, r.full_fiber);
        assert!(truncation_image_count(&sq, 2, 1, 2, DEFAULT_BUDGET).is_err());
    }
}
