//! Sparse multivariate polynomials with exact rational coefficients over
//! ordinary and logarithmic jet variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarKind {
    /// `d_i x`, with `d_0 x = x`.
    Ordinary,
    /// `∂_i p` for a chart element `p`, with `i ≥ 1`.
    Log,
}

/// A jet variable. For ordinary variables `index` refers to the base
/// variables, for log variables to the chart elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub kind: VarKind,
    pub order: u32,
    pub index: usize,
}

impl Var {
    pub fn base(index: usize) -> Var {
        Var { kind: VarKind::Ordinary, order: 0, index }
    }

    pub fn d(order: u32, index: usize) -> Var {
        Var { kind: VarKind::Ordinary, order, index }
    }

    pub fn dlog(order: u32, index: usize) -> Var {
        Var { kind: VarKind::Log, order, index }
    }

    /// Priority in the term order: ordinary before log, higher order first,
    /// lower index first.
    fn priority(&self) -> (u8, u32, std::cmp::Reverse<usize>) {
        let k = match self.kind {
            VarKind::Ordinary => 1,
            VarKind::Log => 0,
        };
        (k, self.order, std::cmp::Reverse(self.index))
    }
}

/// Names used to print variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarNames {
    pub base: Vec<String>,
    pub chart: Vec<String>,
}

impl VarNames {
    pub fn name(&self, v: Var) -> String {
        match (v.kind, v.order) {
            (VarKind::Ordinary, 0) => self.base[v.index].clone(),
            (VarKind::Ordinary, i) => format!("d{i}_{}", self.base[v.index]),
            (VarKind::Log, i) => format!("dlog{i}_{}", self.chart[v.index]),
        }
    }
}

pub type Monomial = BTreeMap<Var, u32>;

fn cmp_terms(a: &Monomial, b: &Monomial) -> Ordering {
    let key = |m: &Monomial| {
        let mut v: Vec<_> = m.iter().map(|(var, e)| (var.priority(), *e)).collect();
        v.sort_by_key(|x| std::cmp::Reverse(x.0));
        v
    };
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(&kb) {
        if x.0 != y.0 {
            return y.0.cmp(&x.0);
        }
        if x.1 != y.1 {
            return y.1.cmp(&x.1);
        }
    }
    kb.len().cmp(&ka.len())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("coefficient denominator divisible by {0}")]
    NotInvertible(u64),
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: impl Into<BigRational>) -> Polynomial {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        Polynomial { terms }
    }

    pub fn int(c: i64) -> Polynomial {
        Polynomial::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn one() -> Polynomial {
        Polynomial::int(1)
    }

    pub fn var(v: Var) -> Polynomial {
        Polynomial::monomial(BigRational::one(), Monomial::from([(v, 1)]))
    }

    pub fn monomial(c: BigRational, m: Monomial) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let m: Monomial = m.into_iter().filter(|(_, e)| *e > 0).collect();
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.keys().copied()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn max_order(&self) -> u32 {
        self.variables().iter().map(|v| v.order).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, a) in &self.terms {
            p.add_term(m.clone(), a * c);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let r = rational_mod(c, p)?;
            out.add_term(m.clone(), BigRational::from_integer(BigInt::from(r)));
        }
        Ok(out)
    }

    /// Terms in display order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &BigRational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| cmp_terms(a.0, b.0));
        ts
    }

    pub fn render(&self, names: &VarNames) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let vars: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e == 1 { names.name(*v) } else { format!("{}^{e}", names.name(*v)) })
                .collect();
            let coef =
                if abs.is_integer() { abs.numer().to_string() } else { format!("{}/{}", abs.numer(), abs.denom()) };
            if vars.is_empty() {
                out.push_str(&coef);
            } else {
                if !abs.is_one() {
                    let _ = write!(out, "{coef}*");
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }

    /// Evaluates modulo a prime with values supplied per variable.
    pub fn eval_mod(&self, p: u64, value: impl Fn(Var) -> u64) -> Result<u64, PolyError> {
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = rational_mod(c, p)?;
            for (v, e) in m {
                t = mul_mod(t, pow_mod(value(*v) % p, *e as u64, p), p);
            }
            acc = (acc + t) % p;
        }
        Ok(acc)
    }

    /// Parses `x^3 - y^2`, `x*(x-1)`, `2*x + 1` over the given base variables.
    pub fn parse(text: &str, base: &[String]) -> Result<Polynomial, PolyError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0, base };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected input"));
        }
        Ok(poly)
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn rational_mod(c: &BigRational, p: u64) -> Result<u64, PolyError> {
    let pb = BigInt::from(p);
    let num = ((c.numer() % &pb) + &pb) % &pb;
    let den = ((c.denom() % &pb) + &pb) % &pb;
    let num = num.to_u64().unwrap_or(0);
    let den = den.to_u64().unwrap_or(0);
    if den == 0 {
        return Err(PolyError::NotInvertible(p));
    }
    Ok(mul_mod(num, pow_mod(den, p - 2, p), p))
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = ma.clone();
                for (v, e) in mb {
                    *m.entry(*v).or_insert(0) += e;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial { (&self).$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    base: &'a [String],
}

impl Parser<'_> {
    fn err(&self, message: &str) -> PolyError {
        PolyError::Syntax { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let b = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = e.to_u32().ok_or_else(|| self.err("exponent too large"))?;
            return Ok(b.pow(e));
        }
        Ok(b)
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Polynomial::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || matches!(self.s[self.pos], b'_' | b'\''))
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                match self.base.iter().position(|b| b == name) {
                    Some(i) => Ok(Polynomial::var(Var::base(i))),
                    None => Err(PolyError::UnknownVariable(name.to_string())),
                }
            }
            Some(_) => Err(self.err("expected a term")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(base: &[&str]) -> VarNames {
        VarNames { base: base.iter().map(|s| s.to_string()).collect(), chart: vec!["p".into()] }
    }

    fn parse(s: &str, base: &[&str]) -> Polynomial {
        let b: Vec<String> = base.iter().map(|s| s.to_string()).collect();
        Polynomial::parse(s, &b).unwrap()
    }

    #[test]
    fn rendering_order() {
        let n = names(&["x", "y"]);
        assert_eq!(parse("-y^2 + x^3", &["x", "y"]).render(&n), "x^3 - y^2");
        let d1x = Polynomial::var(Var::d(1, 0));
        let d1y = Polynomial::var(Var::d(1, 1));
        let x = Polynomial::var(Var::base(0));
        let y = Polynomial::var(Var::base(1));
        let p = &(&Polynomial::int(3) * &(&x.pow(2) * &d1x)) - &(&Polynomial::int(2) * &(&y * &d1y));
        assert_eq!(p.render(&n), "3*x^2*d1_x - 2*y*d1_y");
        let l = &d1x - &(&x * &Polynomial::var(Var::dlog(1, 0)));
        assert_eq!(l.render(&n), "d1_x - x*dlog1_p");
        assert_eq!(Polynomial::zero().render(&n), "0");
        assert_eq!(parse("x*(x-1)", &["x"]).render(&n), "x^2 - x");
    }

    #[test]
    fn parse_errors() {
        let b = vec!["x".to_string()];
        assert!(matches!(Polynomial::parse("x +", &b), Err(PolyError::Syntax { .. })));
        assert!(matches!(Polynomial::parse("z", &b), Err(PolyError::UnknownVariable(_))));
        assert!(matches!(Polynomial::parse("(x", &b), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn modular() {
        let p = parse("3*x^2 - 2*x + 5", &["x"]);
        assert_eq!(p.reduce_mod_p(3).unwrap().render(&names(&["x"])), "x + 2");
        assert_eq!(p.eval_mod(7, |_| 2).unwrap(), (12 - 4 + 5) % 7);
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-5i64..5, 0u32..3, 0u32..3), 0..5).prop_map(|ts| {
            let mut p = Polynomial::zero();
            for (c, a, b) in ts {
                let m = Monomial::from([(Var::base(0), a), (Var::base(1), b)]);
                p = &p + &Polynomial::monomial(BigRational::from_integer(c.into()), m);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a * &Polynomial::one(), a.clone());
        }
    }
}
