//! Sparse Laurent polynomials with exact rational coefficients.
//!
//! Every polynomial carries the variable list it lives over; exponent vectors
//! are dense (one entry per variable) and terms are kept in a `BTreeMap`, so
//! the representation is canonical and zero coefficients are never stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;
use crate::values::format_rational;

/// An ordered list of variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarList {
    names: Vec<String>,
}

impl VarList {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<Self> {
        Arc::new(Self {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn render(&self, vars: &VarList) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(vars.names())
            .filter(|(e, _)| **e != 0)
            .map(|(&e, name)| {
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    vars: Arc<VarList>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero(vars: &Arc<VarList>) -> Self {
        Self {
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarList>, c: BigRational) -> Self {
        Self::term(vars, Monomial::one(vars.len()), c)
    }

    pub fn one(vars: &Arc<VarList>) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn term(vars: &Arc<VarList>, mono: Monomial, c: BigRational) -> Self {
        assert_eq!(mono.0.len(), vars.len(), "monomial length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Self {
            vars: Arc::clone(vars),
            terms,
        }
    }

    /// The polynomial consisting of the single variable `index`.
    pub fn var(vars: &Arc<VarList>, index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        Self::term(vars, Monomial(e), BigRational::one())
    }

    pub fn vars(&self) -> &Arc<VarList> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The sole term, when the polynomial is a nonzero multiple of a monomial.
    pub fn as_single_term(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|&e| e < 0))
    }

    fn compatible(&self, other: &Self) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VariableMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                acc.entry(m1.mul(m2))
                    .and_modify(|e| *e += &c)
                    .or_insert(c);
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self {
            vars: Arc::clone(&self.vars),
            terms,
        })
    }

    /// In-place accumulation of a single term.
    pub fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplicative inverse of a single nonzero term.
    fn invert_term(&self) -> Option<Self> {
        let (m, c) = self.as_single_term()?;
        let inv = Monomial(m.0.iter().map(|e| -e).collect());
        Some(Self::term(&self.vars, inv, c.recip()))
    }

    /// Replaces every variable of `self` by the polynomial `images[i]`; all
    /// images must share one variable list. Negative powers are allowed only
    /// for variables whose image is a single term.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<LaurentPoly, PolyError> {
        if images.len() != self.vars.len() {
            let missing = self
                .vars
                .names()
                .get(images.len())
                .cloned()
                .unwrap_or_default();
            return Err(PolyError::MissingImage(missing));
        }
        let target = images
            .first()
            .map(|p| Arc::clone(&p.vars))
            .unwrap_or_else(|| Arc::clone(&self.vars));
        for img in images {
            if !(Arc::ptr_eq(&img.vars, &target) || *img.vars == *target) {
                return Err(PolyError::VariableMismatch);
            }
        }
        let mut powers: HashMap<(usize, i32), LaurentPoly> = HashMap::new();
        let mut out = LaurentPoly::zero(&target);
        for (mono, c) in &self.terms {
            let mut term = LaurentPoly::constant(&target, c.clone());
            for (v, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !powers.contains_key(&(v, e)) {
                    let p = if e > 0 {
                        images[v].pow(e as u32)
                    } else {
                        images[v]
                            .invert_term()
                            .ok_or_else(|| {
                                PolyError::NonInvertibleSubstitution(self.vars.names()[v].clone())
                            })?
                            .pow((-e) as u32)
                    };
                    powers.insert((v, e), p);
                }
                term = &term * &powers[&(v, e)];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitution keyed by variable name; every variable occurring in
    /// `self` needs an image.
    pub fn substitute_named(
        &self,
        images: &HashMap<String, LaurentPoly>,
    ) -> Result<LaurentPoly, PolyError> {
        let mut list = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.names().iter().enumerate() {
            match images.get(name) {
                Some(p) => list.push(p.clone()),
                None => {
                    if self.terms.keys().any(|m| m.0[i] != 0) {
                        return Err(PolyError::MissingImage(name.clone()));
                    }
                    // Unused variable: any image will do.
                    let any = images
                        .values()
                        .next()
                        .ok_or_else(|| PolyError::MissingImage(name.clone()))?;
                    list.push(LaurentPoly::zero(&any.vars));
                }
            }
        }
        self.substitute(&list)
    }

    /// Re-expresses the polynomial over a larger variable list containing all
    /// of the current names.
    pub fn embed(&self, vars: &Arc<VarList>) -> Result<LaurentPoly, PolyError> {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| vars.index_of(n).ok_or_else(|| PolyError::MissingImage(n.clone())))
            .collect::<Result<_, _>>()?;
        let mut out = LaurentPoly::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] = x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Parses `text` over `vars`. Negative exponents are accepted only when
    /// `allow_negative` is set.
    pub fn parse(vars: &Arc<VarList>, text: &str, allow_negative: bool) -> Result<Self, PolyError> {
        let mut p = PolyParser {
            vars,
            chars: text.chars().collect(),
            pos: 0,
            allow_negative,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

impl<'a> std::ops::Add for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("variable lists differ")
    }
}

impl<'a> std::ops::Sub for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("variable lists differ")
    }
}

impl<'a> std::ops::Mul for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("variable lists differ")
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}

/// Terms in descending lex order, e.g. `-x^5*z'^2 + 2*x^4*y^2*z'`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = m.render(&self.vars);
            let body = |q: &BigRational| {
                if mono == "1" {
                    format_rational(q)
                } else if q.is_one() {
                    mono.clone()
                } else if (-q).is_one() {
                    format!("-{mono}")
                } else {
                    format!("{}*{}", format_rational(q), mono)
                }
            };
            if i == 0 {
                write!(f, "{}", body(c))?;
            } else if c.is_negative() {
                write!(f, " - {}", body(&-c))?;
            } else {
                write!(f, " + {}", body(c))?;
            }
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    vars: &'a Arc<VarList>,
    chars: Vec<char>,
    pos: usize,
    allow_negative: bool,
}

impl PolyParser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            position: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<LaurentPoly, PolyError> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.power()?;
                    let c = match d.as_single_term() {
                        Some((m, c)) if m.0.iter().all(|&e| e == 0) => c.clone(),
                        _ => {
                            self.pos = at;
                            return Err(self.err("division only by nonzero constants"));
                        }
                    };
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<LaurentPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let exp = self.exponent()?;
        if exp >= 0 {
            return Ok(base.pow(exp as u32));
        }
        if !self.allow_negative {
            return Err(self.err("negative exponents are not allowed here"));
        }
        match base.invert_term() {
            Some(inv) => Ok(inv.pow((-exp) as u32)),
            None => Err(self.err("negative power of a non-monomial")),
        }
    }

    fn exponent(&mut self) -> Result<i32, PolyError> {
        let paren = self.peek() == Some('(');
        if paren {
            self.pos += 1;
        }
        let mut negative = false;
        if self.peek() == Some('-') {
            negative = true;
            self.pos += 1;
        }
        self.skip_ws();
        let n = self.digits()?;
        let n = n
            .to_i32()
            .ok_or_else(|| self.err("exponent too large"))?;
        if paren {
            if self.peek() != Some(')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
        }
        Ok(if negative { -n } else { n })
    }

    fn digits(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("bad number"))
    }

    fn atom(&mut self) -> Result<LaurentPoly, PolyError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                Ok(LaurentPoly::constant(self.vars, BigRational::from_integer(n)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                while self.pos < self.chars.len() && self.chars[self.pos] == '\'' {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.vars.index_of(&name) {
                    Some(i) => Ok(LaurentPoly::var(self.vars, i)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{name}`")))
                    }
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring() -> Arc<VarList> {
        VarList::new(&["x", "y", "z"])
    }

    fn ambient() -> Arc<VarList> {
        VarList::new(&["x", "y", "z'"])
    }

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(&ring(), s, false).unwrap()
    }

    #[test]
    fn two_term_binomial() {
        let t2 = p("x*z - y^2");
        assert_eq!(t2.len(), 2);
        assert_eq!(t2.to_string(), "x*z - y^2");
    }

    #[test]
    fn difference_with_itself_vanishes() {
        let f = p("3*x^2*y - 7/2*z + 1");
        assert!((&f - &f).is_zero());
    }

    #[test]
    fn t3_expansion() {
        let t2 = p("x*z - y^2");
        let lhs = &(&p("x^2") * &t2) - &p("y*z^2");
        assert_eq!(lhs, p("x^3*z - x^2*y^2 - y*z^2"));
    }

    fn example_images() -> Vec<LaurentPoly> {
        let a = ambient();
        vec![
            LaurentPoly::parse(&a, "x", true).unwrap(),
            LaurentPoly::parse(&a, "y", true).unwrap(),
            LaurentPoly::parse(&a, "y^2*x^-1 + y^5*x^-5 + z'", true).unwrap(),
        ]
    }

    #[test]
    fn substitution_of_z() {
        let img = example_images();
        let z = p("z").substitute(&img).unwrap();
        assert_eq!(z.len(), 3);
        let xz = p("x*z").substitute(&img).unwrap();
        let expected = LaurentPoly::parse(&ambient(), "y^2 + y^5*x^-4 + x*z'", true).unwrap();
        assert_eq!(xz, expected);
    }

    #[test]
    fn identity_substitution() {
        let vars = ring();
        let ids: Vec<_> = (0..3).map(|i| LaurentPoly::var(&vars, i)).collect();
        let f = p("x^3*z - x^2*y^2 - y*z^2 + 5");
        assert_eq!(f.substitute(&ids).unwrap(), f);
    }

    #[test]
    fn non_invertible_substitution() {
        let a = ambient();
        let f = LaurentPoly::parse(&a, "x^-1*y", true).unwrap();
        let images = vec![p("x + y"), p("y"), p("z")];
        assert_eq!(
            f.substitute(&images),
            Err(PolyError::NonInvertibleSubstitution("x".into()))
        );
        let ok = vec![p("2*x"), p("y"), p("z")];
        let inv = f.substitute(&ok).unwrap();
        assert_eq!(inv, LaurentPoly::parse(&ring(), "1/2*x^-1*y", true).unwrap());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match LaurentPoly::parse(&ring(), "x + w", false) {
            Err(PolyError::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(LaurentPoly::parse(&ring(), "x^-1", false).is_err());
        assert!(LaurentPoly::parse(&ring(), "x*(y", false).is_err());
        assert!(LaurentPoly::parse(&ring(), "x/(y+1)", false).is_err());
    }

    #[test]
    fn mismatched_lists() {
        let a = LaurentPoly::var(&ring(), 0);
        let b = LaurentPoly::var(&ambient(), 0);
        assert_eq!(a.checked_add(&b), Err(PolyError::VariableMismatch));
    }

    #[test]
    fn display_roundtrip_with_primes() {
        let a = ambient();
        let f = LaurentPoly::parse(&a, "-x^5*z'^2 + 2*x^4*y^2*z' - 3/4*x^-1", true).unwrap();
        assert_eq!(f.to_string(), "-x^5*z'^2 + 2*x^4*y^2*z' - 3/4*x^-1");
        assert_eq!(LaurentPoly::parse(&a, &f.to_string(), true).unwrap(), f);
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(((0i32..3, 0i32..3, 0i32..3), -3i64..4), 0..4).prop_map(|ts| {
            let vars = ring();
            let mut f = LaurentPoly::zero(&vars);
            for ((a, b, c), k) in ts {
                f.add_term(Monomial(vec![a, b, c]), BigRational::from_integer(k.into()));
            }
            f
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(f in small_poly(), g in small_poly(), h in small_poly()) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            prop_assert_eq!(&f + &g, &g + &f);
        }

        #[test]
        fn substitution_is_multiplicative(f in small_poly(), g in small_poly()) {
            let img = example_images();
            let lhs = (&f * &g).substitute(&img).unwrap();
            let rhs = &f.substitute(&img).unwrap() * &g.substitute(&img).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
