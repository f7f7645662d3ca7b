//! Exact valuation values.
//!
//! A [`Value`] is a real number of the form `q0 + q1*sqrt(r1) + ... + qn*sqrt(rn)`
//! where the `ri` are distinct squarefree integers collected in a
//! [`RadicalBasis`] and the `qi` are arbitrary-precision rationals. The square
//! roots of distinct squarefree integers are linearly independent over the
//! rationals, so a value is zero exactly when all of its coefficients vanish
//! and every other sign question can be settled by interval refinement.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ValueError;

/// Working precision (in bits) of the first enclosure round.
const START_PRECISION: u64 = 64;

/// Ordered list of distinct squarefree radicands; the first entry is always 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadicalBasis {
    radicands: Vec<u64>,
}

impl RadicalBasis {
    /// Builds a basis from radicands. `1` is inserted when missing and the list
    /// is sorted; duplicates or non-squarefree entries are rejected.
    pub fn new(radicands: &[u64]) -> Result<Arc<Self>, ValueError> {
        let mut list: Vec<u64> = radicands.to_vec();
        if !list.contains(&1) {
            list.push(1);
        }
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0] == w[1] {
                return Err(ValueError::DuplicateRadicand(w[0]));
            }
        }
        for &r in &list {
            if r == 0 || !is_squarefree(r) {
                return Err(ValueError::NotSquarefree(r));
            }
        }
        Ok(Arc::new(Self { radicands: list }))
    }

    /// The basis `{1}` of rational values.
    pub fn rational() -> Arc<Self> {
        Arc::new(Self { radicands: vec![1] })
    }

    pub fn radicands(&self) -> &[u64] {
        &self.radicands
    }

    pub fn len(&self) -> usize {
        self.radicands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radicands.is_empty()
    }

    pub fn position(&self, radicand: u64) -> Option<usize> {
        self.radicands.binary_search(&radicand).ok()
    }
}

pub(crate) fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Splits `n` as `f^2 * r` with `r` squarefree.
fn squarefree_split(n: u64) -> (u64, u64) {
    let mut factor = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            rest /= p * p;
            factor *= p;
        }
        p += 1;
    }
    (factor, rest)
}

/// Exact sign of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueSign {
    Negative,
    Zero,
    Positive,
}

/// An element of the rational span of the square roots in a [`RadicalBasis`].
#[derive(Clone, Debug)]
pub struct Value {
    basis: Arc<RadicalBasis>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis)
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.radicands.hash(state);
        self.coeffs.hash(state);
    }
}

impl Value {
    pub fn zero(basis: &Arc<RadicalBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: vec![BigRational::zero(); basis.len()],
        }
    }

    pub fn from_rational(basis: &Arc<RadicalBasis>, q: BigRational) -> Self {
        let mut v = Self::zero(basis);
        v.coeffs[0] = q;
        v
    }

    pub fn from_integer(basis: &Arc<RadicalBasis>, n: i64) -> Self {
        Self::from_rational(basis, BigRational::from_integer(BigInt::from(n)))
    }

    /// `q * sqrt(radicand)`; the radicand must belong to the basis.
    pub fn sqrt_term(
        basis: &Arc<RadicalBasis>,
        q: BigRational,
        radicand: u64,
    ) -> Result<Self, ValueError> {
        let pos = basis
            .position(radicand)
            .ok_or(ValueError::RadicandNotInBasis(radicand))?;
        let mut v = Self::zero(basis);
        v.coeffs[pos] = q;
        Ok(v)
    }

    pub fn from_coeffs(
        basis: &Arc<RadicalBasis>,
        coeffs: Vec<BigRational>,
    ) -> Result<Self, ValueError> {
        if coeffs.len() != basis.len() {
            return Err(ValueError::CoefficientCount {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            basis: Arc::clone(basis),
            coeffs,
        })
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True when the value is a rational number.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn same_basis(&self, other: &Self) -> Result<(), ValueError> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis {
            Ok(())
        } else {
            Err(ValueError::BasisMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ValueError> {
        self.same_basis(other)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ValueError> {
        self.same_basis(other)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact sign, decided symbolically for zero and by interval refinement
    /// otherwise.
    pub fn sign(&self) -> ValueSign {
        if self.is_zero() {
            return ValueSign::Zero;
        }
        let denom = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom / c.denom()))
            .collect();
        sign_of_integer_combination(&ints, &self.basis.radicands)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == ValueSign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == ValueSign::Negative
    }

    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, ValueError> {
        Ok(match self.try_sub(other)?.sign() {
            ValueSign::Negative => Ordering::Less,
            ValueSign::Zero => Ordering::Equal,
            ValueSign::Positive => Ordering::Greater,
        })
    }

    /// Rational interval `[lo, hi]` of width at most `2^-bits` times the
    /// coefficient mass containing the value.
    pub fn enclosure(&self, bits: u64) -> (BigRational, BigRational) {
        let scale = BigInt::one() << bits;
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (c, &r) in self.coeffs.iter().zip(&self.basis.radicands) {
            if c.is_zero() {
                continue;
            }
            let (s_lo, s_hi) = sqrt_bounds(r, bits);
            let a = BigRational::new(s_lo, scale.clone());
            let b = BigRational::new(s_hi, scale.clone());
            if c.is_positive() {
                lo += c * &a;
                hi += c * &b;
            } else {
                lo += c * &b;
                hi += c * &a;
            }
        }
        (lo, hi)
    }

    /// Decimal approximation with `digits` significant digits, for display only.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (lo, hi) = self.enclosure(160);
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        format_decimal(&mid, digits)
    }

    /// Lossy conversion used only for human-facing output and sampling.
    pub fn to_f64(&self) -> f64 {
        let (lo, _) = self.enclosure(64);
        lo.to_f64().unwrap_or(f64::NAN)
    }

    /// Parses expressions such as `2*sqrt(2) - 1`, `sqrt(51)-5`, `3/2` or
    /// `-1/2*sqrt(8)`. Radicands are reduced to squarefree form and must lie in
    /// the basis.
    pub fn parse(basis: &Arc<RadicalBasis>, text: &str) -> Result<Self, ValueError> {
        ValueParser::new(basis, text).parse()
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order by real magnitude. Panics when the bases differ; use
/// [`Value::try_cmp`] for a checked comparison.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparing values over different bases")
    }
}

impl std::ops::Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        self.try_add(rhs).expect("adding values over different bases")
    }
}

impl std::ops::Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        self.try_sub(rhs)
            .expect("subtracting values over different bases")
    }
}

impl std::ops::Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Exact sign of `sum ints[k] * sqrt(radicands[k])` for distinct squarefree
/// radicands, refining enclosures from 64 bits and doubling the precision
/// each round.
pub(crate) fn sign_of_integer_combination(ints: &[BigInt], radicands: &[u64]) -> ValueSign {
    if ints.iter().all(Zero::is_zero) {
        return ValueSign::Zero;
    }
    let mut bits = START_PRECISION;
    loop {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (n, &r) in ints.iter().zip(radicands) {
            if n.is_zero() {
                continue;
            }
            let (s_lo, s_hi) = sqrt_bounds(r, bits);
            if n.is_positive() {
                lo += n * &s_lo;
                hi += n * &s_hi;
            } else {
                lo += n * &s_hi;
                hi += n * &s_lo;
            }
        }
        if lo.is_positive() {
            return ValueSign::Positive;
        }
        if hi.is_negative() {
            return ValueSign::Negative;
        }
        bits *= 2;
    }
}

/// Integers `lo <= sqrt(r) * 2^bits <= hi` with `hi - lo <= 1`.
fn sqrt_bounds(r: u64, bits: u64) -> (BigInt, BigInt) {
    let scaled = BigUint::from(r) << (2 * bits);
    let root = scaled.sqrt();
    let exact = &root * &root == scaled;
    let lo = BigInt::from_biguint(Sign::Plus, root);
    let hi = if exact { lo.clone() } else { &lo + 1 };
    (lo, hi)
}

/// `p` or `p/q` in lowest terms.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Inverse of [`format_rational`]; `None` on malformed input or zero denominator.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

fn format_decimal(x: &BigRational, digits: usize) -> String {
    let negative = x.is_negative();
    let x = x.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    // exponent e with 10^e <= x < 10^(e+1)
    let mut e: i64 = 0;
    let mut p = BigRational::one();
    if x >= p {
        while x >= &p * &ten {
            p = &p * &ten;
            e += 1;
        }
    } else {
        while x < p {
            p = &p / &ten;
            e -= 1;
        }
    }
    let shift = digits as i64 - 1 - e;
    let factor = if shift >= 0 {
        BigRational::from_integer(BigInt::from(10).pow(shift as u32))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(10).pow((-shift) as u32))
    };
    let mut mantissa = (&x * &factor).round().to_integer();
    let mut shift = shift;
    if mantissa.to_string().len() > digits {
        mantissa = (&mantissa + 5) / 10;
        shift -= 1;
    }
    let s = mantissa.to_string();
    let body = if shift <= 0 {
        format!("{}{}", s, "0".repeat((-shift) as usize))
    } else {
        let shift = shift as usize;
        if s.len() > shift {
            let (int, frac) = s.split_at(s.len() - shift);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat(shift - s.len()), s)
        }
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, &r) in self.coeffs.iter().zip(&self.basis.radicands) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if r == 1 {
                format_rational(&mag)
            } else if mag.is_one() {
                format!("sqrt({r})")
            } else {
                format!("{}*sqrt({r})", format_rational(&mag))
            };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

struct ValueParser<'a> {
    basis: &'a Arc<RadicalBasis>,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> ValueParser<'a> {
    fn new(basis: &'a Arc<RadicalBasis>, text: &str) -> Self {
        Self {
            basis,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> ValueError {
        ValueError::Parse {
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

    fn parse(mut self) -> Result<Value, ValueError> {
        let mut total = Value::zero(self.basis);
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                None if !first => break,
                None => return Err(self.err("empty value")),
                Some(_) if first => false,
                Some(_) => return Err(self.err("expected '+' or '-'")),
            };
            first = false;
            let term = self.term()?;
            total = if negative {
                total.try_sub(&term)?
            } else {
                total.try_add(&term)?
            };
            if self.peek().is_none() {
                break;
            }
        }
        Ok(total)
    }

    /// `rational`, `sqrt(n)`, `rational*sqrt(n)` or `sqrt(n)*rational`.
    fn term(&mut self) -> Result<Value, ValueError> {
        let mut coeff = BigRational::one();
        let mut radicand: Option<u64> = None;
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    coeff *= self.rational()?;
                }
                Some('s') => {
                    if radicand.is_some() {
                        return Err(self.err("at most one sqrt per term"));
                    }
                    let (f, r) = self.sqrt()?;
                    coeff *= BigRational::from_integer(BigInt::from(f));
                    radicand = Some(r);
                }
                _ => return Err(self.err("expected a number or sqrt(..)")),
            }
            factors += 1;
            if self.peek() == Some('*') {
                self.pos += 1;
                continue;
            }
            break;
        }
        debug_assert!(factors > 0);
        match radicand {
            None | Some(1) => Ok(Value::from_rational(self.basis, coeff)),
            Some(r) => Value::sqrt_term(self.basis, coeff, r),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ValueError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("bad integer"))
    }

    fn rational(&mut self) -> Result<BigRational, ValueError> {
        let n = self.integer()?;
        if self.peek() == Some('/') {
            self.pos += 1;
            let d = self.integer()?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            return Ok(BigRational::new(n, d));
        }
        Ok(BigRational::from_integer(n))
    }

    fn sqrt(&mut self) -> Result<(u64, u64), ValueError> {
        self.skip_ws();
        let word: String = self.chars[self.pos..].iter().take(4).collect();
        if word != "sqrt" {
            return Err(self.err("expected sqrt"));
        }
        self.pos += 4;
        if self.peek() != Some('(') {
            return Err(self.err("expected '('"));
        }
        self.pos += 1;
        let n = self
            .integer()?
            .to_u64()
            .ok_or_else(|| self.err("radicand too large"))?;
        if self.peek() != Some(')') {
            return Err(self.err("expected ')'"));
        }
        self.pos += 1;
        if n == 0 {
            return Ok((0, 1));
        }
        Ok(squarefree_split(n))
    }
}
