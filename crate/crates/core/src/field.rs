//! Exact scalar fields: the rationals, prime fields `F_p` (p odd) and
//! single-generator quadratic extensions `F(sqrt d)`.
//!
//! A [`Field`] is a cheap, shareable descriptor. Every [`FieldElement`] keeps a
//! handle to the field it belongs to, so elements of different fields never
//! combine silently: the `checked_*` methods report [`FieldError::MixedFields`]
//! and the operator impls panic.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} and {1})")]
    MixedFields(String, String),
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("{d} is already a square in {base}; drop the extension and use {base}")]
    SquareExtension { base: String, d: String },
    #[error("extension generator must be nonzero")]
    ZeroExtension,
    #[error("nested extensions are not supported")]
    NestedExtension,
    #[error("{0} cannot be represented in {1}")]
    NotRepresentable(String, String),
}

/// Error from parsing a field descriptor or a scalar literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{input}: {message} (line {line}, column {column})")]
pub struct ParseError {
    pub input: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(input: &str, column: usize, message: impl Into<String>) -> Self {
        Self {
            input: input.to_string(),
            line: 1,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
enum Kind {
    Rational,
    Prime(u64),
    QuadRational(BigRational),
    QuadPrime { p: u64, d: u64 },
}

/// A field descriptor. Cloning is cheap; equality is structural.
#[derive(Clone)]
pub struct Field(Arc<Kind>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Kind::Rational => write!(f, "Q"),
            Kind::Prime(p) => write!(f, "Fp:{p}"),
            Kind::QuadRational(d) => write!(f, "Q(sqrt:{d})"),
            Kind::QuadPrime { p, d } => write!(f, "Fp:{p}(sqrt:{d})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rat(BigRational),
    Mod(u64),
    QRat(Box<(BigRational, BigRational)>),
    QMod(u64, u64),
}

/// An exact element of a [`Field`].
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    repr: Repr,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.repr.hash(state)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_qr_mod(a: u64, p: u64) -> bool {
    a.is_multiple_of(p) || pow_mod(a, (p - 1) / 2, p) == 1
}

/// Tonelli-Shanks; `a` must be a quadratic residue. Returns the smaller root.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if !is_qr_mod(a, p) {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while is_qr_mod(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

fn rat_to_mod(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_u64()?;
    let d = x.denom().mod_floor(&pb).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(mul_mod(n, inv_mod(d, p), p))
}

impl Field {
    pub fn rationals() -> Self {
        Field(Arc::new(Kind::Rational))
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !is_odd_prime(p) {
            return Err(FieldError::BadPrime(p));
        }
        Ok(Field(Arc::new(Kind::Prime(p))))
    }

    /// `base(sqrt d)` for a non-square `d` of the base field.
    pub fn quadratic(base: &Field, d: &FieldElement) -> Result<Self, FieldError> {
        if &d.field != base {
            return Err(FieldError::MixedFields(base.to_string(), d.field.to_string()));
        }
        if d.is_zero() {
            return Err(FieldError::ZeroExtension);
        }
        let kind = match (&*base.0, &d.repr) {
            (Kind::Rational, Repr::Rat(x)) => {
                if rational_sqrt(x).is_some() {
                    return Err(FieldError::SquareExtension {
                        base: base.to_string(),
                        d: x.to_string(),
                    });
                }
                Kind::QuadRational(x.clone())
            }
            (Kind::Prime(p), Repr::Mod(x)) => {
                if is_qr_mod(*x, *p) {
                    return Err(FieldError::SquareExtension {
                        base: base.to_string(),
                        d: x.to_string(),
                    });
                }
                Kind::QuadPrime { p: *p, d: *x }
            }
            _ => return Err(FieldError::NestedExtension),
        };
        Ok(Field(Arc::new(kind)))
    }

    /// Parses `Q`, `Fp:<p>`, `Q(sqrt:<d>)`, `Fp:<p>(sqrt:<d>)`. `F<p>` is
    /// accepted as shorthand for `Fp:<p>`.
    pub fn parse(input: &str) -> Result<Self, ParseError> {
        let s = input.trim();
        let lead = input.len() - input.trim_start().len();
        let (base_str, ext) = match s.find('(') {
            Some(i) => {
                if !s.ends_with(')') {
                    return Err(ParseError::new(input, lead + s.len() + 1, "expected ')'"));
                }
                (&s[..i], Some((i, &s[i + 1..s.len() - 1])))
            }
            None => (s, None),
        };
        let base = if base_str == "Q" {
            Field::rationals()
        } else if let Some(rest) = base_str
            .strip_prefix("Fp:")
            .or_else(|| base_str.strip_prefix('F'))
        {
            let offset = lead + base_str.len() - rest.len() + 1;
            let p: u64 = rest
                .parse()
                .map_err(|_| ParseError::new(input, offset, format!("invalid prime '{rest}'")))?;
            Field::prime(p).map_err(|e| ParseError::new(input, offset, e.to_string()))?
        } else {
            return Err(ParseError::new(
                input,
                lead + 1,
                format!("unknown base field '{base_str}' (expected Q or Fp:<p>)"),
            ));
        };
        let Some((open, ext)) = ext else {
            return Ok(base);
        };
        let Some(dstr) = ext.strip_prefix("sqrt:") else {
            return Err(ParseError::new(input, lead + open + 2, "expected 'sqrt:<d>'"));
        };
        let col = lead + open + 2 + "sqrt:".len();
        let d = base
            .parse_element(dstr)
            .map_err(|e| ParseError::new(input, col, e.message))?;
        Field::quadratic(&base, &d).map_err(|e| ParseError::new(input, col, e.to_string()))
    }

    /// 0 for the rationals, `p` otherwise.
    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            Kind::Rational | Kind::QuadRational(_) => 0,
            Kind::Prime(p) | Kind::QuadPrime { p, .. } => *p,
        }
    }

    pub fn is_extension(&self) -> bool {
        matches!(&*self.0, Kind::QuadRational(_) | Kind::QuadPrime { .. })
    }

    pub fn base(&self) -> Field {
        match &*self.0 {
            Kind::Rational | Kind::Prime(_) => self.clone(),
            Kind::QuadRational(_) => Field::rationals(),
            Kind::QuadPrime { p, .. } => Field(Arc::new(Kind::Prime(*p))),
        }
    }

    /// The adjoined square root `sqrt d`, if this is an extension.
    pub fn generator(&self) -> Option<FieldElement> {
        match &*self.0 {
            Kind::QuadRational(_) => Some(self.pair_rat(BigRational::zero(), BigRational::one())),
            Kind::QuadPrime { .. } => Some(self.with(Repr::QMod(0, 1))),
            _ => None,
        }
    }

    /// The generator's square `d`, as an element of the base field.
    pub fn extension_square(&self) -> Option<FieldElement> {
        match &*self.0 {
            Kind::QuadRational(d) => Some(self.base().with(Repr::Rat(d.clone()))),
            Kind::QuadPrime { d, .. } => Some(self.base().with(Repr::Mod(*d))),
            _ => None,
        }
    }

    fn with(&self, repr: Repr) -> FieldElement {
        FieldElement {
            field: self.clone(),
            repr,
        }
    }

    fn pair_rat(&self, a: BigRational, b: BigRational) -> FieldElement {
        self.with(Repr::QRat(Box::new((a, b))))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match &*self.0 {
            Kind::Rational => self.with(Repr::Rat(BigRational::from_integer(n.into()))),
            Kind::Prime(p) => self.with(Repr::Mod(reduce_i64(n, *p))),
            Kind::QuadRational(_) => {
                self.pair_rat(BigRational::from_integer(n.into()), BigRational::zero())
            }
            Kind::QuadPrime { p, .. } => self.with(Repr::QMod(reduce_i64(n, *p), 0)),
        }
    }

    /// `num / den`; fails when `den` vanishes in this field.
    pub fn ratio(&self, num: i64, den: i64) -> Result<FieldElement, FieldError> {
        if den == 0 {
            return Err(FieldError::DivisionByZero);
        }
        self.from_rational(&BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(&self, x: &BigRational) -> Result<FieldElement, FieldError> {
        let not_rep = || FieldError::NotRepresentable(x.to_string(), self.to_string());
        Ok(match &*self.0 {
            Kind::Rational => self.with(Repr::Rat(x.clone())),
            Kind::Prime(p) => self.with(Repr::Mod(rat_to_mod(x, *p).ok_or_else(not_rep)?)),
            Kind::QuadRational(_) => self.pair_rat(x.clone(), BigRational::zero()),
            Kind::QuadPrime { p, .. } => {
                self.with(Repr::QMod(rat_to_mod(x, *p).ok_or_else(not_rep)?, 0))
            }
        })
    }

    /// Embeds a base-field element into this field.
    pub fn embed(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if &x.field == self {
            return Ok(x.clone());
        }
        if x.field != self.base() {
            return Err(FieldError::MixedFields(self.to_string(), x.field.to_string()));
        }
        Ok(match (&*self.0, &x.repr) {
            (Kind::QuadRational(_), Repr::Rat(a)) => self.pair_rat(a.clone(), BigRational::zero()),
            (Kind::QuadPrime { .. }, Repr::Mod(a)) => self.with(Repr::QMod(*a, 0)),
            _ => unreachable!("base field mismatch"),
        })
    }

    /// `a + b sqrt d` from base-field components.
    pub fn pair(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        let base = self.base();
        if a.field != base || b.field != base || !self.is_extension() {
            return Err(FieldError::MixedFields(self.to_string(), a.field.to_string()));
        }
        Ok(match (&a.repr, &b.repr) {
            (Repr::Rat(x), Repr::Rat(y)) => self.pair_rat(x.clone(), y.clone()),
            (Repr::Mod(x), Repr::Mod(y)) => self.with(Repr::QMod(*x, *y)),
            _ => unreachable!(),
        })
    }

    /// Parses an element: an integer or fraction (`-3/4`), optionally followed
    /// by `+<b>*sqrt<d>` in an extension.
    pub fn parse_element(&self, input: &str) -> Result<FieldElement, ParseError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(pos) = s.find("*sqrt") {
            let gen = self
                .generator()
                .ok_or_else(|| ParseError::new(input, pos + 1, "field has no square root generator"))?;
            let head = &s[..pos];
            let split = head
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            let (a_str, b_str) = match split {
                Some(i) => (&head[..i], head[i..].trim_start_matches('+')),
                None => ("0", head),
            };
            let a = self.parse_rational_literal(input, a_str)?;
            let b = self.parse_rational_literal(input, b_str)?;
            return Ok(&a + &(&b * &gen));
        }
        self.parse_rational_literal(input, &s)
    }

    fn parse_rational_literal(&self, input: &str, s: &str) -> Result<FieldElement, ParseError> {
        let x = BigRational::from_str(s)
            .map_err(|_| ParseError::new(input, 1, format!("invalid number '{s}'")))?;
        self.from_rational(&x)
            .map_err(|e| ParseError::new(input, 1, e.to_string()))
    }

    /// A square root of `d` in this field, if one exists.
    pub fn sqrt(&self, d: &FieldElement) -> Option<FieldElement> {
        sqrt_in_field(self, d)
    }

    /// A random element; rationals are drawn as small fractions.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let small_rat = |rng: &mut R| {
            BigRational::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=9).into())
        };
        match &*self.0 {
            Kind::Rational => self.with(Repr::Rat(small_rat(rng))),
            Kind::Prime(p) => self.with(Repr::Mod(rng.random_range(0..*p))),
            Kind::QuadRational(_) => {
                let a = small_rat(rng);
                let b = small_rat(rng);
                self.pair_rat(a, b)
            }
            Kind::QuadPrime { p, .. } => {
                self.with(Repr::QMod(rng.random_range(0..*p), rng.random_range(0..*p)))
            }
        }
    }

    /// Every element, for finite fields of modest size.
    pub fn elements(&self) -> Option<Vec<FieldElement>> {
        match &*self.0 {
            Kind::Prime(p) if *p <= 1 << 16 => {
                Some((0..*p).map(|v| self.with(Repr::Mod(v))).collect())
            }
            Kind::QuadPrime { p, .. } if *p <= 1 << 8 => Some(
                (0..*p)
                    .flat_map(|a| (0..*p).map(move |b| (a, b)))
                    .map(|(a, b)| self.with(Repr::QMod(a, b)))
                    .collect(),
            ),
            _ => None,
        }
    }
}

impl FromStr for Field {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::parse(s)
    }
}

fn reduce_i64(n: i64, p: u64) -> u64 {
    (n as i128).rem_euclid(p as i128) as u64
}

/// A square root of the base-field element `d` inside `field`, if any.
///
/// Over `F_p` existence is decided by Euler's criterion; over the rationals by
/// integer square tests on numerator and denominator. In `F(sqrt e)` a root
/// exists iff `d` or `d/e` is a square in `F`.
/// `(u + v sqrt e)^2 = a + b sqrt e` with `b != 0`: `u^2 = (a ± sqrt N)/2`
/// where `N = a^2 - e b^2`, and `v = b / 2u`.
fn sqrt_general(field: &Field, x: &FieldElement) -> Option<FieldElement> {
    let base = field.base();
    let n = sqrt_in_field(&base, &x.norm())?;
    let gen = field.generator()?;
    let (a, b) = components(field, x)?;
    let two = base.from_i64(2);
    for cand in [&(&a + &n) / &two, &(&a - &n) / &two] {
        if cand.is_zero() {
            continue;
        }
        if let Some(u) = sqrt_in_field(&base, &cand) {
            let v = &b / &(&u * &two);
            let root = &field.embed(&u).ok()? + &(&field.embed(&v).ok()? * &gen);
            if &root * &root == *x {
                return Some(root);
            }
        }
    }
    None
}

fn components(field: &Field, x: &FieldElement) -> Option<(FieldElement, FieldElement)> {
    let base = field.base();
    match &x.repr {
        Repr::QRat(ab) => Some((base.with(Repr::Rat(ab.0.clone())), base.with(Repr::Rat(ab.1.clone())))),
        Repr::QMod(a, b) => Some((base.with(Repr::Mod(*a)), base.with(Repr::Mod(*b)))),
        _ => None,
    }
}

pub fn sqrt_in_field(field: &Field, d: &FieldElement) -> Option<FieldElement> {
    let x = if &d.field == field {
        d.clone()
    } else {
        field.embed(d).ok()?
    };
    match (&*field.0, &x.repr) {
        (Kind::Rational, Repr::Rat(v)) => rational_sqrt(v).map(|r| field.with(Repr::Rat(r))),
        (Kind::Prime(p), Repr::Mod(v)) => sqrt_mod(*v, *p).map(|r| field.with(Repr::Mod(r))),
        (Kind::QuadRational(_), Repr::QRat(ab)) if !ab.1.is_zero() => sqrt_general(field, &x),
        (Kind::QuadPrime { .. }, Repr::QMod(_, b)) if *b != 0 => sqrt_general(field, &x),
        (Kind::QuadRational(e), Repr::QRat(ab)) => {
            let a = &ab.0;
            if let Some(r) = rational_sqrt(a) {
                return Some(field.pair_rat(r, BigRational::zero()));
            }
            rational_sqrt(&(a / e)).map(|r| field.pair_rat(BigRational::zero(), r))
        }
        (Kind::QuadPrime { p, d: e }, Repr::QMod(a, _)) => {
            if let Some(r) = sqrt_mod(*a, *p) {
                return Some(field.with(Repr::QMod(r, 0)));
            }
            sqrt_mod(mul_mod(*a, inv_mod(*e, *p), *p), *p).map(|r| field.with(Repr::QMod(0, r)))
        }
        _ => None,
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rat(x) => x.is_zero(),
            Repr::Mod(x) => *x == 0,
            Repr::QRat(ab) => ab.0.is_zero() && ab.1.is_zero(),
            Repr::QMod(a, b) => *a == 0 && *b == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    fn check_same(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields(
                self.field.to_string(),
                other.field.to_string(),
            ))
        }
    }

    fn modulus(&self) -> u64 {
        self.field.characteristic()
    }

    fn ext_square_mod(&self) -> u64 {
        match &*self.field.0 {
            Kind::QuadPrime { d, .. } => *d,
            _ => unreachable!(),
        }
    }

    fn ext_square_rat(&self) -> &BigRational {
        match &*self.field.0 {
            Kind::QuadRational(d) => d,
            _ => unreachable!(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a + b),
            (Repr::Mod(a), Repr::Mod(b)) => Repr::Mod(add_mod(*a, *b, self.modulus())),
            (Repr::QRat(x), Repr::QRat(y)) => Repr::QRat(Box::new((&x.0 + &y.0, &x.1 + &y.1))),
            (Repr::QMod(a, b), Repr::QMod(c, d)) => {
                let p = self.modulus();
                Repr::QMod(add_mod(*a, *c, p), add_mod(*b, *d, p))
            }
            _ => unreachable!(),
        };
        Ok(self.field.with(repr))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a - b),
            (Repr::Mod(a), Repr::Mod(b)) => Repr::Mod(sub_mod(*a, *b, self.modulus())),
            (Repr::QRat(x), Repr::QRat(y)) => Repr::QRat(Box::new((&x.0 - &y.0, &x.1 - &y.1))),
            (Repr::QMod(a, b), Repr::QMod(c, d)) => {
                let p = self.modulus();
                Repr::QMod(sub_mod(*a, *c, p), sub_mod(*b, *d, p))
            }
            _ => unreachable!(),
        };
        Ok(self.field.with(repr))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a * b),
            (Repr::Mod(a), Repr::Mod(b)) => Repr::Mod(mul_mod(*a, *b, self.modulus())),
            (Repr::QRat(x), Repr::QRat(y)) => {
                let d = self.ext_square_rat();
                let re = &x.0 * &y.0 + &x.1 * &y.1 * d;
                let im = &x.0 * &y.1 + &x.1 * &y.0;
                Repr::QRat(Box::new((re, im)))
            }
            (Repr::QMod(a, b), Repr::QMod(c, e)) => {
                let p = self.modulus();
                let d = self.ext_square_mod();
                let re = add_mod(mul_mod(*a, *c, p), mul_mod(mul_mod(*b, *e, p), d, p), p);
                let im = add_mod(mul_mod(*a, *e, p), mul_mod(*b, *c, p), p);
                Repr::QMod(re, im)
            }
            _ => unreachable!(),
        };
        Ok(self.field.with(repr))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Rat(a) => Repr::Rat(a.recip()),
            Repr::Mod(a) => Repr::Mod(inv_mod(*a, self.modulus())),
            Repr::QRat(x) => {
                // (a + b r)^-1 = (a - b r) / (a^2 - d b^2)
                let d = self.ext_square_rat();
                let norm = &x.0 * &x.0 - &x.1 * &x.1 * d;
                Repr::QRat(Box::new((&x.0 / &norm, -&x.1 / &norm)))
            }
            Repr::QMod(a, b) => {
                let p = self.modulus();
                let d = self.ext_square_mod();
                let norm = sub_mod(mul_mod(*a, *a, p), mul_mod(mul_mod(*b, *b, p), d, p), p);
                let ni = inv_mod(norm, p);
                Repr::QMod(mul_mod(*a, ni, p), mul_mod(neg_mod(*b, p), ni, p))
            }
        };
        Ok(self.field.with(repr))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Norm `a^2 - d b^2` to the base field (the square for base elements).
    pub fn norm(&self) -> FieldElement {
        match &self.repr {
            Repr::QRat(x) => {
                let d = self.ext_square_rat();
                self.field.base().with(Repr::Rat(&x.0 * &x.0 - &x.1 * &x.1 * d))
            }
            Repr::QMod(a, b) => {
                let p = self.modulus();
                let d = self.ext_square_mod();
                self.field.base().with(Repr::Mod(sub_mod(
                    mul_mod(*a, *a, p),
                    mul_mod(mul_mod(*b, *b, p), d, p),
                    p,
                )))
            }
            _ => self * self,
        }
    }

    /// `a - b sqrt d` (identity on base fields).
    pub fn conjugate(&self) -> FieldElement {
        match &self.repr {
            Repr::QRat(x) => self.field.pair_rat(x.0.clone(), -&x.1),
            Repr::QMod(a, b) => self.field.with(Repr::QMod(*a, neg_mod(*b, self.modulus()))),
            _ => self.clone(),
        }
    }

    /// The rational value, if this element is a rational number.
    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Rat(x) => Some(x.clone()),
            Repr::QRat(x) if x.1.is_zero() => Some(x.0.clone()),
            _ => None,
        }
    }
}

fn fmt_sqrt_tail(f: &mut fmt::Formatter<'_>, d: &dyn fmt::Display, neg: bool) -> fmt::Result {
    if neg {
        write!(f, "*sqrt({d})")
    } else {
        write!(f, "*sqrt{d}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rat(x) => write!(f, "{x}"),
            Repr::Mod(x) => write!(f, "{x}"),
            Repr::QRat(x) => {
                let d = self.ext_square_rat();
                if x.1.is_zero() {
                    return write!(f, "{}", x.0);
                }
                if !x.0.is_zero() {
                    write!(f, "{}", x.0)?;
                    if !x.1.is_negative() {
                        write!(f, "+")?;
                    }
                }
                write!(f, "{}", x.1)?;
                fmt_sqrt_tail(f, d, d.is_negative())
            }
            Repr::QMod(a, b) => {
                let d = self.ext_square_mod();
                if *b == 0 {
                    return write!(f, "{a}");
                }
                if *a != 0 {
                    write!(f, "{a}+")?;
                }
                write!(f, "{b}")?;
                fmt_sqrt_tail(f, &d, false)
            }
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let repr = match &self.repr {
            Repr::Rat(a) => Repr::Rat(-a),
            Repr::Mod(a) => Repr::Mod(neg_mod(*a, self.modulus())),
            Repr::QRat(x) => Repr::QRat(Box::new((-&x.0, -&x.1))),
            Repr::QMod(a, b) => {
                let p = self.modulus();
                Repr::QMod(neg_mod(*a, p), neg_mod(*b, p))
            }
        };
        self.field.with(repr)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("{}: {e}", stringify!($method)))
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl serde::Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
