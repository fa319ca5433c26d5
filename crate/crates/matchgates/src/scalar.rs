//! Exact arithmetic in the field Q(i, √2).
//!
//! Every weight, signature entry, matrix coefficient and Pfaffian in this
//! crate is a [`Scalar`]: an element `a + b·i + c·√2 + d·i·√2` with
//! arbitrary-precision rational components. There is no floating point
//! anywhere; equality of scalars is structural equality of the four reduced
//! rational components, so rank computations and identity checks are
//! bit-exact.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty scalar literal")]
    Empty,
    #[error("malformed term `{0}`")]
    MalformedTerm(String),
    #[error("unknown basis marker `{0}` (expected `i`, `r2` or `ir2`)")]
    UnknownMarker(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An element of Q(i, √2), stored as `a + b·i + c·√2 + d·i·√2`.
///
/// The rational components are kept reduced with positive denominators by
/// `num`, so `==` is exact field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Scalar { a, b, c, d }
    }

    pub fn zero() -> Self {
        Scalar::from_int(0)
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigRational::zero(),
            c: BigRational::zero(),
            d: BigRational::zero(),
        }
    }

    /// `num / den` as a rational scalar. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar {
            a: BigRational::new(BigInt::from(num), BigInt::from(den)),
            b: BigRational::zero(),
            c: BigRational::zero(),
            d: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            a: BigRational::zero(),
            b: BigRational::one(),
            c: BigRational::zero(),
            d: BigRational::zero(),
        }
    }

    /// √2.
    pub fn sqrt2() -> Self {
        Scalar {
            a: BigRational::zero(),
            b: BigRational::zero(),
            c: BigRational::one(),
            d: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// The four rational components `(a, b, c, d)` of `a + b·i + c·√2 + d·i·√2`.
    pub fn components(&self) -> (&BigRational, &BigRational, &BigRational, &BigRational) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    /// Multiplicative inverse. Rationalizes in two steps: first by the
    /// √2-conjugate `A − B√2`, which lands in Q(i), then by the complex
    /// conjugate.
    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // x = A + B√2 with A = a + bi, B = c + di.
        // x · (A − B√2) = A² − 2B² ∈ Q(i); this is nonzero for x ≠ 0
        // because √2 has no square root in Q(i).
        let two = BigRational::from_integer(BigInt::from(2));
        let zr = &self.a * &self.a - &self.b * &self.b
            - &two * (&self.c * &self.c - &self.d * &self.d);
        let zi = &two * (&self.a * &self.b) - &two * &two * (&self.c * &self.d);
        let norm = &zr * &zr + &zi * &zi;
        debug_assert!(!norm.is_zero());
        let conj = Scalar {
            a: self.a.clone(),
            b: self.b.clone(),
            c: -self.c.clone(),
            d: -self.d.clone(),
        };
        let z_inv = Scalar {
            a: &zr / &norm,
            b: -(&zi / &norm),
            c: BigRational::zero(),
            d: BigRational::zero(),
        };
        Ok(&conj * &z_inv)
    }

    pub fn pow(&self, mut n: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            c: &self.c + &rhs.c,
            d: &self.d + &rhs.d,
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            c: &self.c - &rhs.c,
            d: &self.d - &rhs.d,
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // (a₁ + b₁i + c₁√2 + d₁i√2)(a₂ + b₂i + c₂√2 + d₂i√2)
        // with i² = −1 and (√2)² = 2.
        let two = BigRational::from_integer(BigInt::from(2));
        let a = &self.a * &rhs.a - &self.b * &rhs.b
            + &two * (&self.c * &rhs.c - &self.d * &rhs.d);
        let b = &self.a * &rhs.b + &self.b * &rhs.a
            + &two * (&self.c * &rhs.d + &self.d * &rhs.c);
        let c = &self.a * &rhs.c + &self.c * &rhs.a - &self.b * &rhs.d - &self.d * &rhs.b;
        let d = &self.a * &rhs.d + &self.d * &rhs.a + &self.b * &rhs.c + &self.c * &rhs.b;
        Scalar { a, b, c, d }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -self.a.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: -self.d.clone(),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self *= &rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Scalar literals: `R`, `R i`, `R r2`, `R ir2` terms joined by `+`/`-`,
/// where `R ::= int | int/int`. Examples: `1/2 + 3i + 1r2`, `-2ir2`.
/// Whitespace-insensitive; bare markers (`i`, `-r2`) read as coefficient ±1.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: [(&BigRational, &str); 4] = [
            (&self.a, ""),
            (&self.b, "i"),
            (&self.c, "r2"),
            (&self.d, "ir2"),
        ];
        let mut first = true;
        for (r, marker) in parts {
            if r.is_zero() {
                continue;
            }
            if first {
                if r.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if r.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}{}", fmt_rational(&r.abs()), marker)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_term(term: &str) -> Result<Scalar, ParseScalarError> {
    if term.is_empty() {
        return Err(ParseScalarError::MalformedTerm(term.to_string()));
    }
    let split = term
        .find(|ch: char| !(ch.is_ascii_digit() || ch == '/'))
        .unwrap_or(term.len());
    let (num_part, marker) = term.split_at(split);
    let coeff = if num_part.is_empty() {
        BigRational::one()
    } else if let Some((n, d)) = num_part.split_once('/') {
        let n = BigInt::from_str(n)
            .map_err(|_| ParseScalarError::MalformedTerm(term.to_string()))?;
        let d = BigInt::from_str(d)
            .map_err(|_| ParseScalarError::MalformedTerm(term.to_string()))?;
        if d.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(term.to_string()));
        }
        BigRational::new(n, d)
    } else {
        let n = BigInt::from_str(num_part)
            .map_err(|_| ParseScalarError::MalformedTerm(term.to_string()))?;
        BigRational::from_integer(n)
    };
    let zero = BigRational::zero;
    match marker {
        "" if !num_part.is_empty() => Ok(Scalar::new(coeff, zero(), zero(), zero())),
        "i" => Ok(Scalar::new(zero(), coeff, zero(), zero())),
        "r2" => Ok(Scalar::new(zero(), zero(), coeff, zero())),
        "ir2" => Ok(Scalar::new(zero(), zero(), zero(), coeff)),
        other => Err(ParseScalarError::UnknownMarker(other.to_string())),
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s
            .chars()
            .map(|ch| if ch == '\u{2212}' { '-' } else { ch })
            .filter(|ch| !ch.is_whitespace())
            .collect();
        if compact.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        let mut total = Scalar::zero();
        let mut term = String::new();
        let mut negative = false;
        let mut seen_term = false;
        let flush = |total: &mut Scalar,
                     term: &mut String,
                     negative: bool|
         -> Result<(), ParseScalarError> {
            let t = parse_term(term)?;
            *total = &*total + &(if negative { -t } else { t });
            term.clear();
            Ok(())
        };
        for (idx, ch) in compact.chars().enumerate() {
            match ch {
                '+' | '-' if idx > 0 => {
                    flush(&mut total, &mut term, negative)?;
                    negative = ch == '-';
                    seen_term = true;
                }
                '-' => negative = true,
                '+' => {}
                _ => term.push(ch),
            }
        }
        if term.is_empty() && !seen_term {
            return Err(ParseScalarError::Empty);
        }
        flush(&mut total, &mut term, negative)?;
        Ok(total)
    }
}
