//! Exact complex-rational arithmetic.
//!
//! Chamber membership, regularity and the symbolic side of every localization
//! identity are decided over Q(i); floating point enters only when an
//! exponential is finally evaluated. `Rat` is an arbitrary-precision rational
//! and [`ComplexRat`] is the obvious pair with exact field operations.

use num::complex::Complex64;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;

/// Complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexRat {
    pub re: Rat,
    pub im: Rat,
}

impl ComplexRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rat::zero(), Rat::zero())
    }

    pub fn one() -> Self {
        Self::new(Rat::one(), Rat::zero())
    }

    pub fn i() -> Self {
        Self::new(Rat::zero(), Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(Rat::from_integer(n.into()), Rat::zero())
    }

    pub fn from_rat(re: Rat) -> Self {
        Self::new(re, Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    /// Multiply by i^k (k taken mod 4).
    pub fn mul_i_pow(&self, k: u8) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => Self::new(-self.im.clone(), self.re.clone()),
            2 => Self::new(-self.re.clone(), -self.im.clone()),
            _ => Self::new(self.im.clone(), -self.re.clone()),
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for ComplexRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &ComplexRat {
    type Output = ComplexRat;
    fn add(self, rhs: &ComplexRat) -> ComplexRat {
        ComplexRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ComplexRat {
    type Output = ComplexRat;
    fn sub(self, rhs: &ComplexRat) -> ComplexRat {
        ComplexRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ComplexRat {
    type Output = ComplexRat;
    fn mul(self, rhs: &ComplexRat) -> ComplexRat {
        ComplexRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &ComplexRat {
    type Output = ComplexRat;
    /// Panics on division by zero; callers guard with [`ComplexRat::inv`].
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &ComplexRat) -> ComplexRat {
        let inv = rhs.inv().expect("division by zero ComplexRat");
        self * &inv
    }
}

impl Neg for &ComplexRat {
    type Output = ComplexRat;
    fn neg(self) -> ComplexRat {
        ComplexRat::new(-self.re.clone(), -self.im.clone())
    }
}

/// Parse a rational from a string like `"3/7"`, `"-2"`, or a plain decimal
/// like `"0.5"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rat>() {
        return Some(r);
    }
    // decimal form
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if !int_part.chars().all(|c| c.is_ascii_digit()) && !int_part.is_empty() {
        return None;
    }
    if !frac_part.chars().all(|c| c.is_ascii_digit()) || frac_part.is_empty() {
        return None;
    }
    let digits = format!("{}{}", if int_part.is_empty() { "0" } else { int_part }, frac_part);
    let numer: num::BigInt = digits.parse().ok()?;
    let denom = num::BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(Rat::new(numer * num::BigInt::from(sign), denom))
}
