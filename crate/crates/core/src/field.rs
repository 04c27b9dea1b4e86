//! The fixed coefficient field Q(i, √3) and its formal quadratic extension by
//! √33.
//!
//! Every scalar produced anywhere in the crate lives here: i enters through
//! the phases of integral-order conjugation, √3 through γ^{1/2}, and √33 only
//! through the two exceptional density weights handled by the jump-4
//! invariant. [`Field`] abstracts the two so the symbol and quantization
//! machinery can run over either.

use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Element a + b·i + c·√3 + d·i√3 with rational components.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FieldValue {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl FieldValue {
    pub fn zero() -> Self {
        FieldValue::default()
    }

    pub fn one() -> Self {
        FieldValue::from(Rational::one())
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        FieldValue {
            b: Rational::one(),
            ..Default::default()
        }
    }

    /// √3.
    pub fn sqrt3() -> Self {
        FieldValue {
            c: Rational::one(),
            ..Default::default()
        }
    }

    /// r·√3.
    pub fn sqrt3_times(r: &Rational) -> Self {
        FieldValue {
            c: r.clone(),
            ..Default::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// Some(r) iff the value is the plain rational r.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.b.is_zero() && self.c.is_zero() && self.d.is_zero() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    /// Some(r) iff the value is r·√3.
    pub fn as_sqrt3_multiple(&self) -> Option<Rational> {
        if self.a.is_zero() && self.b.is_zero() && self.d.is_zero() {
            Some(self.c.clone())
        } else {
            None
        }
    }

    /// Galois conjugate √3 ↦ −√3.
    pub fn conj_sqrt3(&self) -> Self {
        FieldValue {
            a: self.a.clone(),
            b: self.b.clone(),
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// Galois conjugate i ↦ −i.
    pub fn conj_i(&self) -> Self {
        FieldValue {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
            d: -&self.d,
        }
    }

    pub fn inv(&self) -> Option<FieldValue> {
        if self.is_zero() {
            return None;
        }
        // First collapse the √3 part: z · conj_sqrt3(z) lies in Q(i).
        let bar = self.conj_sqrt3();
        let w = self * &bar; // w = u + v·i with zero √3 components
        debug_assert!(w.c.is_zero() && w.d.is_zero());
        // Then invert in Q(i).
        let norm = &w.a * &w.a + &w.b * &w.b;
        let ninv = norm.inv()?;
        let winv = FieldValue {
            a: &w.a * &ninv,
            b: -&(&w.b * &ninv),
            c: Rational::zero(),
            d: Rational::zero(),
        };
        Some(&bar * &winv)
    }

    /// Exact division; `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &FieldValue) -> Option<FieldValue> {
        Some(self * &rhs.inv()?)
    }

    /// i^(k mod 4), k arbitrary sign.
    pub fn i_power(k: i64) -> FieldValue {
        match k.rem_euclid(4) {
            0 => FieldValue::one(),
            1 => FieldValue::i(),
            2 => -&FieldValue::one(),
            _ => -&FieldValue::i(),
        }
    }
}

impl From<Rational> for FieldValue {
    fn from(a: Rational) -> Self {
        FieldValue {
            a,
            ..Default::default()
        }
    }
}

impl From<i64> for FieldValue {
    fn from(n: i64) -> Self {
        FieldValue::from(Rational::from(n))
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut part = |f: &mut fmt::Formatter<'_>, r: &Rational, sym: &str| -> fmt::Result {
            if r.is_zero() {
                return Ok(());
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if sym.is_empty() {
                write!(f, "{r}")
            } else if *r == Rational::one() {
                write!(f, "{sym}")
            } else {
                write!(f, "{r}*{sym}")
            }
        };
        part(f, &self.a, "")?;
        part(f, &self.b, "i")?;
        part(f, &self.c, "sqrt3")?;
        part(f, &self.d, "i*sqrt3")
    }
}

impl fmt::Debug for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    fn add(self, rhs: &FieldValue) -> FieldValue {
        FieldValue {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            c: &self.c + &rhs.c,
            d: &self.d + &rhs.d,
        }
    }
}

impl Sub<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    fn sub(self, rhs: &FieldValue) -> FieldValue {
        FieldValue {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            c: &self.c - &rhs.c,
            d: &self.d - &rhs.d,
        }
    }
}

impl Mul<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    fn mul(self, rhs: &FieldValue) -> FieldValue {
        // Basis products: i² = −1, (√3)² = 3, (i√3)² = −3, i·√3 = i√3.
        let three = Rational::from(3);
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&rhs.a, &rhs.b, &rhs.c, &rhs.d);
        FieldValue {
            a: a1 * a2 - b1 * b2 + &three * &(c1 * c2) - &three * &(d1 * d2),
            b: a1 * b2 + b1 * a2 + &three * &(c1 * d2) + &three * &(d1 * c2),
            c: a1 * c2 + c1 * a2 - b1 * d2 - d1 * b2,
            d: a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        }
    }
}

impl Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        FieldValue {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }
}

macro_rules! fv_owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = FieldValue;
            fn add(self, rhs: $t) -> FieldValue {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = FieldValue;
            fn sub(self, rhs: $t) -> FieldValue {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = FieldValue;
            fn mul(self, rhs: $t) -> FieldValue {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = FieldValue;
            fn neg(self) -> FieldValue {
                -&self
            }
        }
    };
}
fv_owned_ops!(FieldValue);

impl AddAssign<&FieldValue> for FieldValue {
    fn add_assign(&mut self, rhs: &FieldValue) {
        *self = &*self + rhs;
    }
}
impl SubAssign<&FieldValue> for FieldValue {
    fn sub_assign(&mut self, rhs: &FieldValue) {
        *self = &*self - rhs;
    }
}
impl MulAssign<&FieldValue> for FieldValue {
    fn mul_assign(&mut self, rhs: &FieldValue) {
        *self = &*self * rhs;
    }
}

/// Field abstraction over which the symbol calculus and the quantization run.
///
/// Implemented by [`FieldValue`] and by the √33 extension [`Quad33`]. All
/// operations are exact; `inv` returns `None` on zero.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Some(r) iff the element is the plain rational r.
    fn as_rational(&self) -> Option<Rational>;
    /// The imaginary unit, for conjugation phases.
    fn imaginary_unit() -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from(n))
    }

    /// Exact division by a provably nonzero divisor.
    fn div_exact(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv().expect("division by zero in exact field"))
    }
}

impl Field for FieldValue {
    fn zero() -> Self {
        FieldValue::zero()
    }
    fn one() -> Self {
        FieldValue::one()
    }
    fn from_rational(r: &Rational) -> Self {
        FieldValue::from(r.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        FieldValue::inv(self)
    }
    fn is_zero(&self) -> bool {
        FieldValue::is_zero(self)
    }
    fn as_rational(&self) -> Option<Rational> {
        FieldValue::as_rational(self)
    }
    fn imaginary_unit() -> Self {
        FieldValue::i()
    }
}

/// Formal quadratic extension: a + b·√33 with components in Q(i, √3).
///
/// √33 = √3·√11 is not in Q(i, √3), so this really is a field.
#[derive(Clone, PartialEq, Default)]
pub struct Quad33 {
    pub a: FieldValue,
    pub b: FieldValue,
}

impl Quad33 {
    pub fn new(a: FieldValue, b: FieldValue) -> Self {
        Quad33 { a, b }
    }

    /// r + s·√33 from rational components.
    pub fn from_rationals(r: Rational, s: Rational) -> Self {
        Quad33 {
            a: FieldValue::from(r),
            b: FieldValue::from(s),
        }
    }

    /// √33.
    pub fn sqrt33() -> Self {
        Quad33 {
            a: FieldValue::zero(),
            b: FieldValue::one(),
        }
    }

    /// Components as rationals, when both are plain rationals.
    pub fn as_rational_pair(&self) -> Option<(Rational, Rational)> {
        Some((self.a.as_rational()?, self.b.as_rational()?))
    }

    /// Galois conjugate √33 ↦ −√33.
    pub fn conj33(&self) -> Self {
        Quad33 {
            a: self.a.clone(),
            b: -&self.b,
        }
    }
}

impl From<FieldValue> for Quad33 {
    fn from(a: FieldValue) -> Self {
        Quad33 {
            a,
            b: FieldValue::zero(),
        }
    }
}

impl fmt::Display for Quad33 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})*sqrt33", self.b)
        } else {
            write!(f, "{} + ({})*sqrt33", self.a, self.b)
        }
    }
}

impl fmt::Debug for Quad33 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Field for Quad33 {
    fn zero() -> Self {
        Quad33::default()
    }
    fn one() -> Self {
        Quad33::from(FieldValue::one())
    }
    fn from_rational(r: &Rational) -> Self {
        Quad33::from(FieldValue::from(r.clone()))
    }
    fn add(&self, rhs: &Self) -> Self {
        Quad33 {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Quad33 {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let t33 = FieldValue::from(33);
        Quad33 {
            a: &(&self.a * &rhs.a) + &(&t33 * &(&self.b * &rhs.b)),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.a),
        }
    }
    fn neg(&self) -> Self {
        Quad33 {
            a: -&self.a,
            b: -&self.b,
        }
    }
    fn inv(&self) -> Option<Self> {
        if Field::is_zero(self) {
            return None;
        }
        // (a + b√33)⁻¹ = (a − b√33)/(a² − 33b²); the norm is nonzero because
        // √33 is not in the base field.
        let t33 = FieldValue::from(33);
        let norm = &(&self.a * &self.a) - &(&t33 * &(&self.b * &self.b));
        let ninv = norm.inv()?;
        Some(Quad33 {
            a: &self.a * &ninv,
            b: -&(&self.b * &ninv),
        })
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn as_rational(&self) -> Option<Rational> {
        if self.b.is_zero() {
            self.a.as_rational()
        } else {
            None
        }
    }
    fn imaginary_unit() -> Self {
        Quad33::from(FieldValue::i())
    }
}
